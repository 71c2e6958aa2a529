//! The generational loop: speciation by compatibility distance, species
//! fitness and stagnation, offspring allocation with elitism, reproduction.

use crate::error::{Error, Result};
use crate::genome::{Genome, GenomeConfig, GenomeId, InnovationRegistry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type SpeciesId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeciesFitness {
    /// Mean member fitness; damps the impact of one lucky episode.
    #[default]
    Mean,
    Max,
}

impl SpeciesFitness {
    fn apply(self, fitnesses: &[f64]) -> f64 {
        match self {
            SpeciesFitness::Mean => crate::stats::mean(fitnesses),
            SpeciesFitness::Max => fitnesses.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PopulationConfig {
    pub pop_size: usize,
    /// Genomes closer than this to a species representative join it.
    pub compatibility_threshold: f64,
    pub compatibility_disjoint_coefficient: f64,
    pub compatibility_weight_coefficient: f64,
    pub species_fitness: SpeciesFitness,
    /// Generations without species-fitness improvement before extinction.
    pub max_stagnation: u64,
    /// This many of the fittest species are never removed by stagnation.
    pub species_elitism: usize,
    /// Members copied verbatim into the next generation, per species.
    pub elitism: usize,
    /// Fraction of each species (by fitness rank) eligible as parents.
    pub survival_threshold: f64,
    pub min_species_size: usize,
    /// Reinitialize from minimal genomes if every species goes extinct.
    pub reset_on_extinction: bool,
}

impl Default for PopulationConfig {
    fn default() -> Self {
        PopulationConfig {
            pop_size: 300,
            compatibility_threshold: 3.0,
            compatibility_disjoint_coefficient: 1.0,
            compatibility_weight_coefficient: 0.5,
            species_fitness: SpeciesFitness::Mean,
            max_stagnation: 15,
            species_elitism: 2,
            elitism: 2,
            survival_threshold: 0.2,
            min_species_size: 2,
            reset_on_extinction: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub id: SpeciesId,
    /// Snapshot genome that new members are measured against.
    pub representative: Genome,
    pub members: Vec<GenomeId>,
    pub fitness: Option<f64>,
    pub fitness_history: Vec<f64>,
    pub last_improved: u64,
    pub created: u64,
}

impl Species {
    fn record_fitness(&mut self, value: f64, generation: u64) {
        let prev_best = self
            .fitness_history
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if self.fitness_history.is_empty() || value > prev_best {
            self.last_improved = generation;
        }
        self.fitness = Some(value);
        self.fitness_history.push(value);
    }
}

/// One row per completed generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: u64,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub fitness_stdev: f64,
    pub species_count: usize,
    pub best_genome_id: GenomeId,
    /// Running maximum of `best_fitness` across the run.
    pub best_ever_fitness: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub records: Vec<GenerationRecord>,
}

impl EvolutionReport {
    pub fn extend(&mut self, other: EvolutionReport) {
        self.records.extend(other.records);
    }
}

/// Fitness source for one generation. Receives every genome in the
/// population and must return a finite fitness for each, keyed by genome id;
/// evaluation may fan out across threads internally.
pub trait GenerationEvaluator {
    fn evaluate(
        &mut self,
        generation: u64,
        genomes: &BTreeMap<GenomeId, Genome>,
    ) -> Result<BTreeMap<GenomeId, f64>>;
}

impl<F> GenerationEvaluator for F
where
    F: FnMut(u64, &BTreeMap<GenomeId, Genome>) -> Result<BTreeMap<GenomeId, f64>>,
{
    fn evaluate(
        &mut self,
        generation: u64,
        genomes: &BTreeMap<GenomeId, Genome>,
    ) -> Result<BTreeMap<GenomeId, f64>> {
        self(generation, genomes)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Population {
    pub generation: u64,
    pub genomes: BTreeMap<GenomeId, Genome>,
    pub species: BTreeMap<SpeciesId, Species>,
    pub registry: InnovationRegistry,
    pub genome_config: GenomeConfig,
    pub config: PopulationConfig,
    num_inputs: usize,
    num_outputs: usize,
    rng: ChaCha8Rng,
    next_genome_id: GenomeId,
    next_species_id: SpeciesId,
    /// Best genome of the most recently evaluated generation.
    best_final: Option<Genome>,
    /// Best genome seen across the whole run.
    best_ever: Option<Genome>,
}

impl Population {
    pub fn new(
        num_inputs: usize,
        num_outputs: usize,
        genome_config: GenomeConfig,
        config: PopulationConfig,
        seed: u64,
    ) -> Result<Population> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut registry = InnovationRegistry::new(num_outputs);
        let mut genomes = BTreeMap::new();
        for id in 0..config.pop_size as GenomeId {
            let g = Genome::minimal(id, num_inputs, num_outputs, &mut registry, &mut rng, &genome_config)?;
            genomes.insert(id, g);
        }
        Ok(Population {
            generation: 0,
            next_genome_id: genomes.len() as GenomeId,
            genomes,
            species: BTreeMap::new(),
            registry,
            genome_config,
            config,
            num_inputs,
            num_outputs,
            rng,
            next_species_id: 0,
            best_final: None,
            best_ever: None,
        })
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.num_outputs
    }

    /// Best genome of the last evaluated generation (with its fitness set).
    pub fn best_genome(&self) -> Option<&Genome> {
        self.best_final.as_ref()
    }

    pub fn best_ever_genome(&self) -> Option<&Genome> {
        self.best_ever.as_ref()
    }

    /// Partition the population: each genome joins the first species whose
    /// representative lies within the compatibility threshold, or founds a
    /// new species. Afterwards each representative is re-chosen as the
    /// member closest to the previous representative.
    pub fn speciate(&mut self) {
        let dc = self.config.compatibility_disjoint_coefficient;
        let wc = self.config.compatibility_weight_coefficient;
        let threshold = self.config.compatibility_threshold;

        // Species scanned in id order; species founded during the pass are
        // candidates for the genomes that follow.
        let mut lineup: Vec<(SpeciesId, Genome)> = self
            .species
            .iter()
            .map(|(&sid, sp)| (sid, sp.representative.clone()))
            .collect();
        let mut assignments: BTreeMap<SpeciesId, Vec<GenomeId>> =
            self.species.keys().map(|&sid| (sid, Vec::new())).collect();

        for (&gid, genome) in &self.genomes {
            let found = lineup
                .iter()
                .find(|(_, rep)| genome.distance(rep, dc, wc) < threshold)
                .map(|&(sid, _)| sid);
            match found {
                Some(sid) => assignments.get_mut(&sid).expect("listed species").push(gid),
                None => {
                    let sid = self.next_species_id;
                    self.next_species_id += 1;
                    self.species.insert(
                        sid,
                        Species {
                            id: sid,
                            representative: genome.clone(),
                            members: Vec::new(),
                            fitness: None,
                            fitness_history: Vec::new(),
                            last_improved: self.generation,
                            created: self.generation,
                        },
                    );
                    lineup.push((sid, genome.clone()));
                    assignments.insert(sid, vec![gid]);
                }
            }
        }

        for (sid, members) in assignments {
            if members.is_empty() {
                self.species.remove(&sid);
                continue;
            }
            let sp = self.species.get_mut(&sid).expect("assigned species");
            let rep_id = members
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    let da = self.genomes[&a].distance(&sp.representative, dc, wc);
                    let db = self.genomes[&b].distance(&sp.representative, dc, wc);
                    da.partial_cmp(&db).unwrap().then(a.cmp(&b))
                })
                .expect("non-empty members");
            sp.representative = self.genomes[&rep_id].clone();
            sp.members = members;
        }
    }

    /// Store per-genome fitnesses and refresh species fitness/history.
    fn assign_fitness(&mut self, fitnesses: &BTreeMap<GenomeId, f64>) -> Result<()> {
        for (&gid, genome) in self.genomes.iter() {
            let f = *fitnesses
                .get(&gid)
                .ok_or(Error::MissingFitness { genome: gid })?;
            if !f.is_finite() {
                return Err(Error::NonFiniteFitness { genome: gid });
            }
            let _ = genome;
        }
        for genome in self.genomes.values_mut() {
            genome.fitness = Some(fitnesses[&genome.id]);
        }
        let generation = self.generation;
        let aggregator = self.config.species_fitness;
        for sp in self.species.values_mut() {
            let member_fitness: Vec<f64> =
                sp.members.iter().map(|gid| fitnesses[gid]).collect();
            sp.record_fitness(aggregator.apply(&member_fitness), generation);
        }
        Ok(())
    }

    /// Remove species that have not improved for `max_stagnation`
    /// generations, always retaining the `species_elitism` fittest.
    pub fn update_stagnation(&mut self) -> Vec<SpeciesId> {
        let mut ranked: Vec<(SpeciesId, f64)> = self
            .species
            .values()
            .map(|sp| (sp.id, sp.fitness.expect("species fitness set before stagnation")))
            .collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let protected: Vec<SpeciesId> = ranked
            .iter()
            .take(self.config.species_elitism)
            .map(|&(sid, _)| sid)
            .collect();
        let extinct: Vec<SpeciesId> = self
            .species
            .values()
            .filter(|sp| {
                self.generation - sp.last_improved >= self.config.max_stagnation
                    && !protected.contains(&sp.id)
            })
            .map(|sp| sp.id)
            .collect();
        for sid in &extinct {
            self.species.remove(sid);
        }
        extinct
    }

    /// Distribute `pop_size` offspring over the living species: a floor of
    /// `min_species_size` each, the remainder proportional to adjusted
    /// species fitness (shifted so the minimum is zero), rounded by largest
    /// remainder so the counts sum exactly.
    pub fn allocate_offspring(&self) -> BTreeMap<SpeciesId, usize> {
        let living: Vec<(SpeciesId, f64)> = self
            .species
            .values()
            .map(|sp| (sp.id, sp.fitness.expect("species fitness set before allocation")))
            .collect();
        if living.is_empty() {
            return BTreeMap::new();
        }
        let pop_size = self.config.pop_size;
        let floor = self.config.min_species_size;

        if floor * living.len() >= pop_size {
            // Degenerate: floors alone exhaust the budget. Hand out floors
            // by fitness rank until it runs dry.
            let mut ranked = living.clone();
            ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
            let mut left = pop_size;
            let mut counts = BTreeMap::new();
            for (sid, _) in ranked {
                let take = floor.min(left);
                counts.insert(sid, take);
                left -= take;
            }
            return counts;
        }

        let min_fit = living.iter().map(|&(_, f)| f).fold(f64::INFINITY, f64::min);
        let raw: Vec<f64> = living.iter().map(|&(_, f)| f - min_fit).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = if total > 0.0 {
            raw.iter().map(|r| r / total).collect()
        } else {
            vec![1.0 / living.len() as f64; living.len()]
        };

        let remaining = pop_size - floor * living.len();
        let quotas: Vec<f64> = weights.iter().map(|w| w * remaining as f64).collect();
        let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let mut leftover = remaining - counts.iter().sum::<usize>();
        let mut by_fraction: Vec<usize> = (0..living.len()).collect();
        by_fraction.sort_by(|&i, &j| {
            let fi = quotas[i] - quotas[i].floor();
            let fj = quotas[j] - quotas[j].floor();
            fj.partial_cmp(&fi).unwrap().then(living[i].0.cmp(&living[j].0))
        });
        for &i in &by_fraction {
            if leftover == 0 {
                break;
            }
            counts[i] += 1;
            leftover -= 1;
        }

        living
            .iter()
            .zip(counts)
            .map(|(&(sid, _), c)| (sid, floor + c))
            .collect()
    }

    /// Build the next generation: per species, copy the `elitism` best
    /// members verbatim (fitness cleared), then fill the remaining slots
    /// with mutated crossover offspring of parents drawn from the
    /// `survival_threshold` top fraction.
    pub fn reproduce(&mut self, allocation: &BTreeMap<SpeciesId, usize>) {
        let mut next: BTreeMap<GenomeId, Genome> = BTreeMap::new();
        for (&sid, &count) in allocation {
            let sp = &self.species[&sid];
            let mut ranked: Vec<GenomeId> = sp.members.clone();
            ranked.sort_by(|&a, &b| {
                let fa = self.genomes[&a].fitness.expect("evaluated");
                let fb = self.genomes[&b].fitness.expect("evaluated");
                fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
            });

            let mut remaining = count;
            for &gid in ranked.iter().take(self.config.elitism) {
                if remaining == 0 {
                    break;
                }
                let mut elite = self.genomes[&gid].clone();
                elite.fitness = None;
                next.insert(gid, elite);
                remaining -= 1;
            }

            let cutoff = ((self.config.survival_threshold * ranked.len() as f64).ceil() as usize)
                .max(2)
                .min(ranked.len());
            let pool = &ranked[..cutoff];
            for _ in 0..remaining {
                let p1 = pool[self.rng.random_range(0..pool.len())];
                let p2 = pool[self.rng.random_range(0..pool.len())];
                let (fitter, other) = order_parents(&self.genomes, p1, p2);
                let child_id = self.next_genome_id;
                self.next_genome_id += 1;
                let mut child = Genome::crossover(
                    &self.genomes[&fitter],
                    &self.genomes[&other],
                    child_id,
                    &mut self.rng,
                    &self.genome_config,
                )
                .expect("species members share arity");
                child.mutate(&mut self.registry, &mut self.rng, &self.genome_config);
                next.insert(child_id, child);
            }
        }
        self.genomes = next;
        self.generation += 1;
    }

    /// Run `generations` full cycles: speciate → evaluate → stagnation →
    /// allocate → reproduce. Returns one record per completed generation.
    pub fn evolve<E: GenerationEvaluator>(
        &mut self,
        evaluator: &mut E,
        generations: u64,
    ) -> Result<EvolutionReport> {
        let mut report = EvolutionReport::default();
        for _ in 0..generations {
            self.speciate();
            let fitnesses = evaluator.evaluate(self.generation, &self.genomes)?;
            self.assign_fitness(&fitnesses)?;

            let (&best_id, best_fit) = fitnesses
                .iter()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(a.0)))
                .expect("population is never empty");
            let all: Vec<f64> = fitnesses.values().copied().collect();
            self.best_final = Some(self.genomes[&best_id].clone());
            let best_ever_fitness = match &self.best_ever {
                Some(g) if g.fitness.unwrap_or(f64::NEG_INFINITY) >= *best_fit => {
                    g.fitness.expect("best ever carries fitness")
                }
                _ => {
                    self.best_ever = self.best_final.clone();
                    *best_fit
                }
            };
            report.records.push(GenerationRecord {
                generation: self.generation,
                best_fitness: *best_fit,
                mean_fitness: crate::stats::mean(&all),
                fitness_stdev: crate::stats::sample_std(&all),
                species_count: self.species.len(),
                best_genome_id: best_id,
                best_ever_fitness,
            });

            self.update_stagnation();
            if self.species.is_empty() {
                if !self.config.reset_on_extinction {
                    return Err(Error::TotalExtinction);
                }
                log::warn!("all species extinct at generation {}; reinitializing", self.generation);
                self.reset_genomes()?;
                self.generation += 1;
                continue;
            }

            let allocation = self.allocate_offspring();
            self.reproduce(&allocation);
        }
        Ok(report)
    }

    fn reset_genomes(&mut self) -> Result<()> {
        let mut genomes = BTreeMap::new();
        for _ in 0..self.config.pop_size {
            let id = self.next_genome_id;
            self.next_genome_id += 1;
            let g = Genome::minimal(
                id,
                self.num_inputs,
                self.num_outputs,
                &mut self.registry,
                &mut self.rng,
                &self.genome_config,
            )?;
            genomes.insert(id, g);
        }
        self.genomes = genomes;
        self.species.clear();
        Ok(())
    }
}

fn order_parents(
    genomes: &BTreeMap<GenomeId, Genome>,
    p1: GenomeId,
    p2: GenomeId,
) -> (GenomeId, GenomeId) {
    let f1 = genomes[&p1].fitness.expect("evaluated");
    let f2 = genomes[&p2].fitness.expect("evaluated");
    if f2 > f1 {
        (p2, p1)
    } else {
        (p1, p2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(pop_size: usize) -> PopulationConfig {
        PopulationConfig {
            pop_size,
            ..PopulationConfig::default()
        }
    }

    fn constant_evaluator(
        value: f64,
    ) -> impl FnMut(u64, &BTreeMap<GenomeId, Genome>) -> Result<BTreeMap<GenomeId, f64>> {
        move |_gen, genomes| Ok(genomes.keys().map(|&id| (id, value)).collect())
    }

    /// Fitness that depends only on genome structure, so re-evaluation is
    /// stable across generations.
    fn weight_sum_evaluator(
    ) -> impl FnMut(u64, &BTreeMap<GenomeId, Genome>) -> Result<BTreeMap<GenomeId, f64>> {
        |_gen, genomes| {
            Ok(genomes
                .iter()
                .map(|(&id, g)| {
                    let s: f64 = g.connections.values().map(|c| c.weight.tanh()).sum();
                    (id, s)
                })
                .collect())
        }
    }

    #[test]
    fn identical_genomes_form_one_species() {
        let mut pop = Population::new(2, 1, GenomeConfig::default(), small_config(10), 1).unwrap();
        let template = pop.genomes[&0].clone();
        for (idx, g) in pop.genomes.values_mut().enumerate() {
            let mut c = template.clone();
            c.id = idx as GenomeId;
            *g = c;
        }
        pop.speciate();
        assert_eq!(pop.species.len(), 1);
        let sp = pop.species.values().next().unwrap();
        assert_eq!(sp.members.len(), 10);
    }

    #[test]
    fn infinite_threshold_gives_one_species() {
        let mut cfg = small_config(20);
        cfg.compatibility_threshold = f64::INFINITY;
        let mut pop = Population::new(3, 2, GenomeConfig::default(), cfg, 2).unwrap();
        pop.speciate();
        assert_eq!(pop.species.len(), 1);
    }

    #[test]
    fn weight_clusters_split_into_two_species() {
        let mut pop = Population::new(2, 1, GenomeConfig::default(), small_config(10), 3).unwrap();
        let template = pop.genomes[&0].clone();
        for (i, g) in pop.genomes.values_mut().enumerate() {
            let mut c = template.clone();
            c.id = i as GenomeId;
            // Two tight clusters: weight offset 0 and weight offset 20.
            // Intra-cluster distance 0, inter-cluster 0.5 · (20+20) / 2 = 10.
            let offset = if i < 5 { 0.0 } else { 20.0 };
            for conn in c.connections.values_mut() {
                conn.weight = offset;
            }
            *g = c;
        }
        pop.speciate();
        assert_eq!(pop.species.len(), 2);
        let sizes: Vec<usize> = pop.species.values().map(|s| s.members.len()).collect();
        assert_eq!(sizes, vec![5, 5]);
    }

    #[test]
    fn speciation_partitions_the_population() {
        let mut pop =
            Population::new(4, 2, GenomeConfig::default(), small_config(50), 4).unwrap();
        pop.speciate();
        let mut seen: Vec<GenomeId> = pop
            .species
            .values()
            .flat_map(|s| s.members.iter().copied())
            .collect();
        seen.sort_unstable();
        let expected: Vec<GenomeId> = pop.genomes.keys().copied().collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn improving_species_is_never_stagnant() {
        let mut pop = Population::new(2, 1, GenomeConfig::default(), small_config(4), 5).unwrap();
        pop.speciate();
        assert_eq!(pop.species.len(), 1);
        for g in 0..40 {
            pop.generation = g;
            let sid = *pop.species.keys().next().unwrap();
            pop.species.get_mut(&sid).unwrap().record_fitness(g as f64, g);
            // With a single species it is always protected anyway; drop the
            // protection to test the stagnation rule itself.
            pop.config.species_elitism = 0;
            assert!(pop.update_stagnation().is_empty());
        }
    }

    #[test]
    fn flat_species_goes_extinct_after_max_stagnation() {
        let mut pop = Population::new(2, 1, GenomeConfig::default(), small_config(4), 6).unwrap();
        pop.config.species_elitism = 0;
        pop.config.max_stagnation = 5;
        pop.speciate();
        let sid = *pop.species.keys().next().unwrap();
        for g in 0..=6 {
            pop.generation = g;
            pop.species.get_mut(&sid).unwrap().record_fitness(1.0, g);
            let extinct = pop.update_stagnation();
            if g < 5 {
                assert!(extinct.is_empty(), "extinct too early at generation {g}");
            } else {
                assert_eq!(extinct, vec![sid]);
                return;
            }
        }
        panic!("species never went extinct");
    }

    #[test]
    fn species_elitism_protects_the_fittest_stagnant_species() {
        let mut pop = Population::new(2, 1, GenomeConfig::default(), small_config(6), 7).unwrap();
        pop.config.max_stagnation = 3;
        pop.config.species_elitism = 2;
        // Three hand-built stagnant species with distinct fitnesses.
        pop.species.clear();
        let rep = pop.genomes[&0].clone();
        for (sid, fit) in [(0u64, 1.0), (1, 3.0), (2, 2.0)] {
            let mut sp = Species {
                id: sid,
                representative: rep.clone(),
                members: vec![sid],
                fitness: None,
                fitness_history: Vec::new(),
                last_improved: 0,
                created: 0,
            };
            for g in 0..4 {
                sp.record_fitness(fit, g);
            }
            sp.last_improved = 0;
            pop.species.insert(sid, sp);
        }
        pop.generation = 4;
        let extinct = pop.update_stagnation();
        assert_eq!(extinct, vec![0]);
        let mut left: Vec<SpeciesId> = pop.species.keys().copied().collect();
        left.sort_unstable();
        assert_eq!(left, vec![1, 2]);
    }

    #[test]
    fn allocation_sums_to_pop_size_with_floors() {
        let mut pop = Population::new(2, 1, GenomeConfig::default(), small_config(300), 8).unwrap();
        pop.speciate();
        // Force three species with chosen fitnesses.
        pop.species.clear();
        let rep = pop.genomes[&0].clone();
        for (sid, fit) in [(0u64, 0.0), (1, 5.0), (2, 10.0)] {
            pop.species.insert(
                sid,
                Species {
                    id: sid,
                    representative: rep.clone(),
                    members: vec![sid],
                    fitness: Some(fit),
                    fitness_history: vec![fit],
                    last_improved: 0,
                    created: 0,
                },
            );
        }
        let alloc = pop.allocate_offspring();
        assert_eq!(alloc.values().sum::<usize>(), 300);
        // Minimum-fitness species still receives the floor.
        assert_eq!(alloc[&0], 2);
        assert!(alloc[&2] > alloc[&1]);
    }

    #[test]
    fn equal_fitness_species_split_evenly() {
        let mut pop = Population::new(2, 1, GenomeConfig::default(), small_config(301), 9).unwrap();
        pop.species.clear();
        let rep = pop.genomes[&0].clone();
        for sid in [0u64, 1] {
            pop.species.insert(
                sid,
                Species {
                    id: sid,
                    representative: rep.clone(),
                    members: vec![sid],
                    fitness: Some(7.0),
                    fitness_history: vec![7.0],
                    last_improved: 0,
                    created: 0,
                },
            );
        }
        let alloc = pop.allocate_offspring();
        assert_eq!(alloc.values().sum::<usize>(), 301);
        let a = alloc[&0] as i64;
        let b = alloc[&1] as i64;
        assert!((a - b).abs() <= 1, "{a} vs {b}");
    }

    #[test]
    fn single_species_takes_everything() {
        let mut pop = Population::new(2, 1, GenomeConfig::default(), small_config(50), 10).unwrap();
        pop.speciate();
        let mut eval = constant_evaluator(1.0);
        let fits = eval(0, &pop.genomes).unwrap();
        pop.assign_fitness(&fits).unwrap();
        let alloc = pop.allocate_offspring();
        assert_eq!(alloc.len(), 1);
        assert_eq!(alloc.values().sum::<usize>(), 50);
    }

    #[test]
    fn elites_survive_reproduction_bit_identical() {
        let mut pop = Population::new(3, 1, GenomeConfig::default(), small_config(20), 11).unwrap();
        pop.speciate();
        let mut eval = weight_sum_evaluator();
        let fits = eval(0, &pop.genomes).unwrap();
        pop.assign_fitness(&fits).unwrap();

        // Identify the two best members of each species beforehand.
        let mut expected: Vec<(GenomeId, Genome)> = Vec::new();
        for sp in pop.species.values() {
            let mut ranked = sp.members.clone();
            ranked.sort_by(|&a, &b| {
                fits[&b].partial_cmp(&fits[&a]).unwrap().then(a.cmp(&b))
            });
            for &gid in ranked.iter().take(2) {
                expected.push((gid, pop.genomes[&gid].clone()));
            }
        }
        let alloc = pop.allocate_offspring();
        pop.reproduce(&alloc);
        for (gid, original) in expected {
            let sp_alloc = alloc
                .iter()
                .find(|(sid, _)| pop.species.get(sid).is_some())
                .map(|(_, &c)| c)
                .unwrap_or(0);
            let _ = sp_alloc;
            let copied = pop.genomes.get(&gid).expect("elite carried over");
            assert_eq!(copied.nodes, original.nodes);
            assert_eq!(copied.connections, original.connections);
            assert_eq!(copied.fitness, None);
        }
    }

    #[test]
    fn two_member_species_with_two_slots_copies_both() {
        let mut pop = Population::new(2, 1, GenomeConfig::default(), small_config(2), 12).unwrap();
        pop.speciate();
        let mut eval = constant_evaluator(1.0);
        let fits = eval(0, &pop.genomes).unwrap();
        pop.assign_fitness(&fits).unwrap();
        let before: Vec<Genome> = pop.genomes.values().cloned().collect();
        let alloc = pop.allocate_offspring();
        pop.reproduce(&alloc);
        assert_eq!(pop.genomes.len(), 2);
        for original in before {
            let copied = &pop.genomes[&original.id];
            assert_eq!(copied.connections, original.connections);
        }
    }

    #[test]
    fn parents_come_only_from_the_survival_pool() {
        // The parent pool is the top ceil(0.2 · 10) = 2 members by fitness.
        let cutoff = ((0.2f64 * 10.0).ceil() as usize).max(2);
        assert_eq!(cutoff, 2);
        // Instrument the draw directly over many samples.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let pool: Vec<GenomeId> = (0..10).collect();
        let pool = &pool[..cutoff];
        for _ in 0..10_000 {
            let pick = pool[rng.random_range(0..pool.len())];
            assert!(pick < 2, "parent drawn outside the top fraction");
        }
    }

    #[test]
    fn evolve_zero_generations_is_a_noop() {
        let mut pop = Population::new(2, 1, GenomeConfig::default(), small_config(10), 14).unwrap();
        let before = serde_json::to_string(&pop).unwrap();
        let report = pop.evolve(&mut constant_evaluator(1.0), 0).unwrap();
        assert!(report.records.is_empty());
        assert_eq!(serde_json::to_string(&pop).unwrap(), before);
    }

    #[test]
    fn constant_evaluator_reports_constant_best() {
        let mut pop = Population::new(2, 1, GenomeConfig::default(), small_config(20), 15).unwrap();
        let report = pop.evolve(&mut constant_evaluator(1.0), 5).unwrap();
        assert_eq!(report.records.len(), 5);
        for rec in &report.records {
            assert_eq!(rec.best_fitness, 1.0);
            assert_eq!(rec.best_ever_fitness, 1.0);
        }
        assert_eq!(pop.generation, 5);
        assert_eq!(pop.genomes.len(), 20);
    }

    #[test]
    fn non_finite_fitness_aborts_with_genome_id() {
        let mut pop = Population::new(2, 1, GenomeConfig::default(), small_config(5), 16).unwrap();
        let mut evil = |_g: u64, genomes: &BTreeMap<GenomeId, Genome>| {
            Ok(genomes
                .keys()
                .map(|&id| (id, if id == 3 { f64::NAN } else { 0.0 }))
                .collect())
        };
        match pop.evolve(&mut evil, 1) {
            Err(Error::NonFiniteFitness { genome }) => assert_eq!(genome, 3),
            other => panic!("expected NonFiniteFitness, got {other:?}"),
        }
    }

    #[test]
    fn best_fitness_is_monotone_with_deterministic_evaluator() {
        let mut pop = Population::new(3, 2, GenomeConfig::default(), small_config(40), 17).unwrap();
        let report = pop.evolve(&mut weight_sum_evaluator(), 15).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for rec in &report.records {
            assert!(
                rec.best_fitness >= prev - 1e-12,
                "best dropped from {prev} to {} at generation {}",
                rec.best_fitness,
                rec.generation
            );
            prev = rec.best_fitness;
        }
    }

    #[test]
    fn identical_seeds_give_identical_reports() {
        let run = |seed: u64| {
            let mut pop =
                Population::new(3, 1, GenomeConfig::default(), small_config(30), seed).unwrap();
            let report = pop.evolve(&mut weight_sum_evaluator(), 8).unwrap();
            serde_json::to_string(&report).unwrap()
        };
        assert_eq!(run(99), run(99));
        assert_ne!(run(99), run(100));
    }

    #[test]
    fn population_size_is_restored_every_generation() {
        let mut pop = Population::new(4, 2, GenomeConfig::default(), small_config(37), 18).unwrap();
        for _ in 0..6 {
            pop.evolve(&mut weight_sum_evaluator(), 1).unwrap();
            assert_eq!(pop.genomes.len(), 37);
        }
    }

    #[test]
    fn checkpoint_round_trip_resumes_identically() {
        let mut a = Population::new(3, 1, GenomeConfig::default(), small_config(25), 19).unwrap();
        a.evolve(&mut weight_sum_evaluator(), 4).unwrap();
        let snapshot = serde_json::to_string(&a).unwrap();
        let mut b: Population = serde_json::from_str(&snapshot).unwrap();
        let ra = a.evolve(&mut weight_sum_evaluator(), 4).unwrap();
        let rb = b.evolve(&mut weight_sum_evaluator(), 4).unwrap();
        assert_eq!(ra, rb);
    }
}
