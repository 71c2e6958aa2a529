//! Run orchestration: seeded parallel fitness evaluation, training with
//! checkpoint/resume, multi-trial policy comparison, replay and file
//! outputs.
//!
//! Everything here is deterministic given the run config: episode seeds are
//! derived from (global seed, generation, genome id), trial seeds from
//! (global seed, trial index), and results are keyed by id rather than by
//! completion order, so the parallelism degree never changes any output.

pub mod checkpoint;
pub mod csvio;
pub mod render;
pub mod seed;

use crate::error::{Error, Result};
use crate::genome::{Genome, GenomeConfig, GenomeId};
use crate::phenotype::FeedForwardNetwork;
use crate::policy::{NetworkPolicy, Policy};
use crate::population::{EvolutionReport, GenerationRecord, Population, PopulationConfig};
use crate::sim::run_episode;
use crate::stats::{self, WelchTest};
use crate::tasks::{designed_policy_for, make_task, EpisodeResult, TaskOverrides, TaskSpec};
use checkpoint::Checkpoint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Fitness assigned to a genome whose network fails to compile: finite so
/// species arithmetic stays well-defined, but worse than anything a real
/// episode can produce.
pub const COMPILE_FAILURE_FITNESS: f64 = -1e12;

const RUN_CONFIG_VERSION: u32 = 1;

/// NEAT parameter block of the run config.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct NeatConfig {
    pub genome: GenomeConfig,
    pub population: PopulationConfig,
}

/// Everything a training or comparison run needs, loadable from one TOML
/// file; command-line flags override individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub version: u32,
    pub task: String,
    pub seed: u64,
    pub generations: u64,
    /// Worker threads for episode evaluation; 0 uses all cores.
    pub parallelism: usize,
    /// Save a checkpoint every this many generations (0 = only at the end).
    pub checkpoint_interval: u64,
    pub out_dir: PathBuf,
    /// Trajectory decimation for replay output (1 = every tick).
    pub log_every: u64,
    /// Trials per policy in `compare`.
    pub trials: usize,
    pub task_overrides: TaskOverrides,
    pub neat: NeatConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: RUN_CONFIG_VERSION,
            task: "gtmab_area".into(),
            seed: 42,
            generations: 50,
            parallelism: 0,
            checkpoint_interval: 10,
            out_dir: PathBuf::from("runs/out"),
            log_every: 10,
            trials: 60,
            task_overrides: TaskOverrides::default(),
            neat: NeatConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(&std::fs::read_to_string(path)?)?;
        if cfg.version != RUN_CONFIG_VERSION {
            return Err(Error::UnsupportedVersion {
                kind: "run config",
                found: cfg.version,
                expected: RUN_CONFIG_VERSION,
            });
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config serializes")
    }

    pub fn task_spec(&self) -> Result<TaskSpec> {
        Ok(make_task(self.task.parse()?, &self.task_overrides))
    }
}

fn build_pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::Parse(format!("thread pool: {e}")))
}

/// Evaluate one generation: each genome is compiled once and scored by a
/// single episode seeded from (global seed, generation, genome id).
/// Episodes fan out over the pool; the resulting map is identical for any
/// parallelism degree. A genome that fails to compile is logged and scored
/// [`COMPILE_FAILURE_FITNESS`] instead of aborting the run.
pub fn evaluate_generation(
    genomes: &BTreeMap<GenomeId, Genome>,
    task: &TaskSpec,
    generation: u64,
    global_seed: u64,
    pool: &rayon::ThreadPool,
) -> Result<BTreeMap<GenomeId, f64>> {
    let jobs: Vec<(GenomeId, &Genome)> = genomes.iter().map(|(&id, g)| (id, g)).collect();
    let scored: Vec<(GenomeId, Result<f64>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(id, genome)| {
                let fitness = match FeedForwardNetwork::compile(genome) {
                    Ok(net) => {
                        let policy = NetworkPolicy::new(net);
                        run_episode(task, &policy, seed::episode_seed(global_seed, generation, id), 0)
                            .map(|r| r.fitness)
                    }
                    Err(e) => {
                        log::warn!("genome {id} failed to compile: {e}");
                        Ok(COMPILE_FAILURE_FITNESS)
                    }
                };
                (id, fitness)
            })
            .collect()
    });
    let mut out = BTreeMap::new();
    for (id, fitness) in scored {
        out.insert(id, fitness?);
    }
    Ok(out)
}

/// [`crate::population::GenerationEvaluator`] backed by a task and a
/// persistent worker pool.
pub struct TaskEvaluator {
    pub task: TaskSpec,
    pub global_seed: u64,
    pool: rayon::ThreadPool,
}

impl TaskEvaluator {
    pub fn new(task: TaskSpec, global_seed: u64, parallelism: usize) -> Result<TaskEvaluator> {
        Ok(TaskEvaluator {
            task,
            global_seed,
            pool: build_pool(parallelism)?,
        })
    }
}

impl crate::population::GenerationEvaluator for TaskEvaluator {
    fn evaluate(
        &mut self,
        generation: u64,
        genomes: &BTreeMap<GenomeId, Genome>,
    ) -> Result<BTreeMap<GenomeId, f64>> {
        evaluate_generation(genomes, &self.task, generation, self.global_seed, &self.pool)
    }
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub report: EvolutionReport,
    pub best_genome: Genome,
    pub csv_path: PathBuf,
    pub best_genome_path: PathBuf,
}

/// Train from scratch: initialize a population, evolve for the configured
/// number of generations, stream the per-generation CSV, checkpoint on the
/// configured interval and save the best genome of the final generation.
pub fn train(config: &RunConfig) -> Result<TrainOutcome> {
    std::fs::create_dir_all(&config.out_dir)?;
    std::fs::write(config.out_dir.join("run.toml"), config.to_toml())?;
    let task = config.task_spec()?;
    let population = Population::new(
        task.num_inputs(),
        task.num_outputs(),
        config.neat.genome.clone(),
        config.neat.population.clone(),
        seed::population_seed(config.seed),
    )?;
    run_training_loop(config, task, population, Vec::new())
}

/// Continue a run from the latest checkpoint in its output directory,
/// reproducing exactly what an uninterrupted run would have written.
pub fn resume(out_dir: &Path, generations_override: Option<u64>) -> Result<TrainOutcome> {
    let mut config = RunConfig::load(&out_dir.join("run.toml"))?;
    config.out_dir = out_dir.to_path_buf();
    if let Some(g) = generations_override {
        config.generations = g;
    }
    let task = config.task_spec()?;
    let ckpt = Checkpoint::latest_in(out_dir)?;
    run_training_loop(&config, task, ckpt.population, ckpt.records)
}

fn run_training_loop(
    config: &RunConfig,
    task: TaskSpec,
    mut population: Population,
    mut records: Vec<GenerationRecord>,
) -> Result<TrainOutcome> {
    let csv_path = config.out_dir.join("evolution.csv");
    // Rewrite the CSV from the records we trust; this also truncates rows
    // written after the checkpoint being resumed from.
    let mut csv_text = csvio::evolution_header();
    for rec in &records {
        csv_text.push_str(&csvio::evolution_row(rec));
    }
    std::fs::write(&csv_path, &csv_text)?;
    let mut csv = std::fs::OpenOptions::new().append(true).open(&csv_path)?;

    let mut evaluator = TaskEvaluator::new(task, config.seed, config.parallelism)?;
    let start = population.generation;
    for gen in start..config.generations {
        let chunk = population.evolve(&mut evaluator, 1)?;
        let rec = chunk.records.into_iter().next().expect("one generation per call");
        log::info!(
            "generation {:>4}: best {:.4} mean {:.4} species {}",
            rec.generation,
            rec.best_fitness,
            rec.mean_fitness,
            rec.species_count
        );
        csv.write_all(csvio::evolution_row(&rec).as_bytes())?;
        csv.flush()?;
        records.push(rec);

        let completed = gen + 1;
        let is_last = completed == config.generations;
        let on_interval =
            config.checkpoint_interval > 0 && completed % config.checkpoint_interval == 0;
        if on_interval || is_last {
            Checkpoint::new(completed, population.clone(), records.clone())
                .save(&config.out_dir)?;
        }
    }

    let best_genome = population
        .best_genome()
        .cloned()
        .ok_or_else(|| Error::Parse("training produced no evaluated generation".into()))?;
    let best_genome_path = config.out_dir.join("best_genome.json");
    best_genome.save(&best_genome_path)?;
    Ok(TrainOutcome {
        report: EvolutionReport { records },
        best_genome,
        csv_path,
        best_genome_path,
    })
}

/// Where a policy under test comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicySource {
    /// The task's hand-designed baseline.
    Designed,
    /// A saved genome record, compiled on load.
    GenomeFile(PathBuf),
}

impl FromStr for PolicySource {
    type Err = Error;

    fn from_str(s: &str) -> Result<PolicySource> {
        if s == "designed" {
            Ok(PolicySource::Designed)
        } else if s.ends_with(".json") {
            Ok(PolicySource::GenomeFile(PathBuf::from(s)))
        } else {
            Err(Error::UnknownPolicy(s.to_string()))
        }
    }
}

impl PolicySource {
    pub fn label(&self) -> String {
        match self {
            PolicySource::Designed => "designed".into(),
            PolicySource::GenomeFile(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string()),
        }
    }

    pub fn build(&self, task: &TaskSpec) -> Result<Box<dyn Policy>> {
        let policy: Box<dyn Policy> = match self {
            PolicySource::Designed => designed_policy_for(task),
            PolicySource::GenomeFile(path) => {
                let genome = Genome::load(path)?;
                Box::new(NetworkPolicy::new(FeedForwardNetwork::compile(&genome)?))
            }
        };
        policy.validate(task)?;
        Ok(policy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub label: String,
    pub fitnesses: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n − 1).
    pub stdev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub a: String,
    pub b: String,
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

/// Multi-trial comparison with Welch's test between every policy pair.
/// Trial seeds are shared across policies, pairing their spawn layouts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub task: String,
    pub trials: usize,
    pub policies: Vec<PolicySummary>,
    pub tests: Vec<PairwiseTest>,
}

impl ComparisonReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "task {} — {} trials per policy\n",
            self.task, self.trials
        ));
        for p in &self.policies {
            out.push_str(&format!(
                "  {:<24} mean {:>8.3}  stdev {:>7.3}\n",
                p.label, p.mean, p.stdev
            ));
        }
        for t in &self.tests {
            out.push_str(&format!(
                "  {} vs {}: t = {:.4}, df = {:.1}, p = {:.4}\n",
                t.a, t.b, t.t, t.df, t.p
            ));
        }
        out
    }
}

/// Run each policy for `trials` paired episodes and compare them.
pub fn compare(
    task: &TaskSpec,
    sources: &[PolicySource],
    trials: usize,
    global_seed: u64,
    parallelism: usize,
) -> Result<ComparisonReport> {
    assert!(trials >= 2, "compare needs at least 2 trials");
    let pool = build_pool(parallelism)?;
    let seeds: Vec<u64> = (0..trials as u64).map(|i| seed::trial_seed(global_seed, i)).collect();

    let mut policies = Vec::new();
    for source in sources {
        let fitnesses: Vec<f64> = {
            let policy = source.build(task)?;
            pool.install(|| {
                seeds
                    .par_iter()
                    .map(|&s| run_episode(task, policy.as_ref(), s, 0).map(|r| r.fitness))
                    .collect::<Result<Vec<f64>>>()
            })?
        };
        policies.push(PolicySummary {
            label: source.label(),
            mean: stats::mean(&fitnesses),
            stdev: stats::sample_std(&fitnesses),
            fitnesses,
        });
    }

    let mut tests = Vec::new();
    for i in 0..policies.len() {
        for j in (i + 1)..policies.len() {
            let WelchTest { t, df, p } =
                stats::welch_from_samples(&policies[i].fitnesses, &policies[j].fitnesses);
            tests.push(PairwiseTest {
                a: policies[i].label.clone(),
                b: policies[j].label.clone(),
                t,
                df,
                p,
            });
        }
    }
    Ok(ComparisonReport {
        task: task.name.to_string(),
        trials,
        policies,
        tests,
    })
}

/// Single fully logged episode; writes the trajectory table when a path is
/// given.
pub fn replay(
    task: &TaskSpec,
    source: &PolicySource,
    episode_seed: u64,
    log_every: u64,
    trajectory_out: Option<&Path>,
) -> Result<EpisodeResult> {
    let policy = source.build(task)?;
    let result = run_episode(task, policy.as_ref(), episode_seed, log_every.max(1))?;
    if let Some(path) = trajectory_out {
        csvio::write_trajectory(path, &task.arena, &result.trajectory)?;
    }
    Ok(result)
}
