// Scratch probe for acceptance-scale behavior. Not part of the test suite.

use std::collections::BTreeMap;
use swarmevo::genome::{Genome, GenomeConfig, GenomeId};
use swarmevo::phenotype::FeedForwardNetwork;
use swarmevo::population::{Population, PopulationConfig};
use swarmevo::runner::{compare, seed, PolicySource, TaskEvaluator};
use swarmevo::tasks::{make_task, TaskName, TaskOverrides};

fn xor_fitness(genome: &Genome) -> f64 {
    let net = FeedForwardNetwork::compile(genome).unwrap();
    let cases = [
        ([0.0, 0.0], 0.0),
        ([0.0, 1.0], 1.0),
        ([1.0, 0.0], 1.0),
        ([1.0, 1.0], 0.0),
    ];
    let mut fitness = 4.0;
    for (input, expect) in cases {
        let out = net.activate(&input).unwrap()[0];
        fitness -= (out - expect) * (out - expect);
    }
    fitness
}

fn probe_xor() {
    println!("== XOR ==");
    for seed_value in [11u64, 22, 33, 44, 55] {
        let cfg = PopulationConfig {
            pop_size: 150,
            ..PopulationConfig::default()
        };
        let mut pop = Population::new(2, 1, GenomeConfig::default(), cfg, seed_value).unwrap();
        let mut eval = |_g: u64, genomes: &BTreeMap<GenomeId, Genome>| {
            Ok(genomes.iter().map(|(&id, g)| (id, xor_fitness(g))).collect())
        };
        let mut solved_at = None;
        for gen in 0..300u64 {
            let rep = pop.evolve(&mut eval, 1).unwrap();
            let best = rep.records[0].best_fitness;
            if best >= 3.9 {
                solved_at = Some((gen, best));
                break;
            }
        }
        println!("  seed {seed_value}: {:?}", solved_at);
    }
}

fn desk_overrides() -> TaskOverrides {
    // Half the agents with the same per-agent spawn density, nearer the wall.
    TaskOverrides {
        n_agents: Some(10),
        spawn_region: Some([1.0, 4.0, -4.0, 4.0]),
        ..TaskOverrides::default()
    }
}

fn probe_designed_wall() {
    println!("== designed wall climb, 10 agents (scaled spawn), 20 trials ==");
    let task = make_task(TaskName::WallClimbNeighbor, &desk_overrides());
    let report = compare(&task, &[PolicySource::Designed], 20, 2024, 0).unwrap();
    let p = &report.policies[0];
    println!("  mean {:.3} stdev {:.3} min {:?}", p.mean, p.stdev,
        p.fitnesses.iter().cloned().fold(f64::INFINITY, f64::min));
    println!("  fitnesses: {:?}", p.fitnesses);

    let task = make_task(TaskName::WallClimbDistance, &desk_overrides());
    let report = compare(&task, &[PolicySource::Designed], 20, 2024, 0).unwrap();
    let p = &report.policies[0];
    println!("  distance-mode mean {:.3} stdev {:.3}", p.mean, p.stdev);
}

fn probe_designed_anki() {
    println!("== designed anki area, 20 trials ==");
    let task = make_task(TaskName::AnkiArea, &TaskOverrides::default());
    let report = compare(&task, &[PolicySource::Designed], 20, 7, 0).unwrap();
    let p = &report.policies[0];
    println!("  mean {:.3} stdev {:.3} (target >= 1.648, max {:.3})",
        p.mean, p.stdev, (9.0f64).ln());
    println!("  fitnesses: {:?}", p.fitnesses);

    let task = make_task(TaskName::GtmabArea, &TaskOverrides::default());
    let report = compare(&task, &[PolicySource::Designed], 20, 7, 0).unwrap();
    let p = &report.policies[0];
    println!("  gtmab designed mean {:.3} stdev {:.3} (max {:.3})", p.mean, p.stdev, (16.0f64).ln());
}

fn probe_desk_evolution() {
    println!("== desk evolution: wall_climb_neighbor, 10 agents, pop 50, 25 gens ==");
    for s in [4u64, 5, 6, 7, 8, 9] {
        let overrides = TaskOverrides {
            n_agents: Some(10),
            duration: Some(14.0),
            spawn_region: Some([5.0, 7.0, -4.0, 4.0]),
            ..TaskOverrides::default()
        };
        let task = make_task(TaskName::WallClimbNeighbor, &overrides);
        let cfg = PopulationConfig {
            pop_size: 50,
            ..PopulationConfig::default()
        };
        let mut pop = Population::new(
            task.num_inputs(),
            task.num_outputs(),
            GenomeConfig::default(),
            cfg,
            seed::population_seed(s),
        )
        .unwrap();
        let mut eval = TaskEvaluator::new(task, s, 0).unwrap();
        let report = pop.evolve(&mut eval, 25).unwrap();
        let first = &report.records[0];
        let last = &report.records[24];
        println!(
            "  seed {s}: gen1 best {:.3} -> gen25 best {:.3} (mean {:.3})",
            first.best_fitness, last.best_fitness, last.mean_fitness
        );
    }
}

fn main() {
    let t0 = std::time::Instant::now();
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    if which == "all" || which == "xor" {
        probe_xor();
    }
    if which == "all" || which == "wall" {
        probe_designed_wall();
    }
    if which == "all" || which == "anki" {
        probe_designed_anki();
    }
    if which == "all" || which == "evo" {
        probe_desk_evolution();
    }
    println!("elapsed: {:.1?}", t0.elapsed());
}
