// What does a generation-1 winner actually do? Not a test.

use std::collections::BTreeMap;
use swarmevo::genome::GenomeConfig;
use swarmevo::phenotype::FeedForwardNetwork;
use swarmevo::policy::NetworkPolicy;
use swarmevo::population::{Population, PopulationConfig};
use swarmevo::runner::{evaluate_generation, seed};
use swarmevo::sim::run_episode;
use swarmevo::tasks::{make_task, TaskName, TaskOverrides};

fn main() {
    let overrides = TaskOverrides {
        n_agents: Some(10),
        duration: Some(20.0),
        spawn_region: Some([5.0, 7.0, -4.0, 4.0]),
        ..TaskOverrides::default()
    };
    let task = make_task(TaskName::WallClimbNeighbor, &overrides);
    let cfg = PopulationConfig {
        pop_size: 50,
        ..PopulationConfig::default()
    };
    let pop = Population::new(
        task.num_inputs(),
        task.num_outputs(),
        GenomeConfig::default(),
        cfg,
        seed::population_seed(1),
    )
    .unwrap();
    let pool = rayon::ThreadPoolBuilder::new().build().unwrap();
    let fits = evaluate_generation(&pop.genomes, &task, 0, 1, &pool).unwrap();
    let (&best_id, &best_fit) = fits
        .iter()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let sorted: Vec<f64> = {
        let mut v: Vec<f64> = fits.values().copied().collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    };
    println!("gen-0 fitness distribution (top 10): {:?}", &sorted[..10]);
    println!("median: {}", sorted[25]);
    println!("best genome {best_id}: fitness {best_fit}");

    // Replay the winner and describe the swarm over time.
    let net = FeedForwardNetwork::compile(&pop.genomes[&best_id]).unwrap();
    let policy = NetworkPolicy::new(net);
    let result = run_episode(&task, &policy, seed::episode_seed(1, 0, best_id), 20).unwrap();
    let mut by_time: BTreeMap<i64, Vec<&swarmevo::sim::TrajectoryRow>> = Default::default();
    for r in &result.trajectory {
        by_time.entry((r.time * 1000.0) as i64).or_default().push(r);
    }
    for (tms, rows) in &by_time {
        let t = *tms as f64 / 1000.0;
        if (t % 2.0).abs() > 1e-9 {
            continue;
        }
        let crossed = rows.iter().filter(|r| r.x < 0.0).count();
        let max_alt = rows.iter().map(|r| r.altitude).fold(0.0, f64::max);
        let spread_y: f64 = {
            let ys: Vec<f64> = rows.iter().map(|r| r.y).collect();
            ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - ys.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        let mean_x: f64 = rows.iter().map(|r| r.x).sum::<f64>() / rows.len() as f64;
        println!(
            "t={t:>5.1} crossed={crossed:>2} max_alt={max_alt:>6.2} y_spread={spread_y:>5.2} mean_x={mean_x:>6.2}"
        );
    }
}
