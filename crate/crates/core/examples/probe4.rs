// Per-agent dump of one failing wall-climb trial. Not a test.

use swarmevo::runner::{replay, seed, PolicySource};
use swarmevo::tasks::{make_task, TaskName, TaskOverrides};

fn main() {
    let trial: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let ov = TaskOverrides {
        n_agents: Some(10),
        spawn_region: Some([1.0, 4.0, -4.0, 4.0]),
        ..TaskOverrides::default()
    };
    let task = make_task(TaskName::WallClimbNeighbor, &ov);
    let result = replay(
        &task,
        &PolicySource::Designed,
        seed::trial_seed(2024, trial),
        40, // every 2 s
        None,
    )
    .unwrap();
    println!("trial {trial} fitness {}", result.fitness);
    let mut by_time: std::collections::BTreeMap<i64, Vec<&swarmevo::sim::TrajectoryRow>> =
        Default::default();
    for r in &result.trajectory {
        by_time.entry((r.time * 1000.0) as i64).or_default().push(r);
    }
    for (tms, rows) in &by_time {
        let t = *tms as f64 / 1000.0;
        if (t % 4.0).abs() > 1e-9 {
            continue;
        }
        let crossed = rows.iter().filter(|r| r.x < 0.0).count();
        let max_alt = rows.iter().map(|r| r.altitude).fold(0.0, f64::max);
        let min_x = rows.iter().map(|r| r.x).fold(f64::INFINITY, f64::min);
        let mean_x: f64 = rows.iter().map(|r| r.x).sum::<f64>() / rows.len() as f64;
        println!(
            "t={t:>5.1} crossed={crossed:>2} max_alt={max_alt:>6.2} min_x={min_x:>6.2} mean_x={mean_x:>6.2}"
        );
    }
}
