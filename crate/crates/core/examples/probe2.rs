// Episode-level diagnostics for the wall-climb baseline. Not a test.

use swarmevo::runner::{replay, seed, PolicySource};
use swarmevo::tasks::{make_task, TaskName, TaskOverrides};

fn main() {
    let overrides = TaskOverrides {
        n_agents: Some(10),
        ..TaskOverrides::default()
    };
    let task = make_task(TaskName::WallClimbNeighbor, &overrides);
    let result = replay(
        &task,
        &PolicySource::Designed,
        seed::trial_seed(2024, 0),
        20,
        None,
    )
    .unwrap();
    println!("fitness {}", result.fitness);
    // Group trajectory rows by time and summarize.
    let mut by_time: std::collections::BTreeMap<i64, Vec<&swarmevo::sim::TrajectoryRow>> =
        Default::default();
    for r in &result.trajectory {
        by_time.entry((r.time * 1000.0) as i64).or_default().push(r);
    }
    for (tms, rows) in by_time.iter().step_by(5) {
        let max_alt = rows.iter().map(|r| r.altitude).fold(0.0, f64::max);
        let min_x = rows.iter().map(|r| r.x).fold(f64::INFINITY, f64::min);
        // Closest pair distance.
        let mut min_pair = f64::INFINITY;
        let mut close_pairs = 0;
        for i in 0..rows.len() {
            for j in (i + 1)..rows.len() {
                let dx = rows[i].x - rows[j].x;
                let dy = rows[i].y - rows[j].y;
                let d = (dx * dx + dy * dy).sqrt();
                min_pair = min_pair.min(d);
                if d < 0.4 {
                    close_pairs += 1;
                }
            }
        }
        println!(
            "t={:>6.2} max_alt={:>6.3} min_x={:>7.3} min_pair={:>7.3} pairs<0.4: {}",
            *tms as f64 / 1000.0,
            max_alt,
            min_x,
            min_pair,
            close_pairs
        );
    }
}
