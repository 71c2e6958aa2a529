// Combination sweep with multiple global seeds. Not a test.

use swarmevo::runner::{compare, PolicySource};
use swarmevo::tasks::{make_task, TaskName, TaskOverrides};

fn run(label: &str, ov: TaskOverrides) {
    let task = make_task(TaskName::WallClimbNeighbor, &ov);
    let mut means = Vec::new();
    for seed in [1u64, 777, 424242] {
        let report = compare(&task, &[PolicySource::Designed], 20, seed, 0).unwrap();
        means.push(report.policies[0].mean);
    }
    println!(
        "{label:<58} means {:?}",
        means.iter().map(|m| (m * 100.0).round() / 100.0).collect::<Vec<_>>()
    );
}

fn main() {
    for radius in [0.5, 0.6, 0.7] {
        for beta in [0.3, 0.4] {
            for theta in [5.0, 10.0] {
                let ov = TaskOverrides {
                    n_agents: Some(10),
                    spawn_region: Some([1.0, 4.0, -4.0, 4.0]),
                    min_sep: Some(radius + 0.1),
                    blimp_body_radius: Some(radius),
                    wall_bias_gain: Some(beta),
                    ultrasound_half_angle_deg: Some(theta),
                    ..TaskOverrides::default()
                };
                run(&format!("r={radius} beta={beta} theta={theta}"), ov);
            }
        }
    }
}
