// Parameter sweep for the wall-climb baseline. Not a test.

use swarmevo::runner::{compare, PolicySource};
use swarmevo::tasks::{make_task, TaskName, TaskOverrides};

fn run(label: &str, ov: TaskOverrides, trials: usize) {
    let task = make_task(TaskName::WallClimbNeighbor, &ov);
    let report = compare(&task, &[PolicySource::Designed], trials, 2024, 0).unwrap();
    let p = &report.policies[0];
    let crossed = p.fitnesses.iter().filter(|&&f| f > 0.0).count();
    println!(
        "{label:<44} mean {:>7.3} stdev {:>6.3} trials>0: {crossed}/{trials}",
        p.mean, p.stdev
    );
}

fn main() {
    let base = TaskOverrides {
        n_agents: Some(10),
        spawn_region: Some([1.0, 4.0, -4.0, 4.0]),
        ..TaskOverrides::default()
    };
    run("baseline (th=5, r=0.4, beta=0.3)", base, 20);

    for theta in [10.0, 15.0] {
        let ov = TaskOverrides {
            ultrasound_half_angle_deg: Some(theta),
            ..base
        };
        run(&format!("theta={theta}"), ov, 20);
    }
    for radius in [0.5, 0.6] {
        let ov = TaskOverrides {
            blimp_body_radius: Some(radius),
            ..base
        };
        run(&format!("radius={radius}"), ov, 20);
    }
    for beta in [0.4, 0.5, 0.6] {
        let ov = TaskOverrides {
            wall_bias_gain: Some(beta),
            ..base
        };
        run(&format!("beta={beta}"), ov, 20);
    }
    let combo = TaskOverrides {
        ultrasound_half_angle_deg: Some(10.0),
        blimp_body_radius: Some(0.5),
        wall_bias_gain: Some(0.5),
        ..base
    };
    run("combo theta=10 r=0.5 beta=0.5", combo, 20);
    // Full-scale sanity: 20 agents from the default spawn.
    let full = TaskOverrides {
        ultrasound_half_angle_deg: Some(10.0),
        blimp_body_radius: Some(0.5),
        wall_bias_gain: Some(0.5),
        ..TaskOverrides::default()
    };
    run("full-scale 20 agents combo", full, 20);
}
