//! Task definitions, fitness functions and designed baseline policies.
//!
//! Two task families are built in. Area coverage rewards the swarm for
//! spreading out, measured as the entropy of the agent distribution over a
//! grid division of the arena. Wall climb counts the agents that end the
//! episode past an interior wall taller than a lone agent's hover height,
//! with a distance-to-wall penalty while nobody has crossed.

use crate::error::{Error, Result};
use crate::policy::Policy;
use crate::sensing::{region_center, Frame, Observation, SenseMode, SenseSpec};
use crate::sim::{
    ActuationMode, AgentState, ArenaSpec, BlimpParams, Command, DriveParams, InteriorWall, Rect,
    TrajectoryRow, WorldState,
};
use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskName {
    GtmabArea,
    AnkiArea,
    WallClimbDistance,
    WallClimbNeighbor,
}

impl TaskName {
    pub const ALL: [TaskName; 4] = [
        TaskName::GtmabArea,
        TaskName::AnkiArea,
        TaskName::WallClimbDistance,
        TaskName::WallClimbNeighbor,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TaskName::GtmabArea => "gtmab_area",
            TaskName::AnkiArea => "anki_area",
            TaskName::WallClimbDistance => "wall_climb_distance",
            TaskName::WallClimbNeighbor => "wall_climb_neighbor",
        }
    }
}

impl FromStr for TaskName {
    type Err = Error;

    fn from_str(s: &str) -> Result<TaskName> {
        TaskName::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTask(s.to_string()))
    }
}

impl std::fmt::Display for TaskName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitnessSpec {
    /// Deployment entropy over a grid × grid division of the arena,
    /// evaluated on the final world state.
    CoverageEntropy { grid: usize },
    /// Count of agents past the wall plane at episode end; if none crossed,
    /// minus the closest agent's distance to the wall.
    WallClimb { wall_x: f64 },
}

/// Gains for the hand-designed baseline policies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignedGains {
    /// Wall-attraction mixing weight β in the wall-climb baseline.
    pub wall_bias_gain: f64,
    /// Wall-repulsion weight in the area-coverage baseline.
    pub wall_repulsion_weight: f64,
}

impl Default for DesignedGains {
    fn default() -> Self {
        DesignedGains {
            wall_bias_gain: 0.3,
            wall_repulsion_weight: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub name: TaskName,
    pub arena: ArenaSpec,
    pub n_agents: usize,
    pub mode: ActuationMode,
    pub sense: SenseSpec,
    pub spawn_region: Rect,
    pub min_sep: f64,
    /// Episode length, seconds.
    pub duration: f64,
    /// Control/simulation timestep, seconds.
    pub dt: f64,
    pub fitness: FitnessSpec,
    pub designed: DesignedGains,
}

impl TaskSpec {
    pub fn num_inputs(&self) -> usize {
        self.sense.observation_len()
    }

    pub fn num_outputs(&self) -> usize {
        2
    }

    pub fn check_arity(&self, inputs: usize, outputs: usize) -> Result<()> {
        if inputs != self.num_inputs() {
            return Err(Error::ArityMismatch {
                expected: self.num_inputs(),
                got: inputs,
                context: format!("network inputs for task {}", self.name),
            });
        }
        if outputs != self.num_outputs() {
            return Err(Error::ArityMismatch {
                expected: self.num_outputs(),
                got: outputs,
                context: format!("network outputs for task {}", self.name),
            });
        }
        Ok(())
    }

    pub fn evaluate_fitness(&self, world: &WorldState) -> f64 {
        match self.fitness {
            FitnessSpec::CoverageEntropy { grid } => {
                let positions: Vec<Vec2> = world.agents.iter().map(|a| a.position).collect();
                let bounds = Rect {
                    x_min: self.arena.x_min,
                    x_max: self.arena.x_max,
                    y_min: self.arena.y_min,
                    y_max: self.arena.y_max,
                };
                deployment_entropy(&positions, &bounds, grid)
            }
            FitnessSpec::WallClimb { wall_x } => wall_climb_fitness(world, wall_x),
        }
    }
}

/// Per-episode outcome: the scalar fitness and what the run looked like.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub fitness: f64,
    pub final_world: WorldState,
    pub trajectory: Vec<TrajectoryRow>,
}

/// Shannon entropy (natural log) of the agent distribution over a
/// grid × grid division of `bounds`. Cell assignment is lower-edge
/// inclusive; positions on the top edges fall into the last cell.
pub fn deployment_entropy(positions: &[Vec2], bounds: &Rect, grid: usize) -> f64 {
    assert!(grid >= 1, "entropy grid must have at least one cell");
    if positions.is_empty() {
        return 0.0;
    }
    let mut counts = vec![0usize; grid * grid];
    let w = bounds.x_max - bounds.x_min;
    let h = bounds.y_max - bounds.y_min;
    for p in positions {
        let cx = (((p.x - bounds.x_min) / w * grid as f64).floor() as usize).min(grid - 1);
        let cy = (((p.y - bounds.y_min) / h * grid as f64).floor() as usize).min(grid - 1);
        counts[cy * grid + cx] += 1;
    }
    let n = positions.len() as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Wall-climb fitness: the number of agents past the wall plane, or, when
/// none crossed, minus the closest agent's horizontal distance to it.
pub fn wall_climb_fitness(world: &WorldState, wall_x: f64) -> f64 {
    let crossed = world
        .agents
        .iter()
        .filter(|a| a.position.x < wall_x)
        .count();
    if crossed > 0 {
        crossed as f64
    } else {
        let nearest = world
            .agents
            .iter()
            .map(|a| (a.position.x - wall_x).abs())
            .fold(f64::INFINITY, f64::min);
        -nearest
    }
}

/// Repulsion direction for the area-coverage baseline: the negated sum of
/// per-region values times the region's center direction, with wall values
/// (when sensed) folded in at `wall_weight`.
pub fn designed_area_direction(
    ktant: &[f64],
    walls: Option<&[f64]>,
    wall_weight: f64,
) -> Vec2 {
    let k = ktant.len();
    let mut dir = Vec2::ZERO;
    for (i, &v) in ktant.iter().enumerate() {
        dir -= Vec2::from_bearing(region_center(i, k)) * v;
    }
    if let Some(walls) = walls {
        for (i, &v) in walls.iter().enumerate() {
            dir -= Vec2::from_bearing(region_center(i, k)) * (v * wall_weight);
        }
    }
    dir
}

/// Attraction direction for the wall-climb baseline: the unit vector toward
/// the region with the highest k-tant value (ties to the lowest index),
/// mixed with β times the wall direction; pure wall direction when every
/// region is empty.
pub fn designed_wall_direction(ktant: &[f64], wall_bias: Vec2, beta: f64) -> Vec2 {
    let occupied = ktant.iter().any(|&v| v > 0.0);
    if !occupied {
        return wall_bias.normalized_or_zero();
    }
    let k = ktant.len();
    let best = (0..k)
        .max_by(|&i, &j| {
            ktant[i]
                .partial_cmp(&ktant[j])
                .unwrap()
                .then(j.cmp(&i))
        })
        .expect("k >= 1");
    let attraction = Vec2::from_bearing(region_center(best, k));
    (attraction + wall_bias.normalized_or_zero() * beta).normalized_or_zero()
}

/// Convert a desired motion direction (in the sensing frame) to a command:
/// full speed along the direction for blimps, a proportional turn-and-go
/// rule for differential drive. A zero direction is a zero command.
fn direction_to_command(dir: Vec2, mode: &ActuationMode) -> Command {
    let unit = dir.normalized_or_zero();
    match mode {
        ActuationMode::Blimp(p) => Command::Velocity {
            vx: unit.x * p.v_max,
            vy: unit.y * p.v_max,
        },
        ActuationMode::Drive(p) => {
            if unit == Vec2::ZERO {
                return Command::Wheels { left: 0.0, right: 0.0 };
            }
            // Body-frame direction angle in (-π, π].
            let mut phi = unit.y.atan2(unit.x);
            if phi <= -std::f64::consts::PI {
                phi += std::f64::consts::TAU;
            }
            let forward = phi.cos();
            let turn = phi * std::f64::consts::FRAC_2_PI;
            Command::Wheels {
                left: (forward - turn).clamp(-1.0, 1.0) * p.wheel_max,
                right: (forward + turn).clamp(-1.0, 1.0) * p.wheel_max,
            }
        }
    }
}

/// Baseline for area coverage: move away from the closest neighbors (and
/// away from sensed walls).
pub struct DesignedAreaPolicy;

impl Policy for DesignedAreaPolicy {
    fn command(&self, obs: &Observation, _agent: &AgentState, task: &TaskSpec) -> Command {
        let dir = designed_area_direction(
            obs.ktant(&task.sense),
            obs.walls(&task.sense),
            task.designed.wall_repulsion_weight,
        );
        direction_to_command(dir, &task.mode)
    }
}

/// Baseline for wall climb: move toward the closest neighbor (distance
/// sensing) or the most populous direction (neighbor sensing), plus
/// slightly in the wall's direction. The bias is the fixed direction from
/// the spawn side toward the wall plane, so agents that make it over keep
/// going instead of treating the plane itself as the goal.
pub struct DesignedWallPolicy;

fn wall_direction(task: &TaskSpec) -> Vec2 {
    let wall_x = match task.fitness {
        FitnessSpec::WallClimb { wall_x } => wall_x,
        _ => unreachable!("validated against the task"),
    };
    let spawn_center = (task.spawn_region.x_min + task.spawn_region.x_max) / 2.0;
    if spawn_center >= wall_x {
        Vec2::new(-1.0, 0.0)
    } else {
        Vec2::new(1.0, 0.0)
    }
}

impl Policy for DesignedWallPolicy {
    fn validate(&self, task: &TaskSpec) -> Result<()> {
        match task.fitness {
            FitnessSpec::WallClimb { .. } => Ok(()),
            _ => Err(Error::UnknownPolicy(format!(
                "designed wall policy on task {}",
                task.name
            ))),
        }
    }

    fn command(&self, obs: &Observation, _agent: &AgentState, task: &TaskSpec) -> Command {
        let dir = designed_wall_direction(
            obs.ktant(&task.sense),
            wall_direction(task),
            task.designed.wall_bias_gain,
        );
        direction_to_command(dir, &task.mode)
    }
}

/// Pick the paper-configured designed baseline for a task.
pub fn designed_policy_for(task: &TaskSpec) -> Box<dyn Policy> {
    match task.fitness {
        FitnessSpec::CoverageEntropy { .. } => Box::new(DesignedAreaPolicy),
        FitnessSpec::WallClimb { .. } => Box::new(DesignedWallPolicy),
    }
}

/// Optional numeric overrides applied on top of a named task's defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskOverrides {
    pub n_agents: Option<usize>,
    pub duration: Option<f64>,
    pub dt: Option<f64>,
    /// [x_min, x_max, y_min, y_max]
    pub arena: Option<[f64; 4]>,
    /// [x_min, x_max, y_min, y_max]
    pub spawn_region: Option<[f64; 4]>,
    pub sense_range: Option<f64>,
    pub min_sep: Option<f64>,
    pub entropy_grid: Option<usize>,
    pub wall_height: Option<f64>,
    pub v_max: Option<f64>,
    pub altitude_setpoint: Option<f64>,
    pub body_height: Option<f64>,
    pub blimp_body_radius: Option<f64>,
    pub tau_alt: Option<f64>,
    pub ultrasound_half_angle_deg: Option<f64>,
    pub wheel_max: Option<f64>,
    pub wheelbase: Option<f64>,
    pub drive_body_radius: Option<f64>,
    pub wall_bias_gain: Option<f64>,
    pub wall_repulsion_weight: Option<f64>,
}

/// Build one of the four named task configurations.
pub fn make_task(name: TaskName, overrides: &TaskOverrides) -> TaskSpec {
    let mut task = match name {
        TaskName::GtmabArea => TaskSpec {
            name,
            arena: ArenaSpec {
                x_min: -8.0,
                x_max: 8.0,
                y_min: -8.0,
                y_max: 8.0,
                wall: None,
            },
            n_agents: 20,
            mode: ActuationMode::Blimp(BlimpParams::default()),
            sense: SenseSpec {
                k: 8,
                mode: SenseMode::Distance,
                range: 8.0,
                frame: Frame::World,
                include_walls: true,
                include_proximity: false,
                proximity_range: 8.0,
            },
            spawn_region: Rect {
                x_min: -2.0,
                x_max: 2.0,
                y_min: -2.0,
                y_max: 2.0,
            },
            min_sep: 0.5,
            duration: 60.0,
            dt: 0.05,
            fitness: FitnessSpec::CoverageEntropy { grid: 4 },
            designed: DesignedGains::default(),
        },
        TaskName::AnkiArea => TaskSpec {
            name,
            arena: ArenaSpec {
                x_min: -1.5,
                x_max: 1.5,
                y_min: -1.5,
                y_max: 1.5,
                wall: None,
            },
            n_agents: 10,
            mode: ActuationMode::Drive(DriveParams::default()),
            sense: SenseSpec {
                k: 8,
                mode: SenseMode::Distance,
                range: 1.5,
                frame: Frame::Body,
                include_walls: false,
                include_proximity: true,
                proximity_range: 1.5,
            },
            spawn_region: Rect {
                x_min: -0.5,
                x_max: 0.5,
                y_min: -0.5,
                y_max: 0.5,
            },
            min_sep: 0.15,
            duration: 60.0,
            dt: 0.05,
            fitness: FitnessSpec::CoverageEntropy { grid: 3 },
            designed: DesignedGains::default(),
        },
        TaskName::WallClimbDistance | TaskName::WallClimbNeighbor => TaskSpec {
            name,
            arena: ArenaSpec {
                x_min: -8.0,
                x_max: 8.0,
                y_min: -5.0,
                y_max: 5.0,
                wall: Some(InteriorWall {
                    x: 0.0,
                    height: 3.0,
                    thickness: 0.1,
                }),
            },
            n_agents: 20,
            mode: ActuationMode::Blimp(BlimpParams::default()),
            sense: SenseSpec {
                k: 8,
                mode: if name == TaskName::WallClimbDistance {
                    SenseMode::Distance
                } else {
                    SenseMode::Neighbor
                },
                range: 8.0,
                frame: Frame::World,
                include_walls: false,
                include_proximity: false,
                proximity_range: 8.0,
            },
            spawn_region: Rect {
                x_min: 1.0,
                x_max: 7.0,
                y_min: -4.0,
                y_max: 4.0,
            },
            min_sep: 0.5,
            duration: 60.0,
            dt: 0.05,
            fitness: FitnessSpec::WallClimb { wall_x: 0.0 },
            designed: DesignedGains::default(),
        },
    };
    apply_overrides(&mut task, overrides);
    task
}

fn apply_overrides(task: &mut TaskSpec, ov: &TaskOverrides) {
    if let Some(n) = ov.n_agents {
        task.n_agents = n;
    }
    if let Some(d) = ov.duration {
        task.duration = d;
    }
    if let Some(dt) = ov.dt {
        task.dt = dt;
    }
    if let Some([x0, x1, y0, y1]) = ov.arena {
        task.arena.x_min = x0;
        task.arena.x_max = x1;
        task.arena.y_min = y0;
        task.arena.y_max = y1;
    }
    if let Some([x0, x1, y0, y1]) = ov.spawn_region {
        task.spawn_region = Rect {
            x_min: x0,
            x_max: x1,
            y_min: y0,
            y_max: y1,
        };
    }
    if let Some(r) = ov.sense_range {
        task.sense.range = r;
        task.sense.proximity_range = r;
    }
    if let Some(s) = ov.min_sep {
        task.min_sep = s;
    }
    if let Some(g) = ov.entropy_grid {
        if let FitnessSpec::CoverageEntropy { grid } = &mut task.fitness {
            *grid = g;
        }
    }
    if let Some(h) = ov.wall_height {
        if let Some(wall) = &mut task.arena.wall {
            wall.height = h;
        }
    }
    if let ActuationMode::Blimp(p) = &mut task.mode {
        if let Some(v) = ov.v_max {
            p.v_max = v;
        }
        if let Some(v) = ov.altitude_setpoint {
            p.altitude_setpoint = v;
        }
        if let Some(v) = ov.body_height {
            p.body_height = v;
        }
        if let Some(v) = ov.blimp_body_radius {
            p.body_radius = v;
        }
        if let Some(v) = ov.tau_alt {
            p.tau_alt = v;
        }
        if let Some(v) = ov.ultrasound_half_angle_deg {
            p.ultrasound_half_angle_deg = v;
        }
    }
    if let ActuationMode::Drive(p) = &mut task.mode {
        if let Some(v) = ov.wheel_max {
            p.wheel_max = v;
        }
        if let Some(v) = ov.wheelbase {
            p.wheelbase = v;
        }
        if let Some(v) = ov.drive_body_radius {
            p.body_radius = v;
        }
    }
    if let Some(v) = ov.wall_bias_gain {
        task.designed.wall_bias_gain = v;
    }
    if let Some(v) = ov.wall_repulsion_weight {
        task.designed.wall_repulsion_weight = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_bounds(side: f64) -> Rect {
        Rect {
            x_min: 0.0,
            x_max: side,
            y_min: 0.0,
            y_max: side,
        }
    }

    /// Independent entropy oracle: histogram by nested loops, then
    /// Σ −p·ln(p) evaluated directly.
    fn entropy_oracle(positions: &[Vec2], bounds: &Rect, grid: usize) -> f64 {
        let n = positions.len() as f64;
        let mut h = 0.0;
        for cy in 0..grid {
            for cx in 0..grid {
                let x0 = bounds.x_min + (bounds.x_max - bounds.x_min) * cx as f64 / grid as f64;
                let x1 = bounds.x_min + (bounds.x_max - bounds.x_min) * (cx + 1) as f64 / grid as f64;
                let y0 = bounds.y_min + (bounds.y_max - bounds.y_min) * cy as f64 / grid as f64;
                let y1 = bounds.y_min + (bounds.y_max - bounds.y_min) * (cy + 1) as f64 / grid as f64;
                let last_x = cx == grid - 1;
                let last_y = cy == grid - 1;
                let count = positions
                    .iter()
                    .filter(|p| {
                        p.x >= x0
                            && (p.x < x1 || (last_x && p.x <= x1))
                            && p.y >= y0
                            && (p.y < y1 || (last_y && p.y <= y1))
                    })
                    .count();
                if count > 0 {
                    let p = count as f64 / n;
                    h -= p * p.ln();
                }
            }
        }
        h
    }

    /// A layout with `ones` cells holding one agent and `twos` cells holding
    /// two, on a grid × grid division of the unit-side arena.
    fn layout(grid: usize, ones: usize, twos: usize, side: f64) -> Vec<Vec2> {
        let cell = side / grid as f64;
        let mut cells = (0..grid * grid).map(|i| {
            let cx = (i % grid) as f64;
            let cy = (i / grid) as f64;
            Vec2::new((cx + 0.5) * cell, (cy + 0.5) * cell)
        });
        let mut positions = Vec::new();
        for _ in 0..ones {
            positions.push(cells.next().expect("enough cells"));
        }
        for _ in 0..twos {
            let c = cells.next().expect("enough cells");
            positions.push(c);
            positions.push(c + Vec2::new(cell * 0.1, 0.0));
        }
        positions
    }

    #[test]
    fn entropy_of_a_single_occupied_cell_is_zero() {
        let bounds = unit_bounds(16.0);
        let positions = vec![Vec2::new(1.0, 1.0); 20];
        assert_eq!(deployment_entropy(&positions, &bounds, 4), 0.0);
    }

    #[test]
    fn entropy_matches_the_published_maxima() {
        // 20 agents on 16 cells: 12 singles + 4 doubles.
        let bounds = unit_bounds(16.0);
        let positions = layout(4, 12, 4, 16.0);
        assert_eq!(positions.len(), 20);
        let h = deployment_entropy(&positions, &bounds, 4);
        assert_relative_eq!(h, 0.6 * 20.0f64.ln() + 0.4 * 10.0f64.ln(), epsilon = 1e-12);
        assert!((h - 2.718).abs() < 0.001);
        assert_relative_eq!(h, entropy_oracle(&positions, &bounds, 4), epsilon = 1e-12);

        // 10 agents on 9 cells: 8 singles + 1 double.
        let bounds = unit_bounds(3.0);
        let positions = layout(3, 8, 1, 3.0);
        assert_eq!(positions.len(), 10);
        let h = deployment_entropy(&positions, &bounds, 3);
        assert!((h - 2.164).abs() < 0.005);
        assert_relative_eq!(h, entropy_oracle(&positions, &bounds, 3), epsilon = 1e-12);
    }

    #[test]
    fn entropy_edges_are_lower_edge_inclusive() {
        let bounds = unit_bounds(4.0);
        // On an interior grid line: belongs to the upper cell; the arena's
        // top edge stays in the last cell.
        let positions = vec![Vec2::new(2.0, 0.5), Vec2::new(4.0, 0.5)];
        let h = deployment_entropy(&positions, &bounds, 4);
        // Cells (2,0) and (3,0): two occupied cells with p = 1/2.
        assert_relative_eq!(h, 2.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn wall_fitness_branches() {
        let arena = ArenaSpec {
            x_min: -8.0,
            x_max: 8.0,
            y_min: -5.0,
            y_max: 5.0,
            wall: Some(InteriorWall {
                x: 0.0,
                height: 3.0,
                thickness: 0.1,
            }),
        };
        let world_at = |xs: &[f64]| WorldState {
            step_count: 0,
            dt: 0.05,
            agents: xs
                .iter()
                .map(|&x| AgentState {
                    position: Vec2::new(x, 0.0),
                    heading: 0.0,
                    altitude: 1.2,
                    last_command: Command::Velocity { vx: 0.0, vy: 0.0 },
                })
                .collect(),
            arena,
        };
        assert_eq!(
            wall_climb_fitness(&world_at(&[-1.0, -2.0, -0.5, 3.0, 4.0, -0.1, -7.0]), 0.0),
            5.0
        );
        assert_eq!(wall_climb_fitness(&world_at(&[2.5, 4.0, 6.0]), 0.0), -2.5);
        let all_over = vec![-1.0; 20];
        assert_eq!(wall_climb_fitness(&world_at(&all_over), 0.0), 20.0);
    }

    #[test]
    fn area_direction_examples() {
        // All-zero observation: no preferred direction.
        let d = designed_area_direction(&[0.0; 8], None, 0.5);
        assert_eq!(d, Vec2::ZERO);

        // Single neighbor dead east: repulsion due west.
        let mut k = [0.0; 8];
        k[0] = 0.8;
        let d = designed_area_direction(&k, None, 0.5).normalized_or_zero();
        assert_relative_eq!(d.x, -1.0, epsilon = 1e-12);
        assert_relative_eq!(d.y, 0.0, epsilon = 1e-12);

        // Opposing equal neighbors cancel.
        let mut k = [0.0; 8];
        k[0] = 0.5;
        k[4] = 0.5;
        let d = designed_area_direction(&k, None, 0.5);
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn area_repulsion_points_away_from_single_neighbors() {
        for region in 0..8 {
            let mut k = [0.0; 8];
            k[region] = 0.7;
            let d = designed_area_direction(&k, None, 0.5);
            let toward = Vec2::from_bearing(region_center(region, 8));
            assert!(d.dot(toward) <= 0.0, "repulsion not repulsive in region {region}");
        }
    }

    #[test]
    fn wall_direction_examples() {
        let west = Vec2::new(-1.0, 0.0);
        // No neighbors: straight toward the wall.
        let d = designed_wall_direction(&[0.0; 8], west, 0.3);
        assert_relative_eq!(d.x, -1.0, epsilon = 1e-12);

        // Single neighbor north (region 2), wall west, β = 0.3:
        // normalize((0,1) + 0.3·(−1,0)).
        let mut k = [0.0; 8];
        k[2] = 0.4;
        let d = designed_wall_direction(&k, west, 0.3);
        let expect = Vec2::new(-0.3, 1.0).normalized_or_zero();
        assert_relative_eq!(d.x, expect.x, epsilon = 1e-12);
        assert_relative_eq!(d.y, expect.y, epsilon = 1e-12);

        // Neighbor-count observation with everything in region 7.
        let mut k = [0.0; 8];
        k[7] = 5.0;
        let d = designed_wall_direction(&k, Vec2::ZERO, 0.3);
        let expect = Vec2::from_bearing(region_center(7, 8));
        assert_relative_eq!(d.x, expect.x, epsilon = 1e-12);
        assert_relative_eq!(d.y, expect.y, epsilon = 1e-12);

        // Ties break toward the lowest region index.
        let mut k = [0.0; 8];
        k[1] = 2.0;
        k[6] = 2.0;
        let d = designed_wall_direction(&k, Vec2::ZERO, 0.3);
        let expect = Vec2::from_bearing(region_center(1, 8));
        assert_relative_eq!(d.x, expect.x, epsilon = 1e-12);
        assert_relative_eq!(d.y, expect.y, epsilon = 1e-12);
    }

    #[test]
    fn named_tasks_have_the_published_arities() {
        let t = make_task(TaskName::GtmabArea, &TaskOverrides::default());
        assert_eq!(t.num_inputs(), 16);
        assert_eq!(t.num_outputs(), 2);
        assert_eq!(t.n_agents, 20);
        assert!(matches!(t.fitness, FitnessSpec::CoverageEntropy { grid: 4 }));

        let t = make_task(TaskName::AnkiArea, &TaskOverrides::default());
        assert_eq!(t.num_inputs(), 9);
        assert_eq!(t.n_agents, 10);
        assert!(matches!(t.fitness, FitnessSpec::CoverageEntropy { grid: 3 }));

        let t = make_task(TaskName::WallClimbNeighbor, &TaskOverrides::default());
        assert_eq!(t.num_inputs(), 8);
        assert_eq!(t.sense.mode, SenseMode::Neighbor);
        assert!(matches!(t.fitness, FitnessSpec::WallClimb { .. }));

        let t = make_task(TaskName::WallClimbDistance, &TaskOverrides::default());
        assert_eq!(t.sense.mode, SenseMode::Distance);

        assert!("no_such_task".parse::<TaskName>().is_err());
    }

    #[test]
    fn overrides_apply() {
        let ov = TaskOverrides {
            n_agents: Some(10),
            duration: Some(30.0),
            wall_bias_gain: Some(0.5),
            ..TaskOverrides::default()
        };
        let t = make_task(TaskName::WallClimbNeighbor, &ov);
        assert_eq!(t.n_agents, 10);
        assert_eq!(t.duration, 30.0);
        assert_eq!(t.designed.wall_bias_gain, 0.5);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        proptest! {
            #[test]
            fn entropy_stays_within_bounds_and_matches_oracle(seed in 0u64..1000) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let grid = rng.random_range(1..6usize);
                let n = rng.random_range(1..40usize);
                let bounds = unit_bounds(10.0);
                let positions: Vec<Vec2> = (0..n)
                    .map(|_| Vec2::new(rng.random_range(0.0..=10.0), rng.random_range(0.0..=10.0)))
                    .collect();
                let h = deployment_entropy(&positions, &bounds, grid);
                prop_assert!(h >= 0.0);
                prop_assert!(h <= ((grid * grid) as f64).ln() + 1e-12);
                let oracle = entropy_oracle(&positions, &bounds, grid);
                prop_assert!((h - oracle).abs() < 1e-12);
            }

            #[test]
            fn entropy_is_permutation_invariant(seed in 0u64..200) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let bounds = unit_bounds(10.0);
                let mut positions: Vec<Vec2> = (0..15)
                    .map(|_| Vec2::new(rng.random_range(0.0..=10.0), rng.random_range(0.0..=10.0)))
                    .collect();
                let h1 = deployment_entropy(&positions, &bounds, 4);
                positions.reverse();
                positions.swap(0, 7);
                let h2 = deployment_entropy(&positions, &bounds, 4);
                prop_assert_eq!(h1, h2);
            }

            #[test]
            fn wall_fitness_bounds_and_branch_exclusivity(seed in 0u64..500) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let arena = ArenaSpec {
                    x_min: -8.0, x_max: 8.0, y_min: -5.0, y_max: 5.0,
                    wall: Some(InteriorWall { x: 0.0, height: 3.0, thickness: 0.1 }),
                };
                let n = rng.random_range(1..25usize);
                let world = WorldState {
                    step_count: 0,
                    dt: 0.05,
                    agents: (0..n)
                        .map(|_| AgentState {
                            position: Vec2::new(rng.random_range(-8.0..=8.0), 0.0),
                            heading: 0.0,
                            altitude: 1.2,
                            last_command: Command::Velocity { vx: 0.0, vy: 0.0 },
                        })
                        .collect(),
                    arena,
                };
                let f = wall_climb_fitness(&world, 0.0);
                prop_assert!(f >= -arena.width());
                prop_assert!(f <= n as f64);
                let crossed = world.agents.iter().filter(|a| a.position.x < 0.0).count();
                if crossed > 0 {
                    prop_assert_eq!(f, crossed as f64);
                } else {
                    prop_assert!(f <= 0.0);
                }
            }
        }
    }
}
