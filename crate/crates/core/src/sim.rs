//! Deterministic fixed-timestep kinematic swarm simulator.
//!
//! Two actuation modes share the planar arena: blimp-like agents track a
//! commanded planar velocity and hold altitude with a first-order
//! controller, differential-drive agents integrate wheel speeds. The arena
//! boundary clamps positions; an optional interior wall blocks horizontal
//! crossing for any agent at or below its height.
//!
//! Altitude stacking: a blimp's downward range sensor reports the top of
//! any agent below it — seen either through the narrow ultrasound cone or
//! by direct body contact — as the floor, and the altitude controller holds
//! the setpoint above that sensed floor. Agents crowding the same spot
//! therefore climb on top of one another, which is the only way over a wall
//! taller than the hover setpoint.

use crate::error::{Error, Result};
use crate::policy::Policy;
use crate::sensing::observe;
use crate::tasks::{EpisodeResult, TaskSpec};
use crate::vec2::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteriorWall {
    /// x coordinate of the wall plane.
    pub x: f64,
    pub height: f64,
    pub thickness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArenaSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub wall: Option<InteriorWall>,
}

impl ArenaSpec {
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Does the interior wall block the straight segment between two points
    /// at the given altitudes? Agents cannot sense or touch each other
    /// through the wall; sight lines passing above it are clear.
    pub fn wall_blocks(&self, a: Vec2, alt_a: f64, b: Vec2, alt_b: f64) -> bool {
        let Some(wall) = &self.wall else {
            return false;
        };
        let (da, db) = (a.x - wall.x, b.x - wall.x);
        if da * db >= 0.0 {
            return false;
        }
        let t = da / (da - db);
        alt_a + t * (alt_b - alt_a) <= wall.height
    }
}

/// Axis-aligned rectangle (spawn regions, entropy grids).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlimpParams {
    /// Plane-speed limit per axis, m/s.
    pub v_max: f64,
    /// Hover height above the sensed floor, m.
    pub altitude_setpoint: f64,
    /// Vertical extent of the hull, m.
    pub body_height: f64,
    /// Horizontal hull radius, m.
    pub body_radius: f64,
    /// Altitude controller time constant, s.
    pub tau_alt: f64,
    /// Half-angle of the downward ultrasound cone, degrees. Narrow by
    /// design: the wall itself is never sensed, so a lone agent cannot
    /// climb it.
    pub ultrasound_half_angle_deg: f64,
}

impl Default for BlimpParams {
    fn default() -> Self {
        BlimpParams {
            v_max: 0.5,
            altitude_setpoint: 1.2,
            body_height: 0.5,
            body_radius: 0.4,
            tau_alt: 1.0,
            ultrasound_half_angle_deg: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DriveParams {
    /// Wheel speed limit, m/s.
    pub wheel_max: f64,
    /// Distance between the wheels, m.
    pub wheelbase: f64,
    pub body_radius: f64,
}

impl Default for DriveParams {
    fn default() -> Self {
        DriveParams {
            wheel_max: 0.2,
            wheelbase: 0.05,
            body_radius: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ActuationMode {
    Blimp(BlimpParams),
    Drive(DriveParams),
}

impl ActuationMode {
    pub fn body_radius(&self) -> f64 {
        match self {
            ActuationMode::Blimp(p) => p.body_radius,
            ActuationMode::Drive(p) => p.body_radius,
        }
    }

    pub fn zero_command(&self) -> Command {
        match self {
            ActuationMode::Blimp(_) => Command::Velocity { vx: 0.0, vy: 0.0 },
            ActuationMode::Drive(_) => Command::Wheels { left: 0.0, right: 0.0 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Command {
    Velocity { vx: f64, vy: f64 },
    Wheels { left: f64, right: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub position: Vec2,
    /// Radians; meaningful in drive mode only.
    pub heading: f64,
    /// Meters above ground; meaningful in blimp mode only.
    pub altitude: f64,
    /// Realized command from the last control tick.
    pub last_command: Command,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub step_count: u64,
    pub dt: f64,
    pub agents: Vec<AgentState>,
    pub arena: ArenaSpec,
}

impl WorldState {
    /// Simulation time; exactly `step_count · dt` by construction.
    pub fn time(&self) -> f64 {
        self.step_count as f64 * self.dt
    }
}

/// One decimated trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub time: f64,
    pub agent: usize,
    pub x: f64,
    pub y: f64,
    pub altitude: f64,
    pub heading: f64,
}

/// Place `n` agents uniformly in `region` with pairwise separation at least
/// `min_sep`, by rejection sampling with a bounded retry budget. Blimps
/// start at the altitude setpoint; drive agents get uniform headings.
pub fn spawn<R: Rng>(
    arena: ArenaSpec,
    n: usize,
    region: &Rect,
    min_sep: f64,
    dt: f64,
    mode: &ActuationMode,
    rng: &mut R,
) -> Result<WorldState> {
    assert!(n >= 1, "spawn needs at least one agent");
    assert!(dt > 0.0, "timestep must be positive");
    let mut placed: Vec<Vec2> = Vec::with_capacity(n);
    let budget = 1000 * n;
    let mut attempts = 0usize;
    while placed.len() < n {
        if attempts >= budget {
            return Err(Error::SpawnFailed { n, min_sep });
        }
        attempts += 1;
        let p = Vec2::new(
            rng.random_range(region.x_min..=region.x_max),
            rng.random_range(region.y_min..=region.y_max),
        );
        if placed.iter().all(|q| q.distance(p) >= min_sep) {
            placed.push(p);
        }
    }
    let agents = placed
        .into_iter()
        .map(|position| AgentState {
            position,
            heading: match mode {
                ActuationMode::Drive(_) => rng.random_range(0.0..TAU),
                ActuationMode::Blimp(_) => 0.0,
            },
            altitude: match mode {
                ActuationMode::Blimp(p) => p.altitude_setpoint,
                ActuationMode::Drive(_) => 0.0,
            },
            last_command: mode.zero_command(),
        })
        .collect();
    Ok(WorldState {
        step_count: 0,
        dt,
        agents,
        arena,
    })
}

/// Map raw network outputs in (0, 1) onto a command: each channel is
/// rescaled by c = (2o − 1) · c_max.
pub fn decode_command(outputs: &[f64], mode: &ActuationMode) -> Result<Command> {
    if outputs.len() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: outputs.len(),
            context: "command outputs".into(),
        });
    }
    Ok(match mode {
        ActuationMode::Blimp(p) => Command::Velocity {
            vx: (2.0 * outputs[0] - 1.0) * p.v_max,
            vy: (2.0 * outputs[1] - 1.0) * p.v_max,
        },
        ActuationMode::Drive(p) => Command::Wheels {
            left: (2.0 * outputs[0] - 1.0) * p.wheel_max,
            right: (2.0 * outputs[1] - 1.0) * p.wheel_max,
        },
    })
}

/// Advance the world by one timestep under the given per-agent commands.
pub fn step(world: &mut WorldState, commands: &[Command], mode: &ActuationMode) -> Result<()> {
    if commands.len() != world.agents.len() {
        return Err(Error::ArityMismatch {
            expected: world.agents.len(),
            got: commands.len(),
            context: "per-agent commands".into(),
        });
    }
    let dt = world.dt;
    let arena = world.arena;
    for (agent, cmd) in world.agents.iter_mut().zip(commands) {
        let old = agent.position;
        let realized = match (mode, cmd) {
            (ActuationMode::Blimp(p), Command::Velocity { vx, vy }) => {
                let vx = vx.clamp(-p.v_max, p.v_max);
                let vy = vy.clamp(-p.v_max, p.v_max);
                agent.position += Vec2::new(vx, vy) * dt;
                Command::Velocity { vx, vy }
            }
            (ActuationMode::Drive(p), Command::Wheels { left, right }) => {
                let left = left.clamp(-p.wheel_max, p.wheel_max);
                let right = right.clamp(-p.wheel_max, p.wheel_max);
                let v = (left + right) / 2.0;
                let omega = (right - left) / p.wheelbase;
                agent.heading = (agent.heading + omega * dt).rem_euclid(TAU);
                agent.position += Vec2::from_bearing(agent.heading) * (v * dt);
                Command::Wheels { left, right }
            }
            _ => {
                return Err(Error::Parse(
                    "command variant does not match actuation mode".into(),
                ))
            }
        };
        agent.last_command = realized;

        if let Some(wall) = &arena.wall {
            agent.position.x = block_wall_crossing(old.x, agent.position.x, agent.altitude, wall);
        }
        clamp_to_arena(agent, &arena);
    }

    if let ActuationMode::Drive(p) = mode {
        separate_drive_agents(&mut world.agents, p.body_radius);
        for agent in world.agents.iter_mut() {
            clamp_to_arena(agent, &arena);
        }
    }
    if let ActuationMode::Blimp(p) = mode {
        resolve_altitudes(world, p);
    }
    world.step_count += 1;
    Ok(())
}

/// Clamp into the arena and zero the outward velocity component.
fn clamp_to_arena(agent: &mut AgentState, arena: &ArenaSpec) {
    let p = &mut agent.position;
    let mut clamped_x = false;
    let mut clamped_y = false;
    if p.x < arena.x_min {
        p.x = arena.x_min;
        clamped_x = true;
    } else if p.x > arena.x_max {
        p.x = arena.x_max;
        clamped_x = true;
    }
    if p.y < arena.y_min {
        p.y = arena.y_min;
        clamped_y = true;
    } else if p.y > arena.y_max {
        p.y = arena.y_max;
        clamped_y = true;
    }
    if let Command::Velocity { vx, vy } = &mut agent.last_command {
        if clamped_x {
            *vx = 0.0;
        }
        if clamped_y {
            *vy = 0.0;
        }
    }
}

/// Block the motion segment at the wall face for agents at or below the
/// wall height. An agent already inside the slab (descended from above) is
/// allowed to keep moving and exit.
fn block_wall_crossing(x_old: f64, x_new: f64, altitude: f64, wall: &InteriorWall) -> f64 {
    if altitude > wall.height {
        return x_new;
    }
    let half = wall.thickness / 2.0;
    let lo = wall.x - half;
    let hi = wall.x + half;
    if x_old >= hi && x_new < hi {
        hi
    } else if x_old <= lo && x_new > lo {
        lo
    } else {
        x_new
    }
}

/// Push overlapping drive agents apart symmetrically along their
/// separation axis (single pass over ordered pairs).
fn separate_drive_agents(agents: &mut [AgentState], body_radius: f64) {
    let min_dist = 2.0 * body_radius;
    for i in 0..agents.len() {
        for j in (i + 1)..agents.len() {
            let delta = agents[j].position - agents[i].position;
            let d = delta.norm();
            if d >= min_dist {
                continue;
            }
            // Coincident agents get a fixed separation axis.
            let axis = if d < 1e-12 {
                Vec2::new(1.0, 0.0)
            } else {
                delta * (1.0 / d)
            };
            let push = (min_dist - d) / 2.0;
            agents[i].position -= axis * push;
            agents[j].position += axis * push;
        }
    }
}

/// Re-resolve blimp altitudes against sensed floors (synchronous update
/// from the pre-step snapshot).
///
/// Agent j registers as floor for agent i — contributing its hull top,
/// altitude + body height — in two ways. The downward ultrasound cone,
/// evaluated at the altitude gap, sees a hull directly underfoot: that
/// floor is load-bearing, so the altitude is clamped to never drop below
/// it. A hull in horizontal contact at overlapping altitude (ties broken
/// by agent index, which is what lets a level flock begin stacking) is not
/// underfoot yet: the agent slides up over it by relaxation alone until
/// the cone takes over. Neither applies through the interior wall.
pub fn resolve_altitudes(world: &mut WorldState, params: &BlimpParams) {
    let tan_half = params.ultrasound_half_angle_deg.to_radians().tan();
    let snapshot: Vec<(Vec2, f64)> = world
        .agents
        .iter()
        .map(|a| (a.position, a.altitude))
        .collect();
    let dt = world.dt;
    let arena = world.arena;
    for (i, agent) in world.agents.iter_mut().enumerate() {
        let (pos_i, alt_i) = snapshot[i];
        let mut supporting = 0.0f64;
        let mut target_floor = 0.0f64;
        for (j, &(pos_j, alt_j)) in snapshot.iter().enumerate() {
            if i == j {
                continue;
            }
            let top_j = alt_j + params.body_height;
            if arena.wall_blocks(pos_i, alt_i, pos_j, alt_j) {
                continue;
            }
            let hdist = pos_i.distance(pos_j);
            if alt_i >= top_j {
                if hdist <= (alt_i - top_j) * tan_half + params.body_radius {
                    supporting = supporting.max(top_j);
                }
            } else if (alt_i, i) > (alt_j, j) && hdist < params.body_radius {
                target_floor = target_floor.max(top_j);
            }
        }
        target_floor = target_floor.max(supporting);
        let target = target_floor + params.altitude_setpoint;
        let relaxed = alt_i + (target - alt_i) * (dt / params.tau_alt);
        agent.altitude = relaxed.max(supporting);
    }
}

/// Run one full episode: spawn per the task, then at every control tick
/// each agent senses the frozen world, activates its own copy of the
/// policy and issues a command. Returns the task fitness plus a trajectory
/// decimated to every `log_every`-th tick (0 logs only the final state).
pub fn run_episode(
    task: &TaskSpec,
    policy: &dyn Policy,
    seed: u64,
    log_every: u64,
) -> Result<EpisodeResult> {
    policy.validate(task)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut world = spawn(
        task.arena,
        task.n_agents,
        &task.spawn_region,
        task.min_sep,
        task.dt,
        &task.mode,
        &mut rng,
    )?;
    let steps = (task.duration / task.dt).ceil() as u64;
    let mut trajectory = Vec::new();
    let mut commands = vec![task.mode.zero_command(); task.n_agents];
    for s in 0..steps {
        if log_every > 0 && s % log_every == 0 {
            log_world(&world, &mut trajectory);
        }
        for i in 0..world.agents.len() {
            let obs = observe(&world.agents, i, &world.arena, &task.sense, &task.mode);
            commands[i] = policy.command(&obs, &world.agents[i], task);
        }
        step(&mut world, &commands, &task.mode)?;
    }
    log_world(&world, &mut trajectory);
    let fitness = task.evaluate_fitness(&world);
    Ok(EpisodeResult {
        fitness,
        final_world: world,
        trajectory,
    })
}

fn log_world(world: &WorldState, out: &mut Vec<TrajectoryRow>) {
    let time = world.time();
    for (i, a) in world.agents.iter().enumerate() {
        out.push(TrajectoryRow {
            time,
            agent: i,
            x: a.position.x,
            y: a.position.y,
            altitude: a.altitude,
            heading: a.heading,
        });
    }
}
