//! Local sensing: k-tant distance/neighbor senses, per-k-tant wall rays and
//! the forward proximity ray.
//!
//! Directions around an agent are split into k angular regions. Region 0 is
//! centered on the reference direction (+x in the world frame, the heading
//! in the body frame) and covers the half-open interval
//! [-π/k, π/k), lower edge inclusive. Distances are reported inverted as
//! 1/(1 + d) so an empty region reads exactly 0.

use crate::sim::{ActuationMode, AgentState, ArenaSpec};
use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SenseMode {
    /// Inverted distance to the nearest neighbor per region.
    Distance,
    /// Neighbor count per region.
    Neighbor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Region 0 faces +x (yaw-stabilized platforms).
    World,
    /// Region 0 faces the agent's heading (ground robots).
    Body,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SenseSpec {
    pub k: usize,
    pub mode: SenseMode,
    pub range: f64,
    pub frame: Frame,
    pub include_walls: bool,
    pub include_proximity: bool,
    /// Reach of the forward proximity ray (drive platforms).
    pub proximity_range: f64,
}

impl SenseSpec {
    pub fn observation_len(&self) -> usize {
        self.k * (1 + usize::from(self.include_walls)) + usize::from(self.include_proximity)
    }
}

/// One agent's sensor reading for one control tick: k k-tant values, then k
/// wall values when enabled, then the proximity value when enabled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub values: Vec<f64>,
}

impl Observation {
    pub fn ktant<'a>(&'a self, spec: &SenseSpec) -> &'a [f64] {
        &self.values[..spec.k]
    }

    pub fn walls<'a>(&'a self, spec: &SenseSpec) -> Option<&'a [f64]> {
        spec.include_walls.then(|| &self.values[spec.k..2 * spec.k])
    }

    pub fn proximity(&self, spec: &SenseSpec) -> Option<f64> {
        spec.include_proximity.then(|| *self.values.last().expect("non-empty"))
    }
}

/// Region index for a bearing relative to the reference direction.
pub fn ktant_index(relative_bearing: f64, k: usize) -> usize {
    let width = TAU / k as f64;
    let b = relative_bearing.rem_euclid(TAU);
    (((b + width / 2.0) / width).floor() as usize) % k
}

/// Center bearing of region `i`, relative to the reference direction.
pub fn region_center(i: usize, k: usize) -> f64 {
    i as f64 * TAU / k as f64
}

fn relative_bearing(from: Vec2, to: Vec2, frame_ref: f64) -> f64 {
    (to - from).bearing() - frame_ref
}

/// Inverted distance to the nearest in-range neighbor per region; 0 where a
/// region is empty.
pub fn distance_sense(pos: Vec2, frame_ref: f64, others: &[Vec2], spec: &SenseSpec) -> Vec<f64> {
    let mut nearest = vec![f64::INFINITY; spec.k];
    for &p in others {
        let d = pos.distance(p);
        if d > spec.range {
            continue;
        }
        let region = ktant_index(relative_bearing(pos, p, frame_ref), spec.k);
        if d < nearest[region] {
            nearest[region] = d;
        }
    }
    nearest
        .into_iter()
        .map(|d| if d.is_finite() { 1.0 / (1.0 + d) } else { 0.0 })
        .collect()
}

/// Count of in-range neighbors per region.
pub fn neighbor_sense(pos: Vec2, frame_ref: f64, others: &[Vec2], spec: &SenseSpec) -> Vec<f64> {
    let mut counts = vec![0.0; spec.k];
    for &p in others {
        if pos.distance(p) > spec.range {
            continue;
        }
        counts[ktant_index(relative_bearing(pos, p, frame_ref), spec.k)] += 1.0;
    }
    counts
}

/// Inverted distance to the nearest arena boundary (and interior wall face,
/// when present) along each region's center bearing.
pub fn wall_sense(pos: Vec2, frame_ref: f64, arena: &ArenaSpec, k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| {
            let dir = Vec2::from_bearing(frame_ref + region_center(i, k));
            1.0 / (1.0 + ray_to_walls(pos, dir, arena))
        })
        .collect()
}

fn ray_to_walls(pos: Vec2, dir: Vec2, arena: &ArenaSpec) -> f64 {
    let mut best = f64::INFINITY;
    let mut consider = |t: f64| {
        if t >= 0.0 && t < best {
            best = t;
        }
    };
    const EPS: f64 = 1e-12;
    if dir.x > EPS {
        consider((arena.x_max - pos.x) / dir.x);
    } else if dir.x < -EPS {
        consider((arena.x_min - pos.x) / dir.x);
    }
    if dir.y > EPS {
        consider((arena.y_max - pos.y) / dir.y);
    } else if dir.y < -EPS {
        consider((arena.y_min - pos.y) / dir.y);
    }
    if let Some(wall) = &arena.wall {
        let half = wall.thickness / 2.0;
        for face in [wall.x - half, wall.x + half] {
            if dir.x.abs() > EPS {
                let t = (face - pos.x) / dir.x;
                consider(t);
            }
        }
    }
    best
}

/// Inverted distance to the first agent body hit by a forward ray of width
/// one body diameter; 0 when nothing lies within `max_ray`.
pub fn proximity_sense(
    pos: Vec2,
    heading: f64,
    others: &[Vec2],
    body_radius: f64,
    max_ray: f64,
) -> f64 {
    let dir = Vec2::from_bearing(heading);
    let mut nearest = f64::INFINITY;
    for &p in others {
        let rel = p - pos;
        let along = rel.dot(dir);
        if along <= 0.0 || along > max_ray {
            continue;
        }
        let perp = (rel.x * dir.y - rel.y * dir.x).abs();
        // Beam half-width body_radius against a body of radius body_radius.
        if perp <= 2.0 * body_radius && along < nearest {
            nearest = along;
        }
    }
    if nearest.is_finite() {
        1.0 / (1.0 + nearest)
    } else {
        0.0
    }
}

/// Full observation for one agent against a frozen world snapshot.
///
/// The horizontal k-tant senses skip agents stacked directly above or
/// below the sensing agent (horizontal offset under one body radius with at
/// least one body height of vertical separation): a hull inside the
/// agent's own vertical column has no meaningful planar bearing, and is
/// what the downward range sensor reports instead.
pub fn observe(
    agents: &[AgentState],
    idx: usize,
    arena: &ArenaSpec,
    spec: &SenseSpec,
    mode: &ActuationMode,
) -> Observation {
    let me = &agents[idx];
    let frame_ref = match spec.frame {
        Frame::World => 0.0,
        Frame::Body => me.heading,
    };
    let body_radius = mode.body_radius();
    let in_own_column = |a: &AgentState| -> bool {
        match mode {
            ActuationMode::Blimp(p) => {
                (a.altitude - me.altitude).abs() >= p.body_height
                    && a.position.distance(me.position) < p.body_radius
            }
            ActuationMode::Drive(_) => false,
        }
    };
    let others: Vec<Vec2> = agents
        .iter()
        .enumerate()
        .filter(|&(i, a)| {
            i != idx
                && !in_own_column(a)
                && !arena.wall_blocks(me.position, me.altitude, a.position, a.altitude)
        })
        .map(|(_, a)| a.position)
        .collect();

    let mut values = match spec.mode {
        SenseMode::Distance => distance_sense(me.position, frame_ref, &others, spec),
        SenseMode::Neighbor => neighbor_sense(me.position, frame_ref, &others, spec),
    };
    if spec.include_walls {
        values.extend(wall_sense(me.position, frame_ref, arena, spec.k));
    }
    if spec.include_proximity {
        values.push(proximity_sense(
            me.position,
            me.heading,
            &others,
            body_radius,
            spec.proximity_range,
        ));
    }
    debug_assert!(values.iter().all(|v| v.is_finite()));
    Observation { values }
}
