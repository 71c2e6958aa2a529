//! Delimited text tables produced and consumed by the runner.
//!
//! Two schemas, both versioned by a leading comment line:
//!
//! evolution-v1: `generation,best_fitness,mean_fitness,fitness_stdev,`
//! `species_count,best_genome_id` — one row per completed generation.
//!
//! trajectory-v1: `time,agent,x,y,altitude,heading` — decimated per-tick
//! agent samples. Arena geometry rides along as `# arena:` / `# wall:`
//! comment lines so a trajectory file is renderable on its own.

use crate::error::{Error, Result};
use crate::population::GenerationRecord;
use crate::sim::{ArenaSpec, InteriorWall, TrajectoryRow};
use std::fmt::Write as _;
use std::path::Path;

pub const EVOLUTION_SCHEMA: &str = "evolution-v1";
pub const TRAJECTORY_SCHEMA: &str = "trajectory-v1";

pub fn evolution_header() -> String {
    format!(
        "# schema: {EVOLUTION_SCHEMA}\ngeneration,best_fitness,mean_fitness,fitness_stdev,species_count,best_genome_id\n"
    )
}

pub fn evolution_row(rec: &GenerationRecord) -> String {
    format!(
        "{},{},{},{},{},{}\n",
        rec.generation,
        rec.best_fitness,
        rec.mean_fitness,
        rec.fitness_stdev,
        rec.species_count,
        rec.best_genome_id
    )
}

/// Parse an evolution CSV back into partial generation records (the
/// best-ever column is reconstructed as a running maximum).
pub fn parse_evolution_csv(text: &str) -> Result<Vec<GenerationRecord>> {
    let mut records = Vec::new();
    let mut best_ever = f64::NEG_INFINITY;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("generation") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!(
                "evolution row has {} fields, expected 6: {line}",
                fields.len()
            )));
        }
        let best_fitness: f64 = parse_field(fields[1], "best_fitness")?;
        best_ever = best_ever.max(best_fitness);
        records.push(GenerationRecord {
            generation: parse_field(fields[0], "generation")?,
            best_fitness,
            mean_fitness: parse_field(fields[2], "mean_fitness")?,
            fitness_stdev: parse_field(fields[3], "fitness_stdev")?,
            species_count: parse_field(fields[4], "species_count")?,
            best_genome_id: parse_field(fields[5], "best_genome_id")?,
            best_ever_fitness: best_ever,
        });
    }
    Ok(records)
}

pub fn write_trajectory(
    path: &Path,
    arena: &ArenaSpec,
    rows: &[TrajectoryRow],
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# schema: {TRAJECTORY_SCHEMA}");
    let _ = writeln!(
        out,
        "# arena: {} {} {} {}",
        arena.x_min, arena.x_max, arena.y_min, arena.y_max
    );
    if let Some(w) = &arena.wall {
        let _ = writeln!(out, "# wall: {} {} {}", w.x, w.height, w.thickness);
    }
    out.push_str("time,agent,x,y,altitude,heading\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.time, r.agent, r.x, r.y, r.altitude, r.heading
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn parse_trajectory(text: &str) -> Result<(ArenaSpec, Vec<TrajectoryRow>)> {
    let mut arena = ArenaSpec {
        x_min: 0.0,
        x_max: 1.0,
        y_min: 0.0,
        y_max: 1.0,
        wall: None,
    };
    let mut saw_arena = false;
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("time,") {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# arena:") {
            let vals = parse_floats(rest, 4)?;
            arena.x_min = vals[0];
            arena.x_max = vals[1];
            arena.y_min = vals[2];
            arena.y_max = vals[3];
            saw_arena = true;
            continue;
        }
        if let Some(rest) = line.strip_prefix("# wall:") {
            let vals = parse_floats(rest, 3)?;
            arena.wall = Some(InteriorWall {
                x: vals[0],
                height: vals[1],
                thickness: vals[2],
            });
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!(
                "trajectory row has {} fields, expected 6: {line}",
                fields.len()
            )));
        }
        rows.push(TrajectoryRow {
            time: parse_field(fields[0], "time")?,
            agent: parse_field(fields[1], "agent")?,
            x: parse_field(fields[2], "x")?,
            y: parse_field(fields[3], "y")?,
            altitude: parse_field(fields[4], "altitude")?,
            heading: parse_field(fields[5], "heading")?,
        });
    }
    if !saw_arena {
        return Err(Error::Parse("trajectory file lacks an `# arena:` line".into()));
    }
    Ok((arena, rows))
}

fn parse_floats(text: &str, n: usize) -> Result<Vec<f64>> {
    let vals: Vec<f64> = text
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("bad float in `{text}`: {e}")))?;
    if vals.len() != n {
        return Err(Error::Parse(format!(
            "expected {n} values in `{text}`, got {}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn parse_field<T: std::str::FromStr>(field: &str, name: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    field
        .parse::<T>()
        .map_err(|e| Error::Parse(format!("bad {name} `{field}`: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evolution_round_trip() {
        let recs = vec![
            GenerationRecord {
                generation: 0,
                best_fitness: 1.5,
                mean_fitness: 0.25,
                fitness_stdev: 0.6,
                species_count: 3,
                best_genome_id: 17,
                best_ever_fitness: 1.5,
            },
            GenerationRecord {
                generation: 1,
                best_fitness: 1.25,
                mean_fitness: 0.5,
                fitness_stdev: 0.5,
                species_count: 4,
                best_genome_id: 21,
                best_ever_fitness: 1.5,
            },
        ];
        let mut text = evolution_header();
        for r in &recs {
            text.push_str(&evolution_row(r));
        }
        let back = parse_evolution_csv(&text).unwrap();
        assert_eq!(back, recs);
    }

    #[test]
    fn trajectory_round_trip_keeps_arena() {
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
        let rows = vec![TrajectoryRow {
            time: 0.05,
            agent: 2,
            x: 1.25,
            y: -0.5,
            altitude: 1.2,
            heading: 0.0,
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        write_trajectory(&path, &arena, &rows).unwrap();
        let (arena2, rows2) = parse_trajectory(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(arena, arena2);
        assert_eq!(rows, rows2);
    }
}
