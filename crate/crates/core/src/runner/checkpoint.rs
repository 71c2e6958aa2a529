//! Versioned training checkpoints.
//!
//! A checkpoint captures the full population (genomes, species, innovation
//! registry, RNG state) plus the report rows produced so far, so a resumed
//! run continues bit-for-bit where the original left off.

use crate::error::{Error, Result};
use crate::population::{GenerationRecord, Population};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    /// Generations completed before this snapshot was taken.
    pub completed_generations: u64,
    pub population: Population,
    pub records: Vec<GenerationRecord>,
}

impl Checkpoint {
    pub fn new(
        completed_generations: u64,
        population: Population,
        records: Vec<GenerationRecord>,
    ) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            completed_generations,
            population,
            records,
        }
    }

    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("checkpoint_gen{:06}.json", self.completed_generations));
        std::fs::write(&path, serde_json::to_string(self)?)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        let ckpt: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::UnsupportedVersion {
                kind: "checkpoint",
                found: ckpt.version,
                expected: CHECKPOINT_VERSION,
            });
        }
        Ok(ckpt)
    }

    /// Most recent checkpoint in a run directory, by completed generation.
    pub fn latest_in(dir: &Path) -> Result<Checkpoint> {
        let mut best: Option<(u64, PathBuf)> = None;
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            let name = match path.file_name().and_then(|n| n.to_str()) {
                Some(n) => n,
                None => continue,
            };
            if let Some(gen) = name
                .strip_prefix("checkpoint_gen")
                .and_then(|rest| rest.strip_suffix(".json"))
                .and_then(|digits| digits.parse::<u64>().ok())
            {
                if best.as_ref().map_or(true, |(g, _)| gen > *g) {
                    best = Some((gen, path));
                }
            }
        }
        match best {
            Some((_, path)) => Checkpoint::load(&path),
            None => Err(Error::NoCheckpoint(dir.to_path_buf())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::GenomeConfig;
    use crate::population::PopulationConfig;

    #[test]
    fn save_load_and_latest() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PopulationConfig {
            pop_size: 5,
            ..PopulationConfig::default()
        };
        let pop = Population::new(2, 1, GenomeConfig::default(), cfg, 1).unwrap();
        for completed in [1u64, 3, 2] {
            Checkpoint::new(completed, pop.clone(), Vec::new())
                .save(dir.path())
                .unwrap();
        }
        let latest = Checkpoint::latest_in(dir.path()).unwrap();
        assert_eq!(latest.completed_generations, 3);
        let reloaded = serde_json::to_string(&latest.population).unwrap();
        assert_eq!(reloaded, serde_json::to_string(&pop).unwrap());
    }

    #[test]
    fn missing_checkpoint_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            Checkpoint::latest_in(dir.path()),
            Err(Error::NoCheckpoint(_))
        ));
    }
}
