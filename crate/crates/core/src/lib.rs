//! Neuroevolution of swarm controllers.
//!
//! `swarmevo` evolves per-agent neural network controllers for homogeneous
//! robot swarms with a NEAT-style evolutionary loop, evaluates them in a
//! built-in fixed-timestep kinematic simulator (planar motion plus an
//! altitude channel for blimp-like agents), and statistically compares the
//! evolved controllers against hand-designed baseline policies.
//!
//! The crate is organized around that pipeline:
//!
//! * [`genome`] — evolvable network blueprints: structural and weight
//!   mutation, crossover, compatibility distance.
//! * [`phenotype`] — compilation of genomes into executable feed-forward
//!   networks.
//! * [`population`] — speciation, stagnation, offspring allocation and the
//!   generational loop.
//! * [`sensing`] — k-tant distance/neighbor senses, wall rays and the
//!   forward proximity ray.
//! * [`sim`] — the swarm simulator: arena walls, altitude stacking, blimp
//!   velocity control and differential drive.
//! * [`tasks`] — task definitions (area coverage, wall climb), fitness
//!   functions and designed baseline policies.
//! * [`runner`] — seeded parallel evaluation, training runs with
//!   checkpoint/resume, comparison trials, CSV/SVG outputs.

pub mod activation;
pub mod error;
pub mod genome;
pub mod phenotype;
pub mod policy;
pub mod population;
pub mod runner;
pub mod sensing;
pub mod sim;
pub mod stats;
pub mod tasks;
pub mod vec2;

pub use error::{Error, Result};
pub use genome::{
    ConnectionGene, Genome, GenomeConfig, GenomeId, Innovation, InnovationRegistry, NodeGene,
    NodeId, NodeKind,
};
pub use phenotype::FeedForwardNetwork;
pub use policy::{NetworkPolicy, Policy};
pub use population::{
    EvolutionReport, GenerationRecord, Population, PopulationConfig, Species, SpeciesId,
};
pub use runner::{ComparisonReport, RunConfig};
pub use sensing::{Frame, Observation, SenseMode, SenseSpec};
pub use sim::{
    ActuationMode, AgentState, ArenaSpec, BlimpParams, Command, DriveParams, InteriorWall, Rect,
    TrajectoryRow, WorldState,
};
pub use tasks::{EpisodeResult, FitnessSpec, TaskName, TaskOverrides, TaskSpec};
pub use vec2::Vec2;
