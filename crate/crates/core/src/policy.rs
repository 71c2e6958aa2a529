//! Per-agent controllers.
//!
//! A policy is a pure function from one agent's observation to a command.
//! Every agent in a swarm runs the same policy object (homogeneous
//! deployment), so implementations must be stateless and `Sync`.

use crate::error::Result;
use crate::phenotype::FeedForwardNetwork;
use crate::sensing::Observation;
use crate::sim::{decode_command, AgentState, Command};
use crate::tasks::TaskSpec;

pub trait Policy: Sync {
    /// Check input/output compatibility with a task before any simulation
    /// starts. Designed policies accept any task they are built for.
    fn validate(&self, _task: &TaskSpec) -> Result<()> {
        Ok(())
    }

    fn command(&self, obs: &Observation, agent: &AgentState, task: &TaskSpec) -> Command;
}

/// A compiled network driving the task's actuation mode.
pub struct NetworkPolicy {
    pub net: FeedForwardNetwork,
}

impl NetworkPolicy {
    pub fn new(net: FeedForwardNetwork) -> Self {
        NetworkPolicy { net }
    }
}

impl Policy for NetworkPolicy {
    fn validate(&self, task: &TaskSpec) -> Result<()> {
        task.check_arity(self.net.num_inputs(), self.net.num_outputs())
    }

    fn command(&self, obs: &Observation, _agent: &AgentState, task: &TaskSpec) -> Command {
        let outputs = self
            .net
            .activate(&obs.values)
            .expect("arity validated before the episode");
        decode_command(&outputs, &task.mode).expect("networks emit two outputs")
    }
}
