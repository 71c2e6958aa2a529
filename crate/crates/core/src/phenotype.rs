//! Compilation of a genome into an executable feed-forward network.
//!
//! Compilation prunes nodes that cannot influence any output, orders the
//! remaining nodes topologically and flattens them into a dense evaluation
//! plan. The resulting network is immutable and `activate` keeps no internal
//! state, so one compiled network can serve a whole homogeneous swarm.

use crate::activation::{Activation, Aggregation};
use crate::error::{Error, Result};
use crate::genome::{Genome, NodeId, NodeKind};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct NodeEval {
    slot: usize,
    bias: f64,
    response: f64,
    activation: Activation,
    aggregation: Aggregation,
    /// (source slot, weight) terms feeding this node.
    links: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedForwardNetwork {
    num_inputs: usize,
    num_outputs: usize,
    slots: usize,
    evals: Vec<NodeEval>,
    output_slots: Vec<usize>,
}

impl FeedForwardNetwork {
    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.num_outputs
    }

    /// Compile a genome. Hidden nodes with no enabled path to an output are
    /// pruned; a cycle in the enabled subgraph is a compilation error naming
    /// the nodes involved.
    pub fn compile(genome: &Genome) -> Result<FeedForwardNetwork> {
        let inputs: BTreeSet<NodeId> = genome.input_ids().collect();
        let outputs: Vec<NodeId> = genome.output_ids().collect();
        let edges: Vec<(NodeId, NodeId, f64)> = genome
            .connections
            .values()
            .filter(|c| c.enabled)
            .map(|c| (c.source, c.target, c.weight))
            .collect();

        // Walk backwards from the outputs: only these nodes can matter.
        let mut required: BTreeSet<NodeId> = outputs.iter().copied().collect();
        let mut frontier: Vec<NodeId> = outputs.clone();
        while let Some(n) = frontier.pop() {
            for &(s, t, _) in &edges {
                if t == n && !inputs.contains(&s) && required.insert(s) {
                    frontier.push(s);
                }
            }
        }

        // Layered topological order: a node is ready once every enabled
        // in-edge source is resolved. Inputs start resolved.
        let mut resolved: BTreeSet<NodeId> = inputs.clone();
        let mut pending: BTreeSet<NodeId> = required.clone();
        let mut order: Vec<NodeId> = Vec::with_capacity(pending.len());
        while !pending.is_empty() {
            let ready: Vec<NodeId> = pending
                .iter()
                .copied()
                .filter(|&n| {
                    edges.iter().all(|&(s, t, _)| {
                        t != n || resolved.contains(&s) || !required.contains(&s)
                    })
                })
                .collect();
            if ready.is_empty() {
                return Err(Error::CycleDetected {
                    nodes: pending.into_iter().collect(),
                });
            }
            for n in ready {
                pending.remove(&n);
                resolved.insert(n);
                order.push(n);
            }
        }

        // Dense slot assignment: inputs first, then plan order.
        let mut slot_of: BTreeMap<NodeId, usize> = BTreeMap::new();
        for (i, id) in genome.input_ids().enumerate() {
            slot_of.insert(id, i);
        }
        for (i, &id) in order.iter().enumerate() {
            slot_of.insert(id, genome.num_inputs + i);
        }

        let evals = order
            .iter()
            .map(|&id| {
                let node = &genome.nodes[&id];
                debug_assert!(node.kind != NodeKind::Input);
                let links = edges
                    .iter()
                    .filter(|&&(s, t, _)| t == id && slot_of.contains_key(&s))
                    .map(|&(s, _, w)| (slot_of[&s], w))
                    .collect();
                NodeEval {
                    slot: slot_of[&id],
                    bias: node.bias,
                    response: node.response,
                    activation: node.activation,
                    aggregation: node.aggregation,
                    links,
                }
            })
            .collect();

        Ok(FeedForwardNetwork {
            num_inputs: genome.num_inputs,
            num_outputs: genome.num_outputs,
            slots: genome.num_inputs + order.len(),
            evals,
            output_slots: outputs.iter().map(|id| slot_of[id]).collect(),
        })
    }

    /// Evaluate the network for one control tick.
    pub fn activate(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        let mut values = vec![0.0; self.slots];
        let mut out = vec![0.0; self.num_outputs];
        self.activate_into(inputs, &mut values, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant for hot loops. `values` must have length
    /// `scratch_len()` and `out` length `num_outputs`.
    pub fn activate_into(&self, inputs: &[f64], values: &mut [f64], out: &mut [f64]) -> Result<()> {
        if inputs.len() != self.num_inputs {
            return Err(Error::ArityMismatch {
                expected: self.num_inputs,
                got: inputs.len(),
                context: "network inputs".into(),
            });
        }
        if inputs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "network inputs".into(),
            });
        }
        values[..self.num_inputs].copy_from_slice(inputs);
        values[self.num_inputs..].fill(0.0);
        for eval in &self.evals {
            let agg = eval
                .aggregation
                .apply(eval.links.iter().map(|&(slot, w)| w * values[slot]));
            values[eval.slot] = eval.activation.apply(eval.bias + eval.response * agg);
        }
        for (o, &slot) in out.iter_mut().zip(&self.output_slots) {
            *o = values[slot];
        }
        Ok(())
    }

    pub fn scratch_len(&self) -> usize {
        self.slots
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{ConnectionGene, GenomeConfig, InnovationRegistry, NodeGene};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn minimal(num_inputs: usize, num_outputs: usize, seed: u64) -> Genome {
        let cfg = GenomeConfig::default();
        let mut registry = InnovationRegistry::new(num_outputs);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Genome::minimal(0, num_inputs, num_outputs, &mut registry, &mut rng, &cfg).unwrap()
    }

    fn zeroed(mut genome: Genome) -> Genome {
        for c in genome.connections.values_mut() {
            c.weight = 0.0;
        }
        for n in genome.nodes.values_mut() {
            n.bias = 0.0;
        }
        genome
    }

    #[test]
    fn minimal_network_evaluates_weighted_sum() {
        let mut g = minimal(2, 1, 1);
        for c in g.connections.values_mut() {
            c.weight = 1.0;
        }
        g.nodes.get_mut(&0).unwrap().bias = 0.0;
        let net = FeedForwardNetwork::compile(&g).unwrap();
        // Single connection contributing: sigmoid at 5 · 1.0.
        let out = net.activate(&[1.0, 0.0]).unwrap();
        assert_relative_eq!(out[0], 0.9933071490757153, max_relative = 1e-12);
    }

    #[test]
    fn all_zero_weights_give_half() {
        let g = zeroed(minimal(4, 2, 2));
        let net = FeedForwardNetwork::compile(&g).unwrap();
        let out = net.activate(&[0.3, -0.7, 2.0, 0.0]).unwrap();
        assert_eq!(out, vec![0.5, 0.5]);
    }

    #[test]
    fn zero_input_contributes_nothing() {
        let mut g = minimal(1, 1, 3);
        g.nodes.get_mut(&0).unwrap().bias = 0.75;
        let net = FeedForwardNetwork::compile(&g).unwrap();
        let out = net.activate(&[0.0]).unwrap();
        assert_relative_eq!(out[0], Activation::Sigmoid.apply(0.75));
    }

    #[test]
    fn disconnected_hidden_node_is_pruned() {
        let mut g = minimal(2, 1, 4);
        // Hidden node fed from input -1 but feeding nothing.
        g.nodes.insert(
            5,
            NodeGene {
                id: 5,
                kind: NodeKind::Hidden,
                bias: 3.0,
                response: 1.0,
                activation: Activation::Sigmoid,
                aggregation: Aggregation::Sum,
            },
        );
        g.connections.insert(
            50,
            ConnectionGene {
                innovation: 50,
                source: -1,
                target: 5,
                weight: 2.0,
                enabled: true,
            },
        );
        let with = FeedForwardNetwork::compile(&g).unwrap();
        g.nodes.remove(&5);
        g.connections.remove(&50);
        let without = FeedForwardNetwork::compile(&g).unwrap();
        for input in [[0.0, 0.0], [1.0, -1.0], [0.5, 2.0]] {
            assert_eq!(
                with.activate(&input).unwrap(),
                without.activate(&input).unwrap()
            );
        }
    }

    #[test]
    fn disabled_only_feed_yields_activation_of_bias() {
        let mut g = minimal(2, 1, 5);
        for c in g.connections.values_mut() {
            c.enabled = false;
        }
        g.nodes.get_mut(&0).unwrap().bias = -0.4;
        let net = FeedForwardNetwork::compile(&g).unwrap();
        let out = net.activate(&[3.0, -2.0]).unwrap();
        assert_relative_eq!(out[0], Activation::Sigmoid.apply(-0.4));
    }

    #[test]
    fn cycle_is_a_compile_error() {
        let mut g = minimal(1, 1, 6);
        for id in [5, 6] {
            g.nodes.insert(
                id,
                NodeGene {
                    id,
                    kind: NodeKind::Hidden,
                    bias: 0.0,
                    response: 1.0,
                    activation: Activation::Sigmoid,
                    aggregation: Aggregation::Sum,
                },
            );
        }
        for (innov, s, t) in [(10, 5, 6), (11, 6, 5), (12, 6, 0)] {
            g.connections.insert(
                innov,
                ConnectionGene {
                    innovation: innov,
                    source: s,
                    target: t,
                    weight: 1.0,
                    enabled: true,
                },
            );
        }
        match FeedForwardNetwork::compile(&g) {
            Err(Error::CycleDetected { nodes }) => {
                assert!(nodes.contains(&5) && nodes.contains(&6));
            }
            other => panic!("expected cycle error, got {other:?}"),
        }
    }

    #[test]
    fn arity_and_finite_checks() {
        let g = minimal(2, 1, 7);
        let net = FeedForwardNetwork::compile(&g).unwrap();
        assert!(net.activate(&[1.0]).is_err());
        assert!(net.activate(&[1.0, f64::NAN]).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn random_compiled(seed: u64) -> (Genome, FeedForwardNetwork) {
            let cfg = GenomeConfig::default();
            let mut registry = InnovationRegistry::new(2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut g = Genome::minimal(0, 4, 2, &mut registry, &mut rng, &cfg).unwrap();
            for _ in 0..30 {
                g.mutate(&mut registry, &mut rng, &cfg);
            }
            let net = FeedForwardNetwork::compile(&g).unwrap();
            (g, net)
        }

        proptest! {
            #[test]
            fn outputs_stay_in_unit_interval(
                seed in 0u64..300,
                a in -10.0f64..10.0, b in -10.0f64..10.0,
                c in -10.0f64..10.0, d in -10.0f64..10.0,
            ) {
                // Open interval mathematically; saturated aggregates round
                // to the exact bounds at double precision.
                let (_, net) = random_compiled(seed);
                let out = net.activate(&[a, b, c, d]).unwrap();
                for v in out {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
            }

            #[test]
            fn activation_is_deterministic(seed in 0u64..300) {
                let (_, net) = random_compiled(seed);
                let input = [0.1, -0.5, 3.0, 0.0];
                prop_assert_eq!(net.activate(&input).unwrap(), net.activate(&input).unwrap());
            }

            #[test]
            fn behavior_survives_serialization(seed in 0u64..300, x in -5.0f64..5.0) {
                let (g, net) = random_compiled(seed);
                let back = Genome::from_json(&g.to_json().unwrap()).unwrap();
                let net2 = FeedForwardNetwork::compile(&back).unwrap();
                let input = [x, -x, x * 0.5, 1.0];
                prop_assert_eq!(net.activate(&input).unwrap(), net2.activate(&input).unwrap());
            }
        }
    }
}
