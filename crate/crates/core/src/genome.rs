//! Evolvable network genomes.
//!
//! A genome is a set of node genes plus connection genes keyed by innovation
//! number. Input pins use negative node ids (-1, -2, ...), output nodes
//! occupy 0..num_outputs and hidden nodes are assigned increasing ids by the
//! shared [`InnovationRegistry`], which guarantees that identical structural
//! mutations on different genomes receive identical innovation numbers.
//!
//! All collections are ordered maps so that a given seed always replays to a
//! byte-identical genome.

use crate::activation::{Activation, Aggregation};
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub type GenomeId = u64;
/// Node identifier: inputs are -1..-num_inputs, outputs 0..num_outputs,
/// hidden nodes count upward from num_outputs.
pub type NodeId = i64;
pub type Innovation = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Input,
    Output,
    Hidden,
}

/// A node gene. Input nodes are pass-through pins: their bias, response,
/// activation and aggregation are never applied and never mutated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeGene {
    pub id: NodeId,
    pub kind: NodeKind,
    pub bias: f64,
    pub response: f64,
    pub activation: Activation,
    pub aggregation: Aggregation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionGene {
    pub innovation: Innovation,
    pub source: NodeId,
    pub target: NodeId,
    pub weight: f64,
    pub enabled: bool,
}

/// Parameters for genome initialization and mutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenomeConfig {
    /// Reject structural mutations that would create a cycle.
    pub feed_forward: bool,

    pub weight_init_mean: f64,
    pub weight_init_stdev: f64,
    pub weight_min: f64,
    pub weight_max: f64,
    pub weight_mutate_rate: f64,
    pub weight_mutate_power: f64,
    pub weight_replace_rate: f64,

    pub bias_init_mean: f64,
    pub bias_init_stdev: f64,
    pub bias_min: f64,
    pub bias_max: f64,
    pub bias_mutate_rate: f64,
    pub bias_mutate_power: f64,
    pub bias_replace_rate: f64,

    /// Fixed response multiplier for new nodes (not mutated).
    pub response_init: f64,

    /// Per-genome per-generation probability of inserting a node.
    pub node_add_prob: f64,
    /// Per-genome per-generation probability of adding a connection.
    pub conn_add_prob: f64,
    /// Per-connection probability of flipping the enabled flag.
    pub enabled_mutate_rate: f64,
    /// Probability that a homologous gene disabled in exactly one parent is
    /// disabled in the offspring.
    pub crossover_disable_prob: f64,

    pub activation_default: Activation,
    pub aggregation_default: Aggregation,
}

impl Default for GenomeConfig {
    fn default() -> Self {
        GenomeConfig {
            feed_forward: true,
            weight_init_mean: 0.0,
            weight_init_stdev: 1.0,
            weight_min: -30.0,
            weight_max: 30.0,
            weight_mutate_rate: 0.8,
            weight_mutate_power: 0.5,
            weight_replace_rate: 0.1,
            bias_init_mean: 0.0,
            bias_init_stdev: 1.0,
            bias_min: -30.0,
            bias_max: 30.0,
            bias_mutate_rate: 0.7,
            bias_mutate_power: 0.5,
            bias_replace_rate: 0.1,
            response_init: 1.0,
            node_add_prob: 0.2,
            conn_add_prob: 0.5,
            enabled_mutate_rate: 0.01,
            crossover_disable_prob: 0.75,
            activation_default: Activation::Sigmoid,
            aggregation_default: Aggregation::Sum,
        }
    }
}

impl GenomeConfig {
    fn sample_weight<R: Rng>(&self, rng: &mut R) -> f64 {
        let dist = Normal::new(self.weight_init_mean, self.weight_init_stdev)
            .expect("weight init stdev must be non-negative");
        dist.sample(rng).clamp(self.weight_min, self.weight_max)
    }

    fn sample_bias<R: Rng>(&self, rng: &mut R) -> f64 {
        let dist = Normal::new(self.bias_init_mean, self.bias_init_stdev)
            .expect("bias init stdev must be non-negative");
        dist.sample(rng).clamp(self.bias_min, self.bias_max)
    }
}

/// Shared bookkeeping that makes crossover well-defined: every structural
/// addition (a new connection between a node pair, or a node splitting a
/// connection) maps to one global innovation/node id, so the same mutation
/// applied to any genome yields the same keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnovationRegistry {
    next_innovation: Innovation,
    next_node_id: NodeId,
    #[serde(with = "pair_key_map")]
    connections: BTreeMap<(NodeId, NodeId), Innovation>,
    #[serde(with = "pair_key_map")]
    split_nodes: BTreeMap<(NodeId, NodeId), NodeId>,
}

impl InnovationRegistry {
    pub fn new(num_outputs: usize) -> Self {
        InnovationRegistry {
            next_innovation: 0,
            next_node_id: num_outputs as NodeId,
            connections: BTreeMap::new(),
            split_nodes: BTreeMap::new(),
        }
    }

    /// Innovation number for a connection source → target, allocating one on
    /// first sight of the pair.
    pub fn connection_innovation(&mut self, source: NodeId, target: NodeId) -> Innovation {
        if let Some(&innov) = self.connections.get(&(source, target)) {
            return innov;
        }
        let innov = self.next_innovation;
        self.next_innovation += 1;
        self.connections.insert((source, target), innov);
        innov
    }

    /// Node id assigned to a split of the connection source → target.
    pub fn node_for_split(&mut self, source: NodeId, target: NodeId) -> NodeId {
        if let Some(&id) = self.split_nodes.get(&(source, target)) {
            return id;
        }
        let id = self.next_node_id;
        self.next_node_id += 1;
        self.split_nodes.insert((source, target), id);
        id
    }

    /// Unconditionally fresh node id, used when a genome splits the same
    /// connection a second time and the recorded id already exists in it.
    pub fn fresh_node_id(&mut self) -> NodeId {
        let id = self.next_node_id;
        self.next_node_id += 1;
        id
    }
}

/// JSON-friendly serialization for maps keyed by node-id pairs.
mod pair_key_map {
    use super::NodeId;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S, V>(
        map: &BTreeMap<(NodeId, NodeId), V>,
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error>
    where
        S: Serializer,
        V: Serialize + Copy,
    {
        let entries: Vec<(NodeId, NodeId, V)> =
            map.iter().map(|(&(a, b), &v)| (a, b, v)).collect();
        entries.serialize(ser)
    }

    pub fn deserialize<'de, D, V>(
        de: D,
    ) -> std::result::Result<BTreeMap<(NodeId, NodeId), V>, D::Error>
    where
        D: Deserializer<'de>,
        V: Deserialize<'de>,
    {
        let entries = Vec::<(NodeId, NodeId, V)>::deserialize(de)?;
        Ok(entries.into_iter().map(|(a, b, v)| ((a, b), v)).collect())
    }
}

const GENOME_FILE_VERSION: u32 = 1;

/// On-disk genome record: the serialization format used by checkpoints and
/// the replay command.
#[derive(Debug, Serialize, Deserialize)]
struct GenomeFile {
    version: u32,
    genome: Genome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub id: GenomeId,
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub nodes: BTreeMap<NodeId, NodeGene>,
    pub connections: BTreeMap<Innovation, ConnectionGene>,
    /// Unset until the genome has been evaluated.
    pub fitness: Option<f64>,
}

impl Genome {
    /// Minimal genome: inputs and outputs only, fully connected input →
    /// output with weights drawn from the configured initial distribution.
    pub fn minimal<R: Rng>(
        id: GenomeId,
        num_inputs: usize,
        num_outputs: usize,
        registry: &mut InnovationRegistry,
        rng: &mut R,
        cfg: &GenomeConfig,
    ) -> Result<Genome> {
        if num_inputs == 0 || num_outputs == 0 {
            return Err(Error::InvalidDimensions {
                inputs: num_inputs,
                outputs: num_outputs,
            });
        }
        let mut nodes = BTreeMap::new();
        for i in 0..num_inputs {
            let nid = -(i as NodeId) - 1;
            nodes.insert(
                nid,
                NodeGene {
                    id: nid,
                    kind: NodeKind::Input,
                    bias: 0.0,
                    response: 1.0,
                    activation: cfg.activation_default,
                    aggregation: cfg.aggregation_default,
                },
            );
        }
        for o in 0..num_outputs {
            let nid = o as NodeId;
            nodes.insert(
                nid,
                NodeGene {
                    id: nid,
                    kind: NodeKind::Output,
                    bias: cfg.sample_bias(rng),
                    response: cfg.response_init,
                    activation: cfg.activation_default,
                    aggregation: cfg.aggregation_default,
                },
            );
        }
        let mut connections = BTreeMap::new();
        for i in 0..num_inputs {
            let source = -(i as NodeId) - 1;
            for o in 0..num_outputs {
                let target = o as NodeId;
                let innovation = registry.connection_innovation(source, target);
                connections.insert(
                    innovation,
                    ConnectionGene {
                        innovation,
                        source,
                        target,
                        weight: cfg.sample_weight(rng),
                        enabled: true,
                    },
                );
            }
        }
        Ok(Genome {
            id,
            num_inputs,
            num_outputs,
            nodes,
            connections,
            fitness: None,
        })
    }

    pub fn input_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.num_inputs).map(|i| -(i as NodeId) - 1)
    }

    pub fn output_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.num_outputs).map(|o| o as NodeId)
    }

    pub fn has_connection(&self, source: NodeId, target: NodeId) -> bool {
        self.connections
            .values()
            .any(|c| c.source == source && c.target == target)
    }

    /// Would adding source → target close a directed cycle? Checked against
    /// all connections (enabled or not) so a later enable-toggle can never
    /// break acyclicity.
    pub fn would_create_cycle(&self, source: NodeId, target: NodeId) -> bool {
        if source == target {
            return true;
        }
        // DFS from `target`: a cycle forms iff `source` is reachable.
        let mut stack = vec![target];
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            for c in self.connections.values() {
                if c.source == n {
                    if c.target == source {
                        return true;
                    }
                    stack.push(c.target);
                }
            }
        }
        false
    }

    /// Insert a new node by splitting a random enabled connection: the old
    /// gene is disabled, the incoming replacement gets weight 1.0 and the
    /// outgoing one inherits the old weight. No-op when nothing is enabled.
    pub fn mutate_add_node<R: Rng>(
        &mut self,
        registry: &mut InnovationRegistry,
        rng: &mut R,
        cfg: &GenomeConfig,
    ) {
        let enabled: Vec<Innovation> = self
            .connections
            .values()
            .filter(|c| c.enabled)
            .map(|c| c.innovation)
            .collect();
        if enabled.is_empty() {
            return;
        }
        let pick = enabled[rng.random_range(0..enabled.len())];
        let (source, target, old_weight) = {
            let c = self.connections.get_mut(&pick).expect("picked gene exists");
            c.enabled = false;
            (c.source, c.target, c.weight)
        };
        let mut node_id = registry.node_for_split(source, target);
        if self.nodes.contains_key(&node_id) {
            // This genome already split the pair once; take a fresh id.
            node_id = registry.fresh_node_id();
        }
        self.nodes.insert(
            node_id,
            NodeGene {
                id: node_id,
                kind: NodeKind::Hidden,
                bias: cfg.sample_bias(rng),
                response: cfg.response_init,
                activation: cfg.activation_default,
                aggregation: cfg.aggregation_default,
            },
        );
        for (s, t, w) in [(source, node_id, 1.0), (node_id, target, old_weight)] {
            let innovation = registry.connection_innovation(s, t);
            self.connections.insert(
                innovation,
                ConnectionGene {
                    innovation,
                    source: s,
                    target: t,
                    weight: w,
                    enabled: true,
                },
            );
        }
    }

    /// Add one connection between a uniformly chosen legal pair: not already
    /// present, target not an input, not output → output, and acyclic in
    /// feed-forward mode. No-op when no legal pair exists.
    pub fn mutate_add_connection<R: Rng>(
        &mut self,
        registry: &mut InnovationRegistry,
        rng: &mut R,
        cfg: &GenomeConfig,
    ) {
        let sources: Vec<NodeId> = self.nodes.keys().copied().collect();
        let targets: Vec<NodeId> = self
            .nodes
            .values()
            .filter(|n| n.kind != NodeKind::Input)
            .map(|n| n.id)
            .collect();
        let mut candidates = Vec::new();
        for &s in &sources {
            let s_is_output = self.nodes[&s].kind == NodeKind::Output;
            for &t in &targets {
                if s == t || self.has_connection(s, t) {
                    continue;
                }
                if s_is_output && self.nodes[&t].kind == NodeKind::Output {
                    continue;
                }
                if cfg.feed_forward && self.would_create_cycle(s, t) {
                    continue;
                }
                candidates.push((s, t));
            }
        }
        if candidates.is_empty() {
            return;
        }
        let (source, target) = candidates[rng.random_range(0..candidates.len())];
        let innovation = registry.connection_innovation(source, target);
        self.connections.insert(
            innovation,
            ConnectionGene {
                innovation,
                source,
                target,
                weight: cfg.sample_weight(rng),
                enabled: true,
            },
        );
    }

    /// Apply one round of mutation: possible node/connection insertion, then
    /// per-gene weight, bias and enabled-flag mutation.
    pub fn mutate<R: Rng>(
        &mut self,
        registry: &mut InnovationRegistry,
        rng: &mut R,
        cfg: &GenomeConfig,
    ) {
        if rng.random::<f64>() < cfg.node_add_prob {
            self.mutate_add_node(registry, rng, cfg);
        }
        if rng.random::<f64>() < cfg.conn_add_prob {
            self.mutate_add_connection(registry, rng, cfg);
        }
        for conn in self.connections.values_mut() {
            let r = rng.random::<f64>();
            if r < cfg.weight_mutate_rate {
                let dist = Normal::new(0.0, cfg.weight_mutate_power)
                    .expect("mutate power must be non-negative");
                conn.weight =
                    (conn.weight + dist.sample(rng)).clamp(cfg.weight_min, cfg.weight_max);
            } else if r < cfg.weight_mutate_rate + cfg.weight_replace_rate {
                conn.weight = cfg.sample_weight(rng);
            }
            if rng.random::<f64>() < cfg.enabled_mutate_rate {
                conn.enabled = !conn.enabled;
            }
        }
        for node in self.nodes.values_mut() {
            if node.kind == NodeKind::Input {
                continue;
            }
            let r = rng.random::<f64>();
            if r < cfg.bias_mutate_rate {
                let dist = Normal::new(0.0, cfg.bias_mutate_power)
                    .expect("mutate power must be non-negative");
                node.bias = (node.bias + dist.sample(rng)).clamp(cfg.bias_min, cfg.bias_max);
            } else if r < cfg.bias_mutate_rate + cfg.bias_replace_rate {
                node.bias = cfg.sample_bias(rng);
            }
        }
    }

    /// Recombine two parents. The offspring inherits the fitter parent's
    /// gene set; homologous genes take each attribute uniformly at random
    /// from either parent, and a gene disabled in exactly one parent is
    /// disabled with `crossover_disable_prob`.
    pub fn crossover<R: Rng>(
        fitter: &Genome,
        other: &Genome,
        child_id: GenomeId,
        rng: &mut R,
        cfg: &GenomeConfig,
    ) -> Result<Genome> {
        if fitter.num_inputs != other.num_inputs || fitter.num_outputs != other.num_outputs {
            return Err(Error::ArityMismatch {
                expected: fitter.num_inputs,
                got: other.num_inputs,
                context: "crossover parents".into(),
            });
        }
        let mut nodes = BTreeMap::new();
        for (&nid, a) in &fitter.nodes {
            let gene = match other.nodes.get(&nid) {
                Some(b) if a.kind != NodeKind::Input => NodeGene {
                    id: nid,
                    kind: a.kind,
                    bias: if rng.random::<bool>() { a.bias } else { b.bias },
                    response: if rng.random::<bool>() { a.response } else { b.response },
                    activation: if rng.random::<bool>() { a.activation } else { b.activation },
                    aggregation: if rng.random::<bool>() { a.aggregation } else { b.aggregation },
                },
                _ => a.clone(),
            };
            nodes.insert(nid, gene);
        }
        let mut connections = BTreeMap::new();
        for (&innov, a) in &fitter.connections {
            let gene = match other.connections.get(&innov) {
                Some(b) => {
                    let enabled = if a.enabled == b.enabled {
                        a.enabled
                    } else {
                        rng.random::<f64>() >= cfg.crossover_disable_prob
                    };
                    ConnectionGene {
                        innovation: innov,
                        source: a.source,
                        target: a.target,
                        weight: if rng.random::<bool>() { a.weight } else { b.weight },
                        enabled,
                    }
                }
                None => a.clone(),
            };
            connections.insert(innov, gene);
        }
        Ok(Genome {
            id: child_id,
            num_inputs: fitter.num_inputs,
            num_outputs: fitter.num_outputs,
            nodes,
            connections,
            fitness: None,
        })
    }

    /// Compatibility distance: node distance plus connection distance, each
    /// normalized by the larger genome's gene count. Input pins are excluded
    /// (they are identical across all genomes by construction).
    pub fn distance(&self, other: &Genome, disjoint_coeff: f64, weight_coeff: f64) -> f64 {
        let node_term = {
            let a: BTreeMap<NodeId, &NodeGene> = self
                .nodes
                .iter()
                .filter(|(_, n)| n.kind != NodeKind::Input)
                .map(|(&k, n)| (k, n))
                .collect();
            let b: BTreeMap<NodeId, &NodeGene> = other
                .nodes
                .iter()
                .filter(|(_, n)| n.kind != NodeKind::Input)
                .map(|(&k, n)| (k, n))
                .collect();
            let mut attr = 0.0;
            let mut disjoint = 0usize;
            for (k, na) in &a {
                match b.get(k) {
                    Some(nb) => {
                        let mut d = (na.bias - nb.bias).abs() + (na.response - nb.response).abs();
                        if na.activation != nb.activation {
                            d += 1.0;
                        }
                        if na.aggregation != nb.aggregation {
                            d += 1.0;
                        }
                        attr += d;
                    }
                    None => disjoint += 1,
                }
            }
            disjoint += b.keys().filter(|k| !a.contains_key(k)).count();
            normalized_term(attr, disjoint, a.len(), b.len(), disjoint_coeff, weight_coeff)
        };
        let conn_term = {
            let mut attr = 0.0;
            let mut disjoint = 0usize;
            for (k, ca) in &self.connections {
                match other.connections.get(k) {
                    Some(cb) => {
                        let mut d = (ca.weight - cb.weight).abs();
                        if ca.enabled != cb.enabled {
                            d += 1.0;
                        }
                        attr += d;
                    }
                    None => disjoint += 1,
                }
            }
            disjoint += other
                .connections
                .keys()
                .filter(|k| !self.connections.contains_key(*k))
                .count();
            normalized_term(
                attr,
                disjoint,
                self.connections.len(),
                other.connections.len(),
                disjoint_coeff,
                weight_coeff,
            )
        };
        node_term + conn_term
    }

    /// Serialize to the versioned genome record.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&GenomeFile {
            version: GENOME_FILE_VERSION,
            genome: self.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Genome> {
        let file: GenomeFile = serde_json::from_str(text)?;
        if file.version != GENOME_FILE_VERSION {
            return Err(Error::UnsupportedVersion {
                kind: "genome",
                found: file.version,
                expected: GENOME_FILE_VERSION,
            });
        }
        Ok(file.genome)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Genome> {
        Genome::from_json(&std::fs::read_to_string(path)?)
    }
}

fn normalized_term(
    attr_sum: f64,
    disjoint: usize,
    len_a: usize,
    len_b: usize,
    disjoint_coeff: f64,
    weight_coeff: f64,
) -> f64 {
    let max_len = len_a.max(len_b);
    if max_len == 0 {
        return 0.0;
    }
    (weight_coeff * attr_sum + disjoint_coeff * disjoint as f64) / max_len as f64
}
