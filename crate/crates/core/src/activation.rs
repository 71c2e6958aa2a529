//! Node activation and aggregation functions.
//!
//! The default controller activation is a steepened sigmoid: the aggregate
//! is scaled by 5 and clamped to [-60, 60] before the logistic is applied,
//! so outputs always lie strictly inside (0, 1).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Sigmoid,
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => {
                let z = (5.0 * x).clamp(-60.0, 60.0);
                1.0 / (1.0 + (-z).exp())
            }
            Activation::Tanh => (2.5 * x).clamp(-60.0, 60.0).tanh(),
            Activation::Identity => x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Sum,
    Product,
}

impl Aggregation {
    pub fn apply(self, terms: impl Iterator<Item = f64>) -> f64 {
        match self {
            Aggregation::Sum => terms.sum(),
            Aggregation::Product => terms.product(),
        }
    }
}
