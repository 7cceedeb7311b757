//! Which correction and penalty to use, and building one adapter per
//! instance of a dataset.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adapter::Adapter;
use crate::data::{Instance, ProblemSpec};
use crate::error::{Error, Result};
use crate::knapsack::{KnapsackAdapter, KnapsackCorrection, KnapsackInstance, KnapsackPenalty};
use crate::maxflow::{FlowCorrection, MaxFlowAdapter};
use crate::mcvc::McvcAdapter;

/// Correction function letter; its meaning depends on the problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Correction {
    A,
    B,
    C,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PenaltyKind {
    None,
    I,
    II,
}

impl FromStr for Correction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Correction::A),
            "B" | "b" => Ok(Correction::B),
            "C" | "c" => Ok(Correction::C),
            _ => Err(Error::InvalidArgument(format!("unknown correction `{s}`"))),
        }
    }
}

impl FromStr for PenaltyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(PenaltyKind::None),
            "I" | "i" | "1" => Ok(PenaltyKind::I),
            "II" | "ii" | "2" => Ok(PenaltyKind::II),
            _ => Err(Error::InvalidArgument(format!("unknown penalty `{s}`"))),
        }
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl fmt::Display for PenaltyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", match self {
            PenaltyKind::None => "none",
            PenaltyKind::I => "I",
            PenaltyKind::II => "II",
        })
    }
}

/// Correction plus penalty with its constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scoring {
    pub correction: Correction,
    pub penalty: PenaltyKind,
    /// Per wasted path (max-flow) or per removed item (knapsack).
    pub k: f64,
    /// Knapsack penalty I fraction, applied to every item.
    pub sigma: f64,
}

impl Default for Scoring {
    fn default() -> Self {
        Scoring {
            correction: Correction::A,
            penalty: PenaltyKind::None,
            k: 500.0,
            sigma: 0.1,
        }
    }
}

impl Scoring {
    pub fn new(correction: Correction, penalty: PenaltyKind) -> Self {
        Scoring { correction, penalty, ..Default::default() }
    }

    /// Rejects combinations a problem does not define.
    pub fn validate(&self, problem: &ProblemSpec) -> Result<()> {
        if !(self.k >= 0.0) || !(self.sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "penalty constants must be nonnegative (K = {}, sigma = {})",
                self.k, self.sigma
            )));
        }
        let ok = match problem {
            ProblemSpec::Maxflow { .. } => matches!(
                (self.correction, self.penalty),
                (Correction::A, PenaltyKind::None) | (Correction::B, PenaltyKind::None | PenaltyKind::I)
            ),
            ProblemSpec::Knapsack { .. } => true,
            ProblemSpec::Mcvc { .. } => (self.correction, self.penalty) == (Correction::A, PenaltyKind::None),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "{} does not define correction {} with penalty {}",
                problem.name(),
                self.correction,
                self.penalty
            )))
        }
    }

    /// The adapter for one instance.
    pub fn adapter(&self, problem: &ProblemSpec, inst: &Instance) -> Result<Box<dyn Adapter>> {
        self.validate(problem)?;
        Ok(match problem {
            ProblemSpec::Maxflow { network } => {
                let correction = match self.correction {
                    Correction::A => FlowCorrection::Scale,
                    _ => FlowCorrection::Reaugment {
                        k: (self.penalty == PenaltyKind::I).then_some(self.k),
                    },
                };
                Box::new(MaxFlowAdapter::new(network.clone(), correction)?)
            }
            ProblemSpec::Knapsack { n_items, capacity, values } => {
                let values = inst.values.as_ref().or(values.as_ref()).ok_or_else(|| {
                    Error::InvalidKnapsack("no item values in the instance or the problem".into())
                })?;
                let ki = KnapsackInstance::new(values.clone(), *capacity)?;
                if ki.n_items() != *n_items {
                    return Err(Error::Dimension(format!("{} values for {n_items} items", ki.n_items())));
                }
                let correction = match self.correction {
                    Correction::A => KnapsackCorrection::RatioAsc,
                    Correction::B => KnapsackCorrection::WeightDesc,
                    Correction::C => KnapsackCorrection::RemoveAll,
                };
                let penalty = match self.penalty {
                    PenaltyKind::None => None,
                    PenaltyKind::I => Some(KnapsackPenalty::Proportional(vec![self.sigma; *n_items])),
                    PenaltyKind::II => Some(KnapsackPenalty::PerItem(self.k)),
                };
                Box::new(KnapsackAdapter::new(ki, correction, penalty)?)
            }
            ProblemSpec::Mcvc { graph } => Box::new(McvcAdapter::new(graph.clone())),
        })
    }

    /// Adapters for every instance, with the failing index attached on error.
    pub fn adapters(&self, problem: &ProblemSpec, instances: &[Instance]) -> Result<Vec<Box<dyn Adapter>>> {
        instances
            .iter()
            .enumerate()
            .map(|(i, inst)| self.adapter(problem, inst).map_err(|e| e.at_instance(i)))
            .collect()
    }

    /// Whether losses are exactly piecewise linear (no grid materialisation).
    pub fn is_exact(&self, problem: &ProblemSpec) -> bool {
        !matches!((problem, self.correction), (ProblemSpec::Maxflow { .. }, Correction::A))
    }
}
