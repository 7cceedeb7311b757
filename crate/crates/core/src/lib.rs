//! Training linear predictors of unknown optimization parameters by exact
//! coordinate descent on post-hoc regret.

pub mod adapter;
pub mod bench;
pub mod data;
pub mod error;
pub mod knapsack;
pub mod maxflow;
pub mod mcvc;
pub mod oracles;
pub mod piecewise;
pub mod predictor;
pub mod problem;
pub mod topology;

pub use error::{Error, Result};
