//! Estimation and simulation of a potential-game model of directed network
//! formation.
//!
//! Households in a village derive utility from direct, mutual, and indirect
//! links, with payoffs that are linear in dyadic covariate transforms. The
//! stationary law of the implied link dynamics is a Gibbs measure whose
//! exponent is a network potential, which makes simulation (Gibbs scans over
//! entries) and Bayesian estimation (an exchange algorithm that cancels the
//! intractable normalizing constant) tractable.
//!
//! The crate is organized around the pipeline:
//!
//! - [`data`]: household covariates, village membership, synthetic data.
//! - [`features`]: dyadic regressor tensors per utility term.
//! - [`graph`]: directed village networks and their statistics.
//! - [`potential`]: the potential function and its O(degree) change statistic.
//! - [`gibbs`]: network simulation from the stationary Gibbs measure.
//! - [`exchange`]: adaptive exchange-algorithm MCMC over the parameters.
//! - [`logit`]: the dyadic logit baseline fit by maximum likelihood.
//! - [`counterfactual`]: covariate scenarios, equilibrium re-simulation, bands.
//! - [`config`] and [`pipeline`]: the batch surface behind the CLI.
//!
//! See the crate examples for runnable walkthroughs of each capability.

pub mod config;
pub mod counterfactual;
pub mod data;
pub mod dataset;
pub mod error;
pub mod exchange;
pub mod features;
pub mod gibbs;
pub mod graph;
pub mod logit;
pub mod pipeline;
pub mod potential;
pub mod rng;

pub use error::{Error, Result};
