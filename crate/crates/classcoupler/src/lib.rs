//! Exact posterior sampling for Bayesian point-null tests on normal data.
//!
//! An independence Metropolis-Hastings chain whose proposal matches the
//! prior can be run *backward*: regenerate the candidate and acceptance
//! uniform for each past step from a counter-based random stream, find a
//! step where every possible path provably accepts the same candidate, and
//! replay forward to time zero. The result is a draw exactly from the
//! stationary distribution, with no burn-in and no convergence diagnostics;
//! the price is a random amount of work (the backward coupling time).
//!
//! Two engines implement this:
//!
//! * [`imh::imh_backward_sample`] covers plain independence chains where a
//!   single "lowest" state certifies acceptance for everyone.
//! * [`coupler`] covers targets that mix a null class (a point or a curve of
//!   states satisfying a sharp null hypothesis) with an unrestricted class.
//!   Candidates depend on the current state only through its class, so two
//!   cached per-class acceptance-ratio minima certify whole-class moves.
//!
//! [`models`] supplies the concrete targets: one-sample and two-sample
//! normal-mean tests with spike-and-slab priors, where the per-class minima
//! sit at maximum-likelihood plug-ins. [`estimator`] aggregates independent
//! draws into posterior-probability estimates with confidence intervals,
//! and [`driver`] runs draws in parallel with per-draw seeds so results
//! never depend on the worker count.

pub mod config;
pub mod coupler;
pub mod distributions;
pub mod driver;
pub mod error;
pub mod estimator;
pub mod imh;
pub mod models;
pub mod quad;
pub mod state;
pub mod store;
pub mod stream;

pub use coupler::{
    accept, advance_from, couple_single_atom, couple_two_class, forward_run, verify_singleton_null,
    CouplerModel, ForwardOutcome, TwoStageState,
};
pub use error::{Error, Result};
pub use imh::{
    imh_backward_sample, BackwardSchedule, CouplingResult, ImhTarget, WeightedDiscreteTarget,
};
pub use models::{SingleMeanKnownVariance, SingleMeanModel, TwoSampleModel, VarianceCase};
pub use state::{ClassId, MeanCoord, MixedState, VarCoord};
pub use store::{DeviateRecord, DeviateStore};
pub use stream::{derive_draw_seed, ReplayStream, TimeIndex};
