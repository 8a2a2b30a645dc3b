//! Identification geometry and expected-identification-value analysis for
//! choice experiments over lotteries.
//!
//! An experiment offers a subject a menu of lotteries and observes which
//! cell of a partition the choice fell into. For a linear-utility subject,
//! each observation identifies a union of polyhedral normal cones in
//! utility space. This crate computes those identifiable sets exactly,
//! estimates their prior mass (with an exact arc oracle on three outcomes),
//! scores randomized experiments by expected identification value under
//! pluggable indices, compiles multi-menu batteries, adaptive trees and
//! partially observed games down to static experiments, and property-tests
//! candidate valuation functionals against the rationality axioms that
//! characterize the expected-identification-value form.
//!
//! Start with the `examples/` directory: each example is a runnable tour of
//! one capability. The `eiv` binary exposes the same operations as
//! subcommands on JSON inputs.

pub mod axiomlab;
pub mod cli;
pub mod compiler;
pub mod config;
pub mod gen;
pub mod geometry;
pub mod identification;
pub mod lp;
pub mod prior;
pub mod valuation;

pub use compiler::{compile_adaptive, compile_batch, compile_game, realize_partition};
pub use config::EvalConfig;
pub use geometry::{argmax_set, mix_menus, ConeUnion, Lottery, Menu, PolyCone, UtilityDirection};
pub use identification::{identified_family, mu_equivalent, Experiment, RandomizedExperiment};
pub use prior::{MeasureEstimate, PriorModel};
pub use valuation::{eiv, eta, IdentificationIndex, ProbVector};
