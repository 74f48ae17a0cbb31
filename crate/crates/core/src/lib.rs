//! Dynamic approximate maximum independent set of fat geometric objects.
//!
//! The library maintains a constant-factor approximation of the maximum
//! independent set of axis-aligned squares, hypercubes (up to dimension 4),
//! or disks under insertions and deletions. [`AmortizedMis`] rebuilds its
//! answer periodically and is simple and fast on average; [`DeamState`]
//! spreads that work so every single update touches a bounded number of
//! objects and performs a bounded amount of work. Both report each update's
//! effect as an explicit set of added and removed objects.
//!
//! Supporting pieces: [`Arqs`] (the marking/range structure), [`Disqs`] (the
//! greedy query structure), [`mixer`] (separator-driven schedules that morph
//! one independent set into another one object at a time), [`oracle`] (exact
//! and greedy references for testing), and [`workload`]/[`runner`] (seeded
//! benchmark streams, metric reports, and trace verification).

pub mod amortized;
pub mod arqs;
pub mod deamortized;
pub mod disqs;
pub mod error;
pub mod geometry;
pub mod mixer;
pub mod oracle;
pub mod runner;
pub mod update;
pub mod workload;

pub use amortized::AmortizedMis;
pub use arqs::Arqs;
pub use deamortized::{budget_params, BudgetParams, DeamState, RoundStats, WorkCalibration};
pub use disqs::Disqs;
pub use error::{Error, Result};
pub use geometry::{
    object_order, CubeRelation, EnclosingCube, FatObject, OrderKey, Point, Shape, ShapeClass,
};
pub use mixer::{find_separator, MixOp, MixState, MixStep, SeparatorResult};
pub use oracle::{exact_mis, offline_greedy, opt_trajectory, Instance, EXACT_MIS_MAX};
pub use runner::{run, verify_trace, RunReport, RunSummary, StructureKind, TraceSummary};
pub use update::{Update, UpdateSet};
pub use workload::{generate, hashtag_grid, Pattern, Workload};
