//! Integrated bar cutting and precast beam production planning.
//!
//! The pipeline: read or generate an [`Instance`], enumerate its patterns into
//! a [`PatternSet`], compute the analytic [`lower_bound`], emit the integer
//! model with [`ilp`], or search for plans with the genetic algorithm in
//! [`ga`].

pub mod bound;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod ga;
pub mod generator;
pub mod ilp;
pub mod instance;
pub mod patterns;
pub mod reference;
pub mod units;

pub use bound::{candidate_ratios, lower_bound, BoundBreakdown, BoundSummary};
pub use error::{Error, Result};
pub use eval::{
    classify_infeasibility, decode_schedule, evaluate, exhaustive_optimum, fitness, Chromosome,
    Gene, InfeasibilityReport, Objective, Schedule, SearchCaps,
};
pub use experiment::{lbd, run_trials, snr, TrialDesign};
pub use ga::{run as run_ga, GaOutcome, GaParams};
pub use generator::{default_horizon, generate_instance};
pub use instance::{parse_instance, validate_instance, BeamType, Instance, Violation};
pub use patterns::{
    contains, enumerate_cutting_patterns, enumerate_overlapping_patterns,
    enumerate_packing_patterns, CuttingPattern, OverlappingPattern, PackingMode, PackingPattern,
    PatternId, PatternSet,
};
pub use units::Length;
