//! Chromosome encoding, decoding, objective and feasibility checks.

mod chromosome;
mod objective;
mod oracle;
mod schedule;

pub use chromosome::{Chromosome, Gene};
pub use objective::{
    classify_infeasibility, evaluate, fitness, Evaluation, InfeasibilityReport, Objective, Tally,
};
pub use oracle::{exhaustive_optimum, SearchCaps};
pub use schedule::{decode_schedule, decoded_makespan, Placement, Schedule};
