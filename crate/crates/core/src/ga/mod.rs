//! Steady-state genetic algorithm over pattern-frequency chromosomes.

mod construct;
mod operators;
mod params;
mod repair;
mod solver;

pub use construct::random_solution;
pub use operators::{
    crossover1, crossover1_raw, crossover2, crossover2_raw, insert_move, local_search_insert,
    mutate, swap_gene,
};
pub use params::{CrossoverKind, GaParams};
pub use repair::{
    fix_balance, fix_demand, fix_once, fix_stock, is_admissible, repair, trim_surplus,
};
pub use solver::{init_population, run, GaOutcome, Member, Population, TracePoint};
