//! Shared fixtures for the benchmarks.

use beamforge_core::ga::GaParams;
use beamforge_core::reference::cwp000;
use beamforge_core::{generate_instance, Instance, PatternSet};

/// The small worked instance with its patterns.
pub fn small() -> (Instance, PatternSet) {
    let inst = cwp000();
    let pats = PatternSet::enumerate(&inst);
    (inst, pats)
}

/// A generated instance with `types` beam types and `molds` molds.
pub fn generated(seed: u64, types: usize, molds: usize) -> (Instance, PatternSet) {
    let inst = generate_instance(seed, types, molds).expect("valid generator arguments");
    let pats = PatternSet::enumerate(&inst);
    (inst, pats)
}

/// Short GA settings so one iteration stays in the millisecond range.
pub fn short_params(pats: &PatternSet, seed: u64) -> GaParams {
    let mut p = GaParams::defaults(pats.num_packing(), seed);
    p.generations = 200;
    p.restart_patience = 40;
    p.construction_pool = 50;
    p
}
