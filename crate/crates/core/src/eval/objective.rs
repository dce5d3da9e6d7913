use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::chromosome::Chromosome;
use crate::eval::schedule::{decode_schedule, Schedule};
use crate::instance::Instance;
use crate::patterns::{CutKind, PatternRef, PatternSet};
use crate::units::Length;

/// Unweighted objective components.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Objective {
    pub makespan: u32,
    /// Waste of new bars cut without producing leftovers.
    pub new_bar_waste: Length,
    /// Waste of new bars cut while producing leftovers.
    pub new_bar_leftover_waste: Length,
    /// Waste of leftover bars, cut or overlapped.
    pub leftover_waste: Length,
}

impl Objective {
    /// The four weighted terms; waste terms in meters.
    pub fn weighted_terms(&self, w: &[f64; 4]) -> [f64; 4] {
        [
            w[0] * f64::from(self.makespan),
            w[1] * self.new_bar_waste.cm() as f64 / 100.0,
            w[2] * self.new_bar_leftover_waste.cm() as f64 / 100.0,
            w[3] * self.leftover_waste.cm() as f64 / 100.0,
        ]
    }

    pub fn value(&self, w: &[f64; 4]) -> f64 {
        // one division keeps integer weights exact to the last centimeter
        (w[0] * f64::from(self.makespan) * 100.0
            + w[1] * self.new_bar_waste.cm() as f64
            + w[2] * self.new_bar_leftover_waste.cm() as f64
            + w[3] * self.leftover_waste.cm() as f64)
            / 100.0
    }
}

/// Aggregate quantities implied by gene frequencies, independent of order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    /// Beams produced, indexed `[type][length]`.
    pub beams: Vec<Vec<u64>>,
    /// Bars needed by packing uses, per mold class.
    pub bars_required: Vec<u64>,
    /// Bars produced by cutting and overlapping, per mold class.
    pub bars_produced: Vec<u64>,
    /// Stock consumed per bar kind.
    pub stock_used: Vec<u64>,
    pub new_bar_waste: Length,
    pub new_bar_leftover_waste: Length,
    pub leftover_waste: Length,
}

impl Tally {
    pub fn of(ch: &Chromosome, inst: &Instance, pats: &PatternSet) -> Result<Tally> {
        let mut t = Tally {
            beams: inst
                .beam_types
                .iter()
                .map(|b| vec![0; b.num_lengths()])
                .collect(),
            bars_required: vec![0; inst.num_classes()],
            bars_produced: vec![0; inst.num_classes()],
            stock_used: vec![0; inst.bar_lengths.len()],
            new_bar_waste: Length::ZERO,
            new_bar_leftover_waste: Length::ZERO,
            leftover_waste: Length::ZERO,
        };
        for g in &ch.genes {
            let n = u64::from(g.freq);
            match pats
                .get(g.pattern)
                .ok_or(Error::UnknownPattern(g.pattern))?
            {
                PatternRef::Packing(p) => {
                    for (k, &a) in p.counts.iter().enumerate() {
                        t.beams[p.beam_type][k] += u64::from(a) * n;
                    }
                    t.bars_required[p.mold_class] +=
                        u64::from(inst.beam_types[p.beam_type].bars_per_beam) * n;
                }
                PatternRef::Cutting(h) => {
                    for (c, &a) in h.item_counts.iter().enumerate() {
                        t.bars_produced[c] += u64::from(a) * n;
                    }
                    t.stock_used[h.source_bar] += n;
                    let w = h.waste * g.freq;
                    match h.kind(inst) {
                        CutKind::NewBar => t.new_bar_waste += w,
                        CutKind::NewBarWithLeftover(_) => t.new_bar_leftover_waste += w,
                        CutKind::LeftoverBar => t.leftover_waste += w,
                    }
                }
                PatternRef::Overlapping(o) => {
                    t.bars_produced[o.produced_class] += n;
                    for (v, &a) in o.leftover_counts.iter().enumerate() {
                        t.stock_used[inst.num_bar_kinds + v] += u64::from(a) * n;
                    }
                    t.leftover_waste += o.waste * g.freq;
                }
            }
        }
        Ok(t)
    }

    pub fn objective(&self, makespan: u32) -> Objective {
        Objective {
            makespan,
            new_bar_waste: self.new_bar_waste,
            new_bar_leftover_waste: self.new_bar_leftover_waste,
            leftover_waste: self.leftover_waste,
        }
    }

    pub fn report(&self, inst: &Instance) -> InfeasibilityReport {
        let mut r = InfeasibilityReport::default();
        for (c, b) in inst.beam_types.iter().enumerate() {
            for (k, &d) in b.demands.iter().enumerate() {
                r.missing_beams += u64::from(d).saturating_sub(self.beams[c][k]);
            }
        }
        for (w, &e) in inst.stock.iter().enumerate() {
            r.excess_bars += self.stock_used[w].saturating_sub(u64::from(e));
        }
        for (p, q) in self.bars_produced.iter().zip(&self.bars_required) {
            r.bar_imbalance += p.abs_diff(*q);
        }
        r.demand_short = r.missing_beams > 0;
        r.stock_exceeded = r.excess_bars > 0;
        r.bars_unbalanced = r.bar_imbalance > 0;
        r
    }
}

/// Which of the three infeasibility kinds a chromosome exhibits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct InfeasibilityReport {
    /// Some beam demand is not covered.
    pub demand_short: bool,
    /// Some bar stock is exceeded.
    pub stock_exceeded: bool,
    /// Bars produced differ from bars required for some mold class.
    pub bars_unbalanced: bool,
    pub missing_beams: u64,
    pub excess_bars: u64,
    pub bar_imbalance: u64,
}

impl InfeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        !(self.demand_short || self.stock_exceeded || self.bars_unbalanced)
    }
}

impl fmt::Display for InfeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.demand_short {
            parts.push(format!("{} beams short of demand", self.missing_beams));
        }
        if self.stock_exceeded {
            parts.push(format!("{} bars over stock", self.excess_bars));
        }
        if self.bars_unbalanced {
            parts.push(format!(
                "bars produced and required differ by {}",
                self.bar_imbalance
            ));
        }
        if parts.is_empty() {
            f.write_str("feasible")
        } else {
            f.write_str(&parts.join(", "))
        }
    }
}

pub fn classify_infeasibility(
    ch: &Chromosome,
    inst: &Instance,
    pats: &PatternSet,
) -> Result<InfeasibilityReport> {
    Ok(Tally::of(ch, inst, pats)?.report(inst))
}

/// A decoded feasible chromosome with its objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub schedule: Schedule,
    pub objective: Objective,
    pub value: f64,
}

pub fn evaluate(ch: &Chromosome, inst: &Instance, pats: &PatternSet) -> Result<Evaluation> {
    ch.check(pats)?;
    let tally = Tally::of(ch, inst, pats)?;
    let report = tally.report(inst);
    if !report.is_feasible() {
        return Err(Error::Infeasible(report));
    }
    let schedule = decode_schedule(ch, inst, pats)?;
    let objective = tally.objective(schedule.makespan);
    Ok(Evaluation {
        value: objective.value(&inst.weights),
        objective,
        schedule,
    })
}

/// Weighted objective of a feasible, schedulable chromosome.
pub fn fitness(ch: &Chromosome, inst: &Instance, pats: &PatternSet) -> Result<f64> {
    evaluate(ch, inst, pats).map(|e| e.value)
}
