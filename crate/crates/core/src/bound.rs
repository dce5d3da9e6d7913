//! Analytic lower bound on the optimal objective value.
//!
//! The bound has two parts: a makespan part from total curing-weighted beam
//! length over total mold capacity, and a waste part from the fewest bars a
//! single mold class would need times the cheapest waste per bar of that
//! class. The bound is stated for unit weights.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::patterns::{CutKind, PatternSet};
use crate::units::Length;

/// Which of the four candidate sets a ratio came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioSource {
    /// New bar cut without leftovers.
    NewBar,
    /// New bar cut producing a leftover.
    NewBarWithLeftover,
    /// Leftover bar cut.
    LeftoverBar,
    /// Overlapping two leftovers.
    Overlap,
}

/// Waste per produced bar, kept as an exact fraction `waste / items`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub waste: Length,
    pub items: u32,
    pub source: RatioSource,
}

impl Ratio {
    pub fn meters(&self) -> f64 {
        self.waste.cm() as f64 / (100.0 * f64::from(self.items))
    }

    fn less_than(&self, other: &Ratio) -> bool {
        i128::from(self.waste.cm()) * i128::from(other.items)
            < i128::from(other.waste.cm()) * i128::from(self.items)
    }
}

/// Waste-per-bar ratios of every pattern that produces bars of `class`.
pub fn candidate_ratios(inst: &Instance, pats: &PatternSet, class: usize) -> Result<Vec<Ratio>> {
    let mut out = Vec::new();
    for cut in &pats.cutting {
        let items = cut.item_counts.get(class).copied().unwrap_or(0);
        if items == 0 {
            continue;
        }
        let source = match cut.kind(inst) {
            CutKind::NewBar => RatioSource::NewBar,
            CutKind::NewBarWithLeftover(_) => RatioSource::NewBarWithLeftover,
            CutKind::LeftoverBar => RatioSource::LeftoverBar,
        };
        out.push(Ratio {
            waste: cut.waste,
            items,
            source,
        });
    }
    for ov in pats
        .overlapping
        .iter()
        .filter(|o| o.produced_class == class)
    {
        out.push(Ratio {
            waste: ov.waste,
            items: 1,
            source: RatioSource::Overlap,
        });
    }
    if out.is_empty() {
        Err(Error::EmptyRatios { class: class + 1 })
    } else {
        Ok(out)
    }
}

fn min_ratio(ratios: &[Ratio]) -> Ratio {
    let mut best = ratios[0];
    for r in &ratios[1..] {
        if r.less_than(&best) {
            best = *r;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassBound {
    /// One-based mold class.
    pub class: usize,
    pub bar_count_lb: u64,
    pub min_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundBreakdown {
    pub makespan_lb: u64,
    pub waste_lb: f64,
    pub total: f64,
    pub per_gamma: Vec<ClassBound>,
}

/// The three headline numbers, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSummary {
    pub makespan_lb: u64,
    pub waste_lb: f64,
    pub total: f64,
}

impl BoundBreakdown {
    pub fn summary(&self) -> BoundSummary {
        BoundSummary {
            makespan_lb: self.makespan_lb,
            waste_lb: self.waste_lb,
            total: self.total,
        }
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0 && a >= 0);
    (a + b - 1) / b
}

pub fn lower_bound(inst: &Instance, pats: &PatternSet) -> Result<BoundBreakdown> {
    let mold_total = inst.total_mold_length().cm();
    let makespan_lb = ceil_div(inst.curing_weighted_demand(), mold_total) as u64;

    let bar_demand = inst.bar_weighted_demand();
    let mut per_gamma = Vec::new();
    // best waste as an exact fraction num/den centimeters
    let mut best: Option<(i128, i128)> = None;
    let mut first_err = None;
    for (g, &len) in inst.distinct_mold_lengths().iter().enumerate() {
        let bars = ceil_div(bar_demand, len.cm()) as u64;
        let ratios = match candidate_ratios(inst, pats, g) {
            Ok(r) => r,
            Err(e) => {
                first_err.get_or_insert(e);
                continue;
            }
        };
        let r = min_ratio(&ratios);
        per_gamma.push(ClassBound {
            class: g + 1,
            bar_count_lb: bars,
            min_ratio: r.meters(),
        });
        let num = i128::from(bars) * i128::from(r.waste.cm());
        let den = i128::from(r.items);
        best = match best {
            Some((bn, bd)) if bn * den <= num * bd => Some((bn, bd)),
            _ => Some((num, den)),
        };
    }
    let (num, den) = match best {
        Some(b) => b,
        None if bar_demand == 0 => (0, 1),
        None => return Err(first_err.unwrap_or(Error::EmptyRatios { class: 1 })),
    };
    let waste_lb = num as f64 / (100 * den) as f64;
    let total = (i128::from(makespan_lb) * 100 * den + num) as f64 / (100 * den) as f64;
    Ok(BoundBreakdown {
        makespan_lb,
        waste_lb,
        total,
        per_gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::BeamType;
    use crate::patterns::{CuttingPattern, PatternId};
    use crate::reference::cwp000;

    fn m(x: f64) -> Length {
        Length::from_meters(x).unwrap()
    }

    /// Minimum of waste/items over the cwp000 pattern tables, computed by
    /// listing every (waste, items) pair independently of the enumerator.
    fn table_min_ratio(class: usize) -> f64 {
        // (source is new bar, waste, items of 5.95, items of 11.95)
        let cutting: [(f64, u32, u32); 10] = [
            (6.05, 1, 0),
            (4.05, 1, 0),
            (2.05, 1, 0),
            (0.05, 1, 0),
            (0.05, 1, 0),
            (2.05, 1, 0),
            (0.05, 1, 0),
            (1.05, 1, 0),
            (0.1, 2, 0),
            (0.05, 0, 1),
        ];
        let overlaps: [(usize, f64); 12] = [
            (0, 1.05),
            (0, 4.05),
            (0, 2.05),
            (0, 6.05),
            (0, 5.05),
            (0, 8.05),
            (0, 4.05),
            (0, 7.05),
            (0, 10.05),
            (1, 4.05),
            (1, 1.05),
            (1, 2.05),
        ];
        let mut best = f64::INFINITY;
        for (f, a0, a1) in cutting {
            let a = if class == 0 { a0 } else { a1 };
            if a > 0 {
                best = best.min(f / f64::from(a));
            }
        }
        for (g, f) in overlaps {
            if g == class {
                best = best.min(f);
            }
        }
        best
    }

    #[test]
    fn cwp000_min_ratios() {
        let inst = cwp000();
        let pats = PatternSet::enumerate(&inst);
        for g in 0..2 {
            let r = min_ratio(&candidate_ratios(&inst, &pats, g).unwrap());
            assert!((r.meters() - table_min_ratio(g)).abs() < 1e-12);
            assert!((r.meters() - 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn single_zero_waste_cut() {
        let inst = cwp000();
        let pats = PatternSet::from_parts(
            vec![],
            vec![CuttingPattern {
                id: PatternId(1),
                source_bar: 0,
                item_counts: vec![1, 0],
                leftover_counts: vec![0; 4],
                waste: Length::ZERO,
            }],
            vec![],
        );
        let r = candidate_ratios(&inst, &pats, 0).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].meters(), 0.0);
        assert!(matches!(
            candidate_ratios(&inst, &pats, 1),
            Err(Error::EmptyRatios { class: 2 })
        ));
    }

    #[test]
    fn cwp000_bound() {
        let inst = cwp000();
        let pats = PatternSet::enumerate(&inst);
        let b = lower_bound(&inst, &pats).unwrap();
        // 38.6 m of beams over 35.75 m of molds; 7 or 4 bars at 0.05 m each
        assert_eq!(b.makespan_lb, 2);
        assert_eq!(b.waste_lb, 0.2);
        assert_eq!(b.total, 2.2);
        assert_eq!(b.per_gamma[0].bar_count_lb, 7);
        assert_eq!(b.per_gamma[1].bar_count_lb, 4);
    }

    #[test]
    fn zero_demand_bound() {
        let mut inst = cwp000();
        inst.beam_types[0].demands = vec![0, 0];
        let b = lower_bound(&inst, &PatternSet::enumerate(&inst)).unwrap();
        assert_eq!((b.makespan_lb, b.waste_lb, b.total), (0, 0.0, 0.0));
    }

    #[test]
    fn zero_bars_per_beam() {
        let mut inst = cwp000();
        inst.beam_types[0].bars_per_beam = 0;
        let b = lower_bound(&inst, &PatternSet::enumerate(&inst)).unwrap();
        assert_eq!(b.waste_lb, 0.0);
        assert_eq!(b.total, b.makespan_lb as f64);
    }

    #[test]
    fn monotone_in_demand() {
        let base = Instance::new(
            2,
            vec![BeamType {
                lengths: vec![m(1.45), m(2.95)],
                demands: vec![3, 4],
                curing_time: 2,
                bars_per_beam: 2,
            }],
            vec![m(5.95), m(11.95)],
            vec![m(12.0), m(2.0), m(6.0)],
            1,
            vec![50, 20, 20],
            m(0.3),
            [1.0; 4],
        );
        let pats = PatternSet::enumerate(&base);
        let mut prev = lower_bound(&base, &pats).unwrap().total;
        let mut inst = base.clone();
        for step in 0..30 {
            inst.beam_types[0].demands[step % 2] += 1;
            let now = lower_bound(&inst, &pats).unwrap().total;
            assert!(now >= prev);
            prev = now;
        }
    }
}
