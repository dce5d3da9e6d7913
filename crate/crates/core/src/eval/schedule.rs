//! Turning gene frequencies into a mold-by-period timetable.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::chromosome::Chromosome;
use crate::instance::Instance;
use crate::patterns::{PatternId, PatternSet};

/// One use of a packing pattern in a mold. `start` is a one-based period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Placement {
    pub pattern: PatternId,
    pub start: u32,
    pub duration: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// Placements per mold in start order.
    pub molds: Vec<Vec<Placement>>,
    /// Periods each mold is occupied, always a prefix `1..=load`.
    pub loads: Vec<u32>,
    pub makespan: u32,
    /// `used_periods[t]` for period `t + 1`.
    pub used_periods: Vec<bool>,
    /// Bars required per mold class by the placed uses.
    pub bar_requirements: Vec<u64>,
}

/// Assigns each use of each packing gene, in gene order, to the least loaded
/// mold of the pattern's class, lowest index on ties. Non-packing genes are
/// ignored.
pub fn decode_schedule(ch: &Chromosome, inst: &Instance, pats: &PatternSet) -> Result<Schedule> {
    let m = inst.num_molds();
    let mut molds = vec![Vec::new(); m];
    let mut loads = vec![0u32; m];
    let mut bar_requirements = vec![0u64; inst.num_classes()];
    for g in &ch.genes {
        if pats.get(g.pattern).is_none() {
            return Err(Error::UnknownPattern(g.pattern));
        }
        let Some(p) = pats.packing(g.pattern) else {
            continue;
        };
        let class = inst.molds_in_class(p.mold_class);
        let bars = u64::from(inst.beam_types[p.beam_type].bars_per_beam);
        for _ in 0..g.freq {
            let &mold = class
                .iter()
                .min_by_key(|&&k| (loads[k], k))
                .expect("mold classes are nonempty");
            molds[mold].push(Placement {
                pattern: p.id,
                start: loads[mold] + 1,
                duration: p.duration,
            });
            loads[mold] += p.duration;
            if loads[mold] > inst.horizon {
                return Err(Error::Horizon {
                    mold: mold + 1,
                    load: loads[mold],
                    horizon: inst.horizon,
                });
            }
            bar_requirements[p.mold_class] += bars;
        }
    }
    let makespan = loads.iter().copied().max().unwrap_or(0);
    Ok(Schedule {
        molds,
        loads,
        makespan,
        used_periods: (1..=inst.horizon).map(|t| t <= makespan).collect(),
        bar_requirements,
    })
}

/// Makespan the decoder would produce, without building the timetable.
pub fn decoded_makespan(ch: &Chromosome, inst: &Instance, pats: &PatternSet) -> Option<u32> {
    let mut loads = vec![0u32; inst.num_molds()];
    for g in &ch.genes {
        let Some(p) = pats.packing(g.pattern) else {
            continue;
        };
        let class = inst.molds_in_class(p.mold_class);
        for _ in 0..g.freq {
            let &mold = class.iter().min_by_key(|&&k| (loads[k], k))?;
            loads[mold] += p.duration;
        }
    }
    let ms = loads.iter().copied().max().unwrap_or(0);
    (ms <= inst.horizon).then_some(ms)
}

fn period_char(id: PatternId) -> char {
    char::from_digit(id.0 % 36, 36).expect("digit below 36")
}

impl Schedule {
    /// One line per mold, one character per period over `horizon` periods:
    /// `.` when idle, otherwise the base-36 digit of the pattern id mod 36.
    pub fn gantt_text(&self, horizon: u32) -> String {
        let mut out = String::new();
        for placements in &self.molds {
            let mut row = vec!['.'; horizon as usize];
            for p in placements {
                let c = period_char(p.pattern);
                for t in p.start..p.start + p.duration {
                    if let Some(slot) = row.get_mut(t as usize - 1) {
                        *slot = c;
                    }
                }
            }
            out.extend(row);
            out.push('\n');
        }
        out
    }
}
