//! Fixing infeasible chromosomes.
//!
//! Every step only adjusts frequencies of genes already present, walking
//! genes in chromosome order. [`repair`] repeats the dispatch until it stops
//! changing the chromosome and then accepts the result only if it is
//! feasible and fits the horizon.

use crate::eval::{decoded_makespan, Chromosome, InfeasibilityReport, Tally};
use crate::instance::Instance;
use crate::patterns::{PatternRef, PatternSet};

const MAX_ROUNDS: usize = 20;

fn tally(ch: &Chromosome, inst: &Instance, pats: &PatternSet) -> Option<Tally> {
    Tally::of(ch, inst, pats).ok()
}

fn report(ch: &Chromosome, inst: &Instance, pats: &PatternSet) -> Option<InfeasibilityReport> {
    tally(ch, inst, pats).map(|t| t.report(inst))
}

fn need(inst: &Instance, beams: &[Vec<u64>], c: usize, k: usize) -> u64 {
    u64::from(inst.beam_types[c].demands[k]).saturating_sub(beams[c][k])
}

/// Trims packing genes once demand is met: the gene that completes demand
/// keeps the uses needed to get there, later packing genes drop to zero.
pub fn trim_surplus(ch: &mut Chromosome, inst: &Instance, pats: &PatternSet) {
    let mut beams: Vec<Vec<u64>> = inst
        .beam_types
        .iter()
        .map(|b| vec![0; b.num_lengths()])
        .collect();
    let met = |beams: &Vec<Vec<u64>>| {
        inst.beam_types
            .iter()
            .enumerate()
            .all(|(c, b)| (0..b.num_lengths()).all(|k| need(inst, beams, c, k) == 0))
    };
    let mut fulfilled = met(&beams);
    for g in &mut ch.genes {
        let Some(p) = pats.packing(g.pattern) else {
            continue;
        };
        if fulfilled {
            g.freq = 0;
            continue;
        }
        for cont in 1..=g.freq {
            for (k, &a) in p.counts.iter().enumerate() {
                beams[p.beam_type][k] += u64::from(a);
            }
            if met(&beams) {
                fulfilled = true;
                g.freq = cont;
                break;
            }
        }
    }
}

/// Raises packing frequencies until every demanded length is met. Returns
/// false when a full pass makes no progress.
pub fn fix_demand(ch: &mut Chromosome, inst: &Instance, pats: &PatternSet) -> bool {
    loop {
        let Some(t) = tally(ch, inst, pats) else {
            return false;
        };
        let mut beams = t.beams;
        let mut missing = false;
        let mut progress = false;
        for c in 0..inst.num_beam_types() {
            for k in 0..inst.beam_types[c].num_lengths() {
                let n = need(inst, &beams, c, k);
                if n == 0 {
                    continue;
                }
                missing = true;
                let hit = ch.genes.iter_mut().find_map(|g| {
                    pats.packing(g.pattern)
                        .filter(|p| p.beam_type == c && p.counts[k] > 0)
                        .map(|p| (g, p))
                });
                if let Some((g, p)) = hit {
                    let a = u64::from(p.counts[k]);
                    let add = n.div_ceil(a);
                    g.freq += u32::try_from(add).unwrap_or(u32::MAX);
                    for (k2, &a2) in p.counts.iter().enumerate() {
                        beams[c][k2] += u64::from(a2) * add;
                    }
                    progress = true;
                }
            }
        }
        if !missing {
            return true;
        }
        if !progress {
            return false;
        }
    }
}

/// Lowers cutting and overlapping frequencies on bar kinds used beyond stock.
pub fn fix_stock(ch: &mut Chromosome, inst: &Instance, pats: &PatternSet) {
    let Some(t) = tally(ch, inst, pats) else {
        return;
    };
    let mut used = t.stock_used;
    for w in 0..inst.bar_lengths.len() {
        let e = u64::from(inst.stock[w]);
        if used[w] <= e {
            continue;
        }
        for g in &mut ch.genes {
            if used[w] <= e {
                break;
            }
            if let Some(PatternRef::Cutting(h)) = pats.get(g.pattern) {
                if h.source_bar == w {
                    let dec = u64::from(g.freq).min(used[w] - e);
                    g.freq -= dec as u32;
                    used[w] -= dec;
                }
            }
        }
        if w < inst.num_bar_kinds {
            continue;
        }
        let v = w - inst.num_bar_kinds;
        for g in &mut ch.genes {
            if used[w] <= e {
                break;
            }
            if let Some(PatternRef::Overlapping(o)) = pats.get(g.pattern) {
                let a = u64::from(o.leftover_counts[v]);
                if a == 0 {
                    continue;
                }
                let dec = u64::from(g.freq).min((used[w] - e) / a);
                g.freq -= dec as u32;
                for (v2, &a2) in o.leftover_counts.iter().enumerate() {
                    used[inst.num_bar_kinds + v2] -= u64::from(a2) * dec;
                }
            }
        }
    }
}

/// Balances bars produced against bars required, class by class.
pub fn fix_balance(ch: &mut Chromosome, inst: &Instance, pats: &PatternSet) {
    let Some(t) = tally(ch, inst, pats) else {
        return;
    };
    let required = t.bars_required;
    let mut produced = t.bars_produced;
    let mut used = t.stock_used;
    let left = |used: &Vec<u64>, w: usize| u64::from(inst.stock[w]).saturating_sub(used[w]);

    for gamma in 0..inst.num_classes() {
        let req = required[gamma];
        if produced[gamma] > req {
            for g in &mut ch.genes {
                if produced[gamma] <= req {
                    break;
                }
                if let Some(PatternRef::Cutting(h)) = pats.get(g.pattern) {
                    if h.only_class() == Some(gamma) {
                        let a = u64::from(h.item_counts[gamma]);
                        let dec = u64::from(g.freq).min((produced[gamma] - req).div_ceil(a));
                        g.freq -= dec as u32;
                        produced[gamma] -= a * dec;
                        used[h.source_bar] -= dec;
                    }
                }
            }
        }
        if produced[gamma] > req {
            for g in &mut ch.genes {
                if produced[gamma] <= req {
                    break;
                }
                if let Some(PatternRef::Overlapping(o)) = pats.get(g.pattern) {
                    if o.produced_class == gamma {
                        let dec = u64::from(g.freq).min(produced[gamma] - req);
                        g.freq -= dec as u32;
                        produced[gamma] -= dec;
                        for (v, &a) in o.leftover_counts.iter().enumerate() {
                            used[inst.num_bar_kinds + v] -= u64::from(a) * dec;
                        }
                    }
                }
            }
        }
        if produced[gamma] < req {
            for g in &mut ch.genes {
                if produced[gamma] >= req {
                    break;
                }
                if let Some(PatternRef::Cutting(h)) = pats.get(g.pattern) {
                    if h.only_class() == Some(gamma) {
                        let a = u64::from(h.item_counts[gamma]);
                        let add = ((req - produced[gamma]) / a).min(left(&used, h.source_bar));
                        g.freq += add as u32;
                        produced[gamma] += a * add;
                        used[h.source_bar] += add;
                    }
                }
            }
        }
        if produced[gamma] < req {
            for g in &mut ch.genes {
                let Some(PatternRef::Overlapping(o)) = pats.get(g.pattern) else {
                    continue;
                };
                if o.produced_class != gamma {
                    continue;
                }
                while produced[gamma] < req
                    && o.leftover_counts
                        .iter()
                        .enumerate()
                        .all(|(v, &a)| u64::from(a) <= left(&used, inst.num_bar_kinds + v))
                {
                    g.freq += 1;
                    produced[gamma] += 1;
                    for (v, &a) in o.leftover_counts.iter().enumerate() {
                        used[inst.num_bar_kinds + v] += u64::from(a);
                    }
                }
            }
        }
    }
}

/// One pass of the fixing procedure. Returns false when demand cannot be met.
pub fn fix_once(ch: &mut Chromosome, inst: &Instance, pats: &PatternSet) -> bool {
    let Some(r) = report(ch, inst, pats) else {
        return false;
    };
    if r.demand_short {
        if !fix_demand(ch, inst, pats) {
            return false;
        }
    } else {
        trim_surplus(ch, inst, pats);
    }
    if report(ch, inst, pats).is_some_and(|r| r.stock_exceeded) {
        fix_stock(ch, inst, pats);
    }
    if report(ch, inst, pats).is_some_and(|r| r.bars_unbalanced) {
        fix_balance(ch, inst, pats);
    }
    true
}

/// Repairs `ch`, or returns `None` when it cannot be made feasible.
pub fn repair(ch: &Chromosome, inst: &Instance, pats: &PatternSet) -> Option<Chromosome> {
    let mut cur = ch.clone();
    cur.strip_zeros();
    for _ in 0..MAX_ROUNDS {
        let before = cur.clone();
        if !fix_once(&mut cur, inst, pats) {
            return None;
        }
        cur.strip_zeros();
        if cur == before {
            let ok = report(&cur, inst, pats)?.is_feasible();
            return (ok && decoded_makespan(&cur, inst, pats).is_some()).then_some(cur);
        }
    }
    None
}

/// Whether `ch` is feasible and decodes within the horizon.
pub fn is_admissible(ch: &Chromosome, inst: &Instance, pats: &PatternSet) -> bool {
    report(ch, inst, pats).is_some_and(|r| r.is_feasible())
        && decoded_makespan(ch, inst, pats).is_some()
}
