//! Pseudo-random construction of feasible chromosomes.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::eval::{evaluate, Chromosome, Gene};
use crate::instance::Instance;
use crate::patterns::{PatternId, PatternSet};

/// Builds a chromosome by adding random packing patterns until demand is
/// met, then random cutting and overlapping patterns per mold class until
/// the required bars are produced. Genes appear in the order they were
/// chosen. Returns `None` when the draw cannot be completed.
///
/// A packing pattern stops being incremented when its next use would push
/// the least loaded mold of its class past the horizon.
pub fn random_solution<R: Rng + ?Sized>(
    inst: &Instance,
    pats: &PatternSet,
    rng: &mut R,
) -> Option<Chromosome> {
    let mut genes: Vec<Gene> = Vec::new();

    let mut beams: Vec<Vec<u64>> = inst
        .beam_types
        .iter()
        .map(|b| vec![0; b.num_lengths()])
        .collect();
    let unmet = |beams: &Vec<Vec<u64>>, c: usize, k: usize| {
        beams[c][k] < u64::from(inst.beam_types[c].demands[k])
    };
    let all_met = |beams: &Vec<Vec<u64>>| {
        inst.beam_types
            .iter()
            .enumerate()
            .all(|(c, b)| (0..b.num_lengths()).all(|k| !unmet(beams, c, k)))
    };
    let mut loads = vec![0u32; inst.num_molds()];
    let mut required = vec![0u64; inst.num_classes()];

    let mut order: Vec<usize> = (0..pats.packing.len()).collect();
    order.shuffle(rng);
    let mut next = order.into_iter();
    while !all_met(&beams) {
        let p = &pats.packing[next.next()?];
        let covers = |beams: &Vec<Vec<u64>>| {
            p.counts
                .iter()
                .enumerate()
                .any(|(k, &a)| a > 0 && unmet(beams, p.beam_type, k))
        };
        if !covers(&beams) {
            continue;
        }
        let class = inst.molds_in_class(p.mold_class);
        let mut freq = 0;
        while covers(&beams) {
            let &mold = class.iter().min_by_key(|&&m| (loads[m], m))?;
            if loads[mold] + p.duration > inst.horizon {
                break;
            }
            loads[mold] += p.duration;
            for (k, &a) in p.counts.iter().enumerate() {
                beams[p.beam_type][k] += u64::from(a);
            }
            freq += 1;
        }
        if freq > 0 {
            required[p.mold_class] +=
                u64::from(inst.beam_types[p.beam_type].bars_per_beam) * u64::from(freq);
            genes.push(Gene {
                pattern: p.id,
                freq,
            });
        }
    }

    let mut stock: Vec<u64> = inst.stock.iter().map(|&e| u64::from(e)).collect();
    let mut produced = vec![0u64; inst.num_classes()];
    for g in 0..inst.num_classes() {
        let mut cuts: Vec<usize> = (0..pats.cutting.len())
            .filter(|&h| pats.cutting[h].item_counts[g] > 0)
            .collect();
        cuts.shuffle(rng);
        for h in cuts {
            if produced[g] >= required[g] {
                break;
            }
            let cut = &pats.cutting[h];
            let mut n = stock[cut.source_bar];
            for (g2, &a) in cut.item_counts.iter().enumerate() {
                if a > 0 {
                    n = n.min(required[g2].saturating_sub(produced[g2]) / u64::from(a));
                }
            }
            if n == 0 {
                continue;
            }
            stock[cut.source_bar] -= n;
            for (g2, &a) in cut.item_counts.iter().enumerate() {
                produced[g2] += u64::from(a) * n;
            }
            add(&mut genes, cut.id, n);
        }
        let mut overlaps: Vec<usize> = (0..pats.overlapping.len())
            .filter(|&u| pats.overlapping[u].produced_class == g)
            .collect();
        overlaps.shuffle(rng);
        for u in overlaps {
            if produced[g] >= required[g] {
                break;
            }
            let o = &pats.overlapping[u];
            let mut n = required[g] - produced[g];
            for (v, &a) in o.leftover_counts.iter().enumerate() {
                if a > 0 {
                    n = n.min(stock[inst.num_bar_kinds + v] / u64::from(a));
                }
            }
            if n == 0 {
                continue;
            }
            for (v, &a) in o.leftover_counts.iter().enumerate() {
                stock[inst.num_bar_kinds + v] -= u64::from(a) * n;
            }
            produced[g] += n;
            add(&mut genes, o.id, n);
        }
        if produced[g] != required[g] {
            return None;
        }
    }

    let ch = Chromosome::new(genes);
    evaluate(&ch, inst, pats).ok().map(|_| ch)
}

fn add(genes: &mut Vec<Gene>, id: PatternId, n: u64) {
    let freq = u32::try_from(n).unwrap_or(u32::MAX);
    match genes.iter_mut().find(|g| g.pattern == id) {
        Some(g) => g.freq += freq,
        None => genes.push(Gene { pattern: id, freq }),
    }
}
