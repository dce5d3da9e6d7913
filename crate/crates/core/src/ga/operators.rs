//! Crossover, mutation and the insert-move local search.

use rand::Rng;

use crate::error::{Error, Result};
use crate::eval::{decoded_makespan, Chromosome, Gene};
use crate::ga::repair::{is_admissible, repair};
use crate::instance::Instance;
use crate::patterns::PatternSet;

/// Union of parent genes, `a`'s order first, then genes only in `b`.
fn union(a: &Chromosome, b: &Chromosome) -> Vec<(Gene, Option<u32>, Option<u32>)> {
    let mut out: Vec<(Gene, Option<u32>, Option<u32>)> = a
        .genes
        .iter()
        .map(|g| {
            let fb = b.position(g.pattern).map(|i| b.genes[i].freq);
            (*g, Some(g.freq), fb)
        })
        .collect();
    for g in &b.genes {
        if !a.contains(g.pattern) {
            out.push((*g, None, Some(g.freq)));
        }
    }
    out
}

/// Mean crossover before repair. Each gene is zeroed with probability `mut_rate`.
pub fn crossover1_raw<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    mut_rate: f64,
    rng: &mut R,
) -> Chromosome {
    let mut genes = Vec::new();
    for (g, fa, fb) in union(a, b) {
        let sum = fa.unwrap_or(0) + fb.unwrap_or(0);
        let mut freq = sum.div_ceil(2);
        if rng.gen_bool(mut_rate) {
            freq = 0;
        }
        genes.push(Gene {
            pattern: g.pattern,
            freq,
        });
    }
    let mut ch = Chromosome::new(genes);
    ch.strip_zeros();
    ch
}

/// Coin crossover before repair.
pub fn crossover2_raw<R: Rng + ?Sized>(a: &Chromosome, b: &Chromosome, rng: &mut R) -> Chromosome {
    let mut genes = Vec::new();
    for (g, fa, fb) in union(a, b) {
        let freq = match (fa, fb) {
            (Some(x), Some(y)) => (x + y).div_ceil(2),
            (Some(x), None) | (None, Some(x)) => {
                if rng.gen_bool(0.5) {
                    x
                } else {
                    0
                }
            }
            (None, None) => 0,
        };
        genes.push(Gene {
            pattern: g.pattern,
            freq,
        });
    }
    let mut ch = Chromosome::new(genes);
    ch.strip_zeros();
    ch
}

fn finish(ch: Chromosome, inst: &Instance, pats: &PatternSet) -> Option<Chromosome> {
    if is_admissible(&ch, inst, pats) {
        Some(ch)
    } else {
        repair(&ch, inst, pats)
    }
}

pub fn crossover1<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    mut_rate: f64,
    inst: &Instance,
    pats: &PatternSet,
    rng: &mut R,
) -> Option<Chromosome> {
    finish(crossover1_raw(a, b, mut_rate, rng), inst, pats)
}

pub fn crossover2<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    inst: &Instance,
    pats: &PatternSet,
    rng: &mut R,
) -> Option<Chromosome> {
    finish(crossover2_raw(a, b, rng), inst, pats)
}

/// Replaces the gene at `index` by pattern `p2` with the same frequency.
pub fn swap_gene(ch: &Chromosome, index: usize, p2: crate::patterns::PatternId) -> Chromosome {
    let mut out = ch.clone();
    out.genes[index].pattern = p2;
    out
}

/// Swaps a random gene for a random pattern outside the chromosome, then
/// repairs. `Ok(None)` means the mutant could not be repaired.
pub fn mutate<R: Rng + ?Sized>(
    ch: &Chromosome,
    inst: &Instance,
    pats: &PatternSet,
    rng: &mut R,
) -> Result<Option<Chromosome>> {
    let outside: Vec<_> = pats.ids().filter(|&id| !ch.contains(id)).collect();
    if outside.is_empty() || ch.is_empty() {
        return Err(Error::NoPatternOutside);
    }
    let i = rng.gen_range(0..ch.gene_count());
    let p2 = outside[rng.gen_range(0..outside.len())];
    Ok(finish(swap_gene(ch, i, p2), inst, pats))
}

/// Moves gene `i` so it sits right after the gene originally at `k` (`i < k`).
pub fn insert_move(ch: &Chromosome, i: usize, k: usize) -> Chromosome {
    let mut genes = ch.genes.clone();
    let g = genes.remove(i);
    genes.insert(k, g);
    Chromosome::new(genes)
}

/// Best insert neighbor of `ch` by decoded makespan, or `ch` itself.
pub fn local_search_insert(ch: &Chromosome, inst: &Instance, pats: &PatternSet) -> Chromosome {
    let mut best = ch.clone();
    let Some(mut best_ms) = decoded_makespan(ch, inst, pats) else {
        return best;
    };
    let n = ch.gene_count();
    for i in 0..n.saturating_sub(1) {
        for k in i + 1..n {
            let nb = insert_move(ch, i, k);
            if let Some(ms) = decoded_makespan(&nb, inst, pats) {
                if ms < best_ms {
                    best = nb;
                    best_ms = ms;
                }
            }
        }
    }
    best
}
