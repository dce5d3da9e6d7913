//! Exact optimum by bounded enumeration, for small instances.
//!
//! The search runs over packing frequencies with demand, horizon and
//! objective-bound pruning. For each packing vector the best gene order is
//! found per mold class, and the cheapest way to produce exactly the required
//! bars is found by a second memoized search over cutting and overlapping
//! frequencies.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::eval::chromosome::{Chromosome, Gene};
use crate::eval::objective::evaluate;
use crate::instance::Instance;
use crate::patterns::{CutKind, PatternId, PatternSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCaps {
    /// Largest frequency tried for any pattern.
    pub max_freq: u32,
    /// Largest number of genes in a chromosome.
    pub max_genes: usize,
    /// Search nodes visited before giving up.
    pub node_budget: u64,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            max_freq: 10,
            max_genes: 8,
            node_budget: 200_000_000,
        }
    }
}

struct Supply {
    id: PatternId,
    produces: Vec<u32>,
    consumes: Vec<(usize, u32)>,
    /// Weighted waste in centimeters.
    cost: f64,
}

type Plan = (f64, Vec<(usize, u32)>);
/// Packing frequencies, packing gene order and supply genes.
type Incumbent = (Vec<u32>, Vec<PatternId>, Vec<(usize, u32)>);

struct Search<'a> {
    inst: &'a Instance,
    pats: &'a PatternSet,
    caps: SearchCaps,
    nodes: u64,
    supply: Vec<Supply>,
    /// `supply_ratio[j][g]`: cheapest weighted waste per bar of class `g`
    /// among supply patterns `j..`.
    supply_ratio: Vec<Vec<f64>>,
    /// `cover[i][c][k]`: beams packing patterns `i..` can add at max frequency.
    cover: Vec<Vec<Vec<u64>>>,
    /// Packing pattern indices in search order; `cover` and `cap_rest` follow it.
    order: Vec<usize>,
    /// `cap_rest[i][c]`: largest used capacity of a type `c` pattern in `order[i..]`.
    cap_rest: Vec<Vec<i64>>,
    memo: HashMap<(Vec<u64>, usize), Option<Plan>>,
    /// Packing states already explored. The rest of the search depends only on
    /// the state, so a second visit cannot find anything new.
    seen: HashSet<Vec<u64>>,
    /// Whether every packing pattern of a mold class has the same duration.
    uniform: Vec<bool>,

    freq: Vec<u32>,
    beams: Vec<Vec<u64>>,
    class_load: Vec<u64>,
    class_max_dur: Vec<u32>,
    bars: Vec<u64>,
    genes: usize,
    best_value: f64,
    best: Option<Incumbent>,
}

pub fn exhaustive_optimum(
    inst: &Instance,
    pats: &PatternSet,
    caps: SearchCaps,
) -> Result<(Chromosome, f64)> {
    let mut s = Search::new(inst, pats, caps);
    s.pack(0)?;
    let (freq, order, supply) = s.best.take().ok_or(Error::NoFeasibleSolution)?;
    let mut genes: Vec<Gene> = order
        .into_iter()
        .map(|id| Gene {
            pattern: id,
            freq: freq[id.0 as usize - 1],
        })
        .collect();
    genes.extend(supply.into_iter().map(|(j, f)| Gene {
        pattern: s.supply[j].id,
        freq: f,
    }));
    let ch = Chromosome::new(genes);
    let value = evaluate(&ch, inst, pats)?.value;
    Ok((ch, value))
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, pats: &'a PatternSet, caps: SearchCaps) -> Self {
        let gammas = inst.num_classes();
        let w = &inst.weights;
        let mut supply = Vec::new();
        for h in &pats.cutting {
            let lambda = match h.kind(inst) {
                CutKind::NewBar => w[1],
                CutKind::NewBarWithLeftover(_) => w[2],
                CutKind::LeftoverBar => w[3],
            };
            supply.push(Supply {
                id: h.id,
                produces: h.item_counts.clone(),
                consumes: vec![(h.source_bar, 1)],
                cost: lambda * h.waste.cm() as f64,
            });
        }
        for o in &pats.overlapping {
            let mut produces = vec![0; gammas];
            produces[o.produced_class] = 1;
            supply.push(Supply {
                id: o.id,
                produces,
                consumes: o
                    .leftover_counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a > 0)
                    .map(|(v, &a)| (inst.num_bar_kinds + v, a))
                    .collect(),
                cost: w[3] * o.waste.cm() as f64,
            });
        }
        let mut supply_ratio = vec![vec![f64::INFINITY; gammas]; supply.len() + 1];
        for j in (0..supply.len()).rev() {
            let mut row = supply_ratio[j + 1].clone();
            for (g, &a) in supply[j].produces.iter().enumerate() {
                if a > 0 {
                    row[g] = row[g].min(supply[j].cost / f64::from(a));
                }
            }
            supply_ratio[j] = row;
        }

        let zero_beams: Vec<Vec<u64>> = inst
            .beam_types
            .iter()
            .map(|b| vec![0; b.num_lengths()])
            .collect();
        let r = pats.packing.len();
        // large patterns first, so good incumbents are found early
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(pats.packing[i].used_capacity));
        let mut cover = vec![zero_beams.clone(); r + 1];
        let mut cap_rest = vec![vec![0i64; inst.num_beam_types()]; r + 1];
        for i in (0..r).rev() {
            let mut next = cover[i + 1].clone();
            let p = &pats.packing[order[i]];
            for (k, &a) in p.counts.iter().enumerate() {
                next[p.beam_type][k] += u64::from(a) * u64::from(caps.max_freq);
            }
            cover[i] = next;
            let mut caps_i = cap_rest[i + 1].clone();
            caps_i[p.beam_type] = caps_i[p.beam_type].max(p.used_capacity.cm());
            cap_rest[i] = caps_i;
        }

        let mut uniform = vec![true; gammas];
        for p in &pats.packing {
            if pats
                .packing
                .iter()
                .any(|q| q.mold_class == p.mold_class && q.duration != p.duration)
            {
                uniform[p.mold_class] = false;
            }
        }

        Search {
            inst,
            pats,
            caps,
            nodes: 0,
            supply,
            supply_ratio,
            cover,
            order,
            cap_rest,
            memo: HashMap::new(),
            seen: HashSet::new(),
            uniform,
            freq: vec![0; r],
            beams: zero_beams,
            class_load: vec![0; gammas],
            class_max_dur: vec![0; gammas],
            bars: vec![0; gammas],
            genes: 0,
            best_value: f64::INFINITY,
            best: None,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.caps.node_budget {
            Err(Error::BudgetExceeded {
                budget: self.caps.node_budget,
            })
        } else {
            Ok(())
        }
    }

    fn demand_reachable(&self, i: usize) -> bool {
        self.inst.beam_types.iter().enumerate().all(|(c, b)| {
            b.demands
                .iter()
                .enumerate()
                .all(|(k, &d)| self.beams[c][k] + self.cover[i][c][k] >= u64::from(d))
        })
    }

    /// Lower bound on the objective (in weighted centimeters) of any
    /// completion of the current partial packing vector by patterns `i..`.
    fn partial_bound(&self, i: usize) -> Option<f64> {
        // uses still needed to cast the unmet beam length
        let mut extra_load = 0u64;
        let mut extra_bars = 0u64;
        for (c, b) in self.inst.beam_types.iter().enumerate() {
            let unmet: i64 = b
                .demands
                .iter()
                .zip(&b.lengths)
                .enumerate()
                .map(|(k, (&d, l))| u64::from(d).saturating_sub(self.beams[c][k]) as i64 * l.cm())
                .sum();
            if unmet > 0 {
                let cap = self.cap_rest[i][c];
                if cap == 0 {
                    return None;
                }
                let uses = (unmet as u64).div_ceil(cap as u64);
                extra_load += uses * u64::from(b.curing_time);
                extra_bars += uses * u64::from(b.bars_per_beam);
            }
        }
        let total_load: u64 = self.class_load.iter().sum::<u64>() + extra_load;
        let mut ms = total_load.div_ceil(self.inst.num_molds() as u64);
        for g in 0..self.inst.num_classes() {
            let molds = self.inst.molds_in_class(g).len() as u64;
            let lb = self.class_load[g]
                .div_ceil(molds)
                .max(u64::from(self.class_max_dur[g]));
            if lb > u64::from(self.inst.horizon) {
                return None;
            }
            ms = ms.max(lb);
        }
        if ms > u64::from(self.inst.horizon) {
            return None;
        }
        let cheapest = self.supply_ratio[0]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let mut waste = if extra_bars > 0 {
            extra_bars as f64 * cheapest
        } else {
            0.0
        };
        for (g, &n) in self.bars.iter().enumerate() {
            if n > 0 {
                let r = self.supply_ratio[0][g];
                if r.is_infinite() {
                    return None;
                }
                waste += n as f64 * r;
            }
        }
        Some(self.inst.weights[0] * ms as f64 * 100.0 + waste)
    }

    /// Index, unmet demand, gene count and, per mold class, what decides
    /// its makespan: the use count when durations are uniform, otherwise the
    /// sorted (duration, frequency) genes.
    fn state_key(&self, i: usize) -> Vec<u64> {
        let mut key = vec![i as u64, self.genes as u64];
        for (c, b) in self.inst.beam_types.iter().enumerate() {
            for (k, &d) in b.demands.iter().enumerate() {
                key.push(u64::from(d).saturating_sub(self.beams[c][k]));
            }
        }
        for g in 0..self.inst.num_classes() {
            if self.uniform[g] {
                key.push(self.class_load[g]);
            } else {
                let mut genes: Vec<(u32, u32)> = self.order[..i]
                    .iter()
                    .map(|&j| (&self.pats.packing[j], self.freq[j]))
                    .filter(|(p, f)| *f > 0 && p.mold_class == g)
                    .map(|(p, f)| (p.duration, f))
                    .collect();
                genes.sort_unstable();
                key.push(genes.len() as u64);
                key.extend(
                    genes
                        .iter()
                        .flat_map(|&(d, f)| [u64::from(d), u64::from(f)]),
                );
            }
        }
        key
    }

    fn pack(&mut self, i: usize) -> Result<()> {
        self.tick()?;
        if !self.demand_reachable(i) {
            return Ok(());
        }
        if !self.seen.insert(self.state_key(i)) {
            return Ok(());
        }
        match self.partial_bound(i) {
            Some(lb) if lb < self.best_value - 1e-9 => {}
            _ => return Ok(()),
        }
        if i == self.pats.packing.len() {
            return self.leaf();
        }
        let pi = self.order[i];
        let p = &self.pats.packing[pi];
        let (c, g, dur) = (p.beam_type, p.mold_class, p.duration);
        let counts = p.counts.clone();
        let bars_per = u64::from(self.inst.beam_types[c].bars_per_beam);
        let top = if self.genes < self.caps.max_genes {
            self.caps.max_freq
        } else {
            0
        };
        let saved_dur = self.class_max_dur[g];
        let mut result = Ok(());
        let mut applied = 0u64;
        for f in 0..=top {
            if f > 0 {
                if f == 1 {
                    self.genes += 1;
                    self.class_max_dur[g] = saved_dur.max(dur);
                }
                for (k, &a) in counts.iter().enumerate() {
                    self.beams[c][k] += u64::from(a);
                }
                self.class_load[g] += u64::from(dur);
                self.bars[g] += bars_per;
                applied += 1;
                // load and bars only grow with f, so the bound does too
                match self.partial_bound(i) {
                    Some(lb) if lb < self.best_value - 1e-9 => {}
                    _ => break,
                }
            }
            self.freq[pi] = f;
            result = self.pack(i + 1);
            if result.is_err() {
                break;
            }
        }
        for (k, &a) in counts.iter().enumerate() {
            self.beams[c][k] -= u64::from(a) * applied;
        }
        self.class_load[g] -= u64::from(dur) * applied;
        self.bars[g] -= bars_per * applied;
        if applied > 0 {
            self.genes -= 1;
            self.class_max_dur[g] = saved_dur;
        }
        self.freq[pi] = 0;
        result
    }

    fn leaf(&mut self) -> Result<()> {
        let covered = self.inst.beam_types.iter().enumerate().all(|(c, b)| {
            b.demands
                .iter()
                .enumerate()
                .all(|(k, &d)| self.beams[c][k] >= u64::from(d))
        });
        if !covered {
            return Ok(());
        }
        let Some((ms, order)) = self.best_order() else {
            return Ok(());
        };
        let ms_cost = self.inst.weights[0] * f64::from(ms) * 100.0;
        if ms_cost >= self.best_value - 1e-9 {
            return Ok(());
        }
        let budget = self.caps.max_genes - self.genes;
        let key = (self.bars.clone(), budget);
        let plan = match self.memo.get(&key) {
            Some(p) => p.clone(),
            None => {
                let mut stock: Vec<u64> = self.inst.stock.iter().map(|&e| u64::from(e)).collect();
                let mut rem = self.bars.clone();
                let mut chosen = Vec::new();
                let mut best = None;
                self.supply_dfs(0, &mut rem, &mut stock, budget, 0.0, &mut chosen, &mut best)?;
                self.memo.insert(key, best.clone());
                best
            }
        };
        if let Some((cost, genes)) = plan {
            let total = ms_cost + cost;
            if total < self.best_value - 1e-9 {
                self.best_value = total;
                self.best = Some((self.freq.clone(), order, genes));
            }
        }
        Ok(())
    }

    /// Smallest decoded makespan over gene orders, with an order attaining it.
    fn best_order(&self) -> Option<(u32, Vec<PatternId>)> {
        let mut ms = 0;
        let mut order = Vec::new();
        for g in 0..self.inst.num_classes() {
            let genes: Vec<(PatternId, u32, u32)> = self
                .pats
                .packing
                .iter()
                .zip(&self.freq)
                .filter(|(p, &f)| f > 0 && p.mold_class == g)
                .map(|(p, &f)| (p.id, p.duration, f))
                .collect();
            if genes.is_empty() {
                continue;
            }
            let molds = self.inst.molds_in_class(g).len();
            let (class_ms, class_order) = min_class_makespan(&genes, molds);
            if class_ms > self.inst.horizon {
                return None;
            }
            ms = ms.max(class_ms);
            order.extend(class_order);
        }
        Some((ms, order))
    }

    #[allow(clippy::too_many_arguments)]
    fn supply_dfs(
        &mut self,
        j: usize,
        rem: &mut Vec<u64>,
        stock: &mut Vec<u64>,
        genes_left: usize,
        acc: f64,
        chosen: &mut Vec<(usize, u32)>,
        best: &mut Option<Plan>,
    ) -> Result<()> {
        self.tick()?;
        if rem.iter().all(|&n| n == 0) {
            if best.as_ref().is_none_or(|b| acc < b.0 - 1e-9) {
                *best = Some((acc, chosen.clone()));
            }
            return Ok(());
        }
        if j == self.supply.len() || genes_left == 0 {
            return Ok(());
        }
        let mut lb = acc;
        for (g, &n) in rem.iter().enumerate() {
            if n > 0 {
                let r = self.supply_ratio[j][g];
                if r.is_infinite() {
                    return Ok(());
                }
                lb += n as f64 * r;
            }
        }
        if best.as_ref().is_some_and(|b| lb >= b.0 - 1e-9) {
            return Ok(());
        }
        let mut top = u64::from(self.caps.max_freq);
        let produces_any = self.supply[j].produces.iter().any(|&a| a > 0);
        for (g, &a) in self.supply[j].produces.iter().enumerate() {
            if a > 0 {
                top = top.min(rem[g] / u64::from(a));
            }
        }
        for &(w, a) in &self.supply[j].consumes {
            top = top.min(stock[w] / u64::from(a));
        }
        if !produces_any {
            top = 0;
        }
        for f in (1..=top).rev() {
            let produces = self.supply[j].produces.clone();
            let consumes = self.supply[j].consumes.clone();
            for (g, &a) in produces.iter().enumerate() {
                rem[g] -= u64::from(a) * f;
            }
            for &(w, a) in &consumes {
                stock[w] -= u64::from(a) * f;
            }
            chosen.push((j, f as u32));
            let cost = acc + self.supply[j].cost * f as f64;
            let r = self.supply_dfs(j + 1, rem, stock, genes_left - 1, cost, chosen, best);
            chosen.pop();
            for (g, &a) in produces.iter().enumerate() {
                rem[g] += u64::from(a) * f;
            }
            for &(w, a) in &consumes {
                stock[w] += u64::from(a) * f;
            }
            r?;
        }
        self.supply_dfs(j + 1, rem, stock, genes_left, acc, chosen, best)
    }
}

/// Decoder makespan of one mold class for genes in the given order.
fn class_makespan(genes: &[(PatternId, u32, u32)], molds: usize) -> u32 {
    let mut loads = vec![0u32; molds];
    for &(_, dur, freq) in genes {
        for _ in 0..freq {
            let k = (0..molds).min_by_key(|&k| (loads[k], k)).expect("molds");
            loads[k] += dur;
        }
    }
    loads.into_iter().max().unwrap_or(0)
}

fn min_class_makespan(genes: &[(PatternId, u32, u32)], molds: usize) -> (u32, Vec<PatternId>) {
    let ids = |g: &[(PatternId, u32, u32)]| g.iter().map(|x| x.0).collect::<Vec<_>>();
    let dur = genes[0].1;
    if genes.iter().all(|g| g.1 == dur) {
        let n: u32 = genes.iter().map(|g| g.2).sum();
        return (dur * n.div_ceil(molds as u32), ids(genes));
    }
    let mut perm = genes.to_vec();
    let mut best = (class_makespan(&perm, molds), ids(&perm));
    permute(&mut perm, 0, &mut |p| {
        let ms = class_makespan(p, molds);
        if ms < best.0 {
            best = (ms, ids(p));
        }
    });
    best
}

fn permute<T, F: FnMut(&[T])>(v: &mut [T], k: usize, f: &mut F) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}
