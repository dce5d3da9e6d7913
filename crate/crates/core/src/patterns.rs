//! Packing, cutting and overlapping pattern enumeration.
//!
//! Patterns share one global id space: packing patterns take ids `1..=r`,
//! cutting patterns `r+1..=r+H`, overlapping patterns `r+H+1..=r+H+O`.
//! Chromosome genes refer to patterns by these ids.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::units::{one_based, Length};

/// One-based global pattern index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternId(pub u32);

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Beams of a single type cast together in one mold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingPattern {
    pub id: PatternId,
    #[serde(with = "one_based")]
    pub beam_type: usize,
    /// Beams per length of the type, indexed like `BeamType::lengths`.
    pub counts: Vec<u32>,
    /// The mold class in which this pattern is maximal.
    #[serde(with = "one_based")]
    pub mold_class: usize,
    pub used_capacity: Length,
    pub duration: u32,
}

impl PackingPattern {
    /// Number of beams of type `c` and length index `k` this pattern casts.
    pub fn beams(&self, c: usize, k: usize) -> u32 {
        if c == self.beam_type {
            self.counts[k]
        } else {
            0
        }
    }
}

/// Where the waste of a cutting pattern is accounted in the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutKind {
    /// New bar, no leftover produced.
    NewBar,
    /// New bar that also produces leftovers of kind `v`.
    NewBarWithLeftover(usize),
    /// Cut from a leftover bar in stock.
    LeftoverBar,
}

/// How one stock bar is cut into mold-length bars plus at most one leftover kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuttingPattern {
    pub id: PatternId,
    #[serde(with = "one_based")]
    pub source_bar: usize,
    /// Bars produced per mold class.
    pub item_counts: Vec<u32>,
    /// Leftovers produced per leftover kind.
    pub leftover_counts: Vec<u32>,
    pub waste: Length,
}

impl CuttingPattern {
    pub fn leftover_kind(&self) -> Option<usize> {
        self.leftover_counts.iter().position(|&n| n > 0)
    }

    pub fn kind(&self, inst: &Instance) -> CutKind {
        if inst.is_leftover(self.source_bar) {
            CutKind::LeftoverBar
        } else {
            match self.leftover_kind() {
                Some(v) => CutKind::NewBarWithLeftover(v),
                None => CutKind::NewBar,
            }
        }
    }

    /// The single class produced, if the pattern produces exactly one class.
    pub fn only_class(&self) -> Option<usize> {
        let mut it = self.item_counts.iter().enumerate().filter(|(_, &n)| n > 0);
        let first = it.next()?.0;
        it.next().is_none().then_some(first)
    }
}

/// Two leftovers spliced into one mold-length bar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlappingPattern {
    pub id: PatternId,
    #[serde(with = "one_based")]
    pub produced_class: usize,
    pub leftover_counts: Vec<u32>,
    pub waste: Length,
}

/// Whether packing enumeration keeps only maximal patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PackingMode {
    Maximal,
    /// Every nonempty pattern fitting the class, maximal or not.
    All,
}

/// Enumerates maximal packing patterns in `(type, class, counts descending)`
/// order, ids starting at 1.
pub fn enumerate_packing_patterns(inst: &Instance) -> Vec<PackingPattern> {
    enumerate_packing_patterns_with(inst, PackingMode::Maximal)
}

pub fn enumerate_packing_patterns_with(inst: &Instance, mode: PackingMode) -> Vec<PackingPattern> {
    let mut out = Vec::new();
    for (c, beam) in inst.beam_types.iter().enumerate() {
        let shortest = beam.shortest();
        for (g, &cap) in inst.distinct_mold_lengths().iter().enumerate() {
            let floor = match mode {
                PackingMode::Maximal => cap - shortest,
                PackingMode::All => Length::from_cm(-1),
            };
            let mut counts = vec![0u32; beam.num_lengths()];
            let mut found = Vec::new();
            pack_dfs(&beam.lengths, 0, cap, floor, &mut counts, &mut found);
            for (counts, used) in found {
                out.push(PackingPattern {
                    id: PatternId(out.len() as u32 + 1),
                    beam_type: c,
                    counts,
                    mold_class: g,
                    used_capacity: used,
                    duration: beam.curing_time,
                });
            }
        }
    }
    out
}

fn pack_dfs(
    lengths: &[Length],
    k: usize,
    remaining: Length,
    floor: Length,
    counts: &mut Vec<u32>,
    out: &mut Vec<(Vec<u32>, Length)>,
) {
    if k == lengths.len() {
        let used: Length = lengths
            .iter()
            .zip(counts.iter())
            .map(|(&l, &n)| l * n)
            .sum();
        if counts.iter().any(|&n| n > 0) && used > floor {
            out.push((counts.clone(), used));
        }
        return;
    }
    let max = (remaining.cm() / lengths[k].cm()).max(0) as u32;
    for n in (0..=max).rev() {
        counts[k] = n;
        pack_dfs(
            lengths,
            k + 1,
            remaining - lengths[k] * n,
            floor,
            counts,
            out,
        );
    }
    counts[k] = 0;
}

/// Enumerates cutting patterns: for each source bar, every nonzero vector of
/// mold-length items plus either no leftover or copies of a single leftover
/// kind (new bars only), fitting the bar. Ordered by source bar, then item
/// vector ascending, then the leftover-free cut followed by leftover kind and
/// count ascending.
pub fn enumerate_cutting_patterns(inst: &Instance) -> Vec<CuttingPattern> {
    let classes = inst.distinct_mold_lengths();
    let nv = inst.num_leftover_kinds;
    let mut out = Vec::new();
    for (w, &bar) in inst.bar_lengths.iter().enumerate() {
        let mut items = Vec::new();
        let mut counts = vec![0u32; classes.len()];
        item_dfs(classes, 0, bar, &mut counts, &mut items);
        for item_counts in items {
            let used: Length = classes.iter().zip(&item_counts).map(|(&l, &n)| l * n).sum();
            let rest = bar - used;
            let mut push = |leftover_counts: Vec<u32>, waste: Length| {
                out.push(CuttingPattern {
                    id: PatternId(out.len() as u32 + 1),
                    source_bar: w,
                    item_counts: item_counts.clone(),
                    leftover_counts,
                    waste,
                });
            };
            push(vec![0; nv], rest);
            if inst.is_leftover(w) {
                continue;
            }
            for v in 0..nv {
                let lv = inst.leftover_length(v);
                let max = rest.cm() / lv.cm();
                for n in 1..=max as u32 {
                    let mut lc = vec![0; nv];
                    lc[v] = n;
                    push(lc, rest - lv * n);
                }
            }
        }
    }
    out
}

fn item_dfs(
    classes: &[Length],
    g: usize,
    remaining: Length,
    counts: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if g == classes.len() {
        if counts.iter().any(|&n| n > 0) {
            out.push(counts.clone());
        }
        return;
    }
    let max = (remaining.cm() / classes[g].cm()).max(0) as u32;
    for n in 0..=max {
        counts[g] = n;
        item_dfs(classes, g + 1, remaining - classes[g] * n, counts, out);
    }
    counts[g] = 0;
}

/// Enumerates every pair of leftovers whose combined length reaches a mold
/// length plus the splice loss. Ordered by `(class, leftover counts)`.
pub fn enumerate_overlapping_patterns(inst: &Instance) -> Vec<OverlappingPattern> {
    let nv = inst.num_leftover_kinds;
    let mut out = Vec::new();
    for (g, &target) in inst.distinct_mold_lengths().iter().enumerate() {
        let mut found = Vec::new();
        for a in 0..nv {
            for b in a..nv {
                let total = inst.leftover_length(a) + inst.leftover_length(b);
                if total >= target + inst.overlap_loss {
                    let mut counts = vec![0u32; nv];
                    counts[a] += 1;
                    counts[b] += 1;
                    found.push((counts, total - target));
                }
            }
        }
        found.sort();
        for (leftover_counts, waste) in found {
            out.push(OverlappingPattern {
                id: PatternId(out.len() as u32 + 1),
                produced_class: g,
                leftover_counts,
                waste,
            });
        }
    }
    out
}

/// True when `p` has the same beam type as `q` and at least as many beams of
/// every length.
pub fn contains(p: &PackingPattern, q: &PackingPattern) -> bool {
    p.beam_type == q.beam_type
        && p.counts.len() == q.counts.len()
        && p.counts.iter().zip(&q.counts).all(|(a, b)| a >= b)
}

/// A borrowed view of any pattern kind.
#[derive(Debug, Clone, Copy)]
pub enum PatternRef<'a> {
    Packing(&'a PackingPattern),
    Cutting(&'a CuttingPattern),
    Overlapping(&'a OverlappingPattern),
}

/// All patterns of an instance under the global id scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSet {
    pub packing: Vec<PackingPattern>,
    pub cutting: Vec<CuttingPattern>,
    pub overlapping: Vec<OverlappingPattern>,
}

impl PatternSet {
    pub fn enumerate(inst: &Instance) -> Self {
        Self::enumerate_with(inst, PackingMode::Maximal)
    }

    pub fn enumerate_with(inst: &Instance, mode: PackingMode) -> Self {
        let (packing, (cutting, overlapping)) = rayon::join(
            || enumerate_packing_patterns_with(inst, mode),
            || {
                rayon::join(
                    || enumerate_cutting_patterns(inst),
                    || enumerate_overlapping_patterns(inst),
                )
            },
        );
        Self::from_parts(packing, cutting, overlapping)
    }

    /// Assigns contiguous global ids in packing, cutting, overlapping order.
    pub fn from_parts(
        mut packing: Vec<PackingPattern>,
        mut cutting: Vec<CuttingPattern>,
        mut overlapping: Vec<OverlappingPattern>,
    ) -> Self {
        let mut next = 1u32;
        for p in &mut packing {
            p.id = PatternId(next);
            next += 1;
        }
        for p in &mut cutting {
            p.id = PatternId(next);
            next += 1;
        }
        for p in &mut overlapping {
            p.id = PatternId(next);
            next += 1;
        }
        PatternSet {
            packing,
            cutting,
            overlapping,
        }
    }

    pub fn len(&self) -> usize {
        self.packing.len() + self.cutting.len() + self.overlapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, id: PatternId) -> Option<PatternRef<'_>> {
        let i = (id.0 as usize).checked_sub(1)?;
        let (r, h) = (self.packing.len(), self.cutting.len());
        if i < r {
            Some(PatternRef::Packing(&self.packing[i]))
        } else if i < r + h {
            Some(PatternRef::Cutting(&self.cutting[i - r]))
        } else {
            self.overlapping.get(i - r - h).map(PatternRef::Overlapping)
        }
    }

    pub fn packing(&self, id: PatternId) -> Option<&PackingPattern> {
        match self.get(id)? {
            PatternRef::Packing(p) => Some(p),
            _ => None,
        }
    }

    /// Looks up a cutting pattern by content. `source` is zero-based.
    pub fn find_cutting(
        &self,
        source: usize,
        items: &[u32],
        leftovers: &[u32],
    ) -> Option<PatternId> {
        self.cutting
            .iter()
            .find(|h| {
                h.source_bar == source && h.item_counts == items && h.leftover_counts == leftovers
            })
            .map(|h| h.id)
    }

    /// Looks up an overlapping pattern by content. `class` is zero-based.
    pub fn find_overlapping(&self, class: usize, leftovers: &[u32]) -> Option<PatternId> {
        self.overlapping
            .iter()
            .find(|o| o.produced_class == class && o.leftover_counts == leftovers)
            .map(|o| o.id)
    }

    pub fn num_packing(&self) -> usize {
        self.packing.len()
    }

    pub fn is_packing(&self, id: PatternId) -> bool {
        id.0 >= 1 && (id.0 as usize) <= self.packing.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = PatternId> {
        (1..=self.len() as u32).map(PatternId)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}
