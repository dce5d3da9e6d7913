//! Problem data: molds, beam types, bar stock and objective weights.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Length;

/// A family of beams that share curing time and bars per beam.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamType {
    pub lengths: Vec<Length>,
    pub demands: Vec<u32>,
    /// Periods a mold stays occupied once casting starts.
    pub curing_time: u32,
    /// Bars consumed by one use of any packing pattern of this type.
    pub bars_per_beam: u32,
}

impl BeamType {
    pub fn num_lengths(&self) -> usize {
        self.lengths.len()
    }

    pub fn shortest(&self) -> Length {
        self.lengths.iter().copied().min().unwrap_or(Length::ZERO)
    }

    /// Total demanded length, `sum_k l(c,k) * d(c,k)`.
    pub fn demanded_length(&self) -> Length {
        self.lengths
            .iter()
            .zip(&self.demands)
            .map(|(&l, &d)| l * d)
            .sum()
    }
}

/// A broken instance invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub horizon: u32,
    pub beam_types: Vec<BeamType>,
    mold_lengths: Vec<Length>,
    /// New bars first (`num_bar_kinds` of them), then leftover kinds.
    pub bar_lengths: Vec<Length>,
    pub num_bar_kinds: usize,
    pub num_leftover_kinds: usize,
    pub stock: Vec<u32>,
    pub overlap_loss: Length,
    pub weights: [f64; 4],

    distinct_mold_lengths: Vec<Length>,
    mold_class: Vec<usize>,
    class_molds: Vec<Vec<usize>>,
}

impl Instance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        horizon: u32,
        beam_types: Vec<BeamType>,
        mold_lengths: Vec<Length>,
        bar_lengths: Vec<Length>,
        num_bar_kinds: usize,
        stock: Vec<u32>,
        overlap_loss: Length,
        weights: [f64; 4],
    ) -> Self {
        let num_leftover_kinds = bar_lengths.len().saturating_sub(num_bar_kinds);
        let mut inst = Instance {
            horizon,
            beam_types,
            mold_lengths: Vec::new(),
            bar_lengths,
            num_bar_kinds,
            num_leftover_kinds,
            stock,
            overlap_loss,
            weights,
            distinct_mold_lengths: Vec::new(),
            mold_class: Vec::new(),
            class_molds: Vec::new(),
        };
        inst.set_mold_lengths(mold_lengths);
        inst
    }

    /// Replaces the molds and recomputes the mold classes.
    pub fn set_mold_lengths(&mut self, molds: Vec<Length>) {
        let mut distinct = molds.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let mold_class: Vec<usize> = molds
            .iter()
            .map(|l| distinct.binary_search(l).expect("present"))
            .collect();
        let mut class_molds = vec![Vec::new(); distinct.len()];
        for (m, &g) in mold_class.iter().enumerate() {
            class_molds[g].push(m);
        }
        self.mold_lengths = molds;
        self.distinct_mold_lengths = distinct;
        self.mold_class = mold_class;
        self.class_molds = class_molds;
    }

    pub fn num_beam_types(&self) -> usize {
        self.beam_types.len()
    }

    pub fn num_molds(&self) -> usize {
        self.mold_lengths.len()
    }

    pub fn mold_lengths(&self) -> &[Length] {
        &self.mold_lengths
    }

    /// Distinct mold lengths in ascending order; a mold class is an index here.
    pub fn distinct_mold_lengths(&self) -> &[Length] {
        &self.distinct_mold_lengths
    }

    pub fn num_classes(&self) -> usize {
        self.distinct_mold_lengths.len()
    }

    pub fn class_of_mold(&self, mold: usize) -> usize {
        self.mold_class[mold]
    }

    /// Molds whose length equals the given class length, ascending.
    pub fn molds_in_class(&self, class: usize) -> &[usize] {
        &self.class_molds[class]
    }

    pub fn is_leftover(&self, bar: usize) -> bool {
        bar >= self.num_bar_kinds
    }

    pub fn leftover_length(&self, v: usize) -> Length {
        self.bar_lengths[self.num_bar_kinds + v]
    }

    /// Largest curing time over all beam types.
    pub fn max_curing(&self) -> u32 {
        self.beam_types
            .iter()
            .map(|b| b.curing_time)
            .max()
            .unwrap_or(0)
    }

    pub fn total_mold_length(&self) -> Length {
        self.mold_lengths.iter().copied().sum()
    }

    /// `sum_c t_c * sum_k l(c,k) d(c,k)` in centimeter-periods.
    pub fn curing_weighted_demand(&self) -> i64 {
        self.beam_types
            .iter()
            .map(|b| i64::from(b.curing_time) * b.demanded_length().cm())
            .sum()
    }

    /// `sum_c D_c * sum_k l(c,k) d(c,k)` in centimeters.
    pub fn bar_weighted_demand(&self) -> i64 {
        self.beam_types
            .iter()
            .map(|b| i64::from(b.bars_per_beam) * b.demanded_length().cm())
            .sum()
    }

    /// Returns every broken invariant; empty means the instance is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |s: String| out.push(Violation(s));

        if self.horizon < 1 {
            push("horizon must be at least 1".into());
        }
        if self.beam_types.is_empty() {
            push("at least one beam type is required".into());
        }
        if self.mold_lengths.is_empty() {
            push("at least one mold is required".into());
        }
        if self.num_bar_kinds < 1 {
            push("at least one new bar kind is required".into());
        }
        if self.bar_lengths.len() != self.num_bar_kinds + self.num_leftover_kinds {
            push(format!(
                "bars must list W + V = {} lengths, found {}",
                self.num_bar_kinds + self.num_leftover_kinds,
                self.bar_lengths.len()
            ));
        }
        if self.stock.len() != self.bar_lengths.len() {
            push(format!(
                "stock must have one entry per bar kind ({}), found {}",
                self.bar_lengths.len(),
                self.stock.len()
            ));
        }
        for (m, l) in self.mold_lengths.iter().enumerate() {
            if l.cm() <= 0 {
                push(format!("mold lengths must be positive (mold {})", m + 1));
            }
        }
        for (w, l) in self.bar_lengths.iter().enumerate() {
            if l.cm() <= 0 {
                push(format!("bar lengths must be positive (bar {})", w + 1));
            }
        }
        for (c, b) in self.beam_types.iter().enumerate() {
            let c1 = c + 1;
            if b.lengths.is_empty() {
                push(format!("beam type {c1} needs at least one length"));
            }
            if b.lengths.len() != b.demands.len() {
                push(format!(
                    "beam type {c1} has {} lengths but {} demands",
                    b.lengths.len(),
                    b.demands.len()
                ));
            }
            if b.lengths.iter().any(|l| l.cm() <= 0) {
                push(format!("beam lengths must be positive (type {c1})"));
            }
            let mut sorted = b.lengths.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                push(format!("beam lengths must be distinct within type {c1}"));
            }
            if b.curing_time < 1 {
                push(format!("curing time must be at least 1 (type {c1})"));
            }
        }
        if self.overlap_loss.cm() <= 0 {
            push("overlap loss epsilon must be positive".into());
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            push("weights must be nonnegative".into());
        }
        out
    }

    pub fn parse(text: &str) -> Result<Instance> {
        let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        doc.into_instance()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&InstanceDoc::from(self)).expect("serializable");
        s.push('\n');
        s
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    Instance::parse(text)
}

pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    inst.validate()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BeamTypeDoc {
    lengths: Vec<Length>,
    demands: Vec<i64>,
    curing: i64,
    bars_per_beam: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    #[serde(rename = "C")]
    c: i64,
    #[serde(rename = "M")]
    m: i64,
    #[serde(rename = "T")]
    t: i64,
    molds: Vec<Length>,
    beam_types: Vec<BeamTypeDoc>,
    bars: Vec<Length>,
    #[serde(rename = "W")]
    w: i64,
    #[serde(rename = "V")]
    v: i64,
    stock: Vec<i64>,
    epsilon: Length,
    lambda: Vec<f64>,
}

fn count(v: i64, what: &str, out: &mut Vec<Violation>) -> u32 {
    if v < 0 {
        out.push(Violation(format!("{what} must be nonnegative")));
        0
    } else {
        u32::try_from(v).unwrap_or_else(|_| {
            out.push(Violation(format!("{what} is too large")));
            0
        })
    }
}

impl InstanceDoc {
    fn into_instance(self) -> Result<Instance> {
        let mut bad = Vec::new();
        if self.c != self.beam_types.len() as i64 {
            bad.push(Violation(format!(
                "C = {} does not match {} beam types",
                self.c,
                self.beam_types.len()
            )));
        }
        if self.m != self.molds.len() as i64 {
            bad.push(Violation(format!(
                "M = {} does not match {} molds",
                self.m,
                self.molds.len()
            )));
        }
        if self.lambda.len() != 4 {
            bad.push(Violation(format!(
                "lambda must have 4 weights, found {}",
                self.lambda.len()
            )));
        }
        if self.w < 0 || self.v < 0 {
            bad.push(Violation("W and V must be nonnegative".into()));
        }
        if self.w.max(0) + self.v.max(0) != self.bars.len() as i64 {
            bad.push(Violation(format!(
                "W + V = {} does not match {} bar lengths",
                self.w + self.v,
                self.bars.len()
            )));
        }
        let horizon = count(self.t, "horizon T", &mut bad);
        let stock: Vec<u32> = self
            .stock
            .iter()
            .map(|&e| count(e, "stock", &mut bad))
            .collect();
        let beam_types: Vec<BeamType> = self
            .beam_types
            .into_iter()
            .map(|b| BeamType {
                lengths: b.lengths,
                demands: b
                    .demands
                    .iter()
                    .map(|&d| count(d, "demand", &mut bad))
                    .collect(),
                curing_time: count(b.curing, "curing time", &mut bad),
                bars_per_beam: count(b.bars_per_beam, "bars per beam", &mut bad),
            })
            .collect();
        if !bad.is_empty() {
            return Err(Error::Validation(bad));
        }
        let mut weights = [0.0; 4];
        weights.copy_from_slice(&self.lambda);
        let inst = Instance::new(
            horizon,
            beam_types,
            self.molds,
            self.bars,
            self.w as usize,
            stock,
            self.epsilon,
            weights,
        );
        let violations = inst.validate();
        if violations.is_empty() {
            Ok(inst)
        } else {
            Err(Error::Validation(violations))
        }
    }
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        InstanceDoc {
            c: inst.beam_types.len() as i64,
            m: inst.mold_lengths.len() as i64,
            t: i64::from(inst.horizon),
            molds: inst.mold_lengths.clone(),
            beam_types: inst
                .beam_types
                .iter()
                .map(|b| BeamTypeDoc {
                    lengths: b.lengths.clone(),
                    demands: b.demands.iter().map(|&d| i64::from(d)).collect(),
                    curing: i64::from(b.curing_time),
                    bars_per_beam: i64::from(b.bars_per_beam),
                })
                .collect(),
            bars: inst.bar_lengths.clone(),
            w: inst.num_bar_kinds as i64,
            v: inst.num_leftover_kinds as i64,
            stock: inst.stock.iter().map(|&e| i64::from(e)).collect(),
            epsilon: inst.overlap_loss,
            lambda: inst.weights.to_vec(),
        }
    }
}
