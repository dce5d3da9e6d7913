use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::eval::{decode_schedule, Chromosome, Objective};
use crate::instance::Instance;
use crate::patterns::{CutKind, PatternId, PatternRef, PatternSet};
use crate::units::Length;

/// Identifies a variable. Molds are zero-based, periods one-based, bar and
/// leftover kinds zero-based; names use one-based numbers throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKey {
    /// Packing pattern `i` starts in mold `m` at period `t`; `i = 0` marks a
    /// period still curing an earlier start.
    X {
        i: u32,
        m: usize,
        t: u32,
    },
    Z {
        t: u32,
    },
    /// Cutting pattern `h` applied to bar kind `w` with no leftover produced.
    Y {
        h: PatternId,
        w: usize,
    },
    /// Cutting pattern `h` applied to new bar `w` producing leftover kind `v`.
    Yl {
        h: PatternId,
        w: usize,
        v: usize,
    },
    O {
        u: PatternId,
    },
}

impl VarKey {
    pub fn family(&self) -> Family {
        match self {
            VarKey::X { .. } => Family::X,
            VarKey::Z { .. } => Family::Z,
            VarKey::Y { .. } => Family::Y,
            VarKey::Yl { .. } => Family::Yl,
            VarKey::O { .. } => Family::O,
        }
    }
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarKey::X { i, m, t } => write!(f, "x_{i}_{}_{t}", m + 1),
            VarKey::Z { t } => write!(f, "z_{t}"),
            VarKey::Y { h, w } => write!(f, "y_{h}_{}", w + 1),
            VarKey::Yl { h, w, v } => write!(f, "yl_{h}_{}_{}", w + 1, v + 1),
            VarKey::O { u } => write!(f, "o_{u}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    X,
    Z,
    Y,
    Yl,
    O,
}

/// Which objective term a variable's waste belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WasteTerm {
    NewBar,
    NewBarWithLeftover,
    Leftover,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub key: VarKey,
    pub name: String,
    pub binary: bool,
    /// Fixed to zero because the pattern could not finish within the horizon.
    pub fixed_zero: bool,
    pub waste: Option<(WasteTerm, Length)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    /// At most one pattern per mold and period.
    OnePerSlot,
    /// Beam demand coverage.
    Demand,
    /// A started pattern keeps its mold for its curing time.
    Curing,
    /// No curing marker in the first period.
    NoIdleStart,
    /// A curing marker needs an earlier unfinished start.
    CuringLink,
    /// Period activity indicator.
    Active,
    /// Molds work without gaps.
    Continuity,
    /// Leftover stock.
    LeftoverStock,
    /// New bar stock.
    NewBarStock,
    /// Bars produced equal bars required, per mold class.
    Balance,
}

impl Group {
    pub const ALL: [Group; 10] = [
        Group::OnePerSlot,
        Group::Demand,
        Group::Curing,
        Group::NoIdleStart,
        Group::CuringLink,
        Group::Active,
        Group::Continuity,
        Group::LeftoverStock,
        Group::NewBarStock,
        Group::Balance,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            Group::OnePerSlot => "slot",
            Group::Demand => "demand",
            Group::Curing => "curing",
            Group::NoIdleStart => "nostart",
            Group::CuringLink => "link",
            Group::Active => "active",
            Group::Continuity => "cont",
            Group::LeftoverStock => "lstock",
            Group::NewBarStock => "bstock",
            Group::Balance => "balance",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub group: Group,
    pub name: String,
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlpModel {
    pub vars: Vec<Variable>,
    /// Objective coefficients per variable, in meters for waste terms.
    pub objective: Vec<(usize, f64)>,
    pub rows: Vec<Row>,
    pub weights: [f64; 4],
    index: HashMap<VarKey, usize>,
}

/// One value per model variable, in model order.
pub type Assignment = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowViolation {
    /// `None` for a variable domain violation.
    pub group: Option<Group>,
    pub name: String,
    pub lhs: i64,
    pub rhs: i64,
}

impl fmt::Display for RowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.group {
            Some(g) => write!(
                f,
                "{:?} row {}: lhs {} vs rhs {}",
                g, self.name, self.lhs, self.rhs
            ),
            None => write!(f, "domain of {}: value {}", self.name, self.lhs),
        }
    }
}

struct Builder {
    vars: Vec<Variable>,
    index: HashMap<VarKey, usize>,
}

impl Builder {
    fn add(
        &mut self,
        key: VarKey,
        binary: bool,
        fixed_zero: bool,
        waste: Option<(WasteTerm, Length)>,
    ) {
        self.index.insert(key, self.vars.len());
        self.vars.push(Variable {
            key,
            name: key.to_string(),
            binary,
            fixed_zero,
            waste,
        });
    }
}

impl IlpModel {
    pub fn var(&self, key: VarKey) -> Option<usize> {
        self.index.get(&key).copied()
    }

    pub fn count_vars(&self, family: Family) -> usize {
        self.vars
            .iter()
            .filter(|v| v.key.family() == family)
            .count()
    }

    pub fn count_rows(&self, group: Group) -> usize {
        self.rows.iter().filter(|r| r.group == group).count()
    }

    /// Objective components of an assignment.
    pub fn objective_of(&self, a: &Assignment) -> Result<Objective> {
        self.check_len(a)?;
        let mut o = Objective::default();
        for (v, &x) in self.vars.iter().zip(a) {
            match (v.key, v.waste) {
                (VarKey::Z { .. }, _) => o.makespan += x as u32,
                (_, Some((term, waste))) => {
                    let w = Length::from_cm(waste.cm() * x);
                    match term {
                        WasteTerm::NewBar => o.new_bar_waste += w,
                        WasteTerm::NewBarWithLeftover => o.new_bar_leftover_waste += w,
                        WasteTerm::Leftover => o.leftover_waste += w,
                    }
                }
                _ => {}
            }
        }
        Ok(o)
    }

    pub fn objective_value(&self, a: &Assignment) -> Result<f64> {
        Ok(self.objective_of(a)?.value(&self.weights))
    }

    fn check_len(&self, a: &Assignment) -> Result<()> {
        if a.len() == self.vars.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                got: a.len(),
            })
        }
    }
}

/// Packing patterns admitted by each mold: those built for its class.
fn admitted(inst: &Instance, pats: &PatternSet, m: usize) -> Vec<usize> {
    let g = inst.class_of_mold(m);
    (0..pats.packing.len())
        .filter(|&i| pats.packing[i].mold_class == g)
        .collect()
}

pub fn build_model(inst: &Instance, pats: &PatternSet) -> IlpModel {
    let t_max = inst.horizon;
    let nm = inst.num_molds();
    let mut b = Builder {
        vars: Vec::new(),
        index: HashMap::new(),
    };
    let q: Vec<Vec<usize>> = (0..nm).map(|m| admitted(inst, pats, m)).collect();

    for (m, qm) in q.iter().enumerate() {
        for t in 1..=t_max {
            b.add(VarKey::X { i: 0, m, t }, true, false, None);
            for &i in qm {
                let p = &pats.packing[i];
                let late = t + p.duration > t_max + 1;
                b.add(VarKey::X { i: p.id.0, m, t }, true, late, None);
            }
        }
    }
    for t in 1..=t_max {
        b.add(VarKey::Z { t }, true, false, None);
    }
    for h in &pats.cutting {
        let (key, term) = match h.kind(inst) {
            CutKind::NewBar => (
                VarKey::Y {
                    h: h.id,
                    w: h.source_bar,
                },
                WasteTerm::NewBar,
            ),
            CutKind::NewBarWithLeftover(v) => (
                VarKey::Yl {
                    h: h.id,
                    w: h.source_bar,
                    v,
                },
                WasteTerm::NewBarWithLeftover,
            ),
            CutKind::LeftoverBar => (
                VarKey::Y {
                    h: h.id,
                    w: h.source_bar,
                },
                WasteTerm::Leftover,
            ),
        };
        b.add(key, false, false, Some((term, h.waste)));
    }
    for o in &pats.overlapping {
        b.add(
            VarKey::O { u: o.id },
            false,
            false,
            Some((WasteTerm::Leftover, o.waste)),
        );
    }

    let idx = |key: VarKey| b.index[&key];
    let x = |i: u32, m: usize, t: u32| idx(VarKey::X { i, m, t });
    let slot = |m: usize, t: u32| {
        let mut terms = vec![(x(0, m, t), 1)];
        terms.extend(q[m].iter().map(|&i| (x(pats.packing[i].id.0, m, t), 1)));
        terms
    };

    let w = inst.weights;
    let mut objective = Vec::new();
    for (k, v) in b.vars.iter().enumerate() {
        let coef = match (v.key, v.waste) {
            (VarKey::Z { .. }, _) => w[0],
            (_, Some((term, waste))) => {
                let lambda = match term {
                    WasteTerm::NewBar => w[1],
                    WasteTerm::NewBarWithLeftover => w[2],
                    WasteTerm::Leftover => w[3],
                };
                lambda * waste.cm() as f64 / 100.0
            }
            _ => continue,
        };
        objective.push((k, coef));
    }

    let mut rows = Vec::new();
    let mut push = |group: Group, suffix: String, terms: Vec<(usize, i64)>, sense, rhs| {
        rows.push(Row {
            group,
            name: format!("{}_{}", group.prefix(), suffix),
            terms,
            sense,
            rhs,
        });
    };

    for m in 0..nm {
        for t in 1..=t_max {
            push(
                Group::OnePerSlot,
                format!("m{}_t{t}", m + 1),
                slot(m, t),
                Sense::Le,
                1,
            );
        }
    }
    for (c, beam) in inst.beam_types.iter().enumerate() {
        for (k, &d) in beam.demands.iter().enumerate() {
            let mut terms = Vec::new();
            for (m, qm) in q.iter().enumerate() {
                for &i in qm {
                    let p = &pats.packing[i];
                    let a = p.beams(c, k);
                    if a == 0 {
                        continue;
                    }
                    for t in 1..=(t_max + 1).saturating_sub(p.duration) {
                        terms.push((x(p.id.0, m, t), i64::from(a)));
                    }
                }
            }
            push(
                Group::Demand,
                format!("c{}_k{}", c + 1, k + 1),
                terms,
                Sense::Ge,
                i64::from(d),
            );
        }
    }
    for (m, qm) in q.iter().enumerate() {
        for &i in qm {
            let p = &pats.packing[i];
            if p.duration < 2 {
                continue;
            }
            for t in 1..=(t_max + 1).saturating_sub(p.duration) {
                let mut terms = vec![(x(p.id.0, m, t), i64::from(p.duration) - 1)];
                for a in 1..p.duration {
                    terms.push((x(0, m, t + a), -1));
                }
                push(
                    Group::Curing,
                    format!("i{}_m{}_t{t}", p.id, m + 1),
                    terms,
                    Sense::Le,
                    0,
                );
            }
        }
    }
    for m in 0..nm {
        push(
            Group::NoIdleStart,
            format!("m{}", m + 1),
            vec![(x(0, m, 1), 1)],
            Sense::Eq,
            0,
        );
    }
    let r_max = inst.max_curing();
    for (m, qm) in q.iter().enumerate() {
        for t in 2..=t_max {
            let mut terms = vec![(x(0, m, t), 1)];
            for gamma in 2..=r_max {
                if gamma > t {
                    break;
                }
                for &i in qm {
                    let p = &pats.packing[i];
                    if p.duration >= gamma {
                        terms.push((x(p.id.0, m, t - gamma + 1), -1));
                    }
                }
            }
            push(
                Group::CuringLink,
                format!("m{}_t{t}", m + 1),
                terms,
                Sense::Le,
                0,
            );
        }
    }
    for t in 1..=t_max {
        let mut terms = vec![(idx(VarKey::Z { t }), nm as i64)];
        for m in 0..nm {
            terms.extend(slot(m, t).into_iter().map(|(k, _)| (k, -1)));
        }
        push(Group::Active, format!("t{t}"), terms, Sense::Ge, 0);
    }
    for m in 0..nm {
        for t in 1..t_max {
            let mut terms = slot(m, t);
            terms.extend(slot(m, t + 1).into_iter().map(|(k, _)| (k, -1)));
            push(
                Group::Continuity,
                format!("m{}_t{t}", m + 1),
                terms,
                Sense::Ge,
                0,
            );
        }
    }
    for v in 0..inst.num_leftover_kinds {
        let wv = inst.num_bar_kinds + v;
        let mut terms = Vec::new();
        for h in pats.cutting.iter().filter(|h| h.source_bar == wv) {
            terms.push((idx(VarKey::Y { h: h.id, w: wv }), 1));
        }
        for o in &pats.overlapping {
            if o.leftover_counts[v] > 0 {
                terms.push((idx(VarKey::O { u: o.id }), i64::from(o.leftover_counts[v])));
            }
        }
        push(
            Group::LeftoverStock,
            format!("w{}", wv + 1),
            terms,
            Sense::Le,
            i64::from(inst.stock[wv]),
        );
    }
    for wn in 0..inst.num_bar_kinds {
        let terms = pats
            .cutting
            .iter()
            .filter(|h| h.source_bar == wn)
            .map(|h| (b.index[&cut_key(inst, pats, h.id)], 1))
            .collect();
        push(
            Group::NewBarStock,
            format!("w{}", wn + 1),
            terms,
            Sense::Le,
            i64::from(inst.stock[wn]),
        );
    }
    for g in 0..inst.num_classes() {
        let mut terms = Vec::new();
        for h in &pats.cutting {
            if h.item_counts[g] > 0 {
                terms.push((
                    b.index[&cut_key(inst, pats, h.id)],
                    i64::from(h.item_counts[g]),
                ));
            }
        }
        for o in pats.overlapping.iter().filter(|o| o.produced_class == g) {
            terms.push((idx(VarKey::O { u: o.id }), 1));
        }
        for &m in inst.molds_in_class(g) {
            for &i in &q[m] {
                let p = &pats.packing[i];
                let d = i64::from(inst.beam_types[p.beam_type].bars_per_beam);
                if d == 0 {
                    continue;
                }
                for t in 1..=t_max {
                    terms.push((x(p.id.0, m, t), -d));
                }
            }
        }
        push(Group::Balance, format!("g{}", g + 1), terms, Sense::Eq, 0);
    }

    IlpModel {
        vars: b.vars,
        objective,
        rows,
        weights: w,
        index: b.index,
    }
}

fn cut_key(inst: &Instance, pats: &PatternSet, id: PatternId) -> VarKey {
    match pats.get(id) {
        Some(PatternRef::Cutting(h)) => match h.kind(inst) {
            CutKind::NewBarWithLeftover(v) => VarKey::Yl {
                h: id,
                w: h.source_bar,
                v,
            },
            _ => VarKey::Y {
                h: id,
                w: h.source_bar,
            },
        },
        _ => unreachable!("cutting pattern id"),
    }
}

/// Rows and variable domains the assignment violates; empty means feasible.
pub fn check_assignment(model: &IlpModel, a: &Assignment) -> Result<Vec<RowViolation>> {
    model.check_len(a)?;
    let mut out = Vec::new();
    for (v, &x) in model.vars.iter().zip(a) {
        let ok = if v.fixed_zero {
            x == 0
        } else if v.binary {
            x == 0 || x == 1
        } else {
            x >= 0
        };
        if !ok {
            out.push(RowViolation {
                group: None,
                name: v.name.clone(),
                lhs: x,
                rhs: 0,
            });
        }
    }
    for r in &model.rows {
        let lhs: i64 = r.terms.iter().map(|&(k, c)| c * a[k]).sum();
        if !r.sense.holds(lhs, r.rhs) {
            out.push(RowViolation {
                group: Some(r.group),
                name: r.name.clone(),
                lhs,
                rhs: r.rhs,
            });
        }
    }
    Ok(out)
}

/// The model assignment corresponding to a chromosome's decoded schedule.
pub fn induced_assignment(
    model: &IlpModel,
    ch: &Chromosome,
    inst: &Instance,
    pats: &PatternSet,
) -> Result<Assignment> {
    let schedule = decode_schedule(ch, inst, pats)?;
    let mut a = vec![0i64; model.vars.len()];
    let mut set = |key: VarKey, value: i64| -> Result<()> {
        let k = model
            .var(key)
            .ok_or_else(|| Error::Domain(format!("model has no variable {key}")))?;
        a[k] += value;
        Ok(())
    };
    for (m, placements) in schedule.molds.iter().enumerate() {
        for p in placements {
            set(
                VarKey::X {
                    i: p.pattern.0,
                    m,
                    t: p.start,
                },
                1,
            )?;
            for t in p.start + 1..p.start + p.duration {
                set(VarKey::X { i: 0, m, t }, 1)?;
            }
        }
    }
    for t in 1..=schedule.makespan {
        set(VarKey::Z { t }, 1)?;
    }
    for g in &ch.genes {
        match pats.get(g.pattern) {
            Some(PatternRef::Cutting(_)) => set(cut_key(inst, pats, g.pattern), i64::from(g.freq))?,
            Some(PatternRef::Overlapping(_)) => set(VarKey::O { u: g.pattern }, i64::from(g.freq))?,
            Some(PatternRef::Packing(_)) => {}
            None => return Err(Error::UnknownPattern(g.pattern)),
        }
    }
    Ok(a)
}
