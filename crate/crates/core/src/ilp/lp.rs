//! LP file text: writer and a reader for the subset the writer produces.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ilp::model::{IlpModel, Sense};

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub name: String,
    pub terms: Vec<(f64, String)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Section-level structure of an LP file.
#[derive(Debug, Clone, PartialEq)]
pub struct LpDocument {
    pub objective_name: String,
    pub objective: Vec<(f64, String)>,
    pub rows: Vec<LpRow>,
    /// Variables fixed to a value in the Bounds section.
    pub fixed: Vec<(String, f64)>,
    pub generals: Vec<String>,
    pub binaries: Vec<String>,
}

impl LpDocument {
    pub fn from_model(model: &IlpModel) -> Self {
        let name = |k: usize| model.vars[k].name.clone();
        let z1 = model
            .vars
            .iter()
            .position(|v| v.name == "z_1")
            .map(name)
            .unwrap_or_else(|| "z_1".into());
        let mut objective: Vec<(f64, String)> =
            model.objective.iter().map(|&(k, c)| (c, name(k))).collect();
        if objective.is_empty() {
            objective.push((0.0, z1.clone()));
        }
        let rows = model
            .rows
            .iter()
            .map(|r| {
                let mut terms: Vec<(f64, String)> =
                    r.terms.iter().map(|&(k, c)| (c as f64, name(k))).collect();
                if terms.is_empty() {
                    terms.push((0.0, z1.clone()));
                }
                LpRow {
                    name: r.name.clone(),
                    terms,
                    sense: r.sense,
                    rhs: r.rhs as f64,
                }
            })
            .collect();
        LpDocument {
            objective_name: "obj".into(),
            objective,
            rows,
            fixed: model
                .vars
                .iter()
                .filter(|v| v.fixed_zero)
                .map(|v| (v.name.clone(), 0.0))
                .collect(),
            generals: model
                .vars
                .iter()
                .filter(|v| !v.binary)
                .map(|v| v.name.clone())
                .collect(),
            binaries: model
                .vars
                .iter()
                .filter(|v| v.binary)
                .map(|v| v.name.clone())
                .collect(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str("Minimize\n");
        let _ = writeln!(
            s,
            " {}: {}",
            self.objective_name,
            render_terms(&self.objective)
        );
        s.push_str("Subject To\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                " {}: {} {} {}",
                r.name,
                render_terms(&r.terms),
                r.sense.symbol(),
                r.rhs
            );
        }
        s.push_str("Bounds\n");
        for (v, x) in &self.fixed {
            let _ = writeln!(s, " {v} = {x}");
        }
        s.push_str("Generals\n");
        for v in &self.generals {
            let _ = writeln!(s, " {v}");
        }
        s.push_str("Binaries\n");
        for v in &self.binaries {
            let _ = writeln!(s, " {v}");
        }
        s.push_str("End\n");
        s
    }

    pub fn parse(text: &str) -> Result<LpDocument> {
        #[derive(PartialEq)]
        enum Section {
            Start,
            Objective,
            Rows,
            Bounds,
            Generals,
            Binaries,
            End,
        }
        let mut doc = LpDocument {
            objective_name: String::new(),
            objective: Vec::new(),
            rows: Vec::new(),
            fixed: Vec::new(),
            generals: Vec::new(),
            binaries: Vec::new(),
        };
        let mut section = Section::Start;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |message: String| Error::Syntax {
                line: line_no,
                column: 1,
                message,
            };
            let line = raw.split('\\').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.to_ascii_lowercase().as_str() {
                "minimize" => {
                    section = Section::Objective;
                    continue;
                }
                "subject to" => {
                    section = Section::Rows;
                    continue;
                }
                "bounds" => {
                    section = Section::Bounds;
                    continue;
                }
                "generals" => {
                    section = Section::Generals;
                    continue;
                }
                "binaries" => {
                    section = Section::Binaries;
                    continue;
                }
                "end" => {
                    section = Section::End;
                    continue;
                }
                _ => {}
            }
            match section {
                Section::Start | Section::End => {
                    return Err(err(format!("unexpected text outside a section: {line}")))
                }
                Section::Objective => {
                    let (name, body) =
                        split_label(line).ok_or_else(|| err("missing objective label".into()))?;
                    doc.objective_name = name.into();
                    doc.objective = parse_terms(body).map_err(err)?;
                }
                Section::Rows => {
                    let (name, body) =
                        split_label(line).ok_or_else(|| err("missing row label".into()))?;
                    let (sense, at, width) =
                        find_sense(body).ok_or_else(|| err("missing comparison".into()))?;
                    let rhs = body[at + width..]
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| err(format!("bad right-hand side: {e}")))?;
                    doc.rows.push(LpRow {
                        name: name.into(),
                        terms: parse_terms(&body[..at]).map_err(err)?,
                        sense,
                        rhs,
                    });
                }
                Section::Bounds => {
                    let (var, value) = line
                        .split_once('=')
                        .ok_or_else(|| err("only fixed bounds are supported".into()))?;
                    let value = value
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| err(format!("bad bound: {e}")))?;
                    doc.fixed.push((var.trim().into(), value));
                }
                Section::Generals => doc
                    .generals
                    .extend(line.split_whitespace().map(String::from)),
                Section::Binaries => doc
                    .binaries
                    .extend(line.split_whitespace().map(String::from)),
            }
        }
        if section != Section::End {
            return Err(Error::Syntax {
                line: text.lines().count(),
                column: 1,
                message: "missing End".into(),
            });
        }
        Ok(doc)
    }
}

pub fn emit_lp(model: &IlpModel) -> String {
    LpDocument::from_model(model).render()
}

fn render_terms(terms: &[(f64, String)]) -> String {
    let mut s = String::new();
    for (n, (c, v)) in terms.iter().enumerate() {
        let neg = c.is_sign_negative() && *c != 0.0;
        match (n, neg) {
            (0, false) => {
                let _ = write!(s, "{c} {v}");
            }
            (0, true) => {
                let _ = write!(s, "- {} {v}", -c);
            }
            (_, false) => {
                let _ = write!(s, " + {c} {v}");
            }
            (_, true) => {
                let _ = write!(s, " - {} {v}", -c);
            }
        }
    }
    s
}

fn split_label(line: &str) -> Option<(&str, &str)> {
    let (name, body) = line.split_once(':')?;
    Some((name.trim(), body.trim()))
}

fn find_sense(body: &str) -> Option<(Sense, usize, usize)> {
    for (sym, sense) in [("<=", Sense::Le), (">=", Sense::Ge), ("=", Sense::Eq)] {
        if let Some(at) = body.find(sym) {
            return Some((sense, at, sym.len()));
        }
    }
    None
}

fn parse_terms(body: &str) -> std::result::Result<Vec<(f64, String)>, String> {
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for tok in body.split_whitespace() {
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ => {
                if let Ok(x) = tok.parse::<f64>() {
                    if coef.is_some() {
                        return Err(format!("two coefficients in a row at {tok}"));
                    }
                    coef = Some(x);
                } else {
                    out.push((sign * coef.take().unwrap_or(1.0), tok.to_string()));
                    sign = 1.0;
                }
            }
        }
    }
    if coef.is_some() {
        return Err("coefficient without a variable".into());
    }
    Ok(out)
}
