//! Parameter-tuning experiments: the fixed nine-trial design, replications
//! over instance batches, and the LBD and S/N summaries.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bound::lower_bound;
use crate::error::{Error, Result};
use crate::eval::decode_schedule;
use crate::ga::{run, CrossoverKind, GaParams};
use crate::instance::Instance;
use crate::patterns::PatternSet;

/// Level indices, one-based, for TP, NG, MUT, RST, AS, CRS, TER.
pub type TrialRow = [u8; 7];

pub const DESIGN_ROWS: [TrialRow; 9] = [
    [1, 1, 1, 2, 2, 1, 1],
    [1, 2, 3, 1, 1, 2, 1],
    [1, 2, 2, 1, 2, 1, 2],
    [1, 1, 2, 2, 1, 2, 2],
    [2, 2, 2, 2, 1, 1, 1],
    [2, 1, 2, 1, 2, 2, 1],
    [2, 1, 3, 1, 1, 1, 2],
    [2, 2, 1, 1, 1, 2, 2],
    [2, 2, 3, 2, 2, 2, 2],
];

pub const TP_LEVELS: [usize; 2] = [25, 50];
/// Generations per packing pattern.
pub const NG_LEVELS: [u64; 2] = [500, 1000];
pub const MUT_LEVELS: [f64; 3] = [0.01, 0.025, 0.05];
/// Fractions of NG.
pub const RST_LEVELS: [f64; 2] = [0.1, 0.2];
/// Constructions per packing pattern.
pub const AS_LEVELS: [usize; 2] = [100, 500];
pub const TER_LEVELS: [f64; 2] = [0.1, 0.2];

/// What the TER fractions multiply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum EliteBasis {
    /// Horizon times the number of packing patterns, capped below TP.
    #[default]
    HorizonPatterns,
    /// The population size.
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum LogBase {
    #[default]
    Natural,
    Ten,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialDesign {
    pub rows: Vec<TrialRow>,
    pub elite_basis: EliteBasis,
}

impl Default for TrialDesign {
    fn default() -> Self {
        TrialDesign {
            rows: DESIGN_ROWS.to_vec(),
            elite_basis: EliteBasis::default(),
        }
    }
}

fn ceil_frac(x: f64, n: u64) -> u64 {
    // round first so 0.1 * 30 gives 3, not 4
    let v = (x * n as f64 * 1e9).round() / 1e9;
    v.ceil() as u64
}

impl TrialDesign {
    /// Parameters for trial `trial` (one-based) on an instance with `r`
    /// packing patterns and horizon `horizon`.
    pub fn params(&self, trial: usize, r: usize, horizon: u32, seed: u64) -> Result<GaParams> {
        let row = trial
            .checked_sub(1)
            .and_then(|i| self.rows.get(i))
            .ok_or_else(|| Error::InvalidParams(format!("no trial {trial}")))?;
        let lvl = |j: usize, n: usize| -> Result<usize> {
            let l = usize::from(row[j]);
            if (1..=n).contains(&l) {
                Ok(l - 1)
            } else {
                Err(Error::InvalidParams(format!(
                    "level {l} out of range in trial {trial}"
                )))
            }
        };
        let r = r.max(1);
        let population_size = TP_LEVELS[lvl(0, 2)?];
        let generations = NG_LEVELS[lvl(1, 2)?] * r as u64;
        let elite_base = match self.elite_basis {
            EliteBasis::HorizonPatterns => u64::from(horizon) * r as u64,
            EliteBasis::Population => population_size as u64,
        };
        let restart_elites =
            (ceil_frac(TER_LEVELS[lvl(6, 2)?], elite_base) as usize).min(population_size - 1);
        Ok(GaParams {
            population_size,
            generations,
            mutation_rate: MUT_LEVELS[lvl(2, 3)?],
            restart_patience: ceil_frac(RST_LEVELS[lvl(3, 2)?], generations),
            construction_pool: AS_LEVELS[lvl(4, 2)?] * r,
            crossover: CrossoverKind::from_index(u32::from(row[5]))?,
            restart_elites,
            seed,
        })
    }
}

/// Relative deviation of `fit` from the lower bound `lb`.
pub fn lbd(fit: f64, lb: f64) -> Result<f64> {
    if lb.is_nan() || lb <= 0.0 {
        return Err(Error::Domain(format!(
            "lower bound must be positive, got {lb}"
        )));
    }
    Ok((fit - lb) / lb)
}

/// Signal-to-noise ratio for smaller-is-better values, natural log.
pub fn snr(fits: &[f64]) -> Result<f64> {
    snr_with(fits, LogBase::Natural)
}

pub fn snr_with(fits: &[f64], base: LogBase) -> Result<f64> {
    if fits.is_empty() {
        return Err(Error::Domain("no values".into()));
    }
    let ms = fits.iter().map(|f| f * f).sum::<f64>() / fits.len() as f64;
    if ms.is_nan() || ms <= 0.0 {
        return Err(Error::Domain("mean square is zero".into()));
    }
    Ok(match base {
        LogBase::Natural => -10.0 * ms.ln(),
        LogBase::Ten => -10.0 * ms.log10(),
    })
}

/// An instance prepared for a batch: patterns and bound computed once.
#[derive(Debug, Clone)]
pub struct BatchInstance {
    pub name: String,
    pub instance: Instance,
    pub patterns: PatternSet,
    pub bound: f64,
}

impl BatchInstance {
    pub fn prepare(name: impl Into<String>, instance: Instance) -> Result<Self> {
        let patterns = PatternSet::enumerate(&instance);
        let bound = lower_bound(&instance, &patterns)?.total;
        Ok(BatchInstance {
            name: name.into(),
            instance,
            patterns,
            bound,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replication {
    pub trial: usize,
    pub instance: String,
    pub rep: usize,
    pub seed: u64,
    /// `None` when the solver produced no solution.
    pub fitness: Option<f64>,
    pub makespan: Option<u32>,
    pub lbd: Option<f64>,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub replications: Vec<Replication>,
    pub lbd_mean: Option<f64>,
    pub snr: Option<f64>,
    pub avg_time_s: f64,
    /// Replications without a solution, left out of the aggregates.
    pub missing: usize,
}

impl TrialResult {
    pub fn aggregate(trial: usize, replications: Vec<Replication>, base: LogBase) -> Self {
        let fits: Vec<f64> = replications.iter().filter_map(|r| r.fitness).collect();
        let lbds: Vec<f64> = replications.iter().filter_map(|r| r.lbd).collect();
        let n = replications.len().max(1) as f64;
        TrialResult {
            trial,
            lbd_mean: (!lbds.is_empty()).then(|| lbds.iter().sum::<f64>() / lbds.len() as f64),
            snr: snr_with(&fits, base).ok(),
            avg_time_s: replications.iter().map(|r| r.time_s).sum::<f64>() / n,
            missing: replications.len() - fits.len(),
            replications,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunOptions {
    pub replications: usize,
    pub seed: u64,
    /// Record wall time; off gives zero times and byte-stable output.
    pub timing: bool,
    pub log_base: LogBase,
}

/// Seed of one replication, independent of scheduling order.
pub fn replication_seed(seed: u64, trial: usize, instance: usize, rep: usize) -> u64 {
    let mut x = seed;
    for v in [trial as u64, instance as u64, rep as u64] {
        x = splitmix(x ^ splitmix(v));
    }
    x
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs the selected trials (one-based) on every instance. Replications run
/// in parallel on the current rayon pool; results come back in
/// trial, instance, replication order.
pub fn run_trials(
    design: &TrialDesign,
    trials: &[usize],
    batch: &[BatchInstance],
    opts: RunOptions,
) -> Result<Vec<TrialResult>> {
    if batch.is_empty() {
        return Err(Error::InvalidParams("no instances".into()));
    }
    if let Some(b) = batch.iter().find(|b| b.bound.is_nan() || b.bound <= 0.0) {
        return Err(Error::Domain(format!(
            "instance {} has lower bound {}",
            b.name, b.bound
        )));
    }
    let mut tasks = Vec::new();
    for &t in trials {
        for (i, b) in batch.iter().enumerate() {
            let params = design.params(t, b.patterns.num_packing(), b.instance.horizon, 0)?;
            for rep in 0..opts.replications {
                let mut p = params.clone();
                p.seed = replication_seed(opts.seed, t, i, rep);
                tasks.push((t, i, rep, p));
            }
        }
    }
    let reps: Vec<Replication> = tasks
        .into_par_iter()
        .map(|(t, i, rep, p)| {
            let b = &batch[i];
            let start = Instant::now();
            let out = run(&b.instance, &b.patterns, &p).ok();
            let time_s = if opts.timing {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            };
            let fitness = out.as_ref().map(|o| o.fitness);
            Replication {
                trial: t,
                instance: b.name.clone(),
                rep,
                seed: p.seed,
                fitness,
                makespan: out
                    .as_ref()
                    .and_then(|o| decode_schedule(&o.best, &b.instance, &b.patterns).ok())
                    .map(|s| s.makespan),
                lbd: fitness.and_then(|f| lbd(f, b.bound).ok()),
                time_s,
            }
        })
        .collect();
    let mut results = Vec::new();
    let mut it = reps.into_iter().peekable();
    for &t in trials {
        let mut rows = Vec::new();
        while let Some(r) = it.next_if(|r| r.trial == t) {
            rows.push(r);
        }
        results.push(TrialResult::aggregate(t, rows, opts.log_base));
    }
    Ok(results)
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(String::new, |x| format!("{x:.digits$}"))
}

/// Per-replication CSV.
pub fn results_csv(results: &[TrialResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Domain(e.to_string());
    w.write_record([
        "trial", "instance", "rep", "seed", "fitness", "makespan", "lbd", "time_s",
    ])
    .map_err(io)?;
    for t in results {
        for r in &t.replications {
            w.write_record([
                r.trial.to_string(),
                r.instance.clone(),
                r.rep.to_string(),
                r.seed.to_string(),
                opt(r.fitness, 2),
                r.makespan.map_or_else(String::new, |m| m.to_string()),
                opt(r.lbd, 6),
                format!("{:.3}", r.time_s),
            ])
            .map_err(io)?;
        }
    }
    finish(w)
}

/// Per-trial aggregate CSV.
pub fn trials_csv(results: &[TrialResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Domain(e.to_string());
    w.write_record(["trial", "lbd_mean", "snr", "avg_time_s"])
        .map_err(io)?;
    for t in results {
        w.write_record([
            t.trial.to_string(),
            opt(t.lbd_mean, 6),
            opt(t.snr, 6),
            format!("{:.3}", t.avg_time_s),
        ])
        .map_err(io)?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Domain(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::cwp000;

    #[test]
    fn metric_values() {
        assert!((lbd(2.3, 2.2).unwrap() - 0.045_454_545_454_545).abs() < 1e-12);
        assert_eq!(lbd(3.0, 3.0).unwrap(), 0.0);
        assert_eq!(lbd(4.0, 2.0).unwrap(), 1.0);
        assert!(lbd(1.0, 0.0).is_err());
        assert_eq!(snr(&[1.0]).unwrap(), 0.0);
        assert!((snr(&[2.0, 2.0]).unwrap() + 13.862_943_611_198_906).abs() < 1e-9);
        assert!((snr_with(&[10.0], LogBase::Ten).unwrap() + 20.0).abs() < 1e-12);
        assert!(snr(&[0.0]).is_err());
        assert!(snr(&[]).is_err());
    }

    #[test]
    fn design_levels() {
        let d = TrialDesign::default();
        let p = d.params(1, 6, 3, 0).unwrap();
        assert_eq!(p.population_size, 25);
        assert_eq!(p.generations, 3000);
        assert_eq!(p.mutation_rate, 0.01);
        assert_eq!(p.restart_patience, 600);
        assert_eq!(p.construction_pool, 3000);
        assert_eq!(p.crossover, CrossoverKind::Mean);
        assert_eq!(p.restart_elites, 2);
        let p = d.params(9, 6, 3, 0).unwrap();
        assert_eq!(
            (p.population_size, p.generations, p.restart_elites),
            (50, 6000, 4)
        );
        assert_eq!(p.crossover, CrossoverKind::Coin);
        assert!(d.params(10, 6, 3, 0).is_err());
        for t in 1..=9 {
            assert!(d.params(t, 200, 40, 0).unwrap().validate().is_ok());
        }
        let pop = TrialDesign {
            elite_basis: EliteBasis::Population,
            ..TrialDesign::default()
        };
        assert_eq!(pop.params(1, 6, 3, 0).unwrap().restart_elites, 3);
    }

    #[test]
    fn trials_are_deterministic() {
        let b = BatchInstance::prepare("cwp000", cwp000()).unwrap();
        let design = TrialDesign::default();
        let opts = RunOptions {
            replications: 2,
            seed: 5,
            timing: false,
            log_base: LogBase::Natural,
        };
        let mut small = design.clone();
        for row in &mut small.rows {
            row[1] = 1;
            row[4] = 1;
        }
        let a = run_trials(&small, &[1, 2], &[b.clone(), b.clone()], opts).unwrap();
        let c = run_trials(&small, &[1, 2], &[b.clone(), b], opts).unwrap();
        assert_eq!(results_csv(&a).unwrap(), results_csv(&c).unwrap());
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].replications.len(), 4);
        for t in &a {
            let mean = t.replications.iter().filter_map(|r| r.lbd).sum::<f64>() / 4.0;
            assert!((t.lbd_mean.unwrap() - mean).abs() < 1e-12);
            for r in &t.replications {
                assert!(r.lbd.unwrap() >= 0.0);
            }
        }
        let csv = trials_csv(&a).unwrap();
        assert!(csv.starts_with("trial,lbd_mean,snr,avg_time_s\n1,"));
    }
}
