//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits
//! nonzero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use beamforge_core::eval::{classify_infeasibility, exhaustive_optimum, SearchCaps};
use beamforge_core::experiment::{lbd, snr};
use beamforge_core::ga::{self, is_admissible, random_solution, repair, GaParams};
use beamforge_core::ilp::{
    build_model, check_assignment, emit_lp, induced_assignment, Family, Group,
};
use beamforge_core::reference::cwp000;
use beamforge_core::{
    decode_schedule, default_horizon, fitness, generate_instance, lower_bound, Chromosome, Error,
    Gene, Instance, PackingMode, PatternId, PatternSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn setup() -> (Instance, PatternSet) {
    let inst = cwp000();
    let pats = PatternSet::enumerate(&inst);
    (inst, pats)
}

fn cm(x: f64) -> i64 {
    (x * 100.0).round() as i64
}

fn patterns_golden() -> Check {
    let start = Instant::now();
    let (inst, pats) = setup();
    // (beam type, used capacity, a1, a2)
    let packing = [
        (1, 5.6, 5, 0),
        (1, 5.54, 2, 1),
        (1, 11.2, 10, 0),
        (1, 11.14, 7, 1),
        (1, 11.08, 4, 2),
        (1, 11.02, 1, 3),
    ];
    ensure(
        pats.packing.len() == 6,
        format!("{} packing patterns", pats.packing.len()),
    )?;
    for (p, &(c, cap, a1, a2)) in pats.packing.iter().zip(&packing) {
        ensure(
            p.beam_type + 1 == c && p.used_capacity.cm() == cm(cap) && p.counts == vec![a1, a2],
            format!("packing {} differs", p.id),
        )?;
    }
    // (source bar, used capacity, counts over 5.95, 11.95, then leftovers 2, 5, 6, 8)
    let cutting: [(usize, f64, [u32; 6]); 10] = [
        (1, 5.95, [1, 0, 0, 0, 0, 0]),
        (1, 7.95, [1, 0, 1, 0, 0, 0]),
        (1, 9.95, [1, 0, 2, 0, 0, 0]),
        (1, 11.95, [1, 0, 3, 0, 0, 0]),
        (4, 5.95, [1, 0, 0, 0, 0, 0]),
        (5, 5.95, [1, 0, 0, 0, 0, 0]),
        (1, 11.95, [1, 0, 0, 0, 1, 0]),
        (1, 10.95, [1, 0, 0, 1, 0, 0]),
        (1, 11.9, [2, 0, 0, 0, 0, 0]),
        (1, 11.95, [0, 1, 0, 0, 0, 0]),
    ];
    let mut got: Vec<(usize, i64, Vec<u32>)> = pats
        .cutting
        .iter()
        .map(|h| {
            let bar = inst.bar_lengths[h.source_bar];
            let mut counts = h.item_counts.clone();
            counts.extend(&h.leftover_counts);
            (h.source_bar + 1, (bar - h.waste).cm(), counts)
        })
        .collect();
    let mut want: Vec<(usize, i64, Vec<u32>)> = cutting
        .iter()
        .map(|&(s, c, a)| (s, cm(c), a.to_vec()))
        .collect();
    got.sort();
    want.sort();
    ensure(got == want, "cutting patterns differ")?;
    // (produced class, waste, leftover counts)
    let overlapping: [(usize, f64, [u32; 4]); 12] = [
        (1, 1.05, [1, 1, 0, 0]),
        (1, 4.05, [0, 2, 0, 0]),
        (1, 2.05, [1, 0, 1, 0]),
        (1, 6.05, [0, 0, 2, 0]),
        (1, 5.05, [0, 1, 1, 0]),
        (1, 8.05, [0, 0, 1, 1]),
        (1, 4.05, [1, 0, 0, 1]),
        (1, 7.05, [0, 1, 0, 1]),
        (1, 10.05, [0, 0, 0, 2]),
        (2, 4.05, [0, 0, 0, 2]),
        (2, 1.05, [0, 1, 0, 1]),
        (2, 2.05, [0, 0, 1, 1]),
    ];
    let mut got: Vec<(usize, i64, Vec<u32>)> = pats
        .overlapping
        .iter()
        .map(|o| {
            (
                o.produced_class + 1,
                o.waste.cm(),
                o.leftover_counts.clone(),
            )
        })
        .collect();
    let mut want: Vec<(usize, i64, Vec<u32>)> = overlapping
        .iter()
        .map(|&(c, w, a)| (c, cm(w), a.to_vec()))
        .collect();
    got.sort();
    want.sort();
    ensure(got == want, "overlapping patterns differ")?;
    let ids: Vec<u32> = pats.ids().map(|id| id.0).collect();
    ensure(ids == (1..=28).collect::<Vec<_>>(), "ids are not 1..=28")?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, format!("took {secs:.3}s"))?;
    Ok(format!(
        "6/10/12 patterns match to the centimeter in {secs:.3}s"
    ))
}

fn bound() -> Check {
    let (inst, pats) = setup();
    let b = lower_bound(&inst, &pats).map_err(|e| e.to_string())?;
    ensure(
        b.makespan_lb == 2 && b.waste_lb == 0.2 && b.total == 2.2,
        format!("got {} / {} / {}", b.makespan_lb, b.waste_lb, b.total),
    )?;
    Ok("makespan_lb 2, waste_lb 0.2, total 2.2".into())
}

fn optimum() -> Check {
    let (inst, pats) = setup();
    let caps = SearchCaps {
        max_freq: 10,
        max_genes: 8,
        ..SearchCaps::default()
    };
    let (ch, v) = exhaustive_optimum(&inst, &pats, caps).map_err(|e| e.to_string())?;
    let ms = decode_schedule(&ch, &inst, &pats)
        .map_err(|e| e.to_string())?
        .makespan;
    ensure(
        v == 2.3 && ms == 2,
        format!("oracle gave {v} with makespan {ms}"),
    )?;
    let mut hits = 0;
    let mut slowest = 0.0f64;
    for seed in 0..20 {
        let t = Instant::now();
        let out = ga::run(&inst, &pats, &GaParams::defaults(pats.num_packing(), seed))
            .map_err(|e| e.to_string())?;
        slowest = slowest.max(t.elapsed().as_secs_f64());
        if out.fitness == 2.3 {
            hits += 1;
        }
    }
    ensure(slowest < 10.0, format!("slowest run {slowest:.2}s"))?;
    ensure(hits >= 18, format!("{hits}/20 runs reached 2.3"))?;
    Ok(format!(
        "oracle 2.3 (makespan 2); GA {hits}/20 at 2.3, slowest {slowest:.2}s"
    ))
}

fn model_cross_check() -> Check {
    let (inst, pats) = setup();
    let (ch, _) =
        exhaustive_optimum(&inst, &pats, SearchCaps::default()).map_err(|e| e.to_string())?;
    let model = build_model(&inst, &pats);
    let a = induced_assignment(&model, &ch, &inst, &pats).map_err(|e| e.to_string())?;
    let v = check_assignment(&model, &a).map_err(|e| e.to_string())?;
    ensure(
        v.is_empty(),
        format!("{} violated rows, first {:?}", v.len(), v.first()),
    )?;
    let lhs = model.objective_value(&a).map_err(|e| e.to_string())?;
    let rhs = fitness(&ch, &inst, &pats).map_err(|e| e.to_string())?;
    ensure(
        lhs == rhs,
        format!("model objective {lhs} vs fitness {rhs}"),
    )?;
    Ok(format!(
        "0 violations over {} rows; objective {lhs} equals fitness",
        model.rows.len()
    ))
}

fn tiny_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let molds = rng.gen_range(1..=3);
    let mut inst = generate_instance(seed, 1, molds).expect("valid arguments");
    let ty = &mut inst.beam_types[0];
    ty.lengths.truncate(4);
    ty.demands.truncate(4);
    for d in &mut inst.beam_types[0].demands {
        *d = rng.gen_range(1..=6);
    }
    inst.horizon = default_horizon(&inst.beam_types, inst.mold_lengths());
    inst
}

fn maximal_patterns_suffice() -> Check {
    let start = Instant::now();
    let caps = SearchCaps {
        max_freq: 6,
        max_genes: 6,
        ..SearchCaps::default()
    };
    let outcomes: Vec<Result<Option<f64>, String>> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let inst = tiny_instance(seed);
            let solve = |mode| match exhaustive_optimum(
                &inst,
                &PatternSet::enumerate_with(&inst, mode),
                caps,
            ) {
                Ok((_, v)) => Ok(Some(v)),
                Err(Error::NoFeasibleSolution) => Ok(None),
                Err(e) => Err(format!("seed {seed}: {e}")),
            };
            let (a, b) = (solve(PackingMode::Maximal)?, solve(PackingMode::All)?);
            if a != b {
                return Err(format!("seed {seed}: maximal {a:?} vs all {b:?}"));
            }
            Ok(a)
        })
        .collect();
    let mut solved = 0;
    for o in outcomes {
        if o?.is_some() {
            solved += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 300.0, format!("took {secs:.1}s"))?;
    Ok(format!(
        "20 instances agree ({solved} feasible) in {secs:.1}s"
    ))
}

fn corrupt(ch: &Chromosome, pats: &PatternSet, rng: &mut ChaCha8Rng) -> Chromosome {
    let mut out = ch.clone();
    for _ in 0..rng.gen_range(1..=3) {
        match rng.gen_range(0..4) {
            0 if !out.is_empty() => {
                let i = rng.gen_range(0..out.gene_count());
                let f = out.genes[i].freq;
                out.genes[i].freq = rng.gen_range(0..=2 * f + 2);
            }
            1 if !out.is_empty() => {
                out.genes.remove(rng.gen_range(0..out.gene_count()));
            }
            2 if out.gene_count() > 1 => {
                let i = rng.gen_range(0..out.gene_count());
                let j = rng.gen_range(0..out.gene_count());
                out.genes.swap(i, j);
            }
            _ => {
                let id = PatternId(rng.gen_range(1..=pats.len() as u32));
                if !out.contains(id) {
                    out.genes.push(Gene {
                        pattern: id,
                        freq: rng.gen_range(1..=5),
                    });
                }
            }
        }
    }
    out
}

fn repair_suite() -> Check {
    let mut instances = vec![cwp000()];
    for seed in [1, 2, 3, 4] {
        instances
            .push(generate_instance(seed, 1 + (seed as usize % 2), 5).expect("valid arguments"));
    }
    let mut repaired = 0;
    let mut rejected = 0;
    for (n, inst) in instances.iter().enumerate() {
        let pats = PatternSet::enumerate(inst);
        let mut rng = ChaCha8Rng::seed_from_u64(100 + n as u64);
        let mut seeds = Vec::new();
        for _ in 0..200 {
            if let Some(ch) = random_solution(inst, &pats, &mut rng) {
                seeds.push(ch);
            }
            if seeds.len() == 20 {
                break;
            }
        }
        ensure(
            !seeds.is_empty(),
            format!("instance {n}: no feasible start"),
        )?;
        for k in 0..1000 {
            let bad = corrupt(&seeds[k % seeds.len()], &pats, &mut rng);
            match repair(&bad, inst, &pats) {
                None => rejected += 1,
                Some(ch) => {
                    let r = classify_infeasibility(&ch, inst, &pats).map_err(|e| e.to_string())?;
                    ensure(
                        r.is_feasible() && is_admissible(&ch, inst, &pats),
                        format!("instance {n}: flagged output {r}"),
                    )?;
                    ensure(
                        repair(&ch, inst, &pats).as_ref() == Some(&ch),
                        format!("instance {n}: not idempotent"),
                    )?;
                    repaired += 1;
                }
            }
        }
    }
    Ok(format!(
        "5000 corruptions: {repaired} repaired and idempotent, {rejected} rejected"
    ))
}

fn bound_dominance() -> Check {
    let start = Instant::now();
    let cases: Vec<(u64, usize, usize)> = (0..200u64)
        .map(|i| {
            (
                i,
                1 + (i % 2) as usize,
                if (i / 2) % 2 == 0 { 5 } else { 15 },
            )
        })
        .collect();
    let rows: Vec<Result<Option<f64>, String>> = cases
        .into_par_iter()
        .map(|(seed, types, molds)| {
            let inst = generate_instance(seed, types, molds).map_err(|e| e.to_string())?;
            let pats = PatternSet::enumerate(&inst);
            let lb = lower_bound(&inst, &pats)
                .map_err(|e| format!("seed {seed}: {e}"))?
                .total;
            match ga::run(&inst, &pats, &GaParams::defaults(pats.num_packing(), seed)) {
                Ok(out) if out.fitness + 1e-9 >= lb => {
                    Ok(Some(lbd(out.fitness, lb).map_err(|e| e.to_string())?))
                }
                Ok(out) => Err(format!(
                    "seed {seed}: fitness {} below bound {lb}",
                    out.fitness
                )),
                Err(Error::InfeasibleInstance) => Ok(None),
                Err(e) => Err(format!("seed {seed}: {e}")),
            }
        })
        .collect();
    let mut lbds = Vec::new();
    let mut unsolved = 0;
    for r in rows {
        match r? {
            Some(x) => lbds.push(x),
            None => unsolved += 1,
        }
    }
    ensure(!lbds.is_empty(), "no instance solved")?;
    let mean = lbds.iter().sum::<f64>() / lbds.len() as f64;
    Ok(format!(
        "{} solved, all at or above the bound; mean LBD {mean:.4}; {unsolved} without a constructed solution; {:.1}s",
        lbds.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn metrics() -> Check {
    let a = lbd(2.3, 2.2).map_err(|e| e.to_string())?;
    ensure(
        (a - 0.045_454_545_454_545_45).abs() <= 1e-12,
        format!("lbd {a}"),
    )?;
    let s = snr(&[2.0, 2.0]).map_err(|e| e.to_string())?;
    ensure(
        (s + 13.862_943_611_198_906).abs() <= 1e-9,
        format!("snr {s}"),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let n = rng.gen_range(1..=10);
        let fits: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..50.0)).collect();
        let mut up = fits.clone();
        let i = rng.gen_range(0..n);
        up[i] += rng.gen_range(0.01..5.0);
        let (s0, s1) = (snr(&fits).unwrap(), snr(&up).unwrap());
        ensure(s1 < s0, format!("snr rose from {s0} to {s1}"))?;
    }
    Ok(format!(
        "lbd {a:.12}, snr {s:.9}, 100 perturbations decrease snr"
    ))
}

fn beamforge(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_beamforge"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn read(p: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let inst_dir = d.join("instances");
    std::fs::create_dir(&inst_dir).map_err(|e| e.to_string())?;
    std::fs::write(inst_dir.join("cwp000.json"), cwp000().to_json()).map_err(|e| e.to_string())?;
    let g = |name: &str| d.join(name).to_string_lossy().into_owned();

    let mut gens = Vec::new();
    for threads in ["1", "4", "4"] {
        gens.push(beamforge(&[
            "--threads",
            threads,
            "gen",
            "--seed",
            "7",
            "--types",
            "1",
            "--molds",
            "5",
        ])?);
    }
    ensure(gens.windows(2).all(|w| w[0] == w[1]), "gen output differs")?;
    std::fs::write(inst_dir.join("gen7.json"), &gens[0]).map_err(|e| e.to_string())?;

    let inst = inst_dir.join("cwp000.json").to_string_lossy().into_owned();
    let mut solves = Vec::new();
    for (k, threads) in ["1", "4"].iter().enumerate() {
        let trace = g(&format!("trace{k}.csv"));
        let sol = beamforge(&[
            "--threads",
            threads,
            "solve",
            "--instance",
            &inst,
            "--seed",
            "5",
            "--gantt",
            "--trace",
            &trace,
        ])?;
        solves.push((sol, read(Path::new(&trace))?));
    }
    ensure(solves[0] == solves[1], "solve output differs")?;

    let dirs = inst_dir.to_string_lossy().into_owned();
    let mut benches = Vec::new();
    for (k, threads) in ["1", "4", "4"].iter().enumerate() {
        let out = g(&format!("results{k}.csv"));
        let trials = g(&format!("trials{k}.csv"));
        beamforge(&[
            "--threads",
            threads,
            "bench",
            "--instances",
            &dirs,
            "--reps",
            "2",
            "--seed",
            "3",
            "--trials",
            "2,7",
            "--no-timing",
            "--out",
            &out,
            "--trials-out",
            &trials,
        ])?;
        benches.push((read(Path::new(&out))?, read(Path::new(&trials))?));
    }
    ensure(
        benches.windows(2).all(|w| w[0] == w[1]),
        "bench output differs",
    )?;
    Ok("gen, solve and bench byte-identical across runs and 1 vs 4 threads".into())
}

fn lp_emission() -> Check {
    let (inst, pats) = setup();
    let model = build_model(&inst, &pats);
    let counts = (
        model.count_vars(Family::X),
        model.count_vars(Family::Z),
        model.count_vars(Family::Y) + model.count_vars(Family::Yl),
        model.count_vars(Family::O),
    );
    ensure(
        counts == (51, 3, 10, 12),
        format!("variable counts {counts:?}"),
    )?;
    let rows: Vec<usize> = Group::ALL.iter().map(|&g| model.count_rows(g)).collect();
    ensure(
        rows == vec![15, 2, 0, 5, 10, 3, 10, 4, 1, 2],
        format!("row counts {rows:?}"),
    )?;
    let text = emit_lp(&model);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let lp = dir.path().join("cwp000.lp");
    std::fs::write(&lp, text).map_err(|e| e.to_string())?;
    let script = "import sys, highspy\nh = highspy.Highs()\nh.setOptionValue('output_flag', False)\nh.readModel(sys.argv[1])\nh.run()\nprint(h.getInfo().objective_function_value)\n";
    let solver = Command::new("python3")
        .args(["-c", script])
        .arg(&lp)
        .output();
    let external = match solver {
        Ok(o) if o.status.success() => {
            let v: f64 = String::from_utf8_lossy(&o.stdout)
                .trim()
                .parse()
                .map_err(|e| format!("solver output: {e}"))?;
            ensure((v - 2.3).abs() <= 1e-6, format!("external optimum {v}"))?;
            format!("external MILP optimum {v}")
        }
        _ => "external MILP solver not available, skipped".into(),
    };
    Ok(format!("51 x, 3 z, 10 y, 12 o; rows {rows:?}; {external}"))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        ("pattern golden tables", patterns_golden),
        ("lower bound", bound),
        ("oracle optimum and GA hit rate", optimum),
        ("model cross-check", model_cross_check),
        ("maximal packing patterns suffice", maximal_patterns_suffice),
        ("repair suite", repair_suite),
        ("bound dominance", bound_dominance),
        ("metrics", metrics),
        ("determinism", determinism),
        ("LP emission", lp_emission),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", n + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
