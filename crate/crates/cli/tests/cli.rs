use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use beamforge_core::reference::CWP000_JSON;

fn beamforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beamforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_instance(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn bound_prints_three_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "cwp000.json", CWP000_JSON);
    let out = beamforge(&["bound", "--instance", &inst]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "{\"makespan_lb\":2,\"waste_lb\":0.2,\"total\":2.2}\n"
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        beamforge(&["solve", "--instance", "missing.json"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(beamforge(&["solve", "--bogus"]).status.code(), Some(1));

    let bad = write_instance(dir.path(), "bad.json", "{\"C\": 1");
    let out = beamforge(&["bound", "--instance", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8(out.stderr).unwrap().lines().count(), 1);

    let empty = CWP000_JSON.replace("[30, 16, 28, 25, 29]", "[0, 0, 0, 0, 0]");
    let none = write_instance(dir.path(), "nostock.json", &empty);
    assert_eq!(
        beamforge(&["solve", "--instance", &none, "--ng-mult", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn gen_is_repeatable() {
    let a = beamforge(&["gen", "--seed", "7", "--types", "1", "--molds", "5"]);
    let b = beamforge(&["gen", "--seed", "7", "--types", "1", "--molds", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        beamforge(&["gen", "--seed", "7", "--types", "9", "--molds", "5"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn patterns_and_lp() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "cwp000.json", CWP000_JSON);
    let out = beamforge(&["patterns", "--instance", &inst]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["packing"].as_array().unwrap().len(), 6);
    assert_eq!(v["cutting"].as_array().unwrap().len(), 10);
    assert_eq!(v["overlapping"].as_array().unwrap().len(), 12);

    let lp = dir.path().join("m.lp");
    let code = beamforge(&[
        "emit-lp",
        "--instance",
        &inst,
        "--out",
        lp.to_str().unwrap(),
    ])
    .status
    .code();
    assert_eq!(code, Some(0));
    let text = fs::read_to_string(lp).unwrap();
    assert!(text.starts_with("Minimize\n"));
    assert!(text.ends_with("End\n"));
}

#[test]
fn solve_writes_solution_gantt_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "cwp000.json", CWP000_JSON);
    let sol = dir.path().join("sol.json");
    let trace = dir.path().join("trace.csv");
    let out = beamforge(&[
        "solve",
        "--instance",
        &inst,
        "--seed",
        "1",
        "--gantt",
        "--out",
        sol.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(sol).unwrap()).unwrap();
    assert_eq!(v["fitness"], 2.3);
    assert_eq!(v["makespan"], 2);
    let gantt = String::from_utf8(out.stdout).unwrap();
    assert_eq!(gantt.lines().count(), 5);
    assert!(gantt.lines().all(|l| l.len() == 3));
    let trace = fs::read_to_string(trace).unwrap();
    assert!(trace.starts_with("generation,best_fitness,mean_fitness\n0,"));
    assert_eq!(trace.lines().count(), 6002);
}

#[test]
fn bench_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let inst_dir = dir.path().join("in");
    fs::create_dir(&inst_dir).unwrap();
    write_instance(&inst_dir, "cwp000.json", CWP000_JSON);
    let out = dir.path().join("results.csv");
    let code = beamforge(&[
        "bench",
        "--instances",
        inst_dir.to_str().unwrap(),
        "--reps",
        "2",
        "--seed",
        "4",
        "--trials",
        "4",
        "--no-timing",
        "--out",
        out.to_str().unwrap(),
    ])
    .status
    .code();
    assert_eq!(code, Some(0));
    let results = fs::read_to_string(&out).unwrap();
    let mut lines = results.lines();
    assert_eq!(
        lines.next(),
        Some("trial,instance,rep,seed,fitness,makespan,lbd,time_s")
    );
    assert_eq!(lines.count(), 2);
    let trials = fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    assert!(trials.starts_with("trial,lbd_mean,snr,avg_time_s\n4,"));
}
