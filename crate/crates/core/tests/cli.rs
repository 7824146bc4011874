use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_loose-hc"));
    c.env_remove("LHC_OUT_DIR");
    c
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn m3_of_contracted_backbone() {
    let (code, out) = run(&["check", "m3", "--gadget", "contracted-backbone"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["m3"], "2/3");
}

#[test]
fn extremal_twelve_has_no_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let p = path.to_str().unwrap();
    assert_eq!(run(&["gen", "--model", "extremal-codegree", "--n", "12", "--format", "json", "--out", p]).0, 0);
    let (code, out) = run(&["find", "hc", "--input", p, "--mode", "oracle"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["decision"], "no");
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for f in [&a, &b] {
        let (code, _) = run(&["gen", "--model", "h3np", "--n", "40", "--p", "0.05", "--seed", "7", "--out", f.to_str().unwrap()]);
        assert_eq!(code, 0);
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert!(String::from_utf8(x).unwrap().starts_with("# model h3np"));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("LHC_OUT_DIR", dir.path())
        .args(["gen", "--model", "h3np", "--n", "10", "--p", "0.5", "--seed", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("h3np_n10_seed1.txt").exists());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&[]).0, 1);
    assert_eq!(run(&["gen", "--model", "h3np", "--n", "10", "--p", "0.5"]).0, 1);
    assert_eq!(run(&["find", "hc", "--input", "/nonexistent/g.txt"]).0, 1);
    assert_eq!(run(&["experiment", "resilience", "--n", "14", "--p", "1.0"]).0, 1);
    assert_eq!(run(&["check", "absorber", "--complete", "70", "--r", "0,1,2,3,4,5", "--w-size", "14"]).0, 1);
    assert_eq!(run(&["check", "template", "--m", "20", "--template", "random"]).0, 1);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("k14.txt");
    let p = p.to_str().unwrap();
    assert_eq!(run(&["gen", "--model", "extremal-codegree", "--n", "14", "--out", p]).0, 0);
    assert_eq!(run(&["find", "hc", "--input", p, "--mode", "pipeline"]).0, 1);
    let (code, out) = run(&["find", "hc", "--input", p, "--mode", "oracle", "--budget", "10"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["exhaustive"], false);
    assert_eq!(v["decision"], "unknown");
}

#[test]
fn resilience_csv_and_replay() {
    let args = ["experiment", "resilience", "--n", "14", "--p", "1.0", "--d", "2", "--gamma-grid", "0.05:0.30", "--trials", "3", "--seed", "5"];
    let (code, out) = run(&args);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), loose_hc::cli::RESILIENCE_CSV_HEADER);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let f: f64 = r[8].parse().unwrap();
        assert!((0.0..=1.0).contains(&f));
    }

    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let full: serde_json::Value = serde_json::from_str(&run(&json_args).1).unwrap();
    let recs = full["records"].as_array().unwrap();
    assert_eq!(recs.len(), 18);
    let idx: Vec<(u64, u64)> = recs.iter().map(|r| (r["grid_index"].as_u64().unwrap(), r["trial"].as_u64().unwrap())).collect();
    let mut sorted = idx.clone();
    sorted.sort();
    assert_eq!(idx, sorted);

    json_args.extend(["--only", "4:2"]);
    let one: serde_json::Value = serde_json::from_str(&run(&json_args).1).unwrap();
    let replayed = &one["records"][0];
    let original = recs.iter().find(|r| r["grid_index"] == 4 && r["trial"] == 2).unwrap();
    assert_eq!(replayed, original);
}
