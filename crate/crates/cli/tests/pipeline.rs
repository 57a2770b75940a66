use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn revaudit(workdir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revaudit"))
        .args(args)
        .env("REVAUDIT_WORKDIR", workdir)
        .output()
        .expect("binary runs")
}

fn ok(workdir: &Path, args: &[&str]) -> String {
    let out = revaudit(workdir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn error_of(out: &Output) -> Value {
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("error line");
    serde_json::from_str(line).expect("machine-readable error")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn run_ec(dir: &Path, seed: &str) {
    ok(dir, &["simulate", "--preset", "ec", "--seed", seed, "--alpha-star", "0.3"]);
    ok(dir, &["extract-citations"]);
    ok(dir, &["filter", "--latent"]);
    ok(dir, &["analyze", "--parametric"]);
}

#[test]
fn planted_effect_is_covered() {
    let dir = TempDir::new().unwrap();
    run_ec(dir.path(), "11");
    let fit = json(&dir.path().join("parametric.json"));
    let ci = &fit["fit"]["alpha_star"]["ci95"];
    let (lo, hi) = (ci["lo"].as_f64().unwrap(), ci["hi"].as_f64().unwrap());
    assert!(lo <= 0.3 && 0.3 <= hi, "[{lo}, {hi}]");
}

#[test]
fn report_matches_filter_counts() {
    let dir = TempDir::new().unwrap();
    run_ec(dir.path(), "12");
    let table = ok(dir.path(), &["report"]);
    let labels: Vec<&str> = table.lines().skip(1).map(|l| l.split("  ").next().unwrap().trim()).collect();
    assert_eq!(
        &labels[..6],
        ["Test statistic", "95% CI", "P value", "# Submissions", "# Reviewers", "# (Submission, Reviewer) pairs"]
    );
    let filter = json(&dir.path().join("filter_report.json"));
    let report = json(&dir.path().join("report.json"));
    let sizes = &report[0]["sample_sizes"];
    assert_eq!(sizes["submissions"], filter["eligible_submissions"]);
    assert_eq!(sizes["reviewers"], filter["retained_reviewers"]);
    assert_eq!(sizes["pairs"], filter["retained_pairs"]);
    assert_eq!(fs::read_to_string(dir.path().join("report.txt")).unwrap(), table);
}

#[test]
fn analyze_before_filter_is_a_missing_artifact() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--preset", "ec", "--seed", "1"]);
    let err = error_of(&revaudit(dir.path(), &["analyze", "--parametric"]));
    assert_eq!(err["error"]["kind"], "missing_artifact");
    assert!(err["error"]["message"].as_str().unwrap().contains("filter"));
}

#[test]
fn usage_errors_are_json() {
    let dir = TempDir::new().unwrap();
    let out = revaudit(dir.path(), &["analyze", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["error"]["kind"], "usage");
    let out = revaudit(dir.path(), &["analyze"]);
    assert_eq!(error_of(&out)["error"]["kind"], "usage");
    // Randomized stages take no ambient seed.
    let out = revaudit(dir.path(), &["simulate", "--preset", "icml"]);
    assert_eq!(error_of(&out)["error"]["kind"], "usage");
}

#[test]
fn nonparametric_requires_a_seed() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--preset", "icml", "--seed", "2", "--n-submissions", "200", "--n-reviewers", "200"]);
    ok(dir.path(), &["extract-citations"]);
    ok(dir.path(), &["filter"]);
    let err = error_of(&revaudit(dir.path(), &["analyze", "--nonparametric"]));
    assert_eq!(err["error"]["kind"], "usage");
    ok(dir.path(), &["analyze", "--nonparametric", "--seed", "4", "--iterations", "2000"]);
    let art = json(&dir.path().join("nonparametric.json"));
    let k = art["result"]["k"].as_u64().unwrap();
    let csv = fs::read_to_string(dir.path().join("triples.csv")).unwrap();
    assert_eq!(csv.lines().count() as u64, k + 1);
}

#[test]
fn missing_input_file() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--preset", "ec", "--seed", "1", "--n-submissions", "20", "--n-reviewers", "15"]);
    let out = revaudit(dir.path(), &["assign", "--similarity", "nope.csv", "--paper-load", "3", "--reviewer-cap", "4"]);
    assert_eq!(error_of(&out)["error"]["kind"], "io");
}

fn pipeline_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_owned()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn identical_runs_give_identical_artifacts() {
    let run = |dir: &Path| {
        ok(dir, &["simulate", "--preset", "icml", "--seed", "5", "--n-submissions", "300", "--n-reviewers", "300"]);
        ok(dir, &["extract-citations", "--audit-size", "20", "--seed", "8"]);
        ok(dir, &["filter"]);
        ok(dir, &["analyze", "--parametric"]);
        ok(dir, &["analyze", "--nonparametric", "--seed", "3", "--iterations", "3000"]);
        ok(dir, &["diagnostics"]);
        ok(dir, &["effect-size"]);
        ok(dir, &["report"]);
    };
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    run(a.path());
    run(b.path());
    let (fa, fb) = (pipeline_files(a.path()), pipeline_files(b.path()));
    assert!(fa.len() >= 15, "{}", fa.len());
    assert_eq!(fa, fb);
}

#[test]
fn ingest_round_trips_a_simulated_dataset() {
    let src = TempDir::new().unwrap();
    let dst = TempDir::new().unwrap();
    ok(src.path(), &["simulate", "--preset", "ec", "--seed", "9", "--n-submissions", "40", "--n-reviewers", "30"]);
    let venue = src.path().join("venue.json");
    let input = src.path().join("dataset");
    let out = ok(
        dst.path(),
        &["--venue-config", venue.to_str().unwrap(), "ingest", "--input", input.to_str().unwrap()],
    );
    assert!(out.contains("30 reviewers, 40 submissions, 120 reviews"), "{out}");
    for f in ["reviewers.jsonl", "submissions.jsonl", "reviews.jsonl"] {
        assert_eq!(fs::read(input.join(f)).unwrap(), fs::read(dst.path().join("dataset").join(f)).unwrap());
    }
    // Without any venue configuration the stage refuses to guess.
    let bare = TempDir::new().unwrap();
    let err = error_of(&revaudit(bare.path(), &["ingest", "--input", input.to_str().unwrap()]));
    assert_eq!(err["error"]["kind"], "usage");
}

#[test]
fn assign_respects_loads_and_sweeps() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["simulate", "--preset", "ec", "--seed", "4", "--n-submissions", "20", "--n-reviewers", "15"]);
    let mut sim = String::from("submission_id,reviewer_id,sim\n");
    let subs: Vec<Value> = fs::read_to_string(dir.path().join("dataset/submissions.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let revs: Vec<Value> = fs::read_to_string(dir.path().join("dataset/reviewers.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    for (i, s) in subs.iter().enumerate() {
        for (j, r) in revs.iter().enumerate() {
            let v = ((i * 7 + j * 13) % 100) as f64 / 100.0;
            sim.push_str(&format!("{},{},{v}\n", s["id"].as_str().unwrap(), r["id"].as_str().unwrap()));
        }
    }
    let sim_path = dir.path().join("similarity.csv");
    fs::write(&sim_path, sim).unwrap();
    let p = sim_path.to_str().unwrap();
    ok(dir.path(), &["assign", "--similarity", p, "--paper-load", "3", "--reviewer-cap", "4", "--lambda", "0.2", "--sweep", "0,0.5,1"]);
    let rows = fs::read_to_string(dir.path().join("assignment.csv")).unwrap();
    let mut per_reviewer = std::collections::BTreeMap::<String, usize>::new();
    for line in rows.lines().skip(1) {
        *per_reviewer.entry(line.split(',').nth(1).unwrap().to_owned()).or_default() += 1;
    }
    assert_eq!(rows.lines().count(), 61);
    assert!(per_reviewer.values().all(|&n| n <= 4));
    let sweep = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 4);

    let err = error_of(&revaudit(dir.path(), &["assign", "--similarity", p, "--paper-load", "3", "--reviewer-cap", "2"]));
    assert_eq!(err["error"]["kind"], "infeasible");
}
