//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use fracgreen::commands::output_files;
use fracgreen_core::solver::{cascade_iterate, log_log_slope, Profile};
use fracgreen_core::verify::{run_suite, SuiteReport};
use fracgreen_core::{DomainKind, Kernel, ModelParams};

struct Ledger {
    lines: Vec<(usize, bool, String)>,
}

impl Ledger {
    fn record(&mut self, id: usize, ok: bool, detail: String) {
        println!(
            "criterion {id:>2} {}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        self.lines.push((id, ok, detail));
    }
}

fn params(n: usize, alpha: f64) -> ModelParams {
    ModelParams::new(n, alpha).unwrap()
}

fn suite(name: &str, n: usize, alpha: f64, samples: usize) -> SuiteReport {
    run_suite(name, &params(n, alpha), samples, 42).unwrap()
}

fn c(r: &SuiteReport, key: &str) -> f64 {
    *r.empirical_constants
        .get(key)
        .unwrap_or_else(|| panic!("{} lacks {key}", r.suite))
}

fn kernel_lemmas(l: &mut Ledger) {
    let start = Instant::now();
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut total = 0;
    for name in ["ball-lemma21", "half-lemma51"] {
        for alpha in [0.5, 1.0, 1.5] {
            let r = suite(name, 3, alpha, 10_000);
            ok &= r.violations == 0 && r.worst_margin > 1e-10;
            worst = worst.min(r.worst_margin);
            total += r.violations;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    l.record(
        1,
        ok && secs < 60.0,
        format!("6 runs x 1e4 samples, {total} violations, worst margin {worst:.3e}, {secs:.1} s"),
    );
}

fn monotonicity(l: &mut Ledger) {
    let r = suite("monotonicity", 3, 1.0, 1000);
    let fd = c(&r, "max_fd_relative_gap");
    l.record(
        2,
        r.violations == 0 && fd <= 1e-4,
        format!(
            "{} checks incl. 20x20 log-grid, {} violations, max FD gap {fd:.2e}",
            r.samples, r.violations
        ),
    );
}

fn limits(l: &mut Ledger) {
    let r = suite("limits", 3, 1.0, 1000);
    l.record(
        3,
        r.violations == 0,
        format!(
            "bracket(1e-6) = {:.7}, bracket(1e6) = {:.3e}, rates small/large {:.3}/{:.3} (predicted {:.3}/{:.3})",
            c(&r, "bracket_at_1e-6"),
            c(&r, "bracket_at_1e6"),
            c(&r, "rate_constant_small_ratio"),
            c(&r, "rate_constant_large_ratio"),
            c(&r, "predicted_constant_small_ratio"),
            c(&r, "predicted_constant_large_ratio"),
        ),
    );
}

fn asymptotics(l: &mut Ledger) {
    let mut ok = true;
    let mut bands = Vec::new();
    for alpha in [0.5, 1.0, 1.5] {
        let r = suite("asymptotics", 3, alpha, 10);
        ok &= r.violations == 0 && c(&r, "band_ratio") <= 2.0;
        bands.push(format!(
            "a={alpha}: [{:.4e}, {:.4e}]",
            c(&r, "band_lo"),
            c(&r, "band_hi")
        ));
    }
    l.record(4, ok, format!("bands {}", bands.join(", ")));
}

fn green_oracle(l: &mut Ledger) {
    let start = Instant::now();
    let r = suite("green-oracle", 3, 1.0, 1);
    let secs = start.elapsed().as_secs_f64();
    let (coarse, fine) = (
        c(&r, "relative_l2_error_24x96"),
        c(&r, "relative_l2_error_32x192"),
    );
    l.record(
        5,
        r.violations == 0 && coarse <= 0.1 && fine < coarse && secs < 300.0,
        format!("relative L2 error {coarse:.3e} at 24x96, {fine:.3e} at 32x192, {secs:.1} s"),
    );
}

fn scaling(l: &mut Ledger) {
    let k = Kernel::new(params(3, 1.0));
    let (x, y) = ([0.0, 0.0, 1.0], [0.0, 0.0, 2.0]);
    let exact = k.green(DomainKind::HalfSpace, &x, &y).unwrap();
    let errs: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&r| (k.green_scaled(r, &x, &y).unwrap() - exact).abs() / exact)
        .collect();
    let r = suite("scaling-R", 3, 1.0, 1000);
    l.record(
        6,
        r.violations == 0 && errs[2] <= 1e-2 && errs[0] > errs[1] && errs[1] > errs[2],
        format!(
            "anchor errors R=10,100,1000: {:.3e}, {:.3e}, {:.3e}; random pairs {} violations",
            errs[0], errs[1], errs[2], r.violations
        ),
    );
}

fn symmetry(l: &mut Ledger) {
    let mut p = params(3, 1.0);
    p.p = Some(1.8);
    let r = run_suite("symmetry", &p, 1, 42).unwrap();
    l.record(
        7,
        r.violations == 0,
        format!(
            "residual {:.2e}, asymmetry {:.2e}, min_w/|u| {:.2e}, lowest lambda0 {:.4}, u_max {:.4} -> {:.4} refined",
            c(&r, "residual"),
            c(&r, "asymmetry"),
            c(&r, "worst_min_w_over_u_max"),
            c(&r, "lowest_lambda0_estimate"),
            c(&r, "u_max"),
            c(&r, "u_max_refined"),
        ),
    );
}

fn liouville(l: &mut Ledger) {
    let start = Instant::now();
    let r = suite("liouville", 3, 1.0, 1);
    let secs = start.elapsed().as_secs_f64();
    l.record(
        8,
        r.violations == 0 && c(&r, "combinations") == 1350.0 && secs < 5.0,
        format!(
            "{} combinations, min tau {:.3}, min f' {:.3}, {} violations, {secs:.2} s",
            c(&r, "combinations"),
            c(&r, "min_tau"),
            c(&r, "min_fprime"),
            r.violations
        ),
    );
}

fn kelvin(l: &mut Ledger) {
    let r = suite("kelvin", 3, 1.0, 1000);
    let res = c(&r, "max_relative_residual");
    l.record(
        9,
        r.violations == 0 && res <= 1e-8,
        format!("max relative residual {res:.2e} over 1e3 pairs"),
    );
}

fn alpha_harmonic(l: &mut Ledger) {
    let r = suite("alpha-harmonic", 3, 1.0, 20);
    let (coarse, fine) = (
        c(&r, "max_relative_value_coarse"),
        c(&r, "max_relative_value_fine"),
    );
    l.record(
        10,
        r.violations == 0 && fine <= 0.05 && fine < coarse,
        format!("max |value|/scale {coarse:.2e} coarse, {fine:.2e} refined cutoffs"),
    );
}

fn cascade_slope(l: &mut Ledger) {
    let p = ModelParams::with_exponent(3, 1.0, 1.8).unwrap();
    let seed = Profile::geometric(1e-4, 1e5, 400, |x| if x <= 1.0 { 1.0 } else { 0.0 }).unwrap();
    let first = cascade_iterate(&seed, &p, 1.0).unwrap();
    let slope = log_log_slope(&first, 1e2, 1e4).unwrap();
    l.record(
        11,
        (slope + 0.5).abs() <= 0.05,
        format!("first-iterate slope {slope:.4} (target -0.5 +- 0.05)"),
    );
}

/// File contents with every `runtime_ms` value blanked.
fn normalized(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    let name = path.file_name().unwrap().to_string_lossy();
    if name == "summary.csv" {
        text.lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
            .collect::<Vec<_>>()
            .join("\n")
    } else if name.ends_with(".json") {
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        if let Some(obj) = v.as_object_mut() {
            obj.remove("runtime_ms");
        }
        v.to_string()
    } else {
        text
    }
}

fn determinism(l: &mut Ledger) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    fs::write(
        &cfg,
        r#"{
  "n": 3, "alpha": 1.0, "p": 1.8, "seed": 42,
  "grid": {"ball": {"radial": 10, "angular": 120}},
  "suites": [
    {"name": "ball-lemma21", "samples": 2000},
    {"name": "half-lemma51", "samples": 2000},
    {"name": "monotonicity", "samples": 200},
    {"name": "limits", "samples": 200},
    {"name": "kelvin", "samples": 500},
    {"name": "liouville", "samples": 1}
  ]
}"#,
    )
    .unwrap();
    let mut runs = Vec::new();
    let mut codes = Vec::new();
    for out in ["run1", "run2"] {
        let o = Command::new(env!("CARGO_BIN_EXE_fracgreen"))
            .args(["all", "--config"])
            .arg(&cfg)
            .args(["--out", out])
            .current_dir(dir.path())
            .output()
            .unwrap();
        codes.push(o.status.code());
        let files: BTreeMap<String, (String, String)> = output_files(&dir.path().join(out))
            .unwrap()
            .into_iter()
            .map(|p| {
                let name = p.file_name().unwrap().to_string_lossy().into_owned();
                (name, (fs::read_to_string(&p).unwrap(), normalized(&p)))
            })
            .collect();
        runs.push(files);
    }
    let names: Vec<&String> = runs[0].keys().collect();
    let same_set = runs[0].keys().eq(runs[1].keys());
    let mut data_files = 0;
    let mut mismatches = Vec::new();
    for (name, (raw, norm)) in &runs[0] {
        let Some((raw2, norm2)) = runs[1].get(name) else {
            continue;
        };
        let has_runtime = name == "summary.csv" || name.starts_with("suite_");
        if has_runtime {
            if norm != norm2 {
                mismatches.push(name.clone());
            }
        } else {
            data_files += 1;
            if raw != raw2 {
                mismatches.push(name.clone());
            }
        }
    }
    l.record(
        12,
        codes == [Some(0), Some(0)] && same_set && mismatches.is_empty() && data_files >= 8,
        format!(
            "exit codes {codes:?}, {} files, {data_files} data files byte-identical, mismatches {mismatches:?}",
            names.len()
        ),
    );
}

#[test]
fn acceptance_criteria() {
    let mut l = Ledger { lines: Vec::new() };
    kernel_lemmas(&mut l);
    monotonicity(&mut l);
    limits(&mut l);
    asymptotics(&mut l);
    green_oracle(&mut l);
    scaling(&mut l);
    symmetry(&mut l);
    liouville(&mut l);
    kelvin(&mut l);
    alpha_harmonic(&mut l);
    cascade_slope(&mut l);
    determinism(&mut l);
    let failed: Vec<usize> = l.lines.iter().filter(|x| !x.1).map(|x| x.0).collect();
    println!(
        "acceptance: {}/{} criteria pass",
        l.lines.len() - failed.len(),
        l.lines.len()
    );
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
