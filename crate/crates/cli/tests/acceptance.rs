//! One test per acceptance criterion. Each prints a `criterion NN: PASS|FAIL`
//! line to stderr (uncaptured) before asserting.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use turanlab::arith::{ArithFn, DoubleSequence};
use turanlab::bounds::{estimate_r, prop1_grid, verify_thresholds};
use turanlab::genpoly::{build_sequence, composition_oracle, exp_series_oracle, top_coefficient_closed_form, Sign};
use turanlab::laguerre::{identity_check, szego_delta_check, turan_sum_check};
use turanlab::rational::{int, ratio};
use turanlab::realroots::isolate_real_roots;
use turanlab::turan::{d_coefficients_check, delta, low_delta_formula_check, sign_at, table3_row};

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let line = format!(
        "criterion {id:02}: {} {name} ({detail})\n",
        if ok { "PASS" } else { "FAIL" }
    );
    // Bypasses libtest capture so the line lands in the test log.
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {id} failed: {detail}");
}

fn turanlab(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_turanlab"))
        .args(args)
        .env_remove("TURANLAB_THREADS")
        .output()
        .expect("binary runs");
    (out, start.elapsed())
}

fn exception_list(args: &[&str]) -> (Vec<u64>, Duration) {
    let (out, t) = turanlab(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let list = v["exceptions"].as_array().unwrap().iter().map(|e| e.as_u64().unwrap()).collect();
    (list, t)
}

fn golden(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
        .to_str()
        .unwrap()
        .to_owned()
}

fn four_families() -> Vec<ArithFn> {
    vec![ArithFn::sigma(1), ArithFn::sigma(2), ArithFn::identity(), ArithFn::psi(3)]
}

#[test]
fn c01_sigma1_exceptions() {
    let (e, t) = exception_list(&["exceptions", "--g", "sigma:1", "--x", "1", "--N", "300"]);
    let expected: Vec<u64> = (0..=12).map(|k| 2 * k + 1).collect();
    let ok = e == expected && t < Duration::from_secs(10);
    report(1, "sigma_1 exception set", ok, &format!("{e:?} in {t:.2?}"));
}

#[test]
fn c02_sigma2_exceptions() {
    let (e, t) = exception_list(&["exceptions", "--g", "sigma:2", "--x", "1", "--N", "300"]);
    let ok = e == [1, 3, 5, 7, 9, 11] && t < Duration::from_secs(10);
    report(2, "sigma_2 exception set", ok, &format!("{e:?} in {t:.2?}"));
}

#[test]
fn c03_sigma3_to_sigma5_windows() {
    let mut total = Duration::ZERO;
    let mut found = Vec::new();
    for d in ["3", "4", "5"] {
        let g = format!("sigma:{d}");
        let (e, t) = exception_list(&["exceptions", "--g", &g, "--x", "1", "--N", "2000"]);
        total += t;
        found.push(e);
    }
    let ok = found == [vec![1, 3, 5, 7], vec![1, 5], vec![1, 5]] && total < Duration::from_secs(300);
    report(3, "sigma_3..sigma_5 windows to N = 2000", ok, &format!("{found:?} in {total:.2?}"));
}

#[test]
fn c04_sigma20_witnesses() {
    let (e, t) = exception_list(&["exceptions", "--g", "sigma:20", "--x", "1", "--N", "2000", "--stop-after", "10"]);
    let ok = e.len() >= 10 && e.iter().all(|&n| n <= 2000);
    report(4, "sigma_20 has at least 10 exceptions", ok, &format!("witnesses {e:?} in {t:.2?}"));
}

#[test]
fn c05_table1_golden() {
    let g = golden("table1.csv");
    let (out, t) = turanlab(&["table1", "--d-max", "18", "--n-max", "14", "--format", "csv", "--expect", &g]);
    let same = out.stdout == std::fs::read(&g).unwrap();
    let ok = out.status.success() && same && t < Duration::from_secs(60);
    report(5, "table1 exception matrix", ok, &format!("exit {:?} in {t:.2?}", out.status.code()));
}

#[test]
fn c06_table2_golden() {
    let g = golden("table2.csv");
    let (out, t) = turanlab(&["table2", "--d-max", "9", "--N", "200", "--format", "csv", "--expect", &g]);
    let same = out.stdout == std::fs::read(&g).unwrap();
    let ok = out.status.success() && same;
    report(6, "table2 log-concavity splits", ok, &format!("exit {:?} in {t:.2?}", out.status.code()));
}

#[test]
fn c07_symbolic_formulas() {
    let mut failures = Vec::new();
    for g in four_families() {
        if !low_delta_formula_check(&g).unwrap() {
            failures.push(format!("{} low Δ", g.label()));
        }
        let seq = build_sequence(&g, 31).unwrap();
        let (g2, g3, g4) = (g.value(2).unwrap(), g.value(3).unwrap(), g.value(4).unwrap());
        for n in 1..=30u64 {
            let p = seq.get(n).unwrap();
            for m in 0..=3.min(n) {
                if p.coeff((n - m) as usize) != top_coefficient_closed_form(&g2, &g3, &g4, n, m).unwrap() {
                    failures.push(format!("{} A_({n},{})", g.label(), n - m));
                }
            }
            if n >= 2 && !d_coefficients_check(&seq, n).unwrap() {
                failures.push(format!("{} D_{n}", g.label()));
            }
        }
    }
    report(7, "closed forms for Δ_1..Δ_3, A and D coefficients", failures.is_empty(), &format!("failures {failures:?}"));
}

#[test]
fn c08_oracle_equivalence() {
    let mut failures = Vec::new();
    for g in four_families() {
        let seq = build_sequence(&g, 60).unwrap();
        for x in [ratio(1, 2), int(1), int(3)] {
            for n in 0..=10 {
                if composition_oracle(&g, n, &x).unwrap() != seq.eval(n, &x).unwrap() {
                    failures.push(format!("{} composition n={n} x={x}", g.label()));
                }
            }
        }
        if exp_series_oracle(&g, 60).unwrap() != seq.polys() {
            failures.push(format!("{} exp series", g.label()));
        }
    }
    report(8, "oracles agree with the recurrence", failures.is_empty(), &format!("failures {failures:?}"));
}

#[test]
fn c09_sandwich_grid() {
    let xs = [ratio(1, 2), int(1), int(2)];
    let mut checked = 0;
    let mut bad = Vec::new();
    for seq in [DoubleSequence::sigma(), DoubleSequence::psi()] {
        for r in prop1_grid(&seq, 6, 60, &xs).unwrap() {
            if r.n < 3 {
                continue;
            }
            checked += 1;
            if !(r.lower_strict && r.upper_holds) {
                bad.push((seq.label().to_owned(), r.n, r.d, r.x.clone()));
            }
        }
    }
    let ok = bad.is_empty() && checked == 2 * 6 * 58 * 3;
    report(9, "lower < value <= upper on the grid", ok, &format!("{checked} points, violations {bad:?}"));
}

#[test]
fn c10_threshold_signs() {
    let mut samples: Vec<(u64, num_rational::BigRational)> = (3..=13u64)
        .filter(|&n| n != 5 && n != 8)
        .map(|n| (n, int(1)))
        .collect();
    samples.push((8, ratio(1, 2)));
    samples.push((11, ratio(1, 2)));
    let mut lines = Vec::new();
    let mut ok = true;
    for (family, g1) in [(DoubleSequence::sigma(), ArithFn::sigma(1)), (DoubleSequence::psi(), ArithFn::identity())] {
        for x in [int(1), ratio(1, 2)] {
            let n_max = samples.iter().filter(|(_, sx)| *sx == x).map(|(n, _)| *n).max().unwrap();
            let est = estimate_r(&g1, &x, (2 * n_max + 2).max(60), &ratio(9, 10)).unwrap();
            for (n, _) in samples.iter().filter(|(_, sx)| *sx == x) {
                let rep = verify_thresholds(&family, *n, &x, &est, 5, Some(1 << 30)).unwrap();
                let expected = if n % 3 == 0 { Sign::Positive } else { Sign::Negative };
                let fine = rep.holds && rep.checks.len() == 6 && rep.checks.iter().all(|c| c.sign == expected);
                ok &= fine;
                lines.push(format!("{} n={n} x={x} d>={}:{}", family.label(), rep.threshold, if fine { "ok" } else { "bad" }));
            }
        }
    }
    report(10, "threshold signs in each residue class", ok, &lines.join(", "));
}

#[test]
fn c11_global_nonnegativity() {
    let mut rows = vec![table3_row(1, 100).unwrap()];
    for d in 2..=4 {
        rows.push(table3_row(d, 60).unwrap());
    }
    let ok = rows.iter().all(|r| r.certified && r.failures.is_empty());
    let detail: Vec<String> = rows
        .iter()
        .map(|r| format!("psi_{} n={}..{}: {}", r.d, r.n_from, r.n_to, r.certified))
        .collect();
    report(11, "Δ_n >= 0 on the real line", ok, &detail.join(", "));
}

#[test]
fn c12_laguerre_suite() {
    let checks = [
        ("identity_check(50)", identity_check(50).unwrap()),
        ("turan_sum_check(1, 25)", turan_sum_check(&int(1), 25).unwrap()),
        ("turan_sum_check(2, 25)", turan_sum_check(&int(2), 25).unwrap()),
        ("szego_delta_check(60)", szego_delta_check(60).unwrap()),
    ];
    let ok = checks.iter().all(|(_, r)| r.passed() && !r.checked.is_empty());
    let detail: Vec<String> = checks.iter().map(|(name, r)| format!("{name}: {}", r.passed())).collect();
    report(12, "Laguerre identities", ok, &detail.join(", "));
}

#[test]
fn c13_psi5_zero_structure() {
    let seq = build_sequence(&ArithFn::psi(5), 41).unwrap();
    let mut bad = Vec::new();
    let mut signs = String::new();
    for n in 3..=40u64 {
        let d = delta(&seq, n).unwrap().into_delta();
        let positive: Vec<_> = isolate_real_roots(&d).unwrap().into_iter().filter(|r| r.is_positive()).collect();
        if positive.len() != 2 || positive.iter().any(|r| r.multiplicity != 1) {
            bad.push(format!("n={n}: {} positive zeros", positive.len()));
        }
        let s = sign_at(&seq, n, &int(1)).unwrap();
        let expected = if n == 4 { Sign::Negative } else { Sign::Positive };
        if s != expected {
            bad.push(format!("n={n}: sign {}", s.symbol()));
        }
        signs.push(s.symbol());
    }
    report(13, "psi_5 zeros and signs at x = 1", bad.is_empty(), &format!("signs {signs}, problems {bad:?}"));
}

#[test]
fn c14_figure_labels() {
    let mut detail = Vec::new();
    let mut ok = true;
    for (d, file) in [("2", "figure_psi2_labels.csv"), ("5", "figure_psi5_labels.csv")] {
        let g = golden(file);
        let args = ["figures", "--d", d, "--N", "40", "--labels", "--format", "csv", "--expect", &g];
        let (a, _) = turanlab(&args);
        let (b, _) = turanlab(&args);
        let fine = a.status.success() && a.stdout == b.stdout && a.stdout == std::fs::read(&g).unwrap();
        ok &= fine;
        detail.push(format!("psi_{d}: {}", if fine { "matches golden" } else { "differs" }));
    }
    report(14, "figure label data", ok, &detail.join(", "));
}
