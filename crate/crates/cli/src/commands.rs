use std::fs;
use std::path::Path;

use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use turanlab::arith::{ArithFn, DoubleSequence};
use turanlab::bounds::{estimate_r, prop1_bounds, validate_r, verify_thresholds, RadiusEstimate};
use turanlab::figures::{figure_rows, label_lines};
use turanlab::genpoly::{build_sequence, values_at};
use turanlab::rational::{format_rational, parse_rational};
use turanlab::realroots::{isolate_real_roots, nonnegativity, EnclosureRecord};
use turanlab::turan::{
    delta, sign_at_value_mode, table1, table2, table3_row, ExceptionScan, ScanOptions, ScanState,
};

use crate::args::*;
use crate::error::CliError;
use crate::output::{json, Table};

/// Rendered output plus an optional property-check failure.
pub struct Outcome {
    pub text: String,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, failure: None }
    }

    fn check(text: String, failure: Option<String>) -> Self {
        Self { text, failure }
    }
}

pub fn run(command: &Command, g: &Global) -> Result<Outcome, CliError> {
    match command {
        Command::Poly(a) => poly(a, g),
        Command::Delta(a) => delta_cmd(a, g),
        Command::Exceptions(a) => exceptions(a, g),
        Command::Table1(a) => expect(render_table1(a, g)?, a.expect.as_deref()),
        Command::Table2(a) => expect(render_table2(a, g)?, a.expect.as_deref()),
        Command::Table3(a) => table3(a, g),
        Command::Figures(a) => figures(a, g),
        Command::Bounds(a) => bounds(a, g),
        Command::Thresholds(a) => thresholds(a, g),
    }
}

fn expect(text: String, path: Option<&Path>) -> Result<Outcome, CliError> {
    let failure = match path {
        Some(p) => {
            let golden = fs::read_to_string(p)?;
            (golden != text).then(|| format!("output differs from {}", p.display()))
        }
        None => None,
    };
    Ok(Outcome::check(text, failure))
}

fn rational(s: &str) -> Result<BigRational, CliError> {
    parse_rational(s).map_err(|e| CliError::Usage(format!("--x `{s}`: {e}")))
}

/// `sigma:d`, `psi:d`, `id`, or `table:PATH` with one rational per line or
/// separated by commas or whitespace.
pub fn arith_fn(spec: &str) -> Result<ArithFn, CliError> {
    if let Some(path) = spec.strip_prefix("table:") {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read table `{path}`: {e}")))?;
        let values = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(parse_rational)
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(ArithFn::table(spec, values)?);
    }
    Ok(ArithFn::from_spec(spec)?)
}

fn strings(v: &[BigRational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn poly(a: &PolyArgs, g: &Global) -> Result<Outcome, CliError> {
    let f = arith_fn(&a.g)?;
    if let Some(xs) = &a.x {
        let x = rational(xs)?;
        let value = format_rational(&values_at(&f, &x, a.n)?[a.n as usize]);
        return Ok(Outcome::ok(match g.format {
            Format::Json => json(&json!({ "g": f.label(), "n": a.n, "x": format_rational(&x), "value": value }))?,
            Format::Csv => {
                let mut t = Table::new(["g", "n", "x", "value"]);
                t.push([f.label().to_string(), a.n.to_string(), format_rational(&x), value]);
                t.render()?
            }
        }));
    }
    let seq = build_sequence(&f, a.n)?;
    let coeffs = strings(seq.get(a.n)?.coeffs());
    Ok(Outcome::ok(match g.format {
        Format::Json => json(&json!({ "g": f.label(), "n": a.n, "coefficients": coeffs }))?,
        Format::Csv => {
            let mut t = Table::new(["k", "coefficient"]);
            for (k, c) in coeffs.iter().enumerate() {
                t.push([k.to_string(), c.clone()]);
            }
            t.render()?
        }
    }))
}

fn delta_cmd(a: &PolyArgs, g: &Global) -> Result<Outcome, CliError> {
    let f = arith_fn(&a.g)?;
    if a.n == 0 {
        return Err(CliError::Usage("Δ_n needs n >= 1".into()));
    }
    if let Some(xs) = &a.x {
        let x = rational(xs)?;
        let sign = sign_at_value_mode(&f, a.n, &x)?;
        return Ok(Outcome::ok(match g.format {
            Format::Json => json(&json!({ "g": f.label(), "n": a.n, "x": format_rational(&x), "sign": sign }))?,
            Format::Csv => {
                let mut t = Table::new(["g", "n", "x", "sign"]);
                t.push([f.label().to_string(), a.n.to_string(), format_rational(&x), sign.symbol().to_string()]);
                t.render()?
            }
        }));
    }
    let seq = build_sequence(&f, a.n + 1)?;
    let d = delta(&seq, a.n)?.into_delta();
    let cert = nonnegativity(&d)?;
    let roots: Vec<EnclosureRecord> = isolate_real_roots(&d)?.iter().map(Into::into).collect();
    Ok(Outcome::ok(match g.format {
        Format::Json => json(&json!({
            "g": f.label(),
            "n": a.n,
            "coefficients": strings(d.coeffs()),
            "nonnegative": cert.nonnegative,
            "witness": cert.witness.as_ref().map(format_rational),
            "real_roots": roots,
        }))?,
        Format::Csv => {
            let mut t = Table::new(["lo", "hi", "multiplicity", "approx"]);
            for r in &roots {
                t.push([r.lo.clone(), r.hi.clone(), r.multiplicity.to_string(), r.approx.to_string()]);
            }
            t.render()?
        }
    }))
}

fn write_checkpoint(path: &Path, state: &ScanState) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_vec(state)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn exceptions(a: &ExceptionArgs, g: &Global) -> Result<Outcome, CliError> {
    let f = arith_fn(&a.g)?;
    let x = rational(&a.x)?;
    let mut scan = match &a.checkpoint {
        Some(p) if p.exists() => {
            let state: ScanState = serde_json::from_slice(&fs::read(p)?)
                .map_err(|e| CliError::Usage(format!("unreadable checkpoint {}: {e}", p.display())))?;
            let scan = ExceptionScan::resume(&f, &state)?;
            if *scan.x() != x {
                return Err(CliError::Usage(format!(
                    "checkpoint {} is for x = {}",
                    p.display(),
                    format_rational(scan.x())
                )));
            }
            scan
        }
        _ => ExceptionScan::new(&f, &x)?,
    };
    let opts = ScanOptions {
        stop_after: a.stop_after,
        checkpoint_every: 500,
        mem_budget: Some(g.mem_budget),
        record_signs: a.signs,
    };
    let stopped = scan.run(a.n_max, &opts, |s| match &a.checkpoint {
        Some(p) => write_checkpoint(p, &s.state()).map_err(|e| turanlab::Error::Internal(e.to_string())),
        None => Ok(()),
    })?;
    if let Some(p) = &a.checkpoint {
        write_checkpoint(p, &scan.state())?;
    }
    let report = scan.report(a.n_max, stopped, a.signs);
    Ok(Outcome::ok(match g.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut t = Table::new(["g", "x", "N", "n"]);
            for n in &report.exceptions {
                t.push([report.g.clone(), report.x.clone(), report.n_max.to_string(), n.to_string()]);
            }
            t.render()?
        }
    }))
}

fn render_table1(a: &Table1Args, g: &Global) -> Result<String, CliError> {
    let m = table1(a.d_max, a.n_max)?;
    match g.format {
        Format::Json => {
            let rows: Vec<_> = m
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let ds: Vec<u32> = (1..=a.d_max).filter(|&d| row[d as usize - 1]).collect();
                    json!({ "n": i + 1, "d": ds })
                })
                .collect();
            json(&json!({ "x": "1", "d_max": a.d_max, "n_max": a.n_max, "exceptions": rows }))
        }
        Format::Csv => {
            let mut header = vec!["n".to_string()];
            header.extend((1..=a.d_max).map(|d| d.to_string()));
            let mut t = Table::new(header);
            for (i, row) in m.iter().enumerate() {
                let mut cells = vec![(i + 1).to_string()];
                cells.extend(row.iter().map(|&b| if b { "*" } else { "" }.to_string()));
                t.push(cells);
            }
            t.render()
        }
    }
}

fn render_table2(a: &Table2Args, g: &Global) -> Result<String, CliError> {
    let rows = table2(a.d_max, a.n_max)?;
    match g.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut t = Table::new(["d", "log_concave", "strictly_log_convex"]);
            for r in &rows {
                t.push([r.d.to_string(), r.log_concave.clone(), r.strictly_log_convex.clone()]);
            }
            t.render()
        }
    }
}

fn table3(a: &Table3Args, g: &Global) -> Result<Outcome, CliError> {
    let rows = (1..=a.d_max)
        .map(|d| table3_row(d, a.n_max))
        .collect::<Result<Vec<_>, _>>()?;
    let text = match g.format {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let mut t = Table::new(["d", "n_from", "n_to", "certified", "failures"]);
            for r in &rows {
                let failures: Vec<String> = r.failures.iter().map(|(n, w)| format!("{n}@{w}")).collect();
                t.push([
                    r.d.to_string(),
                    r.n_from.to_string(),
                    r.n_to.to_string(),
                    r.certified.to_string(),
                    failures.join(";"),
                ]);
            }
            t.render()?
        }
    };
    let mut out = expect(text, a.expect.as_deref())?;
    if out.failure.is_none() {
        out.failure = rows
            .iter()
            .find(|r| !r.certified)
            .map(|r| format!("Δ_n^{{ψ_{}}} takes negative values for n in {:?}", r.d, r.failures));
    }
    Ok(out)
}

#[derive(Serialize)]
struct Labels<'a> {
    d: u32,
    n_max: u64,
    labels: &'a [String],
}

fn figures(a: &FigureArgs, g: &Global) -> Result<Outcome, CliError> {
    let rows = figure_rows(a.d, a.n_max)?;
    let text = if a.labels {
        let lines = label_lines(&rows);
        match g.format {
            Format::Json => json(&Labels { d: a.d, n_max: a.n_max, labels: &lines })?,
            Format::Csv => {
                let mut t = Table::new(["n", "rightmost", "positive_real_zeros"]);
                for l in &lines {
                    t.push(l.split(','));
                }
                t.render()?
            }
        }
    } else {
        match g.format {
            Format::Json => json(&rows)?,
            Format::Csv => {
                let mut t = Table::new(["n", "re", "im", "is_real", "alpha_index", "rightmost", "converged"]);
                for r in &rows {
                    t.push([
                        r.n.to_string(),
                        r.re.to_string(),
                        r.im.to_string(),
                        r.is_real.to_string(),
                        r.alpha_index.map(|k| k.to_string()).unwrap_or_default(),
                        r.rightmost.to_string(),
                        r.converged.to_string(),
                    ]);
                }
                t.render()?
            }
        }
    };
    expect(text, a.expect.as_deref())
}

fn bounds(a: &BoundArgs, g: &Global) -> Result<Outcome, CliError> {
    let (family, d) = match (&a.g, &a.family) {
        (Some(spec), _) => {
            let f = ArithFn::from_spec(spec)?;
            let name = spec.split_once(':').map_or("psi", |(k, _)| k);
            let d = a.d.or(f.exponent()).ok_or_else(|| CliError::Usage("--d is required".into()))?;
            (DoubleSequence::by_name(name)?, d)
        }
        (None, Some(name)) => (
            DoubleSequence::by_name(name)?,
            a.d.ok_or_else(|| CliError::Usage("--d is required with --family".into()))?,
        ),
        (None, None) => return Err(CliError::Usage("one of --g or --family is required".into())),
    };
    let x = rational(&a.x)?;
    let report = prop1_bounds(&family, a.n, d, &x)?;
    let text = match g.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut t = Table::new(["n", "d", "x", "lower", "value", "upper", "improved_upper", "holds"]);
            t.push([
                report.n.to_string(),
                report.d.to_string(),
                report.x.clone(),
                report.lower.clone(),
                report.value.clone(),
                report.upper.clone(),
                report.improved_upper.clone().unwrap_or_default(),
                report.holds().to_string(),
            ]);
            t.render()?
        }
    };
    let failure = (!report.holds()).then(|| format!("bounds fail for n = {}, d = {d}", a.n));
    Ok(Outcome::check(text, failure))
}

fn radius(a: &ThresholdArgs, family: &DoubleSequence, x: &BigRational) -> Result<RadiusEstimate, CliError> {
    let g1 = family.member(1);
    let depth = a.r_depth.unwrap_or((2 * a.n + 2).max(60));
    match &a.r {
        Some(rs) => {
            let r = parse_rational(rs).map_err(|e| CliError::Usage(format!("--r `{rs}`: {e}")))?;
            let validated_to = validate_r(&g1, x, &r, depth)?;
            Ok(RadiusEstimate {
                g1: g1.label().to_string(),
                x: x.clone(),
                r,
                validated_to,
                safety_factor: BigRational::from_integer(1.into()),
            })
        }
        None => {
            let safety = parse_rational(&a.safety).map_err(|e| CliError::Usage(format!("--safety: {e}")))?;
            Ok(estimate_r(&g1, x, depth, &safety)?)
        }
    }
}

fn thresholds(a: &ThresholdArgs, g: &Global) -> Result<Outcome, CliError> {
    let family = DoubleSequence::by_name(&a.family)?;
    let x = rational(&a.x)?;
    let est = radius(a, &family, &x)?;
    let report = verify_thresholds(&family, a.n, &x, &est, a.window, Some(g.mem_budget))?;
    let text = match g.format {
        Format::Json => json(&json!({
            "radius": {
                "g1": est.g1,
                "x": format_rational(&est.x),
                "r": format_rational(&est.r),
                "validated_to": est.validated_to,
                "safety_factor": format_rational(&est.safety_factor),
            },
            "report": report,
        }))?,
        Format::Csv => {
            let mut t = Table::new(["family", "n", "x", "threshold", "d", "sign", "as_claimed"]);
            for c in &report.checks {
                t.push([
                    report.family.clone(),
                    report.n.to_string(),
                    report.x.clone(),
                    report.threshold.to_string(),
                    c.d.to_string(),
                    c.sign.symbol().to_string(),
                    c.as_claimed.to_string(),
                ]);
            }
            t.render()?
        }
    };
    let failure = (!report.holds).then(|| {
        let bad: Vec<u32> = report.checks.iter().filter(|c| !c.as_claimed).map(|c| c.d).collect();
        format!("sign {} fails at d in {bad:?}", report.claim)
    });
    Ok(Outcome::check(text, failure))
}
