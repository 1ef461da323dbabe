use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "turanlab", version, about = "Exact computations with P_n^g(x) and its Turán expressions")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, env = "TURANLAB_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Memory budget for stored values, e.g. 512M or 2G.
    #[arg(long, default_value = "1G", value_parser = parse_bytes, global = true)]
    pub mem_budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients of P_n^g, or its value at x.
    Poly(PolyArgs),
    /// Coefficients of Δ_n^g with real roots and a nonnegativity decision, or
    /// its sign at x.
    Delta(PolyArgs),
    /// Indices n <= N with Δ_n^g(x) < 0.
    Exceptions(ExceptionArgs),
    /// Exception matrix of Δ_n^{ψ_d}(1) over n and d.
    Table1(Table1Args),
    /// Log-concave and strictly log-convex ranges of P_n^{ψ_d}(1).
    Table2(Table2Args),
    /// Certified nonnegativity of Δ_n^{ψ_d} on the real line.
    Table3(Table3Args),
    /// Zeros of Δ_n^{ψ_d} of largest real part and the positive real zeros.
    Figures(FigureArgs),
    /// Residue-class bounds for P_n^{g_d}(x).
    Bounds(BoundArgs),
    /// Thresholds d_0(n, x) and an exact check of the sign above them.
    Thresholds(ThresholdArgs),
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    /// sigma:d, psi:d, id or table:PATH.
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    pub n: u64,
    /// Exact rational "p/q".
    #[arg(long)]
    pub x: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExceptionArgs {
    #[arg(long)]
    pub g: String,
    #[arg(long, default_value = "1")]
    pub x: String,
    #[arg(long = "N")]
    pub n_max: u64,
    /// Stop after this many exceptions.
    #[arg(long)]
    pub stop_after: Option<usize>,
    /// State file, written every 500 indices and resumed from when present.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Include the sign of every Δ_n.
    #[arg(long)]
    pub signs: bool,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long, default_value_t = 18)]
    pub d_max: u32,
    #[arg(long, default_value_t = 14)]
    pub n_max: u64,
    /// Compare the output with this file; exit 1 on mismatch.
    #[arg(long)]
    pub expect: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Table2Args {
    #[arg(long, default_value_t = 9)]
    pub d_max: u32,
    #[arg(long = "N", default_value_t = 200)]
    pub n_max: u64,
    #[arg(long)]
    pub expect: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Table3Args {
    #[arg(long, default_value_t = 4)]
    pub d_max: u32,
    #[arg(long = "N", default_value_t = 100)]
    pub n_max: u64,
    #[arg(long)]
    pub expect: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long = "N", default_value_t = 40)]
    pub n_max: u64,
    /// Emit one label line per n instead of the root data.
    #[arg(long)]
    pub labels: bool,
    #[arg(long)]
    pub expect: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Member of a family, e.g. sigma:3; --d overrides the exponent.
    #[arg(long, conflicts_with = "family")]
    pub g: Option<String>,
    /// sigma or psi.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub x: String,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// sigma or psi.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub x: String,
    /// Number of further d values checked above the threshold.
    #[arg(long, default_value_t = 5)]
    pub window: u32,
    /// Radius r; estimated from P_n^{g_1}(x) when omitted.
    #[arg(long)]
    pub r: Option<String>,
    /// Largest n at which the radius is validated; defaults to max(2n + 2, 60).
    #[arg(long)]
    pub r_depth: Option<u64>,
    /// Factor applied to the estimated radius.
    #[arg(long, default_value = "9/10")]
    pub safety: String,
}

fn parse_bytes(s: &str) -> Result<usize, String> {
    let s = s.trim();
    let (digits, mult) = match s.char_indices().last() {
        Some((i, 'K' | 'k')) => (&s[..i], 1usize << 10),
        Some((i, 'M' | 'm')) => (&s[..i], 1 << 20),
        Some((i, 'G' | 'g')) => (&s[..i], 1 << 30),
        _ => (s, 1),
    };
    digits
        .parse::<usize>()
        .ok()
        .and_then(|v| v.checked_mul(mult))
        .ok_or_else(|| format!("invalid byte count `{s}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_counts() {
        assert_eq!(parse_bytes("1G"), Ok(1 << 30));
        assert_eq!(parse_bytes("512m"), Ok(512 << 20));
        assert_eq!(parse_bytes("4096"), Ok(4096));
        assert!(parse_bytes("lots").is_err());
        assert!(parse_bytes("").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
