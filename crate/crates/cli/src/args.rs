//! Command-line grammar.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use nehari_core::hankel::Spacing;

#[derive(Debug, Parser)]
#[command(name = "nehari", version, about = "Hankel operators on the disc Paley-Wiener space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Directory receiving CSV, JSON and SVG outputs.
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,

    /// Seed for sampling oracles.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify disjointness of the angular sectors over a range of n.
    Geometry(GeometryArgs),
    /// Spectral norm of one component kernel with a refinement ladder.
    Norm(NormArgs),
    /// Duality lower bound against the computed norm, swept over n.
    Scaling(ScalingArgs),
    /// Hilbert-Schmidt norms and the weighted boundary integral.
    Hs(HsArgs),
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// Values of n: `a..b` (inclusive) or a comma list.
    #[arg(long, default_value = "2..64")]
    pub n_list: NList,

    /// Replace the admissible radius by `factor * (2/n)^2`.
    #[arg(long)]
    pub radius_factor: Option<f64>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Grid spacing, `r/<k>` or an absolute value. Must not exceed r/8.
    #[arg(long, default_value = "r/8")]
    pub h: Spacing,

    /// Relative tolerance of the power iteration.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,

    /// Node budget per kernel grid.
    #[arg(long, default_value_t = 6000)]
    pub max_nodes: usize,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,

    #[command(flatten)]
    pub kernel: KernelArgs,

    /// Also dump the kernel at `h` as little-endian binary.
    #[arg(long)]
    pub dump_kernel: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[arg(long, default_value = "4,8,16")]
    pub n_list: NList,

    #[command(flatten)]
    pub kernel: KernelArgs,

    /// Tail tolerance of the `||f||_1` quadrature.
    #[arg(long, default_value_t = 1e-3)]
    pub l1_tol: f64,

    /// Angular node budget of the `||f||_1` quadrature.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub l1_budget: usize,

    /// Decay exponent for the closed-form lower bound.
    #[arg(long, default_value_t = 4.0)]
    pub kappa: f64,

    /// Append n = 32 to the sweep.
    #[arg(long)]
    pub extended: bool,
}

#[derive(Debug, Args)]
pub struct HsArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,

    #[command(flatten)]
    pub kernel: KernelArgs,
}

/// A list of `n` values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NList(pub Vec<usize>);

impl FromStr for NList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let values = if let Some((a, b)) = s.split_once("..") {
            let a = parse_n(a)?;
            let b = parse_n(b.strip_prefix('=').unwrap_or(b))?;
            (a..=b).collect::<Vec<_>>()
        } else {
            s.split(',').map(parse_n).collect::<Result<Vec<_>, _>>()?
        };
        if values.is_empty() {
            return Err(format!("`{s}` is an empty range"));
        }
        if let Some(bad) = values.iter().find(|&&n| n < 2) {
            return Err(format!("n must be at least 2, got {bad}"));
        }
        Ok(NList(values))
    }
}

fn parse_n(s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{}` is not a positive integer", s.trim()))
}
