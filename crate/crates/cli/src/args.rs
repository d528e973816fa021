use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "tomokit", version, about = "Symplectic tomograms, characteristic functions and their checks")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Output {
    /// Artifact path; stdout when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Frame selection. `--phi` alone is the optical frame (cos φ, sin φ);
/// with `--squeeze s` it is (s cos φ, s⁻¹ sin φ). Defaults to (1, 0).
#[derive(Debug, Clone, Args, Serialize)]
pub struct FrameArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub squeeze: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Auto,
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorArg {
    Hist,
    Kde,
}

/// Lattice and tolerance flags shared by the φ-integral commands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    /// (μ, ν) lattice as min:max:count; widened automatically unless --fixed-grid.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Keep the lattice exactly as given.
    #[arg(long)]
    pub fixed_grid: bool,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Tabulate W(X|μ,ν) for a catalog state.
    Tomogram {
        #[arg(long)]
        state: String,
        #[command(flatten)]
        frame: FrameArgs,
        /// X grid as min:max:count.
        #[arg(long, allow_hyphen_values = true, default_value = "-6:6:241")]
        x: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate φ(t;μ,ν) at one frame or over a lattice.
    Charfun {
        #[arg(long)]
        charfn: String,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        frame: FrameArgs,
        /// Evaluate on the lattice min:max:count in both μ and ν instead of one frame.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the tomogram conditions on a characteristic function.
    Validate {
        /// Provider descriptor; a state descriptor when used with --empirical.
        #[arg(long, visible_alias = "state")]
        charfn: String,
        #[command(flatten)]
        check: CheckArgs,
        /// y grid of the diagonal check as min:max:count.
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        /// `analytic`, `empirical`, or overrides such as `trace=1e-6,herm=1e-8,purity=1e-3,diag=1e-6,imag=1e-8`.
        #[arg(long)]
        tol: Option<String>,
        /// Sample the state at --angles homodyne angles on [0, pi) and validate the sample means.
        #[arg(long)]
        empirical: bool,
        #[arg(long, default_value_t = 128)]
        angles: usize,
        #[arg(long, default_value_t = 100_000)]
        n_samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Tr ρ² from φ.
    Purity {
        #[arg(long)]
        charfn: String,
        #[command(flatten)]
        check: CheckArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Overlap integrals of two characteristic functions.
    Overlap {
        #[arg(long)]
        charfn: String,
        #[arg(long)]
        charfn2: String,
        #[command(flatten)]
        check: CheckArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Density matrix ρ(y,y′) on a grid.
    Reconstruct {
        #[arg(long)]
        charfn: String,
        /// y grid as min:max:count.
        #[arg(long, allow_hyphen_values = true, default_value = "-4:4:81")]
        grid: String,
        /// μ quadrature grid; chosen from the decay of φ when absent.
        #[arg(long, allow_hyphen_values = true)]
        mu_grid: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Draw X from a tomogram; writes CSV plus a `.json` sidecar.
    Sample {
        #[arg(long)]
        state: String,
        #[command(flatten)]
        frame: FrameArgs,
        #[arg(long, default_value_t = 100_000)]
        n_samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// CSV path; the sidecar goes to `<out>.json`.
        #[arg(long)]
        #[serde(skip)]
        out: PathBuf,
    },
    /// Density estimate from a sample file, compared with the analytic tomogram when the state is known.
    Estimate {
        /// Sample CSV written by `sample` (sidecar at `<samples>.json`).
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, value_enum, default_value = "hist")]
        method: EstimatorArg,
        #[arg(long, default_value_t = 64)]
        bins: usize,
        /// `auto` or a positive width.
        #[arg(long, default_value = "auto")]
        bandwidth: String,
        /// Evaluation grid as min:max:count; defaults to the sample range.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// State to compare against; defaults to the one recorded in the sidecar.
        #[arg(long)]
        state: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Data behind the published tomogram figures.
    Figures {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        fig: u8,
        /// Excitation numbers, comma separated.
        #[arg(long)]
        n: Option<String>,
        /// Values of a, comma separated (figure 2).
        #[arg(long)]
        a: Option<String>,
        #[command(flatten)]
        frame: FrameArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "-4:12:1601")]
        x: String,
        #[command(flatten)]
        output: Output,
    },
}
