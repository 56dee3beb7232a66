//! Command-line arguments and the resolved, serializable run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use intertwine::operators::RecursionRule;
use intertwine::spectrum::Field;
use serde::{Deserialize, Serialize};

pub const M_MAX_CEILING: u32 = 6;

#[derive(Parser, Debug)]
#[command(name = "intertwine", version, about = "Bilinear intertwining operators for SO0(n,1): construction, verification and numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Run from a serialized configuration (the `config` object of a JSON report).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Latex,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Render E_j and M_j.
    Construct {
        #[arg(long)]
        j: u32,
        /// Substitute an integer dimension d; symbolic when omitted.
        #[arg(long)]
        dim: Option<i64>,
    },
    /// Exact checks of the kernel identities.
    VerifySymbolic {
        #[arg(long, default_value_t = 4)]
        m_max: u32,
        #[arg(long, value_enum, default_value_t = RecursionSign::Verified)]
        recursion_sign: RecursionSign,
    },
    /// Numerical suites.
    VerifyNumeric(NumericArgs),
    /// Discrete components of pi_alpha (x) pi_beta.
    Spectrum {
        #[arg(long, value_enum)]
        field: FieldArg,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
    },
    /// Pole factors of E_j against the stated set.
    Poles {
        #[arg(long)]
        j: u32,
    },
}

#[derive(Args, Debug)]
pub struct NumericArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub d: Option<usize>,
    /// Defaults to 0.2 for d = 1 and 0.1 otherwise.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Defaults to `alpha`.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Grid points per axis.
    #[arg(long = "grid-n", alias = "N", default_value_t = 256)]
    pub grid_n: usize,
    /// Box side length.
    #[arg(long = "box-len", alias = "L", default_value_t = 20.0)]
    pub box_len: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Relative tolerance (norms, equivariance) or drift limit (bound).
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Standard errors allowed in Monte Carlo comparisons.
    #[arg(long, default_value_t = 3.0)]
    pub sigmas: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecursionSign {
    Verified,
    PaperProof,
    AsPrinted,
}

impl From<RecursionSign> for RecursionRule {
    fn from(s: RecursionSign) -> Self {
        match s {
            RecursionSign::Verified => RecursionRule::Verified,
            RecursionSign::PaperProof => RecursionRule::ProofSign,
            RecursionSign::AsPrinted => RecursionRule::AsPrinted,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum FieldArg {
    #[value(name = "R", alias = "r")]
    R,
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "H", alias = "h")]
    H,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::R => Field::R,
            FieldArg::C => Field::C,
            FieldArg::H => Field::H,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Norms,
    Bound,
    Mc,
    Equivariance,
}

/// Everything a run depends on, with defaults filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub format: Format,
    pub output: Option<PathBuf>,
    #[serde(flatten)]
    pub task: Task,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Task {
    Construct {
        j: u32,
        dim: Option<i64>,
    },
    VerifySymbolic {
        m_max: u32,
        recursion_sign: RecursionSign,
    },
    VerifyNumeric(NumericConfig),
    Spectrum {
        field: FieldArg,
        n: u32,
        alpha: f64,
        beta: f64,
    },
    Poles {
        j: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericConfig {
    pub suite: Suite,
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    pub m: u32,
    pub trials: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub box_len: f64,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub sigmas: f64,
}

impl NumericArgs {
    pub fn resolve(&self) -> NumericConfig {
        let d = self.d.unwrap_or(1);
        let alpha = self.alpha.unwrap_or(if d == 1 { 0.2 } else { 0.1 });
        let m = self.m.unwrap_or(match self.suite {
            Suite::Equivariance => 1,
            _ => 0,
        });
        let tolerance = self.tolerance.unwrap_or(match self.suite {
            Suite::Bound => 0.1,
            _ => 1e-6,
        });
        NumericConfig {
            suite: self.suite,
            d,
            alpha,
            beta: self.beta.unwrap_or(alpha),
            m,
            trials: self.trials,
            n: self.grid_n,
            box_len: self.box_len,
            samples: self.samples,
            seed: self.seed,
            tolerance,
            sigmas: self.sigmas,
        }
    }
}

impl Command {
    pub fn resolve(&self) -> Task {
        match self {
            Command::Construct { j, dim } => Task::Construct { j: *j, dim: *dim },
            Command::VerifySymbolic { m_max, recursion_sign } => Task::VerifySymbolic {
                m_max: *m_max,
                recursion_sign: *recursion_sign,
            },
            Command::VerifyNumeric(args) => Task::VerifyNumeric(args.resolve()),
            Command::Spectrum { field, n, alpha, beta } => Task::Spectrum {
                field: *field,
                n: *n,
                alpha: *alpha,
                beta: *beta,
            },
            Command::Poles { j } => Task::Poles { j: *j },
        }
    }
}
