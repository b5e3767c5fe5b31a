//! Command-line surface and its validation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use edm_pareto::limits::default_u_grid;

use crate::error::CliError;
use crate::output::Cell;

#[derive(Debug, Parser)]
#[command(name = "edm-pareto", version, about = "Small-dispersion Pareto limit diagnostics for exponential dispersion models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    LimitTable,
    Ks,
    EstimateEll,
    Sample,
    Density,
    ApproxError,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Laplace-transform limit table over t × u
    LimitTable(Flags),
    /// KS distance of Y^{-t} from the Pareto limit, per t
    Ks(Flags),
    /// Fitted slow-log index of the Lévy tail
    EstimateEll(Flags),
    /// Draws from the model, one per row
    Sample(Flags),
    /// Density of Y and of U = Y^{-t}
    Density(Flags),
    /// Sup-distance between the exact CDF and the Pareto-based approximation
    ApproxError(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Flags {
    /// gamma | harmonic | bessel | user | user:<levy-spec-file>
    #[arg(long, default_value = "gamma")]
    pub family: String,
    #[arg(long, default_value_t = 0.0)]
    pub theta0: f64,
    /// Multiplier c of the Lévy measure (index becomes cℓ)
    #[arg(long, default_value_t = 1.0)]
    pub ell_scale: f64,
    /// Comma-separated dispersion values, ascending
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t_grid: Option<Vec<f64>>,
    /// Comma-separated evaluation points, ascending
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Lévy measure description for the user family
    #[arg(long)]
    pub levy_spec: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyChoice {
    Gamma,
    Harmonic,
    Bessel,
    User(PathBuf),
}

impl FamilyChoice {
    pub fn label(&self) -> String {
        match self {
            FamilyChoice::Gamma => "gamma".into(),
            FamilyChoice::Harmonic => "harmonic".into(),
            FamilyChoice::Bessel => "bessel".into(),
            FamilyChoice::User(p) => format!("user:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub family: FamilyChoice,
    pub theta0: f64,
    pub ell_scale: f64,
    pub t_grid: Vec<f64>,
    pub u_grid: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::LimitTable => "limit-table",
            CommandKind::Ks => "ks",
            CommandKind::EstimateEll => "estimate-ell",
            CommandKind::Sample => "sample",
            CommandKind::Density => "density",
            CommandKind::ApproxError => "approx-error",
        }
    }

    fn default_t_grid(self) -> Vec<f64> {
        match self {
            CommandKind::LimitTable => vec![1e-3, 1e-2, 1e-1],
            CommandKind::Ks => vec![0.02, 0.05, 0.1, 0.2, 0.5],
            CommandKind::Sample => vec![0.1],
            CommandKind::Density => vec![0.1, 0.5, 1.0],
            CommandKind::ApproxError => vec![0.01, 0.05, 0.1, 0.5],
            CommandKind::EstimateEll => vec![1.0],
        }
    }

    fn default_samples(self) -> usize {
        match self {
            CommandKind::Sample => 1000,
            _ => 100_000,
        }
    }
}

impl Command {
    fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::LimitTable(f) => (CommandKind::LimitTable, f),
            Command::Ks(f) => (CommandKind::Ks, f),
            Command::EstimateEll(f) => (CommandKind::EstimateEll, f),
            Command::Sample(f) => (CommandKind::Sample, f),
            Command::Density(f) => (CommandKind::Density, f),
            Command::ApproxError(f) => (CommandKind::ApproxError, f),
        }
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(CliError::Config(format!("{name} is empty")));
    }
    if let Some(v) = grid.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(CliError::Config(format!("{name} holds {v}; values must be finite and > 0")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config(format!("{name} must be strictly ascending")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_command(command: Command) -> Result<Self, CliError> {
        let (kind, f) = command.split();
        let family = match (f.family.as_str(), f.levy_spec) {
            ("gamma", None) => FamilyChoice::Gamma,
            ("harmonic", None) => FamilyChoice::Harmonic,
            ("bessel", None) => FamilyChoice::Bessel,
            ("user", Some(p)) => FamilyChoice::User(p),
            ("user", None) => return Err(CliError::Config("family user needs --levy-spec".into())),
            (s, None) if s.starts_with("user:") && s.len() > 5 => FamilyChoice::User(PathBuf::from(&s[5..])),
            (s, Some(_)) if ["gamma", "harmonic", "bessel"].contains(&s) || s.starts_with("user:") => {
                return Err(CliError::Config("--levy-spec applies to --family user only".into()))
            }
            (s, _) => {
                return Err(CliError::Config(format!(
                    "unknown family '{s}' (expected gamma, harmonic, bessel, user or user:<file>)"
                )))
            }
        };
        if !(f.theta0 >= 0.0 && f.theta0.is_finite()) {
            return Err(CliError::Config(format!("theta0 must be finite and >= 0, got {}", f.theta0)));
        }
        if !(f.ell_scale > 0.0 && f.ell_scale.is_finite()) {
            return Err(CliError::Config(format!("ell-scale must be finite and > 0, got {}", f.ell_scale)));
        }
        let t_grid = f.t_grid.unwrap_or_else(|| kind.default_t_grid());
        check_grid("t-grid", &t_grid)?;
        let u_grid = f.u_grid.unwrap_or_else(default_u_grid);
        check_grid("u-grid", &u_grid)?;
        let samples = f.samples.unwrap_or_else(|| kind.default_samples());
        if samples == 0 {
            return Err(CliError::Config("samples must be >= 1".into()));
        }
        Ok(RunConfig {
            command: kind,
            family,
            theta0: f.theta0,
            ell_scale: f.ell_scale,
            t_grid,
            u_grid,
            samples,
            seed: f.seed,
            format: f.format,
            out: f.out,
        })
    }

    /// Configuration echo embedded in every output. The output path is left
    /// out so that the same run written to two places is byte-identical.
    pub fn echo(&self) -> Vec<(String, Cell)> {
        vec![
            ("family".into(), self.family.label().into()),
            ("theta0".into(), self.theta0.into()),
            ("ell_scale".into(), self.ell_scale.into()),
            ("t_grid".into(), Cell::Floats(self.t_grid.clone())),
            ("u_grid".into(), Cell::Floats(self.u_grid.clone())),
            ("samples".into(), self.samples.into()),
            ("seed".into(), self.seed.into()),
            (
                "format".into(),
                match self.format {
                    Format::Csv => "csv",
                    Format::Json => "json",
                }
                .into(),
            ),
        ]
    }
}
