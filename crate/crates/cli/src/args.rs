use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbifold_spectral::basis::DEFAULT_GAMMA;
use orbifold_spectral::export::FieldDomain;
use orbifold_spectral::periodicity::{DEFAULT_JND_CENTS, REFERENCE_F0_HZ};
use serde::Serialize;

/// Default low-pass cut: modes 0..=529 are kept.
pub const DEFAULT_N_CUT: usize = 529;
pub const DEFAULT_N_MODES: usize = 2048;
/// 12 samples per semitone at gamma = 12.
pub const DEFAULT_GRID: usize = 144;

#[derive(Debug, Parser)]
#[command(name = "orbispec", version, about = "Spectral smoothing on the dyad orbifold")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Tabulate P_JND(d) and its inversion-symmetric version over cents.
    PeriodicityCurve(PeriodicityCurveArgs),
    /// Write the ordered eigenbasis manifest and optional sampled modes.
    Basis(BasisArgs),
    /// Smooth the periodicity field with the low-pass filter g_n.
    Smooth(SmoothArgs),
    /// Section of the sampled and smoothed field across the diagonal.
    Section(SectionArgs),
    /// Möbius strip mesh carrying a field as vertex scalar.
    Moebius(MoebiusArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PeriodicityCurve(_) => "periodicity-curve",
            Command::Basis(_) => "basis",
            Command::Smooth(_) => "smooth",
            Command::Section(_) => "section",
            Command::Moebius(_) => "moebius",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::PeriodicityCurve(a) => &a.common,
            Command::Basis(a) => &a.common,
            Command::Smooth(a) => &a.common,
            Command::Section(a) => &a.common,
            Command::Moebius(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Ply,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainArg {
    Fundamental,
    Torus,
}

impl From<DomainArg> for FieldDomain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Fundamental => FieldDomain::Fundamental,
            DomainArg::Torus => FieldDomain::Torus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshField {
    Periodicity,
    Smoothed,
    Eigenfunction,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Period of the torus; 12 means one octave in semitones.
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
    /// Grid nodes per axis.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Pitch JND in cents.
    #[arg(long = "jnd-cents", default_value_t = DEFAULT_JND_CENTS)]
    pub jnd_cents: f64,
    /// Index of the last mode kept by the low-pass filter.
    #[arg(long = "n-cut", default_value_t = DEFAULT_N_CUT)]
    pub n_cut: usize,
    /// Number of enumerated eigenmodes.
    #[arg(long = "n-modes", default_value_t = DEFAULT_N_MODES)]
    pub n_modes: usize,
    /// Reference frequency of pitch 0 (C4) in Hz.
    #[arg(long, default_value_t = REFERENCE_F0_HZ)]
    pub f0: f64,
    #[arg(long = "out-dir", default_value = "out")]
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PeriodicityCurveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long = "d-min", default_value_t = 0.0)]
    pub d_min: f64,
    #[arg(long = "d-max", default_value_t = 1200.0)]
    pub d_max: f64,
    #[arg(long = "d-step", default_value_t = 1.0)]
    pub d_step: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BasisArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Modes to sample on the grid, e.g. `0,1,5`.
    #[arg(long = "mode-fields", value_delimiter = ',')]
    pub mode_fields: Vec<usize>,
    #[arg(long, value_enum, default_value_t = DomainArg::Fundamental)]
    pub domain: DomainArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SmoothArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = DomainArg::Fundamental)]
    pub domain: DomainArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SectionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MoebiusArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = MeshField::Smoothed)]
    pub field: MeshField,
    /// Mode index for `--field eigenfunction`.
    #[arg(long, default_value_t = 1)]
    pub mode: usize,
    /// Strip samples per side; the grid must be a multiple of twice this.
    /// Defaults to half the grid.
    #[arg(long)]
    pub resolution: Option<usize>,
}

impl Common {
    /// Flags with their defaults, for tests and library callers.
    pub fn with_out_dir(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            gamma: DEFAULT_GAMMA,
            grid: DEFAULT_GRID,
            jnd_cents: DEFAULT_JND_CENTS,
            n_cut: DEFAULT_N_CUT,
            n_modes: DEFAULT_N_MODES,
            f0: REFERENCE_F0_HZ,
            out_dir: out_dir.into(),
            format: None,
        }
    }
}
