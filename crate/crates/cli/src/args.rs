//! Command line and run-config surface. The same types parse flags and
//! `run --config` files, so a config is exactly a serialized invocation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "epschain", version, about = "Chain calculus on finite metric measure spaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

/// A run-config file: one command plus global settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub global: Global,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Global {
    /// Result JSON path (standard output when omitted).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// CSV profile path, for commands that produce one.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_feas: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_kkt: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_budget_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate or validate a space.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Upper gradients: verify, minimize, ladder, consistency.
    #[command(subcommand)]
    Gradient(GradientCmd),
    /// (eps, p)-modulus of a chain family.
    Modulus(ModulusArgs),
    /// Modulus ladder of chains joining two points under the Riesz measure.
    Keith(KeithArgs),
    /// Poincare diagnostics.
    #[command(subcommand)]
    Poincare(PoincareCmd),
    /// Chain potential from seed values and its gradient check.
    Potential(PotentialArgs),
    /// Leibniz gradient of a product.
    Leibniz(LeibnizArgs),
    /// Density-in-energy pipeline over a refining family of grids.
    EbPipeline(EbArgs),
    /// Shifted Riemann sums of an expression.
    Riemann(RiemannArgs),
    /// List or write the bundled fixtures.
    Fixtures(FixturesArgs),
    /// Execute a run-config file.
    #[serde(skip)]
    Run(RunArgs),
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Space(c) => format!("space {}", c.name()),
            Command::Gradient(c) => format!("gradient {}", c.name()),
            Command::Modulus(_) => "modulus".into(),
            Command::Keith(_) => "keith".into(),
            Command::Poincare(c) => format!("poincare {}", c.name()),
            Command::Potential(_) => "potential".into(),
            Command::Leibniz(_) => "leibniz".into(),
            Command::EbPipeline(_) => "eb-pipeline".into(),
            Command::Riemann(_) => "riemann".into(),
            Command::Fixtures(_) => "fixtures".into(),
            Command::Run(_) => "run".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
}

// Where the space comes from: exactly one of the three sources.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceInput {
    /// Space document (.json, or .csv point table).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<PathBuf>,
    /// Headerless n x n distance matrix CSV, used with --masses.
    #[arg(long, requires = "masses")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
    #[arg(long, requires = "matrix")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub masses: Option<PathBuf>,
    /// Bundled fixture name (see `fixtures`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceCmd {
    /// Generate a built-in space.
    Gen(SpaceGenArgs),
    /// Load and validate a space; report its basic statistics.
    Validate(SpaceValidateArgs),
}

impl SpaceCmd {
    fn name(&self) -> &'static str {
        match self {
            SpaceCmd::Gen(_) => "gen",
            SpaceCmd::Validate(_) => "validate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceGenArgs {
    /// grid, punctured-grid or two-sequence.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<usize>,
    /// Defaults to 1/(side-1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    /// `cell` (spacing^dim) or a constant mass.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub punctures: Vec<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_min: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    /// Snowflake exponent applied to the generated metric.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Also write the space document here.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub write: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceValidateArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    /// Snowflake exponent applied after loading.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientCmd {
    /// Check a candidate eps-upper gradient.
    Verify(VerifyArgs),
    /// Minimal eps-upper gradient.
    Min(SolveArgs),
    /// Minimal p-weak eps-upper gradient.
    Weak(SolveArgs),
    /// Minimal energies down a decreasing eps list.
    Ladder(LadderArgs),
    /// Path-integral consistency of a verified gradient.
    Consistency(ConsistencyArgs),
}

impl GradientCmd {
    fn name(&self) -> &'static str {
        match self {
            GradientCmd::Verify(_) => "verify",
            GradientCmd::Min(_) => "min",
            GradientCmd::Weak(_) => "weak",
            GradientCmd::Ladder(_) => "ladder",
            GradientCmd::Consistency(_) => "consistency",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    /// Function field spec; defaults to the fixture's function.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub one_sided: bool,
    /// Skip pairs whose two-point chains are modulus-null.
    #[arg(long)]
    #[serde(default)]
    pub weak: bool,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub one_sided: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    /// Strictly decreasing, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps_list: Vec<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub one_sided: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsistencyArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive_limit: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walks: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    /// connect:x,y | hit:ids | file:chains.json
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// default | riesz:x,y,L
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    /// all | finite:x,y | lip[:K]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    /// Also report the modulus-null verdict and certificate.
    #[arg(long)]
    #[serde(default)]
    pub exceptional: bool,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sep_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeithArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps_list: Vec<f64>,
    /// Defaults to finite:x,y.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoincareCmd {
    /// Truncated Riesz weights of a pair.
    Riesz(RieszArgs),
    /// Ball Poincare audit.
    Ball(BallArgs),
    /// Pointwise inequality through budgeted chains.
    Pointwise(PointwiseArgs),
    /// Chain width of a set between two points.
    Width(WidthArgs),
    /// Open-shell Minkowski profile (CSV columns r,value).
    Minkowski(MinkowskiArgs),
    /// Separating-set audit under the Riesz measure.
    Bmc(BmcArgs),
}

impl PoincareCmd {
    fn name(&self) -> &'static str {
        match self {
            PoincareCmd::Riesz(_) => "riesz",
            PoincareCmd::Ball(_) => "ball",
            PoincareCmd::Pointwise(_) => "pointwise",
            PoincareCmd::Width(_) => "width",
            PoincareCmd::Minkowski(_) => "minkowski",
            PoincareCmd::Bmc(_) => "bmc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RieszArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dilation: Option<f64>,
    /// Comma separated; defaults to distances and their midpoints.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointwiseArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Chain-length budget factor.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Defaults to the joining scale of the pair.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidthArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// Point ids, comma separated.
    #[arg(long)]
    pub set: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinkowskiArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    #[arg(long)]
    pub set: String,
    /// default | riesz:x,y,L
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    /// Defaults to the distinct distances.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BmcArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    /// Candidate set, comma separated ids; repeat for several.
    #[arg(long = "candidate", required = true)]
    pub candidates: Vec<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    /// Seed point ids, comma separated.
    #[arg(long)]
    pub seeds: String,
    /// Seed values, comma separated, same order as --seeds.
    #[arg(long = "uA", alias = "ua", value_delimiter = ',', required = true)]
    #[serde(rename = "uA")]
    pub ua: Vec<f64>,
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeibnizArgs {
    #[command(flatten)]
    #[serde(default)]
    pub input: SpaceInput,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    pub phi: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EbArgs {
    /// Only `grid:1d` (uniform grids of [0, 1]).
    #[arg(long, default_value = "grid:1d")]
    pub family: String,
    /// Interval counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Expression in `x`.
    #[arg(long)]
    pub u: String,
    /// Expression in `x`.
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_factor: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// all | endpoints
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiemannArgs {
    /// Expression in `s`.
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Shifts in [0, 1], comma separated; sampled from --seed when omitted.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t: Vec<f64>,
    /// Number of sampled shifts when --t is omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Reference value of the integral; adds errors to the report.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixturesArgs {
    /// Write each fixture's space document and manifest into this directory.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub write: Option<PathBuf>,
}
