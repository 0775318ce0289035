//! Command-line surface: `generate`, `analyze` and `verify` jobs.
//!
//! A job is resolved from an optional JSON config file, then command-line
//! flags, then the `KDNLS_PRECISION` environment variable, in that order of
//! increasing priority.

use crate::catalog::{self, CatalogEntry, Transcription};
use crate::darboux::{
    build_reduced_set, degenerate_limit_with, n_fold_with, DTOutput, DegenerationSpec, DtConfig,
};
use crate::lax::{make_plane_wave_seed, PhasePolynomial, Seed};
use crate::numerics::{ComplexField2D, Grid2D, Precision};
use crate::verify::acceptance::{self, Suite};
use crate::verify::{peak_analysis, ConventionVariant, PeakSet, VerifyError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const PRECISION_ENV: &str = "KDNLS_PRECISION";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidConfig(_) => 2,
            CliError::Io { .. } => 3,
            CliError::VerificationFailed(_) => 4,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidConfig(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionKind {
    Soliton1,
    Soliton2,
    Positon,
    Breather,
    Rogue1,
    Rogue2,
    Rogue3,
    EngineNfold,
    EngineDegenerate,
}

const PW_SEED: [(&str, f64); 5] = [
    ("a", -2.0),
    ("c", 1.0),
    ("alpha", 1.0),
    ("p", 1.0),
    ("q", 1.0),
];

impl SolutionKind {
    pub fn name(self) -> &'static str {
        match self {
            SolutionKind::Soliton1 => "soliton1",
            SolutionKind::Soliton2 => "soliton2",
            SolutionKind::Positon => "positon",
            SolutionKind::Breather => "breather",
            SolutionKind::Rogue1 => "rogue1",
            SolutionKind::Rogue2 => "rogue2",
            SolutionKind::Rogue3 => "rogue3",
            SolutionKind::EngineNfold => "engine-nfold",
            SolutionKind::EngineDegenerate => "engine-degenerate",
        }
    }

    /// Accepted parameter names with their defaults.
    pub fn schema(self) -> Vec<(&'static str, f64)> {
        let phases = [("S0", 0.0), ("S1", 0.0), ("S2", 0.0), ("eps", 1e-2)];
        match self {
            SolutionKind::Soliton1 => vec![
                ("m1", 1.0),
                ("n1", 2.0),
                ("alpha", 1.0),
                ("p", 1.0),
                ("q", 1.0),
            ],
            SolutionKind::Soliton2 => vec![
                ("m1", 0.7),
                ("n1", 0.3),
                ("m2", 0.5),
                ("n2", 0.5),
                ("alpha", 1.0),
            ],
            SolutionKind::Positon => vec![("re1", 0.8), ("im1", 0.8)],
            SolutionKind::Breather | SolutionKind::Rogue1 => vec![],
            SolutionKind::Rogue2 | SolutionKind::Rogue3 => phases.to_vec(),
            SolutionKind::EngineNfold => {
                let mut v = vec![
                    ("a", 0.0),
                    ("c", 0.0),
                    ("alpha", 1.0),
                    ("p", 1.0),
                    ("q", 1.0),
                    ("n", 1.0),
                ];
                v.extend([
                    ("re1", 1.0),
                    ("im1", 2.0),
                    ("re2", 0.5),
                    ("im2", 0.5),
                    ("re3", 0.3),
                    ("im3", 0.9),
                ]);
                v
            }
            SolutionKind::EngineDegenerate => {
                let mut v = PW_SEED.to_vec();
                v.extend([("re", 1.0), ("im", 1.0), ("n", 2.0)]);
                v.extend(phases);
                v
            }
        }
    }

    pub fn default_grid(self) -> &'static str {
        match self {
            SolutionKind::Soliton1 => "-3:3:301,-2:2:201",
            SolutionKind::Soliton2
            | SolutionKind::Positon
            | SolutionKind::Breather
            | SolutionKind::EngineNfold => "-10:10:201,-10:10:201",
            SolutionKind::Rogue1 | SolutionKind::Rogue2 => "-4:4:401,-4:4:401",
            SolutionKind::Rogue3 | SolutionKind::EngineDegenerate => "-4:4:161,-4:4:161",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Pgm,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Pgm => "pgm",
        }
    }
}

/// One reproducible view of a reference figure.
#[derive(Debug, Clone, Copy)]
pub struct FigureSpec {
    pub number: u8,
    pub solution: SolutionKind,
    pub params: &'static [(&'static str, f64)],
    pub grid: &'static str,
    pub description: &'static str,
}

pub const FIGURES: [FigureSpec; 10] = [
    FigureSpec {
        number: 1,
        solution: SolutionKind::Soliton1,
        params: &[],
        grid: "-3:3:301,-2:2:201",
        description: "bright soliton, single straight ridge",
    },
    FigureSpec {
        number: 2,
        solution: SolutionKind::Soliton2,
        params: &[],
        grid: "-10:10:201,-10:10:201",
        description: "two-soliton collision, two crossing ridges",
    },
    FigureSpec {
        number: 3,
        solution: SolutionKind::Positon,
        params: &[],
        grid: "-10:10:201,-10:10:201",
        description: "positon, two slowly separating branches",
    },
    FigureSpec {
        number: 4,
        solution: SolutionKind::Breather,
        params: &[],
        grid: "-10:10:201,-10:10:201",
        description: "breather on a plane wave, periodic in x",
    },
    FigureSpec {
        number: 5,
        solution: SolutionKind::Rogue1,
        params: &[],
        grid: "-4:4:401,-4:4:401",
        description: "first-order rogue wave, peak 9 at the origin",
    },
    FigureSpec {
        number: 6,
        solution: SolutionKind::Rogue2,
        params: &[],
        grid: "-4:4:401,-4:4:401",
        description: "second-order rogue wave, fundamental",
    },
    FigureSpec {
        number: 7,
        solution: SolutionKind::Rogue2,
        params: &[("S1", 500.0)],
        grid: "-25:8:331,-14:14:281",
        description: "second-order rogue wave split into three humps",
    },
    FigureSpec {
        number: 8,
        solution: SolutionKind::Rogue3,
        params: &[],
        grid: "-4:4:161,-4:4:161",
        description: "third-order rogue wave, fundamental",
    },
    FigureSpec {
        number: 9,
        solution: SolutionKind::Rogue3,
        params: &[("S1", 500.0)],
        grid: "-30:30:601,-30:30:601",
        description: "third-order rogue wave, triangular splitting",
    },
    FigureSpec {
        number: 10,
        solution: SolutionKind::Rogue3,
        params: &[("S2", 1000.0)],
        grid: "-16:16:321,-16:16:321",
        description: "third-order rogue wave, pentagon ring",
    },
];

pub fn figure(number: u8) -> Option<&'static FigureSpec> {
    FIGURES.iter().find(|f| f.number == number)
}

impl FigureSpec {
    /// The one-line invocation reproducing this figure.
    pub fn command_line(&self) -> String {
        let mut s = format!(
            "kdnls generate --solution {} --grid={}",
            self.solution.name(),
            self.grid
        );
        for (k, v) in self.params {
            let _ = write!(s, " --param {k}={v}");
        }
        s
    }
}

/// Parses `x0:x1:nx,t0:t1:nt`.
pub fn parse_grid(spec: &str) -> Result<Grid2D, CliError> {
    let axes: Vec<&str> = spec.split(',').collect();
    if axes.len() != 2 {
        return Err(invalid(format!(
            "grid '{spec}' must have two comma-separated axes"
        )));
    }
    let axis = |a: &str| -> Result<(f64, f64, usize), CliError> {
        let parts: Vec<&str> = a.split(':').collect();
        if parts.len() != 3 {
            return Err(invalid(format!("grid axis '{a}' must be min:max:count")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("bad number '{p}' in grid")))
        };
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| invalid(format!("bad count '{}' in grid", parts[2])))?;
        Ok((num(parts[0])?, num(parts[1])?, count))
    };
    let (x0, x1, nx) = axis(axes[0])?;
    let (t0, t1, nt) = axis(axes[1])?;
    Grid2D::new(x0, x1, t0, t1, nx, nt).map_err(|e| invalid(e.to_string()))
}

pub fn format_grid(g: &Grid2D) -> String {
    format!(
        "{}:{}:{},{}:{}:{}",
        g.x_min, g.x_max, g.nx, g.t_min, g.t_max, g.nt
    )
}

#[derive(Debug, Parser)]
#[command(
    name = "kdnls",
    version,
    about = "Darboux-transformation solutions of the Kundu-DNLS equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a solution on a grid and write it to disk.
    Generate(JobArgs),
    /// Locate and classify intensity peaks; writes a PeakSet as JSON.
    Analyze(JobArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct JobArgs {
    #[arg(long, value_enum)]
    pub solution: Option<SolutionKind>,
    /// Reference figure 1-10; fills solution, grid and parameters.
    #[arg(long)]
    pub figure: Option<u8>,
    /// `x0:x1:nx,t0:t1:nt`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// `KEY=VALUE`, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    pub params: Vec<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output path; `-` writes to stdout without a sidecar.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// JSON job file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `double` or `extended`; engine solutions only.
    #[arg(long)]
    pub precision: Option<Precision>,
    /// `canonical` or e.g. `sign=+1,v12=g_independent`.
    #[arg(long)]
    pub variant: Option<ConventionVariant>,
    /// `corrected` or `as-printed`; closed-form solutions only.
    #[arg(long)]
    pub transcription: Option<Transcription>,
    /// Also write Re Q and Im Q into JSON output.
    #[arg(long)]
    pub components: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "full")]
    pub suite: Suite,
    /// Write the JSON report here.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub solution: Option<SolutionKind>,
    pub figure: Option<u8>,
    pub grid: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub precision: Option<Precision>,
    pub variant: Option<String>,
    pub transcription: Option<Transcription>,
    pub components: Option<bool>,
}

/// A fully resolved job.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobConfig {
    pub solution: SolutionKind,
    /// Every schema key with its effective value.
    pub params: BTreeMap<String, f64>,
    pub grid: Grid2D,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// `None` lets degenerate limits choose by ε.
    pub precision: Option<Precision>,
    pub variant: ConventionVariant,
    pub transcription: Transcription,
    pub components: bool,
}

fn parse_param(kv: &str) -> Result<(String, f64), CliError> {
    let (k, v) = kv
        .split_once('=')
        .ok_or_else(|| invalid(format!("parameter '{kv}' must be KEY=VALUE")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| invalid(format!("parameter '{k}' has non-numeric value '{v}'")))?;
    Ok((k.trim().to_string(), v))
}

impl JobConfig {
    /// Resolves a job from flags, reading `--config` from disk and the
    /// precision override from the environment.
    pub fn resolve(args: &JobArgs) -> Result<JobConfig, CliError> {
        let file = match &args.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", p.display())))?
            }
            None => ConfigFile::default(),
        };
        let env = std::env::var(PRECISION_ENV).ok();
        Self::resolve_with(args, file, env.as_deref())
    }

    pub fn resolve_with(
        args: &JobArgs,
        file: ConfigFile,
        env_precision: Option<&str>,
    ) -> Result<JobConfig, CliError> {
        let fig_no = args.figure.or(file.figure);
        let fig = match fig_no {
            Some(n) => Some(
                figure(n)
                    .ok_or_else(|| invalid(format!("no reference figure {n} (expected 1-10)")))?,
            ),
            None => None,
        };
        let solution = args
            .solution
            .or(file.solution)
            .or(fig.map(|f| f.solution))
            .ok_or_else(|| invalid("no solution given (use --solution or --figure)"))?;
        if let Some(f) = fig {
            if f.solution != solution {
                return Err(invalid(format!(
                    "figure {} uses solution {}, not {}",
                    f.number,
                    f.solution.name(),
                    solution.name()
                )));
            }
        }

        let schema = solution.schema();
        let mut params: BTreeMap<String, f64> =
            schema.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let fig_params = fig.map(|f| f.params).unwrap_or(&[]);
        let overrides = fig_params
            .iter()
            .map(|(k, v)| Ok((k.to_string(), *v)))
            .chain(file.params.iter().map(|(k, v)| Ok((k.clone(), *v))))
            .chain(args.params.iter().map(|kv| parse_param(kv)));
        for kv in overrides {
            let (k, v) = kv?;
            if !params.contains_key(&k) {
                let known: Vec<&str> = schema.iter().map(|p| p.0).collect();
                return Err(invalid(format!(
                    "unknown parameter '{k}' for {} (accepted: {})",
                    solution.name(),
                    if known.is_empty() {
                        "none".to_string()
                    } else {
                        known.join(", ")
                    }
                )));
            }
            if !v.is_finite() {
                return Err(invalid(format!("parameter '{k}' must be finite")));
            }
            params.insert(k, v);
        }

        let grid_spec = args
            .grid
            .clone()
            .or(file.grid)
            .or(fig.map(|f| f.grid.to_string()))
            .unwrap_or_else(|| solution.default_grid().to_string());
        let grid = parse_grid(&grid_spec)?;

        let mut precision = args.precision.or(file.precision);
        if let Some(e) = env_precision.filter(|e| !e.is_empty()) {
            precision = Some(
                e.parse()
                    .map_err(|m: String| invalid(format!("{PRECISION_ENV}: {m}")))?,
            );
        }
        let variant = match (&args.variant, &file.variant) {
            (Some(v), _) => *v,
            (None, Some(s)) => s.parse().map_err(|m: String| invalid(m))?,
            (None, None) => ConventionVariant::CANONICAL,
        };
        Ok(JobConfig {
            solution,
            params,
            grid,
            format: args.format.or(file.format).unwrap_or_default(),
            output: args.output.clone().or(file.output),
            precision,
            variant,
            transcription: args
                .transcription
                .or(file.transcription)
                .unwrap_or_default(),
            components: args.components || file.components.unwrap_or(false),
        })
    }

    fn p(&self, key: &str) -> f64 {
        self.params[key]
    }

    fn order(&self, max: usize) -> Result<usize, CliError> {
        let n = self.p("n");
        if n.fract() != 0.0 || n < 1.0 || n > max as f64 {
            return Err(invalid(format!(
                "order n={n} must be an integer in 1..={max}"
            )));
        }
        Ok(n as usize)
    }

    fn phases(&self) -> PhasePolynomial {
        PhasePolynomial::new(self.p("S0"), self.p("S1"), self.p("S2"))
    }

    fn dt_config(&self) -> DtConfig {
        DtConfig {
            precision: self.precision,
            condition_bound: None,
        }
    }
}

/// Where a sampled field came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Catalog,
    Engine,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub field: ComplexField2D,
    pub source: Source,
    /// Arithmetic actually used by the engine.
    pub precision: Option<Precision>,
}

enum Built {
    Catalog(CatalogEntry),
    Engine(DTOutput),
}

fn rogue_seed() -> Seed {
    make_plane_wave_seed(-2.0, 1.0, 1.0, 1.0, 1.0).expect("fixed plane-wave seed is valid")
}

fn build(cfg: &JobConfig) -> Result<Built, CliError> {
    let tr = cfg.transcription;
    let cat = |r: Result<CatalogEntry, catalog::CatalogError>| {
        r.map(Built::Catalog).map_err(|e| invalid(e.to_string()))
    };
    let degenerate = |lc: Complex64, n: usize, seed: &Seed| {
        let spec = DegenerationSpec::new(lc, cfg.p("eps"), n, cfg.phases());
        degenerate_limit_with(&spec, seed, cfg.dt_config())
            .map(Built::Engine)
            .map_err(|e| invalid(e.to_string()))
    };
    match cfg.solution {
        SolutionKind::Soliton1 => cat(catalog::one_soliton(
            cfg.p("m1"),
            cfg.p("n1"),
            cfg.p("alpha"),
            cfg.p("p"),
            cfg.p("q"),
            tr,
        )),
        SolutionKind::Soliton2 => cat(catalog::two_soliton(
            cfg.p("m1"),
            cfg.p("n1"),
            cfg.p("m2"),
            cfg.p("n2"),
            cfg.p("alpha"),
            tr,
        )),
        SolutionKind::Positon => cat(catalog::positon(cfg.p("re1"), cfg.p("im1"), tr)),
        SolutionKind::Breather => Ok(Built::Catalog(catalog::breather(tr))),
        SolutionKind::Rogue1 => Ok(Built::Catalog(catalog::rogue1(tr))),
        SolutionKind::Rogue2 if cfg.phases() == PhasePolynomial::default() => {
            Ok(Built::Catalog(catalog::rogue2(tr)))
        }
        SolutionKind::Rogue2 => degenerate(Complex64::new(1.0, 1.0), 2, &rogue_seed()),
        SolutionKind::Rogue3 => degenerate(Complex64::new(1.0, 1.0), 3, &rogue_seed()),
        SolutionKind::EngineNfold => {
            let seed = seed_from(cfg)?;
            let n = cfg.order(3)?;
            let lambdas: Vec<Complex64> = (1..=n)
                .map(|k| Complex64::new(cfg.p(&format!("re{k}")), cfg.p(&format!("im{k}"))))
                .collect();
            let one = Complex64::new(1.0, 0.0);
            let set = build_reduced_set(&lambdas, &seed, &vec![(one, one); n])
                .map_err(|e| invalid(e.to_string()))?;
            n_fold_with(&set, &seed, cfg.dt_config())
                .map(Built::Engine)
                .map_err(|e| invalid(e.to_string()))
        }
        SolutionKind::EngineDegenerate => {
            let seed = seed_from(cfg)?;
            degenerate(
                Complex64::new(cfg.p("re"), cfg.p("im")),
                cfg.order(3)?,
                &seed,
            )
        }
    }
}

/// Zero seed when `c = 0`, plane wave otherwise.
fn seed_from(cfg: &JobConfig) -> Result<Seed, CliError> {
    let (alpha, p, q) = (cfg.p("alpha"), cfg.p("p"), cfg.p("q"));
    let r = if cfg.p("c") == 0.0 {
        Seed::zero(alpha, p, q)
    } else {
        make_plane_wave_seed(cfg.p("a"), cfg.p("c"), alpha, p, q)
    };
    r.map_err(|e| invalid(e.to_string()))
}

pub fn generate_field(cfg: &JobConfig) -> Result<Generated, CliError> {
    Ok(match build(cfg)? {
        Built::Catalog(e) => Generated {
            field: e.sample(&cfg.grid),
            source: Source::Catalog,
            precision: None,
        },
        Built::Engine(o) => Generated {
            field: o.sample(&cfg.grid),
            source: Source::Engine,
            precision: Some(o.precision()),
        },
    })
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "nan".to_string()
    }
}

fn json_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

fn json_rows(g: &Grid2D, f: impl Fn(usize) -> f64) -> String {
    let mut s = String::from("[");
    for j in 0..g.nt {
        if j > 0 {
            s.push(',');
        }
        s.push('[');
        for i in 0..g.nx {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&json_num(f(g.index(i, j))));
        }
        s.push(']');
    }
    s.push(']');
    s
}

fn json_object(map: &BTreeMap<String, f64>) -> String {
    let body: Vec<String> = map
        .iter()
        .map(|(k, v)| format!("{}:{}", serde_json::Value::String(k.clone()), json_num(*v)))
        .collect();
    format!("{{{}}}", body.join(","))
}

/// Serializes a field in the configured format. Output depends only on the
/// config and the samples.
pub fn render(cfg: &JobConfig, field: &ComplexField2D) -> Vec<u8> {
    let g = &field.grid;
    let value = |k: usize| {
        if field.flagged[k] {
            Complex64::new(f64::NAN, f64::NAN)
        } else {
            field.values[k]
        }
    };
    match cfg.format {
        Format::Csv => {
            let mut s = String::with_capacity(g.len() * 120 + 32);
            s.push_str("x,t,intensity,re,im\n");
            for j in 0..g.nt {
                for i in 0..g.nx {
                    let z = value(g.index(i, j));
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{}",
                        num(g.x(i)),
                        num(g.t(j)),
                        num(z.norm_sqr()),
                        num(z.re),
                        num(z.im)
                    );
                }
            }
            s.into_bytes()
        }
        Format::Json => {
            let grid = format!(
                "{{\"x_min\":{},\"x_max\":{},\"nx\":{},\"t_min\":{},\"t_max\":{},\"nt\":{}}}",
                json_num(g.x_min),
                json_num(g.x_max),
                g.nx,
                json_num(g.t_min),
                json_num(g.t_max),
                g.nt
            );
            let mut s = format!(
                "{{\"solution\":\"{}\",\"params\":{},\"grid\":{},\"data\":{}",
                cfg.solution.name(),
                json_object(&cfg.params),
                grid,
                json_rows(g, |k| value(k).norm_sqr())
            );
            if cfg.components {
                let _ = write!(
                    s,
                    ",\"re\":{},\"im\":{}",
                    json_rows(g, |k| value(k).re),
                    json_rows(g, |k| value(k).im)
                );
            }
            s.push_str("}\n");
            s.into_bytes()
        }
        Format::Pgm => {
            let inten: Vec<f64> = (0..g.len()).map(|k| value(k).norm_sqr()).collect();
            let max = inten
                .iter()
                .copied()
                .filter(|v| v.is_finite())
                .fold(0.0f64, f64::max);
            let mut out = format!("P5\n{} {}\n255\n", g.nx, g.nt).into_bytes();
            // Top image row is t_max.
            for j in (0..g.nt).rev() {
                for i in 0..g.nx {
                    let v = inten[g.index(i, j)];
                    let b = if v.is_finite() && max > 0.0 {
                        (v / max * 255.0).round().clamp(0.0, 255.0) as u8
                    } else {
                        0
                    };
                    out.push(b);
                }
            }
            out
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub solution: SolutionKind,
    pub source: Source,
    pub params: BTreeMap<String, f64>,
    pub grid: Grid2D,
    pub format: Format,
    pub precision: String,
    pub variant: String,
    pub transcription: Transcription,
    pub flagged_nodes: usize,
}

pub fn metadata(cfg: &JobConfig, generated: &Generated) -> Metadata {
    Metadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        solution: cfg.solution,
        source: generated.source,
        params: cfg.params.clone(),
        grid: cfg.grid,
        format: cfg.format,
        precision: match (generated.precision, cfg.precision) {
            (Some(p), _) => p.to_string(),
            (None, Some(p)) => format!("{p} (unused by closed forms)"),
            (None, None) => "double".to_string(),
        },
        variant: cfg.variant.to_string(),
        transcription: cfg.transcription,
        flagged_nodes: generated.field.flagged_count(),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) if p != Path::new("-") => write_file(p, bytes),
        _ => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s: OsString = output.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn run_generate(cfg: &JobConfig) -> Result<(), CliError> {
    let output = cfg.output.clone().unwrap_or_else(|| {
        PathBuf::from(format!(
            "{}.{}",
            cfg.solution.name(),
            cfg.format.extension()
        ))
    });
    let generated = generate_field(cfg)?;
    let bytes = render(cfg, &generated.field);
    write_out(Some(&output), &bytes)?;
    if output != Path::new("-") {
        let meta =
            serde_json::to_string_pretty(&metadata(cfg, &generated)).expect("metadata serializes");
        write_file(&sidecar_path(&output), format!("{meta}\n").as_bytes())?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub solution: SolutionKind,
    pub params: BTreeMap<String, f64>,
    pub grid: Grid2D,
    pub peak_count: usize,
    pub peak_set: PeakSet,
}

pub fn analyze(cfg: &JobConfig) -> Result<Analysis, CliError> {
    let generated = generate_field(cfg)?;
    let peak_set = peak_analysis(&generated.field.intensity(), 0.1).map_err(|e| match e {
        VerifyError::ResolutionTooCoarse { .. } => invalid(e.to_string()),
        other => invalid(other.to_string()),
    })?;
    Ok(Analysis {
        solution: cfg.solution,
        params: cfg.params.clone(),
        grid: cfg.grid,
        peak_count: peak_set.peaks.len(),
        peak_set,
    })
}

pub fn run_analyze(cfg: &JobConfig) -> Result<(), CliError> {
    let a = analyze(cfg)?;
    let text = serde_json::to_string_pretty(&a).expect("analysis serializes");
    write_out(cfg.output.as_deref(), format!("{text}\n").as_bytes())
}

pub fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let report = acceptance::run_suite(args.suite);
    for o in &report.outcomes {
        println!("{}", o.line());
    }
    if let Some(p) = &args.output {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(p, format!("{text}\n").as_bytes())?;
    }
    let failed: Vec<String> = report
        .outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id.to_string())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!(
            "criteria {} failed",
            failed.join(", ")
        )))
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(a) => run_generate(&JobConfig::resolve(a)?),
        Command::Analyze(a) => run_analyze(&JobConfig::resolve(a)?),
        Command::Verify(a) => run_verify(a),
    }
}

/// Parses arguments, runs the job and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("kdnls: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(solution: SolutionKind) -> JobArgs {
        JobArgs {
            solution: Some(solution),
            ..Default::default()
        }
    }

    #[test]
    fn grid_syntax() {
        let g = parse_grid("-4:4:401,-2:2:201").unwrap();
        assert_eq!(
            (g.x_min, g.x_max, g.nx, g.t_min, g.t_max, g.nt),
            (-4.0, 4.0, 401, -2.0, 2.0, 201)
        );
        assert_eq!(format_grid(&g), "-4:4:401,-2:2:201");
        for bad in [
            "-4:4:401",
            "-4:4,-2:2:201",
            "a:4:3,0:1:3",
            "0:1:x,0:1:3",
            "1:0:5,0:1:5",
        ] {
            assert!(
                matches!(parse_grid(bad), Err(CliError::InvalidConfig(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn unknown_param_rejected() {
        let mut a = args(SolutionKind::Rogue1);
        a.params = vec!["S1=3".into()];
        let e = JobConfig::resolve_with(&a, ConfigFile::default(), None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn flags_override_file_and_env_overrides_both() {
        let file = ConfigFile {
            solution: Some(SolutionKind::Rogue3),
            params: [("S2".to_string(), 10.0), ("eps".to_string(), 0.05)]
                .into_iter()
                .collect(),
            precision: Some(Precision::Double),
            ..Default::default()
        };
        let a = JobArgs {
            params: vec!["S2=1000".into()],
            precision: Some(Precision::Double),
            ..Default::default()
        };
        let c = JobConfig::resolve_with(&a, file.clone(), None).unwrap();
        assert_eq!(c.solution, SolutionKind::Rogue3);
        assert_eq!(c.params["S2"], 1000.0);
        assert_eq!(c.params["eps"], 0.05);
        assert_eq!(c.precision, Some(Precision::Double));
        let c = JobConfig::resolve_with(&a, file.clone(), Some("extended")).unwrap();
        assert_eq!(c.precision, Some(Precision::Extended));
        assert!(JobConfig::resolve_with(&a, file, Some("quad")).is_err());
    }

    #[test]
    fn figure_fills_job() {
        let a = JobArgs {
            figure: Some(7),
            ..Default::default()
        };
        let c = JobConfig::resolve_with(&a, ConfigFile::default(), None).unwrap();
        assert_eq!(c.solution, SolutionKind::Rogue2);
        assert_eq!(c.params["S1"], 500.0);
        assert_eq!(format_grid(&c.grid), "-25:8:331,-14:14:281");
        let mut bad = a.clone();
        bad.solution = Some(SolutionKind::Rogue1);
        assert!(JobConfig::resolve_with(&bad, ConfigFile::default(), None).is_err());
        bad.figure = Some(11);
        assert!(JobConfig::resolve_with(&bad, ConfigFile::default(), None).is_err());
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let r: Result<ConfigFile, _> =
            serde_json::from_str(r#"{"solution":"rogue1","colour":"red"}"#);
        assert!(r.is_err());
        let c: ConfigFile =
            serde_json::from_str(r#"{"solution":"engine-degenerate","params":{"n":3}}"#).unwrap();
        assert_eq!(c.solution, Some(SolutionKind::EngineDegenerate));
    }

    #[test]
    fn csv_format_contract() {
        let a = JobArgs {
            solution: Some(SolutionKind::Rogue1),
            grid: Some("-1:1:3,0:1:2".into()),
            ..Default::default()
        };
        let c = JobConfig::resolve_with(&a, ConfigFile::default(), None).unwrap();
        let g = generate_field(&c).unwrap();
        let text = String::from_utf8(render(&c, &g.field)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,t,intensity,re,im");
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("-1.0000000000000000e0,0.0000000000000000e0,"));
        assert!(lines[2].starts_with("0.0000000000000000e0,0.0000000000000000e0,9.0000000000000"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn pgm_header_and_size() {
        let a = JobArgs {
            solution: Some(SolutionKind::Rogue1),
            grid: Some("-1:1:5,-1:1:4".into()),
            format: Some(Format::Pgm),
            ..Default::default()
        };
        let c = JobConfig::resolve_with(&a, ConfigFile::default(), None).unwrap();
        let bytes = render(&c, &generate_field(&c).unwrap().field);
        let header = b"P5\n5 4\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(bytes.len(), header.len() + 20);
        assert_eq!(*bytes[header.len()..].iter().max().unwrap(), 255);
    }

    #[test]
    fn every_figure_resolves() {
        for f in &FIGURES {
            let a = JobArgs {
                figure: Some(f.number),
                ..Default::default()
            };
            let c = JobConfig::resolve_with(&a, ConfigFile::default(), None).unwrap();
            assert_eq!(format_grid(&c.grid), f.grid);
            assert!(f.command_line().starts_with("kdnls generate --solution"));
        }
    }
}
