//! Command-line flags, the JSON config file that mirrors them, and validation
//! into a [`JobConfig`].

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, ValueEnum};
use ptcorr::potential::TabulatedPotential;
use ptcorr::spectrum::SearchBox;
use ptcorr::{Execution, Grid, PotentialSpec};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Scatter,
    Identities,
    Spectrum,
    PhaseDiagram,
    Correlation,
    Scarf2Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Scatter => "scatter",
            Command::Identities => "identities",
            Command::Spectrum => "spectrum",
            Command::PhaseDiagram => "phase-diagram",
            Command::Correlation => "correlation",
            Command::Scarf2Validate => "scarf2-validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Scattering, bound states and non-local PT correlation for complex 1-D potentials.
#[derive(Debug, Parser)]
#[command(name = "ptcorr", version)]
pub struct Cli {
    /// Job to run.
    #[arg(value_enum)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

/// Every job flag. Each one may also come from `--config`; flags win.
#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Scarf-II well parameter `a`.
    #[arg(long = "A", allow_negative_numbers = true)]
    #[serde(rename = "A")]
    pub a_pot: Option<f64>,
    /// Scarf-II gain/loss parameter `b`.
    #[arg(long = "B", allow_negative_numbers = true)]
    #[serde(rename = "B")]
    pub b_pot: Option<f64>,
    /// Scarf-II inverse width.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Tabulated potential, CSV with header `x,re_v,im_v`.
    #[arg(long)]
    pub custom: Option<PathBuf>,
    /// Momenta, comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<f64>>,
    /// Momentum range `lo:hi:n`, inclusive.
    #[arg(long = "k-range")]
    #[serde(rename = "k-range")]
    pub k_range: Option<String>,
    /// Half-width of the integration box.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub half_width: Option<f64>,
    /// Integration step.
    #[arg(long)]
    pub h: Option<f64>,
    /// Grid size (odd), instead of `--h`.
    #[arg(long = "n-points")]
    #[serde(rename = "n-points")]
    pub n_points: Option<usize>,
    /// Root-finding tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Lower edge of the search box in Re E
    #[arg(long, allow_negative_numbers = true)]
    pub emin: Option<f64>,
    /// Upper edge of the search box in Re E
    #[arg(long, allow_negative_numbers = true)]
    pub emax: Option<f64>,
    /// Half-height of the search box in Im E.
    #[arg(long)]
    pub eimax: Option<f64>,
    /// Seeds per axis of the eigenvalue search lattice.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Range of `b` values `lo:hi:n`, inclusive.
    #[arg(long = "B-range", allow_hyphen_values = true)]
    #[serde(rename = "B-range")]
    pub b_range: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format, JSON by default
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Run sweeps on one thread.
    #[arg(long)]
    #[serde(default)]
    pub sequential: bool,
    /// JSON file with any of the flags above, keyed by flag name.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! take_flags {
    ($cli:expr, $file:expr, $($field:ident),*) => {
        Flags {
            $($field: $cli.$field.or($file.$field),)*
            sequential: $cli.sequential || $file.sequential,
            config: None,
        }
    };
}

impl Flags {
    pub fn merged_with_file(self) -> Result<Flags, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Validation(format!("config file {}: {e}", path.display())))?;
        let file: Flags = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config file {}: {e}", path.display())))?;
        Ok(take_flags!(
            self, file, a_pot, b_pot, alpha, custom, k, k_range, half_width, h, n_points, tol,
            emin, emax, eimax, seeds, b_range, out, format
        ))
    }
}

/// Potential together with the parameters echoed in reports.
#[derive(Debug, Clone)]
pub struct PotentialChoice {
    pub spec: PotentialSpec,
    pub custom_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxOverrides {
    pub emin: Option<f64>,
    pub emax: Option<f64>,
    pub eimax: Option<f64>,
}

impl BoxOverrides {
    pub fn apply(&self, default: SearchBox) -> Result<SearchBox, CliError> {
        let (im_min, im_max) = match self.eimax {
            Some(e) => (-e, e),
            None => (default.im_min, default.im_max),
        };
        SearchBox::new(
            self.emin.unwrap_or(default.re_min),
            self.emax.unwrap_or(default.re_max),
            im_min,
            im_max,
        )
        .map_err(|e| CliError::Validation(e.to_string()))
    }
}

/// Validated job.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub command: Command,
    pub potential: PotentialChoice,
    pub grid: Grid,
    pub tol: f64,
    pub ks: Vec<f64>,
    /// Whether momenta were requested rather than defaulted.
    pub ks_explicit: bool,
    pub b_values: Vec<f64>,
    pub search: BoxOverrides,
    pub seeds: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub exec: Execution,
}

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SEEDS: usize = 6;
pub const DEFAULT_KS: [f64; 3] = [0.5, 1.0, 2.0];

fn invalid(msg: impl fmt::Display) -> CliError {
    CliError::Validation(msg.to_string())
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>, CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(invalid(format!(
            "--{name} must be positive and finite, got {x}"
        ))),
        other => Ok(other),
    }
}

fn finite(name: &str, v: Option<f64>) -> Result<Option<f64>, CliError> {
    match v {
        Some(x) if !x.is_finite() => Err(invalid(format!("--{name} must be finite, got {x}"))),
        other => Ok(other),
    }
}

/// Parses `lo:hi:n` into `n` evenly spaced values including both ends.
pub fn parse_range(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = |why: &str| invalid(format!("--{flag} {text:?}: {why} (expected lo:hi:n)"));
    if parts.len() != 3 {
        return Err(bad("need three fields"));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| bad("lo is not a number"))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| bad("hi is not a number"))?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| bad("n is not a non-negative integer"))?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(bad("bounds must be finite"));
    }
    if n == 0 {
        return Err(bad("range is empty"));
    }
    if n == 1 {
        if lo != hi {
            return Err(bad("n = 1 needs lo == hi"));
        }
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

fn load_potential(flags: &Flags) -> Result<PotentialChoice, CliError> {
    match (&flags.custom, flags.a_pot) {
        (Some(_), Some(_)) => Err(invalid("give either --custom or --A/--B/--alpha, not both")),
        (Some(path), None) => {
            if flags.b_pot.is_some() || flags.alpha.is_some() {
                return Err(invalid(
                    "--B and --alpha apply only to the Scarf-II potential",
                ));
            }
            let table = TabulatedPotential::from_csv_path(path)
                .map_err(|e| invalid(format!("--custom {}: {e}", path.display())))?;
            Ok(PotentialChoice {
                spec: table.into(),
                custom_path: Some(path.clone()),
            })
        }
        (None, Some(a)) => {
            let spec =
                PotentialSpec::scarf2(a, flags.b_pot.unwrap_or(0.0), flags.alpha.unwrap_or(1.0))
                    .map_err(|e| invalid(e.to_string()))?;
            Ok(PotentialChoice {
                spec,
                custom_path: None,
            })
        }
        (None, None) => Err(invalid(
            "no potential: give --A (with --B, --alpha) or --custom",
        )),
    }
}

fn build_grid(flags: &Flags, spec: &PotentialSpec) -> Result<Grid, CliError> {
    let half_width = positive("L", flags.half_width)?;
    let step = positive("h", flags.h)?;
    if let Some(l) = half_width {
        if let PotentialSpec::CustomTabulated(t) = spec {
            if l > t.half_width() {
                return Err(invalid(format!(
                    "--L {l} exceeds the tabulated range [-{w}, {w}]",
                    w = t.half_width()
                )));
            }
        }
    }
    let default = Grid::for_potential(spec);
    let l = half_width.unwrap_or(default.half_width());
    let grid = match (flags.n_points, step) {
        (Some(_), Some(_)) => return Err(invalid("give either --h or --n-points, not both")),
        (Some(n), None) => Grid::new(l, n),
        (None, Some(h)) => Grid::with_step(l, h),
        (None, None) => Grid::with_step(l, default.step()),
    }
    .map_err(|e| invalid(e.to_string()))?;
    grid.check_flatness(spec)
        .map_err(|e| invalid(format!("{e}; increase --L")))?;
    Ok(grid)
}

impl JobConfig {
    pub fn from_flags(command: Command, flags: Flags) -> Result<Self, CliError> {
        let potential = load_potential(&flags)?;
        let grid = build_grid(&flags, &potential.spec)?;
        let tol = positive("tol", flags.tol)?.unwrap_or(DEFAULT_TOL);

        let ks = match (&flags.k, &flags.k_range) {
            (Some(_), Some(_)) => return Err(invalid("give either --k or --k-range, not both")),
            (Some(ks), None) => ks.clone(),
            (None, Some(r)) => parse_range("k-range", r)?,
            (None, None) => DEFAULT_KS.to_vec(),
        };
        if ks.is_empty() {
            return Err(invalid("--k list is empty"));
        }
        if let Some(k) = ks.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
            return Err(invalid(format!(
                "momenta must be positive and finite, got {k}"
            )));
        }

        let b_values = match &flags.b_range {
            Some(r) => parse_range("B-range", r)?,
            None => Vec::new(),
        };
        let scarf_only = matches!(command, Command::PhaseDiagram | Command::Scarf2Validate);
        if scarf_only && potential.spec.as_scarf2().is_none() {
            return Err(invalid(format!(
                "{} needs a Scarf-II potential (--A/--B/--alpha)",
                command.name()
            )));
        }
        if command == Command::PhaseDiagram && b_values.is_empty() {
            return Err(invalid("phase-diagram needs --B-range lo:hi:n"));
        }

        let search = BoxOverrides {
            emin: finite("emin", flags.emin)?,
            emax: finite("emax", flags.emax)?,
            eimax: match flags.eimax {
                Some(e) if !(e >= 0.0 && e.is_finite()) => {
                    return Err(invalid(format!(
                        "--eimax must be non-negative and finite, got {e}"
                    )))
                }
                other => other,
            },
        };
        if let (Some(lo), Some(hi)) = (search.emin, search.emax) {
            if lo >= hi {
                return Err(invalid(format!("--emin {lo} must be below --emax {hi}")));
            }
        }
        let seeds = match flags.seeds {
            Some(0) => return Err(invalid("--seeds must be at least 1")),
            Some(n) => n,
            None => DEFAULT_SEEDS,
        };
        let format = flags.format.unwrap_or_default();
        if format == Format::Csv && command == Command::Scarf2Validate {
            return Err(invalid("scarf2-validate writes JSON only"));
        }

        Ok(Self {
            command,
            potential,
            grid,
            tol,
            ks_explicit: flags.k.is_some() || flags.k_range.is_some(),
            ks,
            b_values,
            search,
            seeds,
            out: flags.out,
            format,
            exec: if flags.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
        })
    }

    pub fn out_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }
}
