//! Command-line arguments and the resolved run configuration.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use npspec_core::np_operator::GalerkinConfig;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::parallel::resolve_threads;
use crate::shape_file::{load_shape, ShapeFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Variation,
    FdCheck,
    Zeta,
    Halfsum,
}

#[derive(Debug, Parser)]
#[command(name = "npspec", version, about = "Neumann-Poincare spectra of perturbed spheres")]
pub struct Args {
    #[command(subcommand)]
    pub command: SubArgs,
    /// Galerkin truncation degree L.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Outer quadrature grid as NTHETAxNPHI; the inner rule is scaled by 3/2.
    /// For `variation` it replaces the exact default grid.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for assembly (falls back to NPSPEC_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Pass/fail tolerance of the command.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum SubArgs {
    /// Eigenvalues grouped into multiplets.
    Spectrum {
        #[arg(long)]
        analytic: bool,
        #[arg(long)]
        shape: Option<PathBuf>,
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// First-variation matrix M_k of a field a (the file's h is ignored).
    Variation {
        #[arg(long)]
        shape: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Compare M_k eigenvalues with finite-difference branch slopes.
    FdCheck {
        #[arg(long)]
        shape: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true,
              default_value = "0.04,0.02")]
        h: Vec<f64>,
    },
    /// Sphere spectral zeta function against its closed forms.
    Zeta {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1_000_000)]
        kmax: usize,
    },
    /// Sum of the k = 1 multiplet over a list of h.
    Halfsum {
        #[arg(long)]
        shape: PathBuf,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true,
              default_value = "0.02,0.04,0.08")]
        h: Vec<f64>,
    },
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NTHETAxNPHI, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad n_theta in {s:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad n_phi in {s:?}"))?;
    if a == 0 || b == 0 {
        return Err("grid resolutions must be positive".into());
    }
    Ok((a, b))
}

/// Everything a run depends on, embedded verbatim in its result file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeFile>,
    pub analytic: bool,
    pub degree: usize,
    pub outer_grid: (usize, usize),
    pub inner_grid: (usize, usize),
    /// Explicit `--grid`, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_override: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    pub tol: f64,
    pub format: Format,
    /// Not embedded: where a result is written does not change it.
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub threads: usize,
}

impl RunConfig {
    /// Defaults for `command`, before any flags.
    pub fn new(command: Command) -> Self {
        let g = GalerkinConfig::default();
        Self {
            command,
            shape_path: None,
            shape: None,
            analytic: false,
            degree: g.degree,
            outer_grid: g.outer,
            inner_grid: g.inner,
            grid_override: None,
            k: None,
            kmax: None,
            p: None,
            h: None,
            tol: default_tol(command),
            format: Format::Csv,
            out: None,
            threads: 1,
        }
    }

    pub fn galerkin(&self) -> GalerkinConfig {
        GalerkinConfig {
            degree: self.degree,
            outer: self.outer_grid,
            inner: self.inner_grid,
        }
    }

    pub fn from_args(args: Args) -> CliResult<Self> {
        let command = match &args.command {
            SubArgs::Spectrum { .. } => Command::Spectrum,
            SubArgs::Variation { .. } => Command::Variation,
            SubArgs::FdCheck { .. } => Command::FdCheck,
            SubArgs::Zeta { .. } => Command::Zeta,
            SubArgs::Halfsum { .. } => Command::Halfsum,
        };
        let mut cfg = Self::new(command);
        if let Some(d) = args.degree {
            cfg.degree = d;
        }
        if let Some(g) = args.grid {
            cfg.grid_override = Some(g);
            cfg.outer_grid = g;
            cfg.inner_grid = ((3 * g.0).div_ceil(2), (3 * g.1).div_ceil(2));
        }
        if let Some(t) = args.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Config(format!("--tol must be positive, got {t}")));
            }
            cfg.tol = t;
        }
        cfg.format = args.format;
        cfg.out = args.out;
        cfg.threads = resolve_threads(args.threads).map_err(CliError::Config)?;
        if cfg.degree == 0 {
            return Err(CliError::Config("--degree must be >= 1".into()));
        }

        let mut shape_path = None;
        match args.command {
            SubArgs::Spectrum {
                analytic,
                shape,
                kmax,
            } => {
                match (analytic, &shape) {
                    (true, Some(_)) => {
                        return Err(CliError::Config(
                            "--analytic and --shape are mutually exclusive".into(),
                        ))
                    }
                    (false, None) => {
                        return Err(CliError::Config("spectrum needs --analytic or --shape".into()))
                    }
                    _ => {}
                }
                cfg.analytic = analytic;
                shape_path = shape;
                cfg.kmax = Some(kmax.unwrap_or(if analytic { 5 } else { cfg.degree }));
            }
            SubArgs::Variation { shape, k } => {
                if k == 0 {
                    return Err(CliError::Config(
                        "--k must be >= 1; the k = 0 eigenvalue 1/2 has no variation".into(),
                    ));
                }
                shape_path = Some(shape);
                cfg.k = Some(k);
            }
            SubArgs::FdCheck { shape, k, h } => {
                if k == 0 {
                    return Err(CliError::Config("--k must be >= 1".into()));
                }
                check_h(&h)?;
                shape_path = Some(shape);
                cfg.k = Some(k);
                cfg.h = Some(h);
            }
            SubArgs::Zeta { p, kmax } => {
                if p.is_nan() || p <= 2.0 {
                    return Err(CliError::Config(format!("--p must exceed 2, got {p}")));
                }
                if kmax == 0 {
                    return Err(CliError::Config("--kmax must be >= 1".into()));
                }
                cfg.p = Some(p);
                cfg.kmax = Some(kmax);
            }
            SubArgs::Halfsum { shape, h } => {
                check_h(&h)?;
                shape_path = Some(shape);
                cfg.h = Some(h);
            }
        }
        if let Some(path) = shape_path {
            let shape = load_shape(&path)?;
            cfg.shape = Some(ShapeFile::from_shape(&shape));
            cfg.shape_path = Some(path);
        }
        Ok(cfg)
    }
}

fn check_h(h: &[f64]) -> CliResult<()> {
    if h.is_empty() || h.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config("--h needs a list of finite numbers".into()));
    }
    Ok(())
}

/// Command default for `--tol`.
pub fn default_tol(command: Command) -> f64 {
    match command {
        Command::Spectrum => 1e-6,
        Command::Variation => 1e-8,
        Command::FdCheck => 5e-4,
        Command::Zeta => 1e-12,
        Command::Halfsum => 1.9,
    }
}
