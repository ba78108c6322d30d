//! Run configuration: built-in defaults per command, overlaid by an optional
//! flat JSON file, overlaid by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use serde::Deserialize;
use wgemit_core::experiments::{Axis, Grid, Spacing, FIG3_THICKNESSES_NM};
use wgemit_core::quadrature::Tolerance;
use wgemit_core::{EmissionOptions, OpticalContext, Orientation, WaveguideStack};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Modes,
    Rates,
    Sweep,
    Fig2,
    Fig3,
    Optimize,
    ScalingCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AxisArg {
    Height,
    Thickness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SpacingArg {
    Lin,
    Log,
}

/// `"perp"`, `"par"`, or a dipole direction `[x, y, z]`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OrientationArg {
    Named(String),
    Vector([f64; 3]),
}

impl OrientationArg {
    fn resolve(&self) -> anyhow::Result<Orientation> {
        match self {
            OrientationArg::Named(s) => match s.as_str() {
                "perp" => Ok(Orientation::perpendicular()),
                "par" => Ok(Orientation::parallel()),
                other => {
                    let parts: Vec<f64> = other
                        .split(',')
                        .map(|p| p.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .with_context(|| format!("orientation '{other}' is not perp, par or x,y,z"))?;
                    let v: [f64; 3] = parts
                        .try_into()
                        .map_err(|_| anyhow::anyhow!("orientation '{other}' needs three components"))?;
                    Ok(Orientation::new(v)?)
                }
            },
            OrientationArg::Vector(v) => Ok(Orientation::new(*v)?),
        }
    }
}

impl std::str::FromStr for OrientationArg {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(OrientationArg::Named(s.to_string()))
    }
}

/// Every setting, all optional; field names double as JSON keys.
#[derive(Debug, Clone, Default, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Flat JSON file with any of these settings; flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Must match the subcommand when given in a file.
    #[arg(skip)]
    pub command: Option<Command>,

    /// Film index.
    #[arg(long)]
    pub n1: Option<f64>,
    /// Substrate index.
    #[arg(long)]
    pub n2: Option<f64>,
    /// Cover index (emitter side).
    #[arg(long)]
    pub n3: Option<f64>,
    /// Film thickness (nm).
    #[arg(long = "d", value_name = "NM")]
    pub d_nm: Option<f64>,
    /// Vacuum wavelength (nm).
    #[arg(long = "lambda", value_name = "NM")]
    pub lambda_nm: Option<f64>,
    /// perp, par, or x,y,z.
    #[arg(long)]
    pub orientation: Option<OrientationArg>,
    /// Emitter height above the film (nm).
    #[arg(long = "z", value_name = "NM")]
    pub z_nm: Option<f64>,

    /// Sweep variable.
    #[arg(long, value_enum)]
    pub axis: Option<AxisArg>,
    /// First grid value (nm).
    #[arg(long = "start", value_name = "NM")]
    pub start_nm: Option<f64>,
    /// Last grid value (nm).
    #[arg(long = "stop", value_name = "NM")]
    pub stop_nm: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<SpacingArg>,
    /// Write one branching-ratio column per mode.
    #[arg(long)]
    pub per_mode: Option<bool>,

    /// Film thicknesses for fig3 (nm).
    #[arg(long = "thicknesses", value_name = "NM", value_delimiter = ',')]
    pub thicknesses_nm: Option<Vec<f64>>,
    /// Lower end of the optimizer's thickness range (nm).
    #[arg(long = "d-min", value_name = "NM")]
    pub d_min_nm: Option<f64>,
    /// Upper end of the optimizer's thickness range (nm).
    #[arg(long = "d-max", value_name = "NM")]
    pub d_max_nm: Option<f64>,
    /// Length scale factors for scaling-check.
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<f64>>,

    /// Relative quadrature tolerance.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Panel budget per quadrature.
    #[arg(long)]
    pub max_panels: Option<usize>,

    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $(if $src.$f.is_some() { $dst.$f = $src.$f; })*
    };
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fields of `other` that are set replace those of `self`.
    pub fn overlay(mut self, other: RunConfig) -> Self {
        let o = other;
        overlay!(self, o; command, n1, n2, n3, d_nm, lambda_nm, orientation, z_nm, axis, start_nm,
            stop_nm, points, spacing, per_mode, thicknesses_nm, d_min_nm, d_max_nm, scales, rel_tol,
            abs_tol, max_panels, out);
        self
    }

    /// Built-in defaults for `command`.
    pub fn defaults(command: Command) -> Self {
        let symmetric = matches!(command, Command::Fig3 | Command::Optimize);
        RunConfig {
            command: Some(command),
            n1: Some(if symmetric { 2.0 } else { 2.2 }),
            n2: Some(if symmetric { 1.0 } else { 1.45 }),
            n3: Some(1.0),
            d_nm: Some(if symmetric { 255.0 } else { 400.0 }),
            lambda_nm: Some(780.0),
            orientation: Some(OrientationArg::Named(if symmetric { "perp" } else { "par" }.into())),
            z_nm: Some(0.0),
            axis: Some(AxisArg::Height),
            per_mode: Some(true),
            thicknesses_nm: Some(FIG3_THICKNESSES_NM.to_vec()),
            d_min_nm: Some(100.0),
            d_max_nm: Some(400.0),
            scales: Some(vec![0.5, 2.0, 3.7]),
            ..RunConfig::default()
        }
    }

    /// Defaults, then the file named by `--config`, then the flags.
    pub fn resolve(command: Command, flags: RunConfig) -> anyhow::Result<Self> {
        let mut cfg = RunConfig::defaults(command);
        if let Some(path) = &flags.config {
            let file = RunConfig::from_json_file(path)?;
            if let Some(c) = file.command {
                if c != command {
                    bail!("config file is for command {c:?}, not {command:?}");
                }
            }
            cfg = cfg.overlay(file);
        }
        Ok(cfg.overlay(flags))
    }

    fn require<T: Clone>(v: &Option<T>, name: &str) -> anyhow::Result<T> {
        v.clone().with_context(|| format!("missing setting '{name}'"))
    }

    pub fn stack(&self) -> anyhow::Result<WaveguideStack> {
        Ok(WaveguideStack::from_nm(
            Self::require(&self.n1, "n1")?,
            Self::require(&self.n2, "n2")?,
            Self::require(&self.n3, "n3")?,
            Self::require(&self.d_nm, "d_nm")?,
        )?)
    }

    /// Like [`stack`](Self::stack), but also insists on guiding indices.
    pub fn guiding_stack(&self) -> anyhow::Result<WaveguideStack> {
        let s = self.stack()?;
        s.ensure_guiding()?;
        Ok(s)
    }

    pub fn ctx(&self) -> anyhow::Result<OpticalContext> {
        Ok(OpticalContext::from_nm(Self::require(&self.lambda_nm, "lambda_nm")?)?)
    }

    pub fn orientation(&self) -> anyhow::Result<Orientation> {
        Self::require(&self.orientation, "orientation")?.resolve()
    }

    pub fn height(&self) -> anyhow::Result<f64> {
        Ok(Self::require(&self.z_nm, "z_nm")? * 1e-9)
    }

    pub fn axis(&self) -> Axis {
        match self.axis {
            Some(AxisArg::Thickness) => Axis::Thickness,
            _ => Axis::Height,
        }
    }

    /// Sweep grid in meters; unset fields fall back to `fallback`.
    pub fn grid(&self, fallback: Grid) -> anyhow::Result<Grid> {
        let spacing = match self.spacing {
            Some(SpacingArg::Lin) => Spacing::Linear,
            Some(SpacingArg::Log) => Spacing::Log,
            None => fallback.spacing,
        };
        Ok(Grid::new(
            self.start_nm.map_or(fallback.start, |v| v * 1e-9),
            self.stop_nm.map_or(fallback.stop, |v| v * 1e-9),
            self.points.unwrap_or(fallback.npoints),
            spacing,
        )?)
    }

    pub fn options(&self) -> anyhow::Result<EmissionOptions> {
        let mut opts = EmissionOptions::default();
        let tol: &mut Tolerance = &mut opts.tolerance;
        if let Some(v) = self.rel_tol {
            if !(v > 0.0) {
                bail!("rel_tol must be > 0");
            }
            tol.rel = v;
        }
        if let Some(v) = self.abs_tol {
            if !(v >= 0.0) {
                bail!("abs_tol must be >= 0");
            }
            tol.abs = v;
        }
        if let Some(v) = self.max_panels {
            tol.max_panels = v.max(1);
        }
        Ok(opts)
    }
}
