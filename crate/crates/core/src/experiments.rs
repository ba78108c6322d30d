//! Parameter sweeps behind the branching-ratio figures, the length-scaling
//! check, and a film-thickness optimizer.
//!
//! Grid points are evaluated in parallel on the current rayon pool; rows are
//! always returned in grid order, and each point is computed independently,
//! so tables are bit-identical regardless of thread count.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::emission::{report_for_modes, DipoleEmitter, EmissionOptions, EmissionReport, Orientation};
use crate::error::{Error, Result};
use crate::mode_solver::{cutoff_thickness, find_guided_modes, ModeId, OpticalContext, Polarization, WaveguideStack};

/// Film thicknesses (nm) of the mode-birth study; the last one also carries
/// the total-capture curve.
pub const FIG3_THICKNESSES_NM: [f64; 3] = [235.0, 245.0, 255.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// 400 nm Ta₂O₅ on fused silica under vacuum, parallel dipole.
    Fig2Ta2o5,
    /// Free-standing symmetric n = 2.0 film, perpendicular dipole.
    Fig3Symmetric,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Height,
    Thickness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Abscissa grid in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub npoints: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn new(start: f64, stop: f64, npoints: usize, spacing: Spacing) -> Result<Self> {
        let g = Grid {
            start,
            stop,
            npoints,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.start < self.stop) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Domain(format!(
                "grid start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        if self.npoints < 2 {
            return Err(Error::Domain(format!("grid needs >= 2 points, got {}", self.npoints)));
        }
        if self.spacing == Spacing::Log && self.start <= 0.0 {
            return Err(Error::Domain("logarithmic grid must start above 0".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.npoints - 1) as f64;
        (0..self.npoints)
            .map(|i| {
                if i == self.npoints - 1 {
                    return self.stop;
                }
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * f,
                    Spacing::Log => self.start * (self.stop / self.start).powf(f),
                }
            })
            .collect()
    }

    /// Logarithmic heights from 1 nm to 2 µm, 200 points.
    pub fn default_heights() -> Self {
        Grid {
            start: 1e-9,
            stop: 2e-6,
            npoints: 200,
            spacing: Spacing::Log,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub scenario: Scenario,
    pub stack: WaveguideStack,
    pub ctx: OpticalContext,
    pub orientation: Orientation,
    pub axis: Axis,
    pub grid: Grid,
    /// Emitter height for thickness sweeps (meters); ignored for height sweeps.
    pub height: f64,
    /// Emit one branching-ratio column per mode.
    pub per_mode: bool,
}

impl SweepSpec {
    pub fn fig2() -> Self {
        SweepSpec {
            scenario: Scenario::Fig2Ta2o5,
            stack: WaveguideStack::from_nm(2.2, 1.45, 1.0, 400.0).expect("valid stack"),
            ctx: OpticalContext::from_nm(780.0).expect("valid wavelength"),
            orientation: Orientation::parallel(),
            axis: Axis::Height,
            grid: Grid::default_heights(),
            height: 0.0,
            per_mode: true,
        }
    }

    /// Height sweep above a symmetric film of thickness `d_nm`.
    pub fn fig3(d_nm: f64) -> Result<Self> {
        Ok(SweepSpec {
            scenario: Scenario::Fig3Symmetric,
            stack: WaveguideStack::from_nm(2.0, 1.0, 1.0, d_nm)?,
            ctx: OpticalContext::from_nm(780.0)?,
            orientation: Orientation::perpendicular(),
            axis: Axis::Height,
            grid: Grid::default_heights(),
            height: 0.0,
            per_mode: true,
        })
    }

    pub fn emitter(&self, height: f64) -> Result<DipoleEmitter> {
        DipoleEmitter::new(self.orientation, height)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Height or thickness in meters.
    pub abscissa: f64,
    /// `P^ν` aligned with [`SweepTable::modes`]; zero where the mode is absent.
    pub branching: Vec<f64>,
    /// `w_ν/w₀` aligned with [`SweepTable::modes`].
    pub rates: Vec<f64>,
    /// `1/(2κ₃)` in meters, `None` where the mode is absent.
    pub decay_lengths: Vec<Option<f64>>,
    pub guided_sum: f64,
    /// `w_tot/w₀`.
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: Axis,
    pub modes: Vec<ModeId>,
    pub rows: Vec<SweepRow>,
    pub per_mode: bool,
}

/// Twelve significant digits in scientific notation, independent of locale.
pub fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

impl SweepTable {
    fn row_from(abscissa: f64, modes: &[ModeId], report: &EmissionReport) -> SweepRow {
        let mut branching = vec![0.0; modes.len()];
        let mut rates = vec![0.0; modes.len()];
        let mut decay_lengths = vec![None; modes.len()];
        for m in &report.per_mode {
            let i = modes.iter().position(|id| *id == m.id).expect("mode in column set");
            branching[i] = m.branching;
            rates[i] = m.rate;
            decay_lengths[i] = Some(0.5 / m.kappa3);
        }
        SweepRow {
            abscissa,
            branching,
            rates,
            decay_lengths,
            guided_sum: report.guided_sum,
            total: report.total,
        }
    }

    pub fn column(&self, id: ModeId) -> Option<Vec<f64>> {
        let i = self.modes.iter().position(|m| *m == id)?;
        Some(self.rows.iter().map(|r| r.branching[i]).collect())
    }

    pub fn header(&self) -> Vec<String> {
        let mut cols = vec!["abscissa_nm".to_string()];
        if self.per_mode {
            cols.extend(self.modes.iter().map(|m| format!("P_{m}")));
        }
        cols.push("guided_sum".into());
        cols.push("wtot_over_w0".into());
        if self.axis == Axis::Thickness && self.per_mode {
            cols.extend(self.modes.iter().map(|m| format!("decay_nm_{m}")));
        }
        cols
    }

    /// Writes the table as CSV with `\n` line ends and a header row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.header().join(","))?;
        for row in &self.rows {
            let mut fields = vec![format_number(row.abscissa * 1e9)];
            if self.per_mode {
                fields.extend(row.branching.iter().map(|&p| format_number(p)));
            }
            fields.push(format_number(row.guided_sum));
            fields.push(format_number(row.total));
            if self.axis == Axis::Thickness && self.per_mode {
                fields.extend(
                    row.decay_lengths
                        .iter()
                        .map(|d| format_number(d.map_or(0.0, |d| d * 1e9))),
                );
            }
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Branching ratios as a function of emitter height for a fixed stack.
pub fn sweep_height(spec: &SweepSpec) -> Result<SweepTable> {
    sweep_height_with(spec, &EmissionOptions::default())
}

pub fn sweep_height_with(spec: &SweepSpec, opts: &EmissionOptions) -> Result<SweepTable> {
    if spec.axis != Axis::Height {
        return Err(Error::Domain("sweep_height needs a height axis".into()));
    }
    spec.grid.validate()?;
    let modes = find_guided_modes(&spec.stack, &spec.ctx)?;
    let ids: Vec<ModeId> = modes.iter().map(|m| m.id()).collect();
    let rows = spec
        .grid
        .points()
        .into_par_iter()
        .map(|z| {
            let emitter = spec.emitter(z)?;
            let report = report_for_modes(&spec.stack, &spec.ctx, &emitter, &modes, opts)?;
            Ok(SweepTable::row_from(z, &ids, &report))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        axis: Axis::Height,
        modes: ids,
        rows,
        per_mode: spec.per_mode,
    })
}

/// Branching ratios at a fixed height as the film thickness changes; modes
/// that are not yet born show up as zero columns.
pub fn sweep_thickness(spec: &SweepSpec) -> Result<SweepTable> {
    sweep_thickness_with(spec, &EmissionOptions::default())
}

pub fn sweep_thickness_with(spec: &SweepSpec, opts: &EmissionOptions) -> Result<SweepTable> {
    if spec.axis != Axis::Thickness {
        return Err(Error::Domain("sweep_thickness needs a thickness axis".into()));
    }
    spec.grid.validate()?;
    let emitter = spec.emitter(spec.height)?;
    let reports = spec
        .grid
        .points()
        .into_par_iter()
        .map(|d| {
            let stack = spec.stack.with_thickness(d)?;
            let modes = find_guided_modes(&stack, &spec.ctx)?;
            let report = report_for_modes(&stack, &spec.ctx, &emitter, &modes, opts)?;
            Ok((d, report))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ids: Vec<ModeId> = reports
        .iter()
        .flat_map(|(_, r)| r.per_mode.iter().map(|m| m.id))
        .collect();
    ids.sort();
    ids.dedup();
    let rows = reports
        .iter()
        .map(|(d, r)| SweepTable::row_from(*d, &ids, r))
        .collect();
    Ok(SweepTable {
        axis: Axis::Thickness,
        modes: ids,
        rows,
        per_mode: spec.per_mode,
    })
}

fn scaled_inputs(
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
    s: f64,
) -> Result<(WaveguideStack, OpticalContext, DipoleEmitter)> {
    Ok((
        stack.with_thickness(stack.d * s)?,
        OpticalContext::new(ctx.lambda0 * s)?,
        DipoleEmitter::new(emitter.orientation, emitter.height * s)?,
    ))
}

/// Largest relative change of any branching ratio when wavelength, film
/// thickness and height are all multiplied by `s`.
pub fn scaling_check(
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
    s: f64,
) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("scale factor {s} must be > 0")));
    }
    let base = crate::emission::branching_ratio(stack, ctx, emitter)?;
    let (stack2, ctx2, emitter2) = scaled_inputs(stack, ctx, emitter, s)?;
    let scaled = crate::emission::branching_ratio(&stack2, &ctx2, &emitter2)?;
    if base.per_mode.len() != scaled.per_mode.len() {
        return Ok(f64::INFINITY);
    }
    let mut worst: f64 = 0.0;
    for (a, b) in base.per_mode.iter().zip(&scaled.per_mode) {
        if a.id != b.id {
            return Ok(f64::INFINITY);
        }
        let scale = a.branching.abs().max(b.branching.abs());
        if scale > 0.0 {
            worst = worst.max((a.branching - b.branching).abs() / scale);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThicknessOptimum {
    /// Best film thickness in meters.
    pub thickness: f64,
    pub guided_sum: f64,
}

/// Golden-section tolerance on the thickness (meters).
const OPTIMIZER_TOLERANCE: f64 = 0.01e-9;
const OPTIMIZER_SCAN: usize = 12;

fn guided_sum_at(
    template: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
    d: f64,
) -> Result<f64> {
    let stack = template.with_thickness(d)?;
    let modes = find_guided_modes(&stack, ctx)?;
    Ok(report_for_modes(&stack, ctx, emitter, &modes, &EmissionOptions::default())?.guided_sum)
}

/// All mode-birth thicknesses strictly inside `(lo, hi)`, sorted.
fn birth_thicknesses(template: &WaveguideStack, ctx: &OpticalContext, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let mut births = Vec::new();
    for pol in Polarization::ALL {
        for order in 0.. {
            let dc = cutoff_thickness(template.n1, template.n2, template.n3, ctx, pol, order)?;
            if dc >= hi {
                break;
            }
            if dc > lo {
                births.push(dc);
            }
        }
    }
    births.sort_by(f64::total_cmp);
    Ok(births)
}

/// Maximizes the guided-capture probability over film thickness.
///
/// The objective has a kink at every mode birth, so the range is split there
/// and each smooth piece is scanned coarsely, then refined by golden-section
/// search to 0.01 nm. Cutoff thicknesses themselves are never evaluated.
pub fn optimize_thickness(
    template: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
    d_range: (f64, f64),
) -> Result<ThicknessOptimum> {
    template.ensure_guiding()?;
    let (lo, hi) = d_range;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::Domain(format!("thickness range ({lo}, {hi}) is invalid")));
    }
    let mut edges = vec![lo];
    edges.extend(birth_thicknesses(template, ctx, lo, hi)?);
    edges.push(hi);

    let objective = |d: f64| guided_sum_at(template, ctx, emitter, d);
    let mut best: Option<ThicknessOptimum> = None;
    for w in edges.windows(2) {
        let nudge = 1e-7 * (w[1] - w[0]);
        let (a, b) = (w[0] + nudge, w[1] - nudge);
        if b <= a {
            continue;
        }
        let probe = template.with_thickness(0.5 * (a + b))?;
        if find_guided_modes(&probe, ctx)?.is_empty() {
            continue;
        }
        let xs: Vec<f64> = (0..OPTIMIZER_SCAN)
            .map(|i| a + (b - a) * i as f64 / (OPTIMIZER_SCAN - 1) as f64)
            .collect();
        let ys = xs
            .par_iter()
            .map(|&d| objective(d))
            .collect::<Result<Vec<_>>>()?;
        let (imax, _) = ys
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &y)| if y > acc.1 { (i, y) } else { acc });
        let left = xs[imax.saturating_sub(1)];
        let right = xs[(imax + 1).min(OPTIMIZER_SCAN - 1)];
        let (x, y) = golden_section_max(&objective, left, right, OPTIMIZER_TOLERANCE)?;
        let (x, y) = if ys[imax] > y { (xs[imax], ys[imax]) } else { (x, y) };
        if best.is_none_or(|b| y > b.guided_sum) {
            best = Some(ThicknessOptimum {
                thickness: x,
                guided_sum: y,
            });
        }
    }
    best.ok_or(Error::NoModes)
}

fn golden_section_max<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc > fd { (c, fc) } else { (d, fd) })
}
