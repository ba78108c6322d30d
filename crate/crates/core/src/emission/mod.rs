//! Spontaneous-emission rates near the slab, normalized to the vacuum rate.
//!
//! Two independent routes are provided for the rate into a guided mode:
//!
//! * [`guided_rate`] applies the golden rule to the delta-normalized mode
//!   field and integrates over the in-plane propagation direction, with the
//!   density of states carried by `β` and the group index.
//! * [`guided_rate_via_residue`] extracts the same quantity as the pole
//!   contribution of the classical layered-media integral for the total rate.
//!
//! The total rate is the classical dipole-dissipation integral over the
//! in-plane index `u = k∥/k`,
//!
//! ```text
//! w⊥/w₀ = n₃ + 3/(2n₃²) · Re ∫ (u³/q) r_p e^{2iqkZ} du
//! w∥/w₀ = n₃ + 3/4     · Re ∫ (u/q) (r_s − q² r_p/n₃²) e^{2iqkZ} du
//! ```
//!
//! with `q = k_z,3/k`. Guided modes are real-axis poles of `r_s` or `r_p`;
//! the path dips below each one on a small semicircle, which is what a
//! vanishing material loss would do. An arbitrary orientation mixes the two
//! families as `cos²θ·w⊥ + sin²θ·w∥`; cross terms vanish by in-plane symmetry.

mod reflection;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

pub use reflection::{reflection_coefficients, StackReflection};

use crate::error::{Error, Result};
use crate::mode_fields::Profile;
use crate::mode_solver::{
    find_guided_modes, GuidedMode, ModeId, OpticalContext, Polarization, PropagationDirection, Slab,
    WaveguideStack,
};
use crate::quadrature::{integrate, integrate_pieces, Tolerance};
use reflection::{kz, reflection};

/// Default semicircle radius around each pole, in units of `u`.
pub const INDENTATION_RADIUS: f64 = 1e-4;

/// Azimuths used for the direction integral; exact for the quadratic
/// trigonometric polynomials that arise.
const AZIMUTH_SAMPLES: usize = 16;

/// Unit vector along the transition dipole matrix element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation([f64; 3]);

impl Orientation {
    /// Normal to the film (`ẑ`).
    pub fn perpendicular() -> Self {
        Orientation([0.0, 0.0, 1.0])
    }

    /// In the film plane (`ŷ`).
    pub fn parallel() -> Self {
        Orientation([0.0, 1.0, 0.0])
    }

    /// Normalizes any nonzero finite vector.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Domain(format!("orientation {v:?} is not a nonzero vector")));
        }
        Ok(Orientation([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    /// Polar angle `θ` from the film normal and azimuth `φ`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Orientation([st * cp, st * sp, ct])
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0
    }

    /// `cos²θ`, the weight of the perpendicular family.
    pub fn perpendicular_weight(&self) -> f64 {
        self.0[2] * self.0[2]
    }

    /// `sin²θ`, the weight of the parallel family.
    pub fn parallel_weight(&self) -> f64 {
        self.0[0] * self.0[0] + self.0[1] * self.0[1]
    }
}

/// A two-level emitter at height `height` (meters) above the film, in the cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleEmitter {
    pub orientation: Orientation,
    pub height: f64,
}

impl DipoleEmitter {
    pub fn new(orientation: Orientation, height: f64) -> Result<Self> {
        let e = DipoleEmitter { orientation, height };
        e.validate()?;
        Ok(e)
    }

    fn validate(&self) -> Result<()> {
        if !self.height.is_finite() || self.height < 0.0 {
            return Err(Error::Domain(format!(
                "emitter height Z = {} must be >= 0 (emitter lives in the cover)",
                self.height
            )));
        }
        Ok(())
    }
}

/// Numerical knobs for the total-rate and residue computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionOptions {
    pub tolerance: Tolerance,
    /// Largest semicircle radius around a pole.
    pub indentation: f64,
}

impl Default for EmissionOptions {
    fn default() -> Self {
        EmissionOptions {
            tolerance: Tolerance::default(),
            indentation: INDENTATION_RADIUS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRate {
    pub id: ModeId,
    /// Cover decay constant of the mode (1/m).
    pub kappa3: f64,
    /// `w_ν/w₀`.
    pub rate: f64,
    /// `w_ν/w_tot`.
    pub branching: f64,
}

/// Per-mode rates, total rate and branching ratios at one emitter position.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionReport {
    pub per_mode: Vec<ModeRate>,
    /// `w_tot/w₀`.
    pub total: f64,
    /// Sum of all branching ratios.
    pub guided_sum: f64,
}

impl EmissionReport {
    pub fn branching(&self, id: ModeId) -> Option<f64> {
        self.per_mode.iter().find(|m| m.id == id).map(|m| m.branching)
    }

    pub fn rate(&self, id: ModeId) -> Option<f64> {
        self.per_mode.iter().find(|m| m.id == id).map(|m| m.rate)
    }
}

/// Golden-rule rate into one guided mode, integrated over propagation directions.
pub fn guided_rate(
    mode: &GuidedMode,
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
) -> Result<f64> {
    emitter.validate()?;
    let profile = Profile::new(mode, stack, ctx);
    // Unit-reference field at the emitter; the energy fixes the delta normalization.
    let (_, ex, ey, ez) = profile.sample(emitter.height * ctx.k);
    let dipole = emitter.orientation.vector();

    let mut angular = 0.0;
    for j in 0..AZIMUTH_SAMPLES {
        let dir = PropagationDirection::new(TAU * j as f64 / AZIMUTH_SAMPLES as f64);
        let along = dir.longitudinal();
        let across = dir.transverse();
        let mut coupling = ez * dipole[2];
        for axis in 0..2 {
            coupling += ex * (along[axis] * dipole[axis]) + ey * (across[axis] * dipole[axis]);
        }
        angular += coupling.norm_sqr();
    }
    angular *= TAU / AZIMUTH_SAMPLES as f64;

    // (3/4)·(β/k²)·n_group·∫dφ|d̂·E(φ)|² / N, lengths in units of 1/k. The
    // energy N carries the same n_eff·n_group factor, so it cancels exactly.
    Ok(0.75 * angular / profile.transverse_norm())
}

/// Which reflection coefficient carries a given pole.
#[derive(Debug, Clone, Copy)]
enum Channels {
    All,
    Only(Polarization),
}

/// The rate integrand without the `u/q` Jacobian, for real or complex `u`.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    slab: Slab,
    height: f64,
    perp: f64,
    par: f64,
}

impl Kernel {
    fn new(stack: &WaveguideStack, ctx: &OpticalContext, emitter: &DipoleEmitter) -> Self {
        Kernel {
            slab: Slab::new(stack, ctx),
            height: emitter.height * ctx.k,
            perp: emitter.orientation.perpendicular_weight(),
            par: emitter.orientation.parallel_weight(),
        }
    }

    fn eval(&self, u: Complex64, q: Complex64, channels: Channels) -> Complex64 {
        let (mut rs, mut rp) = reflection(&self.slab, u, q);
        match channels {
            Channels::All => {}
            Channels::Only(Polarization::TE) => rp = Complex64::new(0.0, 0.0),
            Channels::Only(Polarization::TM) => rs = Complex64::new(0.0, 0.0),
        }
        let n3sq = self.slab.n3 * self.slab.n3;
        let phase = (Complex64::i() * 2.0 * q * self.height).exp();
        let mut value = Complex64::new(0.0, 0.0);
        if self.perp != 0.0 {
            value += self.perp * 1.5 / n3sq * u * u * rp;
        }
        if self.par != 0.0 {
            value += self.par * 0.75 * (rs - q * q * rp / n3sq);
        }
        value * phase
    }

    /// Full integrand `(u/q)·K(u)` at complex `u`.
    fn integrand(&self, u: Complex64, channels: Channels) -> Complex64 {
        let q = kz(self.slab.n3, u);
        u / q * self.eval(u, q, channels)
    }

    /// `Re ∮` over the lower semicircle of radius `rho` around `pole`.
    fn semicircle(&self, pole: f64, rho: f64, channels: Channels, tol: Tolerance) -> Result<f64> {
        let f = |theta: f64| {
            let e = Complex64::from_polar(1.0, theta);
            let u = pole + rho * e;
            (self.integrand(u, channels) * Complex64::i() * rho * e).re
        };
        Ok(integrate(f, PI, TAU, tol)?.value)
    }
}

/// Integrand of the total-rate integral at complex `u` (vacuum-normalized,
/// including the `u/q` Jacobian), for use by independent quadratures.
pub fn rate_integrand(
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
    u: Complex64,
) -> Complex64 {
    Kernel::new(stack, ctx, emitter).integrand(u, Channels::All)
}

/// Semicircle radius for `mode`: at most `max_rho`, and no more than a tenth
/// of the distance to any other pole or channel threshold.
fn indentation_radius(mode: &GuidedMode, poles: &[GuidedMode], stack: &WaveguideStack, max_rho: f64) -> f64 {
    let u = mode.n_eff;
    let mut gap = (stack.n1 - u).min(u - stack.n_hi());
    for other in poles {
        if other.id() != mode.id() {
            gap = gap.min((other.n_eff - u).abs());
        }
    }
    max_rho.min(0.1 * gap)
}

/// Pole contribution of one guided mode to the total-rate integral.
///
/// The semicircle integral is evaluated at radii `ρ, ρ/2, ρ/4` and
/// Richardson-extrapolated to `ρ → 0`.
pub fn guided_rate_via_residue(
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
    mode: &GuidedMode,
) -> Result<f64> {
    guided_rate_via_residue_with(stack, ctx, emitter, mode, &EmissionOptions::default())
}

pub fn guided_rate_via_residue_with(
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
    mode: &GuidedMode,
    opts: &EmissionOptions,
) -> Result<f64> {
    emitter.validate()?;
    if mode.marginal {
        return Ok(0.0);
    }
    let poles = find_guided_modes(stack, ctx)?;
    let rho = indentation_radius(mode, &poles, stack, opts.indentation);
    let kernel = Kernel::new(stack, ctx, emitter);
    let channels = Channels::Only(mode.pol);
    let tol = opts.tolerance;
    let p0 = kernel.semicircle(mode.n_eff, rho, channels, tol)?;
    let p1 = kernel.semicircle(mode.n_eff, 0.5 * rho, channels, tol)?;
    let p2 = kernel.semicircle(mode.n_eff, 0.25 * rho, channels, tol)?;
    let r0 = 2.0 * p1 - p0;
    let r1 = 2.0 * p2 - p1;
    Ok((4.0 * r1 - r0) / 3.0)
}

/// Total decay rate `w_tot/w₀` of the emitter above the stack.
pub fn total_rate(stack: &WaveguideStack, ctx: &OpticalContext, emitter: &DipoleEmitter) -> Result<f64> {
    total_rate_with(stack, ctx, emitter, &EmissionOptions::default())
}

pub fn total_rate_with(
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
    opts: &EmissionOptions,
) -> Result<f64> {
    emitter.validate()?;
    let modes = if stack.is_guiding() {
        find_guided_modes(stack, ctx)?
    } else {
        Vec::new()
    };
    total_rate_from_modes(stack, ctx, emitter, &modes, opts)
}

/// Total rate given the already-solved modes.
///
/// Past max(n2, n3) the real-axis integrand has no real part, so the only
/// contributions there are the half-residues at the guided poles, which are
/// exactly the golden-rule guided rates. They are added in closed form:
/// integrating tiny indentations around a pole that has just left the light
/// line is hopelessly ill-conditioned.
fn total_rate_from_modes(
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
    modes: &[GuidedMode],
    opts: &EmissionOptions,
) -> Result<f64> {
    let mut guided = 0.0;
    for mode in modes {
        guided += guided_rate(mode, stack, ctx, emitter)?;
    }
    Ok(continuum_rate(stack, ctx, emitter, opts)? + guided)
}

/// `n3` plus the radiative cone and the substrate-leaky band.
fn continuum_rate(
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
    opts: &EmissionOptions,
) -> Result<f64> {
    let kernel = Kernel::new(stack, ctx, emitter);
    let tol = opts.tolerance;
    let (n2, n3) = (stack.n2, stack.n3);

    // Radiative cone u ∈ [0, n3], integrated over q = √(n3² − u²) to absorb
    // the inverse square root at the cover light line.
    let mut q_breaks = vec![0.0];
    if n2 < n3 {
        q_breaks.push(((n3 - n2) * (n3 + n2)).sqrt());
    }
    q_breaks.push(n3);
    let radiative = integrate_pieces(
        |q| {
            let u = ((n3 - q) * (n3 + q)).sqrt();
            kernel
                .eval(Complex64::new(u, 0.0), Complex64::new(q, 0.0), Channels::All)
                .re
        },
        &q_breaks,
        tol,
    )?;

    // Substrate band n3 < u < n2, integrated over t = √(u² − n3²) where
    // q = i·t and (u/q)·du = −i·dt.
    let t_of = |u: f64| ((u - n3) * (u + n3)).sqrt();
    let evanescent = if n2 > n3 {
        integrate(
            |t: f64| {
                let u = (t * t + n3 * n3).sqrt();
                kernel
                    .eval(Complex64::new(u, 0.0), Complex64::new(0.0, t), Channels::All)
                    .im
            },
            0.0,
            t_of(n2),
            tol,
        )?
        .value
    } else {
        0.0
    };

    Ok(n3 + radiative + evanescent)
}

/// Guided rates, total rate and branching ratios at the emitter position.
pub fn branching_ratio(
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
) -> Result<EmissionReport> {
    branching_ratio_with(stack, ctx, emitter, &EmissionOptions::default())
}

pub fn branching_ratio_with(
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
    opts: &EmissionOptions,
) -> Result<EmissionReport> {
    emitter.validate()?;
    let modes = if stack.is_guiding() {
        find_guided_modes(stack, ctx)?
    } else {
        Vec::new()
    };
    report_for_modes(stack, ctx, emitter, &modes, opts)
}

pub(crate) fn report_for_modes(
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    emitter: &DipoleEmitter,
    modes: &[GuidedMode],
    opts: &EmissionOptions,
) -> Result<EmissionReport> {
    let rates = modes
        .iter()
        .map(|m| guided_rate(m, stack, ctx, emitter))
        .collect::<Result<Vec<_>>>()?;
    let total = continuum_rate(stack, ctx, emitter, opts)? + rates.iter().sum::<f64>();
    if !(total > 0.0) {
        return Err(Error::Convergence(format!("total rate {total} is not positive")));
    }
    let per_mode: Vec<ModeRate> = modes
        .iter()
        .zip(rates)
        .map(|(mode, rate)| ModeRate {
            id: mode.id(),
            kappa3: mode.kappa3,
            rate,
            branching: rate / total,
        })
        .collect();
    let guided_sum = per_mode.iter().map(|m| m.branching).sum();
    Ok(EmissionReport {
        per_mode,
        total,
        guided_sum,
    })
}
