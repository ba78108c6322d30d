//! Confined TE/TM modes of a lossless three-layer slab.
//!
//! Geometry: the cover (index `n3`, where the emitter lives) occupies `z > 0`,
//! the film (`n1`) occupies `-d < z < 0` and the substrate (`n2`) `z < -d`.
//!
//! Modes are found from the phase form of the slab eigenvalue equation,
//!
//! ```text
//! F_ν(n_eff) = h·d − atan(w₂κ₂/h) − atan(w₃κ₃/h) − ν·π
//! ```
//!
//! with `h = k√(n₁² − n_eff²)`, `κ_j = k√(n_eff² − n_j²)`, and `w_j = 1` (TE)
//! or `n₁²/n_j²` (TM). The ν-free part decreases strictly from its value at
//! `n_eff = max(n₂, n₃)` to `−π` at `n_eff = n₁`, so every order has exactly
//! one simple root and the number of modes is read off the endpoint value.
//!
//! Internally all lengths are measured in units of `1/k = λ₀/2π`, which makes
//! simultaneous scaling of the wavelength and the thickness an exact symmetry.
//! Roots are bracketed in the variable `s = κ_birth/k = √(n_eff² − n_hi²)`,
//! which keeps full relative precision on the birth-side decay constant of
//! modes that are only just confined.

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::error::{Error, Result};

/// Number of uniform pre-scan points used to bracket each root.
pub const PRESCAN_POINTS: usize = 2048;

/// Modes with `κ_birth·d` below this are flagged as marginal.
pub const MARGINAL_THRESHOLD: f64 = 1e-9;

/// Relative step in `k` for the group-index finite difference.
pub const GROUP_INDEX_STEP: f64 = 1e-6;

/// Film, substrate and cover refractive indices with the film thickness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideStack {
    /// Film index.
    pub n1: f64,
    /// Substrate index.
    pub n2: f64,
    /// Cover index (emitter side).
    pub n3: f64,
    /// Film thickness in meters.
    pub d: f64,
}

impl WaveguideStack {
    /// Builds a stack of real, lossless indices `≥ 1` and positive thickness.
    ///
    /// The guiding condition `n1 > max(n2, n3)` is not required here: a
    /// non-guiding stack is still a valid reflector for the total-rate
    /// computation. Operations that need confined modes check it themselves
    /// through [`WaveguideStack::ensure_guiding`].
    pub fn new(n1: f64, n2: f64, n3: f64, d: f64) -> Result<Self> {
        for (name, n) in [("n1", n1), ("n2", n2), ("n3", n3)] {
            if !n.is_finite() || n < 1.0 {
                return Err(Error::Domain(format!(
                    "{name} = {n} must be a finite real index >= 1"
                )));
            }
        }
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::Domain(format!("film thickness d = {d} must be > 0")));
        }
        Ok(WaveguideStack { n1, n2, n3, d })
    }

    /// Same as [`WaveguideStack::new`] with the thickness given in nanometers.
    pub fn from_nm(n1: f64, n2: f64, n3: f64, d_nm: f64) -> Result<Self> {
        Self::new(n1, n2, n3, d_nm * 1e-9)
    }

    /// Index of the higher cladding, the side on which modes are born.
    pub fn n_hi(&self) -> f64 {
        self.n2.max(self.n3)
    }

    /// Index of the lower cladding.
    pub fn n_lo(&self) -> f64 {
        self.n2.min(self.n3)
    }

    pub fn is_guiding(&self) -> bool {
        self.n1 > self.n_hi()
    }

    /// Rejects stacks that cannot confine light, naming the violated inequality.
    pub fn ensure_guiding(&self) -> Result<()> {
        if self.n1 > self.n2 && self.n1 > self.n3 {
            return Ok(());
        }
        let violated = if self.n1 <= self.n2 {
            format!("n1 > n2 violated (n1 = {}, n2 = {})", self.n1, self.n2)
        } else {
            format!("n1 > n3 violated (n1 = {}, n3 = {})", self.n1, self.n3)
        };
        Err(Error::NotGuiding(violated))
    }

    /// Copy of the stack with a different film thickness.
    pub fn with_thickness(&self, d: f64) -> Result<Self> {
        Self::new(self.n1, self.n2, self.n3, d)
    }
}

/// Vacuum wavelength and wavenumber of the transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalContext {
    /// Vacuum wavelength in meters.
    pub lambda0: f64,
    /// Vacuum wavenumber `2π/λ₀` in 1/m.
    pub k: f64,
}

impl OpticalContext {
    pub fn new(lambda0: f64) -> Result<Self> {
        if !lambda0.is_finite() || lambda0 <= 0.0 {
            return Err(Error::Domain(format!("wavelength {lambda0} must be > 0")));
        }
        Ok(OpticalContext {
            lambda0,
            k: TAU / lambda0,
        })
    }

    pub fn from_nm(lambda_nm: f64) -> Result<Self> {
        Self::new(lambda_nm * 1e-9)
    }

    /// Angular frequency `ω = c·k`.
    pub fn omega(&self) -> f64 {
        crate::SPEED_OF_LIGHT * self.k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    /// Electric field parallel to the film.
    TE,
    /// Magnetic field parallel to the film.
    TM,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::TE, Polarization::TM];

    /// Weight multiplying `κ_j/h` in the phase equation.
    fn weight(self, n1: f64, nj: f64) -> f64 {
        match self {
            Polarization::TE => 1.0,
            Polarization::TM => (n1 * n1) / (nj * nj),
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::TE => f.write_str("TE"),
            Polarization::TM => f.write_str("TM"),
        }
    }
}

/// Polarization and order of a mode, e.g. `TM1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeId {
    pub pol: Polarization,
    pub order: usize,
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.pol, self.order)
    }
}

/// One solved confined mode. Wavenumbers are in 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidedMode {
    pub pol: Polarization,
    /// Number of field nodes inside the film.
    pub order: usize,
    pub n_eff: f64,
    /// Propagation constant `n_eff·k`.
    pub beta: f64,
    /// Transverse wavenumber inside the film.
    pub h: f64,
    /// Substrate decay constant.
    pub kappa2: f64,
    /// Cover decay constant.
    pub kappa3: f64,
    /// Group index `dβ/dk`.
    pub n_group: f64,
    /// `κ_birth·d < 1e-9`: the mode is only just confined.
    pub marginal: bool,
    /// Final bisection bracket on `n_eff`; the residual changes sign across it.
    pub n_eff_bracket: [f64; 2],
}

impl GuidedMode {
    pub fn id(&self) -> ModeId {
        ModeId {
            pol: self.pol,
            order: self.order,
        }
    }
}

/// In-plane propagation azimuth, `(k_x, k_y) = β(cos φ, sin φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationDirection {
    phi: f64,
}

impl PropagationDirection {
    /// Wraps any finite azimuth into `[0, 2π)`.
    pub fn new(phi: f64) -> Self {
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        PropagationDirection { phi }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit vector along the propagation direction.
    pub fn longitudinal(&self) -> [f64; 3] {
        [self.phi.cos(), self.phi.sin(), 0.0]
    }

    /// In-plane unit vector perpendicular to the propagation direction.
    pub fn transverse(&self) -> [f64; 3] {
        [-self.phi.sin(), self.phi.cos(), 0.0]
    }
}

/// Slab with lengths in units of `1/k`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Slab {
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
    pub d: f64,
}

impl Slab {
    pub fn new(stack: &WaveguideStack, ctx: &OpticalContext) -> Self {
        Slab {
            n1: stack.n1,
            n2: stack.n2,
            n3: stack.n3,
            d: ctx.k * stack.d,
        }
    }

    fn n_hi(&self) -> f64 {
        self.n2.max(self.n3)
    }

    fn n_lo(&self) -> f64 {
        self.n2.min(self.n3)
    }

    fn with_thickness(self, d: f64) -> Self {
        Slab { d, ..self }
    }

    /// Upper end of the root variable `s`.
    fn s_max(&self) -> f64 {
        let nh = self.n_hi();
        ((self.n1 - nh) * (self.n1 + nh)).sqrt()
    }

    /// ν-free phase as a function of `s = √(n_eff² − n_hi²)`.
    fn phase(&self, pol: Polarization, s: f64) -> f64 {
        let nh = self.n_hi();
        let nl = self.n_lo();
        let h = ((self.n1 - nh) * (self.n1 + nh) - s * s).max(0.0).sqrt();
        let kappa_lo = ((nh - nl) * (nh + nl) + s * s).sqrt();
        h * self.d
            - (pol.weight(self.n1, nh) * s).atan2(h)
            - (pol.weight(self.n1, nl) * kappa_lo).atan2(h)
    }

    /// Number of confined modes of one polarization.
    fn mode_count(&self, pol: Polarization) -> usize {
        let cycles = self.phase(pol, 0.0) / PI;
        if cycles <= 0.0 {
            0
        } else {
            cycles.ceil() as usize
        }
    }

    /// Brackets and bisects the root of order `order`; `None` if not confined.
    fn solve_order(&self, pol: Polarization, order: usize) -> Option<(f64, [f64; 2])> {
        let target = order as f64 * PI;
        let g = |s: f64| self.phase(pol, s) - target;
        if g(0.0) <= 0.0 {
            return None;
        }
        let s_max = self.s_max();
        let step = s_max / (PRESCAN_POINTS - 1) as f64;
        let (mut lo, mut hi) = (0.0, s_max);
        for i in 1..PRESCAN_POINTS {
            let s = if i == PRESCAN_POINTS - 1 {
                s_max
            } else {
                i as f64 * step
            };
            if g(s) <= 0.0 {
                lo = (i - 1) as f64 * step;
                hi = s;
                break;
            }
        }
        // Bisect to the last representable midpoint.
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        let nh = self.n_hi();
        let to_neff = |s: f64| (nh * nh + s * s).sqrt();
        Some((s, [to_neff(lo), to_neff(hi)]))
    }

    /// Effective index of order `order` at this thickness.
    fn n_eff(&self, pol: Polarization, order: usize) -> Option<f64> {
        self.solve_order(pol, order).map(|(s, _)| {
            let nh = self.n_hi();
            (nh * nh + s * s).sqrt()
        })
    }

    /// Central difference of `β/k` in `k`; scaling `k` is the same as scaling `d`.
    fn group_index_fd(&self, pol: Polarization, order: usize, delta: f64) -> Option<f64> {
        let up = self.with_thickness(self.d * (1.0 + delta)).n_eff(pol, order)?;
        let down = self.with_thickness(self.d * (1.0 - delta)).n_eff(pol, order)?;
        Some((up * (1.0 + delta) - down * (1.0 - delta)) / (2.0 * delta))
    }

    /// Second-order one-sided difference used when the mode dies at `k(1 − δ)`.
    fn group_index_forward(&self, pol: Polarization, order: usize, delta: f64) -> Option<f64> {
        let b0 = self.n_eff(pol, order)?;
        let b1 = self.with_thickness(self.d * (1.0 + delta)).n_eff(pol, order)? * (1.0 + delta);
        let b2 = self.with_thickness(self.d * (1.0 + 2.0 * delta)).n_eff(pol, order)?
            * (1.0 + 2.0 * delta);
        Some((-3.0 * b0 + 4.0 * b1 - b2) / (2.0 * delta))
    }

    fn build_mode(&self, ctx: &OpticalContext, pol: Polarization, order: usize) -> Option<GuidedMode> {
        let (s, bracket) = self.solve_order(pol, order)?;
        let nh = self.n_hi();
        let nl = self.n_lo();
        let n_eff = (nh * nh + s * s).sqrt();
        let kappa_hi = s;
        let kappa_lo = ((nh - nl) * (nh + nl) + s * s).sqrt();
        let h = ((self.n1 - nh) * (self.n1 + nh) - s * s).max(0.0).sqrt();
        let (kappa2, kappa3) = if self.n2 >= self.n3 {
            (kappa_hi, kappa_lo)
        } else {
            (kappa_lo, kappa_hi)
        };
        let n_group = self
            .group_index_fd(pol, order, GROUP_INDEX_STEP)
            .or_else(|| self.group_index_forward(pol, order, GROUP_INDEX_STEP))
            .unwrap_or(n_eff);
        Some(GuidedMode {
            pol,
            order,
            n_eff,
            beta: n_eff * ctx.k,
            h: h * ctx.k,
            kappa2: kappa2 * ctx.k,
            kappa3: kappa3 * ctx.k,
            n_group,
            marginal: kappa_hi * self.d < MARGINAL_THRESHOLD,
            n_eff_bracket: bracket,
        })
    }
}

/// Phase-form residual `F_ν(n_eff)`; decreases as `n_eff` increases.
///
/// Defined on the closed interval `[max(n2, n3), n1]` by continuity; values
/// outside it are a domain error.
pub fn dispersion_residual(
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    pol: Polarization,
    order: usize,
    n_eff: f64,
) -> Result<f64> {
    stack.ensure_guiding().map_err(|e| Error::Domain(e.to_string()))?;
    let n_hi = stack.n_hi();
    if !(n_hi..=stack.n1).contains(&n_eff) {
        return Err(Error::Domain(format!(
            "n_eff = {n_eff} outside the guiding interval [{n_hi}, {}]",
            stack.n1
        )));
    }
    let slab = Slab::new(stack, ctx);
    let h = ((slab.n1 - n_eff) * (slab.n1 + n_eff)).sqrt();
    let kappa = |nj: f64| ((n_eff - nj) * (n_eff + nj)).sqrt();
    Ok(h * slab.d
        - (pol.weight(slab.n1, slab.n2) * kappa(slab.n2)).atan2(h)
        - (pol.weight(slab.n1, slab.n3) * kappa(slab.n3)).atan2(h)
        - order as f64 * PI)
}

/// Number of confined modes of one polarization.
pub fn mode_count(stack: &WaveguideStack, ctx: &OpticalContext, pol: Polarization) -> Result<usize> {
    stack.ensure_guiding()?;
    Ok(Slab::new(stack, ctx).mode_count(pol))
}

/// All confined modes, TE before TM, ascending order within each.
pub fn find_guided_modes(stack: &WaveguideStack, ctx: &OpticalContext) -> Result<Vec<GuidedMode>> {
    stack.ensure_guiding()?;
    let slab = Slab::new(stack, ctx);
    let mut modes = Vec::new();
    for pol in Polarization::ALL {
        for order in 0..slab.mode_count(pol) {
            let mode = slab.build_mode(ctx, pol, order).ok_or_else(|| {
                Error::Convergence(format!("{pol}{order} counted but not bracketed"))
            })?;
            modes.push(mode);
        }
    }
    Ok(modes)
}

/// Minimum film thickness (meters) at which mode `(pol, order)` is confined.
///
/// At birth `n_eff` equals the higher cladding index, which zeroes the
/// birth-side arctangent and leaves a closed form in the film thickness.
pub fn cutoff_thickness(
    n1: f64,
    n2: f64,
    n3: f64,
    ctx: &OpticalContext,
    pol: Polarization,
    order: usize,
) -> Result<f64> {
    // Thickness is irrelevant to the check; use the wavelength as a placeholder.
    WaveguideStack::new(n1, n2, n3, ctx.lambda0)?.ensure_guiding()?;
    let n_hi = n2.max(n3);
    let n_lo = n2.min(n3);
    let h = ((n1 - n_hi) * (n1 + n_hi)).sqrt();
    let kappa_lo = ((n_hi - n_lo) * (n_hi + n_lo)).sqrt();
    let phase = order as f64 * PI + (pol.weight(n1, n_lo) * kappa_lo / h).atan();
    Ok(phase / (ctx.k * h))
}

/// Decay constants `(κ₂, κ₃) = k√(n_eff² − n_j²)` in 1/m.
pub fn evanescent_constants(
    mode: &GuidedMode,
    stack: &WaveguideStack,
    ctx: &OpticalContext,
) -> Result<(f64, f64)> {
    let kappa = |nj: f64, side: &str| {
        if mode.n_eff < nj {
            Err(Error::Domain(format!(
                "n_eff = {} below {side} index {nj}: mode not confined there",
                mode.n_eff
            )))
        } else {
            Ok(ctx.k * ((mode.n_eff - nj) * (mode.n_eff + nj)).sqrt())
        }
    };
    Ok((kappa(stack.n2, "substrate")?, kappa(stack.n3, "cover")?))
}

/// Group index `dβ/dk` by centered finite difference in `k`.
///
/// The step `δ = 1e-6` is checked against `δ/2`; a mode that disappears at
/// `k(1 − δ)` is reported as being at cutoff.
pub fn group_index(stack: &WaveguideStack, ctx: &OpticalContext, mode: &GuidedMode) -> Result<f64> {
    stack.ensure_guiding()?;
    let slab = Slab::new(stack, ctx);
    let cutoff = || Error::Cutoff {
        pol: mode.pol,
        order: mode.order,
    };
    let coarse = slab
        .group_index_fd(mode.pol, mode.order, GROUP_INDEX_STEP)
        .ok_or_else(cutoff)?;
    let fine = slab
        .group_index_fd(mode.pol, mode.order, 0.5 * GROUP_INDEX_STEP)
        .ok_or_else(cutoff)?;
    if (coarse - fine).abs() > 1e-6 * fine.abs() {
        return Err(Error::Convergence(format!(
            "group index of {} not converged under step halving ({coarse} vs {fine})",
            mode.id()
        )));
    }
    Ok(coarse)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> OpticalContext {
        OpticalContext::from_nm(780.0).unwrap()
    }

    fn ta2o5() -> WaveguideStack {
        WaveguideStack::from_nm(2.2, 1.45, 1.0, 400.0).unwrap()
    }

    #[test]
    fn wavenumber_matches_wavelength() {
        let c = ctx();
        assert!((c.k * c.lambda0 - TAU).abs() <= 4.0 * f64::EPSILON * TAU);
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(WaveguideStack::new(2.0, 1.0, 1.0, 0.0).is_err());
        assert!(WaveguideStack::new(2.0, 0.5, 1.0, 1e-7).is_err());
        assert!(WaveguideStack::new(f64::NAN, 1.0, 1.0, 1e-7).is_err());
        assert!(OpticalContext::new(-1.0).is_err());
    }

    #[test]
    fn non_guiding_names_inequality() {
        let s = WaveguideStack::from_nm(1.4, 1.45, 1.0, 400.0).unwrap();
        let err = find_guided_modes(&s, &ctx()).unwrap_err();
        assert!(err.to_string().contains("n1 > n2"), "{err}");
        let s = WaveguideStack::from_nm(1.4, 1.0, 1.5, 400.0).unwrap();
        let err = find_guided_modes(&s, &ctx()).unwrap_err();
        assert!(err.to_string().contains("n1 > n3"), "{err}");
    }

    #[test]
    fn degenerate_film_residual_is_domain_error() {
        let s = WaveguideStack::from_nm(1.5, 1.5, 1.5, 400.0).unwrap();
        for n in [1.0, 1.5, 2.0] {
            assert!(matches!(
                dispersion_residual(&s, &ctx(), Polarization::TE, 0, n),
                Err(Error::Domain(_))
            ));
        }
    }

    #[test]
    fn residual_outside_interval_is_domain_error() {
        let s = ta2o5();
        assert!(dispersion_residual(&s, &ctx(), Polarization::TE, 0, 1.4).is_err());
        assert!(dispersion_residual(&s, &ctx(), Polarization::TE, 0, 2.3).is_err());
    }

    #[test]
    fn residual_at_tm1_cutoff_vanishes() {
        let c = ctx();
        let d = cutoff_thickness(2.0, 1.0, 1.0, &c, Polarization::TM, 1).unwrap();
        let s = WaveguideStack::new(2.0, 1.0, 1.0, d).unwrap();
        let r = dispersion_residual(&s, &c, Polarization::TM, 1, 1.0).unwrap();
        assert!(r.abs() < 1e-6, "{r}");
    }

    #[test]
    fn residual_single_sign_change_per_order() {
        // Dense scan in n_eff: exactly one sign change for each confined order.
        let s = ta2o5();
        let c = ctx();
        for pol in Polarization::ALL {
            for order in 0..2 {
                let n = 10_000;
                let mut changes = 0;
                let mut prev = None;
                for i in 1..n {
                    let x = 1.45 + (2.2 - 1.45) * i as f64 / n as f64;
                    let v = dispersion_residual(&s, &c, pol, order, x).unwrap();
                    if let Some(p) = prev {
                        if (p > 0.0) != (v > 0.0) {
                            changes += 1;
                        }
                    }
                    prev = Some(v);
                }
                assert_eq!(changes, 1, "{pol}{order}");
            }
        }
    }

    #[test]
    fn ta2o5_census_and_ordering() {
        let modes = find_guided_modes(&ta2o5(), &ctx()).unwrap();
        let ids: Vec<String> = modes.iter().map(|m| m.id().to_string()).collect();
        assert_eq!(ids, ["TE0", "TE1", "TM0", "TM1"]);
        for pair in modes.windows(2) {
            if pair[0].pol == pair[1].pol {
                assert!(pair[0].n_eff > pair[1].n_eff);
                assert!(pair[0].kappa2 > pair[1].kappa2);
                assert!(pair[0].kappa3 > pair[1].kappa3);
            }
        }
        for m in &modes {
            assert!(m.n_eff > 1.45 && m.n_eff < 2.2);
            assert!(m.n_group >= m.n_eff);
            assert!(m.n_eff_bracket[1] - m.n_eff_bracket[0] <= 1e-12);
            assert!(!m.marginal);
        }
    }

    #[test]
    fn thin_symmetric_film_keeps_fundamental_modes() {
        let s = WaveguideStack::from_nm(2.0, 1.0, 1.0, 10.0).unwrap();
        let modes = find_guided_modes(&s, &ctx()).unwrap();
        let ids: Vec<String> = modes.iter().map(|m| m.id().to_string()).collect();
        assert_eq!(ids, ["TE0", "TM0"]);
    }

    #[test]
    fn marginal_tm1_just_above_birth() {
        let c = ctx();
        let d = cutoff_thickness(2.0, 1.0, 1.0, &c, Polarization::TM, 1).unwrap();
        let s = WaveguideStack::new(2.0, 1.0, 1.0, d * (1.0 + 1e-11)).unwrap();
        let modes = find_guided_modes(&s, &c).unwrap();
        let tm1 = modes
            .iter()
            .find(|m| m.pol == Polarization::TM && m.order == 1)
            .expect("TM1 present");
        assert!(tm1.marginal);
        assert!(tm1.n_eff - 1.0 < 1e-12);
        assert!(tm1.kappa2 > 0.0 && tm1.kappa2 / c.k < 1e-9);
        assert!(modes.iter().any(|m| m.pol == Polarization::TM && m.order == 0));
    }

    #[test]
    fn cutoff_examples() {
        let c = ctx();
        let d = cutoff_thickness(2.0, 1.0, 1.0, &c, Polarization::TM, 1).unwrap();
        assert!((d - 780e-9 / (2.0 * 3f64.sqrt())).abs() < 1e-18);
        for pol in Polarization::ALL {
            assert_eq!(cutoff_thickness(1.9, 1.3, 1.3, &c, pol, 0).unwrap(), 0.0);
        }
        assert!(cutoff_thickness(1.0, 1.0, 1.0, &c, Polarization::TE, 0).is_err());
    }

    #[test]
    fn asymmetric_te0_cutoff_matches_count_bisection() {
        // Oracle: bisection on the mode count as a function of thickness.
        let c = ctx();
        let dc = cutoff_thickness(2.2, 1.45, 1.0, &c, Polarization::TE, 0).unwrap();
        assert!(dc > 0.0);
        let count = |d: f64| {
            let s = WaveguideStack::new(2.2, 1.45, 1.0, d).unwrap();
            mode_count(&s, &c, Polarization::TE).unwrap()
        };
        let (mut lo, mut hi) = (1e-12, 400e-9);
        assert_eq!(count(lo), 0);
        assert!(count(hi) > 0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if count(mid) > 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((hi - dc).abs() < 1e-9 * dc, "{hi} vs {dc}");
    }

    #[test]
    fn cutoff_brackets_existence() {
        let c = ctx();
        for (n1, n2, n3) in [(2.0, 1.0, 1.0), (2.2, 1.45, 1.0), (1.8, 1.33, 1.5)] {
            for pol in Polarization::ALL {
                for order in 1..4 {
                    let dc = cutoff_thickness(n1, n2, n3, &c, pol, order).unwrap();
                    let above = WaveguideStack::new(n1, n2, n3, dc * (1.0 + 1e-4)).unwrap();
                    let below = WaveguideStack::new(n1, n2, n3, dc * (1.0 - 1e-4)).unwrap();
                    assert_eq!(mode_count(&above, &c, pol).unwrap(), order + 1);
                    assert_eq!(mode_count(&below, &c, pol).unwrap(), order);
                }
            }
        }
    }

    #[test]
    fn evanescent_constant_edge_values() {
        let s = ta2o5();
        let c = ctx();
        let mut m = find_guided_modes(&s, &c).unwrap()[0];
        let (k2, k3) = evanescent_constants(&m, &s, &c).unwrap();
        assert!((k2 - m.kappa2).abs() <= 1e-12 * m.kappa2);
        assert!((k3 - m.kappa3).abs() <= 1e-12 * m.kappa3);

        m.n_eff = 1.45;
        assert_eq!(evanescent_constants(&m, &s, &c).unwrap().0, 0.0);
        m.n_eff = 2.2;
        let (_, k3) = evanescent_constants(&m, &s, &c).unwrap();
        assert_eq!(k3, c.k * ((2.2f64 - 1.0) * (2.2 + 1.0)).sqrt());
        m.n_eff = 1.2;
        assert!(evanescent_constants(&m, &s, &c).is_err());
    }

    #[test]
    fn thick_film_group_index_tends_to_bulk() {
        let s = WaveguideStack::from_nm(2.0, 1.0, 1.0, 50_000.0).unwrap();
        let c = ctx();
        let te0 = find_guided_modes(&s, &c).unwrap()[0];
        let ng = group_index(&s, &c, &te0).unwrap();
        assert!((ng - 2.0).abs() < 0.02 * 2.0, "{ng}");
    }

    #[test]
    fn group_index_step_halving() {
        let s = ta2o5();
        let c = ctx();
        let slab = Slab::new(&s, &c);
        for m in find_guided_modes(&s, &c).unwrap() {
            let a = slab.group_index_fd(m.pol, m.order, GROUP_INDEX_STEP).unwrap();
            let b = slab.group_index_fd(m.pol, m.order, 0.5 * GROUP_INDEX_STEP).unwrap();
            assert!((a - b).abs() < 1e-8 * b, "{}: {a} vs {b}", m.id());
            assert_eq!(group_index(&s, &c, &m).unwrap(), m.n_group);
        }
    }

    #[test]
    fn group_index_fails_at_cutoff() {
        let c = ctx();
        let d = cutoff_thickness(2.0, 1.0, 1.0, &c, Polarization::TM, 1).unwrap();
        let s = WaveguideStack::new(2.0, 1.0, 1.0, d * (1.0 + 1e-8)).unwrap();
        let tm1 = find_guided_modes(&s, &c)
            .unwrap()
            .into_iter()
            .find(|m| m.id().to_string() == "TM1")
            .unwrap();
        assert!(matches!(group_index(&s, &c, &tm1), Err(Error::Cutoff { .. })));
        // The stored value falls back to a one-sided difference.
        assert!(tm1.n_group >= tm1.n_eff);
    }

    #[test]
    fn azimuth_wraps() {
        assert!((PropagationDirection::new(-0.5 * PI).phi() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(PropagationDirection::new(TAU).phi(), 0.0);
    }
}
