//! Transverse electric-field profiles of guided modes and their normalization.
//!
//! Each profile is built from a scalar "potential" `P(z)`: `E_y` for TE and
//! `H_y` for TM. Inside the film it is `cos(hz) + c·sin(hz)`, outside it
//! decays as `e^{−κ₃z}` (cover) and `e^{κ₂(z+d)}` (substrate). For TM the
//! electric components follow from Maxwell's equations,
//!
//! ```text
//! E_x ∝ i·P'(z)/n²,   E_z ∝ β·P(z)/n²,
//! ```
//!
//! so `E_x` and `E_z` are a quarter period apart and `n²E_z` is continuous.
//!
//! The global phase puts the reference component (`E_y` for TE, `E_z` for
//! TM) real and equal to one at `z = 0⁺`. Normalization divides by the mode
//! energy `N = ∫ε_r|E|²dz`, which makes the modes delta-normalized on the
//! in-plane wavevector continuum. With the group index this energy splits as
//!
//! ```text
//! N = n_eff · n_group · (peak²/2) · d_eff
//! ```
//!
//! where `peak` is the film amplitude of `E_y` (TE) or of `H_y/n₁` (TM) and
//! `d_eff` is the classic effective thickness. For TE, `d_eff = d + 1/κ₂ + 1/κ₃`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mode_solver::{GuidedMode, OpticalContext, Polarization, WaveguideStack};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// `z ≥ 0`, where the emitter sits.
    Cover,
    /// `−d ≤ z < 0`.
    Film,
    /// `z < −d`.
    Substrate,
}

/// Electric field of a mode propagating along `+x`, at height `z` (meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub z: f64,
    pub ex: Complex64,
    pub ey: Complex64,
    pub ez: Complex64,
    pub region: Region,
}

impl FieldSample {
    pub fn intensity(&self) -> f64 {
        self.ex.norm_sqr() + self.ey.norm_sqr() + self.ez.norm_sqr()
    }

    fn scaled(mut self, a: f64) -> Self {
        self.ex *= a;
        self.ey *= a;
        self.ez *= a;
        self
    }
}

/// A mode profile with its normalization constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedProfile {
    pub mode: GuidedMode,
    stack: WaveguideStack,
    ctx: OpticalContext,
    /// Field amplitude at `z = 0⁺` of the delta-normalized mode (1/√m).
    pub a: f64,
    /// Effective thickness in meters.
    pub d_eff: f64,
    /// `∫ε_r|E|²dz` of the unit-reference profile, in meters.
    pub energy: f64,
    /// The mode sits at its birth; `a` is tiny and `d_eff` huge but finite.
    pub marginal: bool,
}

impl NormalizedProfile {
    /// Normalized field at height `z` (meters).
    pub fn field(&self, z: f64) -> FieldSample {
        field_profile(&self.mode, &self.stack, &self.ctx, z).scaled(self.a)
    }
}

/// Dimensionless profile; lengths in units of `1/k`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Profile {
    pol: Polarization,
    n1: f64,
    n2: f64,
    n3: f64,
    d: f64,
    beta: f64,
    h: f64,
    kappa2: f64,
    kappa3: f64,
    /// Coefficient of `sin(hz)` in the film.
    c: f64,
}

impl Profile {
    pub fn new(mode: &GuidedMode, stack: &WaveguideStack, ctx: &OpticalContext) -> Self {
        let k = ctx.k;
        let h = mode.h / k;
        let kappa3 = mode.kappa3 / k;
        let w3 = match mode.pol {
            Polarization::TE => 1.0,
            Polarization::TM => (stack.n1 * stack.n1) / (stack.n3 * stack.n3),
        };
        Profile {
            pol: mode.pol,
            n1: stack.n1,
            n2: stack.n2,
            n3: stack.n3,
            d: stack.d * k,
            beta: mode.n_eff,
            h,
            kappa2: mode.kappa2 / k,
            kappa3,
            c: -w3 * kappa3 / h,
        }
    }

    fn region(&self, z: f64) -> Region {
        if z >= 0.0 {
            Region::Cover
        } else if z >= -self.d {
            Region::Film
        } else {
            Region::Substrate
        }
    }

    fn index(&self, region: Region) -> f64 {
        match region {
            Region::Cover => self.n3,
            Region::Film => self.n1,
            Region::Substrate => self.n2,
        }
    }

    fn film(&self, z: f64) -> (f64, f64) {
        let (s, c) = (self.h * z).sin_cos();
        (c + self.c * s, self.h * (self.c * c - s))
    }

    /// Potential and its derivative.
    #[cfg(test)]
    fn potential(&self, z: f64) -> (f64, f64) {
        self.potential_in(self.region(z), z)
    }

    /// Potential from one region's formula, evaluated at any `z`.
    fn potential_in(&self, region: Region, z: f64) -> (f64, f64) {
        match region {
            Region::Cover => {
                let p = (-self.kappa3 * z).exp();
                (p, -self.kappa3 * p)
            }
            Region::Film => self.film(z),
            Region::Substrate => {
                let (pd, _) = self.film(-self.d);
                let p = pd * (self.kappa2 * (z + self.d)).exp();
                (p, self.kappa2 * p)
            }
        }
    }

    /// Rescales TM fields so that `E_z(0⁺) = 1`.
    fn tm_scale(&self) -> f64 {
        self.n3 * self.n3 / self.beta
    }

    /// Field with the reference component equal to one at `z = 0⁺`.
    pub fn sample(&self, z: f64) -> (Region, Complex64, Complex64, Complex64) {
        self.sample_in(self.region(z), z)
    }

    fn sample_in(&self, region: Region, z: f64) -> (Region, Complex64, Complex64, Complex64) {
        let (p, dp) = self.potential_in(region, z);
        let zero = Complex64::new(0.0, 0.0);
        match self.pol {
            Polarization::TE => (region, zero, Complex64::new(p, 0.0), zero),
            Polarization::TM => {
                let n = self.index(region);
                let s = self.tm_scale() / (n * n);
                (
                    region,
                    Complex64::new(0.0, dp * s),
                    zero,
                    Complex64::new(self.beta * p * s, 0.0),
                )
            }
        }
    }

    /// `∫ε_r|E|²dz` of the unit-reference profile, piecewise in closed form.
    pub fn energy(&self) -> f64 {
        let (p2, dp2) = self.potential_moments();
        match self.pol {
            Polarization::TE => {
                self.n3 * self.n3 * p2[0] + self.n1 * self.n1 * p2[1] + self.n2 * self.n2 * p2[2]
            }
            Polarization::TM => {
                let b2 = self.beta * self.beta;
                let weighted = (dp2[0] + b2 * p2[0]) / (self.n3 * self.n3)
                    + (dp2[1] + b2 * p2[1]) / (self.n1 * self.n1)
                    + (dp2[2] + b2 * p2[2]) / (self.n2 * self.n2);
                weighted * self.tm_scale().powi(2)
            }
        }
    }

    /// `energy / (n_eff·n_group)`: `∫E_y²` for TE, `∫H_y²/n²` (E_z-scaled) for TM.
    /// Needs no group index, so it is free of finite-difference noise.
    pub fn transverse_norm(&self) -> f64 {
        let (p2, _) = self.potential_moments();
        match self.pol {
            Polarization::TE => p2[0] + p2[1] + p2[2],
            Polarization::TM => {
                let weighted =
                    p2[0] / (self.n3 * self.n3) + p2[1] / (self.n1 * self.n1) + p2[2] / (self.n2 * self.n2);
                weighted * self.tm_scale().powi(2)
            }
        }
    }

    /// Effective thickness in units of `1/k`.
    pub fn effective_thickness(&self) -> f64 {
        let (p2, _) = self.potential_moments();
        let peak2 = 1.0 + self.c * self.c;
        match self.pol {
            Polarization::TE => (p2[0] + p2[1] + p2[2]) / (0.5 * peak2),
            Polarization::TM => {
                let n1sq = self.n1 * self.n1;
                let weighted =
                    p2[0] / (self.n3 * self.n3) + p2[1] / n1sq + p2[2] / (self.n2 * self.n2);
                weighted / (0.5 * peak2 / n1sq)
            }
        }
    }

    /// `∫P²` and `∫P'²` over cover, film and substrate.
    fn potential_moments(&self) -> ([f64; 3], [f64; 3]) {
        let (d, h, c) = (self.d, self.h, self.c);
        let (s2, _) = (2.0 * h * d).sin_cos();
        let sin_hd = (h * d).sin();
        let i_cc = 0.5 * d + s2 / (4.0 * h);
        let i_ss = 0.5 * d - s2 / (4.0 * h);
        let i_sc = -sin_hd * sin_hd / (2.0 * h);
        let film_p2 = i_cc + 2.0 * c * i_sc + c * c * i_ss;
        let film_dp2 = h * h * (i_ss - 2.0 * c * i_sc + c * c * i_cc);
        let (pd, _) = self.film(-d);
        let pd2 = pd * pd;
        (
            [
                0.5 / self.kappa3,
                film_p2,
                pd2 * 0.5 / self.kappa2,
            ],
            [
                0.5 * self.kappa3,
                film_dp2,
                pd2 * 0.5 * self.kappa2,
            ],
        )
    }
}

/// Unnormalized field of `mode` at height `z` (meters), reference component
/// equal to one at `z = 0⁺`. Height zero belongs to the cover.
pub fn field_profile(
    mode: &GuidedMode,
    stack: &WaveguideStack,
    ctx: &OpticalContext,
    z: f64,
) -> FieldSample {
    let (region, ex, ey, ez) = Profile::new(mode, stack, ctx).sample(z * ctx.k);
    FieldSample {
        z,
        ex,
        ey,
        ez,
        region,
    }
}

/// Effective thickness in meters. Fails for a mode at its birth.
pub fn effective_thickness(
    mode: &GuidedMode,
    stack: &WaveguideStack,
    ctx: &OpticalContext,
) -> Result<f64> {
    if mode.marginal {
        return Err(Error::DivergentAtBirth {
            pol: mode.pol,
            order: mode.order,
        });
    }
    Ok(Profile::new(mode, stack, ctx).effective_thickness() / ctx.k)
}

/// Fixes the amplitude `A` that delta-normalizes the mode on `(k_x, k_y)`.
pub fn normalization_constant(
    mode: &GuidedMode,
    stack: &WaveguideStack,
    ctx: &OpticalContext,
) -> NormalizedProfile {
    let profile = Profile::new(mode, stack, ctx);
    let energy = profile.energy() / ctx.k;
    NormalizedProfile {
        mode: *mode,
        stack: *stack,
        ctx: *ctx,
        a: energy.sqrt().recip(),
        d_eff: profile.effective_thickness() / ctx.k,
        energy,
        marginal: mode.marginal,
    }
}
