//! Reflection of plane and evanescent waves by the film-on-substrate, seen
//! from the cover.
//!
//! `u = k∥/k` is the in-plane index. The normal wavenumber in layer `j` is
//! `k_z,j = k√(n_j² − u²)` on the propagating side and `i·k√(u² − n_j²)` on
//! the evanescent side, which extends analytically off the real axis wherever
//! `Re u` stays clear of the branch point. Fresnel coefficients use the
//! convention in which `r_p` is the ratio of magnetic fields, so a perfect
//! conductor has `r_s = −1`, `r_p = +1`.

use num_complex::Complex64;

use crate::mode_solver::{OpticalContext, Slab, WaveguideStack};

/// Reflection coefficients of the stack at real in-plane index `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackReflection {
    pub u: f64,
    pub r_s: Complex64,
    pub r_p: Complex64,
}

/// Normal wavenumber in units of `k`.
pub(crate) fn kz(n: f64, u: Complex64) -> Complex64 {
    if u.re > n {
        Complex64::i() * ((u - n) * (u + n)).sqrt()
    } else {
        ((n - u) * (n + u)).sqrt()
    }
}

/// Normal wavenumber in layer `n` from the cover's, using
/// `k_z,n² = (n − n3)(n + n3) + k_z,3²` so nothing cancels near `u = n3`.
fn kz_from_cover(n: f64, n3: f64, u: Complex64, kz3: Complex64) -> Complex64 {
    let w = (n - n3) * (n + n3) + kz3 * kz3;
    if u.re > n {
        Complex64::i() * (-w).sqrt()
    } else {
        w.sqrt()
    }
}

fn fresnel(eps_a: f64, eps_b: f64, kz_a: Complex64, kz_b: Complex64) -> (Complex64, Complex64) {
    if eps_a == eps_b {
        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let rs = (kz_a - kz_b) / (kz_a + kz_b);
    let rp = (kz_a * eps_b - kz_b * eps_a) / (kz_a * eps_b + kz_b * eps_a);
    (rs, rp)
}

/// `(r_s, r_p)` at complex `u`, with the cover wavenumber `kz3` supplied by
/// the caller so that it keeps full precision near `u = n3`.
pub(crate) fn reflection(slab: &Slab, u: Complex64, kz3: Complex64) -> (Complex64, Complex64) {
    let kz1 = kz_from_cover(slab.n1, slab.n3, u, kz3);
    let kz2 = kz_from_cover(slab.n2, slab.n3, u, kz3);
    let (e1, e2, e3) = (slab.n1 * slab.n1, slab.n2 * slab.n2, slab.n3 * slab.n3);
    let (rs31, rp31) = fresnel(e3, e1, kz3, kz1);
    let (rs12, rp12) = fresnel(e1, e2, kz1, kz2);
    let phase = (Complex64::i() * 2.0 * kz1 * slab.d).exp();
    let airy = |r31: Complex64, r12: Complex64| {
        let round_trip = r12 * phase;
        (r31 + round_trip) / (1.0 + r31 * round_trip)
    };
    (airy(rs31, rs12), airy(rp31, rp12))
}

/// Two-interface (Airy) reflection coefficients at real `u ≥ 0`.
pub fn reflection_coefficients(stack: &WaveguideStack, ctx: &OpticalContext, u: f64) -> StackReflection {
    let slab = Slab::new(stack, ctx);
    let uc = Complex64::new(u, 0.0);
    let (r_s, r_p) = reflection(&slab, uc, kz(slab.n3, uc));
    StackReflection { u, r_s, r_p }
}
