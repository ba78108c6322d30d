//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

// Nodes and weights are quoted from the standard tables.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const ROUNDOFF_ULPS: f64 = 100.0;

/// Stopping rule: stop once the error estimate is below `max(abs, rel·|I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    /// Cap on the number of panels before giving up.
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-10,
            abs: 1e-14,
            max_panels: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    // ∫|f| on the panel, used for the roundoff floor.
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties broken by position so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut m = WGK[7] * fc.abs();
    for i in 0..7 {
        let dx = half * XGK[i];
        let (fl, fr) = (f(center - dx), f(center + dx));
        let pair = fl + fr;
        k += WGK[i] * pair;
        m += WGK[i] * (fl.abs() + fr.abs());
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: k * half,
        error: ((k - g) * half).abs(),
        magnitude: m * half.abs(),
    }
}

/// Integrates `f` over `[a, b]`, bisecting the worst panel until converged.
///
/// Panels are always refined in the same order, so results are bit-identical
/// across runs.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    let mut magnitude = first.magnitude;
    heap.push(first);
    loop {
        if !value.is_finite() {
            return Err(Error::Convergence(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        // Below ~100 ulp of ∫|f| the estimate is rounding noise, not truncation.
        let floor = ROUNDOFF_ULPS * f64::EPSILON * magnitude;
        if error <= tol.abs.max(tol.rel * value.abs()).max(floor) {
            break;
        }
        if heap.len() >= tol.max_panels {
            return Err(Error::Convergence(format!(
                "quadrature on [{a}, {b}] stalled at error {error:e} after {} panels",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further; accept what we have.
            heap.push(worst);
            break;
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        magnitude += left.magnitude + right.magnitude - worst.magnitude;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum in position order so rounding does not depend on refinement history.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    Ok(Estimate {
        value: panels.iter().map(|p| p.value).sum(),
        error: panels.iter().map(|p| p.error).sum(),
        panels: panels.len(),
    })
}

/// Sums [`integrate`] over consecutive breakpoints, skipping empty pieces.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: Tolerance) -> Result<f64> {
    let mut total = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            total += integrate(&f, w[0], w[1], tol)?.value;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let est = integrate(|x| x.powi(9) - 3.0 * x * x, -1.0, 2.0, Tolerance::default()).unwrap();
        let exact = (2f64.powi(10) - 1.0) / 10.0 - (8.0 + 1.0);
        assert!((est.value - exact).abs() < 1e-12);
        assert_eq!(est.panels, 1);
    }

    #[test]
    fn inverse_sqrt_endpoint() {
        let est = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((est.value - 2.0).abs() < 1e-8, "{}", est.value);
    }

    #[test]
    fn oscillatory() {
        let est = integrate(|x| (20.0 * x).cos(), 0.0, 3.0, Tolerance::default()).unwrap();
        assert!((est.value - (60f64).sin() / 20.0).abs() < 1e-12);
    }

    #[test]
    fn nan_is_reported() {
        assert!(integrate(|_| f64::NAN, 0.0, 1.0, Tolerance::default()).is_err());
    }

    #[test]
    fn pieces_skip_empty() {
        let v = integrate_pieces(|x| x, &[0.0, 1.0, 1.0, 2.0], Tolerance::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
    }
}
