//! Fixtures shared by the benchmarks.

use wgemit_core::{DipoleEmitter, OpticalContext, Orientation, WaveguideStack};

/// 400 nm Ta₂O₅ on silica under vacuum at 780 nm.
pub fn ta2o5() -> (WaveguideStack, OpticalContext) {
    (
        WaveguideStack::from_nm(2.2, 1.45, 1.0, 400.0).expect("valid stack"),
        OpticalContext::from_nm(780.0).expect("valid wavelength"),
    )
}

/// Free-standing n = 2 film of thickness `d_nm` at 780 nm.
pub fn symmetric(d_nm: f64) -> (WaveguideStack, OpticalContext) {
    (
        WaveguideStack::from_nm(2.0, 1.0, 1.0, d_nm).expect("valid stack"),
        OpticalContext::from_nm(780.0).expect("valid wavelength"),
    )
}

pub fn emitter(orientation: Orientation, z_nm: f64) -> DipoleEmitter {
    DipoleEmitter::new(orientation, z_nm * 1e-9).expect("valid height")
}
