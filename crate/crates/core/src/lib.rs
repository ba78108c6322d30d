//! Spontaneous emission of an excited dipole into the guided modes of a
//! planar three-layer dielectric waveguide.
//!
//! The crate solves the confined TE/TM modes of the slab, builds their
//! normalized field profiles, and computes per-mode emission rates, the total
//! (surface-enhanced) decay rate, and the resulting branching ratios. All
//! rates are reported relative to the vacuum rate, so the dipole strength
//! never enters.
//!
//! ```
//! use wgemit_core::{branching_ratio, DipoleEmitter, OpticalContext, Orientation, WaveguideStack};
//!
//! let stack = WaveguideStack::from_nm(2.2, 1.45, 1.0, 400.0)?;
//! let ctx = OpticalContext::from_nm(780.0)?;
//! let emitter = DipoleEmitter::new(Orientation::parallel(), 0.0)?;
//! let report = branching_ratio(&stack, &ctx, &emitter)?;
//! assert_eq!(report.per_mode.len(), 4);
//! assert!(report.guided_sum > 0.4 && report.guided_sum < 0.6);
//! # Ok::<(), wgemit_core::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod emission;
pub mod error;
pub mod experiments;
pub mod mode_fields;
pub mod mode_solver;
pub mod quadrature;

pub use emission::{
    branching_ratio, guided_rate, guided_rate_via_residue, reflection_coefficients, total_rate,
    DipoleEmitter, EmissionOptions, EmissionReport, ModeRate, Orientation, StackReflection,
};
pub use error::{Error, Result};
pub use mode_fields::{
    effective_thickness, field_profile, normalization_constant, FieldSample, NormalizedProfile, Region,
};
pub use mode_solver::{
    cutoff_thickness, dispersion_residual, evanescent_constants, find_guided_modes, group_index,
    GuidedMode, ModeId, OpticalContext, Polarization, PropagationDirection, WaveguideStack,
};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
