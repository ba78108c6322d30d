use thiserror::Error;

use crate::mode_solver::Polarization;

/// Errors produced by the solver, field, and emission routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The stack does not confine light: the film index must exceed both claddings.
    #[error("stack is not guiding: {0}")]
    NotGuiding(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested mode does not exist at a perturbed wavenumber.
    #[error("{pol}{order} is at cutoff and vanishes under a perturbation of k")]
    Cutoff { pol: Polarization, order: usize },

    /// The mode sits at its birth, where the evanescent tail is unbounded.
    #[error("{pol}{order} is divergent at birth (effective thickness unbounded)")]
    DivergentAtBirth { pol: Polarization, order: usize },

    /// No confined mode exists anywhere in the requested search range.
    #[error("no confined modes in the requested range")]
    NoModes,

    /// A numerical routine failed to reach its tolerance.
    #[error("numerical convergence failure: {0}")]
    Convergence(String),
}

impl Error {
    /// `true` for errors that stem from the numerics rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
