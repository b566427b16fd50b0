use thiserror::Error;

use crate::numerics::C64;

/// Failure classes shared by every module.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("z = {z} lies on the essential spectrum [0, inf)")]
    Domain { z: C64 },

    #[error("matrix is singular to tolerance (pivot {pivot:.3e}, threshold {threshold:.3e}); z is close to the spectrum")]
    Singular { pivot: f64, threshold: f64 },

    #[error("ODE step size underflow at x = {x} (h = {step:.3e})")]
    Stiffness { x: f64, step: f64 },

    #[error("potential tail bound {tail:.3e} exceeds budget; try x_max >= {suggested_x_max}")]
    Truncation { tail: f64, suggested_x_max: f64 },

    #[error("{what} vanishes (|value| = {magnitude:.3e}); z is at or near an eigenvalue")]
    Pole { what: &'static str, magnitude: f64 },

    #[error("no convergence after {} levels (last change {error:.3e})", values.len())]
    Convergence { values: Vec<C64>, error: f64 },

    #[error("angular mode {0} outside the supported range |ell| <= 512")]
    ModeRange(i64),

    #[error("mode ell = {ell} failed: {source}")]
    Mode {
        ell: i64,
        #[source]
        source: Box<Error>,
    },

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// True when the failure signals proximity of z to some spectrum.
    pub fn is_spectral(&self) -> bool {
        match self {
            Error::Singular { .. } | Error::Pole { .. } => true,
            Error::Mode { source, .. } => source.is_spectral(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(value: C64, context: &'static str) -> Result<C64> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(context))
    }
}
