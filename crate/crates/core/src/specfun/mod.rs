//! Numerical kernel: complex log-gamma and a generic Mellin–Barnes
//! evaluator behind every Meijer-G and Fox-H instance in the library.

mod gh;
mod log_gamma;
mod mellin;

pub use gh::{fox_h, meijer_g};
pub use log_gamma::log_gamma_complex;
pub(crate) use log_gamma::{ln_abs_gamma_signed, log_gamma_unchecked};
pub use mellin::{
    mellin_eval, EvalStrategy, GammaFactor, MellinEval, MellinIntegrand, Position,
};
pub(crate) use mellin::mellin_eval_best;

use thiserror::Error;

/// Errors raised by the special-function kernel.
#[derive(Debug, Clone, Error)]
pub enum SpecFunError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("gamma function pole at z = {at}")]
    GammaPole { at: f64 },
    #[error("parameter shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(
        "pole families are not separable by a vertical contour \
         (rightmost ascending-family pole {left_max} >= leftmost descending-family pole {right_min})"
    )]
    NoSeparatingContour { left_max: f64, right_min: f64 },
    #[error("evaluation did not reach the requested tolerance {requested:e}; achieved {achieved:e}")]
    NonConvergence { achieved: f64, requested: f64 },
}

/// Contour abscissa selection for the vertical-line quadrature strategy.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum ContourAbscissa {
    /// Midpoint of the separating strip when it is bounded, otherwise a
    /// magnitude-minimising (saddle) scan along the real axis.
    #[default]
    Auto,
    /// Pin the contour at the given real part.
    Fixed(f64),
}

/// Tuning knobs for [`mellin_eval`].
#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Target relative accuracy of the returned value.
    pub relative_tolerance: f64,
    /// Contour placement for the quadrature strategy.
    pub contour_abscissa: ContourAbscissa,
    /// Hard cap on |Im s| for the vertical-line quadrature; the tail is
    /// extended adaptively up to this height.
    pub truncation_height: f64,
    /// Budget of residue clusters for the ascending series.
    pub max_residue_terms: usize,
    /// Initial node count of the vertical-line rule (refined by halving).
    pub quadrature_nodes: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-8,
            contour_abscissa: ContourAbscissa::Auto,
            truncation_height: 1e4,
            max_residue_terms: 400,
            quadrature_nodes: 64,
        }
    }
}

impl EvalOptions {
    /// Options tightened for identity-grade checks.
    pub fn strict() -> Self {
        Self {
            relative_tolerance: 1e-12,
            ..Self::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<(), SpecFunError> {
        if !(self.relative_tolerance > 0.0) {
            return Err(SpecFunError::InvalidParameter(
                "relative_tolerance must be positive".into(),
            ));
        }
        if !(self.truncation_height > 0.0) {
            return Err(SpecFunError::InvalidParameter(
                "truncation_height must be positive".into(),
            ));
        }
        if self.quadrature_nodes < 32 {
            return Err(SpecFunError::InvalidParameter(
                "quadrature_nodes must be at least 32".into(),
            ));
        }
        if self.max_residue_terms < 8 {
            return Err(SpecFunError::InvalidParameter(
                "max_residue_terms must be at least 8".into(),
            ));
        }
        Ok(())
    }
}
