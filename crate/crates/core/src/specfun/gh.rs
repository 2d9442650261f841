//! Meijer-G and Fox-H front ends over the Mellin–Barnes evaluator.
//!
//! Both use the x^s orientation of the defining contour integral:
//!
//! ```text
//! G^{m,n}_{p,q}(x) = (1/2πi) ∫ [Π_{j≤m} Γ(b_j − s) Π_{i≤n} Γ(1 − a_i + s)]
//!                  / [Π_{j>m} Γ(1 − b_j + s) Π_{i>n} Γ(a_i − s)] x^s ds
//! ```
//!
//! with Fox-H attaching a positive slope to every parameter pair.

use super::{mellin_eval, EvalOptions, GammaFactor, MellinEval, MellinIntegrand, SpecFunError};

/// Assemble the canonical integrand shared by [`meijer_g`] and [`fox_h`].
/// Parameter pairs are (coefficient, slope); slopes must be positive.
pub(crate) fn gh_integrand(
    m: usize,
    n: usize,
    pairs_a: &[(f64, f64)],
    pairs_b: &[(f64, f64)],
) -> Result<MellinIntegrand, SpecFunError> {
    let p = pairs_a.len();
    let q = pairs_b.len();
    if m > q || n > p {
        return Err(SpecFunError::ShapeMismatch(format!(
            "require m <= q and n <= p, got m={m}, n={n}, p={p}, q={q}"
        )));
    }
    for &(_, slope) in pairs_a.iter().chain(pairs_b.iter()) {
        if !(slope > 0.0) {
            return Err(SpecFunError::ShapeMismatch(
                "parameter slopes must be positive in the canonical orientation".into(),
            ));
        }
    }
    let mut factors = Vec::with_capacity(p + q);
    for &(b, slope) in &pairs_b[..m] {
        factors.push(GammaFactor::num(b, -slope));
    }
    for &(a, slope) in &pairs_a[..n] {
        factors.push(GammaFactor::num(1.0 - a, slope));
    }
    for &(b, slope) in &pairs_b[m..] {
        factors.push(GammaFactor::den(1.0 - b, slope));
    }
    for &(a, slope) in &pairs_a[n..] {
        factors.push(GammaFactor::den(a, -slope));
    }
    MellinIntegrand::new(factors, 1.0, 1.0)
}

/// Meijer-G function G^{m,n}_{p,q}[x | a; b] for positive real x.
pub fn meijer_g(
    m: usize,
    n: usize,
    a: &[f64],
    b: &[f64],
    x: f64,
    opts: &EvalOptions,
) -> Result<MellinEval, SpecFunError> {
    let pairs_a: Vec<(f64, f64)> = a.iter().map(|&v| (v, 1.0)).collect();
    let pairs_b: Vec<(f64, f64)> = b.iter().map(|&v| (v, 1.0)).collect();
    let integrand = gh_integrand(m, n, &pairs_a, &pairs_b)?;
    mellin_eval(&integrand, x, opts)
}

/// Fox-H function H^{m,n}_{p,q}[x | (a,A); (b,B)] for positive real x.
pub fn fox_h(
    m: usize,
    n: usize,
    pairs_a: &[(f64, f64)],
    pairs_b: &[(f64, f64)],
    x: f64,
    opts: &EvalOptions,
) -> Result<MellinEval, SpecFunError> {
    let integrand = gh_integrand(m, n, pairs_a, pairs_b)?;
    mellin_eval(&integrand, x, opts)
}
