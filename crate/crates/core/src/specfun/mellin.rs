//! Generic Mellin–Barnes evaluator.
//!
//! An integrand is a finite product of gamma factors Γ(c + λs), each in the
//! numerator or denominator, integrated against x^{e·s} along a vertical
//! contour:
//!
//! ```text
//!     prefactor · (1/2πi) ∫ Π Γ(c_k + λ_k s)^{±1} · x^{e s} ds
//! ```
//!
//! Numerator factors with negative slope generate the ascending pole family
//! (their residues produce ascending powers of x — the small-argument
//! series); numerator factors with positive slope generate the descending
//! family on the other side of the contour. Strategies are selected
//! empirically: summation of ascending residues (coincident or nearly
//! coincident poles handled as clusters through a small circular contour),
//! the mirrored descending expansion for large arguments, and direct
//! vertical-line quadrature on the separating strip.

use num_complex::Complex64;

use super::{ln_abs_gamma_signed, log_gamma_unchecked, ContourAbscissa, EvalOptions, SpecFunError};

/// Whether a gamma factor multiplies or divides the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Numerator,
    Denominator,
}

/// One factor Γ(coefficient + slope·s) of a Mellin–Barnes integrand.
#[derive(Debug, Clone, Copy)]
pub struct GammaFactor {
    pub coefficient: f64,
    pub slope: f64,
    pub position: Position,
}

impl GammaFactor {
    pub fn num(coefficient: f64, slope: f64) -> Self {
        Self { coefficient, slope, position: Position::Numerator }
    }

    pub fn den(coefficient: f64, slope: f64) -> Self {
        Self { coefficient, slope, position: Position::Denominator }
    }

    fn is_num(&self) -> bool {
        self.position == Position::Numerator
    }
}

/// Symbolic description of a gamma-product Mellin–Barnes integrand.
#[derive(Debug, Clone)]
pub struct MellinIntegrand {
    factors: Vec<GammaFactor>,
    argument_exponent: f64,
    prefactor: f64,
}

/// Exact-coincidence tolerance for pole/zero lattice sites.
const COINCIDE_TOL: f64 = 1e-9;
/// Sites separated by less than this are absorbed into one residue cluster.
const CLUSTER_GAP: f64 = 1e-2;
/// Nodes of the circular contour used for cluster residues. The circle
/// radius never exceeds 0.45× the clearance to the nearest outside
/// singularity, so the trapezoid error ratio^N is below 1e-12 already at
/// this count.
const CIRCLE_NODES: usize = 32;
/// Absolute error floor below which a value is accepted regardless of the
/// relative target; keeps underflowed-to-zero results from being rejected.
const ABS_FLOOR: f64 = 1e-280;

impl MellinIntegrand {
    /// Build and validate an integrand. Rejects empty factor lists, zero
    /// slopes in the numerator, non-positive argument exponents, and pole
    /// families that no vertical contour can separate.
    pub fn new(
        factors: Vec<GammaFactor>,
        argument_exponent: f64,
        prefactor: f64,
    ) -> Result<Self, SpecFunError> {
        if factors.is_empty() {
            return Err(SpecFunError::InvalidParameter(
                "integrand must contain at least one gamma factor".into(),
            ));
        }
        for f in &factors {
            if !f.coefficient.is_finite() || !f.slope.is_finite() {
                return Err(SpecFunError::InvalidParameter(
                    "gamma factor parameters must be finite".into(),
                ));
            }
            if f.is_num() && f.slope == 0.0 {
                return Err(SpecFunError::InvalidParameter(
                    "numerator gamma factors must have nonzero slope".into(),
                ));
            }
        }
        if !(argument_exponent > 0.0) || !argument_exponent.is_finite() {
            return Err(SpecFunError::InvalidParameter(
                "argument exponent must be positive and finite".into(),
            ));
        }
        if !prefactor.is_finite() {
            return Err(SpecFunError::InvalidParameter("prefactor must be finite".into()));
        }
        let integrand = Self { factors, argument_exponent, prefactor };
        let (left_max, right_min) = integrand.strip();
        if left_max.is_finite() && right_min.is_finite() && left_max + COINCIDE_TOL >= right_min {
            return Err(SpecFunError::NoSeparatingContour { left_max, right_min });
        }
        Ok(integrand)
    }

    pub fn factors(&self) -> &[GammaFactor] {
        &self.factors
    }

    pub fn argument_exponent(&self) -> f64 {
        self.argument_exponent
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// Mirror image under s → −s: every slope negates and the two pole
    /// families swap roles. The descending (large-argument) expansion of
    /// an integrand is the ascending expansion of its mirror at 1/x.
    fn mirrored(&self) -> Self {
        Self {
            factors: self
                .factors
                .iter()
                .map(|f| GammaFactor { coefficient: f.coefficient, slope: -f.slope, position: f.position })
                .collect(),
            argument_exponent: self.argument_exponent,
            prefactor: self.prefactor,
        }
    }

    /// Open strip (left, right) between the descending-family poles
    /// (numerator factors with positive slope, left of the contour) and
    /// the ascending-family poles (negative slope, right of it). Either
    /// side is infinite when the family is absent.
    pub fn strip(&self) -> (f64, f64) {
        let mut left = f64::NEG_INFINITY;
        let mut right = f64::INFINITY;
        for f in self.factors.iter().filter(|f| f.is_num()) {
            if f.slope > 0.0 {
                left = left.max(-f.coefficient / f.slope);
            } else {
                right = right.min(f.coefficient / -f.slope);
            }
        }
        (left, right)
    }

    /// Σ ± logΓ(c_k + λ_k s) over all factors, on the continued branch.
    fn log_factor_sum(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for f in &self.factors {
            let lg = log_gamma_unchecked(Complex64::new(
                f.coefficient + f.slope * s.re,
                f.slope * s.im,
            ));
            if f.is_num() {
                acc += lg;
            } else {
                acc -= lg;
            }
        }
        acc
    }

    /// log|integrand·x^{eσ}| on the real axis; +inf on a pole. Drives the
    /// saddle scan for half-unbounded strips.
    fn log_magnitude_real(&self, sigma: f64, ln_x: f64) -> f64 {
        let mut acc = self.argument_exponent * sigma * ln_x;
        for f in &self.factors {
            match ln_abs_gamma_signed(f.coefficient + f.slope * sigma) {
                Ok((ln_abs, _)) => acc += if f.is_num() { ln_abs } else { -ln_abs },
                Err(_) => return f64::INFINITY,
            }
        }
        acc
    }

    /// Exponential decay rate of |integrand| in |Im s|, from Stirling:
    /// each Γ(c+λs) contributes (π/2)|λ|, denominators negatively.
    fn vertical_decay_rate(&self) -> f64 {
        let mut rate = 0.0;
        for f in &self.factors {
            let r = std::f64::consts::FRAC_PI_2 * f.slope.abs();
            rate += if f.is_num() { r } else { -r };
        }
        rate
    }

    /// Signed slope sum κ = Σ_num λ − Σ_den λ. Along the ascending
    /// direction the residue terms scale like exp(t·(e·ln x + κ·ln t)):
    /// κ < 0 gives a convergent expansion, κ > 0 an asymptotic one whose
    /// pole terms miss an exponentially small remainder ~e^{−κ·x^{−1/κ}}.
    fn signed_slope_sum(&self) -> f64 {
        let mut kappa = 0.0;
        for f in &self.factors {
            kappa += if f.is_num() { f.slope } else { -f.slope };
        }
        kappa
    }
}

/// Strategy that produced a [`MellinEval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalStrategy {
    ResidueSeries,
    ContourQuadrature,
}

/// Result of a Mellin–Barnes evaluation.
#[derive(Debug, Clone, Copy)]
pub struct MellinEval {
    pub value: f64,
    pub error_estimate: f64,
    pub strategy: EvalStrategy,
}

impl MellinEval {
    fn relative_error(&self) -> f64 {
        self.error_estimate / self.value.abs().max(f64::MIN_POSITIVE)
    }

    fn acceptable(&self, tol: f64) -> bool {
        self.error_estimate <= tol * self.value.abs() || self.error_estimate <= ABS_FLOOR
    }
}

// ---------------------------------------------------------------------------
// Ascending pole enumeration
// ---------------------------------------------------------------------------

/// A lattice site of ascending-family poles and/or denominator zeros.
#[derive(Debug, Clone)]
struct PoleSite {
    lo: f64,
    hi: f64,
    /// (factor index, lattice index k) of numerator poles at this site.
    num_members: Vec<(usize, u32)>,
    /// Denominator zeros coinciding with the site (each cancels one order).
    den_zeros: usize,
}

impl PoleSite {
    fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn net_order(&self) -> i64 {
        self.num_members.len() as i64 - self.den_zeros as i64
    }

    fn merge(&mut self, other: PoleSite) {
        self.lo = self.lo.min(other.lo);
        self.hi = self.hi.max(other.hi);
        self.num_members.extend_from_slice(&other.num_members);
        self.den_zeros += other.den_zeros;
    }
}

/// Merged ascending enumeration of poles (numerator, slope < 0) and zeros
/// (denominator, slope < 0), grouped by exact coincidence.
struct AscendingSites<'a> {
    integrand: &'a MellinIntegrand,
    /// Per negative-slope factor: (factor index, next lattice index, is numerator).
    cursors: Vec<(usize, u32, bool)>,
}

impl<'a> AscendingSites<'a> {
    fn new(integrand: &'a MellinIntegrand) -> Self {
        let cursors = integrand
            .factors
            .iter()
            .enumerate()
            .filter(|(_, f)| f.slope < 0.0)
            .map(|(i, f)| (i, 0u32, f.is_num()))
            .collect();
        Self { integrand, cursors }
    }

    fn position(&self, factor: usize, k: u32) -> f64 {
        let f = &self.integrand.factors[factor];
        (f.coefficient + k as f64) / -f.slope
    }

    fn next_site(&mut self) -> Option<PoleSite> {
        let mut best = f64::INFINITY;
        for &(fi, k, _) in &self.cursors {
            best = best.min(self.position(fi, k));
        }
        if !best.is_finite() {
            return None;
        }
        let tol = COINCIDE_TOL * best.abs().max(1.0);
        let mut site = PoleSite {
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
            num_members: Vec::new(),
            den_zeros: 0,
        };
        for cur in self.cursors.iter_mut() {
            let pos = self.integrand.factors[cur.0].coefficient + cur.1 as f64;
            let pos = pos / -self.integrand.factors[cur.0].slope;
            if pos - best <= tol {
                site.lo = site.lo.min(pos);
                site.hi = site.hi.max(pos);
                if cur.2 {
                    site.num_members.push((cur.0, cur.1));
                } else {
                    site.den_zeros += 1;
                }
                cur.1 += 1;
            }
        }
        Some(site)
    }

    /// Next site that is actually singular: exact pole/zero coincidences
    /// are removable points of the product and take no part in residue
    /// summation, clustering or clearance bookkeeping. A long run of
    /// cancelled sites means the lattice tail cancels identically (the
    /// expansion terminates), reported as stream exhaustion.
    fn next_singular_site(&mut self) -> Option<PoleSite> {
        for _ in 0..64 {
            let site = self.next_site()?;
            let exact = site.hi - site.lo < COINCIDE_TOL * site.hi.abs().max(1.0);
            if site.net_order() <= 0 && exact {
                continue;
            }
            return Some(site);
        }
        None
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Evaluate a Mellin–Barnes integrand at a positive argument.
///
/// Tries the ascending residue series first (effective in the
/// small-argument regime) and falls back to vertical-line quadrature when
/// the series does not reach the requested tolerance, returning whichever
/// achieved the smaller error estimate. Repeated poles, which produce the
/// logarithmic terms of the small-argument expansions, are integrated as
/// clusters instead of through explicit derivative residues.
pub fn mellin_eval(
    integrand: &MellinIntegrand,
    x: f64,
    opts: &EvalOptions,
) -> Result<MellinEval, SpecFunError> {
    let best = mellin_eval_best(integrand, x, opts)?;
    if best.acceptable(opts.relative_tolerance) {
        Ok(best)
    } else {
        Err(SpecFunError::NonConvergence {
            achieved: best.relative_error(),
            requested: opts.relative_tolerance,
        })
    }
}

/// Best-effort evaluation: runs the ascending series, the descending
/// (mirrored) series, and the vertical-line quadrature as needed, and
/// returns whichever carries the smallest error estimate without gating
/// on the requested tolerance. Errors only on invalid inputs or when no
/// strategy produced a finite value.
pub(crate) fn mellin_eval_best(
    integrand: &MellinIntegrand,
    x: f64,
    opts: &EvalOptions,
) -> Result<MellinEval, SpecFunError> {
    opts.validate()?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::InvalidParameter(format!(
            "argument must be a positive real, got {x}"
        )));
    }

    let mut best: Option<MellinEval> = None;
    let mut consider = |candidate: Option<MellinEval>| -> bool {
        if let Some(c) = candidate {
            if c.value.is_finite() {
                let better = best.is_none_or(|b| c.relative_error() < b.relative_error());
                if better {
                    best = Some(c);
                }
            }
        }
        best.is_some_and(|b| b.acceptable(opts.relative_tolerance))
    };

    // A pinned abscissa expresses intent to integrate on that contour, so
    // quadrature leads; otherwise the cheap series routes go first.
    let quadrature_first = matches!(opts.contour_abscissa, ContourAbscissa::Fixed(_));
    if quadrature_first && consider(contour_quadrature(integrand, x, opts).ok()) {
        return Ok(best.unwrap());
    }
    if consider(residue_series(integrand, x, opts)) {
        return Ok(best.unwrap());
    }
    if consider(residue_series(&integrand.mirrored(), 1.0 / x, opts)) {
        return Ok(best.unwrap());
    }
    if !quadrature_first && consider(contour_quadrature(integrand, x, opts).ok()) {
        return Ok(best.unwrap());
    }
    best.ok_or(SpecFunError::NonConvergence {
        achieved: f64::INFINITY,
        requested: opts.relative_tolerance,
    })
}

/// Ascending residue series: value = −Σ residues over the right pole
/// family. Returns None when the family is empty or the terms overflow.
fn residue_series(integrand: &MellinIntegrand, x: f64, opts: &EvalOptions) -> Option<MellinEval> {
    let ln_x = x.ln();
    let (strip_left, _) = integrand.strip();
    let mut sites = AscendingSites::new(integrand);
    let mut pending = sites.next_singular_site()?;

    let mut sum = 0.0f64;
    let mut max_abs = 0.0f64;
    let mut small_run = 0usize;
    let mut tail = 0.0f64;
    let mut clusters = 0usize;
    let mut converged = false;
    let mut prev_hi: Option<f64> = None;

    while clusters < opts.max_residue_terms {
        let mut cluster = pending;
        let next = loop {
            match sites.next_singular_site() {
                Some(s) if s.lo - cluster.hi < CLUSTER_GAP => cluster.merge(s),
                other => break other,
            }
        };
        clusters += 1;

        let gap_next = next.as_ref().map_or(f64::INFINITY, |s| s.lo - cluster.hi);
        let gap_prev = prev_hi.map_or(
            if strip_left.is_finite() { cluster.lo - strip_left } else { f64::INFINITY },
            |hi| cluster.lo - hi,
        );
        let term = if cluster.num_members.len() == 1 && cluster.den_zeros == 0 {
            match simple_residue_term(integrand, &cluster, ln_x) {
                Some(t) => t,
                None => circle_term(integrand, &cluster, ln_x, gap_next, gap_prev)?,
            }
        } else {
            circle_term(integrand, &cluster, ln_x, gap_next, gap_prev)?
        };
        prev_hi = Some(cluster.hi);

        if !term.is_finite() || term.abs() > 1e250 {
            return None;
        }
        sum += term;
        max_abs = max_abs.max(term.abs());
        if term.abs() <= opts.relative_tolerance * sum.abs().max(1e-300) {
            small_run += 1;
            tail = tail.max(term.abs());
        } else {
            small_run = 0;
            tail = 0.0;
        }
        if small_run >= 3 && clusters >= 3 {
            converged = true;
            break;
        }
        pending = match next {
            Some(s) => s,
            None => {
                // Terminating expansion: every remaining lattice site
                // cancels exactly. The asymptotic remainder charged below
                // covers what the poles cannot see.
                converged = true;
                break;
            }
        };
    }

    // A series that exhausted its budget has no usable tail bound; only a
    // converged sum is offered as a candidate.
    if !converged {
        return None;
    }
    // In the asymptotic direction (κ > 0) the pole terms miss an
    // exponentially small remainder ~e^{−κ x^{−1/κ}} that no truncation
    // bound can see; charge it to the error estimate so the expansion is
    // only trusted deep in its regime.
    let kappa = integrand.signed_slope_sum();
    let remainder = if kappa > 1e-12 {
        (sum.abs() + tail) * (-kappa * x.powf(-1.0 / kappa)).exp() * (1.0 + 1.0 / x)
    } else {
        0.0
    };
    let cancellation = max_abs * (clusters as f64).sqrt() * 1e-16;
    Some(MellinEval {
        value: integrand.prefactor * sum,
        error_estimate: (cancellation + tail + remainder) * integrand.prefactor.abs()
            + f64::MIN_POSITIVE,
        strategy: EvalStrategy::ResidueSeries,
    })
}

/// Analytic residue of an isolated simple pole: for the k-th pole of
/// Γ(c+λs), −Res = (−1)^k/(k!·|λ|) · Π_other Γ(·)|_{s0} · x^{e s0}.
/// None when another factor sits on a pole of its own at s0.
fn simple_residue_term(integrand: &MellinIntegrand, site: &PoleSite, ln_x: f64) -> Option<f64> {
    let (fi, k) = site.num_members[0];
    let f0 = &integrand.factors[fi];
    let s0 = (f0.coefficient + k as f64) / -f0.slope;

    let mut ln_t = -libm::lgamma(k as f64 + 1.0) - f0.slope.abs().ln()
        + integrand.argument_exponent * s0 * ln_x;
    let mut sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    for (j, f) in integrand.factors.iter().enumerate() {
        if j == fi {
            continue;
        }
        let (ln_abs, s) = ln_abs_gamma_signed(f.coefficient + f.slope * s0).ok()?;
        ln_t += if f.is_num() { ln_abs } else { -ln_abs };
        sign *= s;
    }
    Some(sign * ln_t.exp())
}

/// Total (negated) residue of a pole cluster via trapezoidal quadrature on
/// a circle enclosing it; exponentially accurate in the node count because
/// the integrand is analytic in an annulus around the circle.
///
/// The radius balances two error sources: it must dominate the cluster
/// span (so the enclosed singularities sit deep inside) and stay clear of
/// the neighbouring sites, while the |x^{e·s}| growth ~e^{r·e·|ln x|}
/// around the circle must stay bounded. Returns None when no radius can
/// satisfy both, which sends the caller to the quadrature strategy.
fn circle_term(
    integrand: &MellinIntegrand,
    site: &PoleSite,
    ln_x: f64,
    gap_next: f64,
    gap_prev: f64,
) -> Option<f64> {
    let span = site.hi - site.lo;
    let center = site.center();
    let clearance = gap_next.min(gap_prev);
    let osc = integrand.argument_exponent * ln_x.abs();
    let r_max = (0.45 * clearance).min(8.0 / (osc + 1.0));
    let r_min = 0.75 * span + 1e-7;
    if r_max < r_min {
        return None;
    }
    let radius = r_max.min((2.5 * span + 0.02).max(r_min));
    // Densify the rule when the enclosed poles approach the circle or the
    // argument factor swings hard around it.
    let tightness = (span / (2.0 * radius)).max(radius / clearance.min(1e30));
    let nodes = if tightness > 0.3 || radius * osc > 4.0 { 128 } else { CIRCLE_NODES };

    let e = integrand.argument_exponent;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / nodes as f64;
        let unit = Complex64::from_polar(1.0, theta);
        let s = Complex64::new(center, 0.0) + radius * unit;
        let ln_f = integrand.log_factor_sum(s) + e * s * ln_x;
        acc += ln_f.exp() * unit;
    }
    Some(-(radius / nodes as f64) * acc.re)
}

/// Vertical-line quadrature of the contour integral.
fn contour_quadrature(
    integrand: &MellinIntegrand,
    x: f64,
    opts: &EvalOptions,
) -> Result<MellinEval, SpecFunError> {
    let non_convergent = || SpecFunError::NonConvergence {
        achieved: f64::INFINITY,
        requested: opts.relative_tolerance,
    };
    let decay = integrand.vertical_decay_rate();
    if decay <= 1e-9 {
        return Err(non_convergent());
    }
    let ln_x = x.ln();
    let e = integrand.argument_exponent;
    let (left, right) = integrand.strip();
    let sigma = match opts.contour_abscissa {
        ContourAbscissa::Fixed(s) => {
            if s <= left || s >= right {
                return Err(SpecFunError::InvalidParameter(format!(
                    "contour abscissa {s} outside the separating strip ({left}, {right})"
                )));
            }
            s
        }
        ContourAbscissa::Auto => choose_abscissa(integrand, ln_x, left, right),
    };

    // Analyticity half-width of τ ↦ integrand(σ + iτ).
    let d_a = pole_clearance(integrand, sigma);
    if !(d_a > 0.0) {
        return Err(non_convergent());
    }

    // Scale anchor keeps the node values in a safe floating range. It also
    // bounds the contour integral: |V| <= e^{ln_scale}·O(1/decay), so a
    // deeply negative anchor at the magnitude-minimising abscissa means the
    // value underflows f64 and the term is numerically zero.
    let ln_scale = {
        let s = Complex64::new(sigma, 0.0);
        (integrand.log_factor_sum(s) + e * s * ln_x).re
    };
    if !ln_scale.is_finite() {
        return Err(non_convergent());
    }
    if ln_scale + integrand.prefactor.abs().ln() < -720.0 {
        return Ok(MellinEval {
            value: 0.0,
            error_estimate: f64::MIN_POSITIVE,
            strategy: EvalStrategy::ContourQuadrature,
        });
    }
    let g = |tau: f64| -> f64 {
        let s = Complex64::new(sigma, tau);
        let ln_f = integrand.log_factor_sum(s) + e * s * ln_x - ln_scale;
        if ln_f.re > 700.0 {
            f64::INFINITY
        } else {
            ln_f.exp().re
        }
    };

    // Step size from the trapezoid rule's e^{−2πd/h} error term, capped by
    // the oscillation scale of x^{ieτ} and by the requested node density.
    let osc = (e * ln_x).abs();
    let mut h = (2.0 * std::f64::consts::PI * d_a / 40.0)
        .min(std::f64::consts::PI / (3.0 * (osc + 1.0)))
        .min(32.0 / opts.quadrature_nodes as f64);

    let mut value_h = trapezoid_line(&g, h, decay, opts).ok_or_else(non_convergent)?;
    let mut refinements = 0usize;
    loop {
        let value_h2 = trapezoid_line(&g, h / 2.0, decay, opts).ok_or_else(non_convergent)?;
        let err = (value_h - value_h2).abs();
        if err <= opts.relative_tolerance * value_h2.abs().max(1e-300) || refinements >= 3 {
            // Assemble value = value_h2 · e^{ln_scale} · prefactor / π in
            // log space so a huge scale anchor cannot overflow en route to
            // a representable result.
            let ln_rest = (integrand.prefactor.abs() / std::f64::consts::PI).ln();
            let sign = value_h2.signum() * integrand.prefactor.signum();
            let ln_value = ln_scale + value_h2.abs().max(1e-300).ln() + ln_rest;
            if ln_value > 700.0 {
                return Err(non_convergent());
            }
            let value = if value_h2 == 0.0 || integrand.prefactor == 0.0 {
                0.0
            } else {
                sign * ln_value.exp()
            };
            let error_estimate = (ln_scale + err.max(1e-300).ln() + ln_rest).min(700.0).exp()
                + value.abs() * 1e-15
                + f64::MIN_POSITIVE;
            return Ok(MellinEval {
                value,
                error_estimate,
                strategy: EvalStrategy::ContourQuadrature,
            });
        }
        h /= 2.0;
        value_h = value_h2;
        refinements += 1;
    }
}

/// Truncated one-sided trapezoid sum h·(g(0)/2 + Σ g(kh)), extended until
/// the exponential tail is negligible against the running integral.
/// None when the cap is reached or a node is not finite.
fn trapezoid_line(g: &dyn Fn(f64) -> f64, h: f64, decay: f64, opts: &EvalOptions) -> Option<f64> {
    let g0 = g(0.0);
    if !g0.is_finite() {
        return None;
    }
    let mut acc = 0.5 * g0;
    let mut quiet = 0usize;
    let mut k = 1usize;
    loop {
        let tau = k as f64 * h;
        if tau > opts.truncation_height || k > 20_000_000 {
            return None;
        }
        let v = g(tau);
        if !v.is_finite() {
            return None;
        }
        acc += v;
        // Remaining mass beyond τ is below |g(τ)|/decay for an
        // exponentially decaying tail.
        if v.abs() / decay < 1e-3 * opts.relative_tolerance * (acc.abs() * h).max(1e-300) {
            quiet += 1;
            if quiet >= 8 {
                break;
            }
        } else {
            quiet = 0;
        }
        k += 1;
    }
    Some(acc * h)
}

/// Contour abscissa: strip midpoint when bounded, otherwise a coarse scan
/// plus golden-section refinement of the real-axis magnitude (the saddle
/// direction), which preserves relative accuracy at extreme arguments.
fn choose_abscissa(integrand: &MellinIntegrand, ln_x: f64, left: f64, right: f64) -> f64 {
    if left.is_finite() && right.is_finite() {
        return 0.5 * (left + right);
    }
    let (anchor, dir) = if right.is_finite() {
        (right, -1.0)
    } else if left.is_finite() {
        (left, 1.0)
    } else {
        return 0.0;
    };
    let mut best_d = 0.5;
    let mut best_mag = f64::INFINITY;
    let mut d = 0.05f64;
    // The magnitude-minimising offset can sit exponentially far out (it
    // grows like exp(e·|ln x|/Σλ)); scan to 1e9 and stop early once the
    // bound is already far below the underflow shortcut.
    while d <= 1e9 {
        let mag = integrand.log_magnitude_real(anchor + dir * d, ln_x);
        if mag < best_mag {
            best_mag = mag;
            best_d = d;
        }
        if best_mag < -800.0 {
            break;
        }
        d *= 1.25;
    }
    let (mut a, mut b) = (best_d / 1.25, best_d * 1.25);
    let phi = 0.618_033_988_749_894_9;
    for _ in 0..24 {
        let c1 = b - phi * (b - a);
        let c2 = a + phi * (b - a);
        if integrand.log_magnitude_real(anchor + dir * c1, ln_x)
            < integrand.log_magnitude_real(anchor + dir * c2, ln_x)
        {
            b = c2;
        } else {
            a = c1;
        }
    }
    anchor + dir * 0.5 * (a + b)
}

/// Distance from the contour to the nearest pole of either family.
fn pole_clearance(integrand: &MellinIntegrand, sigma: f64) -> f64 {
    let mut clearance = f64::INFINITY;
    for f in integrand.factors.iter().filter(|f| f.is_num()) {
        // Poles of Γ(c+λs) lie at s = −(c+k)/λ, k = 0, 1, 2, …; the lattice
        // index closest to sigma is the rounded solution of c + λs = −k.
        let k = (-(f.coefficient + f.slope * sigma)).max(0.0).round();
        let pole = -(f.coefficient + k) / f.slope;
        clearance = clearance.min((sigma - pole).abs());
    }
    clearance
}

