//! Adaptive real-line quadrature (Gauss–Kronrod 7–15) used by the
//! validation suite for density normalizations and moment cross-checks.

/// Gauss–Kronrod 15-point nodes on [-1, 1] (positive half; symmetric).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

/// Embedded 7-point Gauss weights (for nodes 1, 3, 5, 7 of `XGK`).
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let hl = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    // Odd indices of XGK (center included) are the embedded Gauss-7 nodes.
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let (fl, fr) = if x == 0.0 {
            (f(center), 0.0)
        } else {
            (f(center - hl * x), f(center + hl * x))
        };
        kronrod += w * (fl + fr);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (fl + fr);
        }
    }
    let kron = kronrod * hl;
    (kron, (kron - gauss * hl).abs())
}

/// One adaptive panel refinement pass: integrate f over [a, b] to the
/// requested relative tolerance, splitting at supplied break points first.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    rel_tol: f64,
) -> QuadResult {
    let mut edges: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    edges.push(a);
    for &p in breaks {
        if p > a && p < b {
            edges.push(p);
        }
    }
    edges.push(b);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let mut stack: Vec<(f64, f64, f64, f64)> = Vec::new();
    for w in edges.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        stack.push((w[0], w[1], v, e));
    }

    let mut evaluations = 15 * stack.len();
    loop {
        let total: f64 = stack.iter().map(|s| s.2).sum();
        let err: f64 = stack.iter().map(|s| s.3).sum();
        if err <= rel_tol * total.abs().max(1e-300) || evaluations > 4_000_000 {
            return QuadResult { value: total, error_estimate: err, evaluations };
        }
        // Split the worst panel.
        let (idx, _) = stack
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, _, _) = stack.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        stack.push((lo, mid, v1, e1));
        stack.push((mid, hi, v2, e2));
        evaluations += 30;
    }
}

/// Integral of f over [a, ∞) via the substitution x = a + t/(1−t).
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, breaks: &[f64], rel_tol: f64) -> QuadResult {
    let mapped: Vec<f64> = breaks
        .iter()
        .filter(|&&x| x > a)
        .map(|&x| {
            let u = x - a;
            u / (1.0 + u)
        })
        .collect();
    integrate(
        |t| {
            let one_minus = 1.0 - t;
            let x = a + t / one_minus;
            f(x) / (one_minus * one_minus)
        },
        0.0,
        1.0 - 1e-12,
        &mapped,
        rel_tol,
    )
}

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}
