//! Quadrature oracles: fixed Gauss-Legendre rules and adaptive Gauss-Kronrod.
//!
//! These back every numerical check of a closed form in the crate, so they
//! never call into the theta or determinant code they are used to verify.

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            nodes[0] = 0.0;
            weights[0] = 2.0;
            break;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// A Gauss-Legendre rule mapped onto arbitrary intervals.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    /// `(x, w)` pairs on `[a, b]`.
    pub fn points(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (mid + half * x, half * w))
            .collect()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.points(a, b).into_iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Midpoint nodes of the `n`-point trapezoid rule for periodic integrands on `[a, a + period)`.
pub fn periodic_points(a: f64, period: f64, n: usize) -> Vec<(f64, f64)> {
    let h = period / n as f64;
    (0..n).map(|i| (a + (i as f64 + 0.5) * h, h)).collect()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Largest number of subintervals kept by the global adaptive scheme.
pub const MAX_SUBINTERVALS: usize = 4000;

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive 15-point Gauss-Kronrod on `[a, b]`, split first at the interior `breaks`.
///
/// The subinterval with the largest error estimate is bisected until the summed
/// estimate drops below `abs_tol`.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], abs_tol: f64) -> Result<Quad> {
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    cuts.extend(inner);
    cuts.push(b);
    let mut pieces = Vec::new();
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gk15(&mut f, w[0], w[1]);
            evaluations += 15;
            pieces.push(Piece {
                a: w[0],
                b: w[1],
                value,
                error,
            });
        }
    }
    loop {
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        let value: f64 = pieces.iter().map(|p| p.value).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureNonConvergence { estimate: value, error });
        }
        if error <= abs_tol {
            return Ok(Quad {
                value,
                error,
                evaluations,
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                let mid = 0.5 * (p.a + p.b);
                mid > p.a && mid < p.b
            })
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(i) = worst.filter(|_| pieces.len() < MAX_SUBINTERVALS) else {
            return Err(Error::QuadratureNonConvergence { estimate: value, error });
        };
        let p = pieces.swap_remove(i);
        let mid = 0.5 * (p.a + p.b);
        for (lo, hi) in [(p.a, mid), (mid, p.b)] {
            let (value, error) = gk15(&mut f, lo, hi);
            evaluations += 15;
            pieces.push(Piece {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }
}

/// Nested adaptive integration of `f(x, y)` over a rectangle: `y` outer, `x` inner.
pub fn adaptive_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    x_breaks: &[f64],
    y_breaks: &[f64],
    abs_tol: f64,
) -> Result<Quad> {
    let inner_tol = abs_tol / (4.0 * (y1 - y0).abs().max(1.0));
    let mut inner_failure: Option<Error> = None;
    let mut inner_evals = 0;
    let outer = adaptive(
        |y| match adaptive(|x| f(x, y), x0, x1, x_breaks, inner_tol) {
            Ok(q) => {
                inner_evals += q.evaluations;
                q.value
            }
            Err(e) => {
                inner_failure.get_or_insert(e);
                f64::NAN
            }
        },
        y0,
        y1,
        y_breaks,
        0.5 * abs_tol,
    );
    if let Some(e) = inner_failure {
        return Err(e);
    }
    let q = outer?;
    Ok(Quad {
        value: q.value,
        error: q.error + inner_tol * (y1 - y0).abs(),
        evaluations: inner_evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rules_integrate_polynomials_exactly() {
        for n in 1..=12 {
            let gl = GaussLegendre::new(n);
            for p in 0..(2 * n) {
                let got = gl.integrate(0.0, 2.0, |x| x.powi(p as i32));
                let exact = 2f64.powi(p as i32 + 1) / (p as f64 + 1.0);
                assert!((got - exact).abs() < 1e-12 * exact.max(1.0), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn kronrod_handles_endpoint_log_singularity() {
        // int_0^1 ln x dx = -1
        let q = adaptive(|x: f64| x.ln(), 0.0, 1.0, &[], 1e-10).unwrap();
        assert!((q.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn interior_breakpoints() {
        // int_{-1}^{2} |x| dx = 5/2
        let q = adaptive(|x: f64| x.abs(), -1.0, 2.0, &[0.0], 1e-12).unwrap();
        assert!((q.value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn two_dimensional_log_singularity() {
        // int over [-1,1]^2 of ln(x^2 + y^2)/2, reference from polar decomposition.
        let q = adaptive_2d(
            |x, y| 0.5 * (x * x + y * y).ln(),
            (-1.0, 1.0),
            (-1.0, 1.0),
            &[0.0],
            &[0.0],
            1e-9,
        )
        .unwrap();
        // int_0^1 int_0^1 ln(x^2 + y^2) = ln 2 - 3 + pi/2
        let exact = 2.0 * 2f64.ln() + std::f64::consts::PI - 6.0;
        assert!((q.value - exact).abs() < 1e-8, "{} vs {}", q.value, exact);
    }

    #[test]
    fn periodic_trapezoid_is_spectral() {
        let pts = periodic_points(0.0, 1.0, 16);
        let got: f64 = pts
            .iter()
            .map(|(x, w)| w * (2.0 * std::f64::consts::PI * x).cos().exp())
            .sum();
        // I_0(1)
        assert!((got - 1.266_065_877_752_008_4).abs() < 1e-14);
    }
}
