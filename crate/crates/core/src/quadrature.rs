//! Gauss–Legendre rules and an adaptive panel integrator.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Applies the rule on `[a, b]`.
    pub fn integrate<F>(&self, f: &F, a: f64, b: f64) -> Complex64
    where
        F: Fn(f64) -> Complex64 + ?Sized,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }

    pub fn integrate_real<F>(&self, f: &F, a: f64, b: f64) -> f64
    where
        F: Fn(f64) -> f64 + ?Sized,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| f(mid + half * x) * w).sum::<f64>() * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 16-point rule.
pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

/// Shared 32-point rule.
pub fn gl32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: Complex64,
    pub abs_error: f64,
}

/// Adaptive bisection over the given breakpoints. Each panel is accepted when
/// the 16-point value on the panel agrees with the sum over its two halves to
/// within a share of `abs_tol` proportional to its width.
pub fn adaptive<F>(f: &F, breakpoints: &[f64], abs_tol: f64, max_panels: usize) -> Result<Integral>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let rule = gl16();
    let total = breakpoints.last().unwrap() - breakpoints[0];
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs_error = 0.0;
    let mut panels = 0usize;
    let mut stack: Vec<(f64, f64, Complex64)> = Vec::new();
    for w in breakpoints.windows(2).rev() {
        if w[1] > w[0] {
            stack.push((w[0], w[1], rule.integrate(f, w[0], w[1])));
        }
    }
    while let Some((a, b, whole)) = stack.pop() {
        panels += 1;
        if panels > max_panels {
            return Err(Error::Numerical {
                msg: format!("adaptive quadrature exceeded {max_panels} panels"),
                partial: Some(value),
            });
        }
        let mid = 0.5 * (a + b);
        let left = rule.integrate(f, a, mid);
        let right = rule.integrate(f, mid, b);
        let err = (left + right - whole).norm();
        let share = abs_tol * (b - a) / total;
        if err <= share.max(1e-15 * (left + right).norm()) || (b - a) < 1e-14 * total {
            value += left + right;
            abs_error += err;
        } else {
            stack.push((mid, b, right));
            stack.push((a, mid, left));
        }
    }
    Ok(Integral { value, abs_error })
}

/// Pairwise (cascade) summation; deterministic and more accurate than a
/// left fold for long vectors.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let rule = GaussLegendre::new(8);
        // exact up to degree 15
        for deg in 0..16 {
            let got = rule.integrate_real(&|x: f64| x.powi(deg), 0.0, 1.0);
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "deg {deg}: {got} vs {want}");
        }
        let wsum: f64 = gl32().weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_resolves_narrow_peak() {
        // ∫_0^1 ε/(x²+ε²) dx = atan(1/ε)
        let eps = 1e-6;
        let f = |x: f64| Complex64::new(eps / (x * x + eps * eps), 0.0);
        let got = adaptive(&f, &[0.0, 1e-6, 1e-3, 1.0], 1e-12, 100_000).unwrap();
        assert!((got.value.re - (1.0 / eps).atan()).abs() < 1e-11);
    }

    #[test]
    fn adaptive_reports_panel_exhaustion() {
        let f = |x: f64| Complex64::new((1.0 / x).sin(), 0.0);
        let err = adaptive(&f, &[1e-12, 1.0], 1e-14, 50).unwrap_err();
        assert!(matches!(err, Error::Numerical { partial: Some(_), .. }));
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-12);
    }
}
