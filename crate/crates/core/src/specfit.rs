//! Laplacian eigenvalues as correlation decay rates, and exponential-sum
//! fitting of correlation data.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;
/// Largest admissible `|Im|` of a fitted rate.
pub const IMAG_TOL: f64 = 1e-6;
/// Smallest singular value ratio accepted in the linear-prediction system.
const HANKEL_RCOND: f64 = 1e-13;
const GRID_TOL: f64 = 1e-9;
/// Default start of the fitting window. Spherical functions carry a
/// `c(−s)e^{(−s−1)t}` term of relative size `e^{−2st}`, which biases fits
/// that include small `t`.
pub const DEFAULT_T_MIN: f64 = 6.0;

/// `a = 1 − √(1 − 4λ)`, computed as `4λ / (1 + √(1 − 4λ))` to avoid
/// cancellation at small `λ`.
pub fn eigenvalue_to_rate(lambda: f64) -> Result<f64> {
    if !(0.0..=0.25).contains(&lambda) {
        return Err(Error::domain(format!("eigenvalue {lambda} outside [0, 1/4]")));
    }
    Ok(4.0 * lambda / (1.0 + (1.0 - 4.0 * lambda).sqrt()))
}

/// Inverse of [`eigenvalue_to_rate`]: `λ = (2a − a²)/4`.
pub fn rate_to_eigenvalue(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::domain(format!("rate {a} outside [0, 1]")));
    }
    Ok(a * (2.0 - a) / 4.0)
}

/// Fitted model `Σ c_i e^{−a_i t}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTable {
    /// `(a_i, c_i)` sorted by increasing rate.
    pub pairs: Vec<(f64, f64)>,
    /// Root-mean-square residual over the samples.
    pub residual: f64,
}

impl RateTable {
    pub fn rates(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.pairs.iter().map(|(a, c)| c * (-a * t).exp()).sum()
    }
}

fn design(t: &[f64], rates: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(t.len(), rates.len(), |i, j| (-rates[j] * t[i]).exp())
}

/// Linear least squares for the coefficients; returns them with the
/// residual vector.
fn project(t: &[f64], y: &DVector<f64>, rates: &[f64]) -> Option<(DVector<f64>, DVector<f64>)> {
    let phi = design(t, rates);
    let svd = phi.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax > 0.0) || svd.singular_values.min() < 1e-15 * smax {
        return None;
    }
    let c = svd.solve(y, 0.0).ok()?;
    let r = y - phi * &c;
    Some((c, r))
}

fn companion_roots(alpha: &[f64]) -> Result<Vec<Complex64>> {
    // z^k + α_1 z^{k−1} + … + α_k
    let k = alpha.len();
    let mut m = DMatrix::<Complex64>::zeros(k, k);
    for j in 0..k {
        m[(0, j)] = Complex64::new(-alpha[j], 0.0);
    }
    for i in 1..k {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let schur = nalgebra::Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numerical("companion eigenvalues did not converge"))?;
    let tm = schur.unpack().1;
    Ok((0..k).map(|i| tm[(i, i)]).collect())
}

/// Fits `k` decaying exponentials to samples on a uniform grid: linear
/// prediction on the Hankel system, companion-matrix rooting, then a
/// variable-projection Levenberg–Marquardt polish of the rates.
pub fn fit_exponential_sum(t_grid: &[f64], values: &[f64], k: usize) -> Result<RateTable> {
    if k == 0 || k > MAX_ORDER {
        return Err(Error::invalid(format!("model order {k} must lie in 1..={MAX_ORDER}")));
    }
    if t_grid.len() != values.len() {
        return Err(Error::invalid("t grid and values differ in length"));
    }
    let n = t_grid.len();
    if n < 4 * k {
        return Err(Error::invalid(format!("{n} samples are fewer than 4k = {}", 4 * k)));
    }
    if values.iter().chain(t_grid).any(|v| !v.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    let h = (t_grid[n - 1] - t_grid[0]) / (n - 1) as f64;
    if !(h > 0.0) || t_grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > GRID_TOL * h.max(1.0)) {
        return Err(Error::invalid("t grid must be uniform and increasing"));
    }

    // y_{j+k} + α_1 y_{j+k−1} + … + α_k y_j = 0
    let rows = n - k;
    let a = DMatrix::from_fn(rows, k, |i, j| values[i + k - 1 - j]);
    let b = DVector::from_fn(rows, |i, _| -values[i + k]);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax > 0.0) || svd.singular_values.min() < HANKEL_RCOND * smax {
        return Err(Error::numerical(format!(
            "Hankel system is ill-conditioned for k = {k}; try a smaller model order"
        )));
    }
    let alpha = svd.solve(&b, 0.0).map_err(|e| Error::numerical(e.to_string()))?;
    let roots = companion_roots(alpha.as_slice())?;
    let mut rates = Vec::with_capacity(k);
    for z in roots {
        let rate = -z.ln() / h;
        if rate.im.abs() > IMAG_TOL || z.re <= 0.0 {
            return Err(Error::numerical(format!(
                "model order {k}: root {z} gives non-real rate {rate}; try a smaller model order"
            )));
        }
        rates.push(rate.re);
    }
    rates.sort_by(f64::total_cmp);

    let y = DVector::from_column_slice(values);
    let rates = polish(t_grid, &y, rates);
    let (c, r) = project(t_grid, &y, &rates)
        .ok_or_else(|| Error::numerical("fitted rates are not separated; try a smaller model order"))?;
    let mut pairs: Vec<(f64, f64)> = rates.iter().copied().zip(c.iter().copied()).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    if pairs.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::numerical("fitted rates coincide; try a smaller model order"));
    }
    Ok(RateTable { pairs, residual: (r.norm_squared() / n as f64).sqrt() })
}

/// [`fit_exponential_sum`] restricted to samples with `t_min ≤ t ≤ t_max`.
pub fn fit_window(t_grid: &[f64], values: &[f64], k: usize, t_min: f64, t_max: f64) -> Result<RateTable> {
    if t_grid.len() != values.len() {
        return Err(Error::invalid("t grid and values differ in length"));
    }
    let (t, y): (Vec<f64>, Vec<f64>) =
        t_grid.iter().zip(values).filter(|(t, _)| **t >= t_min && **t <= t_max).map(|(t, y)| (*t, *y)).unzip();
    fit_exponential_sum(&t, &y, k)
}

/// Levenberg–Marquardt on the variable-projection residual `y − Φ(a)c(a)`
/// with a forward-difference Jacobian.
fn polish(t: &[f64], y: &DVector<f64>, start: Vec<f64>) -> Vec<f64> {
    let k = start.len();
    let cost = |a: &[f64]| project(t, y, a).map(|(_, r)| r.norm_squared());
    let Some(mut f) = cost(&start) else { return start };
    let mut a = start;
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let (_, r0) = match project(t, y, &a) {
            Some(v) => v,
            None => break,
        };
        let mut jac = DMatrix::zeros(t.len(), k);
        for j in 0..k {
            let step = 1e-7 * a[j].abs().max(1e-3);
            let mut ap = a.clone();
            ap[j] += step;
            match project(t, y, &ap) {
                Some((_, rp)) => jac.set_column(j, &((rp - &r0) / step)),
                None => return a,
            }
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r0;
        let mut improved = false;
        for _ in 0..30 {
            let mut m = jtj.clone();
            for d in 0..k {
                m[(d, d)] += lambda * jtj[(d, d)].max(1e-300);
            }
            let Some(delta) = m.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = a.iter().zip(delta.iter()).map(|(x, d)| x + d).collect();
            match cost(&trial) {
                Some(ft) if ft < f => {
                    let rel = (f - ft) / f.max(1e-300);
                    a = trial;
                    f = ft;
                    lambda = (lambda / 10.0).max(1e-12);
                    improved = true;
                    if rel < 1e-15 || delta.norm() < 1e-15 {
                        return a;
                    }
                    break;
                }
                _ => lambda *= 10.0,
            }
        }
        if !improved {
            break;
        }
    }
    a
}
