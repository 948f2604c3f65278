//! Trapezoidal contour integration on circles.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Agreement required between successive node doublings.
pub const CONTOUR_TOL: f64 = 1e-10;
const MAX_NODES: usize = 1 << 16;

/// Values that can be averaged over contour nodes.
pub trait ContourValue: Clone + Send {
    fn scaled(&self, a: Complex64) -> Self;
    fn add(&mut self, other: &Self);
    fn distance(&self, other: &Self) -> f64;
    fn magnitude(&self) -> f64;
}

impl ContourValue for Complex64 {
    fn scaled(&self, a: Complex64) -> Self {
        self * a
    }

    fn add(&mut self, other: &Self) {
        *self += other;
    }

    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl ContourValue for DMatrix<Complex64> {
    fn scaled(&self, a: Complex64) -> Self {
        self * a
    }

    fn add(&mut self, other: &Self) {
        *self += other;
    }

    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// A contour integral `(1/2πi)∮ f` with its node-doubling error estimate.
#[derive(Debug, Clone)]
pub struct ContourIntegral<T> {
    pub value: T,
    pub abs_error: f64,
    pub nodes: usize,
}

/// Mean of `f(z_k)(z_k − center)` over `n` equispaced nodes starting at
/// angle `offset`.
fn node_mean<T, F>(f: &F, center: Complex64, radius: f64, n: usize, offset: f64) -> Result<T>
where
    T: ContourValue,
    F: Fn(Complex64) -> Result<T> + Sync,
{
    let terms = (0..n)
        .into_par_iter()
        .map(|k| {
            let theta = offset + std::f64::consts::TAU * k as f64 / n as f64;
            let dz = Complex64::from_polar(radius, theta);
            f(center + dz).map(|v| v.scaled(dz / n as f64))
        })
        .collect::<Result<Vec<T>>>()?;
    let mut iter = terms.into_iter();
    let mut acc = iter.next().expect("at least one node");
    for t in iter {
        acc.add(&t);
    }
    Ok(acc)
}

/// `(1/2πi)∮_{|z−z0|=radius} f(z) dz` by the trapezoid rule, doubling the
/// node count from `n_nodes` until two estimates agree to `tol`.
pub fn residue_contour<T, F>(f: F, z0: Complex64, radius: f64, n_nodes: usize, tol: f64) -> Result<ContourIntegral<T>>
where
    T: ContourValue,
    F: Fn(Complex64) -> Result<T> + Sync,
{
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("contour radius {radius} must be positive")));
    }
    if n_nodes < 4 {
        return Err(Error::invalid("contour needs at least 4 nodes"));
    }
    let mut n = n_nodes;
    let mut current: T = node_mean(&f, z0, radius, n, 0.0)?;
    loop {
        // the midpoints of the current nodes form the other half of the 2n rule
        let mid: T = node_mean(&f, z0, radius, n, std::f64::consts::PI / n as f64)?;
        let mut next = current.scaled(Complex64::new(0.5, 0.0));
        next.add(&mid.scaled(Complex64::new(0.5, 0.0)));
        let err = next.distance(&current);
        n *= 2;
        if err <= tol {
            return Ok(ContourIntegral { value: next, abs_error: err, nodes: n });
        }
        if n >= MAX_NODES || !err.is_finite() {
            return Err(Error::numerical(format!("contour estimates still differ by {err:e} with {n} nodes")));
        }
        current = next;
    }
}
