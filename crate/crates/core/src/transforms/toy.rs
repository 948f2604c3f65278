//! Finite-dimensional stand-ins for the transfer operator: resolvents,
//! spectral projectors and spectral radii.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::contour::{residue_contour, CONTOUR_TOL};
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 64;
const PROJECTION_NODES: usize = 64;
/// Relative pivot size below which a solve is treated as singular.
const SINGULAR_PIVOT: f64 = 1e-14;

/// A square complex matrix of dimension at most [`MAX_DIM`].
#[derive(Debug, Clone, PartialEq)]
pub struct ToyOperator {
    m: DMatrix<Complex64>,
}

impl ToyOperator {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::invalid(format!("toy operator must be square, got {}×{}", m.nrows(), m.ncols())));
        }
        if m.nrows() > MAX_DIM {
            return Err(Error::invalid(format!("toy operator dimension {} exceeds {MAX_DIM}", m.nrows())));
        }
        if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("toy operator has non-finite entries"));
        }
        Ok(ToyOperator { m })
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn diagonal(d: &[Complex64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    /// Eigenvalues from a complex Schur decomposition.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let schur = nalgebra::Schur::try_new(self.m.clone(), f64::EPSILON, 10_000)
            .ok_or_else(|| Error::numerical("Schur iteration did not converge"))?;
        let t = schur.unpack().1;
        Ok((0..self.dim()).map(|i| t[(i, i)]).collect())
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        operator_norm(&self.m)
    }
}

fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().singular_values().max()
}

/// `A^{-1} B`, refusing numerically singular `A`.
fn solve(a: DMatrix<Complex64>, b: DMatrix<Complex64>, z: Complex64, what: &str) -> Result<DMatrix<Complex64>> {
    let scale = a.iter().fold(0.0, |m: f64, v| m.max(v.norm()));
    let lu = a.lu();
    let u = lu.u();
    let min_pivot = (0..u.nrows()).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    if !(min_pivot > SINGULAR_PIVOT * scale) {
        return Err(Error::Pole { z, what: what.into() });
    }
    lu.solve(&b).ok_or_else(|| Error::Pole { z, what: what.into() })
}

/// `(zI − L)^{-1}`.
pub fn resolvent(l: &ToyOperator, z: Complex64) -> Result<DMatrix<Complex64>> {
    let n = l.dim();
    let a = DMatrix::from_diagonal_element(n, n, z) - &l.m;
    solve(a, DMatrix::identity(n, n), z, "z is an eigenvalue of L")
}

/// `S(z) = w M (wI − M)^{-1}` with `w = 1/(z0 − z)`, evaluated in the
/// equivalent form `M (I − (z0 − z) M)^{-1}`, which stays finite at `z = z0`
/// where `S(z0) = M`.
pub fn resolvent_s(m: &ToyOperator, z0: Complex64, z: Complex64) -> Result<ToyOperator> {
    let n = m.dim();
    let a = DMatrix::identity(n, n) - &m.m * (z0 - z);
    // M and (I − εM)^{-1} commute, so solving from the left is the same product
    let s = solve(a, m.m.clone(), z, "1/(z0 − z) is an eigenvalue of M")?;
    ToyOperator::new(s)
}

/// Riesz projector `(1/2πi)∮_{|w−λ|=r} (wI − L)^{-1} dw`.
pub fn spectral_projection(l: &ToyOperator, lambda: Complex64, radius: f64) -> Result<ToyOperator> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("radius {radius} must be positive")));
    }
    let margin = 1e-6 * radius.max(1e-3);
    for ev in l.eigenvalues()? {
        if ((ev - lambda).norm() - radius).abs() <= margin {
            return Err(Error::invalid(format!("eigenvalue {ev} lies on the contour")));
        }
    }
    let p = residue_contour(|w| resolvent(l, w), lambda, radius, PROJECTION_NODES, CONTOUR_TOL)?;
    ToyOperator::new(p.value)
}

/// `min_{1≤n≤n_max} ‖L^n‖^{1/n}`, with powers renormalized at every step so
/// the logarithm of the norm is accumulated without overflow.
pub fn spectral_radius_via_iterates(l: &ToyOperator, n_max: usize) -> Result<f64> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let mut q = l.m.clone();
    let mut log_norm = 0.0;
    let mut best = f64::INFINITY;
    for n in 1..=n_max {
        if n > 1 {
            q = &l.m * &q;
        }
        let nu = operator_norm(&q);
        if nu == 0.0 {
            return Ok(0.0);
        }
        if !nu.is_finite() {
            return Err(Error::numerical(format!("‖L^{n}‖ is not finite")));
        }
        log_norm += nu.ln();
        q /= Complex64::new(nu, 0.0);
        best = best.min((log_norm / n as f64).exp());
    }
    Ok(best)
}
