//! Relative cohomology classes as closed edge cochains.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Origami, SaddleConnection, Staircase};
use crate::error::{Error, Result};
use crate::sl2::GroupElement;

/// Absolute tolerance on the closedness of a cocycle, scaled by its size.
pub const CLOSEDNESS_TOL: f64 = 1e-12;

/// Complex values on the bottom edge (oriented rightward) and left edge
/// (oriented upward) of every square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cocycle {
    pub bottom: Vec<Complex64>,
    pub left: Vec<Complex64>,
    origami_id: u64,
}

fn map_value(m: &GroupElement, z: Complex64) -> Complex64 {
    Complex64::new(m.a * z.re + m.b * z.im, m.c * z.re + m.d * z.im)
}

fn map_generator(x: &[[f64; 2]; 2], z: Complex64) -> Complex64 {
    Complex64::new(x[0][0] * z.re + x[0][1] * z.im, x[1][0] * z.re + x[1][1] * z.im)
}

impl Cocycle {
    /// Checks lengths and closedness around every square.
    pub fn new(x: &Origami, bottom: Vec<Complex64>, left: Vec<Complex64>) -> Result<Self> {
        let n = x.n_squares();
        if bottom.len() != n || left.len() != n {
            return Err(Error::invalid(format!("cocycle needs {n} bottom and {n} left values")));
        }
        if bottom.iter().chain(&left).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("cocycle values must be finite"));
        }
        let v = Cocycle { bottom, left, origami_id: x.combinatorics_id() };
        let scale = v.bottom.iter().chain(&v.left).fold(1.0f64, |m, z| m.max(z.norm()));
        let res = v.closedness_residual(x);
        if res > CLOSEDNESS_TOL * scale {
            return Err(Error::invalid(format!("cochain is not closed (residual {res:e})")));
        }
        Ok(v)
    }

    /// The period cocycle `Φ(x)`: bottom ↦ `D·(1,0)`, left ↦ `D·(0,1)`.
    pub fn tautological(x: &Origami) -> Self {
        let d = x.deformation();
        let n = x.n_squares();
        Cocycle {
            bottom: vec![Complex64::new(d.a, d.c); n],
            left: vec![Complex64::new(d.b, d.d); n],
            origami_id: x.combinatorics_id(),
        }
    }

    /// Tangent vector at `x` of the path `t ↦ exp(tX)·x`: `X` applied to the
    /// periods.
    pub fn tangent(x: &Origami, generator: &[[f64; 2]; 2]) -> Self {
        let mut v = Self::tautological(x);
        for z in v.bottom.iter_mut().chain(v.left.iter_mut()) {
            *z = map_generator(generator, *z);
        }
        v
    }

    /// A random closed cochain with real and imaginary parts drawn from the
    /// kernel of the closedness constraints. `imag_weight = 0` gives a real
    /// cocycle; swapping the roles via [`Cocycle::times_i`] gives an imaginary one.
    pub fn random_closed<R: Rng + ?Sized>(x: &Origami, rng: &mut R, imag_weight: f64) -> Self {
        let basis = closed_basis(x);
        let n = x.n_squares();
        let mut draw = || {
            let mut v = vec![0.0; 2 * n];
            for b in &basis {
                let c: f64 = rng.random_range(-1.0..1.0);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += c * bi;
                }
            }
            v
        };
        let re = draw();
        let im = if imag_weight != 0.0 { draw() } else { vec![0.0; 2 * n] };
        let z = |k: usize| Complex64::new(re[k], imag_weight * im[k]);
        Cocycle { bottom: (0..n).map(z).collect(), left: (n..2 * n).map(z).collect(), origami_id: x.combinatorics_id() }
    }

    /// `max_i |bottom_i + left_{σ_h(i)} − bottom_{σ_v(i)} − left_i|`.
    pub fn closedness_residual(&self, x: &Origami) -> f64 {
        (0..x.n_squares())
            .map(|i| (self.bottom[i] + self.left[x.h(i)] - self.bottom[x.v(i)] - self.left[i]).norm())
            .fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Self {
        Cocycle {
            bottom: self.bottom.iter().map(|z| z.conj()).collect(),
            left: self.left.iter().map(|z| z.conj()).collect(),
            origami_id: self.origami_id,
        }
    }

    /// Multiplication by `i`, turning real cocycles into imaginary ones.
    pub fn times_i(&self) -> Self {
        let i = Complex64::new(0.0, 1.0);
        Cocycle {
            bottom: self.bottom.iter().map(|z| z * i).collect(),
            left: self.left.iter().map(|z| z * i).collect(),
            origami_id: self.origami_id,
        }
    }

    pub fn is_real(&self) -> bool {
        self.bottom.iter().chain(&self.left).all(|z| z.im == 0.0)
    }

    pub fn is_imaginary(&self) -> bool {
        self.bottom.iter().chain(&self.left).all(|z| z.re == 0.0)
    }

    pub fn origami_id(&self) -> u64 {
        self.origami_id
    }

    /// Sum of edge values along the chosen staircase of `gamma`.
    pub fn evaluate(&self, gamma: &SaddleConnection, which: Staircase) -> Result<Complex64> {
        if gamma.origami_id() != self.origami_id {
            return Err(Error::invalid("cocycle and saddle connection belong to different origamis"));
        }
        let counts = gamma.counts(which);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, z) in counts.bottom.iter().zip(&self.bottom) {
            if *k != 0 {
                acc += z * *k as f64;
            }
        }
        for (k, z) in counts.left.iter().zip(&self.left) {
            if *k != 0 {
                acc += z * *k as f64;
            }
        }
        Ok(acc)
    }
}

/// Orthonormal basis (as real vectors `(bottom, left)`) of closed cochains.
fn closed_basis(x: &Origami) -> Vec<Vec<f64>> {
    let n = x.n_squares();
    let mut c = DMatrix::<f64>::zeros(n, 2 * n);
    for i in 0..n {
        c[(i, i)] += 1.0;
        c[(i, n + x.h(i))] += 1.0;
        c[(i, x.v(i))] -= 1.0;
        c[(i, n + i)] -= 1.0;
    }
    let eig = SymmetricEigen::new(c.transpose() * &c);
    (0..2 * n)
        .filter(|&k| eig.eigenvalues[k].abs() < 1e-9)
        .map(|k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect()
}

/// `v(γ)` along the lower staircase.
pub fn evaluate_cocycle(v: &Cocycle, gamma: &SaddleConnection) -> Result<Complex64> {
    v.evaluate(gamma, Staircase::Lower)
}

/// Each edge value, read as a real 2-vector, mapped by `m`.
pub fn pushforward_cocycle(m: &GroupElement, v: &Cocycle) -> Cocycle {
    Cocycle {
        bottom: v.bottom.iter().map(|z| map_value(m, *z)).collect(),
        left: v.left.iter().map(|z| map_value(m, *z)).collect(),
        origami_id: v.origami_id,
    }
}
