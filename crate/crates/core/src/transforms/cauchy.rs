//! Cauchy transforms of measures on `[0, 1]` and recovery of atom masses.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-constant density: value `values[i]` on `[breaks[i], breaks[i+1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseDensity {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseDensity {
    pub fn uniform(height: f64) -> Self {
        PiecewiseDensity { breaks: vec![0.0, 1.0], values: vec![height] }
    }

    fn validate(&self) -> Result<()> {
        if self.breaks.len() != self.values.len() + 1 || self.values.is_empty() {
            return Err(Error::invalid("density needs one more break than values"));
        }
        if self.breaks[0] < 0.0 || *self.breaks.last().unwrap() > 1.0 {
            return Err(Error::invalid("density support must lie in [0,1]"));
        }
        if self.breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("density breaks must be strictly increasing"));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("density values must be finite and ≥ 0"));
        }
        Ok(())
    }

    pub fn mass(&self) -> f64 {
        self.breaks.windows(2).zip(&self.values).map(|(w, v)| (w[1] - w[0]) * v).sum()
    }
}

/// A nonnegative finite measure on `[0, 1]`: atoms plus an optional density.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasureOnInterval {
    pub atoms: Vec<(f64, f64)>,
    pub density: Option<PiecewiseDensity>,
}

impl MeasureOnInterval {
    pub fn new(atoms: Vec<(f64, f64)>, density: Option<PiecewiseDensity>) -> Result<Self> {
        for &(s, m) in &atoms {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::invalid(format!("atom position {s} outside [0,1]")));
            }
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::invalid(format!("atom mass {m} must be finite and ≥ 0")));
            }
        }
        if let Some(d) = &density {
            d.validate()?;
        }
        Ok(MeasureOnInterval { atoms, density })
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>() + self.density.as_ref().map_or(0.0, |d| d.mass())
    }
}

/// `F(z) = ∫ dν(s) / (z − s + 1)`. The density part is integrated in closed
/// form, `ρ [ln(z+1−a) − ln(z+1−b)]` on each piece.
pub fn cauchy_transform(nu: &MeasureOnInterval, z: Complex64) -> Result<Complex64> {
    let w = z + 1.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for &(s, m) in &nu.atoms {
        if m == 0.0 {
            continue;
        }
        if (w - s).norm() == 0.0 {
            return Err(Error::Pole { z, what: format!("atom at s = {s}") });
        }
        acc += m / (w - s);
    }
    if let Some(d) = &nu.density {
        for (piece, &rho) in d.breaks.windows(2).zip(&d.values) {
            if rho == 0.0 {
                continue;
            }
            let (a, b) = (piece[0], piece[1]);
            if w.im == 0.0 && w.re >= a && w.re <= b {
                return Err(Error::domain(format!("z = {z} lies on the support of the density")));
            }
            acc += rho * ((w - a).ln() - (w - b).ln());
        }
    }
    Ok(acc)
}

/// `ν({x})`, obtained by Neville extrapolation to `y = 0` of
/// `−(y/2)·Im(F(x−1+iy) − F(x−1−iy)) = ∫ y²/((x−s)²+y²) dν(s)`.
pub fn atom_mass(nu: &MeasureOnInterval, x: f64, y_ladder: &[f64]) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("x = {x} outside [0,1]")));
    }
    if y_ladder.len() < 2 {
        return Err(Error::invalid("ladder needs at least two values"));
    }
    if y_ladder.iter().any(|y| !(*y > 0.0 && y.is_finite())) || y_ladder.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::invalid("ladder must be positive and strictly decreasing"));
    }
    let samples = y_ladder
        .iter()
        .map(|&y| {
            let up = cauchy_transform(nu, Complex64::new(x - 1.0, y))?;
            let down = cauchy_transform(nu, Complex64::new(x - 1.0, -y))?;
            Ok(-0.5 * y * (up - down).im)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(neville_at_zero(y_ladder, &samples))
}

/// Value at 0 of the interpolating polynomial through `(xs[i], ys[i])`.
fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i]);
        }
    }
    p[0]
}

/// `y_k = y0 · 2^{−k}` for `k < levels`.
pub fn geometric_ladder(y0: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|k| y0 * 0.5f64.powi(k as i32)).collect()
}
