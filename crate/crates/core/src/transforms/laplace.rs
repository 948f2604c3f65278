//! Laplace transforms of correlation functions and their continuation past
//! the imaginary axis for discrete complementary-series spectra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Integral};
use crate::spherical::{c_function, SphericalFunction, SphericalParam, DEFAULT_TOL, T_MIN};

/// Integrand magnitude at the truncation time.
pub const TAIL_INTEGRAND_TOL: f64 = 1e-14;
/// Smallest `Re z` accepted by [`laplace_numeric`].
pub const MIN_RE_Z: f64 = 0.05;
/// Absolute target for each quadrature in this module.
pub const QUAD_TOL: f64 = 1e-13;
const MAX_PANELS: usize = 400_000;
const MAX_T: f64 = 20_000.0;

/// A bounded correlation function `t ↦ C(t)` on `t ≥ 0`.
pub trait Correlation: Sync {
    fn eval(&self, t: f64) -> f64;
    /// An upper bound for `|C(t)|`.
    fn bound(&self) -> f64;
    /// Largest `t` at which the function is known.
    fn horizon(&self) -> f64 {
        f64::INFINITY
    }
}

/// Closure-backed correlation with a declared bound.
pub struct FnCorrelation<F> {
    pub f: F,
    pub bound: f64,
}

impl<F: Fn(f64) -> f64 + Sync> Correlation for FnCorrelation<F> {
    fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    fn bound(&self) -> f64 {
        self.bound
    }
}

/// Uniformly sampled correlation, linearly interpolated between samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledCorrelation {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl Correlation for SampledCorrelation {
    fn eval(&self, t: f64) -> f64 {
        let x = t / self.dt;
        let i = (x.floor() as usize).min(self.values.len().saturating_sub(2));
        let frac = x - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    fn bound(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    fn horizon(&self) -> f64 {
        self.dt * (self.values.len().saturating_sub(1)) as f64
    }
}

/// Numerical Laplace transform with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceValue {
    pub value: Complex64,
    /// Quadrature error estimate plus the analytic tail bound.
    pub abs_error: f64,
    pub t_cut: f64,
}

fn panel_breaks(t_cut: f64, z_im: f64) -> Vec<f64> {
    let h = if z_im.abs() > 1.0 { (std::f64::consts::PI / z_im.abs()).min(1.0) } else { 1.0 };
    let mut breaks = vec![0.0];
    if t_cut > T_MIN {
        breaks.push(T_MIN);
    }
    let mut t = h;
    while t < t_cut {
        if t > T_MIN {
            breaks.push(t);
        }
        t += h;
    }
    breaks.push(t_cut);
    breaks
}

/// `∫_0^∞ e^{−zt} C(t) dt` for `Re z ≥ 0.05`.
///
/// The integral is cut at `T` with `sup|C| · e^{−Re z · T} ≤ 1e−14`; the
/// neglected tail is at most `sup|C| e^{−Re z T} / Re z` and enters the
/// reported error. Fails when that error exceeds `tol`.
pub fn laplace_numeric(corr: &dyn Correlation, z: Complex64, tol: f64) -> Result<LaplaceValue> {
    if !(z.re >= MIN_RE_Z) || !z.im.is_finite() {
        return Err(Error::domain(format!("laplace_numeric needs Re z ≥ {MIN_RE_Z}, got {z}")));
    }
    let bound = corr.bound();
    if !(bound.is_finite() && bound >= 0.0) {
        return Err(Error::invalid("correlation bound must be finite"));
    }
    let t_cut = if bound > 0.0 { ((bound / TAIL_INTEGRAND_TOL).ln() / z.re).max(1.0) } else { 1.0 };
    if t_cut > corr.horizon() {
        return Err(Error::invalid(format!(
            "samples end at t = {} but the transform needs t up to {t_cut:.3}",
            corr.horizon()
        )));
    }
    let f = |t: f64| (-z * t).exp() * corr.eval(t);
    let Integral { value, abs_error } = quadrature::adaptive(&f, &panel_breaks(t_cut, z.im), QUAD_TOL, MAX_PANELS)?;
    let tail = bound * (-z.re * t_cut).exp() / z.re;
    let abs_error = abs_error + tail;
    if abs_error > tol {
        return Err(Error::Numerical {
            msg: format!("Laplace error bound {abs_error:e} exceeds tolerance {tol:e}"),
            partial: Some(value),
        });
    }
    Ok(LaplaceValue { value, abs_error, t_cut })
}

/// Integrates `f` on `[0, ∞)` where `|f(t)|` eventually decays at least like
/// `e^{−rate·t}`. Panels are added until the tail estimate
/// `max|f| on the last panel / rate` is below the tolerance.
fn integrate_decaying(f: &dyn Fn(f64) -> Complex64, rate: f64, z_im: f64, abs_tol: f64) -> Result<Integral> {
    if !(rate > 0.0) {
        return Err(Error::domain(format!("integrand does not decay (rate {rate})")));
    }
    let chunk = (8.0 / rate).clamp(2.0, 64.0);
    let mut start = 0.0;
    let mut total = Integral { value: Complex64::new(0.0, 0.0), abs_error: 0.0 };
    loop {
        let end = start + chunk;
        let mut breaks = panel_breaks(end, z_im);
        breaks.retain(|&b| b >= start);
        if breaks[0] > start {
            breaks.insert(0, start);
        }
        let part = quadrature::adaptive(f, &breaks, abs_tol * chunk / 64.0, MAX_PANELS)?;
        total.value += part.value;
        total.abs_error += part.abs_error;
        let probe = (0..8).map(|k| f(end - chunk * k as f64 / 16.0).norm()).fold(0.0, f64::max);
        let tail = probe / rate;
        start = end;
        if tail <= abs_tol.min(TAIL_INTEGRAND_TOL) || !probe.is_finite() {
            total.abs_error += tail;
            if !total.value.re.is_finite() || !total.value.im.is_finite() {
                return Err(Error::numerical("non-finite Laplace integrand"));
            }
            return Ok(total);
        }
        if start > MAX_T {
            return Err(Error::Numerical {
                msg: format!("Laplace tail still {tail:e} at t = {start}"),
                partial: Some(total.value),
            });
        }
    }
}

/// Discrete spectral measure on the complementary series: atoms `(s_i, w_i)`
/// where `w_i` plays the role of the pairing of the two observables'
/// components in the representation of parameter `s_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralAtoms {
    atoms: Vec<(f64, f64)>,
}

impl SpectralAtoms {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(s, w)) in atoms.iter().enumerate() {
            if !(s > 0.0 && s <= 1.0) {
                return Err(Error::invalid(format!("atom {i}: s = {s} not in (0,1]")));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("atom {i}: weight {w} must be finite and ≥ 0")));
            }
            if i > 0 && s <= atoms[i - 1].0 {
                return Err(Error::invalid("atom positions must be strictly increasing"));
            }
        }
        Ok(SpectralAtoms { atoms })
    }

    pub fn empty() -> Self {
        SpectralAtoms { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `C(t) = Σ w_i φ_{s_i}(g_t)` as a [`Correlation`].
    pub fn correlation(&self) -> Result<AtomCorrelation> {
        let funcs = self
            .atoms
            .iter()
            .map(|&(s, _)| SphericalFunction::new(SphericalParam::real(s)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(AtomCorrelation { weights: self.atoms.iter().map(|a| a.1).collect(), funcs })
    }
}

/// Correlation of a discrete spectral measure.
pub struct AtomCorrelation {
    weights: Vec<f64>,
    funcs: Vec<SphericalFunction>,
}

impl Correlation for AtomCorrelation {
    fn eval(&self, t: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.funcs)
            .map(|(w, f)| w * f.value(t, DEFAULT_TOL).map(|v| v.re).unwrap_or(f64::NAN))
            .sum()
    }

    fn bound(&self) -> f64 {
        // |φ_s| ≤ φ_s(e) = 1
        self.weights.iter().sum()
    }
}

fn check_pole(atoms: &SpectralAtoms, z: Complex64, delta: f64) -> Result<()> {
    for &(s, w) in atoms.atoms() {
        if s >= delta && w != 0.0 && (z - Complex64::new(s - 1.0, 0.0)).norm() <= 1e-14 {
            return Err(Error::Pole { z, what: format!("atom (s = {s}, w = {w})") });
        }
    }
    Ok(())
}

/// `B_δ(z) = Σ_{s_i ≥ δ} c(s_i) w_i / (z − s_i + 1)`.
pub fn b_delta(atoms: &SpectralAtoms, z: Complex64, delta: f64) -> Result<Complex64> {
    if !(delta > 0.0) {
        return Err(Error::domain(format!("δ = {delta} must be positive")));
    }
    check_pole(atoms, z, delta)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for &(s, w) in atoms.atoms() {
        if s >= delta {
            let c = c_function(Complex64::new(s, 0.0))?;
            acc += c * w / (z - s + 1.0);
        }
    }
    Ok(acc)
}

/// Continuation of `F(z) = ∫ e^{−zt} Σ w_i φ_{s_i}(g_t) dt` to
/// `Re z > −1 + 2δ`, split as `A_δ + B_δ`.
///
/// `A_δ` collects the Laplace transforms of `φ_{s_i}` for `s_i < δ` and of
/// the defects `φ_{s_i} − c(s_i) e^{(s_i−1)t}` for `s_i ≥ δ`; both integrals
/// converge on the whole half-plane.
pub struct ExtendedTransform {
    atoms: SpectralAtoms,
    delta: f64,
    funcs: Vec<SphericalFunction>,
}

impl ExtendedTransform {
    pub fn new(atoms: SpectralAtoms, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::domain(format!("δ = {delta} must lie in (0, 1/2)")));
        }
        let funcs = atoms
            .atoms()
            .iter()
            .map(|&(s, _)| SphericalFunction::new(SphericalParam::real(s)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtendedTransform { atoms, delta, funcs })
    }

    pub fn atoms(&self) -> &SpectralAtoms {
        &self.atoms
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn check_domain(&self, z: Complex64) -> Result<()> {
        if !(z.re > -1.0 + 2.0 * self.delta) || !z.im.is_finite() {
            return Err(Error::domain(format!("z = {z} outside Re z > {}", -1.0 + 2.0 * self.delta)));
        }
        Ok(())
    }

    /// The holomorphic part `A_δ(z)`.
    pub fn a_part(&self, z: Complex64) -> Result<Integral> {
        self.check_domain(z)?;
        let mut total = Integral { value: Complex64::new(0.0, 0.0), abs_error: 0.0 };
        for (&(s, w), f) in self.atoms.atoms().iter().zip(&self.funcs) {
            if w == 0.0 || s == 1.0 {
                // the trivial representation has no defect
                continue;
            }
            let part = if s >= self.delta {
                let g = |t: f64| (-z * t).exp() * f.defect(t).unwrap_or(Complex64::new(f64::NAN, 0.0));
                integrate_decaying(&g, z.re + 1.0 + s, z.im, QUAD_TOL)?
            } else {
                let g = |t: f64| (-z * t).exp() * f.value(t, DEFAULT_TOL).unwrap_or(Complex64::new(f64::NAN, 0.0));
                integrate_decaying(&g, z.re + 1.0 - s, z.im, QUAD_TOL)?
            };
            total.value += part.value * w;
            total.abs_error += part.abs_error * w;
        }
        Ok(total)
    }

    pub fn b_part(&self, z: Complex64) -> Result<Complex64> {
        b_delta(&self.atoms, z, self.delta)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_domain(z)?;
        check_pole(&self.atoms, z, self.delta)?;
        Ok(self.a_part(z)?.value + self.b_part(z)?)
    }

    /// Poles `s_i − 1` of the continuation (atoms with `s_i ≥ δ`, `w_i > 0`).
    pub fn poles(&self) -> Vec<f64> {
        self.atoms.atoms().iter().filter(|&&(s, w)| s >= self.delta && w > 0.0).map(|&(s, _)| s - 1.0).collect()
    }
}

/// One-shot form of [`ExtendedTransform::eval`].
pub fn extended_f(atoms: &SpectralAtoms, z: Complex64, delta: f64) -> Result<Complex64> {
    ExtendedTransform::new(atoms.clone(), delta)?.eval(z)
}
