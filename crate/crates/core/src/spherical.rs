//! Spherical functions of SL(2,R) along the diagonal flow.
//!
//! For a spherical representation with parameter `s` the function
//! `φ_s(g_t)` has the convergent expansion
//!
//! ```text
//! φ_s(g_t) = c(s) e^{(s−1)t} Σ Γ_n(s) e^{−2nt} + c(−s) e^{(−s−1)t} Σ Γ_n(−s) e^{−2nt}
//! ```
//!
//! with `c(s) = Γ(s/2) / (√π Γ((s+1)/2))`. Each series solves the radial
//! Casimir equation `φ'' + 2 coth(2t) φ' = (s² − 1) φ`. An independent
//! evaluation comes from the integral over the circle
//! `(1/2π) ∫ (e^{2t} cos²θ + e^{−2t} sin²θ)^{(s−1)/2} dθ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::{is_gamma_pole, ln_gamma};

/// Below this `t` the series is replaced by the quadrature oracle.
pub const T_MIN: f64 = 0.05;
/// Hard cap on series length.
pub const N_MAX: usize = 500;
/// Terms always summed before the relative stopping rule applies.
pub const N_MIN: usize = 10;
/// Default relative truncation tolerance.
pub const DEFAULT_TOL: f64 = 1e-15;
/// Absolute target of the quadrature oracle.
pub const ORACLE_TOL: f64 = 1e-12;
/// Principal-series parameters with `|s|` below this go to the oracle: the
/// two series terms both blow up like `1/s` and cancel.
pub const SMALL_S: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesClass {
    /// `s ∈ (0, 1)`
    Complementary,
    /// `s = iv`, `v ≥ 0`
    Principal,
    /// `s = 1`
    Trivial,
}

/// Parameter of a spherical unitary representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalParam {
    s: Complex64,
    class: SeriesClass,
}

impl SphericalParam {
    pub fn complementary(u: f64) -> Result<Self> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!("complementary parameter {u} not in (0,1)")));
        }
        Ok(SphericalParam { s: Complex64::new(u, 0.0), class: SeriesClass::Complementary })
    }

    pub fn principal(v: f64) -> Result<Self> {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::domain(format!("principal parameter {v} must be finite and ≥ 0")));
        }
        Ok(SphericalParam { s: Complex64::new(0.0, v), class: SeriesClass::Principal })
    }

    pub fn trivial() -> Self {
        SphericalParam { s: Complex64::new(1.0, 0.0), class: SeriesClass::Trivial }
    }

    /// Real `s ∈ (0, 1]`.
    pub fn real(u: f64) -> Result<Self> {
        if u == 1.0 {
            Ok(Self::trivial())
        } else {
            Self::complementary(u)
        }
    }

    /// Classifies an arbitrary complex number, rejecting non-unitary ones.
    pub fn from_complex(s: Complex64) -> Result<Self> {
        if s.im == 0.0 {
            Self::real(s.re)
        } else if s.re == 0.0 {
            // i·v and −i·v are the same representation
            Self::principal(s.im.abs())
        } else {
            Err(Error::domain(format!("s = {s} is not a spherical unitary parameter")))
        }
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn class(&self) -> SeriesClass {
        self.class
    }

    /// Casimir eigenvalue `(1 − s²)/4`.
    pub fn casimir_eigenvalue(&self) -> f64 {
        ((Complex64::new(1.0, 0.0) - self.s * self.s) / 4.0).re
    }
}

/// Coefficients `Γ_0, …, Γ_N` of the spherical-function series.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSeries {
    pub s: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl GammaSeries {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// `Γ_0 = 1`, `Γ_n = 0` for odd `n`, and for even `n`
/// `n(n − s) Γ_n = Σ_{0<k≤n/2} Γ_{n−2k} (2n − 4k − s + 1)`.
///
/// With `n = 2m` the right-hand side is `Σ_{j<m} Γ_{2j}(4j + 1 − s)`, so a
/// running sum gives every coefficient in O(N).
pub fn gamma_coeffs(s: Complex64, n: usize) -> Result<GammaSeries> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::domain("non-finite s"));
    }
    if s.re > 1.0 {
        return Err(Error::domain(format!("Re(s) = {} > 1: the recursion may divide by zero", s.re)));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    let mut running = Complex64::new(0.0, 0.0);
    let mut m = 1;
    while 2 * m <= n {
        let prev = coeffs[2 * m - 2];
        running += prev * (Complex64::new(4.0 * (m - 1) as f64 + 1.0, 0.0) - s);
        let nn = 2.0 * m as f64;
        coeffs[2 * m] = running / (nn * (Complex64::new(nn, 0.0) - s));
        m += 1;
    }
    Ok(GammaSeries { s, coeffs })
}

/// Harish-Chandra's function `c(s) = Γ(s/2) / (√π Γ((s+1)/2))`.
pub fn c_function(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        // trivial representation, φ ≡ 1
        return Ok(s);
    }
    let half = s / 2.0;
    if is_gamma_pole(half) {
        return Err(Error::domain(format!("c(s) has a pole at s = {s}")));
    }
    let num = ln_gamma(half)?;
    let den_arg = (s + 1.0) / 2.0;
    if is_gamma_pole(den_arg) {
        // 1/Γ vanishes at its poles
        return Ok(Complex64::new(0.0, 0.0));
    }
    let den = ln_gamma(den_arg)?;
    Ok((num - den - 0.5 * PI.ln()).exp())
}

/// `φ_s(g_t)` and its first two `t`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

/// Spherical function with its series data precomputed.
#[derive(Debug, Clone)]
pub struct SphericalFunction {
    param: SphericalParam,
    c_plus: Complex64,
    c_minus: Complex64,
    plus: GammaSeries,
    minus: GammaSeries,
}

struct SeriesSum {
    value: Complex64,
    d1: Complex64,
    d2: Complex64,
}

impl SphericalFunction {
    pub fn new(param: SphericalParam) -> Result<Self> {
        let s = param.s;
        if param.class == SeriesClass::Trivial {
            return Ok(SphericalFunction {
                param,
                c_plus: Complex64::new(1.0, 0.0),
                c_minus: Complex64::new(0.0, 0.0),
                plus: GammaSeries { s, coeffs: vec![Complex64::new(1.0, 0.0)] },
                minus: GammaSeries { s: -s, coeffs: vec![] },
            });
        }
        let small = param.class == SeriesClass::Principal && s.norm() < SMALL_S;
        let (c_plus, c_minus) = if small {
            (Complex64::new(f64::NAN, 0.0), Complex64::new(f64::NAN, 0.0))
        } else {
            (c_function(s)?, c_function(-s)?)
        };
        Ok(SphericalFunction { param, c_plus, c_minus, plus: gamma_coeffs(s, N_MAX)?, minus: gamma_coeffs(-s, N_MAX)? })
    }

    pub fn param(&self) -> SphericalParam {
        self.param
    }

    /// Leading coefficient `c(s)`.
    pub fn c_plus(&self) -> Complex64 {
        self.c_plus
    }

    /// Coefficient `c(−s)` of the subleading series.
    pub fn c_minus(&self) -> Complex64 {
        self.c_minus
    }

    fn uses_oracle(&self, t: f64) -> bool {
        t < T_MIN || self.c_plus.re.is_nan()
    }

    /// `Σ_{n ≥ skip} Γ_n e^{(μ − 2n)t}` and derivatives, `μ = ±s − 1`.
    fn series(coeffs: &[Complex64], mu: Complex64, t: f64, tol: f64, skip: usize) -> Result<SeriesSum> {
        let mut value = Complex64::new(0.0, 0.0);
        let mut d1 = Complex64::new(0.0, 0.0);
        let mut d2 = Complex64::new(0.0, 0.0);
        let mut n = skip;
        let mut converged = false;
        let mut n_reference = Complex64::new(0.0, 0.0);
        while n <= N_MAX && n < coeffs.len() {
            let rate = mu - 2.0 * n as f64;
            let term = coeffs[n] * (rate * t).exp();
            value += term;
            d1 += term * rate;
            d2 += term * rate * rate;
            if n == 0 {
                n_reference = term;
            }
            // the stopping rule watches the value and both derivatives
            let size = term.norm() * (1.0 + rate.norm() * rate.norm());
            let scale = value.norm().max(n_reference.norm() * f64::EPSILON);
            if n >= N_MIN && size <= tol * scale {
                converged = true;
                break;
            }
            n += 2;
        }
        if !converged && coeffs.len() > N_MAX {
            return Err(Error::Numerical {
                msg: format!("spherical series did not converge within {N_MAX} terms at t = {t}"),
                partial: Some(value),
            });
        }
        Ok(SeriesSum { value, d1, d2 })
    }

    fn jet_series(&self, t: f64, tol: f64, skip_leading: bool) -> Result<Jet> {
        let s = self.param.s;
        let skip = if skip_leading { 2 } else { 0 };
        let p = Self::series(&self.plus.coeffs, s - 1.0, t, tol, skip)?;
        let m = Self::series(&self.minus.coeffs, -s - 1.0, t, tol, 0)?;
        Ok(Jet {
            value: self.c_plus * p.value + self.c_minus * m.value,
            d1: self.c_plus * p.d1 + self.c_minus * m.d1,
            d2: self.c_plus * p.d2 + self.c_minus * m.d2,
        })
    }

    fn check_t(t: f64) -> Result<()> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("t = {t} must be finite and ≥ 0")));
        }
        Ok(())
    }

    /// `φ_s(g_t)`; see [`phi`].
    pub fn value(&self, t: f64, tol: f64) -> Result<Complex64> {
        Self::check_t(t)?;
        if self.param.class == SeriesClass::Trivial {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let v = if self.uses_oracle(t) { phi_oracle(self.param.s, t)? } else { self.jet_series(t, tol, false)?.value };
        Ok(self.realify(v, tol))
    }

    fn realify(&self, v: Complex64, tol: f64) -> Complex64 {
        match self.param.class {
            SeriesClass::Principal | SeriesClass::Complementary if v.im.abs() <= tol.max(1e-12) * v.norm().max(1.0) => {
                Complex64::new(v.re, 0.0)
            }
            _ => v,
        }
    }

    /// `φ_s(g_t) − c(s) e^{(s−1)t}` evaluated without cancellation: the
    /// leading term is dropped from the series instead of subtracted.
    pub fn defect(&self, t: f64) -> Result<Complex64> {
        Self::check_t(t)?;
        let s = self.param.s;
        if self.param.class == SeriesClass::Trivial {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if self.uses_oracle(t) {
            let lead = if self.c_plus.re.is_nan() { c_function(s)? } else { self.c_plus };
            return Ok(phi_oracle(s, t)? - lead * ((s - 1.0) * t).exp());
        }
        let p = Self::series(&self.plus.coeffs, s - 1.0, t, DEFAULT_TOL, 2)?;
        let m = Self::series(&self.minus.coeffs, -s - 1.0, t, DEFAULT_TOL, 0)?;
        Ok(self.c_plus * p.value + self.c_minus * m.value)
    }

    /// Value and first two derivatives from term-wise differentiation.
    pub fn jet(&self, t: f64) -> Result<Jet> {
        Self::check_t(t)?;
        if self.param.class == SeriesClass::Trivial {
            let zero = Complex64::new(0.0, 0.0);
            return Ok(Jet { value: Complex64::new(1.0, 0.0), d1: zero, d2: zero });
        }
        if self.uses_oracle(t) {
            return Err(Error::domain(format!("series derivatives need t ≥ {T_MIN} and |s| ≥ {SMALL_S}")));
        }
        self.jet_series(t, DEFAULT_TOL, false)
    }
}

/// `φ_s(g_t)` from the two-series expansion, with the quadrature oracle for
/// `t < T_MIN` (and for principal `|s| < SMALL_S`). Truncation: stop once a
/// term is below `tol` relative to the partial sum after at least `N_MIN`
/// terms; failing by `N_MAX` is a numerical error carrying the partial sum.
pub fn phi(s: &SphericalParam, t: f64, tol: f64) -> Result<Complex64> {
    SphericalFunction::new(*s)?.value(t, tol)
}

/// `(1/2π) ∫_0^{2π} (e^{2t} cos²θ + e^{−2t} sin²θ)^{(s−1)/2} dθ`.
///
/// By symmetry this is four times the integral over a quarter period; with
/// `u = π/2 − θ` the integrand peaks at `u = 0` with width `e^{−2t}`, so the
/// panels are graded geometrically toward `u = 0`.
pub fn phi_oracle(s: Complex64, t: f64) -> Result<Complex64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t = {t} must be finite and ≥ 0")));
    }
    let e2 = (2.0 * t).exp();
    let em2 = (-2.0 * t).exp();
    let expo = (s - 1.0) / 2.0;
    let f = move |u: f64| {
        let (sn, cs) = u.sin_cos();
        let base = e2 * sn * sn + em2 * cs * cs;
        (expo * base.ln()).exp()
    };
    let mut breaks = vec![0.0];
    let floor = 1e-3 * em2;
    let mut k = 60;
    while k > 0 {
        let u = 0.5 * PI * 0.5f64.powi(k);
        if u >= floor {
            breaks.push(u);
        }
        k -= 1;
    }
    breaks.push(0.5 * PI);
    breaks.dedup();
    let scale = 2.0 / PI;
    let integral = quadrature::adaptive(&f, &breaks, ORACLE_TOL / scale, 200_000).map_err(|e| match e {
        Error::Numerical { msg, partial } => Error::Numerical { msg, partial: partial.map(|p| p * scale) },
        other => other,
    })?;
    Ok(integral.value * scale)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("empty t grid"));
    }
    Ok(())
}

/// `max_t e^t |φ_s(g_t) − c(s) e^{(s−1)t}|` over the grid.
pub fn harish_defect(s: f64, t_grid: &[f64]) -> Result<f64> {
    check_grid(t_grid)?;
    let f = SphericalFunction::new(SphericalParam::real(s)?)?;
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let d = f.defect(t)?;
        worst = worst.max(t.exp() * d.norm());
    }
    if !worst.is_finite() {
        return Err(Error::numerical("non-finite Harish defect"));
    }
    Ok(worst)
}

/// `max_t e^{(1−δ)t} |φ_{iv}(g_t)|` over the grid.
pub fn ratner_check(v: f64, delta: f64, t_grid: &[f64]) -> Result<f64> {
    check_grid(t_grid)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("δ = {delta} not in (0,1)")));
    }
    let f = SphericalFunction::new(SphericalParam::principal(v)?)?;
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let val = f.value(t, DEFAULT_TOL)?;
        worst = worst.max(((1.0 - delta) * t).exp() * val.norm());
    }
    if !worst.is_finite() {
        return Err(Error::numerical("non-finite Ratner envelope"));
    }
    Ok(worst)
}

/// Radial form of the Casimir eigen-equation applied to the series:
/// `|φ'' + 2 coth(2t) φ' − (s² − 1) φ|`.
pub fn casimir_residual(s: &SphericalParam, t: f64) -> Result<f64> {
    if t < 0.25 {
        return Err(Error::domain(format!("t = {t} below 0.25")));
    }
    let f = SphericalFunction::new(*s)?;
    let jet = f.jet(t)?;
    Ok(radial_casimir(s.s(), t, jet.value, jet.d1, jet.d2).norm())
}

/// `φ'' + 2 coth(2t) φ' − (s² − 1) φ`.
pub fn radial_casimir(s: Complex64, t: f64, value: Complex64, d1: Complex64, d2: Complex64) -> Complex64 {
    let coth = 1.0 / (2.0 * t).tanh();
    d2 + d1 * (2.0 * coth) - (s * s - 1.0) * value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn param_classes() {
        assert_eq!(SphericalParam::real(1.0).unwrap().class(), SeriesClass::Trivial);
        assert_eq!(SphericalParam::real(0.3).unwrap().class(), SeriesClass::Complementary);
        assert!(SphericalParam::real(1.2).is_err());
        assert!(SphericalParam::real(0.0).is_err());
        assert!(SphericalParam::principal(-1.0).is_err());
        assert_eq!(SphericalParam::from_complex(c(0.0, -2.0)).unwrap().s(), c(0.0, 2.0));
        assert!(SphericalParam::from_complex(c(0.3, 0.4)).is_err());

        let lam = SphericalParam::complementary(0.6).unwrap().casimir_eigenvalue();
        assert!((lam - 0.16).abs() < 1e-15);
        let lam = SphericalParam::principal(2.0).unwrap().casimir_eigenvalue();
        assert!((lam - 1.25).abs() < 1e-15);
        assert_eq!(SphericalParam::trivial().casimir_eigenvalue(), 0.0);
    }

    #[test]
    fn gamma_coeff_examples() {
        let g = gamma_coeffs(c(0.5, 0.0), 6).unwrap();
        assert_eq!(g.coeffs[0], c(1.0, 0.0));
        assert_eq!(g.coeffs[3], c(0.0, 0.0));
        assert!((g.coeffs[2] - c(1.0 / 6.0, 0.0)).norm() < 1e-15);
        assert!(gamma_coeffs(c(1.5, 0.0), 4).is_err());
    }

    #[test]
    fn gamma_coeffs_satisfy_quadratic_form_of_recursion() {
        // check the original double-sum form, independent of the running sum
        for s in [c(0.3, 0.0), c(-0.7, 0.0), c(0.0, 1.5)] {
            let g = gamma_coeffs(s, 40).unwrap();
            for n in (2..=40).step_by(2) {
                let mut rhs = c(0.0, 0.0);
                for k in 1..=n / 2 {
                    rhs += g.coeffs[n - 2 * k] * (c((2 * n - 4 * k + 1) as f64, 0.0) - s);
                }
                let lhs = g.coeffs[n] * (n as f64) * (c(n as f64, 0.0) - s);
                assert!((lhs - rhs).norm() <= 1e-14 * rhs.norm().max(1e-300));
            }
            for n in (1..40).step_by(2) {
                assert_eq!(g.coeffs[n], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn c_function_table() {
        // 40-digit reference values, rounded to 20 digits
        let table: &[(Complex64, Complex64)] = &[
            (c(1.0, 0.0), c(1.0, 0.0)),
            (c(0.5, 0.0), c(1.6692536833481463726, 0.0)),
            (c(-0.5, 0.0), c(-0.76275976350181318806, 0.0)),
            (c(0.6, 0.0), c(1.4497242609597911559, 0.0)),
            (c(-0.6, 0.0), c(-0.53174633646989845814, 0.0)),
            (c(0.1, 0.0), c(6.7970140266530627941, 0.0)),
            (c(-0.9, 0.0), c(-0.10406853654515063463, 0.0)),
            (c(0.0, 1.0), c(0.4042983397092124423, -0.72847058074492977755)),
            (c(0.0, -1.0), c(0.4042983397092124423, 0.72847058074492977755)),
            (c(0.0, 5.0), c(0.23929439247471097115, -0.26469262660595748786)),
            (c(0.3, 0.4), c(1.1713502930311761311, -1.0524330291385408435)),
        ];
        for &(s, want) in table {
            let got = c_function(s).unwrap();
            assert!((got - want).norm() <= 1e-12 * want.norm(), "c({s}) = {got} want {want}");
        }
        assert!(c_function(c(0.0, 0.0)).is_err());
        assert!(c_function(c(-2.0, 0.0)).is_err());
        // 1/Γ(0) = 0
        assert_eq!(c_function(c(-1.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn phi_trivial_and_identity() {
        let triv = SphericalParam::trivial();
        for t in [0.0, 0.01, 1.0, 30.0] {
            assert_eq!(phi(&triv, t, DEFAULT_TOL).unwrap(), c(1.0, 0.0));
        }
        for s in [SphericalParam::complementary(0.4).unwrap(), SphericalParam::principal(3.0).unwrap()] {
            let v = phi(&s, 0.0, DEFAULT_TOL).unwrap();
            assert!((v - c(1.0, 0.0)).norm() < 1e-12);
        }
        assert!(phi(&triv, -1.0, DEFAULT_TOL).is_err());
    }

    #[test]
    fn oracle_trivial_cases() {
        assert!((phi_oracle(c(1.0, 0.0), 3.0).unwrap() - c(1.0, 0.0)).norm() < 1e-13);
        assert!((phi_oracle(c(0.3, 0.0), 0.0).unwrap() - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn oracle_regression_value() {
        // φ_{1/2}(g_2): mpmath tanh-sinh and scipy adaptive Gauss–Kronrod agree
        // to 1e-15 on this value
        let v = phi_oracle(c(0.5, 0.0), 2.0).unwrap();
        assert!((v.re - PHI_HALF_AT_2).abs() < 1e-11, "{}", v.re);
        let series = phi(&SphericalParam::complementary(0.5).unwrap(), 2.0, DEFAULT_TOL).unwrap();
        assert!((series.re - PHI_HALF_AT_2).abs() < 1e-10);
    }

    const PHI_HALF_AT_2: f64 = 0.576_139_057_029_377_1;

    #[test]
    fn small_principal_parameter_uses_oracle() {
        let f = SphericalFunction::new(SphericalParam::principal(0.0).unwrap()).unwrap();
        let v = f.value(3.0, DEFAULT_TOL).unwrap();
        let o = phi_oracle(c(0.0, 0.0), 3.0).unwrap();
        assert!((v - o).norm() < 1e-13);
        assert!(f.jet(3.0).is_err());
        // continuity across the cut-over
        let near = phi(&SphericalParam::principal(2e-4).unwrap(), 3.0, DEFAULT_TOL).unwrap();
        assert!((near - v).norm() < 1e-7);
    }

    #[test]
    fn principal_values_are_real() {
        let f = SphericalFunction::new(SphericalParam::principal(1.7).unwrap()).unwrap();
        for t in [0.02, 0.3, 2.0, 9.0] {
            assert_eq!(f.value(t, DEFAULT_TOL).unwrap().im, 0.0);
        }
    }

    #[test]
    fn defect_agrees_with_subtraction_at_moderate_t() {
        let f = SphericalFunction::new(SphericalParam::complementary(0.6).unwrap()).unwrap();
        for t in [0.01, 0.5, 2.0, 5.0] {
            let direct = f.value(t, DEFAULT_TOL).unwrap() - f.c_plus() * ((0.6 - 1.0) * t).exp();
            assert!((f.defect(t).unwrap() - direct).norm() < 1e-12);
        }
        // far out the subtraction has cancelled completely but the defect
        // still decays like c(−s) e^{−(1+s)t}
        let t = 60.0;
        let d = f.defect(t).unwrap();
        let lead = f.c_minus() * (-(1.6) * t).exp();
        assert!(((d - lead) / lead).norm() < 1e-12);
    }

    #[test]
    fn harish_examples() {
        let grid: Vec<f64> = (1..=15).map(|t| t as f64).collect();
        assert_eq!(harish_defect(1.0, &grid).unwrap(), 0.0);
        let full = harish_defect(0.5, &grid).unwrap();
        assert!(full.is_finite() && full > 0.0);
        // leading term of the defect at t = 5: c(−s) e^{(−s−1)t}(1 + Γ_2(−s) e^{−4t})
        let s = 0.5;
        let at5 = harish_defect(s, &[5.0]).unwrap();
        let g2 = gamma_coeffs(c(-s, 0.0), 2).unwrap().coeffs[2];
        let lead = 5f64.exp()
            * (c_function(c(-s, 0.0)).unwrap() * ((-s - 1.0) * 5.0f64).exp() * (g2 * (-20.0f64).exp() + 1.0)).norm();
        assert!(((at5 - lead) / lead).abs() < 0.1);
        assert!(harish_defect(0.5, &[]).is_err());
    }

    #[test]
    fn ratner_at_origin() {
        let v = ratner_check(2.0, 0.1, &[0.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(ratner_check(2.0, 1.5, &[0.0]).is_err());
    }

    #[test]
    fn casimir_trivial_and_domain() {
        assert_eq!(casimir_residual(&SphericalParam::trivial(), 1.0).unwrap(), 0.0);
        assert!(casimir_residual(&SphericalParam::complementary(0.5).unwrap(), 0.1).is_err());
    }

    #[test]
    fn radial_form_pinned_by_finite_differences_of_oracle() {
        // centred differences of the quadrature oracle, step 1e-3
        let h = 1e-3;
        for (s, t) in [(c(0.7, 0.0), 2.0), (c(0.0, 1.0), 3.0), (c(0.3, 0.0), 1.0)] {
            let f = |x: f64| phi_oracle(s, x).unwrap();
            let (fm, f0, fp) = (f(t - h), f(t), f(t + h));
            let d1 = (fp - fm) / (2.0 * h);
            let d2 = (fp - f0 * 2.0 + fm) / (h * h);
            let scale = f0.norm();
            let res = radial_casimir(s, t, f0, d1, d2).norm() / scale;
            assert!(res < 1e-5, "s={s} t={t} residual {res:e}");
            // the tempting alternatives are clearly rejected
            let coth_t = 1.0 / t.tanh();
            let wrong_drift = (d2 + d1 * coth_t - (s * s - 1.0) * f0).norm() / scale;
            let wrong_sign = (d2 + d1 * (2.0 / (2.0 * t).tanh()) + (s * s - 1.0) * f0).norm() / scale;
            assert!(wrong_drift > 1e-2 && wrong_sign > 1e-2, "{wrong_drift} {wrong_sign}");
        }
    }

    #[test]
    fn casimir_examples() {
        let r = casimir_residual(&SphericalParam::complementary(0.7).unwrap(), 2.0).unwrap();
        assert!(r <= 1e-6);
        let r = casimir_residual(&SphericalParam::principal(1.0).unwrap(), 3.0).unwrap();
        assert!(r <= 1e-6);
    }
}
