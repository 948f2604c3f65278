//! The Finsler norm `‖v‖_x = sup_γ |v(γ)| / |Φ(x)(γ)|` truncated to saddle
//! connections of bounded length, and its behaviour along paths.

use num_complex::Complex64;
use serde::Serialize;

use super::{saddle_connections, systole, Cocycle, Origami, SaddleConnection, Staircase};
use crate::error::{Error, Result};
use crate::lattice::LENGTH_SLACK;
use crate::quadrature;
use crate::sl2::exp_matrix;

/// Doubling the truncation radius must move the norm by less than this for
/// the value to count as stabilized.
pub const STABILIZATION_TOL: f64 = 1e-9;
/// Lower bound on the default truncation radius `max(20, 40·sys)`.
pub const DEFAULT_NORM_FLOOR: f64 = 20.0;
const PATH_QUAD_TOL: f64 = 1e-12;
/// Relative slack on per-connection inequalities, covering rounding in
/// cases of exact equality.
const CHECK_SLACK: f64 = 1e-12;

/// A truncated norm value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgyNorm {
    pub value: f64,
    /// Value over connections of length up to twice the radius agrees to
    /// [`STABILIZATION_TOL`].
    pub stabilized: bool,
    pub bound: f64,
    pub connections: usize,
    /// Holonomy of a maximizing connection.
    pub argmax: Option<(i64, i64)>,
}

/// Saddle connections of `x` up to `2L`, reused across norm evaluations.
/// The same combinatorial connections serve every deformation of `x`.
#[derive(Debug, Clone)]
pub struct NormContext {
    bound: f64,
    inner: usize,
    connections: Vec<SaddleConnection>,
}

fn ratio_sup(v: &Cocycle, phi: &Cocycle, list: &[SaddleConnection]) -> Result<(f64, Option<(i64, i64)>)> {
    let mut best = 0.0;
    let mut arg = None;
    for g in list {
        let r = v.evaluate(g, Staircase::Lower)?.norm() / phi.evaluate(g, Staircase::Lower)?.norm();
        if r > best || arg.is_none() {
            best = r;
            arg = Some(g.holonomy);
        }
    }
    Ok((best, arg))
}

impl NormContext {
    /// Requires `bound ≥ 4·sys(x)`.
    pub fn new(x: &Origami, bound: f64) -> Result<Self> {
        let sys = systole(x)?;
        if !(bound >= 4.0 * sys * (1.0 - LENGTH_SLACK)) {
            return Err(Error::domain(format!("truncation radius {bound} is below 4·sys = {}", 4.0 * sys)));
        }
        let connections = saddle_connections(x, 2.0 * bound)?;
        let limit = bound * (1.0 + LENGTH_SLACK);
        let inner = connections.partition_point(|g| g.length <= limit);
        Ok(NormContext { bound, inner, connections })
    }

    /// Context with the default radius `max(20, 40·sys(x))`.
    pub fn with_default_bound(x: &Origami) -> Result<Self> {
        Self::new(x, default_bound(x)?)
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Connections of `x` with length up to the radius.
    pub fn connections(&self) -> &[SaddleConnection] {
        &self.connections[..self.inner]
    }

    /// `‖v‖` at the deformation `y` of the surface the context was built on.
    pub fn norm_at(&self, y: &Origami, v: &Cocycle) -> Result<AgyNorm> {
        let phi = Cocycle::tautological(y);
        let (value, argmax) = ratio_sup(v, &phi, self.connections())?;
        let (outer, _) = ratio_sup(v, &phi, &self.connections)?;
        Ok(AgyNorm {
            value,
            stabilized: (outer - value).abs() < STABILIZATION_TOL,
            bound: self.bound,
            connections: self.inner,
            argmax,
        })
    }

    /// Per-connection ratios `|v(γ)| / |Φ(y)(γ)|` in connection order.
    pub fn ratios(&self, y: &Origami, v: &Cocycle) -> Result<Vec<f64>> {
        let phi = Cocycle::tautological(y);
        self.connections()
            .iter()
            .map(|g| Ok(v.evaluate(g, Staircase::Lower)?.norm() / phi.evaluate(g, Staircase::Lower)?.norm()))
            .collect()
    }

    /// `|Φ(y)(γ)|` for the connections within the radius.
    pub fn periods(&self, y: &Origami) -> Result<Vec<Complex64>> {
        let phi = Cocycle::tautological(y);
        self.connections().iter().map(|g| phi.evaluate(g, Staircase::Lower)).collect()
    }
}

fn default_bound(x: &Origami) -> Result<f64> {
    Ok(DEFAULT_NORM_FLOOR.max(40.0 * systole(x)?))
}

/// Truncated norm of `v` at `x` over connections of length at most `bound`.
pub fn agy_norm(x: &Origami, v: &Cocycle, bound: f64) -> Result<AgyNorm> {
    NormContext::new(x, bound)?.norm_at(x, v)
}

/// Options for [`path_norm_bounds`].
#[derive(Debug, Clone, Copy)]
pub struct PathOptions {
    /// Fail with a resource error when an endpoint norm is not stabilized.
    pub require_stabilized: bool,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions { require_stabilized: true }
    }
}

/// Outcome of [`path_norm_bounds`]. Every quantity uses the connections of
/// the starting point within the truncation radius.
#[derive(Debug, Clone, Serialize)]
pub struct PathReport {
    pub duration: f64,
    /// `∫ ‖κ′(t)‖_{κ(t)} dt`.
    pub length: f64,
    pub length_error: f64,
    pub max_tangent_norm: f64,
    pub norm_start: f64,
    pub norm_end: f64,
    /// Largest `|log(|κ(T)(γ)| / |κ(0)(γ)|)|` over the connections.
    pub max_log_period_ratio: f64,
    /// Connections breaking `|κ(T)(γ)|/|κ(0)(γ)| ∈ [e^{−ℓ}, e^{ℓ}]`.
    pub connection_violations: usize,
    /// Whether `‖v‖_{κ(T)} / ‖v‖_{κ(0)} ∈ [e^{−ℓ}, e^{ℓ}]`.
    pub norm_ratio_ok: bool,
    pub stabilized: bool,
    pub connections: usize,
    pub systole_start: f64,
    pub systole_end: f64,
}

/// Follows `κ(t) = exp(tX)·x` for `t ∈ [0, duration]`, integrates the norm
/// of its tangent `X·Φ(κ(t))`, and checks the per-connection and endpoint
/// consequences of that length.
pub fn path_norm_bounds(
    x: &Origami,
    direction: [[f64; 2]; 2],
    duration: f64,
    v: &Cocycle,
    bound: f64,
    options: PathOptions,
) -> Result<PathReport> {
    if !(0.0..=0.3).contains(&duration) {
        return Err(Error::domain(format!("path duration {duration} must lie in [0, 0.3]")));
    }
    if direction.iter().flatten().any(|e| !e.is_finite()) {
        return Err(Error::invalid("direction must be finite"));
    }
    let ctx = NormContext::new(x, bound)?;
    let at = |t: f64| x.apply_element(&exp_matrix(direction, t));
    let end = at(duration)?;

    let tangent_norm = |t: f64| -> Result<AgyNorm> {
        let y = at(t)?;
        ctx.norm_at(&y, &Cocycle::tangent(&y, &direction))
    };
    let t0 = tangent_norm(0.0)?;
    let t1 = tangent_norm(duration)?;
    let integrand = |t: f64| Complex64::new(tangent_norm(t).map(|n| n.value).unwrap_or(f64::NAN), 0.0);
    let integral = if duration > 0.0 {
        quadrature::adaptive(&integrand, &[0.0, duration], PATH_QUAD_TOL, 20_000)?
    } else {
        quadrature::Integral { value: Complex64::new(0.0, 0.0), abs_error: 0.0 }
    };
    let length = integral.value.re;
    if !length.is_finite() {
        return Err(Error::numerical("tangent norm is not finite along the path"));
    }

    let p0 = ctx.periods(x)?;
    let p1 = ctx.periods(&end)?;
    let hi = length.exp() * (1.0 + CHECK_SLACK);
    let lo = (-length).exp() * (1.0 - CHECK_SLACK);
    let mut violations = 0;
    let mut max_log = 0.0f64;
    for (a, b) in p0.iter().zip(&p1) {
        let r = b.norm() / a.norm();
        max_log = max_log.max(r.ln().abs());
        if r > hi || r < lo {
            violations += 1;
        }
    }

    let n0 = ctx.norm_at(x, v)?;
    let n1 = ctx.norm_at(&end, v)?;
    let ratio = n1.value / n0.value;
    let norm_ratio_ok = n0.value == 0.0 || (ratio <= hi && ratio >= lo);
    let stabilized = n0.stabilized && n1.stabilized && t0.stabilized && t1.stabilized;
    if options.require_stabilized && !stabilized {
        return Err(Error::resource(format!(
            "norm not stabilized at radius {bound} (v: {} → {}, tangent: {} → {})",
            n0.stabilized, n1.stabilized, t0.stabilized, t1.stabilized
        )));
    }
    Ok(PathReport {
        duration,
        length,
        length_error: integral.abs_error,
        max_tangent_norm: t0.value.max(t1.value),
        norm_start: n0.value,
        norm_end: n1.value,
        max_log_period_ratio: max_log,
        connection_violations: violations,
        norm_ratio_ok,
        stabilized,
        connections: ctx.connections().len(),
        systole_start: systole(x)?,
        systole_end: systole(&end)?,
    })
}

/// `e^{d t}` with `d = dim H¹(M, Σ; R)`: the determinant of `g_t` on real
/// period coordinates.
pub fn jacobian_unstable(x: &Origami, t: f64) -> f64 {
    (x.relative_cohomology_dim() as f64 * t).exp()
}
