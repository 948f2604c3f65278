//! Recurrence of `V_δ` under the Teichmüller flow, and Monte Carlo
//! correlations on the space of unimodular lattices.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::shortest_vector_length;
use crate::origami::{v_delta, Origami};
use crate::quadrature::pairwise_sum;
use crate::sl2::{geodesic, horocycle, rotation, GroupElement};

pub const MIN_NODES: usize = 16;
pub const MAX_NODES: usize = 1 << 16;
/// Relative tolerance of the node-doubling loop.
pub const AVERAGE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HorocycleAverage {
    pub value: f64,
    /// `|T_n − T_{n/2}|` at the last doubling.
    pub abs_error: f64,
    pub nodes: usize,
}

/// `∫_0^1 V_δ(g_t h_r x) dr` by the composite trapezoid rule, doubling the
/// number of panels from `n_nodes` until two levels agree to
/// [`AVERAGE_TOL`] or [`MAX_NODES`] is reached.
pub fn horocycle_vdelta_average(x: &Origami, t: f64, delta: f64, n_nodes: usize) -> Result<HorocycleAverage> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t = {t} must be finite and ≥ 0")));
    }
    if n_nodes < MIN_NODES {
        return Err(Error::invalid(format!("n_nodes = {n_nodes} is below {MIN_NODES}")));
    }
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::domain(format!("δ = {delta} must lie in (0, 1/4)")));
    }
    let g = geodesic(t);
    let eval = |r: f64| v_delta(&x.apply_element(&(g * horocycle(r)))?, delta);
    let sample = |idx: Vec<usize>, n: usize| -> Result<Vec<f64>> {
        idx.into_par_iter().map(|k| eval(k as f64 / n as f64)).collect()
    };

    let mut n = n_nodes.min(MAX_NODES);
    let ends = sample(vec![0, n], n)?;
    let inner = sample((1..n).collect(), n)?;
    let mut sum = 0.5 * (ends[0] + ends[1]) + pairwise_sum(&inner);
    let mut value = sum / n as f64;
    let mut abs_error = f64::INFINITY;
    while n < MAX_NODES {
        let fresh = sample((0..n).map(|k| 2 * k + 1).collect(), 2 * n)?;
        sum += pairwise_sum(&fresh);
        n *= 2;
        let next = sum / n as f64;
        abs_error = (next - value).abs();
        value = next;
        if abs_error <= AVERAGE_TOL * value {
            break;
        }
    }
    Ok(HorocycleAverage { value, abs_error, nodes: n })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceProfile {
    pub t: Vec<f64>,
    /// `None` where the average failed; see `failures`.
    pub averages: Vec<Option<HorocycleAverage>>,
    pub failures: Vec<Option<String>>,
    pub delta: f64,
    pub v_delta_start: f64,
    /// Max-ratio envelope constant; `c1 = c2`.
    pub c1: f64,
    pub c2: f64,
}

impl RecurrenceProfile {
    /// `C·(e^{−(1−2δ)t}V_δ(x) + 1)`.
    pub fn envelope(&self, t: f64) -> f64 {
        self.c1 * (-(1.0 - 2.0 * self.delta) * t).exp() * self.v_delta_start + self.c2
    }

    pub fn is_complete(&self) -> bool {
        self.failures.iter().all(Option::is_none)
    }
}

pub fn recurrence_profile(x: &Origami, delta: f64, t_grid: &[f64]) -> Result<RecurrenceProfile> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[1] > w[0])) || !(t_grid[0] >= 0.0) {
        return Err(Error::invalid("t grid must be non-empty, increasing and ≥ 0"));
    }
    let v0 = v_delta(x, delta)?;
    let mut averages = Vec::with_capacity(t_grid.len());
    let mut failures = Vec::with_capacity(t_grid.len());
    let mut c = 0.0f64;
    for &t in t_grid {
        match horocycle_vdelta_average(x, t, delta, 64) {
            Ok(avg) => {
                c = c.max(avg.value / ((-(1.0 - 2.0 * delta) * t).exp() * v0 + 1.0));
                averages.push(Some(avg));
                failures.push(None);
            }
            Err(e) => {
                averages.push(None);
                failures.push(Some(e.to_string()));
            }
        }
    }
    Ok(RecurrenceProfile { t: t_grid.to_vec(), averages, failures, delta, v_delta_start: v0, c1: c, c2: c })
}

/// A point of the fundamental domain with a fiber angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModularPoint {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl ModularPoint {
    /// `k_θ · (1/√y)[[1, x], [0, y]]`.
    pub fn lattice(&self) -> GroupElement {
        let s = self.y.sqrt();
        let upper = GroupElement { a: 1.0 / s, b: self.x / s, c: 0.0, d: s };
        rotation(self.theta) * upper
    }
}

/// Sample `index` of the stream keyed by `seed`; independent of any other
/// sample and of the thread schedule.
pub fn modular_point(seed: u64, index: u64) -> ModularPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let y_min = 3f64.sqrt() / 2.0;
    loop {
        let x = rng.random::<f64>() - 0.5;
        // density ∝ 1/y² on [√3/2, ∞)
        let y = y_min / (1.0 - rng.random::<f64>());
        if x * x + y * y >= 1.0 {
            let theta = 2.0 * PI * rng.random::<f64>();
            return ModularPoint { x, y, theta };
        }
    }
}

/// `n` Haar-random unimodular lattices, as matrices whose columns span them.
pub fn sample_modular_surface(n: usize, seed: u64) -> Result<Vec<GroupElement>> {
    if n == 0 {
        return Err(Error::invalid("sample count must be ≥ 1"));
    }
    Ok((0..n as u64).into_par_iter().map(|i| modular_point(seed, i).lattice()).collect())
}

/// Rotation-invariant observable of a lattice, through its systole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Observable {
    /// `exp(1 − 1/(1 − u²))` with `u` mapping `[lo, hi]` onto `[−1, 1]`.
    Bump {
        lo: f64,
        hi: f64,
    },
    Constant(f64),
}

impl Observable {
    pub fn bump(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::invalid(format!("bump support [{lo}, {hi}] must satisfy 0 < lo < hi")));
        }
        Ok(Observable::Bump { lo, hi })
    }

    pub fn eval_systole(&self, sys: f64) -> f64 {
        match *self {
            Observable::Constant(c) => c,
            Observable::Bump { lo, hi } => {
                let u = (2.0 * sys - lo - hi) / (hi - lo);
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - u * u)).exp()
                }
            }
        }
    }

    pub fn eval(&self, lattice: &GroupElement) -> f64 {
        match self {
            Observable::Constant(c) => *c,
            _ => self.eval_systole(shortest_vector_length(lattice)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationSeries {
    pub t: Vec<f64>,
    pub estimates: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub n: usize,
    pub seed: u64,
}

/// `(1/N)Σ f(Λ_i)f(g_tΛ_i) − ((1/N)Σ f(Λ_i))²` with delete-one jackknife
/// standard errors.
pub fn correlation_mc(obs: &Observable, t_grid: &[f64], n: usize, seed: u64) -> Result<CorrelationSeries> {
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("t values must be finite"));
    }
    let lattices = sample_modular_surface(n, seed)?;
    let f0: Vec<f64> = lattices.par_iter().map(|l| obs.eval(l)).collect();
    let sum_b = pairwise_sum(&f0);
    let nf = n as f64;
    let mut estimates = Vec::with_capacity(t_grid.len());
    let mut std_errors = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let g = geodesic(t);
        let prod: Vec<f64> = lattices.par_iter().zip(&f0).map(|(l, b)| b * obs.eval(&(g * *l))).collect();
        let sum_a = pairwise_sum(&prod);
        let mean_b = sum_b / nf;
        estimates.push(sum_a / nf - mean_b * mean_b);
        if n < 2 {
            std_errors.push(0.0);
            continue;
        }
        let m = nf - 1.0;
        let leave_out: Vec<f64> = prod
            .par_iter()
            .zip(&f0)
            .map(|(a, b)| {
                let mb = (sum_b - b) / m;
                (sum_a - a) / m - mb * mb
            })
            .collect();
        let mean = pairwise_sum(&leave_out) / nf;
        let dev: Vec<f64> = leave_out.par_iter().map(|v| (v - mean) * (v - mean)).collect();
        std_errors.push((m / nf * pairwise_sum(&dev)).sqrt());
    }
    Ok(CorrelationSeries { t: t_grid.to_vec(), estimates, std_errors, n, seed })
}

/// Exponent `−b` of the model `A e^{−bt}` fitted to the estimates on
/// `t ∈ [t_min, t_max]` by least squares weighted with the inverse squared
/// standard errors, and its standard error from the Fisher information.
/// The fit is done in linear scale so that estimates at the noise floor,
/// including negative ones, enter with their proper weight.
pub fn log_slope(series: &CorrelationSeries, t_min: f64, t_max: f64) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64, f64)> = series
        .t
        .iter()
        .zip(&series.estimates)
        .zip(&series.std_errors)
        .filter(|((t, _), _)| **t >= t_min && **t <= t_max)
        .map(|((t, c), s)| (*t, *c, *s))
        .collect();
    if pts.len() < 2 {
        return Err(Error::invalid("log-slope needs at least two points in the window"));
    }
    let floor = pts.iter().map(|p| p.2).fold(0.0, f64::max) * 1e-6;
    let w: Vec<f64> = pts.iter().map(|p| if floor > 0.0 { 1.0 / p.2.max(floor).powi(2) } else { 1.0 }).collect();
    let amplitude = |b: f64| {
        let (mut num, mut den) = (0.0, 0.0);
        for (p, w) in pts.iter().zip(&w) {
            let e = (-b * (p.0 - t_min)).exp();
            num += w * p.1 * e;
            den += w * e * e;
        }
        num / den
    };
    let cost = |b: f64| {
        let a = amplitude(b);
        pts.iter().zip(&w).map(|(p, w)| w * (p.1 - a * (-b * (p.0 - t_min)).exp()).powi(2)).sum::<f64>()
    };
    let (lo, hi, steps) = (-20.0, 20.0, 4000);
    let h = (hi - lo) / steps as f64;
    let best = (0..=steps).map(|k| lo + k as f64 * h).min_by(|x, y| cost(*x).total_cmp(&cost(*y))).unwrap_or(0.0);
    // golden-section refinement inside the bracketing cells
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if cost(x1) < cost(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let rate = 0.5 * (a + b);
    let amp = amplitude(rate);
    if !(amp > 0.0) || rate <= lo + h || rate >= hi - h {
        return Err(Error::numerical(format!("no decaying exponential fits the estimates (A = {amp:e}, b = {rate})")));
    }
    // Fisher information of (A, b)
    let (mut faa, mut fab, mut fbb) = (0.0, 0.0, 0.0);
    for (p, w) in pts.iter().zip(&w) {
        let e = (-rate * (p.0 - t_min)).exp();
        let da = e;
        let db = -amp * (p.0 - t_min) * e;
        faa += w * da * da;
        fab += w * da * db;
        fbb += w * db * db;
    }
    let det = faa * fbb - fab * fab;
    let se = if det > 0.0 { (faa / det).sqrt() } else { f64::INFINITY };
    Ok((-rate, se))
}
