//! 2×2 matrix groups: the one-parameter flows of SL(2,R), the Lie algebra
//! constants entering the Casimir element, and the `ANK` decomposition.

use std::f64::consts::PI;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `det − 1` accepted by the SL(2,R) constructor.
pub const SL_DET_TOL: f64 = 1e-12;

/// Tolerance on `det − 1` accepted by [`ank_decompose`].
pub const ANK_DET_TOL: f64 = 1e-9;

/// Row-major 2×2 real matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Builds an element of SL(2,R), rejecting determinants off by more than
    /// [`SL_DET_TOL`].
    pub fn sl(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let m = GroupElement { a, b, c, d };
        m.check_finite()?;
        if (m.det() - 1.0).abs() > SL_DET_TOL {
            return Err(Error::invalid(format!("det = {} is not 1", m.det())));
        }
        Ok(m)
    }

    /// Builds an element of GL⁺(2,R).
    pub fn gl_plus(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let m = GroupElement { a, b, c, d };
        m.check_finite()?;
        if m.det().partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::invalid(format!("det = {} is not positive", m.det())));
        }
        Ok(m)
    }

    pub(crate) const fn new_unchecked(a: f64, b: f64, c: f64, d: f64) -> Self {
        GroupElement { a, b, c, d }
    }

    fn check_finite(&self) -> Result<()> {
        if [self.a, self.b, self.c, self.d].iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("matrix entries must be finite"))
        }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        GroupElement::new_unchecked(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn transpose(&self) -> Self {
        GroupElement::new_unchecked(self.a, self.c, self.b, self.d)
    }

    /// Image of the column vector `(x, y)`.
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.a * x + self.b * y, self.c * x + self.d * y)
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &GroupElement) -> f64 {
        self.entries().iter().zip(other.entries().iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    /// Operator norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        let fro2 = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let det = self.det();
        let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0);
        ((fro2 + disc.sqrt()) / 2.0).sqrt()
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        GroupElement::new_unchecked(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }
}

/// Traceless 2×2 matrix, an element of the Lie algebra sl(2,R).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieVec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl LieVec {
    /// `diag(1, −1)`, generator of the geodesic flow.
    pub const OMEGA: LieVec = LieVec { a: 1.0, b: 0.0, c: 0.0, d: -1.0 };
    /// `[[0, 1], [−1, 0]]`, generator of the rotations.
    pub const W: LieVec = LieVec { a: 0.0, b: 1.0, c: -1.0, d: 0.0 };
    /// `[[0, 1], [1, 0]]`.
    pub const V: LieVec = LieVec { a: 0.0, b: 1.0, c: 1.0, d: 0.0 };

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// The Killing-type pairing `tr(XY)`; the Casimir element
    /// `(W² − ω² − V²)/4` is built from the basis on which it is diagonal.
    pub fn trace_pairing(&self, other: &LieVec) -> f64 {
        self.a * other.a + self.b * other.c + self.c * other.b + self.d * other.d
    }

    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }
}

/// The four one-parameter families acting on translation surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowKind {
    /// `g_t = diag(e^t, e^{−t})`
    Geodesic,
    /// `h_r = [[1, r], [0, 1]]`
    Horocycle,
    /// `h̃_r = [[1, 0], [r, 1]]`
    OppHorocycle,
    /// `k_θ = [[cos θ, sin θ], [−sin θ, cos θ]]`
    Rotation,
}

impl FlowKind {
    pub const ALL: [FlowKind; 4] =
        [FlowKind::Geodesic, FlowKind::Horocycle, FlowKind::OppHorocycle, FlowKind::Rotation];

    /// Infinitesimal generator: `d/dp generator(kind, p)` at `p = 0`.
    pub fn lie_generator(self) -> [[f64; 2]; 2] {
        match self {
            FlowKind::Geodesic => [[1.0, 0.0], [0.0, -1.0]],
            FlowKind::Horocycle => [[0.0, 1.0], [0.0, 0.0]],
            FlowKind::OppHorocycle => [[0.0, 0.0], [1.0, 0.0]],
            FlowKind::Rotation => [[0.0, 1.0], [-1.0, 0.0]],
        }
    }
}

pub fn generator(kind: FlowKind, param: f64) -> Result<GroupElement> {
    if !param.is_finite() {
        return Err(Error::invalid(format!("non-finite flow parameter {param}")));
    }
    Ok(match kind {
        FlowKind::Geodesic => GroupElement::new_unchecked(param.exp(), 0.0, 0.0, (-param).exp()),
        FlowKind::Horocycle => GroupElement::new_unchecked(1.0, param, 0.0, 1.0),
        FlowKind::OppHorocycle => GroupElement::new_unchecked(1.0, 0.0, param, 1.0),
        FlowKind::Rotation => {
            let (s, c) = param.sin_cos();
            GroupElement::new_unchecked(c, s, -s, c)
        }
    })
}

/// `g_t` shortcut for finite `t`.
pub fn geodesic(t: f64) -> GroupElement {
    GroupElement::new_unchecked(t.exp(), 0.0, 0.0, (-t).exp())
}

/// `h_r` shortcut.
pub fn horocycle(r: f64) -> GroupElement {
    GroupElement::new_unchecked(1.0, r, 0.0, 1.0)
}

/// `h̃_r` shortcut.
pub fn opp_horocycle(r: f64) -> GroupElement {
    GroupElement::new_unchecked(1.0, 0.0, r, 1.0)
}

/// `k_θ` shortcut.
pub fn rotation(theta: f64) -> GroupElement {
    let (s, c) = theta.sin_cos();
    GroupElement::new_unchecked(c, s, -s, c)
}

/// Parameter `r'` with `g_t · h_r = h_{r'} · g_t`, namely `r' = r e^{2t}`.
pub fn conjugated_horocycle_param(t: f64, r: f64) -> Result<f64> {
    if !t.is_finite() || !r.is_finite() {
        return Err(Error::invalid("non-finite input to conjugated_horocycle_param"));
    }
    let conjugated = r * (2.0 * t).exp();
    #[cfg(debug_assertions)]
    {
        let lhs = geodesic(t) * horocycle(r);
        let rhs = horocycle(conjugated) * geodesic(t);
        let scale = lhs.entries().iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        debug_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * scale);
    }
    Ok(conjugated)
}

/// Coordinates of `m = g_τ · h̃_r̃ · k_θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnkCoords {
    pub tau: f64,
    pub rtilde: f64,
    /// In `(−π, π]`.
    pub theta: f64,
}

impl AnkCoords {
    pub fn reconstruct(&self) -> GroupElement {
        geodesic(self.tau) * opp_horocycle(self.rtilde) * rotation(self.theta)
    }
}

/// Unique `(τ, r̃, θ)` with `m = g_τ h̃_r̃ k_θ` and `θ ∈ (−π, π]`.
///
/// Right-multiplying by `k_{−θ}` must make the first row `(e^τ, 0)`, which
/// pins `θ = atan2(b, a)` (the branch is the two-argument arctangent). Then
/// `e^τ = |(a, b)|` and `r̃ = ac + bd`.
pub fn ank_decompose(m: &GroupElement) -> Result<AnkCoords> {
    m.check_finite()?;
    if (m.det() - 1.0).abs() > ANK_DET_TOL {
        return Err(Error::invalid(format!("ank_decompose needs det = 1, got {}", m.det())));
    }
    let mut theta = m.b.atan2(m.a);
    if theta <= -PI {
        theta = PI;
    }
    let rho = m.a.hypot(m.b);
    Ok(AnkCoords { tau: rho.ln(), rtilde: m.a * m.c + m.b * m.d, theta })
}

/// `exp(t X)` for an arbitrary real 2×2 matrix `X`; always lies in GL⁺(2,R).
pub fn exp_matrix(x: [[f64; 2]; 2], t: f64) -> GroupElement {
    let half_tr = 0.5 * (x[0][0] + x[1][1]);
    // traceless part N satisfies N² = −det(N)·I
    let n = [[x[0][0] - half_tr, x[0][1]], [x[1][0], x[1][1] - half_tr]];
    let mu2 = -(n[0][0] * n[1][1] - n[0][1] * n[1][0]) * t * t;
    let (ch, sh_over) = if mu2 > 1e-8 {
        let mu = mu2.sqrt();
        (mu.cosh(), mu.sinh() / mu)
    } else if mu2 < -1e-8 {
        let mu = (-mu2).sqrt();
        (mu.cos(), mu.sin() / mu)
    } else {
        (1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0, 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0)
    };
    let scale = (half_tr * t).exp();
    GroupElement::new_unchecked(
        scale * (ch + sh_over * t * n[0][0]),
        scale * sh_over * t * n[0][1],
        scale * sh_over * t * n[1][0],
        scale * (ch + sh_over * t * n[1][1]),
    )
}
