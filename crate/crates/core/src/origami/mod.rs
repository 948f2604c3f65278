//! Square-tiled translation surfaces.
//!
//! Squares are numbered `0..n` internally and `1..=n` in the text format.
//! `sigma_h(i)` is the square to the right of `i`, `sigma_v(i)` the square
//! above it. A vertex class is the set of squares whose bottom-left corners
//! are the same point of the surface; its size is the cone order `κ`.

mod cocycle;
mod norm;
mod trace;

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

pub use cocycle::{evaluate_cocycle, pushforward_cocycle, Cocycle};
pub use norm::{
    agy_norm, jacobian_unstable, path_norm_bounds, AgyNorm, NormContext, PathOptions, PathReport, DEFAULT_NORM_FLOOR,
    STABILIZATION_TOL,
};
pub use trace::{
    saddle_connections, saddle_connections_with_budget, systole, systole_by_tracing, v_delta, EdgeCounts,
    SaddleConnection, Staircase, DEFAULT_BUDGET,
};

use crate::error::{Error, Result};
use crate::sl2::GroupElement;

/// A permutation of `0..n` stored as its image list.
pub type Perm = Vec<usize>;

fn check_perm(p: &[usize], n: usize, name: &str) -> Result<()> {
    if p.len() != n {
        return Err(Error::invalid(format!("{name} has {} entries, expected {n}", p.len())));
    }
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return Err(Error::invalid(format!("{name} is not a permutation of 1..{n}")));
        }
        seen[x] = true;
    }
    Ok(())
}

fn invert(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cyc.push(i);
            i = p[i];
        }
        out.push(cyc);
    }
    out
}

/// Parses cycle notation such as `(1 2)(3 4 5)` into a permutation of
/// `0..n`; an empty string or `()` is the identity.
pub fn parse_cycles(text: &str, n: usize) -> Result<Perm> {
    let mut p: Perm = (0..n).collect();
    let mut seen = vec![false; n];
    let text = text.trim();
    let mut rest = text;
    while !rest.is_empty() {
        let open = rest.find('(').ok_or_else(|| Error::invalid(format!("expected '(' in {text:?}")))?;
        if !rest[..open].trim().is_empty() {
            return Err(Error::invalid(format!("unexpected text {:?} in cycles", &rest[..open])));
        }
        let close = rest.find(')').ok_or_else(|| Error::invalid(format!("unclosed cycle in {text:?}")))?;
        if close < open {
            return Err(Error::invalid(format!("malformed cycles {text:?}")));
        }
        let items = rest[open + 1..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                let k: usize = s.parse().map_err(|_| Error::invalid(format!("bad square label {s:?}")))?;
                if k == 0 || k > n {
                    return Err(Error::invalid(format!("square label {k} outside 1..{n}")));
                }
                Ok(k - 1)
            })
            .collect::<Result<Vec<usize>>>()?;
        for (j, &x) in items.iter().enumerate() {
            if seen[x] {
                return Err(Error::invalid(format!("square {} appears twice", x + 1)));
            }
            seen[x] = true;
            p[x] = items[(j + 1) % items.len()];
        }
        rest = rest[close + 1..].trim_start();
    }
    Ok(p)
}

fn format_cycles(p: &[usize]) -> String {
    let s: String = cycles(p)
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|c| format!("({})", c.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" ")))
        .collect();
    if s.is_empty() {
        "()".into()
    } else {
        s
    }
}

/// Square-tiled surface with a linear deformation of its flat structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Origami {
    sigma_h: Perm,
    sigma_v: Perm,
    h_inv: Perm,
    v_inv: Perm,
    deformation: GroupElement,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
    marked: Vec<bool>,
    genus: usize,
    id: u64,
}

impl Origami {
    /// Builds the surface from 0-based permutations.
    pub fn new(sigma_h: Perm, sigma_v: Perm, deformation: GroupElement) -> Result<Self> {
        let n = sigma_h.len();
        if n == 0 {
            return Err(Error::invalid("an origami needs at least one square"));
        }
        check_perm(&sigma_h, n, "sigma_h")?;
        check_perm(&sigma_v, n, "sigma_v")?;
        let deformation = GroupElement::gl_plus(deformation.a, deformation.b, deformation.c, deformation.d)?;

        let mut reached = vec![false; n];
        let mut stack = vec![0];
        reached[0] = true;
        while let Some(i) = stack.pop() {
            for j in [sigma_h[i], sigma_v[i]] {
                if !reached[j] {
                    reached[j] = true;
                    stack.push(j);
                }
            }
        }
        if let Some(k) = reached.iter().position(|r| !r) {
            return Err(Error::invalid(format!("square {} is unreachable; surface is disconnected", k + 1)));
        }

        let h_inv = invert(&sigma_h);
        let v_inv = invert(&sigma_v);
        // one full turn around a bottom-left corner: c = σ_v σ_h σ_v⁻¹ σ_h⁻¹
        let comm: Perm = (0..n).map(|i| sigma_v[sigma_h[v_inv[h_inv[i]]]]).collect();
        let classes = cycles(&comm);
        let mut class_of = vec![0; n];
        for (k, cyc) in classes.iter().enumerate() {
            for &i in cyc {
                class_of[i] = k;
            }
        }
        let v = classes.len();
        // 2 − 2g = V − n
        let twice_g = 2 + n - v;
        debug_assert!(twice_g.is_multiple_of(2));
        let genus = twice_g / 2;
        let marked = classes.iter().map(|c| genus == 1 || c.len() > 1).collect();
        let mut hasher = DefaultHasher::new();
        (&sigma_h, &sigma_v).hash(&mut hasher);
        let o = Origami {
            sigma_h,
            sigma_v,
            h_inv,
            v_inv,
            deformation,
            class_of,
            classes,
            marked,
            genus,
            id: hasher.finish(),
        };
        debug_assert_eq!(o.stratum().iter().map(|k| k - 1).sum::<usize>() + 2, 2 * o.genus);
        Ok(o)
    }

    /// Builds the surface from 1-based cycle strings.
    pub fn from_cycles(n: usize, sigma_h: &str, sigma_v: &str, deformation: GroupElement) -> Result<Self> {
        Self::new(parse_cycles(sigma_h, n)?, parse_cycles(sigma_v, n)?, deformation)
    }

    /// The one-square torus.
    pub fn torus() -> Self {
        Self::new(vec![0], vec![0], GroupElement::IDENTITY).expect("torus")
    }

    /// The three-square L-shaped surface in H(2).
    pub fn l_shape() -> Self {
        Self::new(vec![1, 0, 2], vec![2, 1, 0], GroupElement::IDENTITY).expect("L origami")
    }

    pub fn n_squares(&self) -> usize {
        self.sigma_h.len()
    }

    pub fn sigma_h(&self) -> &[usize] {
        &self.sigma_h
    }

    pub fn sigma_v(&self) -> &[usize] {
        &self.sigma_v
    }

    pub fn deformation(&self) -> GroupElement {
        self.deformation
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Vertex classes as lists of squares (by bottom-left corner).
    pub fn vertex_classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of_square(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// Cone orders `κ_i` of all vertex classes.
    pub fn cone_orders(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.len()).collect()
    }

    pub fn is_marked(&self, class: usize) -> bool {
        self.marked[class]
    }

    /// Indices of the classes in Σ.
    pub fn singular_set(&self) -> Vec<usize> {
        (0..self.classes.len()).filter(|&k| self.marked[k]).collect()
    }

    /// Cone orders of the points of Σ.
    pub fn stratum(&self) -> Vec<usize> {
        self.singular_set().iter().map(|&k| self.classes[k].len()).collect()
    }

    /// `dim H¹(M, Σ; R) = 2g + |Σ| − 1`.
    pub fn relative_cohomology_dim(&self) -> usize {
        2 * self.genus + self.singular_set().len() - 1
    }

    /// Identifier of the combinatorial data, shared by all deformations.
    pub fn combinatorics_id(&self) -> u64 {
        self.id
    }

    /// Same combinatorics with deformation `m·D`.
    pub fn apply_element(&self, m: &GroupElement) -> Result<Self> {
        let m = GroupElement::gl_plus(m.a, m.b, m.c, m.d)?;
        let mut out = self.clone();
        out.deformation = m * self.deformation;
        Ok(out)
    }

    /// Same combinatorics with the given deformation.
    pub fn with_deformation(&self, d: GroupElement) -> Result<Self> {
        let d = GroupElement::gl_plus(d.a, d.b, d.c, d.d)?;
        let mut out = self.clone();
        out.deformation = d;
        Ok(out)
    }

    pub(crate) fn h(&self, i: usize) -> usize {
        self.sigma_h[i]
    }

    pub(crate) fn v(&self, i: usize) -> usize {
        self.sigma_v[i]
    }

    pub(crate) fn h_inv(&self, i: usize) -> usize {
        self.h_inv[i]
    }

    #[allow(dead_code)]
    pub(crate) fn v_inv(&self, i: usize) -> usize {
        self.v_inv[i]
    }

    /// Text record `n; sigma_h; sigma_v; deformation a b c d`.
    pub fn to_record(&self) -> String {
        let d = self.deformation;
        format!(
            "{}; {}; {}; deformation {} {} {} {}",
            self.n_squares(),
            format_cycles(&self.sigma_h),
            format_cycles(&self.sigma_v),
            d.a,
            d.b,
            d.c,
            d.d
        )
    }
}

impl fmt::Display for Origami {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_record())
    }
}

impl std::str::FromStr for Origami {
    type Err = Error;

    /// Parses `n; sigma_h cycles; sigma_v cycles[; deformation a b c d]`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(';').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(Error::invalid(format!("expected 3 or 4 ';'-separated fields in {s:?}")));
        }
        let n: usize = parts[0].parse().map_err(|_| Error::invalid(format!("bad square count {:?}", parts[0])))?;
        let deformation = match parts.get(3) {
            None => GroupElement::IDENTITY,
            Some(text) => {
                let text = text.strip_prefix("deformation").unwrap_or(text);
                let nums = text
                    .split_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|_| Error::invalid(format!("bad matrix entry {t:?}"))))
                    .collect::<Result<Vec<f64>>>()?;
                if nums.len() != 4 {
                    return Err(Error::invalid("deformation needs four entries a b c d"));
                }
                GroupElement::gl_plus(nums[0], nums[1], nums[2], nums[3])?
            }
        };
        Origami::from_cycles(n, parts[1], parts[2], deformation)
    }
}
