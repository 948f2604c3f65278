//! Planar lattices `D·Z²`: Lagrange–Gauss reduction and enumeration of
//! lattice points in a disc.

use crate::sl2::GroupElement;

/// Relative slack applied to length bounds so that vectors lying exactly on
/// the boundary survive rounding.
pub const LENGTH_SLACK: f64 = 1e-12;

fn image(d: &GroupElement, v: (i64, i64)) -> (f64, f64) {
    let (p, q) = (v.0 as f64, v.1 as f64);
    (d.a * p + d.b * q, d.c * p + d.d * q)
}

/// Euclidean length of `D·(p, q)`.
pub fn image_length(d: &GroupElement, v: (i64, i64)) -> f64 {
    let (x, y) = image(d, v);
    x.hypot(y)
}

fn norm2(v: (f64, f64)) -> f64 {
    v.0 * v.0 + v.1 * v.1
}

/// Lagrange–Gauss reduced basis of `D·Z²`, returned as integer coefficient
/// vectors `(u, w)` with `|Du| ≤ |Dw|` and `|⟨Du, Dw⟩| ≤ |Du|²/2`.
pub fn reduced_basis(d: &GroupElement) -> ((i64, i64), (i64, i64)) {
    let mut u = (1i64, 0i64);
    let mut w = (0i64, 1i64);
    if norm2(image(d, u)) > norm2(image(d, w)) {
        std::mem::swap(&mut u, &mut w);
    }
    for _ in 0..200 {
        let du = image(d, u);
        let dw = image(d, w);
        let mu = ((du.0 * dw.0 + du.1 * dw.1) / norm2(du)).round();
        if mu != 0.0 {
            let m = mu as i64;
            w = (w.0 - m * u.0, w.1 - m * u.1);
        }
        if norm2(image(d, w)) < norm2(image(d, u)) {
            std::mem::swap(&mut u, &mut w);
        } else {
            break;
        }
    }
    (u, w)
}

/// Length of the shortest nonzero vector of `D·Z²`.
pub fn shortest_vector_length(d: &GroupElement) -> f64 {
    image_length(d, reduced_basis(d).0)
}

/// All nonzero `(p, q) ∈ Z²` with `|D·(p, q)| ≤ radius·(1 + LENGTH_SLACK)`.
pub fn points_in_disc(d: &GroupElement, radius: f64) -> Vec<(i64, i64)> {
    let r = radius * (1.0 + LENGTH_SLACK);
    let (u, w) = reduced_basis(d);
    let du = image(d, u);
    let dw = image(d, w);
    let nu = norm2(du);
    let mu = (du.0 * dw.0 + du.1 * dw.1) / nu;
    // component of Dw orthogonal to Du
    let perp2 = (norm2(dw) - mu * mu * nu).max(0.0);
    let b_max = (r / perp2.sqrt()).floor() as i64;
    let mut out = Vec::new();
    for b in -b_max..=b_max {
        let rem = r * r - (b as f64).powi(2) * perp2;
        if rem < 0.0 {
            continue;
        }
        let half = rem.sqrt() / nu.sqrt();
        let centre = -(b as f64) * mu;
        // widen by one and filter exactly below
        let lo = (centre - half).floor() as i64 - 1;
        let hi = (centre + half).ceil() as i64 + 1;
        for a in lo..=hi {
            let v = (a * u.0 + b * w.0, a * u.1 + b * w.1);
            if v != (0, 0) && image_length(d, v) <= r {
                out.push(v);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::{geodesic, horocycle};

    fn brute(d: &GroupElement, r: f64, box_size: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for p in -box_size..=box_size {
            for q in -box_size..=box_size {
                if (p, q) != (0, 0) && image_length(d, (p, q)) <= r * (1.0 + LENGTH_SLACK) {
                    out.push((p, q));
                }
            }
        }
        out
    }

    #[test]
    fn disc_enumeration_matches_brute_force() {
        let cases = [
            (GroupElement::IDENTITY, 3.3),
            (geodesic(0.7), 2.0),
            (horocycle(2.5) * geodesic(-0.4), 4.0),
            (GroupElement::gl_plus(2.0, 0.3, -0.1, 0.7).unwrap(), 5.0),
        ];
        for (d, r) in cases {
            assert_eq!(points_in_disc(&d, r), brute(&d, r, 60), "{d:?}");
        }
    }

    #[test]
    fn shortest_vectors() {
        assert_eq!(shortest_vector_length(&GroupElement::IDENTITY), 1.0);
        for t in [0.5, 2.0, 5.0] {
            let got = shortest_vector_length(&geodesic(t));
            assert!((got - (-t).exp()).abs() < 1e-12 * (-t).exp());
        }
        // a skewed basis needing several reduction steps
        let d = horocycle(7.3);
        assert!((shortest_vector_length(&d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_points_survive() {
        let d = geodesic(1.0);
        let pts = points_in_disc(&d, (-1.0f64).exp());
        assert_eq!(pts, vec![(0, -1), (0, 1)]);
    }

    #[test]
    fn gcd_values() {
        assert_eq!(gcd(12, -18), 6);
        assert_eq!(gcd(0, 5), 5);
        assert_eq!(gcd(7, 0), 7);
    }
}
