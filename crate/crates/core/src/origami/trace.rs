//! Separatrix tracing on the square grid.
//!
//! Only directions in the upper half-plane (`q > 0`) and `(1, 0)` are traced,
//! which lists every unoriented saddle connection exactly once.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Origami;
use crate::error::{Error, Result};
use crate::lattice::{gcd, image_length, points_in_disc, shortest_vector_length, LENGTH_SLACK};

/// Default cap on the number of grid crossings one enumeration may perform.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

/// Integer multiplicities of the bottom and left edges of each square along
/// a grid path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCounts {
    pub bottom: Vec<i32>,
    pub left: Vec<i32>,
}

impl EdgeCounts {
    fn zeros(n: usize) -> Self {
        EdgeCounts { bottom: vec![0; n], left: vec![0; n] }
    }
}

/// Which grid path is used to evaluate cocycles along a connection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Staircase {
    /// Runs below the segment (horizontal moves first).
    Lower,
    /// Runs above the segment (vertical moves first).
    Upper,
}

/// A saddle connection of an origami, oriented with holonomy in the upper
/// half-plane or along the positive real axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleConnection {
    pub start_class: usize,
    pub end_class: usize,
    /// Holonomy in units of the unit square, before deformation.
    pub holonomy: (i64, i64),
    /// Number of primitive displacements (more than one when the segment
    /// passes through unmarked regular vertices).
    pub steps: u32,
    /// Square whose bottom-left corner is the starting sheet.
    pub start_square: usize,
    /// Deformed length `|D·holonomy|`.
    pub length: f64,
    pub lower: EdgeCounts,
    pub upper: EdgeCounts,
    pub(crate) origami_id: u64,
}

impl SaddleConnection {
    pub fn counts(&self, which: Staircase) -> &EdgeCounts {
        match which {
            Staircase::Lower => &self.lower,
            Staircase::Upper => &self.upper,
        }
    }

    pub fn origami_id(&self) -> u64 {
        self.origami_id
    }
}

struct Step {
    /// Sheet square at the end vertex.
    next_sheet: usize,
    end_class: usize,
}

impl Origami {
    /// One primitive displacement `(p, q)` starting from the vertex at the
    /// bottom-left corner of `sheet`; adds the edges of both staircases.
    fn primitive_step(&self, sheet: usize, p: i64, q: i64, lower: &mut EdgeCounts, upper: &mut EdgeCounts) -> Step {
        if q == 0 {
            debug_assert_eq!(p, 1);
            lower.bottom[sheet] += 1;
            upper.bottom[sheet] += 1;
            let next = self.h(sheet);
            return Step { next_sheet: next, end_class: self.class_of[next] };
        }
        if p == 0 {
            debug_assert_eq!(q, 1);
            lower.left[sheet] += 1;
            upper.left[sheet] += 1;
            let next = self.v(sheet);
            return Step { next_sheet: next, end_class: self.class_of[next] };
        }
        let right = p > 0;
        let pa = p.unsigned_abs() as usize;
        let qa = q as usize;
        let side = |i: usize| if right { self.h(i) } else { self.h_inv(i) };

        // cells crossed by the open segment, as (column, row, square)
        let mut cells: Vec<(usize, usize, usize)> = Vec::with_capacity(pa + qa - 1);
        let mut sq = if right { sheet } else { self.h_inv(sheet) };
        let (mut x, mut y) = (0usize, 0usize);
        cells.push((x, y, sq));
        let (mut i, mut j) = (1usize, 1usize);
        while i < pa || j < qa {
            // vertical line i is crossed at parameter i/p, horizontal line j at j/q
            let go_side = j >= qa || (i < pa && i * qa < j * pa);
            debug_assert!(i >= pa || j >= qa || i * qa != j * pa, "simultaneous crossing");
            if go_side {
                sq = side(sq);
                x += 1;
                i += 1;
            } else {
                sq = self.v(sq);
                y += 1;
                j += 1;
            }
            cells.push((x, y, sq));
        }

        let sign = if right { 1 } else { -1 };
        // lower staircase: along the bottoms of each row, then up the far side
        let mut k = 0;
        while k < cells.len() {
            let row = cells[k].1;
            let mut last = k;
            while last + 1 < cells.len() && cells[last + 1].1 == row {
                last += 1;
            }
            let first = if k == 0 { k } else { k + 1 };
            // the first cell of a row above 0 sits over the previous row's
            // last cell, whose far edge was already used
            for c in &cells[first..=last] {
                lower.bottom[c.2] += sign;
            }
            let far = cells[last].2;
            if right {
                lower.left[self.h(far)] += 1;
            } else {
                lower.left[far] += 1;
            }
            k = last + 1;
        }
        // upper staircase: up the near side of each column, then across the top
        let mut k = 0;
        while k < cells.len() {
            let col = cells[k].0;
            let mut last = k;
            while last + 1 < cells.len() && cells[last + 1].0 == col {
                last += 1;
            }
            let first = if k == 0 { k } else { k + 1 };
            for c in &cells[first..=last] {
                if right {
                    upper.left[c.2] += 1;
                } else {
                    upper.left[self.h(c.2)] += 1;
                }
            }
            upper.bottom[self.v(cells[last].2)] += sign;
            k = last + 1;
        }

        let end = cells.last().unwrap().2;
        let next = if right { self.v(self.h(end)) } else { self.v(end) };
        Step { next_sheet: next, end_class: self.class_of[next] }
    }

    /// Follows the separatrix leaving `sheet` in primitive direction `(p, q)`
    /// for at most `max_steps` displacements.
    fn trace_separatrix(&self, sheet: usize, p: i64, q: i64, max_steps: u32) -> Option<SaddleConnection> {
        let n = self.n_squares();
        let mut lower = EdgeCounts::zeros(n);
        let mut upper = EdgeCounts::zeros(n);
        let mut current = sheet;
        for m in 1..=max_steps {
            let step = self.primitive_step(current, p, q, &mut lower, &mut upper);
            if self.marked[step.end_class] {
                let hol = (p * m as i64, q * m as i64);
                return Some(SaddleConnection {
                    start_class: self.class_of[sheet],
                    end_class: step.end_class,
                    holonomy: hol,
                    steps: m,
                    start_square: sheet,
                    length: image_length(&self.deformation, hol),
                    lower,
                    upper,
                    origami_id: self.id,
                });
            }
            current = step.next_sheet;
        }
        None
    }
}

fn sort_connections(list: &mut [SaddleConnection]) {
    list.sort_by(|a, b| {
        a.length.total_cmp(&b.length).then(a.holonomy.cmp(&b.holonomy)).then(a.start_square.cmp(&b.start_square))
    });
}

/// All saddle connections of deformed length at most `bound`.
pub fn saddle_connections(x: &Origami, bound: f64) -> Result<Vec<SaddleConnection>> {
    saddle_connections_with_budget(x, bound, DEFAULT_BUDGET)
}

/// As [`saddle_connections`], failing with a resource error when the
/// enumeration would cross more than `budget` grid edges.
pub fn saddle_connections_with_budget(x: &Origami, bound: f64, budget: u64) -> Result<Vec<SaddleConnection>> {
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::invalid(format!("length bound {bound} must be positive and finite")));
    }
    let limit = bound * (1.0 + LENGTH_SLACK);
    let sheets: Vec<usize> = x.singular_set().iter().flat_map(|&k| x.vertex_classes()[k].iter().copied()).collect();
    let mut directions: Vec<((i64, i64), u32)> = Vec::new();
    let mut work: u64 = 0;
    for (p, q) in points_in_disc(&x.deformation, bound) {
        if !(q > 0 || (q == 0 && p > 0)) || gcd(p, q) != 1 {
            continue;
        }
        let max_steps = (limit / image_length(&x.deformation, (p, q))).floor() as u32;
        if max_steps == 0 {
            continue;
        }
        work = work.saturating_add(sheets.len() as u64 * max_steps as u64 * (p.unsigned_abs() + q as u64));
        directions.push(((p, q), max_steps));
    }
    if work > budget {
        return Err(Error::resource(format!(
            "saddle connection search up to length {bound} needs ~{work} grid crossings \
             (budget {budget}); {} directions pending, no partial results kept",
            directions.len()
        )));
    }
    let mut found: Vec<SaddleConnection> = directions
        .par_iter()
        .flat_map_iter(|&((p, q), max_steps)| {
            sheets.iter().filter_map(move |&s| x.trace_separatrix(s, p, q, max_steps))
        })
        .collect();
    found.retain(|c| c.length <= limit);
    sort_connections(&mut found);
    Ok(found)
}

/// Length of the shortest saddle connection.
///
/// When every vertex is marked, the first lattice point on any primitive ray
/// is a singularity, so the systole is the shortest vector of `D·Z²`.
pub fn systole(x: &Origami) -> Result<f64> {
    if x.singular_set().len() == x.vertex_classes().len() {
        return Ok(shortest_vector_length(&x.deformation));
    }
    systole_by_tracing(x)
}

/// Systole from the enumerator alone. The search radius starts at the
/// shortest vector of `D·Z²` and doubles until a connection is found.
pub fn systole_by_tracing(x: &Origami) -> Result<f64> {
    let mut bound = shortest_vector_length(&x.deformation);
    for _ in 0..64 {
        let list = saddle_connections(x, bound)?;
        if let Some(first) = list.first() {
            return Ok(first.length);
        }
        bound *= 2.0;
    }
    Err(Error::resource("no saddle connection found"))
}

/// `V_δ(x) = max(sys(x)^{−(1+δ)}, 1)`.
pub fn v_delta(x: &Origami, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::domain(format!("δ = {delta} must lie in (0, 1/4)")));
    }
    Ok(systole(x)?.powf(-(1.0 + delta)).max(1.0))
}
