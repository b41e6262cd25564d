//! Filtering boxes through vector maxima before measuring.
//!
//! A box contained in another box contributes nothing to the union, so only
//! maximal (undominated) boxes matter. Containment of boxes is exactly
//! componentwise dominance of the vectors produced by [`box_to_vector`], so
//! the filter reduces to a classic maxima computation, done here by divide
//! and conquer. When few boxes are maximal this collapses the instance long
//! before the solver sees it.

use crate::geometry::{AxisBox, Instance};
use crate::report::{Algorithm, MeasureReport, Stats};
use crate::solver::{self, SolverConfig};

/// Outcome of the maxima filter over a box set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximaResult {
    /// Indices of the maximal boxes, strictly increasing.
    pub kept: Vec<usize>,
}

impl MaximaResult {
    /// Number of maximal boxes.
    pub fn h(&self) -> usize {
        self.kept.len()
    }
}

/// Maps a box to the vector whose componentwise order is box containment:
/// `(-lo[0], hi[0], -lo[1], hi[1], ...)`.
///
/// Box `a` contains box `b` exactly when `box_to_vector(a)` dominates
/// `box_to_vector(b)` in every component.
pub fn box_to_vector(b: &AxisBox) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * b.dim());
    for axis in 0..b.dim() {
        v.push(-b.lo()[axis]);
        v.push(b.hi()[axis]);
    }
    v
}

/// Indices of the maxima of a point set under componentwise dominance,
/// ascending.
///
/// A point is kept when no other point weakly dominates it in every
/// component; among identical points only the lowest index survives.
/// All points must share one dimension, which must be at least 1.
pub fn vector_maxima(points: &[Vec<f64>]) -> Vec<usize> {
    if points.is_empty() {
        return Vec::new();
    }
    let dim = points[0].len();
    assert!(dim >= 1, "points must have dimension at least 1");
    assert!(
        points.iter().all(|p| p.len() == dim),
        "points must share one dimension"
    );

    // Collapse duplicates to their lowest index, then sort representatives
    // in descending lexicographic order. A point can only be dominated by
    // one that sorts before it, so a divide at the midpoint gives a "high"
    // half whose maxima are final and filter the "low" half's.
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&points[a], &points[b]).then(a.cmp(&b)));
    let mut reps: Vec<usize> = Vec::with_capacity(order.len());
    for &i in &order {
        if reps.last().is_none_or(|&r| points[r] != points[i]) {
            reps.push(i);
        }
    }
    reps.reverse();

    let mut kept = maxima_rec(points, &reps);
    kept.sort_unstable();
    kept
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.total_cmp(y);
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// Maxima among `reps` (distinct points in descending lexicographic order),
/// preserved in that order.
fn maxima_rec(points: &[Vec<f64>], reps: &[usize]) -> Vec<usize> {
    if reps.len() <= 16 {
        let mut kept = Vec::with_capacity(reps.len());
        'outer: for (pos, &j) in reps.iter().enumerate() {
            // Only earlier (lexicographically larger) points can dominate.
            for &i in &reps[..pos] {
                if dominates(&points[i], &points[j]) {
                    continue 'outer;
                }
            }
            kept.push(j);
        }
        return kept;
    }
    let mid = reps.len() / 2;
    let high = maxima_rec(points, &reps[..mid]);
    let low = maxima_rec(points, &reps[mid..]);
    let mut kept = high;
    let split = kept.len();
    for &j in &low {
        if kept[..split]
            .iter()
            .all(|&i| !dominates(&points[i], &points[j]))
        {
            kept.push(j);
        }
    }
    kept
}

/// Indices of the boxes not contained in any other box, ascending.
pub fn box_maxima(boxes: &[AxisBox]) -> MaximaResult {
    let vectors: Vec<Vec<f64>> = boxes.iter().map(box_to_vector).collect();
    MaximaResult {
        kept: vector_maxima(&vectors),
    }
}

/// Measures the instance after dropping dominated boxes.
pub fn measure_maxima_filtered(inst: &Instance, cfg: &SolverConfig) -> MeasureReport {
    let result = box_maxima(inst.boxes());
    let filtered = inst.restrict(&result.kept);
    let volume = solver::measure(&filtered, cfg);
    let mut stats = Stats::new(inst.len(), inst.dim());
    stats.h = Some(result.h());
    MeasureReport::new(volume, Algorithm::Maxima, stats)
}
