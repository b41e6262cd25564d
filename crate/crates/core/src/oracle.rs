//! Small brute-force reference implementations.
//!
//! Everything here is written for obviousness, not speed, and is used to
//! cross-check the real algorithms in tests. The grid oracle accumulates
//! cell volumes in exact dyadic arithmetic, so its result depends only on
//! the region being measured, not on which boxes describe it.

use crate::dyadic::Dyadic;
use crate::error::OracleError;
use crate::geometry::{AxisBox, Instance};

/// Largest box count [`grid_measure`] accepts.
pub const GRID_MAX_BOXES: usize = 16;
/// Largest dimension [`grid_measure`] accepts.
pub const GRID_MAX_DIM: usize = 4;

/// Measure of the union by explicit enumeration of the endpoint grid.
///
/// The coordinate grid spanned by all box endpoints (clipped to the domain)
/// partitions the domain into cells; a cell is covered exactly when some box
/// contains it entirely. Cell volumes are summed exactly, so two inputs
/// covering the same region return bit-identical results. Refuses inputs
/// beyond [`GRID_MAX_BOXES`] or [`GRID_MAX_DIM`].
pub fn grid_measure(inst: &Instance) -> Result<f64, OracleError> {
    let d = inst.dim();
    if inst.len() > GRID_MAX_BOXES {
        return Err(OracleError::TooManyBoxes {
            n: inst.len(),
            cap: GRID_MAX_BOXES,
        });
    }
    if d > GRID_MAX_DIM {
        return Err(OracleError::DimensionTooHigh {
            d,
            cap: GRID_MAX_DIM,
        });
    }

    let boxes = inst.clipped_boxes();
    if boxes.is_empty() {
        return Ok(0.0);
    }
    let domain = inst.domain();

    // Per axis: sorted distinct cut coordinates and, per cell, the bitmask
    // of boxes covering that cell's extent on the axis.
    let mut cuts: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut cover: Vec<Vec<u32>> = Vec::with_capacity(d);
    for axis in 0..d {
        let mut coords = vec![domain.lo()[axis], domain.hi()[axis]];
        for b in &boxes {
            coords.push(b.lo()[axis]);
            coords.push(b.hi()[axis]);
        }
        coords.sort_by(f64::total_cmp);
        coords.dedup();
        let mut masks = Vec::with_capacity(coords.len().saturating_sub(1));
        for cell in coords.windows(2) {
            let mut mask = 0u32;
            for (i, b) in boxes.iter().enumerate() {
                if b.lo()[axis] <= cell[0] && cell[1] <= b.hi()[axis] {
                    mask |= 1 << i;
                }
            }
            masks.push(mask);
        }
        cuts.push(coords);
        cover.push(masks);
    }

    // Walk all cell columns over the first d-1 axes; within a column, sum
    // the covered lengths along the last axis and scale by the column's
    // exact base volume.
    let last = d - 1;
    let last_lengths: Vec<Dyadic> = cuts[last]
        .windows(2)
        .map(|w| Dyadic::from_f64_diff(w[1], w[0]))
        .collect();

    let mut total = Dyadic::zero();
    let mut index = vec![0usize; last];
    loop {
        let mut base = Dyadic::one();
        let mut column_mask = u32::MAX;
        for axis in 0..last {
            let cell = index[axis];
            base = base.mul(&Dyadic::from_f64_diff(
                cuts[axis][cell + 1],
                cuts[axis][cell],
            ));
            column_mask &= cover[axis][cell];
        }
        if column_mask != 0 {
            let mut covered = Dyadic::zero();
            for (cell, length) in last_lengths.iter().enumerate() {
                if column_mask & cover[last][cell] != 0 {
                    covered = covered.add(length);
                }
            }
            total = total.add(&base.mul(&covered));
        }

        // Mixed-radix increment over the column index; empty when d == 1.
        let mut axis = last;
        loop {
            if axis == 0 {
                return Ok(total.to_f64());
            }
            axis -= 1;
            index[axis] += 1;
            if index[axis] < cover[axis].len() {
                break;
            }
            index[axis] = 0;
        }
    }
}

/// Indices of boxes not contained in any other box, by pairwise comparison.
///
/// Among identical boxes only the lowest index survives. Result is sorted
/// ascending.
pub fn dominance_maxima_oracle(boxes: &[AxisBox]) -> Vec<usize> {
    let mut kept = Vec::new();
    'outer: for (j, b) in boxes.iter().enumerate() {
        for (i, a) in boxes.iter().enumerate() {
            if i == j {
                continue;
            }
            if a.contains(b) && (a != b || i < j) {
                continue 'outer;
            }
        }
        kept.push(j);
    }
    kept
}

/// The maximum number of boxes stabbed by any hyperplane orthogonal to
/// `dim_index`, by direct counting at every candidate coordinate.
///
/// Boxes are clipped to the domain first. A hyperplane at `x` stabs a box
/// when `lo <= x < hi`, or when the box is degenerate on the axis and
/// `lo == x`; this half-open rule makes slab counts additive.
pub fn stabbing_oracle(inst: &Instance, dim_index: usize) -> usize {
    assert!(
        dim_index < inst.dim(),
        "axis {dim_index} out of range for a {}-dimensional instance",
        inst.dim()
    );
    let boxes = inst.clipped_boxes();
    let mut candidates: Vec<f64> = boxes
        .iter()
        .flat_map(|b| [b.lo()[dim_index], b.hi()[dim_index]])
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let mut best = 0usize;
    for &x in &candidates {
        let count = boxes
            .iter()
            .filter(|b| {
                let (lo, hi) = (b.lo()[dim_index], b.hi()[dim_index]);
                (lo <= x && x < hi) || (lo == hi && lo == x)
            })
            .count();
        best = best.max(count);
    }
    best
}

/// [`stabbing_oracle`] applied to every axis.
pub fn stabbing_counts(inst: &Instance) -> Vec<usize> {
    (0..inst.dim()).map(|axis| stabbing_oracle(inst, axis)).collect()
}
