//! Baseline exact solver: a plane sweep that recurses on dimension.
//!
//! The domain is cut into slabs along the last axis at every distinct box
//! endpoint. Within a slab the set of boxes crossing it is constant, so the
//! slab's contribution is its thickness times the measure of the projected
//! sub-problem one dimension down. Recursion bottoms out in dedicated one-
//! and two-dimensional routines.
//!
//! Each slab rescans the full box list rather than maintaining an
//! incremental active set. That keeps the code simple and the running time
//! an honest function of `n` alone; the adaptive routes in the sibling
//! modules are where instance structure is allowed to help.

use crate::geometry::{AxisBox, Instance};

/// Tuning knobs for [`measure`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Dimension at which the sweep switches to a direct base case.
    /// Must be 1 or 2.
    pub base_case_dim: usize,
    /// Relative tolerance callers should use when comparing volumes
    /// produced by different routes.
    pub tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            base_case_dim: 2,
            tolerance: 1e-9,
        }
    }
}

impl SolverConfig {
    fn validate(&self) {
        assert!(
            self.base_case_dim == 1 || self.base_case_dim == 2,
            "base_case_dim must be 1 or 2, got {}",
            self.base_case_dim
        );
        assert!(
            self.tolerance.is_finite() && self.tolerance > 0.0,
            "tolerance must be a positive finite number, got {}",
            self.tolerance
        );
    }
}

/// Measure of the union of the instance's boxes inside its domain.
pub fn measure(inst: &Instance, cfg: &SolverConfig) -> f64 {
    measure_sweep(inst, cfg)
}

/// The sweep recursion behind [`measure`], callable directly.
pub fn measure_sweep(inst: &Instance, cfg: &SolverConfig) -> f64 {
    cfg.validate();
    let boxes = inst.clipped_boxes();
    sweep_rec(&boxes, inst.domain(), cfg)
}

/// Total length of a union of intervals inside `domain`.
///
/// Intervals are clipped to the domain; intervals entirely outside are
/// ignored. Inputs with `lo > hi` are rejected.
pub fn measure_1d(intervals: &[(f64, f64)], domain: (f64, f64)) -> f64 {
    let mut clipped: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for &(lo, hi) in intervals {
        assert!(lo <= hi, "interval has lo {lo} > hi {hi}");
        let l = lo.max(domain.0);
        let h = hi.min(domain.1);
        if l <= h {
            clipped.push((l, h));
        }
    }
    clipped.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.total_cmp(&b.1)));

    let mut total = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for (lo, hi) in clipped {
        match current {
            Some((clo, chi)) if lo <= chi => current = Some((clo, chi.max(hi))),
            Some((clo, chi)) => {
                total += chi - clo;
                current = Some((lo, hi));
            }
            None => current = Some((lo, hi)),
        }
    }
    if let Some((clo, chi)) = current {
        total += chi - clo;
    }
    total
}

fn sweep_rec(boxes: &[AxisBox], domain: &AxisBox, cfg: &SolverConfig) -> f64 {
    if boxes.is_empty() {
        return 0.0;
    }
    let d = domain.dim();
    if d == 1 {
        let intervals: Vec<(f64, f64)> =
            boxes.iter().map(|b| (b.lo()[0], b.hi()[0])).collect();
        return measure_1d(&intervals, (domain.lo()[0], domain.hi()[0]));
    }
    if d == 2 && cfg.base_case_dim == 2 {
        return area_2d(boxes, domain);
    }

    let axis = d - 1;
    let boundaries = slab_boundaries(boxes, axis);
    let sub_domain = project(domain, axis);
    let mut total = 0.0;
    for w in boundaries.windows(2) {
        let (z0, z1) = (w[0], w[1]);
        let active: Vec<AxisBox> = boxes
            .iter()
            .filter(|b| b.lo()[axis] <= z0 && b.hi()[axis] >= z1)
            .map(|b| project(b, axis))
            .collect();
        if !active.is_empty() {
            total += (z1 - z0) * sweep_rec(&active, &sub_domain, cfg);
        }
    }
    total
}

/// Area of a union of rectangles: vertical slabs along the first axis with
/// an interval merge along the second.
fn area_2d(boxes: &[AxisBox], domain: &AxisBox) -> f64 {
    let boundaries = slab_boundaries(boxes, 0);
    let y_domain = (domain.lo()[1], domain.hi()[1]);
    let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(boxes.len());
    let mut total = 0.0;
    for w in boundaries.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        intervals.clear();
        intervals.extend(
            boxes
                .iter()
                .filter(|b| b.lo()[0] <= x0 && b.hi()[0] >= x1)
                .map(|b| (b.lo()[1], b.hi()[1])),
        );
        if !intervals.is_empty() {
            total += (x1 - x0) * measure_1d(&intervals, y_domain);
        }
    }
    total
}

/// Distinct box endpoints along `axis`, ascending. Coinciding endpoints
/// collapse into a single boundary.
fn slab_boundaries(boxes: &[AxisBox], axis: usize) -> Vec<f64> {
    let mut coords: Vec<f64> = boxes
        .iter()
        .flat_map(|b| [b.lo()[axis], b.hi()[axis]])
        .collect();
    coords.sort_by(f64::total_cmp);
    coords.dedup();
    coords
}

fn project(b: &AxisBox, axis: usize) -> AxisBox {
    let mut lo = b.lo().to_vec();
    let mut hi = b.hi().to_vec();
    lo.remove(axis);
    hi.remove(axis);
    AxisBox::new_unchecked(lo, hi)
}
