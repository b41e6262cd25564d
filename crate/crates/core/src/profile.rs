//! Stabbing profiles and profile-guided domain partitioning.
//!
//! The profile of an instance is the smallest, over axes, of the maximum
//! number of boxes any axis-orthogonal hyperplane crosses. A small profile
//! means some axis along which boxes barely pile up; cutting the domain into
//! slabs along that axis yields many near-independent sub-problems whose
//! measures simply add. Each slab meets only a bounded multiple of the
//! profile in boxes, so the sub-problems stay small no matter how the boxes
//! are arranged globally.
//!
//! Stabbing uses a half-open convention: a hyperplane at `x` crosses a box
//! when `lo <= x < hi` (a box degenerate on the axis counts exactly at its
//! `lo`). The same convention assigns boxes to slabs, which is what makes
//! per-slab measures add up without double counting.

use crate::geometry::{AxisBox, Instance};
use crate::report::{Algorithm, MeasureReport, Stats};
use crate::solver::{self, SolverConfig};

/// Per-axis stabbing numbers of an instance, after clipping to the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileReport {
    /// Maximum stabbing count per axis.
    pub per_dim: Vec<usize>,
    /// The minimum of `per_dim`: the profile.
    pub profile: usize,
    /// The maximum of `per_dim`: the quasi-profile.
    pub quasi_profile: usize,
    /// First axis index attaining the profile.
    pub witness_dim: usize,
}

/// A partition of the domain into slabs along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabPartition {
    /// Axis orthogonal to the cuts.
    pub split_dim: usize,
    /// The slabs, ascending along `split_dim`; they tile the domain.
    pub slabs: Vec<AxisBox>,
    /// For each slab, the instance box indices assigned to it, ascending.
    /// A box appears in every slab its clipped extent meets half-openly.
    pub per_slab_boxes: Vec<Vec<usize>>,
}

/// Computes per-axis stabbing numbers by sweeping endpoint events.
///
/// Boxes are clipped to the domain first; boxes entirely outside it are
/// ignored.
pub fn compute_profile(inst: &Instance) -> ProfileReport {
    let boxes = inst.clipped_boxes();
    let d = inst.dim();
    let mut per_dim = Vec::with_capacity(d);
    for axis in 0..d {
        per_dim.push(max_stabbing(&boxes, axis));
    }
    let profile = per_dim.iter().copied().min().unwrap_or(0);
    let quasi_profile = per_dim.iter().copied().max().unwrap_or(0);
    let witness_dim = per_dim
        .iter()
        .position(|&k| k == profile)
        .unwrap_or(0);
    ProfileReport {
        per_dim,
        profile,
        quasi_profile,
        witness_dim,
    }
}

/// Maximum number of boxes crossed by a hyperplane orthogonal to `axis`,
/// under the half-open rule.
fn max_stabbing(boxes: &[AxisBox], axis: usize) -> usize {
    // Events sorted by coordinate; at each distinct coordinate, closings
    // are applied before openings, then degenerate boxes sitting exactly
    // there are counted on top.
    #[derive(Clone, Copy, PartialEq)]
    enum Kind {
        Open,
        Close,
        Degenerate,
    }
    let mut events: Vec<(f64, Kind)> = Vec::with_capacity(2 * boxes.len());
    for b in boxes {
        let (lo, hi) = (b.lo()[axis], b.hi()[axis]);
        if lo == hi {
            events.push((lo, Kind::Degenerate));
        } else {
            events.push((lo, Kind::Open));
            events.push((hi, Kind::Close));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best = 0usize;
    let mut open = 0usize;
    let mut i = 0;
    while i < events.len() {
        let coord = events[i].0;
        let mut degenerate = 0usize;
        while i < events.len() && events[i].0 == coord {
            match events[i].1 {
                Kind::Open => open += 1,
                Kind::Close => open -= 1,
                Kind::Degenerate => degenerate += 1,
            }
            i += 1;
        }
        best = best.max(open + degenerate);
    }
    best
}

/// Cuts the domain along the profile's witness axis at every `2k`-th sorted
/// box endpoint, where `k` is the profile from `report`.
///
/// Cut positions falling on the domain boundary are dropped and coinciding
/// cuts are merged, so slabs always have positive extent (except when the
/// domain itself is flat on the axis). Every box whose clipped extent meets
/// a slab half-openly is listed for that slab; a box degenerate at the
/// domain's upper face is listed for the last slab.
pub fn split_domain(inst: &Instance, report: &ProfileReport) -> SlabPartition {
    let domain = inst.domain();
    let axis = report.witness_dim;
    let k = report.profile;
    let (dlo, dhi) = (domain.lo()[axis], domain.hi()[axis]);

    // Clipped extents along the axis, indexed like the instance; boxes
    // entirely outside the domain get no slab.
    let extents: Vec<Option<(f64, f64)>> = inst
        .boxes()
        .iter()
        .map(|b| b.clip(domain).map(|c| (c.lo()[axis], c.hi()[axis])))
        .collect();

    let mut boundaries = vec![dlo];
    if k > 0 {
        let mut endpoints: Vec<f64> = extents
            .iter()
            .flatten()
            .flat_map(|&(lo, hi)| [lo, hi])
            .collect();
        endpoints.sort_by(f64::total_cmp);
        let mut j = 2 * k;
        while j <= endpoints.len() {
            let cut = endpoints[j - 1];
            if cut > dlo && cut < dhi && *boundaries.last().unwrap() != cut {
                boundaries.push(cut);
            }
            j += 2 * k;
        }
    }
    boundaries.push(dhi);

    let slab_count = boundaries.len() - 1;
    let mut slabs = Vec::with_capacity(slab_count);
    for w in boundaries.windows(2) {
        let mut lo = domain.lo().to_vec();
        let mut hi = domain.hi().to_vec();
        lo[axis] = w[0];
        hi[axis] = w[1];
        slabs.push(AxisBox::new_unchecked(lo, hi));
    }

    // Assign each box to its contiguous run of slabs by binary search over
    // the boundaries. Slab j owns [boundaries[j], boundaries[j+1]).
    let mut per_slab_boxes: Vec<Vec<usize>> = vec![Vec::new(); slab_count];
    let last_slab = slab_count - 1;
    for (index, extent) in extents.iter().enumerate() {
        let Some((lo, hi)) = *extent else { continue };
        let first = slab_of(&boundaries, lo).min(last_slab);
        let last = if lo == hi {
            first
        } else {
            // The slab containing points just below hi.
            (boundaries.partition_point(|&b| b < hi) - 1).min(last_slab)
        };
        for members in &mut per_slab_boxes[first..=last] {
            members.push(index);
        }
    }

    SlabPartition {
        split_dim: axis,
        slabs,
        per_slab_boxes,
    }
}

/// Index of the slab owning coordinate `x` under the half-open rule, with
/// the domain's upper face attributed to the last slab.
fn slab_of(boundaries: &[f64], x: f64) -> usize {
    boundaries.partition_point(|&b| b <= x).saturating_sub(1)
}

/// Measures the instance by splitting the domain into profile-guided slabs
/// and summing per-slab measures.
pub fn measure_profile_partitioned(inst: &Instance, cfg: &SolverConfig) -> MeasureReport {
    let report = compute_profile(inst);
    let partition = split_domain(inst, &report);

    let mut volume = 0.0;
    for (slab, members) in partition.slabs.iter().zip(&partition.per_slab_boxes) {
        if members.is_empty() {
            continue;
        }
        let boxes: Vec<AxisBox> = members
            .iter()
            .filter_map(|&i| inst.boxes()[i].clip(slab))
            .collect();
        let sub = Instance::new(slab.clone(), boxes).expect("slab instance dimensions");
        volume += solver::measure(&sub, cfg);
    }

    let mut stats = Stats::new(inst.len(), inst.dim());
    stats.k = Some(report.profile);
    stats.kappa = Some(report.quasi_profile);
    stats.m = Some(partition.slabs.len());
    MeasureReport::new(volume, Algorithm::Profile, stats)
}
