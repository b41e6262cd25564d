//! Axis-parallel boxes and problem instances.

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// A closed axis-parallel box in `R^d`, stored as its lower and upper corners.
///
/// Corners must be finite and satisfy `lo[i] <= hi[i]` on every axis.
/// Zero-width axes are allowed, so a box may be degenerate (volume zero)
/// while still being a valid region for intersection tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct AxisBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Deserialize)]
struct RawBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl TryFrom<RawBox> for AxisBox {
    type Error = GeometryError;

    fn try_from(raw: RawBox) -> Result<Self, Self::Error> {
        AxisBox::new(raw.lo, raw.hi)
    }
}

impl AxisBox {
    /// Builds a box from its corners, validating finiteness and orientation.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, GeometryError> {
        if lo.len() != hi.len() {
            return Err(GeometryError::CornerLengthMismatch {
                lo: lo.len(),
                hi: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(GeometryError::ZeroDimension);
        }
        for (axis, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if !l.is_finite() {
                return Err(GeometryError::NonFiniteCoordinate { axis, value: l });
            }
            if !h.is_finite() {
                return Err(GeometryError::NonFiniteCoordinate { axis, value: h });
            }
            if l > h {
                return Err(GeometryError::InvertedCorner { axis, lo: l, hi: h });
            }
        }
        Ok(AxisBox { lo, hi })
    }

    /// Builds a box whose invariants are guaranteed by the caller.
    ///
    /// Used on hot paths (clipping, projections) where the corners are
    /// derived from already validated boxes.
    pub(crate) fn new_unchecked(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        debug_assert_eq!(lo.len(), hi.len());
        debug_assert!(!lo.is_empty());
        debug_assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h));
        AxisBox { lo, hi }
    }

    /// Convenience constructor for a cube `[lo, hi]^d`.
    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self, GeometryError> {
        AxisBox::new(vec![lo; d], vec![hi; d])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// Product of side lengths.
    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| h - l)
            .product()
    }

    /// Intersection with `other`, or `None` when the boxes are disjoint.
    ///
    /// Boxes are closed, so touching faces produce a degenerate
    /// (zero-volume) box rather than `None`.
    pub fn clip(&self, other: &AxisBox) -> Option<AxisBox> {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in clip");
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for axis in 0..self.dim() {
            let l = self.lo[axis].max(other.lo[axis]);
            let h = self.hi[axis].min(other.hi[axis]);
            if l > h {
                return None;
            }
            lo.push(l);
            hi.push(h);
        }
        Some(AxisBox::new_unchecked(lo, hi))
    }

    /// Whether the closed boxes share at least one point.
    pub fn intersects(&self, other: &AxisBox) -> bool {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in intersects");
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((sl, sh), (ol, oh))| sl.max(*ol) <= sh.min(*oh))
    }

    /// Whether `self` contains `inner` (non-strict on every face).
    pub fn contains(&self, inner: &AxisBox) -> bool {
        assert_eq!(self.dim(), inner.dim(), "dimension mismatch in contains");
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(inner.lo.iter().zip(&inner.hi))
            .all(|((sl, sh), (il, ih))| sl <= il && ih <= sh)
    }
}

/// A measure problem: a bounding domain and the boxes whose union volume
/// inside the domain is wanted.
///
/// All boxes share the domain's dimension. Boxes may stick out of the domain
/// or lie entirely outside it; solvers only ever count the part inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    dim: usize,
    domain: AxisBox,
    boxes: Vec<AxisBox>,
}

#[derive(Deserialize)]
struct RawInstance {
    dim: usize,
    domain: AxisBox,
    boxes: Vec<AxisBox>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = GeometryError;

    fn try_from(raw: RawInstance) -> Result<Self, Self::Error> {
        if raw.dim != raw.domain.dim() {
            return Err(GeometryError::DeclaredDimensionMismatch {
                declared: raw.dim,
                domain: raw.domain.dim(),
            });
        }
        Instance::new(raw.domain, raw.boxes)
    }
}

impl Instance {
    /// Builds an instance, checking that every box matches the domain's
    /// dimension.
    pub fn new(domain: AxisBox, boxes: Vec<AxisBox>) -> Result<Self, GeometryError> {
        let dim = domain.dim();
        for (index, b) in boxes.iter().enumerate() {
            if b.dim() != dim {
                return Err(GeometryError::BoxDimensionMismatch {
                    index,
                    expected: dim,
                    got: b.dim(),
                });
            }
        }
        Ok(Instance { dim, domain, boxes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &AxisBox {
        &self.domain
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// The boxes clipped to the domain; boxes entirely outside are dropped.
    ///
    /// Note the result indices do not line up with [`Instance::boxes`] when
    /// boxes get dropped.
    pub fn clipped_boxes(&self) -> Vec<AxisBox> {
        self.boxes
            .iter()
            .filter_map(|b| b.clip(&self.domain))
            .collect()
    }

    /// A new instance over the same domain keeping only `indices`.
    ///
    /// Panics if an index is out of range.
    pub fn restrict(&self, indices: &[usize]) -> Instance {
        let boxes = indices.iter().map(|&i| self.boxes[i].clone()).collect();
        Instance {
            dim: self.dim,
            domain: self.domain.clone(),
            boxes,
        }
    }
}
