//! Seeded generators for instance families with known structure.
//!
//! Each family pins down one of the parameters the adaptive algorithms
//! exploit: `nested` has a single maximal box, `chain` has profile 2 and a
//! path intersection graph, `dominated` has a prescribed number of maximal
//! boxes, `stacked` bounds the stabbing count along the first axis, and
//! `random` has no structure at all. Generation is deterministic in the
//! seed, and [`verify_family`] re-checks the advertised structure of an
//! instance, which makes corrupted or hand-edited fixtures detectable.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::FamilyError;
use crate::geometry::{AxisBox, Instance};
use crate::maxima;
use crate::profile;
use crate::treewidth;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Nested,
    Chain,
    Dominated,
    Stacked,
    Random,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Nested => "nested",
            Family::Chain => "chain",
            Family::Dominated => "dominated",
            Family::Stacked => "stacked",
            Family::Random => "random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nested" => Ok(Family::Nested),
            "chain" => Ok(Family::Chain),
            "dominated" => Ok(Family::Dominated),
            "stacked" => Ok(Family::Stacked),
            "random" => Ok(Family::Random),
            other => Err(FamilyError::UnknownFamily(other.to_string())),
        }
    }
}

/// Parameters of one generated instance.
///
/// `param` is family-specific: the number of maximal boxes `m` for
/// `dominated`, the group size `k` for `stacked`; the other families ignore
/// it. Only `dominated`, `stacked` and `random` consume the seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub n: usize,
    pub d: usize,
    pub param: Option<usize>,
    pub seed: u64,
}

/// Builds the instance described by `spec`, deterministically in the seed.
pub fn generate(spec: &FamilySpec) -> Result<Instance, FamilyError> {
    let family = spec.family.name();
    if spec.n == 0 {
        return Err(FamilyError::EmptyFamily { family, n: 0 });
    }
    if spec.d == 0 {
        return Err(FamilyError::ZeroDimension { family, d: 0 });
    }
    let (n, d) = (spec.n, spec.d);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let inst = match spec.family {
        Family::Nested => {
            let domain = AxisBox::cube(d, 0.0, 1.0).unwrap();
            let boxes = (0..n)
                .map(|i| {
                    let r = 0.1 + 0.35 * (n - i) as f64 / n as f64;
                    AxisBox::cube(d, 0.5 - r, 0.5 + r).unwrap()
                })
                .collect();
            Instance::new(domain, boxes).unwrap()
        }
        Family::Chain => chain_instance(n, d),
        Family::Dominated => {
            let m = require_param(spec, "m")?;
            let base = chain_instance(m, d);
            let mut boxes = base.boxes().to_vec();
            for _ in m..n {
                let owner = boxes[rng.gen_range(0..m)].clone();
                let mut lo = Vec::with_capacity(d);
                let mut hi = Vec::with_capacity(d);
                for axis in 0..d {
                    lo.push(owner.lo()[axis] + rng.gen_range(0.2..1.2));
                    hi.push(owner.hi()[axis] - rng.gen_range(0.2..1.2));
                }
                boxes.push(AxisBox::new(lo, hi).unwrap());
            }
            Instance::new(base.domain().clone(), boxes).unwrap()
        }
        Family::Stacked => {
            let k = require_param(spec, "k")?;
            let groups = n.div_ceil(k);
            let lo = vec![0.0; d];
            let mut hi = vec![1.0; d];
            hi[0] = 2.0 * (groups - 1) as f64 + 1.0;
            let domain = AxisBox::new(lo, hi).unwrap();
            let boxes = (0..n)
                .map(|i| {
                    let g = (i / k) as f64;
                    let mut lo = Vec::with_capacity(d);
                    let mut hi = Vec::with_capacity(d);
                    lo.push(2.0 * g);
                    hi.push(2.0 * g + 1.0);
                    for _ in 1..d {
                        lo.push(0.5 - rng.gen_range(0.1..0.5));
                        hi.push(0.5 + rng.gen_range(0.1..0.5));
                    }
                    AxisBox::new(lo, hi).unwrap()
                })
                .collect();
            Instance::new(domain, boxes).unwrap()
        }
        Family::Random => {
            let domain = AxisBox::cube(d, 0.0, 1.0).unwrap();
            let boxes = (0..n)
                .map(|_| {
                    let mut lo = Vec::with_capacity(d);
                    let mut hi = Vec::with_capacity(d);
                    for _ in 0..d {
                        let a: f64 = rng.gen();
                        let b: f64 = rng.gen();
                        lo.push(a.min(b));
                        hi.push(a.max(b));
                    }
                    AxisBox::new(lo, hi).unwrap()
                })
                .collect();
            Instance::new(domain, boxes).unwrap()
        }
    };
    Ok(inst)
}

/// Boxes `[2i, 2i+3]^d`: consecutive boxes overlap by a third, the rest are
/// separated.
fn chain_instance(n: usize, d: usize) -> Instance {
    let domain = AxisBox::cube(d, 0.0, 2.0 * (n - 1) as f64 + 3.0).unwrap();
    let boxes = (0..n)
        .map(|i| AxisBox::cube(d, 2.0 * i as f64, 2.0 * i as f64 + 3.0).unwrap())
        .collect();
    Instance::new(domain, boxes).unwrap()
}

fn require_param(spec: &FamilySpec, name: &'static str) -> Result<usize, FamilyError> {
    let family = spec.family.name();
    match spec.param {
        None => Err(FamilyError::MissingParameter { family, name }),
        Some(p) if p == 0 || p > spec.n => Err(FamilyError::BadParameter {
            family,
            name,
            got: p,
            max: spec.n,
        }),
        Some(p) => Ok(p),
    }
}

/// Outcome of re-checking an instance against its family's guarantees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyVerdict {
    violations: Vec<String>,
}

impl FamilyVerdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[String] {
        &self.violations
    }
}

/// Re-derives the structural guarantees the family advertises and reports
/// every one the instance fails to meet.
pub fn verify_family(inst: &Instance, spec: &FamilySpec) -> FamilyVerdict {
    let mut violations = Vec::new();
    if inst.dim() != spec.d {
        violations.push(format!(
            "instance dimension {} does not match the requested dimension {}",
            inst.dim(),
            spec.d
        ));
    }
    if inst.len() != spec.n {
        violations.push(format!(
            "instance has {} boxes, the generator requested {}",
            inst.len(),
            spec.n
        ));
    }
    for (i, b) in inst.boxes().iter().enumerate() {
        if !inst.domain().contains(b) {
            violations.push(format!("box {i} leaves the domain"));
            break;
        }
    }
    if !violations.is_empty() {
        return FamilyVerdict { violations };
    }

    let n = spec.n;
    match spec.family {
        Family::Nested => {
            let h = maxima::box_maxima(inst.boxes()).h();
            if h != 1 {
                violations.push(format!("nested family must have h = 1, found h = {h}"));
            }
            let report = profile::compute_profile(inst);
            if report.profile != n {
                violations.push(format!(
                    "nested family must have profile n = {n}, found {}",
                    report.profile
                ));
            }
            let g = treewidth::build_intersection_graph(inst);
            if g.edge_count() != n * (n - 1) / 2 {
                violations.push(format!(
                    "nested family graph must be complete, found {} of {} edges",
                    g.edge_count(),
                    n * (n - 1) / 2
                ));
            }
        }
        Family::Chain => {
            let h = maxima::box_maxima(inst.boxes()).h();
            if h != n {
                violations.push(format!("chain family must have h = n = {n}, found {h}"));
            }
            let expected_profile = n.min(2);
            let report = profile::compute_profile(inst);
            if report.profile != expected_profile {
                violations.push(format!(
                    "chain family must have profile {expected_profile}, found {}",
                    report.profile
                ));
            }
            let g = treewidth::build_intersection_graph(inst);
            let path: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
            if g.edges() != path {
                violations.push("chain family graph must be the path over consecutive boxes".to_string());
            }
        }
        Family::Dominated => {
            let m = spec.param.unwrap_or(0);
            let kept = maxima::box_maxima(inst.boxes()).kept;
            let expected: Vec<usize> = (0..m).collect();
            if kept != expected {
                violations.push(format!(
                    "dominated family must keep exactly the first m = {m} boxes, kept {kept:?}"
                ));
            }
        }
        Family::Stacked => {
            let k = spec.param.unwrap_or(0);
            let report = profile::compute_profile(inst);
            let expected = k.min(n);
            if report.per_dim[0] != expected {
                violations.push(format!(
                    "stacked family must have stabbing count {expected} along axis 0, found {}",
                    report.per_dim[0]
                ));
            }
        }
        Family::Random => {}
    }
    FamilyVerdict { violations }
}
