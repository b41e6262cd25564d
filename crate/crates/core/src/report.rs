//! Result reporting shared by the library and the command line tool.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Which route produced a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Oracle,
    Sweep,
    Maxima,
    Profile,
    Treewidth,
    Combined,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Algorithm::Oracle => "oracle",
            Algorithm::Sweep => "sweep",
            Algorithm::Maxima => "maxima",
            Algorithm::Profile => "profile",
            Algorithm::Treewidth => "treewidth",
            Algorithm::Combined => "combined",
        };
        f.write_str(name)
    }
}

/// Instance parameters observed while measuring. Fields an algorithm does
/// not compute stay `None` and are omitted from serialized output.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub n: usize,
    pub d: usize,
    /// Number of maximal (undominated) boxes.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub h: Option<usize>,
    /// Profile: the smallest per-axis stabbing number.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    /// Quasi-profile: the largest per-axis stabbing number.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kappa: Option<usize>,
    /// Number of slabs in a domain partition.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<usize>,
    /// Number of nodes of the tree decomposition actually used.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho: Option<usize>,
    /// Width of the tree decomposition actually used.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub width: Option<usize>,
}

impl Stats {
    pub fn new(n: usize, d: usize) -> Self {
        Stats {
            n,
            d,
            ..Stats::default()
        }
    }
}

/// Outcome of one measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub volume: f64,
    pub algorithm: Algorithm,
    pub stats: Stats,
    /// Seconds spent, filled in by callers that time the run; library
    /// functions leave it at zero.
    pub wall_time: f64,
}

impl MeasureReport {
    pub fn new(volume: f64, algorithm: Algorithm, stats: Stats) -> Self {
        MeasureReport {
            volume,
            algorithm,
            stats,
            wall_time: 0.0,
        }
    }
}
