//! Algorithm selection for `--algo auto`.
//!
//! Every route is exact, so routing is purely a performance heuristic. Each
//! adaptive route is priced by its asymptotic cost with unit constants,
//! evaluated at the instance's measured parameters:
//!
//! - filtering:     n·lg(h)^(2d-2) + h^(d/2)
//! - partitioning:  n·lg(n) + n·k^((d-2)/2)
//! - decomposition: n·lg(n) + n·w^(d/2)
//!
//! and compared against the sweep solver's own n^(d-1)·lg(n). An adaptive
//! route is chosen only when its estimate strictly beats the sweep estimate;
//! ties between adaptive routes go to the earlier one in the order above.

use klee_core::geometry::Instance;
use klee_core::maxima::box_maxima;
use klee_core::profile::compute_profile;
use klee_core::treewidth::{build_intersection_graph, fold_nonredundant, heuristic_decomposition};

use crate::commands::AlgoArg;

/// Estimating the width builds the full pairwise intersection graph, which
/// costs quadratic time before any measuring starts, so it is skipped above
/// this size; the candidates then are filtering, partitioning and sweep.
const WIDTH_ESTIMATION_LIMIT: usize = 2048;

fn lg(x: f64) -> f64 {
    x.max(2.0).log2()
}

pub(crate) fn choose(inst: &Instance) -> AlgoArg {
    let n = inst.len();
    if n == 0 {
        return AlgoArg::Sweep;
    }
    let d = inst.dim();
    let (nf, df) = (n as f64, d as f64);

    let sweep = nf.powf(df - 1.0) * lg(nf);

    let h = box_maxima(inst.boxes()).h() as f64;
    let maxima = nf * lg(h).powf(2.0 * df - 2.0) + h.powf(df / 2.0);

    let k = compute_profile(inst).profile as f64;
    let profile = nf * lg(nf) + nf * k.powf(((df - 2.0) / 2.0).max(0.0));

    let mut candidates = vec![(maxima, AlgoArg::Maxima), (profile, AlgoArg::Profile)];
    if n <= WIDTH_ESTIMATION_LIMIT {
        let g = build_intersection_graph(inst);
        let w = fold_nonredundant(&heuristic_decomposition(&g)).width() as f64;
        candidates.push((nf * lg(nf) + nf * w.powf(df / 2.0), AlgoArg::Treewidth));
    }

    let best = candidates
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least two candidates");
    if best.0 < sweep {
        best.1
    } else {
        AlgoArg::Sweep
    }
}
