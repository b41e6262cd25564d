//! Browser bindings for the measure library.
//!
//! Every function takes and returns JSON strings, so the page talks plain
//! `JSON.parse`/`JSON.stringify` and the exported surface stays at three
//! operations: generate an instance, analyze its adaptive parameters, and
//! measure it with a chosen algorithm.
//!
//! The `*_impl` functions carry the logic and compile (and are tested) on
//! native targets; the `#[wasm_bindgen]` wrappers only translate errors.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use klee_core::geometry::Instance;
use klee_core::instances::{generate, verify_family, Family, FamilySpec};
use klee_core::maxima::{box_maxima, measure_maxima_filtered};
use klee_core::oracle::grid_measure;
use klee_core::profile::{compute_profile, measure_profile_partitioned};
use klee_core::report::{Algorithm, MeasureReport, Stats};
use klee_core::solver::{measure, SolverConfig};
use klee_core::treewidth::{
    build_intersection_graph, decomposition_from_components, fold_nonredundant,
    heuristic_decomposition, measure_combined, measure_treewidth_heuristic,
};

/// Builds a named family instance and returns it as pretty JSON.
#[wasm_bindgen]
pub fn generate_instance(
    family: &str,
    n: u32,
    d: u32,
    param: Option<u32>,
    seed: u32,
) -> Result<String, JsError> {
    generate_instance_impl(family, n as usize, d as usize, param.map(|p| p as usize), seed as u64)
        .map_err(|e| JsError::new(&e))
}

/// Returns the adaptive parameters of an instance as JSON.
#[wasm_bindgen]
pub fn analyze_instance(instance_json: &str) -> Result<String, JsError> {
    analyze_instance_impl(instance_json).map_err(|e| JsError::new(&e))
}

/// Measures an instance with the named algorithm and returns the report
/// as JSON. Timing is left to the caller.
#[wasm_bindgen]
pub fn measure_instance(instance_json: &str, algo: &str) -> Result<String, JsError> {
    measure_instance_impl(instance_json, algo).map_err(|e| JsError::new(&e))
}

fn generate_instance_impl(
    family: &str,
    n: usize,
    d: usize,
    param: Option<usize>,
    seed: u64,
) -> Result<String, String> {
    let family: Family = family.parse().map_err(|e| format!("{e}"))?;
    let spec = FamilySpec {
        family,
        n,
        d,
        param,
        seed,
    };
    let inst = generate(&spec).map_err(|e| format!("{e}"))?;
    let verdict = verify_family(&inst, &spec);
    assert!(
        verdict.is_ok(),
        "generated instance violates its family guarantees: {:?}",
        verdict.violations()
    );
    Ok(serde_json::to_string_pretty(&inst).expect("instance serializes"))
}

/// Adaptive parameters of one instance, mirroring the CLI `stats` report.
#[derive(Debug, Serialize)]
struct InstanceParameters {
    n: usize,
    d: usize,
    h: usize,
    per_dim: Vec<usize>,
    k: usize,
    kappa: usize,
    components: usize,
    heuristic_width: usize,
}

fn analyze_instance_impl(instance_json: &str) -> Result<String, String> {
    let inst = parse_instance(instance_json)?;
    let profile = compute_profile(&inst);
    let g = build_intersection_graph(&inst);
    let components = if inst.is_empty() {
        0
    } else {
        decomposition_from_components(&g).node_count()
    };
    let params = InstanceParameters {
        n: inst.len(),
        d: inst.dim(),
        h: box_maxima(inst.boxes()).h(),
        per_dim: profile.per_dim,
        k: profile.profile,
        kappa: profile.quasi_profile,
        components,
        heuristic_width: fold_nonredundant(&heuristic_decomposition(&g)).width(),
    };
    Ok(serde_json::to_string_pretty(&params).expect("parameters serialize"))
}

fn measure_instance_impl(instance_json: &str, algo: &str) -> Result<String, String> {
    let inst = parse_instance(instance_json)?;
    let cfg = SolverConfig::default();
    let report: MeasureReport = match algo {
        "oracle" => {
            let volume = grid_measure(&inst).map_err(|e| format!("{e}"))?;
            MeasureReport::new(volume, Algorithm::Oracle, Stats::new(inst.len(), inst.dim()))
        }
        "sweep" => MeasureReport::new(
            measure(&inst, &cfg),
            Algorithm::Sweep,
            Stats::new(inst.len(), inst.dim()),
        ),
        "maxima" => measure_maxima_filtered(&inst, &cfg),
        "profile" => measure_profile_partitioned(&inst, &cfg),
        "treewidth" => measure_treewidth_heuristic(&inst, &cfg),
        "combined" => measure_combined(&inst, None, &cfg).map_err(|e| format!("{e}"))?,
        other => {
            return Err(format!(
                "unknown algorithm '{other}'; expected oracle, sweep, maxima, profile, \
                 treewidth or combined"
            ))
        }
    };
    Ok(serde_json::to_string_pretty(&report).expect("report serializes"))
}

fn parse_instance(text: &str) -> Result<Instance, String> {
    serde_json::from_str(text).map_err(|e| format!("invalid instance: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_SQUARES: &str = r#"{
        "dim": 2,
        "domain": { "lo": [0.0, 0.0], "hi": [4.0, 4.0] },
        "boxes": [
            { "lo": [0.0, 0.0], "hi": [1.0, 1.0] },
            { "lo": [0.5, 0.5], "hi": [1.5, 1.5] }
        ]
    }"#;

    fn volume_of(json: &str) -> f64 {
        let report: serde_json::Value = serde_json::from_str(json).unwrap();
        report["volume"].as_f64().unwrap()
    }

    #[test]
    fn measures_two_squares_with_every_algorithm() {
        for algo in ["oracle", "sweep", "maxima", "profile", "treewidth", "combined"] {
            let report = measure_instance_impl(TWO_SQUARES, algo).unwrap();
            assert_eq!(volume_of(&report), 1.75, "{algo}");
        }
    }

    #[test]
    fn rejects_unknown_algorithms_and_bad_instances() {
        assert!(measure_instance_impl(TWO_SQUARES, "quantum")
            .unwrap_err()
            .contains("unknown algorithm"));
        assert!(measure_instance_impl("{}", "sweep")
            .unwrap_err()
            .contains("invalid instance"));
    }

    #[test]
    fn generates_analyzable_instances() {
        let inst = generate_instance_impl("nested", 8, 2, None, 1).unwrap();
        let params: serde_json::Value =
            serde_json::from_str(&analyze_instance_impl(&inst).unwrap()).unwrap();
        assert_eq!(params["n"], 8);
        assert_eq!(params["h"], 1);
        assert_eq!(params["k"], 8);
        assert_eq!(params["heuristic_width"], 7);
    }

    #[test]
    fn generation_is_deterministic_and_validated() {
        let a = generate_instance_impl("random", 10, 2, None, 7).unwrap();
        let b = generate_instance_impl("random", 10, 2, None, 7).unwrap();
        assert_eq!(a, b);
        assert!(generate_instance_impl("moebius", 4, 2, None, 0).is_err());
        assert!(generate_instance_impl("dominated", 4, 2, None, 0)
            .unwrap_err()
            .contains("parameter"));
    }

    #[test]
    fn round_trips_generated_instances_through_measurement() {
        let inst = generate_instance_impl("chain", 6, 2, None, 0).unwrap();
        let report = measure_instance_impl(&inst, "sweep").unwrap();
        assert_eq!(volume_of(&report), 49.0);
    }
}
