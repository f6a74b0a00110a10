//! Browser entry points for the demo page. Each function returns a JSON
//! document as a string; errors come back as `{"error": "..."}` so the page
//! can render them without exception plumbing.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Map, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use shorlat::cf::cf_recover;
use shorlat::factor::{shor_classical, BoundPolicy};
use shorlat::io::{
    basis_from_str, basis_to_json, bigint_to_json, parse_rational, trace_to_json, vector_to_json,
};
use shorlat::lattice::{gauss_reduce_trajectory, shortest_vector_oracle_with_budget};
use shorlat::recovery::{make_params, recover_period, RecoveryStatus};
use shorlat::sampler::{PeriodInstance, RoundingMode, SampleStream, SamplerConfig};

fn error_doc(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

/// Reduce the basis given by two text vectors (e.g. `"89, 0"` and `"55, 1"`)
/// and report every intermediate basis, for step-by-step animation.
/// `t_squared` is a rational like `"3/2"`; empty means the plain algorithm.
#[wasm_bindgen]
pub fn reduce_basis(u: &str, v: &str, t_squared: &str) -> String {
    let run = || -> shorlat::Result<Value> {
        let basis = basis_from_str(&format!("{u}\n{v}\n"))?;
        let tau = if t_squared.trim().is_empty() {
            BigRational::one()
        } else {
            parse_rational(t_squared)?
        };
        let (reduced, trace, steps) = gauss_reduce_trajectory(&basis, &tau)?;

        // Cross-check against enumeration when the instance is small enough;
        // the page shows it as independent confirmation.
        let oracle = shortest_vector_oracle_with_budget(&basis, 2_000_000).ok();

        let steps: Vec<Value> = steps
            .iter()
            .map(|(su, sv)| {
                json!({
                    "u": vector_to_json(su),
                    "v": vector_to_json(sv),
                    "norm_u_sq": bigint_to_json(&su.norm_sq()),
                    "norm_v_sq": bigint_to_json(&sv.norm_sq()),
                })
            })
            .collect();
        Ok(json!({
            "input": basis_to_json(&basis),
            "reduced": basis_to_json(&reduced),
            "shortest": vector_to_json(reduced.u()),
            "shortest_norm_sq": bigint_to_json(&reduced.u().norm_sq()),
            "steps": steps,
            "trace": trace_to_json(&trace),
            "oracle": oracle.map(|o| json!({
                "norm_sq": bigint_to_json(&o.norm_sq),
                "minimal_classes": o.minimal_classes,
                "agrees": o.norm_sq == reduced.u().norm_sq(),
            })).unwrap_or(Value::Null),
        }))
    };
    match run() {
        Ok(doc) => doc.to_string(),
        Err(e) => error_doc(e),
    }
}

/// Sample two outcomes for a hidden period and run the full pipeline:
/// lattice construction, reduction, coefficient extraction, period estimate,
/// plus the continued-fractions candidates for the first sample.
/// `rounding` is `"floor"`, `"ceil"` or `"random"`; `q_percent` in 1..=100
/// is the ideal-sample probability.
#[wasm_bindgen]
pub fn recover_demo(r: u32, bound: u32, seed: u32, rounding: &str, q_percent: u32) -> String {
    let run = || -> shorlat::Result<Value> {
        let rounding = match rounding {
            "floor" => RoundingMode::Floor,
            "ceil" => RoundingMode::Ceil,
            _ => RoundingMode::RandomPerSample,
        };
        let q = BigRational::new(BigInt::from(q_percent.clamp(1, 100)), BigInt::from(100));
        let params = make_params(&BigInt::from(bound), None)?;
        let inst = PeriodInstance::new(BigInt::from(r), params.n.clone())?;
        let config = SamplerConfig::new(rounding, q, seed as u64)?;
        let mut stream = SampleStream::new(inst, config);
        let sx = stream.draw();
        let sy = stream.draw();

        let basis = shorlat::recovery::build_lattice(&sx.x, &sy.x, &params)?;
        let outcome = recover_period(&sx.x, &sy.x, &params)?;
        let truth = |s: &shorlat::sampler::Sample| {
            s.truth.as_ref().map_or(Value::Null, |t| {
                json!({
                    "k": bigint_to_json(&t.k),
                    "rounding": format!("{:?}", t.rounding).to_lowercase(),
                })
            })
        };

        let cf = if sx.x > BigInt::from(0) {
            let res = cf_recover(&sx.x, &params, |c| c == &BigInt::from(r))?;
            json!({
                "candidates": res.candidates.iter().map(bigint_to_json).collect::<Vec<_>>(),
                "contains_period": res.accepted.is_some(),
            })
        } else {
            Value::Null
        };

        let mut doc = Map::new();
        doc.insert("r".into(), json!(r));
        doc.insert("bound".into(), bigint_to_json(&params.bound));
        doc.insert("s".into(), bigint_to_json(&params.s));
        doc.insert("n".into(), bigint_to_json(&params.n));
        doc.insert("x".into(), bigint_to_json(&sx.x));
        doc.insert("y".into(), bigint_to_json(&sy.x));
        doc.insert("x_truth".into(), truth(&sx));
        doc.insert("y_truth".into(), truth(&sy));
        doc.insert("basis".into(), basis_to_json(&basis));
        doc.insert(
            "status".into(),
            serde_json::to_value(outcome.status).expect("status serializes"),
        );
        doc.insert(
            "k".into(),
            outcome.k.as_ref().map_or(Value::Null, bigint_to_json),
        );
        doc.insert(
            "l".into(),
            outcome.l.as_ref().map_or(Value::Null, bigint_to_json),
        );
        doc.insert(
            "r_hat".into(),
            outcome.r_hat.as_ref().map_or(Value::Null, bigint_to_json),
        );
        doc.insert(
            "shortest_vector".into(),
            outcome
                .shortest_vector
                .as_ref()
                .map_or(Value::Null, vector_to_json),
        );
        doc.insert("iterations".into(), json!(outcome.iterations));
        doc.insert("cf".into(), cf);
        doc.insert(
            "exact".into(),
            json!(outcome.status == RecoveryStatus::Recovered
                && outcome.r_hat == Some(BigInt::from(r))),
        );
        if let Some(detail) = outcome.detail {
            doc.insert("detail".into(), json!(detail));
        }
        Ok(Value::Object(doc))
    };
    match run() {
        Ok(doc) => doc.to_string(),
        Err(e) => error_doc(e),
    }
}

/// One classical factoring trial against `n` (period bound policy `B = n`).
#[wasm_bindgen]
pub fn factor_number(n: u32, seed: u32) -> String {
    let config = SamplerConfig::noise_free(seed as u64);
    match shor_classical(n as u64, &config, BoundPolicy::N, 20) {
        Ok(trial) => serde_json::to_value(&trial)
            .expect("trial serializes")
            .to_string(),
        Err(e) => error_doc(e),
    }
}
