//! Browser bindings. Every export takes and returns JSON strings so the page
//! needs no generated TypeScript types; the plain functions in [`api`] do the
//! work and are testable natively.

use wasm_bindgen::prelude::*;

pub mod api {
    use multipartite_concurrence::bounds::Providers;
    use multipartite_concurrence::example::{example_point, sweep};
    use multipartite_concurrence::io::parse_state;
    use multipartite_concurrence::pure::concurrence_partition;
    use multipartite_concurrence::weights::{first_violation, verify_weights};
    use multipartite_concurrence::{Partition, WeightScheme};
    use serde_json::{json, Value};

    fn providers(text: &str) -> Result<Providers, String> {
        text.parse().map_err(|e| format!("{e}"))
    }

    /// `{"t": [...], "closed_form": [...], "engine": [...], "delta": [...]}` over
    /// `steps` points of `[0, 1]`.
    pub fn example_curve(steps: usize, providers_text: &str) -> Result<String, String> {
        let points = sweep(0.0, 1.0, steps, &providers(providers_text)?).map_err(|e| e.to_string())?;
        let col = |f: fn(&multipartite_concurrence::example::ExamplePoint) -> f64| -> Vec<f64> {
            points.iter().map(f).collect()
        };
        Ok(json!({
            "t": col(|p| p.t),
            "closed_form": col(|p| p.bound_sq_paper),
            "engine": col(|p| p.bound_sq_engine),
            "delta": col(|p| p.delta_sq),
        })
        .to_string())
    }

    pub fn example_at(t: f64, providers_text: &str) -> Result<String, String> {
        let p = example_point(t, &providers(providers_text)?).map_err(|e| e.to_string())?;
        serde_json::to_string(&p).map_err(|e| e.to_string())
    }

    /// Exact concurrence of a pure state given in the state-file format.
    /// An empty partition means all singletons.
    pub fn concurrence(state_json: &str, partition: &str) -> Result<String, String> {
        let state = parse_state(state_json).map_err(|e| e.to_string())?;
        let psi = state
            .as_pure()
            .ok_or("concurrence needs a pure state (\"kind\": \"pure\" or a rank-one matrix)")?;
        let n = psi.shape().len();
        let p = if partition.trim().is_empty() {
            Partition::new(n, (0..n).map(|k| 1u32 << k).collect())
        } else {
            Partition::parse_with(partition, n)
        }
        .map_err(|e| e.to_string())?;
        let c = concurrence_partition(&psi, &p).map_err(|e| e.to_string())?;
        Ok(json!({ "partition": p.to_string(), "value": c.value, "squared": c.squared }).to_string())
    }

    /// Coverage slack of a weight scheme on every subset, as exact rationals.
    pub fn verify_scheme(scheme_json: &str) -> Result<String, String> {
        let scheme = WeightScheme::from_json(scheme_json).map_err(|e| e.to_string())?;
        let slack = verify_weights(scheme.n(), &scheme).map_err(|e| e.to_string())?;
        let map: serde_json::Map<String, Value> = slack
            .iter()
            .map(|(a, s)| (a.to_string(), Value::String(s.to_string())))
            .collect();
        let violation = first_violation(&slack).map(|(a, s)| format!("subset {a} has slack {s}"));
        Ok(json!({
            "n": scheme.n(),
            "valid": violation.is_none(),
            "violation": violation,
            "total": scheme.total().to_string(),
            "slack": map,
        })
        .to_string())
    }
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = exampleCurve)]
pub fn example_curve(steps: usize, providers: &str) -> Result<String, JsError> {
    js(api::example_curve(steps, providers))
}

#[wasm_bindgen(js_name = examplePoint)]
pub fn example_point(t: f64, providers: &str) -> Result<String, JsError> {
    js(api::example_at(t, providers))
}

#[wasm_bindgen]
pub fn concurrence(state_json: &str, partition: &str) -> Result<String, JsError> {
    js(api::concurrence(state_json, partition))
}

#[wasm_bindgen(js_name = verifyScheme)]
pub fn verify_scheme(scheme_json: &str) -> Result<String, JsError> {
    js(api::verify_scheme(scheme_json))
}
