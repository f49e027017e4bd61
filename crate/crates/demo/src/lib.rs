//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a flat `Float64Array`; the plain functions below the
//! bindings are what the page calls and what the tests exercise.

use assessnet::engine::{evaluate_stream, InferenceConfig};
use assessnet::operators::{cumulative_fuse, degree_of_conflict, trust_discount};
use assessnet::opinion::BinomialOpinion;
use assessnet::scenario;
use wasm_bindgen::prelude::*;

fn opinion(b: f64, d: f64, u: f64, a: f64) -> Result<BinomialOpinion, String> {
    BinomialOpinion::new(b, d, u, a).map_err(|e| e.to_string())
}

fn flat(o: &BinomialOpinion) -> [f64; 5] {
    [o.b(), o.d(), o.u(), o.a(), o.projected_probability()]
}

/// Discounted opinion `[b, d, u, a, P]` of a statement given referral trust.
pub fn discount_values(trust: [f64; 4], statement: [f64; 4]) -> Result<Vec<f64>, String> {
    let t = opinion(trust[0], trust[1], trust[2], trust[3])?;
    let s = opinion(statement[0], statement[1], statement[2], statement[3])?;
    Ok(flat(&trust_discount(&t, &s)).to_vec())
}

/// Fused opinion `[b, d, u, a, P]` followed by the degree of conflict of the
/// two inputs.
pub fn fuse_values(x: [f64; 4], y: [f64; 4]) -> Result<Vec<f64>, String> {
    let x = opinion(x[0], x[1], x[2], x[3])?;
    let y = opinion(y[0], y[1], y[2], y[3])?;
    let mut out = flat(&cumulative_fuse(&x, &y)).to_vec();
    out.push(degree_of_conflict(&x, &y));
    Ok(out)
}

/// Time series `[t, b, d, u, P]` per step of one node of the bundled example
/// scenario, optionally with the data-exchange node inserted.
pub fn scenario_values(node: &str, extended: bool) -> Result<Vec<f64>, String> {
    let graph = if extended {
        scenario::extended_graph()
    } else {
        scenario::example_graph()
    };
    if !graph.contains(node) {
        return Err(format!("unknown node `{node}`"));
    }
    let traces =
        evaluate_stream(&graph, &scenario::example_stream(), &InferenceConfig::default()).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(traces.len() * 5);
    for trace in &traces {
        let o = &trace.resolved[node];
        out.extend([trace.t, o.b(), o.d(), o.u(), o.projected_probability()]);
    }
    Ok(out)
}

/// Node names of the example graph, comma separated.
pub fn scenario_node_names(extended: bool) -> String {
    let graph = if extended {
        scenario::extended_graph()
    } else {
        scenario::example_graph()
    };
    graph
        .nodes()
        .iter()
        .map(|n| n.name.as_str())
        .collect::<Vec<_>>()
        .join(",")
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn discount(tb: f64, td: f64, tu: f64, ta: f64, b: f64, d: f64, u: f64, a: f64) -> Result<Vec<f64>, JsValue> {
    discount_values([tb, td, tu, ta], [b, d, u, a]).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn fuse(xb: f64, xd: f64, xu: f64, xa: f64, yb: f64, yd: f64, yu: f64, ya: f64) -> Result<Vec<f64>, JsValue> {
    fuse_values([xb, xd, xu, xa], [yb, yd, yu, ya]).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn scenario_series(node: &str, extended: bool) -> Result<Vec<f64>, JsValue> {
    scenario_values(node, extended).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn scenario_nodes(extended: bool) -> String {
    scenario_node_names(extended)
}
