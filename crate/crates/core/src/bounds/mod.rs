//! Lower bounds on the concurrence of mixed states.

mod bipartite;
mod multipartite;

use std::collections::BTreeMap;

use serde::Serialize;

pub use bipartite::{
    bipartite_lower_bound, bipartite_squared, single_method_bound, wootters_concurrence, BipartiteMethod, Providers,
    NORM_EXCESS_TOL,
};
pub use multipartite::{
    corollary1_bound, delta_bound, partition_squared_bound, scheme_bound, substate_mixed, theorem1_bound,
    theorem2_bound, tripartition_bound_relation, TripartiteMethod,
};

/// A certified lower bound together with the squared terms it was built
/// from, keyed by partition or level pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub method: String,
    pub value: f64,
    pub squared: f64,
    pub contributions: BTreeMap<String, f64>,
}

impl BoundReport {
    pub(crate) fn new(method: impl Into<String>, squared: f64, contributions: BTreeMap<String, f64>) -> Self {
        let squared = squared.max(0.0);
        BoundReport {
            method: method.into(),
            value: squared.sqrt(),
            squared,
            contributions: contributions.into_iter().map(|(k, v)| (k, v.max(0.0))).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
