use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ops::{hermitian_trace_norm, partial_transpose, realign, reduced_purity, regroup_density, trace_norm};
use crate::state::{CMatrix, DensityMatrix, SubsetMask, C64};

use super::BoundReport;

/// Trace-norm excesses `||X||_1 - 1` at or below this count as zero.
pub const NORM_EXCESS_TOL: f64 = 1e-10;

/// A way of lower-bounding the concurrence across one cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BipartiteMethod {
    /// Exact two-qubit concurrence; only for `2 x 2` cuts.
    WoottersExact,
    /// Trace norm of the partial transpose.
    Ppt,
    /// Trace norm of the realigned matrix.
    Ccnr,
    /// Exact value `sqrt(2 (1 - Tr rho_A^2))` for rank-one input.
    PureExact,
}

impl BipartiteMethod {
    pub fn name(self) -> &'static str {
        match self {
            BipartiteMethod::WoottersExact => "wootters",
            BipartiteMethod::Ppt => "ppt",
            BipartiteMethod::Ccnr => "ccnr",
            BipartiteMethod::PureExact => "pure",
        }
    }
}

impl fmt::Display for BipartiteMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BipartiteMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "wootters" | "wootters_exact" => Ok(BipartiteMethod::WoottersExact),
            "ppt" => Ok(BipartiteMethod::Ppt),
            "ccnr" => Ok(BipartiteMethod::Ccnr),
            "pure" | "pure_exact" => Ok(BipartiteMethod::PureExact),
            other => Err(Error::Domain(format!("unknown bipartite method {other:?}"))),
        }
    }
}

/// Set of bipartite methods; a cut's bound is the largest over the methods
/// that apply to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Providers {
    methods: Vec<BipartiteMethod>,
}

impl Providers {
    pub fn new(mut methods: Vec<BipartiteMethod>) -> Result<Self> {
        methods.sort();
        methods.dedup();
        if methods.is_empty() {
            return Err(Error::Domain("no bipartite methods given".into()));
        }
        Ok(Providers { methods })
    }

    pub fn single(method: BipartiteMethod) -> Self {
        Providers { methods: vec![method] }
    }

    /// PPT, CCNR and, where the cut is `2 x 2`, Wootters.
    pub fn best() -> Self {
        Providers::new(vec![
            BipartiteMethod::WoottersExact,
            BipartiteMethod::Ppt,
            BipartiteMethod::Ccnr,
        ])
        .expect("nonempty")
    }

    pub fn methods(&self) -> &[BipartiteMethod] {
        &self.methods
    }
}

impl FromStr for Providers {
    type Err = Error;

    /// `"ppt,ccnr"`, `"wootters"`, or `"best"`.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "best" {
            return Ok(Providers::best());
        }
        Providers::new(s.split(',').map(str::parse).collect::<Result<Vec<_>>>()?)
    }
}

impl fmt::Display for Providers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.methods.iter().map(|m| m.name()).collect();
        f.write_str(&names.join(","))
    }
}

fn sqrt_psd(m: &CMatrix) -> CMatrix {
    let eig = m.clone().symmetric_eigen();
    let roots = eig.eigenvalues.map(|e| C64::new(e.max(0.0).sqrt(), 0.0));
    &eig.eigenvectors * CMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

/// Exact two-qubit concurrence `max(0, l1 - l2 - l3 - l4)` where the `l_i`
/// are the decreasing square roots of the eigenvalues of
/// `rho (sy x sy) rho* (sy x sy)`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.shape().dims() != [2, 2] {
        return Err(Error::Method {
            method: "wootters".into(),
            reason: format!("needs a 2x2 state, got {}", rho.shape()),
        });
    }
    let tr = rho.trace();
    if (tr - 1.0).abs() > crate::state::TRACE_TOL {
        return Err(Error::Trace(tr, "Wootters concurrence needs a normalized state"));
    }
    let s = sqrt_psd(rho.matrix());
    // sy x sy is real, symmetric and unitary
    let mut flip = CMatrix::zeros(4, 4);
    for (r, c, v) in [(0, 3, -1.0), (1, 2, 1.0), (2, 1, 1.0), (3, 0, -1.0)] {
        flip[(r, c)] = C64::new(v, 0.0);
    }
    // l_i are the singular values of sqrt(rho) sqrt(rho~) = sqrt(rho) Y conj(sqrt(rho)) Y
    let m = &s * &flip * s.map(|z| z.conj());
    let mut l: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Lower bound on the concurrence across `side | complement` from one
/// method. The input may be subnormalized: the bound is evaluated on the
/// renormalized state and scaled by the trace.
pub fn single_method_bound(rho: &DensityMatrix, side: SubsetMask, method: BipartiteMethod) -> Result<f64> {
    let shape = rho.shape();
    shape.check_mask(side)?;
    let tr = rho.trace();
    if tr <= 0.0 {
        return Ok(0.0);
    }
    let unit = rho.renormalized()?;
    let da = shape.dim_of(side.bits());
    let db = shape.total_dim() / da;
    let m = da.min(db) as f64;
    let norm_bound = |norm: f64| {
        let excess = norm - 1.0;
        if m < 2.0 || excess <= NORM_EXCESS_TOL {
            0.0
        } else {
            (2.0 / (m * (m - 1.0))).sqrt() * excess
        }
    };
    let value = match method {
        BipartiteMethod::Ppt => norm_bound(hermitian_trace_norm(&partial_transpose(&unit, side)?)),
        BipartiteMethod::Ccnr => norm_bound(trace_norm(&realign(&unit, side)?)),
        BipartiteMethod::WoottersExact => {
            if da != 2 || db != 2 {
                return Err(Error::Method {
                    method: method.to_string(),
                    reason: format!("cut is {da}x{db}, not 2x2"),
                });
            }
            let two = regroup_density(&unit, &[side.bits(), side.complement().bits()])?;
            wootters_concurrence(&two)?
        }
        BipartiteMethod::PureExact => {
            let psi = unit.as_pure().ok_or_else(|| Error::Method {
                method: method.to_string(),
                reason: "state is not rank one".into(),
            })?;
            (2.0 * (1.0 - reduced_purity(&psi, side.bits()))).max(0.0).sqrt()
        }
    };
    Ok(value * tr)
}

/// Squared best bound across a cut and the squared value of each method
/// that applied.
pub fn bipartite_squared(
    rho: &DensityMatrix,
    side: SubsetMask,
    providers: &Providers,
) -> Result<(f64, BTreeMap<String, f64>)> {
    let mut per_method = BTreeMap::new();
    let mut last_err = None;
    for &m in providers.methods() {
        match single_method_bound(rho, side, m) {
            Ok(v) => {
                per_method.insert(m.to_string(), v * v);
            }
            Err(e @ Error::Method { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    if per_method.is_empty() {
        return Err(last_err.unwrap_or_else(|| Error::Domain("no applicable method".into())));
    }
    let best = per_method.values().copied().fold(0.0, f64::max);
    Ok((best, per_method))
}

pub fn bipartite_lower_bound(rho: &DensityMatrix, side: SubsetMask, providers: &Providers) -> Result<BoundReport> {
    let (sq, per_method) = bipartite_squared(rho, side, providers)?;
    Ok(BoundReport::new(format!("bipartite[{providers}]"), sq, per_method))
}
