//! Weighted partition schemes and the coverage condition.
//!
//! For a pure state, `C_N^2 = 2^{2-N} sum_alpha (1 - Tr rho_alpha^2)` and
//! `C_P^2 = 2^{2-M} sum_{beta in R(P)} (1 - Tr rho_beta^2)` where `R(P)` is
//! the set of block unions of `P`. A weighted sum `sum_P w_P C_P^2` is
//! therefore dominated by `C_N^2` term by term exactly when, for every
//! subset `alpha`,
//!
//! ```text
//! slack(alpha) = 2^{2-N} - sum_P w_P 2^{2-M_P} [alpha in R(P)] >= 0.
//! ```
//!
//! Such a scheme lifts to mixed states through the convex roof and
//! Cauchy-Schwarz, giving `C_N^2(rho) >= sum_P w_P C_P^2(rho)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{four_party_pair_cuts, four_party_tripartitions, Partition};
use crate::state::SubsetMask;

/// `2^e` for possibly negative `e`, exactly.
pub fn pow2(e: i32) -> BigRational {
    let two = BigInt::from(2);
    if e >= 0 {
        BigRational::from_integer(two.pow(e as u32))
    } else {
        BigRational::new(BigInt::one(), two.pow((-e) as u32))
    }
}

/// Nonnegative exact weights on partitions of a common `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightScheme {
    n: usize,
    weights: BTreeMap<Partition, BigRational>,
}

impl WeightScheme {
    pub fn new(n: usize) -> Self {
        WeightScheme {
            n,
            weights: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, p: Partition, w: BigRational) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::Domain(format!(
                "partition {p} is over {} subsystems, scheme over {}",
                p.n(),
                self.n
            )));
        }
        if w.is_negative() {
            return Err(Error::Domain(format!("weight {w} on {p} is negative")));
        }
        self.weights.insert(p, w);
        Ok(())
    }

    pub fn weights(&self) -> &BTreeMap<Partition, BigRational> {
        &self.weights
    }

    pub fn get(&self, p: &Partition) -> Option<&BigRational> {
        self.weights.get(p)
    }

    pub fn total(&self) -> BigRational {
        self.weights.values().fold(BigRational::zero(), |a, w| a + w)
    }

    /// Weights `1/6` on the six `i|j|kl` tripartitions and `1/12` on the
    /// three `ij|kl` bipartitions of four subsystems.
    pub fn four_party_default() -> Self {
        let mut s = WeightScheme::new(4);
        for p in four_party_tripartitions() {
            s.insert(p, ratio(1, 6)).expect("n = 4");
        }
        for p in four_party_pair_cuts() {
            s.insert(p, ratio(1, 12)).expect("n = 4");
        }
        s
    }

    pub fn to_json(&self) -> String {
        let file = SchemeFile {
            n: self.n,
            weights: self
                .weights
                .iter()
                .map(|(p, w)| (p.to_string(), WeightValue::Text(w.to_string())))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("scheme serializes")
    }

    /// Reads `{"n": 4, "weights": {"1|2|34": "1/6", "12|34": 0.25}}`.
    /// String weights are exact rationals; numeric weights are converted from
    /// their binary value exactly.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SchemeFile = serde_json::from_str(text)?;
        let mut s = WeightScheme::new(file.n);
        for (key, value) in file.weights {
            let p = Partition::parse_with(&key, file.n)?;
            let w = match value {
                WeightValue::Number(x) => BigRational::from_float(x)
                    .ok_or_else(|| Error::Format(format!("weight for {key} is not finite")))?,
                WeightValue::Text(t) => parse_rational(&t)
                    .ok_or_else(|| Error::Format(format!("weight {t:?} for {key} is not a rational")))?,
            };
            s.insert(p, w)?;
        }
        Ok(s)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    n: usize,
    weights: BTreeMap<String, WeightValue>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WeightValue {
    Number(f64),
    Text(String),
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        (!b.is_zero()).then(|| BigRational::new(a, b))
    } else if let Ok(i) = t.parse::<BigInt>() {
        Some(BigRational::from_integer(i))
    } else {
        BigRational::from_float(t.parse::<f64>().ok()?)
    }
}

/// Coverage coefficient `2^{2-M}` of a partition on each realized subset.
fn coverage(p: &Partition) -> BigRational {
    pow2(2 - p.len() as i32)
}

/// Slack of the coverage condition for every nonempty proper subset of
/// `{1..n}`. The scheme is a valid lower bound iff every slack is `>= 0`;
/// all slacks zero means equality on pure states.
pub fn verify_weights(n: usize, scheme: &WeightScheme) -> Result<BTreeMap<SubsetMask, BigRational>> {
    if scheme.n() != n {
        return Err(Error::Domain(format!(
            "scheme is over {} subsystems, expected {n}",
            scheme.n()
        )));
    }
    let budget = pow2(2 - n as i32);
    let mut slack: BTreeMap<SubsetMask, BigRational> = SubsetMask::all(n).map(|a| (a, budget.clone())).collect();
    for (p, w) in scheme.weights() {
        if p.n() != n {
            return Err(Error::Domain(format!("partition {p} is not over {n} subsystems")));
        }
        let c = coverage(p) * w;
        for a in p.realized_subsets() {
            *slack.get_mut(&a).expect("all subsets present") -= &c;
        }
    }
    Ok(slack)
}

/// The most violated subset, if any slack is negative.
pub fn first_violation(slack: &BTreeMap<SubsetMask, BigRational>) -> Option<(SubsetMask, BigRational)> {
    slack
        .iter()
        .filter(|(_, s)| s.is_negative())
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(a, s)| (*a, s.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// One weight per block-size profile, maximizing the total weight.
    MaxUniform,
    /// Independent weights per partition, maximizing the total weight.
    MaxTotal,
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max_uniform" | "max-uniform" => Ok(Objective::MaxUniform),
            "max_total" | "max-total" => Ok(Objective::MaxTotal),
            _ => Err(Error::Domain(format!("unknown objective {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Composition {
    pub scheme: WeightScheme,
    /// Whether some profile-uniform scheme reaches the same total as the
    /// unrestricted optimum.
    pub uniform_optimal: bool,
}

/// Largest valid weights for `family` under `objective`, computed with an
/// exact rational simplex. Partitions that realize no subset get weight zero.
pub fn compose_weights(n: usize, family: &[Partition], objective: Objective) -> Result<Composition> {
    if family.is_empty() {
        return Err(Error::Domain("empty partition family".into()));
    }
    if let Some(p) = family.iter().find(|p| p.n() != n) {
        return Err(Error::Domain(format!("partition {p} is not over {n} subsystems")));
    }
    let mut family = family.to_vec();
    family.sort();
    family.dedup();

    let uniform = solve_grouped(n, &family, true);
    let total = solve_grouped(n, &family, false);
    let uniform_optimal = uniform.total() == total.total();
    let scheme = match objective {
        Objective::MaxUniform => uniform,
        Objective::MaxTotal => total,
    };
    Ok(Composition {
        scheme,
        uniform_optimal,
    })
}

fn solve_grouped(n: usize, family: &[Partition], by_profile: bool) -> WeightScheme {
    // group partitions into LP variables
    let mut groups: Vec<Vec<&Partition>> = Vec::new();
    if by_profile {
        let mut by: BTreeMap<Vec<usize>, Vec<&Partition>> = BTreeMap::new();
        for p in family {
            by.entry(p.profile()).or_default().push(p);
        }
        groups.extend(by.into_values());
    } else {
        groups.extend(family.iter().map(|p| vec![p]));
    }

    let subsets: Vec<SubsetMask> = SubsetMask::all(n).collect();
    let index: BTreeMap<SubsetMask, usize> = subsets.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let mut columns: Vec<Vec<BigRational>> = Vec::new();
    let mut costs = Vec::new();
    for g in &groups {
        let mut col = vec![BigRational::zero(); subsets.len()];
        for p in g {
            let c = coverage(p);
            for a in p.realized_subsets() {
                col[index[&a]] += &c;
            }
        }
        columns.push(col);
        costs.push(BigRational::from_integer(BigInt::from(g.len())));
    }
    let rhs = vec![pow2(2 - n as i32); subsets.len()];
    let x = maximize_packing(&columns, &costs, &rhs);

    let mut scheme = WeightScheme::new(n);
    for (g, w) in groups.iter().zip(x) {
        for p in g {
            scheme.insert((*p).clone(), w.clone()).expect("same n, nonnegative");
        }
    }
    scheme
}

/// Maximizes `costs . x` subject to `A x <= rhs`, `x >= 0`, where `A` is
/// given column-wise with nonnegative entries and `rhs > 0`. Variables whose
/// column is all zero are unbounded and are fixed at zero. Dense tableau
/// simplex with Bland's rule, so it terminates.
fn maximize_packing(columns: &[Vec<BigRational>], costs: &[BigRational], rhs: &[BigRational]) -> Vec<BigRational> {
    let rows = rhs.len();
    let active: Vec<usize> = (0..columns.len())
        .filter(|&j| columns[j].iter().any(|a| a.is_positive()))
        .collect();
    let nv = active.len();
    let width = nv + rows + 1;
    let zero = BigRational::zero();

    // tableau rows 0..rows are constraints, row `rows` is the objective
    let mut t = vec![vec![zero.clone(); width]; rows + 1];
    for (i, row) in t.iter_mut().take(rows).enumerate() {
        for (k, &j) in active.iter().enumerate() {
            row[k] = columns[j][i].clone();
        }
        row[nv + i] = BigRational::one();
        row[width - 1] = rhs[i].clone();
    }
    for (k, &j) in active.iter().enumerate() {
        t[rows][k] = -costs[j].clone();
    }
    let mut basis: Vec<usize> = (nv..nv + rows).collect();

    while let Some(enter) = (0..width - 1).find(|&j| t[rows][j].is_negative()) {
        let mut leave: Option<usize> = None;
        for i in 0..rows {
            if !t[i][enter].is_positive() {
                continue;
            }
            let r = &t[i][width - 1] / &t[i][enter];
            leave = match leave {
                None => Some(i),
                Some(l) => {
                    let rl = &t[l][width - 1] / &t[l][enter];
                    if r < rl || (r == rl && basis[i] < basis[l]) {
                        Some(i)
                    } else {
                        Some(l)
                    }
                }
            };
        }
        // every active column has a positive entry, so the ratio test succeeds
        let l = leave.expect("bounded packing problem");
        let piv = t[l][enter].clone();
        for v in t[l].iter_mut() {
            *v /= &piv;
        }
        let pivot_row = t[l].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == l || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * p;
            }
        }
        basis[l] = enter;
    }

    let mut x = vec![zero; columns.len()];
    for (i, &b) in basis.iter().enumerate() {
        if b < nv {
            x[active[b]] = t[i][width - 1].clone();
        }
    }
    x
}

/// Exact rational as `f64`.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
