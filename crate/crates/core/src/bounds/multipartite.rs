use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ops::regroup_density;
use crate::partitions::{four_party_pair_cuts, four_party_tripartitions, Partition};
use crate::pure::LevelPair;
use crate::state::{CMatrix, DensityMatrix, SubsetMask, SystemShape};
use crate::weights::{first_violation, to_f64, verify_weights, WeightScheme};

use super::bipartite::{bipartite_squared, Providers};
use super::BoundReport;

/// Substates with trace below this contribute nothing.
const EMPTY_TRACE: f64 = 1e-14;

/// How the tripartite terms `C^2_{i|j|kl}` are lower-bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripartiteMethod {
    /// Half the sum of the three squared coarse-cut bounds.
    Relation,
    /// The `2 x 2 x 4` level-pair substate bound.
    Theorem2,
    /// The larger of the two where both apply.
    Best,
}

impl FromStr for TripartiteMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relation" => Ok(TripartiteMethod::Relation),
            "theorem2" => Ok(TripartiteMethod::Theorem2),
            "best" => Ok(TripartiteMethod::Best),
            _ => Err(Error::Domain(format!("unknown tripartite method {s:?}"))),
        }
    }
}

impl fmt::Display for TripartiteMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TripartiteMethod::Relation => "relation",
            TripartiteMethod::Theorem2 => "theorem2",
            TripartiteMethod::Best => "best",
        })
    }
}

fn check_parties(rho: &DensityMatrix, n: usize, what: &str) -> Result<()> {
    if rho.shape().len() != n {
        return Err(Error::Shape(format!(
            "{what} needs {n} subsystems, state has shape {}",
            rho.shape()
        )));
    }
    Ok(())
}

fn check_partition(rho: &DensityMatrix, p: &Partition) -> Result<()> {
    if p.n() != rho.shape().len() {
        return Err(Error::Shape(format!(
            "partition {p} is over {} subsystems, state has {}",
            p.n(),
            rho.shape().len()
        )));
    }
    Ok(())
}

/// Squared lower bound on `C_P(rho)` for an `M`-block partition:
/// `2^{2-M} sum_cuts (bipartite bound)^2` over the `2^{M-1} - 1` coarse
/// bipartitions. For pure states with exact cut values this is an equality.
pub fn partition_squared_bound(
    rho: &DensityMatrix,
    p: &Partition,
    providers: &Providers,
) -> Result<(f64, BTreeMap<String, f64>)> {
    check_partition(rho, p)?;
    let mut terms = BTreeMap::new();
    let mut sum = 0.0;
    for cut in p.cuts() {
        let (sq, _) = bipartite_squared(rho, cut, providers)?;
        sum += sq;
        terms.insert(Partition::cut(cut).to_string(), sq);
    }
    Ok((sum * 2f64.powi(2 - p.len() as i32), terms))
}

fn is_one_one_two(p: &Partition) -> bool {
    p.n() == 4 && p.profile() == [2, 1, 1]
}

/// `C^2_{i|j|kl} >= 1/2 (C^2_{i|jkl} + C^2_{ij|kl} + C^2_{ikl|j})`.
pub fn tripartition_bound_relation(rho: &DensityMatrix, p: &Partition, providers: &Providers) -> Result<BoundReport> {
    check_parties(rho, 4, "tripartition relation")?;
    if !is_one_one_two(p) {
        return Err(Error::Partition(format!("{p} is not of the form i|j|kl")));
    }
    let (sq, terms) = partition_squared_bound(rho, p, providers)?;
    Ok(BoundReport::new(format!("relation {p}"), sq, terms))
}

/// Blocks of an `i|j|kl` tripartition ordered singleton, singleton, pair.
fn single_single_pair(p: &Partition) -> [u32; 3] {
    let mut singles = p.blocks().iter().copied().filter(|b| b.count_ones() == 1);
    let pair = p
        .blocks()
        .iter()
        .copied()
        .find(|b| b.count_ones() == 2)
        .expect("i|j|kl");
    [
        singles.next().expect("two singletons"),
        singles.next().expect("two singletons"),
        pair,
    ]
}

/// The state viewed as the tripartite `i | j | kl` system.
fn coarse_224(rho: &DensityMatrix, p: &Partition) -> Result<DensityMatrix> {
    let coarse = regroup_density(rho, &single_single_pair(p))?;
    if coarse.shape().dims() != [2, 2, 4] {
        return Err(Error::Method {
            method: "theorem2".into(),
            reason: format!("{p} groups into {}, not 2x2x4", coarse.shape()),
        });
    }
    Ok(coarse)
}

fn tripartite_squared(
    rho: &DensityMatrix,
    p: &Partition,
    method: TripartiteMethod,
    providers: &Providers,
) -> Result<f64> {
    let relation = || tripartition_bound_relation(rho, p, providers).map(|r| r.squared);
    let substates = || theorem2_bound(&coarse_224(rho, p)?, providers).map(|r| r.squared);
    match method {
        TripartiteMethod::Relation => relation(),
        TripartiteMethod::Theorem2 => substates(),
        TripartiteMethod::Best => {
            let r = relation()?;
            match substates() {
                Ok(s) => Ok(r.max(s)),
                Err(Error::Method { .. }) => Ok(r),
                Err(e) => Err(e),
            }
        }
    }
}

/// `C_4^2 >= 1/12 (2 sum_{i|j|kl} C^2_{i|j|kl} + sum_{ij|kl} C^2_{ij|kl})`
/// with each term replaced by a lower bound.
pub fn theorem1_bound(rho: &DensityMatrix, tri_method: TripartiteMethod, providers: &Providers) -> Result<BoundReport> {
    check_parties(rho, 4, "theorem1 bound")?;
    let mut contributions = BTreeMap::new();
    let mut tri = 0.0;
    for p in four_party_tripartitions() {
        let sq = tripartite_squared(rho, &p, tri_method, providers)?;
        tri += sq;
        contributions.insert(p.to_string(), sq);
    }
    let mut bi = 0.0;
    for p in four_party_pair_cuts() {
        let (sq, _) = bipartite_squared(rho, side_of(&p), providers)?;
        bi += sq;
        contributions.insert(p.to_string(), sq);
    }
    Ok(BoundReport::new(
        format!("theorem1[{tri_method}; {providers}]"),
        (2.0 * tri + bi) / 12.0,
        contributions,
    ))
}

fn side_of(p: &Partition) -> SubsetMask {
    SubsetMask::new(p.blocks()[0], p.n()).expect("two-block partition")
}

/// The principal `8 x 8` submatrix on basis states `|i j k>` with
/// `k in {k1, k2}`, ordered `00k1, 00k2, 01k1, ..., 11k2`. Not renormalized.
pub fn substate_mixed(rho: &DensityMatrix, levels: LevelPair) -> Result<DensityMatrix> {
    if rho.shape().dims() != [2, 2, 4] {
        return Err(Error::Shape(format!("expected shape 2x2x4, got {}", rho.shape())));
    }
    let idx: Vec<usize> = (0..8).map(|r| (r / 2) * 4 + levels.levels()[r % 2]).collect();
    let m = rho.matrix();
    let sub = CMatrix::from_fn(8, 8, |r, c| m[(idx[r], idx[c])]);
    Ok(DensityMatrix::from_parts(SystemShape::new(vec![2, 2, 2])?, sub))
}

/// `C_3^2(rho) >= 1/3 sum_{k1<k2} C_3^2(rho_{k1 k2})` over the six level-pair
/// substates. Each substate of trace `tau` is bounded by applying the
/// three-cut relation to the renormalized substate and scaling the squared
/// result by `tau^2`.
pub fn theorem2_bound(rho: &DensityMatrix, providers: &Providers) -> Result<BoundReport> {
    if rho.shape().dims() != [2, 2, 4] {
        return Err(Error::Shape(format!(
            "theorem2 bound needs shape 2x2x4, got {}",
            rho.shape()
        )));
    }
    let singles: Partition = "1|2|3".parse().expect("valid");
    let mut contributions = BTreeMap::new();
    let mut sum = 0.0;
    for levels in LevelPair::all() {
        let sub = substate_mixed(rho, levels)?;
        let tau = sub.trace();
        let sq = if tau <= EMPTY_TRACE {
            0.0
        } else {
            let (sq, _) = partition_squared_bound(&sub.renormalized()?, &singles, providers)?;
            sq * tau * tau
        };
        sum += sq;
        contributions.insert(levels.to_string(), sq);
    }
    Ok(BoundReport::new(
        format!("theorem2[{providers}]"),
        sum / 3.0,
        contributions,
    ))
}

/// Four-qubit bound with every `i|j|kl` term replaced by `2/3` of its
/// substate sum:
/// `C_4^2 >= 1/12 (sum 2/3 C_3^2(rho_{2x2x2}) + sum_{ij|kl} C^2_{ij|kl})`.
pub fn corollary1_bound(rho: &DensityMatrix, providers: &Providers) -> Result<BoundReport> {
    if rho.shape().dims() != [2, 2, 2, 2] {
        return Err(Error::Shape(format!(
            "corollary1 bound needs four qubits, got {}",
            rho.shape()
        )));
    }
    let mut contributions = BTreeMap::new();
    let mut tri = 0.0;
    for p in four_party_tripartitions() {
        let report = theorem2_bound(&coarse_224(rho, &p)?, providers)?;
        // 2/3 sum_sub = 2 * (1/3 sum_sub)
        tri += 2.0 * report.squared;
        contributions.insert(p.to_string(), report.squared);
    }
    let mut bi = 0.0;
    for p in four_party_pair_cuts() {
        let (sq, _) = bipartite_squared(rho, side_of(&p), providers)?;
        bi += sq;
        contributions.insert(p.to_string(), sq);
    }
    Ok(BoundReport::new(
        format!("corollary1[{providers}]"),
        (tri + bi) / 12.0,
        contributions,
    ))
}

/// `1/4` of the sum of the seven squared bipartite bounds of a four-party
/// state.
pub fn delta_bound(rho: &DensityMatrix, providers: &Providers) -> Result<BoundReport> {
    check_parties(rho, 4, "delta bound")?;
    let mut contributions = BTreeMap::new();
    let mut sum = 0.0;
    let cuts = crate::partitions::enumerate_partitions(4, 2)?;
    for p in cuts {
        let (sq, _) = bipartite_squared(rho, side_of(&p), providers)?;
        sum += sq;
        contributions.insert(p.to_string(), sq);
    }
    Ok(BoundReport::new(
        format!("delta[{providers}]"),
        sum / 4.0,
        contributions,
    ))
}

/// `C_N^2 >= sum_P w_P C_P^2` for a scheme passing the coverage condition,
/// with each `C_P^2` bounded through its coarse cuts.
pub fn scheme_bound(rho: &DensityMatrix, scheme: &WeightScheme, providers: &Providers) -> Result<BoundReport> {
    let n = rho.shape().len();
    let slack = verify_weights(n, scheme)?;
    if let Some((subset, s)) = first_violation(&slack) {
        return Err(Error::InvalidScheme {
            subset: subset.to_string(),
            slack: s.to_string(),
        });
    }
    let mut contributions = BTreeMap::new();
    let mut total = 0.0;
    for (p, w) in scheme.weights() {
        let (sq, _) = partition_squared_bound(rho, p, providers)?;
        total += to_f64(w) * sq;
        contributions.insert(p.to_string(), sq);
    }
    Ok(BoundReport::new(format!("scheme[{providers}]"), total, contributions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::BipartiteMethod;
    use crate::pure::{concurrence_partition, substate_pure};
    use crate::random::{random_mixed, random_pure};
    use crate::state::{CVector, PureState, C64};
    use crate::weights::ratio;

    fn bell_pairs() -> PureState {
        let mut v = CVector::zeros(16);
        for i in [0b0000, 0b0011, 0b1100, 0b1111] {
            v[i] = C64::new(0.5, 0.0);
        }
        PureState::new(SystemShape::qubits(4), v).unwrap()
    }

    fn ppt() -> Providers {
        Providers::single(BipartiteMethod::Ppt)
    }

    fn pure() -> Providers {
        Providers::single(BipartiteMethod::PureExact)
    }

    #[test]
    fn relation_on_bell_pairs() {
        let rho = bell_pairs().density();
        let r = tripartition_bound_relation(&rho, &"1|2|34".parse().unwrap(), &ppt()).unwrap();
        assert!((r.squared - 1.0).abs() < 1e-10, "{r:?}");
        assert!((r.contributions["1|234"] - 1.0).abs() < 1e-10);
        assert!(r.contributions["12|34"].abs() < 1e-12);
        assert!(tripartition_bound_relation(&rho, &"12|34".parse().unwrap(), &ppt()).is_err());
        assert!(tripartition_bound_relation(&rho, &"1|2|3|4".parse().unwrap(), &ppt()).is_err());
    }

    #[test]
    fn relation_on_product_and_ghz() {
        let prod = PureState::basis(SystemShape::qubits(4), &[0, 1, 0, 1])
            .unwrap()
            .density();
        let r = tripartition_bound_relation(&prod, &"1|2|34".parse().unwrap(), &Providers::best()).unwrap();
        assert_eq!(r.squared, 0.0);

        let mut v = CVector::zeros(16);
        v[0] = C64::new(0.5f64.sqrt(), 0.0);
        v[15] = C64::new(0.5f64.sqrt(), 0.0);
        let ghz = PureState::new(SystemShape::qubits(4), v).unwrap().density();
        let r = tripartition_bound_relation(&ghz, &"1|2|34".parse().unwrap(), &ppt()).unwrap();
        assert!(r.squared > 0.0);
    }

    #[test]
    fn theorem1_on_maximally_mixed_is_zero() {
        let rho = DensityMatrix::maximally_mixed(SystemShape::qubits(4));
        for m in [
            TripartiteMethod::Relation,
            TripartiteMethod::Theorem2,
            TripartiteMethod::Best,
        ] {
            assert_eq!(theorem1_bound(&rho, m, &Providers::best()).unwrap().squared, 0.0);
        }
        assert_eq!(corollary1_bound(&rho, &Providers::best()).unwrap().squared, 0.0);
        assert_eq!(delta_bound(&rho, &Providers::best()).unwrap().squared, 0.0);
    }

    #[test]
    fn theorem1_exact_on_bell_pairs() {
        let rho = bell_pairs().density();
        let r = theorem1_bound(&rho, TripartiteMethod::Relation, &pure()).unwrap();
        assert!((r.squared - 1.75).abs() < 1e-10);
        // terms agree with the pure-state partition concurrences
        let psi = bell_pairs();
        for (name, sq) in &r.contributions {
            let exact = concurrence_partition(&psi, &Partition::parse_with(name, 4).unwrap()).unwrap();
            assert!((sq - exact.squared).abs() < 1e-10, "{name}");
        }
        assert!(theorem1_bound(
            &DensityMatrix::maximally_mixed(SystemShape::qubits(3)),
            TripartiteMethod::Relation,
            &ppt()
        )
        .is_err());
    }

    #[test]
    fn delta_on_bell_pairs() {
        // with exact cut values the seven-cut average equals C_4^2 = 7/4
        let r = delta_bound(&bell_pairs().density(), &pure()).unwrap();
        assert!((r.squared - 1.75).abs() < 1e-10);
        assert!((r.contributions["1|234"] - 1.0).abs() < 1e-10);
        assert!(r.contributions["12|34"].abs() < 1e-10);
        assert_eq!(r.contributions.len(), 7);
    }

    #[test]
    fn substate_mixed_examples() {
        let shape = SystemShape::new(vec![2, 2, 4]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(shape.clone());
        let mut total = 0.0;
        for sel in LevelPair::all() {
            let s = substate_mixed(&mixed, sel).unwrap();
            assert!((s.trace() - 0.5).abs() < 1e-15);
            let expected = CMatrix::identity(8, 8).unscale(16.0);
            assert!((s.matrix() - expected).norm() < 1e-15);
            total += s.trace();
        }
        assert!((total - 3.0).abs() < 1e-14);

        let psi = random_pure(&shape, 9);
        let rho = random_mixed(&shape, 3, 2);
        let mut total = 0.0;
        for sel in LevelPair::all() {
            let a = substate_mixed(&psi.density(), sel).unwrap();
            let b = substate_pure(&psi, sel).unwrap().density();
            assert!((a.matrix() - b.matrix()).norm() < 1e-15);
            total += substate_mixed(&rho, sel).unwrap().trace();
        }
        assert!((total - 3.0 * rho.trace()).abs() < 1e-13);
    }

    #[test]
    fn theorem2_examples() {
        let shape = SystemShape::new(vec![2, 2, 4]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(shape.clone());
        assert_eq!(theorem2_bound(&mixed, &Providers::best()).unwrap().squared, 0.0);

        // GHZ on levels {0, 1}: only substates with both levels contribute
        let mut v = CVector::zeros(16);
        v[0] = C64::new(0.5f64.sqrt(), 0.0);
        v[2 * 4 + 4 + 1] = C64::new(0.5f64.sqrt(), 0.0);
        let ghz = PureState::new(shape.clone(), v).unwrap().density();
        let r = theorem2_bound(&ghz, &ppt()).unwrap();
        assert!(r.squared > 0.0 && r.squared <= 1.5 + 1e-12);
        for (k, sq) in &r.contributions {
            if k != "{0,1}" {
                assert_eq!(*sq, 0.0, "{k}");
            }
        }
        assert!(theorem2_bound(&DensityMatrix::maximally_mixed(SystemShape::qubits(3)), &ppt()).is_err());
    }

    #[test]
    fn theorem2_separable_product_is_zero() {
        let a = random_mixed(&SystemShape::qubits(1), 2, 1);
        let b = random_mixed(&SystemShape::qubits(1), 2, 2);
        let c = random_mixed(&SystemShape::new(vec![4]).unwrap(), 4, 3);
        let rho = DensityMatrix::product(&[&a, &b, &c]).unwrap();
        assert_eq!(theorem2_bound(&rho, &Providers::best()).unwrap().squared, 0.0);
    }

    #[test]
    fn scheme_matches_theorem1() {
        let rho = random_mixed(&SystemShape::qubits(4), 2, 5);
        let scheme = WeightScheme::four_party_default();
        let a = scheme_bound(&rho, &scheme, &Providers::best()).unwrap();
        let b = theorem1_bound(&rho, TripartiteMethod::Relation, &Providers::best()).unwrap();
        assert!((a.squared - b.squared).abs() < 1e-14);
    }

    #[test]
    fn scheme_single_cuts() {
        let rho = bell_pairs().density();
        let mut s = WeightScheme::new(4);
        s.insert("12|34".parse().unwrap(), ratio(1, 4)).unwrap();
        assert_eq!(scheme_bound(&rho, &s, &ppt()).unwrap().squared, 0.0);

        let mut s = WeightScheme::new(4);
        s.insert("13|24".parse().unwrap(), ratio(1, 4)).unwrap();
        let r = scheme_bound(&rho, &s, &ppt()).unwrap();
        // 4x4 maximally entangled across 13|24: ||rho^T||_1 = 4, bound sqrt(1/6) * 3
        assert!((r.squared - 0.25 * 9.0 / 6.0).abs() < 1e-10, "{r:?}");

        let mut bad = WeightScheme::new(4);
        bad.insert("1|2|34".parse().unwrap(), ratio(1, 1)).unwrap();
        match scheme_bound(&rho, &bad, &ppt()) {
            Err(Error::InvalidScheme { subset, slack }) => {
                assert_eq!(slack, "-1/4");
                assert!(["1", "2", "34", "134", "234", "12"].contains(&subset.as_str()));
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }
}
