//! Seeded invariant suites, runnable outside the test harness (the CLI's
//! `selftest` uses them).

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::bounds::{
    corollary1_bound, delta_bound, scheme_bound, single_method_bound, theorem1_bound, wootters_concurrence,
    BipartiteMethod, Providers, TripartiteMethod,
};
use crate::ops::{hermitian_trace_norm, partial_trace, partial_transpose, purity, reduced_purity, trace_norm};
use crate::partitions::{enumerate_partitions, four_party_pair_cuts, four_party_tripartitions};
use crate::pure::{amplitude_form, concurrence_full, concurrence_partition, substate_pure, LevelPair};
use crate::random::{
    local_unitary_with, random_mixed_with, random_pure_with, random_separable_with, random_unitary, rng,
};
use crate::state::{hermitian_deviation, DensityMatrix, SubsetMask, SystemShape};
use crate::weights::{compose_weights, to_f64, verify_weights, Objective, WeightScheme};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Largest violation seen, in the suite's own units.
    pub worst: f64,
    pub tolerance: f64,
    pub millis: u128,
}

type Suite = fn(u64, usize) -> (usize, f64);

/// Each suite returns `(cases, worst violation)`; it passes when the
/// violation is at most the tolerance.
const SUITES: &[(&str, Suite, f64)] = &[
    ("complement purity symmetry", complement_symmetry, 1e-12),
    (
        "partial trace keeps trace and hermiticity",
        partial_trace_invariants,
        1e-12,
    ),
    ("purity within [1/D, 1]", purity_range, 1e-12),
    ("partial transpose involution", transpose_involution, 0.0),
    ("trace norm unitary invariance", trace_norm_invariance, 1e-10),
    ("partition counts", partition_counts, 0.0),
    ("pure four-qubit identity", four_qubit_identity, 1e-9),
    ("pure 2x2x4 substate inequality", substate_inequality, 1e-9),
    ("amplitude form equals purity form", amplitude_equivalence, 1e-9),
    ("local unitary invariance", local_unitary_invariance, 1e-10),
    ("default scheme coverage", default_scheme_coverage, 0.0),
    ("composed schemes bound pure states", composed_schemes, 1e-9),
    ("bounds never exceed pure values", pure_soundness, 1e-9),
    (
        "bipartite bounds below two-qubit concurrence",
        two_qubit_soundness,
        1e-9,
    ),
    ("separable mixtures give zero", separable_zero, 0.0),
    ("theorem1 relation at least delta", hierarchy, 1e-12),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

/// Runs every suite with `cases` random instances each.
pub fn run_all(seed: u64, cases: usize) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .enumerate()
        .map(|(i, &(name, suite, tolerance))| {
            let start = Instant::now();
            let (cases, worst) = suite(seed.wrapping_add(i as u64), cases);
            SuiteReport {
                name,
                passed: worst <= tolerance,
                cases,
                worst,
                tolerance,
                millis: start.elapsed().as_millis(),
            }
        })
        .collect()
}

fn random_shape<R: Rng>(r: &mut R) -> SystemShape {
    let n = r.random_range(2..=4);
    SystemShape::new((0..n).map(|_| r.random_range(2..=3)).collect()).expect("small dims")
}

fn random_mask<R: Rng>(r: &mut R, n: usize) -> SubsetMask {
    SubsetMask::new(r.random_range(1..(1u32 << n) - 1), n).expect("proper subset")
}

fn complement_symmetry(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let shape = random_shape(&mut r);
        let psi = random_pure_with(&shape, &mut r);
        let a = random_mask(&mut r, shape.len());
        worst = worst.max((reduced_purity(&psi, a.bits()) - reduced_purity(&psi, a.complement().bits())).abs());
    }
    (cases, worst)
}

fn partial_trace_invariants(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let shape = random_shape(&mut r);
        let rank = r.random_range(1..=3);
        let rho = random_mixed_with(&shape, rank, &mut r);
        let reduced = partial_trace(&rho, random_mask(&mut r, shape.len())).expect("valid mask");
        worst = worst
            .max((reduced.trace() - 1.0).abs())
            .max(hermitian_deviation(reduced.matrix()));
    }
    (cases, worst)
}

fn purity_range(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let shape = random_shape(&mut r);
        let rank = r.random_range(1..=shape.total_dim());
        let rho = random_mixed_with(&shape, rank, &mut r);
        let p = purity(&rho);
        let floor = 1.0 / shape.total_dim() as f64;
        worst = worst.max(floor - p).max(p - 1.0);
    }
    (cases, worst)
}

fn transpose_involution(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let shape = random_shape(&mut r);
        let rho = random_mixed_with(&shape, 2, &mut r);
        let parts = random_mask(&mut r, shape.len());
        let once = partial_transpose(&rho, parts).expect("valid mask");
        let twice = partial_transpose(&DensityMatrix::from_parts(shape.clone(), once), parts).expect("valid mask");
        worst = worst.max((twice - rho.matrix()).norm());
    }
    (cases, worst)
}

fn trace_norm_invariance(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let shape = random_shape(&mut r);
        let rho = random_mixed_with(&shape, 2, &mut r);
        let pt = partial_transpose(&rho, random_mask(&mut r, shape.len())).expect("valid mask");
        let d = shape.total_dim();
        let (u, v) = (random_unitary(d, &mut r), random_unitary(d, &mut r));
        let rotated = &u * &pt * &v;
        worst = worst
            .max((trace_norm(&rotated) - trace_norm(&pt)).abs())
            .max((hermitian_trace_norm(&pt) - trace_norm(&pt)).abs());
    }
    (cases, worst)
}

/// Stirling numbers of the second kind from their recurrence; compared with
/// the enumeration and with complement closure of realized subsets.
fn partition_counts(_seed: u64, _cases: usize) -> (usize, f64) {
    let mut s = [[0u64; 8]; 8];
    s[0][0] = 1;
    for n in 1..8 {
        for k in 1..=n {
            s[n][k] = k as u64 * s[n - 1][k] + s[n - 1][k - 1];
        }
    }
    let mut checked = 0;
    let mut bad = 0.0;
    for (n, row) in s.iter().enumerate().skip(2) {
        for (m, &expected) in row.iter().enumerate().take(n + 1).skip(2) {
            let all = enumerate_partitions(n, m).expect("valid range");
            checked += 1;
            if all.len() as u64 != expected {
                bad += 1.0;
            }
            for p in all.iter().take(50) {
                let subsets = p.realized_subsets();
                if subsets.len() != (1 << m) - 2 || subsets.iter().any(|a| !subsets.contains(&a.complement())) {
                    bad += 1.0;
                }
            }
        }
    }
    (checked, bad)
}

fn four_qubit_identity(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let shape = SystemShape::qubits(4);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let psi = random_pure_with(&shape, &mut r);
        let c = |p: &crate::partitions::Partition| concurrence_partition(&psi, p).expect("matching partition").squared;
        let tri: f64 = four_party_tripartitions().iter().map(&c).sum();
        let bi: f64 = four_party_pair_cuts().iter().map(&c).sum();
        let full = concurrence_full(&psi).expect("normalized").squared;
        worst = worst.max((full - (2.0 * tri + bi) / 12.0).abs());
    }
    (cases, worst)
}

fn substate_inequality(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let shape = SystemShape::new(vec![2, 2, 4]).expect("valid");
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let psi = random_pure_with(&shape, &mut r);
        let subs: f64 = LevelPair::all()
            .iter()
            .map(|&l| {
                amplitude_form(&substate_pure(&psi, l).expect("2x2x4"))
                    .expect("3 parties")
                    .squared
            })
            .sum();
        worst = worst.max(subs / 3.0 - concurrence_full(&psi).expect("normalized").squared);
    }
    (cases, worst)
}

fn amplitude_equivalence(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let dims = (0..3).map(|_| r.random_range(2..=4)).collect();
        let shape = SystemShape::new(dims).expect("small dims");
        let psi = random_pure_with(&shape, &mut r);
        let a = amplitude_form(&psi).expect("3 parties").squared;
        worst = worst.max((a - concurrence_full(&psi).expect("normalized").squared).abs());
    }
    (cases, worst)
}

fn local_unitary_invariance(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let shape = random_shape(&mut r);
        let psi = random_pure_with(&shape, &mut r);
        let moved = local_unitary_with(&psi, &mut r);
        let moved = crate::state::PureState::normalized(shape.clone(), moved.amplitudes().clone()).expect("unit");
        let a = concurrence_full(&psi).expect("normalized").squared;
        let b = concurrence_full(&moved).expect("normalized").squared;
        worst = worst.max((a - b).abs());
    }
    (cases, worst)
}

fn default_scheme_coverage(_seed: u64, _cases: usize) -> (usize, f64) {
    let slack = verify_weights(4, &WeightScheme::four_party_default()).expect("n = 4");
    let worst = slack.values().map(|s| to_f64(s).abs()).fold(0.0, f64::max);
    (slack.len(), worst)
}

/// Composed weights over random partition families must satisfy
/// `C_N^2 >= sum w_P C_P^2` on pure states.
fn composed_schemes(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let families: Vec<_> = (3..=4)
        .map(|n| {
            (
                n,
                (2..=n)
                    .flat_map(|m| enumerate_partitions(n, m).expect("valid"))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let rounds = cases.div_ceil(10).max(1);
    for _ in 0..rounds {
        let (n, all) = &families[r.random_range(0..families.len())];
        let family: Vec<_> = all.iter().filter(|_| r.random_bool(0.4)).cloned().collect();
        if family.is_empty() {
            continue;
        }
        let scheme = compose_weights(*n, &family, Objective::MaxTotal)
            .expect("valid family")
            .scheme;
        for _ in 0..10 {
            let psi = random_pure_with(&SystemShape::qubits(*n), &mut r);
            let rhs: f64 = scheme
                .weights()
                .iter()
                .map(|(p, w)| to_f64(w) * concurrence_partition(&psi, p).expect("matching").squared)
                .sum();
            worst = worst.max(rhs - concurrence_full(&psi).expect("normalized").squared);
        }
    }
    (rounds * 10, worst)
}

fn pure_soundness(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let providers = Providers::best();
    let scheme = WeightScheme::four_party_default();
    let mut worst = 0.0f64;
    for _ in 0..cases.div_ceil(4) {
        let psi = random_pure_with(&SystemShape::qubits(4), &mut r);
        let exact = concurrence_full(&psi).expect("normalized").squared;
        let rho = psi.density();
        let bounds = [
            theorem1_bound(&rho, TripartiteMethod::Best, &providers),
            corollary1_bound(&rho, &providers),
            delta_bound(&rho, &providers),
            scheme_bound(&rho, &scheme, &providers),
        ];
        for b in bounds {
            worst = worst.max(b.expect("four qubits").squared - exact);
        }
    }
    (cases.div_ceil(4), worst)
}

fn two_qubit_soundness(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let side = SubsetMask::new(1, 2).expect("valid");
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let rank = r.random_range(1..=4);
        let rho = random_mixed_with(&SystemShape::qubits(2), rank, &mut r);
        let w = wootters_concurrence(&rho).expect("two qubits");
        for m in [BipartiteMethod::Ppt, BipartiteMethod::Ccnr] {
            worst = worst.max(single_method_bound(&rho, side, m).expect("applicable") - w);
        }
    }
    (cases, worst)
}

fn separable_zero(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let providers = Providers::best();
    let mut worst = 0.0f64;
    for _ in 0..cases.div_ceil(4) {
        let terms = r.random_range(1..=6);
        let rho = random_separable_with(&SystemShape::qubits(4), terms, &mut r);
        worst = worst
            .max(
                theorem1_bound(&rho, TripartiteMethod::Best, &providers)
                    .expect("4 qubits")
                    .squared,
            )
            .max(corollary1_bound(&rho, &providers).expect("4 qubits").squared)
            .max(delta_bound(&rho, &providers).expect("4 qubits").squared);
    }
    (cases.div_ceil(4), worst)
}

fn hierarchy(seed: u64, cases: usize) -> (usize, f64) {
    let mut r = rng(seed);
    let providers = Providers::best();
    let mut worst = 0.0f64;
    for _ in 0..cases.div_ceil(4) {
        let rank = r.random_range(1..=4);
        let rho = random_mixed_with(&SystemShape::qubits(4), rank, &mut r);
        let t1 = theorem1_bound(&rho, TripartiteMethod::Relation, &providers)
            .expect("4 qubits")
            .squared;
        let d = delta_bound(&rho, &providers).expect("4 qubits").squared;
        worst = worst.max(d - t1);
    }
    (cases.div_ceil(4), worst)
}
