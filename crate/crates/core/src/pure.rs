//! Concurrence of pure states.
//!
//! For `N` parties, `C_N = 2^{1-N/2} sqrt((2^N - 2) - sum_alpha Tr rho_alpha^2)`
//! with `alpha` over all nonempty proper subsets. Under an `M`-block
//! partition the blocks act as single parties and `alpha` runs over the
//! `2^M - 2` block unions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ops::reduced_purity;
use crate::partitions::Partition;
use crate::state::{CVector, Normalization, PureState, SystemShape, C64};

/// Radicands down to this are arithmetic noise and clamp to zero.
pub const RADICAND_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConcurrenceValue {
    pub value: f64,
    pub squared: f64,
}

impl ConcurrenceValue {
    pub fn from_squared(squared: f64) -> Self {
        let squared = squared.max(0.0);
        ConcurrenceValue {
            value: squared.sqrt(),
            squared,
        }
    }
}

/// `C_M` from the parties count `m` and the sum of the `2^m - 2` purities.
fn from_purity_sum(m: usize, purity_sum: f64) -> Result<ConcurrenceValue> {
    let radicand = ((1u64 << m) - 2) as f64 - purity_sum;
    if radicand < -RADICAND_TOL {
        return Err(Error::NegativeRadicand(radicand));
    }
    // C^2 = 2^{2-M} * radicand
    Ok(ConcurrenceValue::from_squared(
        radicand.max(0.0) * 2f64.powi(2 - m as i32),
    ))
}

fn require_normalized(psi: &PureState) -> Result<()> {
    if psi.normalization() != Normalization::Normalized {
        return Err(Error::Norm(
            psi.norm_sqr().sqrt(),
            "concurrence needs a normalized state",
        ));
    }
    Ok(())
}

/// `C_N` over all `N` subsystems.
pub fn concurrence_full(psi: &PureState) -> Result<ConcurrenceValue> {
    require_normalized(psi)?;
    let n = psi.shape().len();
    if n < 2 {
        return Ok(ConcurrenceValue::from_squared(0.0));
    }
    // Tr rho_alpha^2 = Tr rho_{complement}^2, so visit subsets without the
    // last subsystem and count each twice
    let half: f64 = (1..1u32 << (n - 1)).map(|bits| reduced_purity(psi, bits)).sum();
    from_purity_sum(n, 2.0 * half)
}

/// `C_M` treating every block of `partition` as one party.
pub fn concurrence_partition(psi: &PureState, partition: &Partition) -> Result<ConcurrenceValue> {
    require_normalized(psi)?;
    if partition.n() != psi.shape().len() {
        return Err(Error::Shape(format!(
            "partition {partition} is over {} subsystems, state has {}",
            partition.n(),
            psi.shape().len()
        )));
    }
    let m = partition.len();
    if m < 2 {
        return Ok(ConcurrenceValue::from_squared(0.0));
    }
    let sum: f64 = partition
        .realized_subsets()
        .iter()
        .map(|a| reduced_purity(psi, a.bits()))
        .sum();
    from_purity_sum(m, sum)
}

/// The tripartite amplitude form
///
/// ```text
/// C_3^2 = 1/2 sum ( |a_ijk a_pqm - a_ijm a_pqk|^2
///                 + |a_ijk a_pqm - a_iqk a_pjm|^2
///                 + |a_ijk a_pqm - a_pjk a_iqm|^2 )
/// ```
///
/// with the sum over every ordered tuple `(i, j, k, p, q, m)` in the full
/// index ranges. Each term family equals `2 (|a|^4 - Tr rho_X^2)` for one of
/// the three single-party reductions, so the form agrees with the purity
/// definition on the partition `1|2|3`. It is homogeneous of degree four in
/// the amplitudes and is evaluated as-is on subnormalized vectors.
pub fn amplitude_form(psi: &PureState) -> Result<ConcurrenceValue> {
    let dims = psi.shape().dims();
    if dims.len() != 3 {
        return Err(Error::Shape(format!(
            "amplitude form needs three parties, got {}",
            psi.shape()
        )));
    }
    let (da, db, dc) = (dims[0], dims[1], dims[2]);
    let a = psi.amplitudes();
    let at = |i: usize, j: usize, k: usize| a[(i * db + j) * dc + k];
    let mut sum = 0.0;
    for i in 0..da {
        for j in 0..db {
            for k in 0..dc {
                let x = at(i, j, k);
                for p in 0..da {
                    for q in 0..db {
                        for m in 0..dc {
                            let base: C64 = x * at(p, q, m);
                            sum += (base - at(i, j, m) * at(p, q, k)).norm_sqr()
                                + (base - at(i, q, k) * at(p, j, m)).norm_sqr()
                                + (base - at(p, j, k) * at(i, q, m)).norm_sqr();
                        }
                    }
                }
            }
        }
    }
    Ok(ConcurrenceValue::from_squared(0.5 * sum))
}

/// The amplitude form restricted to `2 x 2 x 4` states.
pub fn concurrence_224_coefficient(psi: &PureState) -> Result<ConcurrenceValue> {
    if psi.shape().dims() != [2, 2, 4] {
        return Err(Error::Shape(format!("expected shape 2x2x4, got {}", psi.shape())));
    }
    amplitude_form(psi)
}

/// A pair of levels `k1 < k2` of the four-level party.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelPair {
    lo: usize,
    hi: usize,
}

impl LevelPair {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo >= hi || hi > 3 {
            return Err(Error::Domain(format!(
                "level pair ({lo}, {hi}) must satisfy 0 <= k1 < k2 <= 3"
            )));
        }
        Ok(LevelPair { lo, hi })
    }

    /// The six pairs `{0,1}, {0,2}, {0,3}, {1,2}, {1,3}, {2,3}`.
    pub fn all() -> [LevelPair; 6] {
        [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].map(|(lo, hi)| LevelPair { lo, hi })
    }

    pub fn levels(self) -> [usize; 2] {
        [self.lo, self.hi]
    }
}

impl std::fmt::Display for LevelPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

/// Restriction of a `2 x 2 x 4` vector to third-party levels `{k1, k2}`,
/// giving an unnormalized `2 x 2 x 2` vector.
pub fn substate_pure(psi: &PureState, levels: LevelPair) -> Result<PureState> {
    if psi.shape().dims() != [2, 2, 4] {
        return Err(Error::Shape(format!("expected shape 2x2x4, got {}", psi.shape())));
    }
    let a = psi.amplitudes();
    let v = CVector::from_fn(8, |r, _| {
        let (ij, slot) = (r / 2, r % 2);
        a[ij * 4 + levels.levels()[slot]]
    });
    PureState::subnormalized(SystemShape::new(vec![2, 2, 2])?, v)
}
