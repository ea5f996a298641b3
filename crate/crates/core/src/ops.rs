//! Tensor-index operations on dense states: partial trace, purity, partial
//! transpose, realignment, trace norm and subsystem regrouping.

use crate::error::{Error, Result};
use crate::state::{CMatrix, CVector, DensityMatrix, PureState, SubsetMask, SystemShape};

/// Singular values below this are treated as zero.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Reduced state on the subsystems in `keep`, tracing out the rest.
pub fn partial_trace(rho: &DensityMatrix, keep: SubsetMask) -> Result<DensityMatrix> {
    let shape = rho.shape();
    shape.check_mask(keep)?;
    let (kept, traced) = shape.split_indices(keep.bits());
    let dk = shape.dim_of(keep.bits());
    let dt = shape.total_dim() / dk;

    // full[a * dt + t] is the flat index with kept part a and traced part t
    let mut full = vec![0usize; dk * dt];
    for (flat, (&a, &t)) in kept.iter().zip(&traced).enumerate() {
        full[a * dt + t] = flat;
    }
    let m = rho.matrix();
    let out = CMatrix::from_fn(dk, dk, |a, b| {
        (0..dt).map(|t| m[(full[a * dt + t], full[b * dt + t])]).sum()
    });
    Ok(DensityMatrix::from_parts(shape.select(keep.bits()), out))
}

/// Amplitudes of `psi` reshaped to a `dim(bits) x dim(rest)` matrix.
fn amplitude_matrix(psi: &PureState, bits: u32) -> CMatrix {
    let shape = psi.shape();
    let (inside, outside) = shape.split_indices(bits);
    let da = shape.dim_of(bits);
    let db = shape.total_dim() / da;
    let mut m = CMatrix::zeros(da, db);
    for (flat, amp) in psi.amplitudes().iter().enumerate() {
        m[(inside[flat], outside[flat])] = *amp;
    }
    m
}

/// `Tr(rho_alpha^2)` for `rho_alpha` the reduction of `|psi><psi|` onto the
/// subsystems in `bits`. Works for subnormalized vectors, where the result
/// scales with the fourth power of the norm.
pub fn reduced_purity(psi: &PureState, bits: u32) -> f64 {
    let m = amplitude_matrix(psi, bits);
    let g = if m.nrows() <= m.ncols() {
        &m * m.adjoint()
    } else {
        m.adjoint() * &m
    };
    g.iter().map(|z| z.norm_sqr()).sum()
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr(rho^2) = sum_ij rho_ij rho_ji = sum_ij |rho_ij|^2 for Hermitian rho
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// Partial transpose with respect to the subsystems in `parts`.
pub fn partial_transpose(rho: &DensityMatrix, parts: SubsetMask) -> Result<CMatrix> {
    let shape = rho.shape();
    shape.check_mask(parts)?;
    let d = shape.total_dim();
    let digits: Vec<Vec<usize>> = (0..d).map(|i| shape.digits(i)).collect();
    let m = rho.matrix();
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let (mut ri, mut cj) = (digits[i].clone(), digits[j].clone());
            for k in 0..shape.len() {
                if parts.contains(k) {
                    std::mem::swap(&mut ri[k], &mut cj[k]);
                }
            }
            out[(shape.index(&ri), shape.index(&cj))] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Realigned matrix for the cut `side | complement`: with `side` of
/// dimension m and the rest of dimension n, the result is `m^2 x n^2` with
/// `R[(i,k),(j,l)] = rho[(i,j),(k,l)]`.
pub fn realign(rho: &DensityMatrix, side: SubsetMask) -> Result<CMatrix> {
    let shape = rho.shape();
    shape.check_mask(side)?;
    let (a, b) = shape.split_indices(side.bits());
    let m = shape.dim_of(side.bits());
    let n = shape.total_dim() / m;
    let rm = rho.matrix();
    let mut out = CMatrix::zeros(m * m, n * n);
    for r in 0..shape.total_dim() {
        for c in 0..shape.total_dim() {
            out[(a[r] * m + a[c], b[r] * n + b[c])] = rm[(r, c)];
        }
    }
    Ok(out)
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > SINGULAR_TOL)
        .sum()
}

/// Trace norm of a Hermitian matrix via its eigenvalues.
pub fn hermitian_trace_norm(m: &CMatrix) -> f64 {
    m.symmetric_eigenvalues().iter().map(|e| e.abs()).sum()
}

/// Reorders subsystems so that the groups in `groups` (bitmasks, disjoint,
/// covering everything) become consecutive coarse subsystems. Within a group
/// the original order is kept. The returned shape has one entry per group.
pub fn regroup_indices(shape: &SystemShape, groups: &[u32]) -> Result<(SystemShape, Vec<usize>)> {
    let mut seen = 0u32;
    for &g in groups {
        if g == 0 || g & seen != 0 {
            return Err(Error::Partition("groups must be nonempty and disjoint".into()));
        }
        seen |= g;
    }
    if seen != shape.full_bits() {
        return Err(Error::Partition("groups must cover every subsystem".into()));
    }
    let order: Vec<usize> = groups
        .iter()
        .flat_map(|&g| (0..shape.len()).filter(move |&k| g >> k & 1 == 1))
        .collect();
    let permuted_dims: Vec<usize> = order.iter().map(|&k| shape.dims()[k]).collect();
    let permuted = SystemShape::new(permuted_dims)?;
    // perm[new_flat] = old_flat
    let perm = (0..shape.total_dim())
        .map(|new_flat| {
            let nd = permuted.digits(new_flat);
            let mut od = vec![0; shape.len()];
            for (pos, &k) in order.iter().enumerate() {
                od[k] = nd[pos];
            }
            shape.index(&od)
        })
        .collect();
    let coarse = SystemShape::new(groups.iter().map(|&g| shape.dim_of(g)).collect())?;
    Ok((coarse, perm))
}

pub fn regroup_pure(psi: &PureState, groups: &[u32]) -> Result<PureState> {
    let (coarse, perm) = regroup_indices(psi.shape(), groups)?;
    let amps = psi.amplitudes();
    let v = CVector::from_iterator(perm.len(), perm.iter().map(|&p| amps[p]));
    PureState::subnormalized(coarse, v)
}

pub fn regroup_density(rho: &DensityMatrix, groups: &[u32]) -> Result<DensityMatrix> {
    let (coarse, perm) = regroup_indices(rho.shape(), groups)?;
    let m = rho.matrix();
    let out = CMatrix::from_fn(perm.len(), perm.len(), |i, j| m[(perm[i], perm[j])]);
    Ok(DensityMatrix::from_parts(coarse, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_pure, random_unitary};
    use crate::state::{CVector, C64};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell() -> PureState {
        let h = 0.5f64.sqrt();
        PureState::new(
            SystemShape::qubits(2),
            CVector::from_vec(vec![c(h), c(0.0), c(0.0), c(h)]),
        )
        .unwrap()
    }

    fn bell_pair_product() -> PureState {
        let mut v = CVector::zeros(16);
        for i in [0b0000, 0b0011, 0b1100, 0b1111] {
            v[i] = c(0.5);
        }
        PureState::new(SystemShape::qubits(4), v).unwrap()
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let r = partial_trace(&bell().density(), SubsetMask::new(0b01, 2).unwrap()).unwrap();
        let half = CMatrix::identity(2, 2).unscale(2.0);
        assert!(max_abs(&(r.matrix() - half)) < 1e-15);
    }

    #[test]
    fn product_marginal_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = crate::random::random_mixed_with(&SystemShape::new(vec![2]).unwrap(), 2, &mut rng);
        let b = crate::random::random_mixed_with(&SystemShape::new(vec![3]).unwrap(), 3, &mut rng);
        let ab = DensityMatrix::product(&[&a, &b]).unwrap();
        let ra = partial_trace(&ab, SubsetMask::new(0b01, 2).unwrap()).unwrap();
        assert!(max_abs(&(ra.matrix() - a.matrix())) < 1e-14);
        let rb = partial_trace(&ab, SubsetMask::new(0b10, 2).unwrap()).unwrap();
        assert!(max_abs(&(rb.matrix() - b.matrix())) < 1e-14);
        assert_eq!(rb.shape().dims(), &[3]);
    }

    #[test]
    fn bell_pairs_keep_one_and_three() {
        // brute-force contraction over the 16x16 matrix, independent of the
        // index bookkeeping in partial_trace
        let rho = bell_pair_product().density();
        let s = rho.shape().clone();
        let mut oracle = CMatrix::zeros(4, 4);
        for r in 0..16 {
            for col in 0..16 {
                let (dr, dc) = (s.digits(r), s.digits(col));
                if dr[1] == dc[1] && dr[3] == dc[3] {
                    oracle[(dr[0] * 2 + dr[2], dc[0] * 2 + dc[2])] += rho.matrix()[(r, col)];
                }
            }
        }
        let quarter = CMatrix::identity(4, 4).unscale(4.0);
        assert!(max_abs(&(&oracle - &quarter)) < 1e-15);
        let r = partial_trace(&rho, SubsetMask::from_labels(&[1, 3], 4).unwrap()).unwrap();
        assert!(max_abs(&(r.matrix() - quarter)) < 1e-15);
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&bell().density()) - 1.0).abs() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed(SystemShape::qubits(2));
        assert!((purity(&mixed) - 0.25).abs() < 1e-15);

        // rho(t) at t = 1/2: direct matrix square
        let psi = bell_pair_product().density();
        let t = 0.5;
        let noise = DensityMatrix::maximally_mixed(SystemShape::qubits(4));
        let rho = DensityMatrix::mixture(&[(1.0 - t, &noise), (t, &psi)]).unwrap();
        let sq = rho.matrix() * rho.matrix();
        let oracle: f64 = sq.diagonal().iter().map(|z| z.re).sum();
        assert!((purity(&rho) - oracle).abs() < 1e-14);
        // closed form: 15 eigenvalues (1-t)/16 and one (1-t)/16 + t
        let e = (1.0 - t) / 16.0;
        assert!((oracle - (15.0 * e * e + (e + t) * (e + t))).abs() < 1e-14);
    }

    #[test]
    fn reduced_purity_matches_partial_trace() {
        let psi = random_pure(&SystemShape::new(vec![2, 3, 2]).unwrap(), 11);
        let rho = psi.density();
        for m in SubsetMask::all(3) {
            let direct = purity(&partial_trace(&rho, m).unwrap());
            assert!((reduced_purity(&psi, m.bits()) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_norm_examples() {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(-2.0)]));
        assert!((trace_norm(&d) - 3.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(5, &mut rng);
        assert!((trace_norm(&u) - 5.0).abs() < 1e-12);

        let pt = partial_transpose(&bell().density(), SubsetMask::new(0b10, 2).unwrap()).unwrap();
        let mut eig: Vec<f64> = pt.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        assert!((eig[0] + 0.5).abs() < 1e-14);
        for e in &eig[1..] {
            assert!((e - 0.5).abs() < 1e-14);
        }
        assert!((trace_norm(&pt) - 2.0).abs() < 1e-12);
        assert!((hermitian_trace_norm(&pt) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_of_product_and_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = crate::random::random_mixed_with(&SystemShape::qubits(1), 2, &mut rng);
        let b = crate::random::random_mixed_with(&SystemShape::qubits(1), 2, &mut rng);
        let ab = DensityMatrix::product(&[&a, &b]).unwrap();
        let pt = partial_transpose(&ab, SubsetMask::new(0b10, 2).unwrap()).unwrap();
        let expected = a.matrix().kronecker(&b.matrix().transpose());
        assert!(max_abs(&(&pt - expected)) < 1e-15);
        assert!((trace_norm(&pt) - 1.0).abs() < 1e-12);

        let diag = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.1), c(0.2), c(0.3), c(0.4)]));
        let rho = DensityMatrix::new(SystemShape::qubits(2), diag.clone()).unwrap();
        for bits in 1..3 {
            let pt = partial_transpose(&rho, SubsetMask::new(bits, 2).unwrap()).unwrap();
            assert_eq!(pt, diag);
        }
    }

    #[test]
    fn realignment_examples() {
        let side = SubsetMask::new(0b01, 2).unwrap();
        let prod = PureState::product(&[
            random_pure(&SystemShape::qubits(1), 1),
            random_pure(&SystemShape::new(vec![3]).unwrap(), 2),
        ])
        .unwrap();
        let r = realign(&prod.density(), side).unwrap();
        assert_eq!((r.nrows(), r.ncols()), (4, 9));
        assert!((trace_norm(&r) - 1.0).abs() < 1e-12);

        assert!((trace_norm(&realign(&bell().density(), side).unwrap()) - 2.0).abs() < 1e-12);

        // I/(mn) realigns to vec(I_m) vec(I_n)^T / (mn): one singular value
        // sqrt(m) sqrt(n) / (mn)
        for (m, n) in [(2, 2), (2, 3), (3, 4)] {
            let shape = SystemShape::new(vec![m, n]).unwrap();
            let r = realign(&DensityMatrix::maximally_mixed(shape), side).unwrap();
            let sv = r.clone().svd(false, false).singular_values;
            let nonzero: Vec<f64> = sv.iter().copied().filter(|&s| s > 1e-12).collect();
            assert_eq!(nonzero.len(), 1);
            let expected = 1.0 / ((m * n) as f64).sqrt();
            assert!((trace_norm(&r) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn regroup_moves_subsystems() {
        let shape = SystemShape::new(vec![2, 3, 4]).unwrap();
        let psi = random_pure(&shape, 4);
        let g = regroup_pure(&psi, &[0b100, 0b011]).unwrap();
        assert_eq!(g.shape().dims(), &[4, 6]);
        // amplitude <i j k| psi> lands at <k, (i j)|
        let a = psi.amplitudes()[shape.index(&[1, 2, 3])];
        assert_eq!(g.amplitudes()[3 * 6 + (2 + 3)], a);
        let rg = regroup_density(&psi.density(), &[0b100, 0b011]).unwrap();
        assert!(max_abs(&(rg.matrix() - g.density().matrix())) < 1e-15);
        assert!(regroup_indices(&shape, &[0b001, 0b011]).is_err());
        assert!(regroup_indices(&shape, &[0b001, 0b010]).is_err());
    }
}
