//! Seeded random states for property tests and sweeps.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::state::{CMatrix, CVector, DensityMatrix, PureState, SystemShape, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-random unit vector: i.i.d. complex Gaussians, normalized.
pub fn random_pure_with<R: Rng + ?Sized>(shape: &SystemShape, rng: &mut R) -> PureState {
    loop {
        let v = CVector::from_fn(shape.total_dim(), |_, _| gaussian(rng));
        if let Ok(psi) = PureState::normalized(shape.clone(), v) {
            return psi;
        }
    }
}

pub fn random_pure(shape: &SystemShape, seed: u64) -> PureState {
    random_pure_with(shape, &mut rng(seed))
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
/// the phases of R's diagonal absorbed into Q.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g: CMatrix = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Mixture of `rank` Haar pure states with uniformly random weights.
pub fn random_mixed_with<R: Rng + ?Sized>(shape: &SystemShape, rank: usize, rng: &mut R) -> DensityMatrix {
    let d = shape.total_dim();
    let weights: Vec<f64> = (0..rank.max(1)).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut mat = CMatrix::zeros(d, d);
    for w in weights {
        let psi = random_pure_with(shape, rng);
        mat += psi.density().matrix().scale(w / total);
    }
    DensityMatrix::from_parts(shape.clone(), mat)
}

pub fn random_mixed(shape: &SystemShape, rank: usize, seed: u64) -> DensityMatrix {
    random_mixed_with(shape, rank, &mut rng(seed))
}

/// Fully separable mixture of `terms` random product pure states.
pub fn random_separable_with<R: Rng + ?Sized>(shape: &SystemShape, terms: usize, rng: &mut R) -> DensityMatrix {
    let d = shape.total_dim();
    let weights: Vec<f64> = (0..terms.max(1)).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut mat = CMatrix::zeros(d, d);
    for w in weights {
        let factors: Vec<PureState> = shape
            .dims()
            .iter()
            .map(|&k| random_pure_with(&SystemShape::new(vec![k]).expect("positive dim"), rng))
            .collect();
        let psi = PureState::product(&factors).expect("factors match shape");
        mat += psi.density().matrix().scale(w / total);
    }
    DensityMatrix::from_parts(shape.clone(), mat)
}

/// Applies an independent Haar unitary to every subsystem.
pub fn local_unitary_with<R: Rng + ?Sized>(psi: &PureState, rng: &mut R) -> PureState {
    let mut u = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for &d in psi.shape().dims() {
        u = u.kronecker(&random_unitary(d, rng));
    }
    let v = u * psi.amplitudes();
    PureState::subnormalized(psi.shape().clone(), v).expect("unitary preserves norm")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{partial_trace, purity};
    use crate::state::SubsetMask;

    #[test]
    fn unit_norm_and_seed_determinism() {
        let shape = SystemShape::new(vec![2, 3]).unwrap();
        for seed in 0..20 {
            let a = random_pure(&shape, seed);
            assert!((a.amplitudes().norm() - 1.0).abs() < 1e-12);
            let b = random_pure(&shape, seed);
            assert_eq!(a.amplitudes(), b.amplitudes());
        }
        assert_ne!(random_pure(&shape, 1).amplitudes(), random_pure(&shape, 2).amplitudes());
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(4, &mut rng(9));
        let err = (u.adjoint() * &u - CMatrix::identity(4, 4)).norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn haar_marginal_purity_mean() {
        // E[Tr rho_A^2] = (dA + dB) / (dA dB + 1) = 4/5 for two qubits
        let shape = SystemShape::qubits(2);
        let mut r = rng(42);
        let keep = SubsetMask::new(0b01, 2).unwrap();
        let samples: Vec<f64> = (0..10_000)
            .map(|_| purity(&partial_trace(&random_pure_with(&shape, &mut r).density(), keep).unwrap()))
            .collect();
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!((mean - 0.8).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn separable_mixture_is_valid_state() {
        let shape = SystemShape::qubits(3);
        let rho = random_separable_with(&shape, 5, &mut rng(1));
        assert!(DensityMatrix::new(shape, rho.matrix().clone()).is_ok());
    }
}
