//! Shapes, subsystem masks, pure states and density matrices.
//!
//! Basis states are indexed by the mixed-radix multi-index `i1 i2 ... iN`
//! with subsystem 1 as the most significant digit. Subsystem `k` (1-based)
//! corresponds to bit `k - 1` of a [`SubsetMask`].

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Maximum number of subsystems; masks are stored in a `u32` and partition
/// text uses single digits.
pub const MAX_SUBSYSTEMS: usize = 9;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-12;

/// Local dimensions `(d1, ..., dN)` of a tensor-product space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SystemShape {
    dims: Vec<usize>,
}

impl SystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.len() > MAX_SUBSYSTEMS {
            return Err(Error::Shape(format!(
                "number of subsystems must be in 1..={MAX_SUBSYSTEMS}, got {}",
                dims.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::Shape(format!("subsystem dimension {d} is not positive")));
        }
        Ok(SystemShape { dims })
    }

    pub fn qubits(n: usize) -> Self {
        SystemShape::new(vec![2; n]).expect("qubit count in range")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of subsystems `N`.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn full_bits(&self) -> u32 {
        (1u32 << self.len()) - 1
    }

    /// Product of the dimensions of the subsystems in `bits`.
    pub fn dim_of(&self, bits: u32) -> usize {
        self.dims
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .map(|(_, d)| d)
            .product()
    }

    /// Shape restricted to the subsystems in `bits`, in original order.
    pub fn select(&self, bits: u32) -> SystemShape {
        SystemShape {
            dims: self
                .dims
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, &d)| d)
                .collect(),
        }
    }

    /// Mixed-radix digits of a flat basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&x, &d)| acc * d + x)
    }

    pub fn check_mask(&self, mask: SubsetMask) -> Result<()> {
        if mask.n() != self.len() {
            return Err(Error::Mask {
                bits: mask.bits(),
                n: self.len(),
            });
        }
        Ok(())
    }

    /// For every flat index, its sub-index within the subsystems in `bits`
    /// and within the complementary subsystems.
    pub(crate) fn split_indices(&self, bits: u32) -> (Vec<usize>, Vec<usize>) {
        let total = self.total_dim();
        let mut inside = Vec::with_capacity(total);
        let mut outside = Vec::with_capacity(total);
        for flat in 0..total {
            let digits = self.digits(flat);
            let (mut a, mut b) = (0, 0);
            for (k, (&x, &d)) in digits.iter().zip(&self.dims).enumerate() {
                if bits >> k & 1 == 1 {
                    a = a * d + x;
                } else {
                    b = b * d + x;
                }
            }
            inside.push(a);
            outside.push(b);
        }
        (inside, outside)
    }
}

impl fmt::Display for SystemShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A nonempty proper subset of the subsystems `{1, ..., N}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    bits: u32,
    n: u8,
}

impl SubsetMask {
    pub fn new(bits: u32, n: usize) -> Result<Self> {
        let full = if n >= 32 { u32::MAX } else { (1u32 << n) - 1 };
        if n == 0 || n > MAX_SUBSYSTEMS || bits == 0 || bits & !full != 0 || bits == full {
            return Err(Error::Mask { bits, n });
        }
        Ok(SubsetMask { bits, n: n as u8 })
    }

    /// From 1-based subsystem labels.
    pub fn from_labels(labels: &[usize], n: usize) -> Result<Self> {
        let mut bits = 0u32;
        for &l in labels {
            if l == 0 || l > n {
                return Err(Error::Mask { bits: 0, n });
            }
            bits |= 1 << (l - 1);
        }
        SubsetMask::new(bits, n)
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    pub fn complement(self) -> SubsetMask {
        SubsetMask {
            bits: !self.bits & ((1u32 << self.n) - 1),
            n: self.n,
        }
    }

    pub fn contains(self, subsystem: usize) -> bool {
        self.bits >> subsystem & 1 == 1
    }

    pub fn count(self) -> usize {
        self.bits.count_ones() as usize
    }

    /// 1-based labels in increasing order.
    pub fn labels(self) -> Vec<usize> {
        (0..self.n()).filter(|&k| self.contains(k)).map(|k| k + 1).collect()
    }

    /// All `2^N - 2` nonempty proper subsets, ordered by bit pattern.
    pub fn all(n: usize) -> impl Iterator<Item = SubsetMask> {
        (1..(1u32 << n) - 1).map(move |bits| SubsetMask { bits, n: n as u8 })
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.labels() {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    Normalized,
    Subnormalized,
}

/// Amplitude vector over a [`SystemShape`].
#[derive(Clone, Debug)]
pub struct PureState {
    shape: SystemShape,
    amps: CVector,
    norm: Normalization,
}

impl PureState {
    /// A unit vector; rejects norms further than 1e-12 from one.
    pub fn new(shape: SystemShape, amps: CVector) -> Result<Self> {
        check_len(&shape, amps.len())?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Norm(norm, "pure state must have unit norm within 1e-12"));
        }
        Ok(PureState {
            shape,
            amps,
            norm: Normalization::Normalized,
        })
    }

    /// Scales `amps` to unit length.
    pub fn normalized(shape: SystemShape, amps: CVector) -> Result<Self> {
        check_len(&shape, amps.len())?;
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Norm(norm, "cannot normalize a zero vector"));
        }
        Ok(PureState {
            shape,
            amps: amps.unscale(norm),
            norm: Normalization::Normalized,
        })
    }

    /// A vector with norm at most one, kept as given.
    pub fn subnormalized(shape: SystemShape, amps: CVector) -> Result<Self> {
        check_len(&shape, amps.len())?;
        let norm = amps.norm();
        if norm > 1.0 + NORM_TOL {
            return Err(Error::Norm(norm, "substate norm exceeds 1"));
        }
        let flag = if (norm - 1.0).abs() <= NORM_TOL {
            Normalization::Normalized
        } else {
            Normalization::Subnormalized
        };
        Ok(PureState {
            shape,
            amps,
            norm: flag,
        })
    }

    /// Computational basis state `|digits>`.
    pub fn basis(shape: SystemShape, digits: &[usize]) -> Result<Self> {
        if digits.len() != shape.len() || digits.iter().zip(shape.dims()).any(|(&x, &d)| x >= d) {
            return Err(Error::Shape(format!("basis label {digits:?} invalid for {shape}")));
        }
        let mut amps = CVector::zeros(shape.total_dim());
        amps[shape.index(digits)] = C64::new(1.0, 0.0);
        PureState::new(shape, amps)
    }

    /// Tensor product in the given order.
    pub fn product(factors: &[PureState]) -> Result<Self> {
        let mut dims = Vec::new();
        let mut amps = CVector::from_element(1, C64::new(1.0, 0.0));
        for f in factors {
            dims.extend_from_slice(f.shape.dims());
            amps = amps.kronecker(&f.amps);
        }
        PureState::subnormalized(SystemShape::new(dims)?, amps)
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn normalization(&self) -> Normalization {
        self.norm
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn density(&self) -> DensityMatrix {
        let mat = &self.amps * self.amps.adjoint();
        DensityMatrix {
            shape: self.shape.clone(),
            mat,
            norm: self.norm,
        }
    }

    /// Same amplitudes viewed under a different shape of equal total dimension.
    pub fn reshaped(&self, shape: SystemShape) -> Result<Self> {
        check_len(&shape, self.amps.len())?;
        Ok(PureState {
            shape,
            amps: self.amps.clone(),
            norm: self.norm,
        })
    }
}

/// Hermitian positive semidefinite matrix over a [`SystemShape`] with trace
/// one, or trace in `(0, 1]` when subnormalized.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    shape: SystemShape,
    mat: CMatrix,
    norm: Normalization,
}

impl DensityMatrix {
    pub fn new(shape: SystemShape, mat: CMatrix) -> Result<Self> {
        let rho = DensityMatrix::validated(shape, mat)?;
        let tr = rho.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Trace(tr, "density matrix must have unit trace within 1e-10"));
        }
        Ok(rho)
    }

    pub fn subnormalized(shape: SystemShape, mat: CMatrix) -> Result<Self> {
        let rho = DensityMatrix::validated(shape, mat)?;
        let tr = rho.trace();
        if tr <= 0.0 || tr > 1.0 + TRACE_TOL {
            return Err(Error::Trace(tr, "substate trace must lie in (0, 1]"));
        }
        Ok(rho)
    }

    fn validated(shape: SystemShape, mat: CMatrix) -> Result<Self> {
        let d = shape.total_dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Shape(format!(
                "matrix is {}x{} but shape {shape} needs {d}x{d}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let dev = hermitian_deviation(&mat);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let min = min_eigenvalue(&mat);
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(DensityMatrix::from_parts(shape, mat))
    }

    /// Trusted constructor for results of trace-preserving operations on
    /// already validated input.
    pub(crate) fn from_parts(shape: SystemShape, mat: CMatrix) -> Self {
        let tr: f64 = mat.diagonal().iter().map(|z| z.re).sum();
        let norm = if (tr - 1.0).abs() <= TRACE_TOL {
            Normalization::Normalized
        } else {
            Normalization::Subnormalized
        };
        DensityMatrix { shape, mat, norm }
    }

    pub fn maximally_mixed(shape: SystemShape) -> Self {
        let d = shape.total_dim();
        let mat = CMatrix::identity(d, d).unscale(d as f64);
        DensityMatrix::from_parts(shape, mat)
    }

    /// Convex combination `sum_i w_i rho_i`; weights must be nonnegative.
    pub fn mixture(terms: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::Domain("empty mixture".into()))?.1;
        let d = first.dim();
        let mut mat = CMatrix::zeros(d, d);
        for (w, rho) in terms {
            if *w < 0.0 || rho.shape != first.shape {
                return Err(Error::Domain("mixture needs nonnegative weights over one shape".into()));
            }
            mat += rho.mat.scale(*w);
        }
        DensityMatrix::subnormalized(first.shape.clone(), mat)
    }

    /// Tensor product in the given order.
    pub fn product(factors: &[&DensityMatrix]) -> Result<Self> {
        let mut dims = Vec::new();
        let mut mat = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for f in factors {
            dims.extend_from_slice(f.shape.dims());
            mat = mat.kronecker(&f.mat);
        }
        Ok(DensityMatrix::from_parts(SystemShape::new(dims)?, mat))
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn normalization(&self) -> Normalization {
        self.norm
    }

    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    /// Copy scaled to unit trace.
    pub fn renormalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(Error::Trace(tr, "cannot renormalize a zero-trace matrix"));
        }
        Ok(DensityMatrix {
            shape: self.shape.clone(),
            mat: self.mat.unscale(tr),
            norm: Normalization::Normalized,
        })
    }

    /// Same matrix viewed under a different shape of equal total dimension.
    pub fn reshaped(&self, shape: SystemShape) -> Result<Self> {
        check_len(&shape, self.dim())?;
        Ok(DensityMatrix {
            shape,
            mat: self.mat.clone(),
            norm: self.norm,
        })
    }

    /// If the matrix is rank one (purity equal to squared trace within
    /// `1e-10`), its pure state with norm squared equal to the trace.
    pub fn as_pure(&self) -> Option<PureState> {
        let tr = self.trace();
        if tr <= 0.0 || (crate::ops::purity(self) - tr * tr).abs() > 1e-10 {
            return None;
        }
        let eig = self.mat.clone().symmetric_eigen();
        let (k, _) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
        let v = eig.eigenvectors.column(k).scale(tr.sqrt());
        PureState::subnormalized(self.shape.clone(), v.into_owned()).ok()
    }
}

fn check_len(shape: &SystemShape, len: usize) -> Result<()> {
    if shape.total_dim() != len {
        return Err(Error::Shape(format!(
            "length {len} does not match shape {shape} of dimension {}",
            shape.total_dim()
        )));
    }
    Ok(())
}

/// Largest elementwise `|M - M^dag|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()).unscale(2.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let s = SystemShape::new(vec![2, 3, 4]).unwrap();
        for i in 0..s.total_dim() {
            assert_eq!(s.index(&s.digits(i)), i);
        }
        assert_eq!(s.digits(5), vec![0, 1, 1]);
        assert_eq!(s.dim_of(0b101), 8);
        assert_eq!(s.select(0b110).dims(), &[3, 4]);
    }

    #[test]
    fn subset_mask_rules() {
        assert!(SubsetMask::new(0, 3).is_err());
        assert!(SubsetMask::new(0b111, 3).is_err());
        assert!(SubsetMask::new(0b1000, 3).is_err());
        let m = SubsetMask::from_labels(&[1, 3], 4).unwrap();
        assert_eq!(m.to_string(), "13");
        assert_eq!(m.complement().to_string(), "24");
        assert_eq!(SubsetMask::all(4).count(), 14);
    }

    #[test]
    fn density_validation_reports_magnitude() {
        let shape = SystemShape::qubits(1);
        let mut m = CMatrix::identity(2, 2).unscale(2.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        match DensityMatrix::new(shape.clone(), m) {
            Err(Error::NotHermitian(d)) => assert!((d - 0.1).abs() < 1e-12),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(1.5, 0.0), C64::new(-0.5, 0.0)]));
        match DensityMatrix::new(shape, neg) {
            Err(Error::NotPositive(e)) => assert!((e + 0.5).abs() < 1e-12),
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn pure_state_norm_checks() {
        let shape = SystemShape::qubits(1);
        let v = CVector::from_vec(vec![C64::new(0.5, 0.0), C64::new(0.5, 0.0)]);
        assert!(PureState::new(shape.clone(), v.clone()).is_err());
        let sub = PureState::subnormalized(shape.clone(), v.clone()).unwrap();
        assert_eq!(sub.normalization(), Normalization::Subnormalized);
        let n = PureState::normalized(shape, v).unwrap();
        assert!((n.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rank_one_recovered() {
        let s = PureState::normalized(
            SystemShape::qubits(2),
            CVector::from_vec(vec![
                C64::new(1.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 0.0),
                C64::new(2.0, 0.0),
            ]),
        )
        .unwrap();
        let back = s.density().as_pure().unwrap();
        let overlap = (s.amplitudes().adjoint() * back.amplitudes())[(0, 0)].norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        assert!(DensityMatrix::maximally_mixed(SystemShape::qubits(2))
            .as_pure()
            .is_none());
    }
}
