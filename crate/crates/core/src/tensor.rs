//! Dense complex linear algebra over explicitly structured tensor-product
//! spaces.
//!
//! Subsystem 0 is the most significant factor: the flat index of the
//! multi-index `(i_0, ..., i_{N-1})` is `sum_k i_k * prod_{j>k} d_j`.
//! Every operation here is a pure function over immutable values.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::{EPS_HERM, EPS_IDEM, EPS_NORM, EPS_PSD, EPS_UNIT};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Ordered list of subsystem dimensions defining a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertStructure {
    dims: Vec<usize>,
    total_dim: usize,
}

impl HilbertStructure {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::InvalidStructure("no subsystems".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidStructure(format!(
                "subsystem dimension {d} is below 2"
            )));
        }
        let total_dim = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidStructure("total dimension overflows".into()))?;
        Ok(Self { dims, total_dim })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, subsystem: usize) -> usize {
        self.dims[subsystem]
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Number of subsystems.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major strides: `strides()[k] = prod_{j>k} d_j`.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len() - 1).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    pub fn flatten(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dims.len());
        multi
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut multi = vec![0; self.dims.len()];
        for (slot, &d) in multi.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
        multi
    }

    /// Structure of `self ⊗ other`.
    pub fn concat(&self, other: &HilbertStructure) -> HilbertStructure {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        HilbertStructure {
            total_dim: self.total_dim * other.total_dim,
            dims,
        }
    }

    /// Sub-structure made of the listed subsystems, in the listed order.
    pub fn select(&self, subsystems: &[usize]) -> Result<HilbertStructure> {
        for &k in subsystems {
            self.check_subsystem(k)?;
        }
        HilbertStructure::new(subsystems.iter().map(|&k| self.dims[k]).collect::<Vec<_>>())
    }

    pub fn check_subsystem(&self, subsystem: usize) -> Result<()> {
        if subsystem >= self.dims.len() {
            return Err(Error::StructureMismatch(format!(
                "subsystem {} does not exist in a {}-partite structure",
                subsystem + 1,
                self.dims.len()
            )));
        }
        Ok(())
    }

    /// Flat offsets of every multi-index over `subsystems` (all other
    /// indices zero), enumerated row-major with the first listed subsystem
    /// most significant.
    pub(crate) fn offsets(&self, subsystems: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &k in subsystems {
            let stride = strides[k];
            offsets = offsets
                .iter()
                .flat_map(|&o| (0..self.dims[k]).map(move |i| o + i * stride))
                .collect();
        }
        offsets
    }

    fn complement(&self, subsystems: &[usize]) -> Vec<usize> {
        (0..self.dims.len())
            .filter(|k| !subsystems.contains(k))
            .collect()
    }
}

impl std::fmt::Display for HilbertStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(ToString::to_string).collect();
        write!(f, "({})", dims.join(","))
    }
}

/// Complex vector with no normalization requirement (an intermediate ket).
#[derive(Debug, Clone, PartialEq)]
pub struct RawVector {
    structure: HilbertStructure,
    amplitudes: CVector,
}

impl RawVector {
    pub fn new(structure: HilbertStructure, amplitudes: impl Into<CVector>) -> Result<Self> {
        let amplitudes = amplitudes.into();
        if amplitudes.len() != structure.total_dim() {
            return Err(Error::StructureMismatch(format!(
                "{} amplitudes for structure {structure} of dimension {}",
                amplitudes.len(),
                structure.total_dim()
            )));
        }
        Ok(Self {
            structure,
            amplitudes,
        })
    }

    pub fn structure(&self) -> &HilbertStructure {
        &self.structure
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Divides by the norm. Fails with `NotNormalized` on a zero vector.
    pub fn normalize(&self) -> Result<StateVector> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector {
            structure: self.structure.clone(),
            amplitudes: self.amplitudes.unscale(norm),
        })
    }
}

/// Normalized pure state over a [`HilbertStructure`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    structure: HilbertStructure,
    amplitudes: CVector,
}

impl StateVector {
    /// Builds a state, rejecting amplitude vectors whose norm is off by more
    /// than `EPS_NORM`.
    pub fn new(structure: HilbertStructure, amplitudes: impl Into<CVector>) -> Result<Self> {
        let raw = RawVector::new(structure, amplitudes)?;
        let state = StateVector {
            structure: raw.structure,
            amplitudes: raw.amplitudes,
        };
        state.validate()?;
        Ok(state)
    }

    /// Computational basis state `|multi⟩`.
    pub fn basis(structure: HilbertStructure, multi: &[usize]) -> Result<Self> {
        if multi.len() != structure.len()
            || multi.iter().zip(structure.dims()).any(|(&i, &d)| i >= d)
        {
            return Err(Error::StructureMismatch(format!(
                "basis index {multi:?} outside structure {structure}"
            )));
        }
        let mut amplitudes = CVector::zeros(structure.total_dim());
        amplitudes[structure.flatten(multi)] = Complex64::new(1.0, 0.0);
        Ok(Self {
            structure,
            amplitudes,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.amplitudes.norm();
        if (norm - 1.0).abs() > EPS_NORM || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }

    pub fn structure(&self) -> &HilbertStructure {
        &self.structure
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn to_raw(&self) -> RawVector {
        RawVector {
            structure: self.structure.clone(),
            amplitudes: self.amplitudes.clone(),
        }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            structure: self.structure.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// Representative of the ray with the largest-magnitude amplitude made
    /// real and positive. Near-ties resolve to the lowest index.
    pub fn canonical_phase(&self) -> StateVector {
        let max = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let pivot = self
            .amplitudes
            .iter()
            .find(|a| a.norm() >= max * (1.0 - 1e-8))
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        StateVector {
            structure: self.structure.clone(),
            amplitudes: self.amplitudes.map(|a| a * phase),
        }
    }

    /// Max element-wise deviation after canonicalizing both global phases.
    pub fn deviation_up_to_phase(&self, other: &StateVector) -> f64 {
        max_abs_deviation_vec(
            &self.canonical_phase().amplitudes,
            &other.canonical_phase().amplitudes,
        )
    }
}

/// Hermitian, positive, unit-trace operator over a [`HilbertStructure`].
///
/// Only the shape is checked on construction; call [`DensityOperator::validate`]
/// for the physical invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    structure: HilbertStructure,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(structure: HilbertStructure, matrix: CMatrix) -> Result<Self> {
        let n = structure.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::StructureMismatch(format!(
                "{}x{} matrix for structure {structure} of dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { structure, matrix })
    }

    pub fn validate(&self) -> Result<()> {
        let deviation = hermiticity_deviation(&self.matrix);
        if deviation > EPS_HERM {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > EPS_NORM {
            return Err(Error::BadTrace { trace });
        }
        let min_eigenvalue = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -EPS_PSD {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(())
    }

    pub fn structure(&self) -> &HilbertStructure {
        &self.structure
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ
        (&self.matrix * &self.matrix).trace().re
    }
}

/// A projector bound to one subsystem: the subject subsystem together with
/// the event on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemEvent {
    subsystem: usize,
    projector: CMatrix,
}

impl SubsystemEvent {
    pub fn new(subsystem: usize, projector: CMatrix) -> Result<Self> {
        if !projector.is_square() {
            return Err(Error::StructureMismatch(format!(
                "projector is {}x{}, not square",
                projector.nrows(),
                projector.ncols()
            )));
        }
        Ok(Self {
            subsystem,
            projector,
        })
    }

    /// Ray projector `|φ⟩⟨φ|` onto a unit vector.
    pub fn ray(subsystem: usize, phi: &StateVector) -> Result<Self> {
        if phi.structure().len() != 1 {
            return Err(Error::StructureMismatch(
                "ray projector needs a single-subsystem vector".into(),
            ));
        }
        let projector = phi.amplitudes() * phi.amplitudes().adjoint();
        Self::new(subsystem, projector)
    }

    /// Projector onto the computational basis vector `|index⟩`.
    pub fn basis(subsystem: usize, dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::StructureMismatch(format!(
                "basis index {index} outside dimension {dim}"
            )));
        }
        let mut projector = CMatrix::zeros(dim, dim);
        projector[(index, index)] = Complex64::new(1.0, 0.0);
        Self::new(subsystem, projector)
    }

    pub fn identity(subsystem: usize, dim: usize) -> Self {
        Self {
            subsystem,
            projector: CMatrix::identity(dim, dim),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let deviation = hermiticity_deviation(&self.projector);
        if deviation > EPS_HERM {
            return Err(Error::NotHermitian { deviation });
        }
        let deviation = max_abs_deviation(&(&self.projector * &self.projector), &self.projector);
        if deviation > EPS_IDEM {
            return Err(Error::NotIdempotent { deviation });
        }
        Ok(())
    }

    pub fn subsystem(&self) -> usize {
        self.subsystem
    }

    pub fn projector(&self) -> &CMatrix {
        &self.projector
    }

    pub fn dim(&self) -> usize {
        self.projector.nrows()
    }

    /// The opposite event `I - Q`.
    pub fn complement(&self) -> SubsystemEvent {
        let d = self.dim();
        SubsystemEvent {
            subsystem: self.subsystem,
            projector: CMatrix::identity(d, d) - &self.projector,
        }
    }

    /// Same projector attached to another subsystem index.
    pub fn relabel(&self, subsystem: usize) -> SubsystemEvent {
        SubsystemEvent {
            subsystem,
            projector: self.projector.clone(),
        }
    }

    pub(crate) fn check_against(&self, structure: &HilbertStructure) -> Result<()> {
        structure.check_subsystem(self.subsystem)?;
        if structure.dim(self.subsystem) != self.dim() {
            return Err(Error::StructureMismatch(format!(
                "projector of dimension {} on subsystem {} of dimension {}",
                self.dim(),
                self.subsystem + 1,
                structure.dim(self.subsystem)
            )));
        }
        Ok(())
    }
}

/// `a ⊗ b`.
pub fn tensor_product(a: &StateVector, b: &StateVector) -> StateVector {
    StateVector {
        structure: a.structure.concat(&b.structure),
        amplitudes: a.amplitudes.kronecker(&b.amplitudes),
    }
}

/// Reduced density operator over `keep`, in the subsystems' original order.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let (structure, matrix) = partial_trace_matrix(&rho.matrix, &rho.structure, keep)?;
    Ok(DensityOperator { structure, matrix })
}

/// Partial trace of an arbitrary (not necessarily Hermitian) operator.
pub fn partial_trace_matrix(
    matrix: &CMatrix,
    structure: &HilbertStructure,
    keep: &[usize],
) -> Result<(HilbertStructure, CMatrix)> {
    let n = structure.total_dim();
    if matrix.nrows() != n || matrix.ncols() != n {
        return Err(Error::StructureMismatch(format!(
            "{}x{} operator for structure {structure}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    for &k in &keep {
        structure.check_subsystem(k)?;
    }
    if keep.is_empty() || keep.len() == structure.len() {
        return Err(Error::DegenerateTrace {
            subsystems: structure.len(),
        });
    }
    let traced = structure.complement(&keep);
    let kept_offsets = structure.offsets(&keep);
    let traced_offsets = structure.offsets(&traced);
    let reduced = CMatrix::from_fn(kept_offsets.len(), kept_offsets.len(), |a, b| {
        traced_offsets
            .iter()
            .map(|&t| matrix[(kept_offsets[a] + t, kept_offsets[b] + t)])
            .sum()
    });
    Ok((structure.select(&keep)?, reduced))
}

/// Contracts the bra `⟨φ|` on `subsystem` with the ket `Ψ`, leaving a raw
/// ket over the remaining subsystems.
pub fn partial_scalar_product(
    phi: &RawVector,
    psi: &RawVector,
    subsystem: usize,
) -> Result<RawVector> {
    let structure = psi.structure();
    structure.check_subsystem(subsystem)?;
    if phi.structure().len() != 1 || phi.structure().total_dim() != structure.dim(subsystem) {
        return Err(Error::StructureMismatch(format!(
            "bra over {} cannot contract subsystem {} of {structure}",
            phi.structure(),
            subsystem + 1
        )));
    }
    if structure.len() < 2 {
        return Err(Error::StructureMismatch(
            "partial scalar product needs at least two subsystems".into(),
        ));
    }
    let rest = structure.complement(&[subsystem]);
    let rest_offsets = structure.offsets(&rest);
    let stride = structure.strides()[subsystem];
    let amplitudes = CVector::from_iterator(
        rest_offsets.len(),
        rest_offsets.iter().map(|&r| {
            phi.amplitudes()
                .iter()
                .enumerate()
                .map(|(l, p)| p.conj() * psi.amplitudes()[r + l * stride])
                .sum::<Complex64>()
        }),
    );
    RawVector::new(structure.select(&rest)?, amplitudes)
}

/// `I ⊗ … ⊗ Q ⊗ … ⊗ I` on the full space.
pub fn embed(event: &SubsystemEvent, structure: &HilbertStructure) -> Result<CMatrix> {
    event.check_against(structure)?;
    embed_local(event.projector(), event.subsystem(), structure)
}

fn embed_local(op: &CMatrix, subsystem: usize, structure: &HilbertStructure) -> Result<CMatrix> {
    let left: usize = structure.dims()[..subsystem].iter().product();
    let right: usize = structure.dims()[subsystem + 1..].iter().product();
    let left = CMatrix::identity(left, left);
    let right = CMatrix::identity(right, right);
    Ok(left.kronecker(op).kronecker(&right))
}

/// Applies a unitary to one factor of a pure state.
pub fn apply_subsystem_unitary(
    state: &StateVector,
    u: &CMatrix,
    subsystem: usize,
) -> Result<StateVector> {
    let structure = state.structure();
    structure.check_subsystem(subsystem)?;
    if !u.is_square() || u.nrows() != structure.dim(subsystem) {
        return Err(Error::StructureMismatch(format!(
            "{}x{} operator on subsystem {} of dimension {}",
            u.nrows(),
            u.ncols(),
            subsystem + 1,
            structure.dim(subsystem)
        )));
    }
    let deviation = unitarity_deviation(u);
    if deviation > EPS_UNIT {
        return Err(Error::NonUnitary { deviation });
    }
    let rest = structure.complement(&[subsystem]);
    let stride = structure.strides()[subsystem];
    let d = structure.dim(subsystem);
    let mut amplitudes = CVector::from_element(structure.total_dim(), ZERO);
    for r in structure.offsets(&rest) {
        for i in 0..d {
            amplitudes[r + i * stride] = (0..d)
                .map(|j| u[(i, j)] * state.amplitudes[r + j * stride])
                .sum();
        }
    }
    Ok(StateVector {
        structure: structure.clone(),
        amplitudes,
    })
}

pub fn max_abs_deviation(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_deviation_vec(a: &CVector, b: &CVector) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    max_abs_deviation(m, &m.adjoint())
}

pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_deviation(&(u.adjoint() * u), &CMatrix::identity(u.nrows(), u.ncols()))
}
