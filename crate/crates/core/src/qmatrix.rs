//! Dense complex matrices, register states and the linear algebra the rest of
//! the crate is built on.
//!
//! Basis convention: qubit 0 is the most significant bit of a basis label, so
//! `|q0 q1 ... q(N-1)>` has index `q0 * 2^(N-1) + ... + q(N-1)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Largest register for which full matrices are built.
pub const MAX_QUBITS: usize = 12;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_FLOOR: f64 = -1e-10;
pub const NORM_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    let i = Complex64::i();
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Lowering operator `|0><1|`; `|0>` is the ground state.
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
}

/// Raising operator `|1><0|`.
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(ar * br, ac * bc, |row, col| {
        a[(row / br, col / bc)] * b[(row % br, col % bc)]
    })
}

/// `m ⊗ m ⊗ ... ⊗ m` with `copies` factors.
pub fn tensor_power(m: &ComplexMatrix, copies: usize) -> ComplexMatrix {
    (1..copies).fold(m.clone(), |acc, _| tensor_product(&acc, m))
}

/// Largest `|m[i,j] - conj(m[j,i])|`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm()
}

pub fn max_entry_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Real spectrum of a Hermitian matrix, largest first.
pub fn eigenvalues_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_square(m)?;
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = nalgebra::linalg::SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or(Error::EigenConvergence(m.nrows()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// All eigenvalues of a general square matrix, in no particular order.
pub fn eigenvalues_general(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    check_square(m)?;
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 0)
        .ok_or(Error::EigenConvergence(m.nrows()))?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "expected a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "dimension {dim} is not 2^N for N >= 1"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    check_qubit_count(n, 1)?;
    Ok(n)
}

pub(crate) fn check_qubit_count(n: usize, min: usize) -> Result<()> {
    if n < min || n > MAX_QUBITS {
        return Err(Error::QubitCount {
            n,
            min,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Bit mask selecting `qubit` in an `num_qubits`-qubit basis label.
#[inline]
pub(crate) fn qubit_mask(num_qubits: usize, qubit: usize) -> usize {
    1 << (num_qubits - 1 - qubit)
}

/// `(I ⊗ .. ⊗ op ⊗ .. ⊗ I) · m` for a 2x2 `op` acting on `qubit`.
pub fn apply_local_left(op: &ComplexMatrix, m: &ComplexMatrix, num_qubits: usize, qubit: usize) -> ComplexMatrix {
    let mask = qubit_mask(num_qubits, qubit);
    let dim = m.nrows();
    let (o00, o01, o10, o11) = (op[(0, 0)], op[(0, 1)], op[(1, 0)], op[(1, 1)]);
    let mut out = ComplexMatrix::zeros(dim, m.ncols());
    for col in 0..m.ncols() {
        for r0 in (0..dim).filter(|r| r & mask == 0) {
            let r1 = r0 | mask;
            let (a, b) = (m[(r0, col)], m[(r1, col)]);
            out[(r0, col)] = o00 * a + o01 * b;
            out[(r1, col)] = o10 * a + o11 * b;
        }
    }
    out
}

/// `m · (I ⊗ .. ⊗ op ⊗ .. ⊗ I)` for a 2x2 `op` acting on `qubit`.
pub fn apply_local_right(m: &ComplexMatrix, op: &ComplexMatrix, num_qubits: usize, qubit: usize) -> ComplexMatrix {
    let mask = qubit_mask(num_qubits, qubit);
    let dim = m.ncols();
    let (o00, o01, o10, o11) = (op[(0, 0)], op[(0, 1)], op[(1, 0)], op[(1, 1)]);
    let mut out = ComplexMatrix::zeros(m.nrows(), dim);
    for c0 in (0..dim).filter(|c| c & mask == 0) {
        let c1 = c0 | mask;
        for row in 0..m.nrows() {
            let (a, b) = (m[(row, c0)], m[(row, c1)]);
            out[(row, c0)] = a * o00 + b * o10;
            out[(row, c1)] = a * o01 + b * o11;
        }
    }
    out
}

/// Unit-norm state vector of an N-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len())?;
        let amplitudes = DVector::from_vec(amplitudes);
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "squared norm {norm_sq} differs from 1"
            )));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Computational basis state with label `index`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(num_qubits, 1)?;
        let dim = 1 << num_qubits;
        if index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self::new(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// `|self> ⊗ |other>`.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        PureState::normalized(amps)
    }
}

/// Hermitian, unit-trace, positive-semidefinite state of an N-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every density-matrix invariant with the default PSD floor.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_psd_floor(matrix, PSD_FLOOR)
    }

    pub fn with_psd_floor(matrix: ComplexMatrix, psd_floor: f64) -> Result<Self> {
        check_square(&matrix)?;
        let num_qubits = qubits_for_dim(matrix.nrows())?;
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let min_eig = eigenvalues_hermitian(&matrix)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min_eig < psd_floor {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { num_qubits, matrix })
    }

    /// Wraps a matrix produced by a completely positive trace-preserving map
    /// of a valid state. Only the shape is checked.
    pub(crate) fn from_cptp_output(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.nrows() == matrix.ncols() && matrix.nrows().is_power_of_two());
        let num_qubits = matrix.nrows().trailing_zeros() as usize;
        Self { num_qubits, matrix }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let amps = psi.amplitudes();
        Self {
            num_qubits: psi.num_qubits(),
            matrix: amps * amps.adjoint(),
        }
    }

    /// `I / 2^N`.
    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits, 1)?;
        let dim = 1 << num_qubits;
        Ok(Self {
            num_qubits,
            matrix: identity(dim) / Complex64::new(dim as f64, 0.0),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
        self.matrix.norm_squared()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        check_qubit_count(self.num_qubits + other.num_qubits, 1)?;
        Ok(Self {
            num_qubits: self.num_qubits + other.num_qubits,
            matrix: tensor_product(&self.matrix, &other.matrix),
        })
    }

    /// Reduced state on `keep`; output qubit `k` is input qubit `keep[k]`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.num_qubits;
        if keep.is_empty() {
            return Err(Error::InvalidState("partial trace must keep at least one qubit".into()));
        }
        for (pos, &q) in keep.iter().enumerate() {
            if q >= n {
                return Err(Error::QubitIndex {
                    index: q,
                    num_qubits: n,
                });
            }
            if keep[..pos].contains(&q) {
                return Err(Error::InvalidState(format!("qubit {q} listed twice")));
            }
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let keep_masks: Vec<usize> = keep.iter().map(|&q| qubit_mask(n, q)).collect();
        let traced_masks: Vec<usize> = traced.iter().map(|&q| qubit_mask(n, q)).collect();

        // Maps a local label over `masks` (first mask = most significant) to a
        // full-register bit pattern.
        let scatter = |label: usize, masks: &[usize]| -> usize {
            let k = masks.len();
            masks
                .iter()
                .enumerate()
                .filter(|(pos, _)| label >> (k - 1 - pos) & 1 == 1)
                .fold(0, |acc, (_, m)| acc | m)
        };

        let kept_dim = 1 << keep.len();
        let kept_bits: Vec<usize> = (0..kept_dim).map(|l| scatter(l, &keep_masks)).collect();
        let traced_bits: Vec<usize> = (0..1usize << traced.len())
            .map(|l| scatter(l, &traced_masks))
            .collect();

        let matrix = ComplexMatrix::from_fn(kept_dim, kept_dim, |a, b| {
            traced_bits
                .iter()
                .map(|&e| self.matrix[(kept_bits[a] | e, kept_bits[b] | e)])
                .sum()
        });
        Ok(Self {
            num_qubits: keep.len(),
            matrix,
        })
    }

    /// Single-qubit marginal of `qubit`.
    pub fn single_qubit_reduction(&self, qubit: usize) -> Result<DensityMatrix> {
        self.partial_trace(&[qubit])
    }

    /// Smallest eigenvalue; dense and O(dim³).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eigenvalues_hermitian(&self.matrix)?
            .last()
            .copied()
            .unwrap_or(0.0))
    }
}
