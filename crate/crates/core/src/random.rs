//! Seeded random states and unitaries for property checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::qmatrix::{ComplexMatrix, DensityMatrix, PureState};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_pure_state(num_qubits: usize, rng: &mut impl Rng) -> Result<PureState> {
    let amps = (0..1usize << num_qubits).map(|_| gaussian(rng)).collect();
    PureState::normalized(amps)
}

/// Mixed state `G G† / Tr(G G†)` from a square complex Ginibre matrix.
pub fn random_density(num_qubits: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let dim = 1usize << num_qubits;
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr)
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g: DMatrix<Complex64> = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let (q, r) = qr.unpack();
    // Fix the phases of R's diagonal so the distribution is Haar.
    let phases = ComplexMatrix::from_diagonal(&r.diagonal().map(|d| if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) }));
    q * phases
}

/// Random two-qubit product of pure states.
pub fn random_product_state(rng: &mut impl Rng) -> Result<DensityMatrix> {
    let a = random_pure_state(1, rng)?;
    let b = random_pure_state(1, rng)?;
    Ok(DensityMatrix::from_pure(&a.tensor(&b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::{identity, max_entry_distance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2, 4] {
            let u = random_unitary(dim, &mut rng);
            assert!(max_entry_distance(&(u.adjoint() * &u), &identity(dim)) < 1e-12);
        }
    }

    #[test]
    fn densities_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..=3 {
            let rho = random_density(n, &mut rng).unwrap();
            assert!(rho.purity() < 1.0);
        }
    }
}
