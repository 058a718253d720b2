//! The two initial register states: GHZ and W.

use num_complex::Complex64;

use crate::error::Result;
use crate::qmatrix::{check_qubit_count, DensityMatrix, PureState};

/// `(|0...0> + |1...1>) / √2`.
pub fn ghz_state(n: usize) -> Result<PureState> {
    check_qubit_count(n, 2)?;
    let dim = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[0] = h;
    amps[dim - 1] = h;
    PureState::new(amps)
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn w_state(n: usize) -> Result<PureState> {
    check_qubit_count(n, 2)?;
    let dim = 1usize << n;
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let amps = (0..dim)
        .map(|i| {
            if i.count_ones() == 1 {
                amp
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    PureState::new(amps)
}

/// `|ψ><ψ|`.
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    DensityMatrix::from_pure(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::{identity, max_entry_distance, ComplexMatrix};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn re(v: &PureState) -> Vec<f64> {
        v.amplitudes().iter().map(|a| a.re).collect()
    }

    #[test]
    fn ghz_two_qubits_is_bell_state() {
        assert_eq!(re(&ghz_state(2).unwrap()), vec![H, 0.0, 0.0, H]);
    }

    #[test]
    fn ghz_three_qubits() {
        let g = re(&ghz_state(3).unwrap());
        for (i, a) in g.iter().enumerate() {
            assert_eq!(*a, if i == 0 || i == 7 { H } else { 0.0 });
        }
    }

    #[test]
    fn w_two_qubits_is_psi_plus() {
        let w = re(&w_state(2).unwrap());
        assert!((w[1] - H).abs() < 1e-15 && (w[2] - H).abs() < 1e-15);
        assert_eq!((w[0], w[3]), (0.0, 0.0));
    }

    #[test]
    fn w_four_qubits() {
        let w = re(&w_state(4).unwrap());
        for (i, a) in w.iter().enumerate() {
            let expected = if [1, 2, 4, 8].contains(&i) { 0.5 } else { 0.0 };
            assert_eq!(*a, expected);
        }
    }

    #[test]
    fn out_of_range_sizes() {
        assert!(ghz_state(1).is_err());
        assert!(w_state(13).is_err());
    }

    #[test]
    fn norms_are_exact() {
        for n in 2..=12 {
            for psi in [ghz_state(n).unwrap(), w_state(n).unwrap()] {
                assert!((psi.amplitudes().norm_squared() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ground_state_projector() {
        let rho = density_from_pure(&PureState::basis(1, 0).unwrap());
        assert_eq!(rho.matrix()[(0, 0)].re, 1.0);
        assert_eq!(rho.matrix()[(1, 1)].re, 0.0);
    }

    #[test]
    fn psi_plus_projector() {
        let rho = density_from_pure(&w_state(2).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (1..=2).contains(&i) && (1..=2).contains(&j) { 0.5 } else { 0.0 };
                assert!((rho.matrix()[(i, j)].re - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pure_projectors_have_unit_purity() {
        assert!((density_from_pure(&w_state(4).unwrap()).purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginals() {
        for n in 2..=8 {
            let w = density_from_pure(&w_state(n).unwrap());
            let g = density_from_pure(&ghz_state(n).unwrap());
            let nf = n as f64;
            let w_marginal = ComplexMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new((nf - 1.0) / nf, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(1.0 / nf, 0.0),
                ],
            );
            let half = identity(2) * Complex64::new(0.5, 0.0);
            for q in 0..n {
                let wq = w.single_qubit_reduction(q).unwrap();
                assert!(max_entry_distance(wq.matrix(), &w_marginal) < 1e-14);
                let gq = g.single_qubit_reduction(q).unwrap();
                assert!(max_entry_distance(gq.matrix(), &half) < 1e-15);
            }
        }
    }
}
