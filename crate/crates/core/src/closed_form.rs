//! Analytic evolved states and global-entanglement curves.
//!
//! W states are described through their (permutation-symmetric) two-qubit
//! reduction, GHZ states through the full register matrix. Curve functions
//! take `γt`; matrix builders take `p = exp(-γt)`.

use num_complex::Complex64;

use crate::channels::{ChannelKind, DecoherenceParameter};
use crate::error::{Error, Result};
use crate::measures::GEValue;
use crate::qmatrix::{check_qubit_count, ComplexMatrix, DensityMatrix};

/// Resolution of the separation-time bisection in units of `γt`.
pub const T_SEP_RESOLUTION: f64 = 1e-9;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_pair_count(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::QubitCount {
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    Ok(())
}

/// Two-qubit reduction of an `n`-qubit W state after every qubit went
/// through the channel `kind` at parameter `p`.
pub fn w_pair_density(kind: ChannelKind, n: usize, p: DecoherenceParameter) -> Result<DensityMatrix> {
    check_pair_count(n)?;
    let nf = n as f64;
    let p = p.value();
    let mut m = ComplexMatrix::zeros(4, 4);
    match kind {
        ChannelKind::Dissipative => {
            m[(0, 0)] = real((nf - 2.0 * p) / nf);
            for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                m[(i, j)] = real(p / nf);
            }
        }
        ChannelKind::Dephasing => {
            m[(0, 0)] = real((nf - 2.0) / nf);
            m[(1, 1)] = real(1.0 / nf);
            m[(2, 2)] = real(1.0 / nf);
            m[(1, 2)] = real(p / nf);
            m[(2, 1)] = real(p / nf);
        }
        ChannelKind::Noisy => {
            let p2 = p * p;
            let singlet_part = 2.0 / nf;
            let ground_part = (nf - 2.0) / nf;
            m[(0, 0)] = real(singlet_part * (1.0 - p2) / 4.0 + ground_part * (1.0 + p) * (1.0 + p) / 4.0);
            m[(1, 1)] = real(singlet_part * (1.0 + p2) / 4.0 + ground_part * (1.0 - p2) / 4.0);
            m[(2, 2)] = m[(1, 1)];
            m[(1, 2)] = real(singlet_part * p2 / 2.0);
            m[(2, 1)] = m[(1, 2)];
            m[(3, 3)] = real(singlet_part * (1.0 - p2) / 4.0 + ground_part * (1.0 - p) * (1.0 - p) / 4.0);
        }
    }
    DensityMatrix::new(m)
}

/// Diagonal weights `λ_Z` of an evolved GHZ register, indexed by the number
/// `Z` of qubits in `|1>`. The register diagonal is `½ λ_Z` at every basis
/// state of weight `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzDiagonalCoefficients {
    kind: ChannelKind,
    p: DecoherenceParameter,
    n: usize,
    lambda: Vec<f64>,
}

impl GhzDiagonalCoefficients {
    /// Only defined for the dissipative and noisy channels.
    pub fn new(kind: ChannelKind, n: usize, p: DecoherenceParameter) -> Result<Self> {
        check_pair_count(n)?;
        let pv = p.value();
        let lambda = match kind {
            ChannelKind::Dissipative => (0..=n)
                .map(|z| {
                    // 0^0 = 1: the |0...0> branch survives only at Z = 0.
                    let ground = if z == 0 { 1.0 } else { 0.0 };
                    pv.powi(z as i32) * (1.0 - pv).powi((n - z) as i32) + ground
                })
                .collect(),
            ChannelKind::Noisy => {
                let scale = 0.5f64.powi(n as i32);
                (0..=n)
                    .map(|z| {
                        let (z, rest) = (z as i32, (n - z) as i32);
                        scale * ((1.0 + pv).powi(z) * (1.0 - pv).powi(rest) + (1.0 - pv).powi(z) * (1.0 + pv).powi(rest))
                    })
                    .collect()
            }
            ChannelKind::Dephasing => {
                return Err(Error::Config(
                    "the dephased GHZ diagonal has no λ_Z form; use ghz_density".into(),
                ))
            }
        };
        Ok(Self { kind, p, n, lambda })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn p(&self) -> DecoherenceParameter {
        self.p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn lambda(&self, weight: usize) -> f64 {
        self.lambda[weight]
    }

    /// `Σ_x λ_{Z(x)}` over all `2^N` basis strings; equals 2.
    pub fn basis_sum(&self) -> f64 {
        self.lambda
            .iter()
            .enumerate()
            .map(|(z, l)| binomial(self.n, z) * l)
            .sum()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Full register matrix of an `n`-qubit GHZ state after every qubit went
/// through `kind` at parameter `p`.
pub fn ghz_density(kind: ChannelKind, n: usize, p: DecoherenceParameter) -> Result<DensityMatrix> {
    check_qubit_count(n, 2)?;
    let dim = 1usize << n;
    let pv = p.value();
    let mut m = ComplexMatrix::zeros(dim, dim);
    let coherence = match kind {
        ChannelKind::Dephasing | ChannelKind::Dissipative => pv.powf(n as f64 / 2.0),
        ChannelKind::Noisy => pv.powi(n as i32),
    };
    m[(0, dim - 1)] = real(0.5 * coherence);
    m[(dim - 1, 0)] = real(0.5 * coherence);
    match kind {
        ChannelKind::Dephasing => {
            m[(0, 0)] = real(0.5);
            m[(dim - 1, dim - 1)] = real(0.5);
        }
        ChannelKind::Dissipative | ChannelKind::Noisy => {
            let coeffs = GhzDiagonalCoefficients::new(kind, n, p)?;
            for x in 0..dim {
                m[(x, x)] = real(0.5 * coeffs.lambda(x.count_ones() as usize));
            }
        }
    }
    // X-shaped: spectrum is the diagonal outside the {0, dim-1} corner, so the
    // invariants are checked directly instead of through a dense eigensolve.
    let corner_det = m[(0, 0)].re * m[(dim - 1, dim - 1)].re - 0.25 * coherence * coherence;
    let trace = m.trace().re;
    if (trace - 1.0).abs() > crate::qmatrix::TRACE_TOL || corner_det < -crate::qmatrix::TRACE_TOL {
        return Err(Error::Invariant(format!(
            "GHZ matrix for {kind} at p={pv}: trace {trace}, corner determinant {corner_det}"
        )));
    }
    Ok(DensityMatrix::from_cptp_output(m))
}

/// Bracket of the noisy W-state curve,
/// `4p² - √(1-p²) √(N² - (pN - 4p)²)`; entanglement vanishes once it is ≤ 0.
pub fn noisy_w_bracket(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let shifted = p * nf - 4.0 * p;
    4.0 * p * p - (1.0 - p * p).max(0.0).sqrt() * (nf * nf - shifted * shifted).max(0.0).sqrt()
}

/// Global entanglement of an `n`-qubit W state at `γt`.
pub fn w_ge_closed(kind: ChannelKind, n: usize, gamma_t: f64) -> Result<GEValue> {
    check_pair_count(n)?;
    let p = DecoherenceParameter::from_gamma_t(gamma_t)?.value();
    let nf = n as f64;
    let value = match kind {
        ChannelKind::Dissipative | ChannelKind::Dephasing => 4.0 * (nf - 1.0) / (nf * nf) * (-2.0 * gamma_t).exp(),
        ChannelKind::Noisy => {
            let b = noisy_w_bracket(n, p).max(0.0);
            (nf - 1.0) / (4.0 * nf * nf) * b * b
        }
    };
    GEValue::new(value)
}

/// `E = exp(-n γt)`, valid for any `n ≥ 2`.
pub fn ghz_ge_dephasing_closed(n: usize, gamma_t: f64) -> Result<GEValue> {
    check_pair_count(n)?;
    DecoherenceParameter::from_gamma_t(gamma_t)?;
    GEValue::new((-(n as f64) * gamma_t).exp())
}

/// Time at which the noisy W-state entanglement first reaches zero.
pub fn t_sep_noisy_w(n: usize, gamma: f64) -> Result<f64> {
    check_pair_count(n)?;
    if !(gamma > 0.0) {
        return Err(Error::Config(format!("rate must be positive, got {gamma}")));
    }
    let bracket_at = |gt: f64| noisy_w_bracket(n, (-gt).exp());
    if bracket_at(0.0) <= 0.0 {
        return Err(Error::Invariant(format!("noisy W bracket not positive at t=0 for n={n}")));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while bracket_at(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::Invariant(format!("noisy W bracket never vanishes for n={n}")));
        }
    }
    while hi - lo > T_SEP_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if bracket_at(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi / gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::{identity, max_entry_distance};
    use crate::states::{density_from_pure, ghz_state, w_state};

    fn p(v: f64) -> DecoherenceParameter {
        DecoherenceParameter::new(v).unwrap()
    }

    #[test]
    fn w_pair_at_start_is_reduced_w_state() {
        for n in [2, 3, 5, 8] {
            let exact = density_from_pure(&w_state(n).unwrap()).partial_trace(&[0, 1]).unwrap();
            for kind in ChannelKind::ALL {
                let m = w_pair_density(kind, n, p(1.0)).unwrap();
                assert!(max_entry_distance(m.matrix(), exact.matrix()) < 1e-15, "{kind} n={n}");
            }
        }
    }

    #[test]
    fn w_pair_limits() {
        let n = 6.0;
        let deph = w_pair_density(ChannelKind::Dephasing, 6, p(0.0)).unwrap();
        let diag = [(n - 2.0) / n, 1.0 / n, 1.0 / n, 0.0];
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { diag[i] } else { 0.0 };
                assert!((deph.matrix()[(i, j)].re - e).abs() < 1e-15);
            }
        }
        let noisy = w_pair_density(ChannelKind::Noisy, 6, p(0.0)).unwrap();
        assert!(max_entry_distance(noisy.matrix(), &(identity(4) * real(0.25))) < 1e-15);
    }

    #[test]
    fn ghz_density_limits() {
        for n in [2, 4, 5] {
            let ghz = density_from_pure(&ghz_state(n).unwrap());
            for kind in ChannelKind::ALL {
                let m = ghz_density(kind, n, p(1.0)).unwrap();
                assert!(max_entry_distance(m.matrix(), ghz.matrix()) < 1e-15);
            }
            let dim = 1 << n;
            let relaxed = ghz_density(ChannelKind::Dissipative, n, p(0.0)).unwrap();
            let mut ground = ComplexMatrix::zeros(dim, dim);
            ground[(0, 0)] = real(1.0);
            assert_eq!(relaxed.matrix(), &ground);
            let mixed = ghz_density(ChannelKind::Noisy, n, p(0.0)).unwrap();
            assert!(max_entry_distance(mixed.matrix(), &(identity(dim) / real(dim as f64))) < 1e-15);
        }
    }

    #[test]
    fn ghz_diagonal_sums_to_two() {
        for kind in [ChannelKind::Dissipative, ChannelKind::Noisy] {
            for n in 2..=10 {
                for i in 0..=20 {
                    let c = GhzDiagonalCoefficients::new(kind, n, p(i as f64 / 20.0)).unwrap();
                    assert!((c.basis_sum() - 2.0).abs() < 1e-12);
                    assert!((0..=n).all(|z| c.lambda(z) >= 0.0));
                }
            }
        }
        assert!(GhzDiagonalCoefficients::new(ChannelKind::Dephasing, 4, p(0.5)).is_err());
    }

    #[test]
    fn closed_outputs_are_density_matrices() {
        for kind in ChannelKind::ALL {
            for i in 0..=20 {
                let pv = p(i as f64 * 0.05);
                for n in [2, 3, 4, 7] {
                    let pair = w_pair_density(kind, n, pv).unwrap();
                    DensityMatrix::new(pair.into_matrix()).unwrap();
                }
                for n in [2, 4, 6] {
                    let g = ghz_density(kind, n, pv).unwrap();
                    DensityMatrix::new(g.into_matrix()).unwrap();
                }
            }
        }
    }

    #[test]
    fn w_curve_examples() {
        assert!((w_ge_closed(ChannelKind::Dephasing, 2, 0.0).unwrap().value() - 1.0).abs() < 1e-15);
        for n in 2..=20 {
            let nf = n as f64;
            let start = 4.0 * (nf - 1.0) / (nf * nf);
            let noisy = w_ge_closed(ChannelKind::Noisy, n, 0.0).unwrap().value();
            let deph = w_ge_closed(ChannelKind::Dephasing, n, 0.0).unwrap().value();
            assert!((noisy - start).abs() < 1e-14 && (deph - start).abs() < 1e-15, "n={n}");
        }
        assert_eq!(w_ge_closed(ChannelKind::Noisy, 4, 10.0).unwrap().value(), 0.0);
        assert!(w_ge_closed(ChannelKind::Noisy, 4, -1.0).is_err());
    }

    #[test]
    fn ghz_dephasing_curve() {
        assert_eq!(ghz_ge_dephasing_closed(2, 0.0).unwrap().value(), 1.0);
        let gt = 0.37;
        assert!((ghz_ge_dephasing_closed(4, gt).unwrap().value() - (-4.0 * gt).exp()).abs() < 1e-16);
    }

    #[test]
    fn separation_time_is_a_root() {
        for n in 2..=14 {
            for gamma in [0.5, 1.0, 3.0] {
                let t = t_sep_noisy_w(n, gamma).unwrap();
                assert!(t > 0.0 && t.is_finite());
                let gt = gamma * t;
                assert!(noisy_w_bracket(n, (-gt).exp()) <= 0.0);
                assert!(noisy_w_bracket(n, (-(gt - 2.0 * T_SEP_RESOLUTION)).exp()) > 0.0);
                assert!(w_ge_closed(ChannelKind::Noisy, n, gt).unwrap().value() <= 1e-16);
            }
        }
        assert!(t_sep_noisy_w(4, 0.0).is_err());
    }

    #[test]
    fn two_qubit_separation_time_closed_form() {
        // n = 2 bracket: 4p² - 2(1 - p²) vanishes at p² = 1/3.
        let t = t_sep_noisy_w(2, 1.0).unwrap();
        assert!((t - 0.5 * 3f64.ln()).abs() < 2e-9);
    }
}
