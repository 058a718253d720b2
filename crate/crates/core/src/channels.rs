//! Single-qubit decoherence channels.
//!
//! Each channel is parameterized by `p = exp(-γt)`: `p = 1` is the identity
//! and `p = 0` the fully decohered limit. The Kraus sets used here are
//!
//! * dissipative (amplitude damping): `diag(1, √p)`, `√(1-p) |0><1|`
//! * dephasing (phase damping): `diag(1, √p)`, `diag(0, √(1-p))`
//! * noisy (depolarizing): `√((1+3p)/4) I`, `√((1-p)/4) σx,y,z`
//!
//! and the matching Lindblad generators are `σ-` at rate γ, `σ+σ- = |1><1|`
//! at rate γ, and the three Paulis at rate γ/4 each.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmatrix::{
    identity, pauli_x, pauli_y, pauli_z, qubit_mask, sigma_minus, sigma_plus, ComplexMatrix,
    DensityMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelKind {
    Dissipative,
    Dephasing,
    Noisy,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [ChannelKind::Dissipative, ChannelKind::Dephasing, ChannelKind::Noisy];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::Dissipative => "dissipative",
            ChannelKind::Dephasing => "dephasing",
            ChannelKind::Noisy => "noisy",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dissipative" => Ok(ChannelKind::Dissipative),
            "dephasing" => Ok(ChannelKind::Dephasing),
            "noisy" => Ok(ChannelKind::Noisy),
            other => Err(Error::Config(format!(
                "unknown channel '{other}' (expected dissipative, dephasing or noisy)"
            ))),
        }
    }
}

/// Decoherence parameter `p ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DecoherenceParameter(f64);

impl DecoherenceParameter {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(p));
        }
        Ok(Self(p))
    }

    /// `p = exp(-γt)` from a rate and a time.
    pub fn from_rate_time(gamma: f64, t: f64) -> Result<Self> {
        if gamma < 0.0 {
            return Err(Error::NegativeRate(gamma));
        }
        if t < 0.0 {
            return Err(Error::Config(format!("time must be nonnegative, got {t}")));
        }
        Self::from_gamma_t(gamma * t)
    }

    /// `p = exp(-γt)` from the dimensionless product `γt`.
    pub fn from_gamma_t(gamma_t: f64) -> Result<Self> {
        if !(gamma_t >= 0.0) {
            return Err(Error::Config(format!("γt must be nonnegative, got {gamma_t}")));
        }
        Ok(Self((-gamma_t).exp()))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Kraus representation of one single-qubit channel at fixed `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleQubitKraus {
    kind: ChannelKind,
    p: DecoherenceParameter,
    operators: Vec<ComplexMatrix>,
}

impl SingleQubitKraus {
    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn p(&self) -> DecoherenceParameter {
        self.p
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Largest entry of `Σ K†K - I`.
    pub fn completeness_error(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(2, 2), |acc, k| acc + k.adjoint() * k);
        (sum - identity(2)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Channel action on a single-qubit density matrix.
    pub fn apply_single(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(2, 2), |acc, k| acc + k * rho * k.adjoint())
    }

    /// 4x4 superoperator acting on the row-major vectorized 2x2 block:
    /// `S[(a',b'),(a,b)] = Σ_m K_m[a',a] conj(K_m[b',b])`.
    fn superoperator(&self) -> [[Complex64; 4]; 4] {
        let mut s = [[Complex64::new(0.0, 0.0); 4]; 4];
        for k in &self.operators {
            for (out, row) in s.iter_mut().enumerate() {
                let (a2, b2) = (out >> 1, out & 1);
                for (inp, entry) in row.iter_mut().enumerate() {
                    let (a, b) = (inp >> 1, inp & 1);
                    *entry += k[(a2, a)] * k[(b2, b)].conj();
                }
            }
        }
        s
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn diag2(a: f64, b: f64) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[real(a), real(0.0), real(0.0), real(b)])
}

pub fn kraus_for(kind: ChannelKind, p: DecoherenceParameter) -> SingleQubitKraus {
    let pv = p.value();
    let operators = match kind {
        ChannelKind::Dissipative => vec![diag2(1.0, pv.sqrt()), sigma_minus() * real((1.0 - pv).sqrt())],
        ChannelKind::Dephasing => vec![diag2(1.0, pv.sqrt()), diag2(0.0, (1.0 - pv).sqrt())],
        ChannelKind::Noisy => {
            let w = real(((1.0 - pv) / 4.0).sqrt());
            vec![
                identity(2) * real(((1.0 + 3.0 * pv) / 4.0).sqrt()),
                pauli_x() * w,
                pauli_y() * w,
                pauli_z() * w,
            ]
        }
    };
    SingleQubitKraus { kind, p, operators }
}

/// Applies `k` to `qubit` of `rho`, identity elsewhere.
pub fn apply_local_channel(rho: &DensityMatrix, k: &SingleQubitKraus, qubit: usize) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    if qubit >= n {
        return Err(Error::QubitIndex {
            index: qubit,
            num_qubits: n,
        });
    }
    let mut out = rho.matrix().clone();
    apply_superoperator_in_place(&mut out, &k.superoperator(), n, qubit);
    Ok(DensityMatrix::from_cptp_output(out))
}

/// Applies `k` to every qubit of `rho`.
pub fn apply_uniform_channel(rho: &DensityMatrix, k: &SingleQubitKraus) -> DensityMatrix {
    let n = rho.num_qubits();
    let s = k.superoperator();
    let mut out = rho.matrix().clone();
    for qubit in 0..n {
        apply_superoperator_in_place(&mut out, &s, n, qubit);
    }
    DensityMatrix::from_cptp_output(out)
}

fn apply_superoperator_in_place(m: &mut ComplexMatrix, s: &[[Complex64; 4]; 4], num_qubits: usize, qubit: usize) {
    let mask = qubit_mask(num_qubits, qubit);
    let dim = m.nrows();
    let zero = Complex64::new(0.0, 0.0);
    for c0 in (0..dim).filter(|c| c & mask == 0) {
        let c1 = c0 | mask;
        for r0 in (0..dim).filter(|r| r & mask == 0) {
            let r1 = r0 | mask;
            let block = [m[(r0, c0)], m[(r0, c1)], m[(r1, c0)], m[(r1, c1)]];
            // Exact zeros stay zero; GHZ-type states are mostly empty.
            if block.iter().all(|z| *z == zero) {
                continue;
            }
            let mut next = [zero; 4];
            for (o, row) in next.iter_mut().zip(s.iter()) {
                *o = row.iter().zip(block.iter()).map(|(a, b)| a * b).sum();
            }
            m[(r0, c0)] = next[0];
            m[(r0, c1)] = next[1];
            m[(r1, c0)] = next[2];
            m[(r1, c1)] = next[3];
        }
    }
}

/// Local Lindblad generator: jump operators with nonnegative rates, applied
/// identically to every qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSpec {
    jumps: Vec<(ComplexMatrix, f64)>,
}

impl LindbladSpec {
    pub fn new(jumps: Vec<(ComplexMatrix, f64)>) -> Result<Self> {
        for (op, rate) in &jumps {
            if op.shape() != (2, 2) {
                return Err(Error::Dimension(format!(
                    "jump operators must be 2x2, got {}x{}",
                    op.nrows(),
                    op.ncols()
                )));
            }
            if !(*rate >= 0.0) {
                return Err(Error::NegativeRate(*rate));
            }
        }
        Ok(Self { jumps })
    }

    pub fn jumps(&self) -> &[(ComplexMatrix, f64)] {
        &self.jumps
    }

    /// Sum of the rates on one qubit.
    pub fn rate_sum(&self) -> f64 {
        self.jumps.iter().map(|(_, r)| r).sum()
    }
}

pub fn lindblad_generator(kind: ChannelKind, gamma: f64) -> Result<LindbladSpec> {
    if !(gamma >= 0.0) {
        return Err(Error::NegativeRate(gamma));
    }
    let jumps = match kind {
        ChannelKind::Dissipative => vec![(sigma_minus(), gamma)],
        ChannelKind::Dephasing => vec![(sigma_plus() * sigma_minus(), gamma)],
        ChannelKind::Noisy => vec![
            (pauli_x(), gamma / 4.0),
            (pauli_y(), gamma / 4.0),
            (pauli_z(), gamma / 4.0),
        ],
    };
    LindbladSpec::new(jumps)
}

/// Noisy generator with jump operators `σ-` and `σ+` at rate γ each.
///
/// Relaxes populations at `2γ` while coherences decay at `γ`, so it does not
/// shrink the Bloch vector uniformly. Kept for comparison runs only; the
/// `Noisy` kind everywhere else is the depolarizing generator.
pub fn literal_noisy_generator(gamma: f64) -> Result<LindbladSpec> {
    if !(gamma >= 0.0) {
        return Err(Error::NegativeRate(gamma));
    }
    LindbladSpec::new(vec![(sigma_minus(), gamma), (sigma_plus(), gamma)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::max_entry_distance;
    use crate::states::{density_from_pure, w_state};

    fn p(v: f64) -> DecoherenceParameter {
        DecoherenceParameter::new(v).unwrap()
    }

    fn single(m: [f64; 4]) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_row_slice(2, 2, &m.map(real))).unwrap()
    }

    #[test]
    fn parameter_range() {
        assert!(DecoherenceParameter::new(-0.1).is_err());
        assert!(DecoherenceParameter::new(1.1).is_err());
        assert!(DecoherenceParameter::new(f64::NAN).is_err());
        assert!(DecoherenceParameter::from_rate_time(-1.0, 1.0).is_err());
        let q = DecoherenceParameter::from_rate_time(2.0, 0.5).unwrap();
        assert!((q.value() - (-1.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn completeness_on_grid() {
        for kind in ChannelKind::ALL {
            for i in 0..=10 {
                let k = kraus_for(kind, p(i as f64 / 10.0));
                assert!(k.completeness_error() < 1e-12, "{kind} p={}", i as f64 / 10.0);
            }
        }
    }

    #[test]
    fn unit_parameter_is_identity() {
        let rho = density_from_pure(&w_state(3).unwrap());
        for kind in ChannelKind::ALL {
            let out = apply_uniform_channel(&rho, &kraus_for(kind, p(1.0)));
            assert!(max_entry_distance(out.matrix(), rho.matrix()) < 1e-15);
        }
    }

    #[test]
    fn full_relaxation_to_ground_state() {
        let out = apply_local_channel(&single([0.0, 0.0, 0.0, 1.0]), &kraus_for(ChannelKind::Dissipative, p(0.0)), 0).unwrap();
        assert!(max_entry_distance(out.matrix(), single([1.0, 0.0, 0.0, 0.0]).matrix()) < 1e-15);
    }

    #[test]
    fn noisy_zero_is_completely_mixing() {
        let rho = DensityMatrix::new(ComplexMatrix::from_row_slice(
            2,
            2,
            &[real(0.8), Complex64::new(0.2, -0.3), Complex64::new(0.2, 0.3), real(0.2)],
        ))
        .unwrap();
        let out = apply_local_channel(&rho, &kraus_for(ChannelKind::Noisy, p(0.0)), 0).unwrap();
        assert!(max_entry_distance(out.matrix(), &(identity(2) * real(0.5))) < 1e-15);
    }

    #[test]
    fn dephasing_one_qubit_of_psi_plus() {
        let rho = density_from_pure(&w_state(2).unwrap());
        let pv = 0.36;
        let out = apply_local_channel(&rho, &kraus_for(ChannelKind::Dephasing, p(pv)), 0).unwrap();
        let mut expected = rho.matrix().clone();
        expected[(1, 2)] *= pv.sqrt();
        expected[(2, 1)] *= pv.sqrt();
        assert!(max_entry_distance(out.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn local_channel_rejects_bad_qubit() {
        let rho = density_from_pure(&w_state(2).unwrap());
        assert!(apply_local_channel(&rho, &kraus_for(ChannelKind::Noisy, p(0.5)), 2).is_err());
    }

    #[test]
    fn generators() {
        let g = lindblad_generator(ChannelKind::Dephasing, 1.5).unwrap();
        assert_eq!(g.jumps().len(), 1);
        assert_eq!(g.jumps()[0].0, diag2(0.0, 1.0));
        assert_eq!(lindblad_generator(ChannelKind::Noisy, 2.0).unwrap().rate_sum(), 1.5);
        assert!(lindblad_generator(ChannelKind::Dissipative, -1.0).is_err());
        assert!(literal_noisy_generator(-1.0).is_err());
        assert!(LindbladSpec::new(vec![(identity(4), 1.0)]).is_err());
    }

    #[test]
    fn channel_kind_round_trip() {
        for kind in ChannelKind::ALL {
            assert_eq!(kind.as_str().parse::<ChannelKind>().unwrap(), kind);
        }
        assert!("thermal".parse::<ChannelKind>().is_err());
    }
}
