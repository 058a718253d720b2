//! Fixed-step RK4 integration of the local Lindblad master equation
//!
//! `dρ/dt = Σ_i Σ_k γ_k (J_k ρ J_k† - ½{J_k†J_k, ρ})`, with every jump
//! operator acting on qubit `i` alone.
//!
//! This is the numerical cross-check for the Kraus route and shares none of
//! its code beyond the matrix substrate.

use num_complex::Complex64;

use crate::channels::LindbladSpec;
use crate::error::{Error, Result};
use crate::qmatrix::{ComplexMatrix, DensityMatrix};

/// Upper bound on `h · (total rate of all jumps on all qubits)`.
pub const STABILITY_MARGIN: f64 = 0.01;
/// Default number of steps per unit of `γt`.
pub const STEPS_PER_GAMMA_T: f64 = 1000.0;
/// PSD floor applied to integrated states.
pub const EVOLVED_PSD_FLOOR: f64 = -1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    t_final: f64,
    steps: usize,
}

impl IntegrationConfig {
    /// Checks the step size against the total rate of `spec` lifted to
    /// `num_qubits` qubits.
    pub fn new(t_final: f64, steps: usize, spec: &LindbladSpec, num_qubits: usize) -> Result<Self> {
        if !(t_final >= 0.0) || !t_final.is_finite() {
            return Err(Error::Config(format!("t_final must be finite and nonnegative, got {t_final}")));
        }
        if steps == 0 {
            return Err(Error::Config("steps must be positive".into()));
        }
        let h = t_final / steps as f64;
        let total_rate = spec.rate_sum() * num_qubits as f64;
        if h * total_rate > STABILITY_MARGIN {
            return Err(Error::Config(format!(
                "step {h} too large for total rate {total_rate} (h·rate must be ≤ {STABILITY_MARGIN})"
            )));
        }
        Ok(Self { t_final, steps })
    }

    /// `ceil(1000 γ t_final)` steps, raised if the stability margin needs more.
    pub fn with_default_steps(t_final: f64, gamma: f64, spec: &LindbladSpec, num_qubits: usize) -> Result<Self> {
        let by_gamma = (STEPS_PER_GAMMA_T * gamma * t_final).ceil();
        let by_margin = (spec.rate_sum() * num_qubits as f64 * t_final / STABILITY_MARGIN).ceil();
        let steps = by_gamma.max(by_margin).max(1.0) as usize;
        Self::new(t_final, steps, spec, num_qubits)
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step_size(&self) -> f64 {
        self.t_final / self.steps as f64
    }
}

/// Generator of one qubit as a 4x4 matrix on the row-major vectorized 2x2
/// block `(ρ00, ρ01, ρ10, ρ11)`.
fn generator_superoperator(spec: &LindbladSpec) -> [[Complex64; 4]; 4] {
    let mut g = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (jump, rate) in spec.jumps() {
        let number = jump.adjoint() * jump;
        for (out, row) in g.iter_mut().enumerate() {
            let (a2, b2) = (out >> 1, out & 1);
            for (inp, entry) in row.iter_mut().enumerate() {
                let (a, b) = (inp >> 1, inp & 1);
                let mut v = jump[(a2, a)] * jump[(b2, b)].conj();
                if b2 == b {
                    v -= number[(a2, a)] * 0.5;
                }
                if a2 == a {
                    v -= number[(b, b2)] * 0.5;
                }
                *entry += v * *rate;
            }
        }
    }
    g
}

fn accumulate_local(out: &mut ComplexMatrix, rho: &ComplexMatrix, g: &[[Complex64; 4]; 4], num_qubits: usize, qubit: usize) {
    let mask = 1usize << (num_qubits - 1 - qubit);
    let dim = rho.nrows();
    let zero = Complex64::new(0.0, 0.0);
    for c0 in (0..dim).filter(|c| c & mask == 0) {
        let c1 = c0 | mask;
        for r0 in (0..dim).filter(|r| r & mask == 0) {
            let r1 = r0 | mask;
            let block = [rho[(r0, c0)], rho[(r0, c1)], rho[(r1, c0)], rho[(r1, c1)]];
            if block.iter().all(|z| *z == zero) {
                continue;
            }
            let d: Vec<Complex64> = g
                .iter()
                .map(|row| row.iter().zip(&block).map(|(x, y)| x * y).sum())
                .collect();
            out[(r0, c0)] += d[0];
            out[(r0, c1)] += d[1];
            out[(r1, c0)] += d[2];
            out[(r1, c1)] += d[3];
        }
    }
}

/// `dρ/dt` for the generator `spec` applied to every qubit.
pub fn lindbladian_apply(rho: &ComplexMatrix, spec: &LindbladSpec, num_qubits: usize) -> ComplexMatrix {
    let g = generator_superoperator(spec);
    let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
    for qubit in 0..num_qubits {
        accumulate_local(&mut out, rho, &g, num_qubits, qubit);
    }
    out
}

/// Advances `rho` by `config.steps()` RK4 steps of size `config.step_size()`.
pub(crate) fn integrate(mut rho: ComplexMatrix, num_qubits: usize, spec: &LindbladSpec, config: &IntegrationConfig) -> ComplexMatrix {
    if config.t_final == 0.0 {
        return rho;
    }
    let h = config.step_size();
    let (h2, h6) = (Complex64::new(h / 2.0, 0.0), Complex64::new(h / 6.0, 0.0));
    let (hc, two) = (Complex64::new(h, 0.0), Complex64::new(2.0, 0.0));
    for _ in 0..config.steps {
        let k1 = lindbladian_apply(&rho, spec, num_qubits);
        let k2 = lindbladian_apply(&(&rho + &k1 * h2), spec, num_qubits);
        let k3 = lindbladian_apply(&(&rho + &k2 * h2), spec, num_qubits);
        let k4 = lindbladian_apply(&(&rho + &k3 * hc), spec, num_qubits);
        rho += (k1 + (k2 + k3) * two + k4) * h6;
    }
    rho
}

/// RK4 trajectory without the final trace renormalization.
pub fn evolve_unnormalized(rho0: &DensityMatrix, spec: &LindbladSpec, config: &IntegrationConfig) -> ComplexMatrix {
    integrate(rho0.matrix().clone(), rho0.num_qubits(), spec, config)
}

/// Divides by the trace and validates with the relaxed PSD floor.
pub(crate) fn normalize_evolved(raw: ComplexMatrix) -> Result<DensityMatrix> {
    let trace = raw.trace();
    if !(trace.re > 0.0) || !trace.re.is_finite() {
        return Err(Error::Invariant(format!("trace {trace} after evolution")));
    }
    DensityMatrix::with_psd_floor(raw / trace, EVOLVED_PSD_FLOOR)
        .map_err(|e| Error::Invariant(format!("evolved state is not a density matrix: {e}")))
}

/// Integrates to `config.t_final`, divides by the trace, and validates the
/// result as a density matrix with a relaxed PSD floor.
pub fn evolve(rho0: &DensityMatrix, spec: &LindbladSpec, config: &IntegrationConfig) -> Result<DensityMatrix> {
    normalize_evolved(evolve_unnormalized(rho0, spec, config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{lindblad_generator, ChannelKind};
    use crate::channels::literal_noisy_generator;
    use crate::qmatrix::{apply_local_left, apply_local_right, max_entry_distance, PureState};
    use crate::states::{density_from_pure, ghz_state};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Dissipator written out with explicit lifted multiplications.
    fn lindbladian_explicit(rho: &ComplexMatrix, spec: &LindbladSpec, n: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
        for (jump, rate) in spec.jumps() {
            let jump_dag = jump.adjoint();
            let number = &jump_dag * jump;
            for q in 0..n {
                let sandwich = apply_local_left(jump, &apply_local_right(rho, &jump_dag, n, q), n, q);
                let anti = apply_local_left(&number, rho, n, q) + apply_local_right(rho, &number, n, q);
                out += (sandwich - anti * c(0.5)) * c(*rate);
            }
        }
        out
    }

    #[test]
    fn block_generator_matches_explicit_form() {
        let n = 3;
        let rho = ComplexMatrix::from_fn(8, 8, |i, j| Complex64::new((i + 2 * j) as f64 * 0.1, i as f64 - j as f64));
        let mut specs: Vec<LindbladSpec> = ChannelKind::ALL.iter().map(|k| lindblad_generator(*k, 0.9).unwrap()).collect();
        specs.push(literal_noisy_generator(0.4).unwrap());
        for spec in &specs {
            let fast = lindbladian_apply(&rho, spec, n);
            assert!(max_entry_distance(&fast, &lindbladian_explicit(&rho, spec, n)) < 1e-12);
        }
    }

    #[test]
    fn depolarizing_fixed_point() {
        let spec = lindblad_generator(ChannelKind::Noisy, 1.3).unwrap();
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let d = lindbladian_apply(rho.matrix(), &spec, 3);
        assert!(d.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn ground_state_fixed_point() {
        let spec = lindblad_generator(ChannelKind::Dissipative, 2.0).unwrap();
        let rho = DensityMatrix::from_pure(&PureState::basis(3, 0).unwrap());
        assert!(lindbladian_apply(rho.matrix(), &spec, 3).iter().all(|z| *z == c(0.0)));
    }

    #[test]
    fn excited_state_decay_rate() {
        let gamma = 0.7;
        let spec = lindblad_generator(ChannelKind::Dissipative, gamma).unwrap();
        let rho = DensityMatrix::from_pure(&PureState::basis(1, 1).unwrap());
        let d = lindbladian_apply(rho.matrix(), &spec, 1);
        let expected = ComplexMatrix::from_row_slice(2, 2, &[c(gamma), c(0.0), c(0.0), c(-gamma)]);
        assert!(max_entry_distance(&d, &expected) < 1e-15);
    }

    #[test]
    fn generator_output_is_traceless_and_hermitian() {
        let rho = density_from_pure(&ghz_state(3).unwrap());
        for kind in ChannelKind::ALL {
            let d = lindbladian_apply(rho.matrix(), &lindblad_generator(kind, 1.0).unwrap(), 3);
            assert!(d.trace().norm() < 1e-12);
            assert!(crate::qmatrix::hermitian_deviation(&d) < 1e-12);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let spec = lindblad_generator(ChannelKind::Noisy, 1.0).unwrap();
        let rho = density_from_pure(&ghz_state(2).unwrap());
        let cfg = IntegrationConfig::new(0.0, 1, &spec, 2).unwrap();
        assert!(max_entry_distance(evolve(&rho, &spec, &cfg).unwrap().matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn step_size_guard() {
        let spec = lindblad_generator(ChannelKind::Noisy, 1.0).unwrap();
        assert!(IntegrationConfig::new(1.0, 10, &spec, 4).is_err());
        assert!(IntegrationConfig::new(1.0, 0, &spec, 4).is_err());
        assert!(IntegrationConfig::new(-1.0, 10, &spec, 4).is_err());
        let cfg = IntegrationConfig::with_default_steps(2.0, 1.0, &spec, 4).unwrap();
        assert_eq!(cfg.steps(), 2000);
        let literal = crate::channels::literal_noisy_generator(1.0).unwrap();
        let cfg = IntegrationConfig::with_default_steps(1.0, 1.0, &literal, 12).unwrap();
        assert!(cfg.step_size() * 24.0 <= STABILITY_MARGIN + 1e-15);
    }

    #[test]
    fn dephasing_coherence_decays_as_root_p() {
        let gamma = 1.0;
        let t = 0.8;
        let spec = lindblad_generator(ChannelKind::Dephasing, gamma).unwrap();
        let plus = PureState::normalized(vec![c(1.0), c(1.0)]).unwrap();
        let cfg = IntegrationConfig::with_default_steps(t, gamma, &spec, 1).unwrap();
        let out = evolve(&DensityMatrix::from_pure(&plus), &spec, &cfg).unwrap();
        assert!((out.matrix()[(0, 1)].re - 0.5 * (-gamma * t / 2.0).exp()).abs() < 1e-12);
        assert!((out.matrix()[(0, 0)].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn depolarizing_shrinks_bloch_vector_uniformly() {
        let gamma = 1.0;
        let t = 0.6;
        let spec = lindblad_generator(ChannelKind::Noisy, gamma).unwrap();
        // Bloch vector (0.3, -0.2, 0.5).
        let (x, y, z) = (0.3, -0.2, 0.5);
        let rho = DensityMatrix::new(ComplexMatrix::from_row_slice(
            2,
            2,
            &[c((1.0 + z) / 2.0), Complex64::new(x / 2.0, -y / 2.0), Complex64::new(x / 2.0, y / 2.0), c((1.0 - z) / 2.0)],
        ))
        .unwrap();
        let cfg = IntegrationConfig::with_default_steps(t, gamma, &spec, 1).unwrap();
        let out = evolve(&rho, &spec, &cfg).unwrap();
        let s = (-gamma * t).exp();
        let m = out.matrix();
        assert!((2.0 * m[(0, 1)].re - s * x).abs() < 1e-12);
        assert!((-2.0 * m[(0, 1)].im - s * y).abs() < 1e-12);
        assert!((m[(0, 0)].re - m[(1, 1)].re - s * z).abs() < 1e-12);
    }
}
