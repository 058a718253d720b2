//! Entanglement measures: the Meyer-Wallach global entanglement of pure
//! states, Wootters concurrence, the even-N N-concurrence, and the two tangle
//! routes to global entanglement of mixed states.

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmatrix::{ComplexMatrix, DensityMatrix, PureState};

/// Slack allowed outside `[0, 1]` for a global entanglement value.
pub const GE_SLACK: f64 = 1e-10;

/// Global entanglement value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GEValue(f64);

impl GEValue {
    pub fn new(value: f64) -> Result<Self> {
        if !(-GE_SLACK..=1.0 + GE_SLACK).contains(&value) {
            return Err(Error::Invariant(format!(
                "global entanglement {value} outside [0, 1]"
            )));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Split of the `N` bits of a pure register into local and non-local parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InformationBudget {
    pub i_total: f64,
    pub i_local: f64,
    pub i_nonlocal: f64,
}

fn marginal_purities(psi: &PureState) -> Result<Vec<f64>> {
    let rho = DensityMatrix::from_pure(psi);
    (0..psi.num_qubits())
        .map(|q| Ok(rho.single_qubit_reduction(q)?.purity()))
        .collect()
}

/// `E = (2/N) Σ_i (1 - Tr ρ_i²)`, defined for pure states only.
pub fn mw_global_entanglement(psi: &PureState) -> Result<GEValue> {
    let n = psi.num_qubits();
    if n < 2 {
        return Err(Error::QubitCount {
            n,
            min: 2,
            max: crate::qmatrix::MAX_QUBITS,
        });
    }
    let nonlocal: f64 = marginal_purities(psi)?.iter().map(|tr| 2.0 * (1.0 - tr)).sum();
    GEValue::new(nonlocal / n as f64)
}

pub fn information_budget(psi: &PureState) -> Result<InformationBudget> {
    let purities = marginal_purities(psi)?;
    Ok(InformationBudget {
        i_total: psi.num_qubits() as f64,
        i_local: purities.iter().map(|tr| 2.0 * tr - 1.0).sum(),
        i_nonlocal: purities.iter().map(|tr| 2.0 * (1.0 - tr)).sum(),
    })
}

/// Spin-flipped state `σy^{⊗N} ρ* σy^{⊗N}`.
///
/// `σy^{⊗N}` maps `|x>` to `i^N (-1)^{|x|} |x̄>`, so entrywise
/// `ρ̃[a,b] = (-1)^{|a|+|b|} conj(ρ[ā, b̄])`.
pub fn spin_flip(rho: &ComplexMatrix) -> ComplexMatrix {
    let dim = rho.nrows();
    let all = dim - 1;
    ComplexMatrix::from_fn(dim, dim, |a, b| {
        let v = rho[(a ^ all, b ^ all)].conj();
        if (a.count_ones() + b.count_ones()) % 2 == 0 {
            v
        } else {
            -v
        }
    })
}

/// Index sets on which `ρ ρ̃` is block diagonal: the connected components of
/// the graph joining `i~j` when `ρ[i,j] ≠ 0` and `x~x̄`.
fn flip_invariant_blocks(rho: &ComplexMatrix) -> Vec<Vec<usize>> {
    let dim = rho.nrows();
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };
    for i in 0..dim {
        union(&mut parent, i, i ^ (dim - 1));
        for j in (i + 1)..dim {
            if rho[(i, j)] != Complex64::new(0.0, 0.0) || rho[(j, i)] != Complex64::new(0.0, 0.0) {
                union(&mut parent, i, j);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; dim];
    for i in 0..dim {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

/// Eigenvalues of `ρ` below this fraction of the largest are treated as zero
/// when forming `√ρ`.
pub const SQRT_CLAMP: f64 = 1e-14;

/// `√ρ` restricted to one index block, from its Hermitian eigendecomposition.
fn block_sqrt(sub: ComplexMatrix) -> Result<ComplexMatrix> {
    let k = sub.nrows();
    let sym = (&sub + sub.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or(Error::EigenConvergence(k))?;
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let roots = eig
        .eigenvalues
        .map(|v| if v > SQRT_CLAMP * top { Complex64::new(v.sqrt(), 0.0) } else { Complex64::new(0.0, 0.0) });
    let u = &eig.eigenvectors;
    Ok(u * ComplexMatrix::from_diagonal(&roots) * u.adjoint())
}

/// Square roots of the eigenvalues of `ρ ρ̃`, largest first.
///
/// Computed as the singular values of `√ρ √ρ̃` (with `√ρ̃` the spin flip of
/// `√ρ`), which stay accurate near zero where square roots of the `ρ ρ̃`
/// spectrum would amplify roundoff.
pub fn flip_spectrum_roots(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let m = rho.matrix();
    let dim = m.nrows();
    let blocks = flip_invariant_blocks(m);
    let mut sqrt_rho = ComplexMatrix::zeros(dim, dim);
    for block in &blocks {
        let k = block.len();
        let s = block_sqrt(ComplexMatrix::from_fn(k, k, |i, j| m[(block[i], block[j])]))?;
        for (i, &bi) in block.iter().enumerate() {
            for (j, &bj) in block.iter().enumerate() {
                sqrt_rho[(bi, bj)] = s[(i, j)];
            }
        }
    }
    let flipped = spin_flip(&sqrt_rho);
    let mut roots = Vec::with_capacity(dim);
    for block in &blocks {
        let k = block.len();
        let a = ComplexMatrix::from_fn(k, k, |i, j| sqrt_rho[(block[i], block[j])]);
        let b = ComplexMatrix::from_fn(k, k, |i, j| flipped[(block[i], block[j])]);
        let svd = (a * b)
            .try_svd(false, false, f64::EPSILON, 0)
            .ok_or(Error::EigenConvergence(k))?;
        roots.extend(svd.singular_values.iter().copied());
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok(roots)
}

fn concurrence_from_roots(roots: &[f64]) -> f64 {
    match roots.split_first() {
        Some((first, rest)) => (first - rest.iter().sum::<f64>()).max(0.0),
        None => 0.0,
    }
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence_2q(rho: &DensityMatrix) -> Result<f64> {
    if rho.num_qubits() != 2 {
        return Err(Error::Dimension(format!(
            "concurrence needs a 2-qubit state, got {} qubits",
            rho.num_qubits()
        )));
    }
    Ok(concurrence_from_roots(&flip_spectrum_roots(rho)?))
}

/// N-concurrence `C_N = max(λ1 - Σ_{i≥2} λi, 0)` for an even number of qubits.
pub fn n_concurrence(rho: &DensityMatrix) -> Result<f64> {
    let n = rho.num_qubits();
    if n % 2 == 1 {
        return Err(Error::OddQubitCount(n));
    }
    Ok(concurrence_from_roots(&flip_spectrum_roots(rho)?))
}

/// W-type states: `E = (N - 1) C(ρ_pair)²` from any two-qubit reduction.
pub fn ge_w_tangle_route(rho_pair: &DensityMatrix, n_total: usize) -> Result<GEValue> {
    if n_total < 2 {
        return Err(Error::QubitCount {
            n: n_total,
            min: 2,
            max: usize::MAX,
        });
    }
    let c = concurrence_2q(rho_pair)?;
    GEValue::new((n_total - 1) as f64 * c * c)
}

/// GHZ-type states: `E = C_N²`.
pub fn ge_ghz_tangle_route(rho: &DensityMatrix) -> Result<GEValue> {
    let c = n_concurrence(rho)?;
    GEValue::new(c * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::{eigenvalues_general, max_entry_distance, pauli_y, tensor_power};
    use crate::states::{density_from_pure, ghz_state, w_state};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn spin_flip_matches_explicit_kronecker_power() {
        for n in 1..=4 {
            let dim = 1 << n;
            let m = ComplexMatrix::from_fn(dim, dim, |i, j| Complex64::new((i * dim + j) as f64, i as f64 - 2.0 * j as f64));
            let y = tensor_power(&pauli_y(), n);
            let brute = &y * m.conjugate() * &y;
            assert!(max_entry_distance(&spin_flip(&m), &brute) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn r_matrix_of_bell_state() {
        let rho = density_from_pure(&w_state(2).unwrap());
        let r = rho.matrix() * spin_flip(rho.matrix());
        let mut ev: Vec<f64> = eigenvalues_general(&r).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!(ev[1..].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn ground_state_register_has_zero_n_concurrence() {
        let rho = DensityMatrix::from_pure(&PureState::basis(4, 0).unwrap());
        assert!(flip_spectrum_roots(&rho).unwrap().iter().all(|x| *x == 0.0));
        assert_eq!(n_concurrence(&rho).unwrap(), 0.0);
    }

    #[test]
    fn mw_examples() {
        for n in 2..=10 {
            let g = mw_global_entanglement(&ghz_state(n).unwrap()).unwrap().value();
            assert!((g - 1.0).abs() < 1e-12);
            let w = mw_global_entanglement(&w_state(n).unwrap()).unwrap().value();
            let nf = n as f64;
            assert!((w - 4.0 * (nf - 1.0) / (nf * nf)).abs() < 1e-12);
        }
        let prod = PureState::basis(5, 0).unwrap();
        assert_eq!(mw_global_entanglement(&prod).unwrap().value(), 0.0);
        assert!((mw_global_entanglement(&w_state(4).unwrap()).unwrap().value() - 0.75).abs() < 1e-14);
    }

    #[test]
    fn information_budget_examples() {
        let b = information_budget(&PureState::basis(3, 0).unwrap()).unwrap();
        assert_eq!((b.i_total, b.i_local, b.i_nonlocal), (3.0, 3.0, 0.0));
        let b = information_budget(&ghz_state(2).unwrap()).unwrap();
        assert!((b.i_local).abs() < 1e-15 && (b.i_nonlocal - 2.0).abs() < 1e-15);
        // W(4) marginals diag(3/4, 1/4): purity 5/8, non-local 4 * 2 * 3/8 = 3.
        let b = information_budget(&w_state(4).unwrap()).unwrap();
        assert!((b.i_nonlocal - 3.0).abs() < 1e-14);
        assert!((b.i_total - b.i_local - b.i_nonlocal).abs() < 1e-14);
    }

    #[test]
    fn bell_and_product_concurrence() {
        let bell = density_from_pure(&w_state(2).unwrap());
        assert!((concurrence_2q(&bell).unwrap() - 1.0).abs() < 1e-12);
        let prod = DensityMatrix::from_pure(&PureState::basis(2, 2).unwrap());
        assert!(concurrence_2q(&prod).unwrap().abs() < 1e-12);
        assert!(concurrence_2q(&density_from_pure(&ghz_state(3).unwrap())).is_err());
    }

    #[test]
    fn odd_register_rejected() {
        let rho = density_from_pure(&ghz_state(3).unwrap());
        assert!(matches!(n_concurrence(&rho), Err(Error::OddQubitCount(3))));
    }

    #[test]
    fn ghz_n_concurrence_is_one() {
        for n in (2..=12).step_by(2) {
            let rho = density_from_pure(&ghz_state(n).unwrap());
            assert!((n_concurrence(&rho).unwrap() - 1.0).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn fully_dephased_ghz_is_unentangled() {
        let mut m = ComplexMatrix::zeros(16, 16);
        m[(0, 0)] = c(0.5);
        m[(15, 15)] = c(0.5);
        let rho = DensityMatrix::new(m).unwrap();
        assert_eq!(n_concurrence(&rho).unwrap(), 0.0);
    }

    #[test]
    fn block_split_agrees_with_dense_spectrum() {
        // Mix GHZ with a random-looking diagonal; compare against the dense R.
        let n = 4;
        let dim = 1 << n;
        let mut m = density_from_pure(&ghz_state(n).unwrap()).into_matrix() * c(0.6);
        for i in 0..dim {
            m[(i, i)] += c(0.4 * (1.0 + (i % 5) as f64) / 46.0);
        }
        let tr = m.trace();
        let rho = DensityMatrix::new(m / tr).unwrap();
        let dense = rho.matrix() * spin_flip(rho.matrix());
        let mut roots: Vec<f64> = eigenvalues_general(&dense)
            .unwrap()
            .iter()
            .map(|z| z.re.max(0.0).sqrt())
            .collect();
        roots.sort_by(|a, b| b.total_cmp(a));
        let split = flip_spectrum_roots(&rho).unwrap();
        for (a, b) in roots.iter().zip(&split) {
            assert!((a - b).abs() < 1e-7, "{roots:?} vs {split:?}");
        }
    }

    #[test]
    fn ge_value_bounds() {
        assert!(GEValue::new(1.0 + 1e-11).is_ok());
        assert!(GEValue::new(1.001).is_err());
        assert!(GEValue::new(-1e-9).is_err());
    }
}
