//! Entangled two-qubit channel built from a UD instance.
//!
//! Tensor order is always `a ⊗ b` (Alice first), so amplitude index `2·a + b`.

use num_complex::Complex64;

use crate::ensembles::{DensityOperator, PureState, TOL_NORM};
use crate::error::{Error, Result};
use crate::linalg::{self, kron_vec, HermitianOperator, SquareMatrix, ONE, ZERO};
use crate::ud::{self, RetroBasis, UdInstance};

/// Slack on the failure operator's spectrum when accepting a decomposition.
pub const TOL_FEASIBLE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    amplitudes: Vec<Complex64>,
}

impl TwoQubitState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: amplitudes.len(),
            });
        }
        let n = linalg::norm(&amplitudes);
        if (n - 1.0).abs() > TOL_NORM {
            return Err(Error::NumericIntegrity {
                quantity: "two-qubit state norm",
                value: n,
            });
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn density(&self) -> SquareMatrix {
        SquareMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// State of Alice's qubit.
    pub fn reduced_a(&self) -> Result<DensityOperator> {
        DensityOperator::from_matrix(linalg::partial_trace_b(&self.density(), 2, 2)?)
    }

    /// State of Bob's qubit.
    pub fn reduced_b(&self) -> Result<DensityOperator> {
        DensityOperator::from_matrix(linalg::partial_trace_a(&self.density(), 2, 2)?)
    }

    /// Exchanges the two qubits with the explicit permutation matrix.
    pub fn swapped(&self) -> TwoQubitState {
        TwoQubitState {
            amplitudes: swap_matrix().apply(&self.amplitudes),
        }
    }

    /// `‖SWAP|Ψ⟩ − |Ψ⟩‖`
    pub fn swap_residual(&self) -> f64 {
        self.vector_distance(&self.swapped())
    }

    pub fn vector_distance(&self, other: &TwoQubitState) -> f64 {
        let d: Vec<Complex64> = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a - b).collect();
        linalg::norm(&d)
    }

    /// Phase-insensitive distance `max |ΨΨ† − ΦΦ†|`.
    pub fn projector_distance(&self, other: &TwoQubitState) -> f64 {
        self.density().max_abs_diff(&other.density())
    }

    /// Applies `U ⊗ I` (a unitary acting on Alice's qubit).
    pub fn apply_local_a(&self, u: &SquareMatrix) -> Result<TwoQubitState> {
        if u.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: u.dim(),
            });
        }
        TwoQubitState::new(u.kron(&SquareMatrix::identity(2)).apply(&self.amplitudes))
    }

    /// Schmidt coefficients (squared), descending.
    pub fn schmidt_weights(&self) -> Result<[f64; 2]> {
        let spec = self.reduced_a()?.op().eig();
        Ok([spec.eigenvalues[1], spec.eigenvalues[0]])
    }
}

/// The 4×4 permutation `|ab⟩ ↦ |ba⟩`.
pub fn swap_matrix() -> SquareMatrix {
    SquareMatrix::from_fn(4, |row, col| {
        let (a, b) = (col / 2, col % 2);
        if row == 2 * b + a {
            ONE
        } else {
            ZERO
        }
    })
}

fn superpose(terms: &[(f64, Vec<Complex64>)]) -> Result<TwoQubitState> {
    let mut out = vec![ZERO; 4];
    for (w, v) in terms {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x * w;
        }
    }
    TwoQubitState::new(out)
}

/// `√η_1|0⟩_a ψ_1 + √η_2|1⟩_a ψ_2`
pub fn entangled_state(instance: &UdInstance) -> TwoQubitState {
    let (p1, p2) = ud::ud_states(instance);
    let (k0, k1) = ([ONE, ZERO], [ZERO, ONE]);
    superpose(&[
        (instance.eta1().sqrt(), kron_vec(&k0, p1.amplitudes())),
        (instance.eta2().sqrt(), kron_vec(&k1, p2.amplitudes())),
    ])
    .expect("cross terms vanish, norm is one")
}

/// `√η_1 φ_1 ⊗ ψ_1 + √η_2 φ_2 ⊗ ψ_2`
pub fn symmetric_state(instance: &UdInstance) -> Result<TwoQubitState> {
    let basis = ud::retro_basis(instance)?;
    pairwise(instance, &basis, false)
}

/// `√η_1 ψ_1 ⊗ φ_1 + √η_2 ψ_2 ⊗ φ_2`, the factor-exchanged form.
pub fn swapped_form(instance: &UdInstance) -> Result<TwoQubitState> {
    let basis = ud::retro_basis(instance)?;
    pairwise(instance, &basis, true)
}

fn pairwise(instance: &UdInstance, basis: &RetroBasis, exchanged: bool) -> Result<TwoQubitState> {
    let (p1, p2) = ud::ud_states(instance);
    let term = |phi: &PureState, psi: &PureState| {
        if exchanged {
            kron_vec(psi.amplitudes(), phi.amplitudes())
        } else {
            kron_vec(phi.amplitudes(), psi.amplitudes())
        }
    };
    superpose(&[
        (instance.eta1().sqrt(), term(&basis.phi1, &p1)),
        (instance.eta2().sqrt(), term(&basis.phi2, &p2)),
    ])
}

/// Alice's unitary mapping `|0⟩, |1⟩` onto `φ_1, φ_2`.
pub fn alice_unitary(instance: &UdInstance) -> Result<SquareMatrix> {
    Ok(ud::retro_basis(instance)?.unitary())
}

/// `⟨φ_i|√Ω|φ_j⟩`
pub fn sqrt_omega_in_retro_basis(instance: &UdInstance) -> Result<SquareMatrix> {
    let u = alice_unitary(instance)?;
    let root = linalg::sqrt(&instance.omega()?)?;
    Ok(&(&u.adjoint() * root.matrix()) * &u)
}

#[derive(Debug, Clone)]
pub struct NoSignalingReport {
    pub rho_a: DensityOperator,
    pub rho_a_tilde: DensityOperator,
    pub rho_b: DensityOperator,
    /// Success weights `(μ_1, μ_2)` that Alice's decomposition uses.
    pub mu: [f64; 2],
    pub max_residual: f64,
}

impl NoSignalingReport {
    pub fn new(rho_a: DensityOperator, rho_a_tilde: DensityOperator, rho_b: DensityOperator, mu: [f64; 2]) -> Self {
        let max_residual = rho_a.op().max_abs_diff(rho_a_tilde.op());
        Self {
            rho_a,
            rho_a_tilde,
            rho_b,
            mu,
            max_residual,
        }
    }
}

/// Compares Alice's reduced state of the symmetric channel with the
/// decomposition `μ_1|φ_1⟩⟨φ_1| + μ_2|φ_2⟩⟨φ_2| + μ_0 ρ_0` at the dual optimum.
pub fn no_signaling_check(instance: &UdInstance) -> Result<NoSignalingReport> {
    let opt = ud::optimal_dual(instance)?;
    no_signaling_with(instance, opt.mu1, opt.mu2)
}

/// As [`no_signaling_check`] for any `(μ_1, μ_2)`, with `μ_0 ρ_0` taken as the
/// remainder `Ω − μ_1|φ_1⟩⟨φ_1| − μ_2|φ_2⟩⟨φ_2|`. A remainder that is not
/// positive semidefinite is reported as [`Error::InfeasibleDecomposition`].
pub fn no_signaling_with(instance: &UdInstance, mu1: f64, mu2: f64) -> Result<NoSignalingReport> {
    for (name, mu) in [("mu1", mu1), ("mu2", mu2)] {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("success weight must be finite and non-negative, got {mu}"),
            });
        }
    }
    let state = symmetric_state(instance)?;
    let basis = ud::retro_basis(instance)?;
    let remainder_retro = ud::omega_in_retro_basis(instance)?.sub(&HermitianOperator::diagonal(&[mu1, mu2]))?;
    let min_eigenvalue = remainder_retro.min_eigenvalue();
    if min_eigenvalue < -TOL_FEASIBLE {
        return Err(Error::InfeasibleDecomposition { min_eigenvalue });
    }
    let u = basis.unitary();
    let detectors = HermitianOperator::projector(basis.phi1.amplitudes())
        .scale(mu1)
        .add(&HermitianOperator::projector(basis.phi2.amplitudes()).scale(mu2))?;
    let rho_a_tilde = detectors.add(&remainder_retro.unitary_conjugate(&u)?)?;
    Ok(NoSignalingReport::new(
        state.reduced_a()?,
        DensityOperator::new(rho_a_tilde)?,
        state.reduced_b()?,
        [mu1, mu2],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn swap_permutation_moves_01_to_10() {
        let s = swap_matrix();
        let v = s.apply(&[ZERO, ONE, ZERO, ZERO]);
        assert_eq!(v, vec![ZERO, ZERO, ONE, ZERO]);
        assert_eq!(&s * &s, SquareMatrix::identity(4));
    }

    #[test]
    fn orthogonal_balanced_state_is_maximally_entangled() {
        let st = entangled_state(&UdInstance::from_overlap(0.5, 0.0).unwrap());
        let w = st.schmidt_weights().unwrap();
        assert_abs_diff_eq!(w[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn entangled_state_reduced_states() {
        let inst = UdInstance::new(0.7, PI / 6.0).unwrap();
        let st = entangled_state(&inst);
        let omega = inst.omega().unwrap();
        assert!(st.reduced_b().unwrap().op().max_abs_diff(&omega) < 1e-10);
        let retro = ud::omega_in_retro_basis(&inst).unwrap();
        assert!(st.reduced_a().unwrap().op().max_abs_diff(&retro) < 1e-10);
    }

    #[test]
    fn symmetric_state_is_swap_invariant() {
        for (eta, alpha) in [(0.5, PI / 8.0), (0.8, 0.3), (0.2, 0.6)] {
            let inst = UdInstance::new(eta, alpha).unwrap();
            let st = symmetric_state(&inst).unwrap();
            assert!(st.swap_residual() < 1e-10);
            assert!(st.vector_distance(&swapped_form(&inst).unwrap()) < 1e-10);
            let omega = inst.omega().unwrap();
            assert!(st.reduced_a().unwrap().op().max_abs_diff(&omega) < 1e-10);
            assert!(st.reduced_b().unwrap().op().max_abs_diff(&omega) < 1e-10);
        }
    }

    #[test]
    fn alice_rotation_connects_the_two_states() {
        let inst = UdInstance::new(0.65, 0.45).unwrap();
        let u = alice_unitary(&inst).unwrap();
        let rotated = entangled_state(&inst).apply_local_a(&u).unwrap();
        assert!(rotated.projector_distance(&symmetric_state(&inst).unwrap()) < 1e-10);
    }

    #[test]
    fn sqrt_omega_is_symmetric_in_retro_basis() {
        let m = sqrt_omega_in_retro_basis(&UdInstance::new(0.3, 0.25).unwrap()).unwrap();
        assert!((m.get(0, 1) - m.get(1, 0)).norm() < 1e-12);
    }

    #[test]
    fn no_signaling_at_optimum_and_inside() {
        let inst = UdInstance::from_overlap(0.5, 0.5).unwrap();
        assert!(no_signaling_check(&inst).unwrap().max_residual < 1e-10);
        assert!(no_signaling_with(&inst, 0.1, 0.15).unwrap().max_residual < 1e-10);
        assert!(matches!(
            no_signaling_with(&inst, 0.6, 0.0),
            Err(Error::InfeasibleDecomposition { .. })
        ));
        assert!(no_signaling_with(&inst, -0.1, 0.0).is_err());
    }
}
