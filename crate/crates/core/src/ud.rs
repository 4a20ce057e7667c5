//! Two-state unambiguous discrimination and its retrodictive dual.
//!
//! The instance is the real qubit pair `ψ_{1,2} = cos α|0⟩ ± sin α|1⟩` with
//! priors `(η_1, η_2)` and overlap `s = ⟨ψ_1|ψ_2⟩ = cos 2α`. The half-angle `α`
//! is the canonical parameter; the overlap angle `θ` with `cos θ = s` is only a
//! derived accessor, so the two angle conventions never mix.
//!
//! On the retrodictive side the detectors become the projectors onto the
//! orthonormal *retrodictive basis* `φ_i = Ω^{-1/2} √η_i ψ_i`, and the dual
//! problem is to split `Ω` as `μ_1|φ_1⟩⟨φ_1| + μ_2|φ_2⟩⟨φ_2| + μ_0 ρ_0` with
//! `μ_0 ρ_0 ≥ 0`, maximizing `μ_1 + μ_2`.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{DensityOperator, Ensemble, Povm, PureState};
use crate::error::{Error, Result};
use crate::linalg::{self, re, HermitianOperator, SquareMatrix, DEFAULT_MIN_EIG};
use crate::retrodiction::{self, MU_FLOOR};

/// Overlaps below this are the rounding residue of `cos(π/2)`.
const OVERLAP_ZERO_SNAP: f64 = 1e-15;
const ANGLE_SLACK: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Both success weights are positive.
    Interior,
    /// The less likely state's weight is pinned at zero.
    Clamped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UdInstance {
    alpha: f64,
    eta1: f64,
    eta2: f64,
    overlap: f64,
}

impl UdInstance {
    /// Instance from the prior of the first state and the state half-angle `α ∈ (0, π/4]`.
    pub fn new(eta1: f64, alpha: f64) -> Result<Self> {
        let (eta1, eta2) = check_prior(eta1)?;
        if !(0.0..=FRAC_PI_4 + ANGLE_SLACK).contains(&alpha) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("half-angle must lie in (0, pi/4], got {alpha}"),
            });
        }
        if alpha == 0.0 {
            return Err(coincident_states());
        }
        let alpha = alpha.min(FRAC_PI_4);
        let mut overlap = (2.0 * alpha).cos();
        if overlap < OVERLAP_ZERO_SNAP {
            overlap = 0.0;
        }
        Ok(Self {
            alpha,
            eta1,
            eta2,
            overlap,
        })
    }

    /// Instance from the prior of the first state and the overlap `s ∈ [0, 1)`.
    pub fn from_overlap(eta1: f64, overlap: f64) -> Result<Self> {
        let (eta1, eta2) = check_prior(eta1)?;
        if !overlap.is_finite() || !(0.0..=1.0).contains(&overlap) {
            return Err(Error::InvalidParameter {
                name: "overlap",
                reason: format!("overlap must lie in [0, 1), got {overlap}"),
            });
        }
        if overlap == 1.0 {
            return Err(coincident_states());
        }
        Ok(Self {
            alpha: overlap.acos() / 2.0,
            eta1,
            eta2,
            overlap,
        })
    }

    /// A complex overlap is reduced to its modulus by absorbing the phase into `ψ_2`.
    pub fn from_complex_overlap(eta1: f64, overlap: Complex64) -> Result<Self> {
        Self::from_overlap(eta1, overlap.norm())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Overlap angle `θ` with `cos θ = s`.
    pub fn theta(&self) -> f64 {
        self.overlap.acos()
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }

    pub fn eta(&self) -> [f64; 2] {
        [self.eta1, self.eta2]
    }

    pub fn eta_max(&self) -> f64 {
        self.eta1.max(self.eta2)
    }

    pub fn eta_min(&self) -> f64 {
        self.eta1.min(self.eta2)
    }

    /// Prior above which the optimum is clamped: `1 / (1 + s²)`.
    pub fn regime_threshold(&self) -> f64 {
        1.0 / (1.0 + self.overlap * self.overlap)
    }

    pub fn regime(&self) -> Regime {
        if self.eta_max() * (1.0 + self.overlap * self.overlap) < 1.0 {
            Regime::Interior
        } else {
            Regime::Clamped
        }
    }

    pub fn ensemble(&self) -> Ensemble {
        let (p1, p2) = ud_states(self);
        Ensemble::from_pure(vec![p1, p2], vec![self.eta1, self.eta2]).expect("valid instance")
    }

    /// `Ω` in the computational basis.
    pub fn omega(&self) -> Result<HermitianOperator> {
        Ok(self.ensemble().source()?.omega.op().clone())
    }
}

fn check_prior(eta1: f64) -> Result<(f64, f64)> {
    if !eta1.is_finite() || eta1 <= 0.0 || eta1 >= 1.0 {
        return Err(Error::InvalidParameter {
            name: "eta1",
            reason: format!("prior must lie strictly between 0 and 1, got {eta1}"),
        });
    }
    Ok((eta1, 1.0 - eta1))
}

fn coincident_states() -> Error {
    Error::SingularOperator {
        min_eigenvalue: 0.0,
        floor: DEFAULT_MIN_EIG,
    }
}

/// `ψ_{1,2} = cos α|0⟩ ± sin α|1⟩`
pub fn ud_states(instance: &UdInstance) -> (PureState, PureState) {
    let (c, s) = (instance.alpha.cos(), instance.alpha.sin());
    (
        PureState::from_real(&[c, s]).expect("unit vector"),
        PureState::from_real(&[c, -s]).expect("unit vector"),
    )
}

/// Vectors orthogonal to `ψ_1` and `ψ_2`, respectively.
pub fn ud_perp_states(instance: &UdInstance) -> (PureState, PureState) {
    let (c, s) = (instance.alpha.cos(), instance.alpha.sin());
    (
        PureState::from_real(&[s, -c]).expect("unit vector"),
        PureState::from_real(&[s, c]).expect("unit vector"),
    )
}

/// Closed-form spectrum of `Ω`: `w_1 ≥ w_2` with eigenvectors
/// `|ω_1⟩ = cos ω|0⟩ + sin ω|1⟩`, `|ω_2⟩ = −sin ω|0⟩ + cos ω|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaClosedForm {
    pub w1: f64,
    pub w2: f64,
    pub omega_angle: f64,
}

impl OmegaClosedForm {
    pub fn omega1(&self) -> Vec<Complex64> {
        vec![re(self.omega_angle.cos()), re(self.omega_angle.sin())]
    }

    pub fn omega2(&self) -> Vec<Complex64> {
        vec![re(-self.omega_angle.sin()), re(self.omega_angle.cos())]
    }
}

pub fn omega_closed_form(instance: &UdInstance) -> Result<OmegaClosedForm> {
    let (e1, e2, a) = (instance.eta1, instance.eta2, instance.alpha);
    let sin2a = (2.0 * a).sin();
    let product = e1 * e2 * sin2a * sin2a;
    let root = (1.0 - 4.0 * product).max(0.0).sqrt();
    let w1 = 0.5 * (1.0 + root);
    // w1·w2 = η1η2 sin²2α avoids the cancellation in ½(1 − root)
    let w2 = product / w1;
    if w2 < DEFAULT_MIN_EIG {
        return Err(Error::SingularOperator {
            min_eigenvalue: w2,
            floor: DEFAULT_MIN_EIG,
        });
    }
    // tan 2ω = (η1 − η2) tan 2α, with 2ω ∈ [−π/2, π/2] since cos 2α ≥ 0
    let omega_angle = 0.5 * ((e1 - e2) * sin2a).atan2((2.0 * a).cos());
    Ok(OmegaClosedForm { w1, w2, omega_angle })
}

/// The orthonormal pair `φ_i = Ω^{-1/2} √η_i ψ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RetroBasis {
    pub phi1: PureState,
    pub phi2: PureState,
}

impl RetroBasis {
    pub fn phi(&self, i: usize) -> &PureState {
        match i {
            0 => &self.phi1,
            1 => &self.phi2,
            _ => panic!("retrodictive basis has two vectors, index {i}"),
        }
    }

    /// Unitary with columns `φ_1, φ_2`, mapping `|0⟩, |1⟩` onto the basis.
    pub fn unitary(&self) -> SquareMatrix {
        SquareMatrix::from_columns(&[self.phi1.amplitudes().to_vec(), self.phi2.amplitudes().to_vec()])
            .expect("two vectors of length two")
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let u = self.unitary();
        (&u.adjoint() * &u).max_abs_diff(&SquareMatrix::identity(2))
    }

    pub fn max_distance(&self, other: &RetroBasis) -> f64 {
        let d = |a: &PureState, b: &PureState| {
            a.amplitudes()
                .iter()
                .zip(b.amplitudes())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
        };
        d(&self.phi1, &other.phi1).max(d(&self.phi2, &other.phi2))
    }
}

/// Builds the retrodictive basis numerically from `Ω^{-1/2}`.
pub fn retro_basis(instance: &UdInstance) -> Result<RetroBasis> {
    omega_closed_form(instance)?;
    let inv_sqrt = linalg::inverse_sqrt(&instance.omega()?)?;
    let (p1, p2) = ud_states(instance);
    let build = |p: &PureState, eta: f64| {
        let v: Vec<Complex64> = inv_sqrt.matrix().apply(p.amplitudes()).iter().map(|z| z * eta.sqrt()).collect();
        PureState::new(v)
    };
    Ok(RetroBasis {
        phi1: build(&p1, instance.eta1)?,
        phi2: build(&p2, instance.eta2)?,
    })
}

/// The retrodictive basis from the closed-form spectrum of `Ω`.
pub fn retro_basis_closed_form(instance: &UdInstance) -> Result<RetroBasis> {
    let cf = omega_closed_form(instance)?;
    let (a, w) = (instance.alpha, cf.omega_angle);
    let (o1, o2) = (cf.omega1(), cf.omega2());
    let combine = |k1: f64, k2: f64| -> Vec<Complex64> { o1.iter().zip(&o2).map(|(x, y)| x * k1 + y * k2).collect() };
    let (r1, r2) = (cf.w1.sqrt(), cf.w2.sqrt());
    let s1 = instance.eta1.sqrt();
    let s2 = instance.eta2.sqrt();
    let phi1 = combine(s1 * (a - w).cos() / r1, s1 * (a - w).sin() / r2);
    let phi2 = combine(s2 * (a + w).cos() / r1, -s2 * (a + w).sin() / r2);
    Ok(RetroBasis {
        phi1: PureState::new(phi1)?,
        phi2: PureState::new(phi2)?,
    })
}

/// `Ω` written in the retrodictive basis: `[[η_1, √(η_1η_2) s], [√(η_1η_2) s, η_2]]`.
pub fn omega_in_retro_basis(instance: &UdInstance) -> Result<HermitianOperator> {
    omega_closed_form(instance)?;
    let off = (instance.eta1 * instance.eta2).sqrt() * instance.overlap;
    Ok(HermitianOperator::new(
        SquareMatrix::from_real_rows(&[&[instance.eta1, off], &[off, instance.eta2]]).expect("2x2"),
    )
    .expect("symmetric"))
}

/// `⟨φ_i|Ω|φ_j⟩` evaluated from the numerically built basis.
pub fn omega_in_retro_basis_numeric(instance: &UdInstance) -> Result<HermitianOperator> {
    let basis = retro_basis(instance)?;
    let omega = instance.omega()?;
    let u = basis.unitary();
    omega.unitary_conjugate(&u.adjoint())
}

/// Optimal decomposition of `Ω` for the retrodictive dual problem.
#[derive(Debug, Clone)]
pub struct DualOptimum {
    pub mu1: f64,
    pub mu2: f64,
    pub mu0: f64,
    /// `ρ_0^ret` in the computational basis; `None` when `μ_0` vanishes (orthogonal states).
    pub rho0_ret: Option<DensityOperator>,
    /// `μ_0 ρ_0^ret` in the retrodictive basis.
    pub failure_operator: HermitianOperator,
    pub p_success: f64,
    pub regime: Regime,
    pub basis: RetroBasis,
}

impl DualOptimum {
    pub fn mu(&self) -> [f64; 3] {
        [self.mu1, self.mu2, self.mu0]
    }

    /// `|μ_1 + μ_2 + μ_0 − 1|`
    pub fn trace_residual(&self) -> f64 {
        (self.mu1 + self.mu2 + self.mu0 - 1.0).abs()
    }

    /// `det(μ_0 ρ_0^ret)`; zero at the optimum.
    pub fn failure_determinant(&self) -> f64 {
        let f = self.failure_operator.matrix();
        (f.get(0, 0) * f.get(1, 1) - f.get(0, 1) * f.get(1, 0)).re
    }

    /// `‖μ_1|φ_1⟩⟨φ_1| + μ_2|φ_2⟩⟨φ_2| + μ_0 ρ_0 − Ω‖` in the retrodictive basis.
    pub fn constraint_residual(&self, instance: &UdInstance) -> Result<f64> {
        let target = omega_in_retro_basis(instance)?;
        let lhs = HermitianOperator::diagonal(&[self.mu1, self.mu2]).add(&self.failure_operator)?;
        Ok(lhs.max_abs_diff(&target))
    }

    /// `(φ_1 + φ_2)/√2`, the failure state of the interior regime.
    pub fn phi0(&self) -> PureState {
        let v: Vec<Complex64> = self
            .basis
            .phi1
            .amplitudes()
            .iter()
            .zip(self.basis.phi2.amplitudes())
            .map(|(a, b)| (a + b) * std::f64::consts::FRAC_1_SQRT_2)
            .collect();
        PureState::normalize(&v).expect("nonzero")
    }

    /// Checks `0 ≤ μ_i ≤ η_i` with a small slack; returns the largest violation.
    pub fn bound_violation(&self, instance: &UdInstance) -> f64 {
        [
            -self.mu1,
            -self.mu2,
            self.mu1 - instance.eta1,
            self.mu2 - instance.eta2,
        ]
        .into_iter()
        .filter(|v| *v > 0.0)
        .fold(0.0, f64::max)
    }
}

/// Interior-branch success `1 − 2√(η_1η_2) s`, evaluated regardless of regime.
pub fn interior_branch_success(instance: &UdInstance) -> f64 {
    1.0 - 2.0 * (instance.eta1 * instance.eta2).sqrt() * instance.overlap
}

/// Clamped-branch success `η_max (1 − s²)`, evaluated regardless of regime.
pub fn clamped_branch_success(instance: &UdInstance) -> f64 {
    instance.eta_max() * (1.0 - instance.overlap * instance.overlap)
}

/// Closed-form optimum of the dual problem.
pub fn optimal_dual(instance: &UdInstance) -> Result<DualOptimum> {
    let basis = retro_basis(instance)?;
    let (e1, e2, s) = (instance.eta1, instance.eta2, instance.overlap);
    let cross = (e1 * e2).sqrt() * s;
    let regime = instance.regime();
    let (mu1, mu2, p_success) = match regime {
        Regime::Interior => (e1 - cross, e2 - cross, 1.0 - 2.0 * cross),
        Regime::Clamped => {
            let top = instance.eta_max() * (1.0 - s * s);
            if e1 >= e2 {
                (top, 0.0, top)
            } else {
                (0.0, top, top)
            }
        }
    };
    let failure_operator = HermitianOperator::new(
        SquareMatrix::from_real_rows(&[&[e1 - mu1, cross], &[cross, e2 - mu2]]).expect("2x2"),
    )
    .expect("symmetric");
    let mu0 = failure_operator.trace();
    let rho0_ret = if mu0 > MU_FLOOR {
        let in_computational = failure_operator.scale(1.0 / mu0).unitary_conjugate(&basis.unitary())?;
        Some(DensityOperator::new(in_computational)?)
    } else {
        None
    };
    Ok(DualOptimum {
        mu1,
        mu2,
        mu0,
        rho0_ret,
        failure_operator,
        p_success,
        regime,
        basis,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOptimum {
    pub mu1: f64,
    pub mu2: f64,
    pub p_success: f64,
}

/// Grid search for the dual optimum, using only the positivity constraints
/// `η_i − μ_i ≥ 0` and `(η_1 − μ_1)(η_2 − μ_2) ≥ η_1η_2 s²`.
///
/// `μ_1` runs over `{k·step} ∪ {η_1}`; for each, `μ_2` is the largest feasible
/// point of `{m·step} ∪ {η_2}`. Rows are scanned in parallel and reduced by
/// value, ties going to the lower `μ_1`, so the result does not depend on the
/// thread count.
pub fn brute_force_dual(instance: &UdInstance, grid_step: f64) -> Result<GridOptimum> {
    if !(grid_step.is_finite() && grid_step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "grid_step",
            reason: format!("step must be positive, got {grid_step}"),
        });
    }
    let (e1, e2, s) = (instance.eta1, instance.eta2, instance.overlap);
    let coupling = e1 * e2 * s * s;
    let feasible = |m1: f64, m2: f64| m1 >= 0.0 && m2 >= 0.0 && m1 <= e1 && m2 <= e2 && (e1 - m1) * (e2 - m2) >= coupling;

    let rows = (e1 / grid_step).floor() as usize;
    let best_for_row = |k: usize| -> Option<(f64, usize, f64, f64)> {
        let m1 = if k > rows { e1 } else { (k as f64 * grid_step).min(e1) };
        let slack = e1 - m1;
        let bound = if slack > 0.0 {
            e2 - coupling / slack
        } else if coupling == 0.0 {
            e2
        } else {
            return None;
        };
        let mut candidates = Vec::with_capacity(3);
        if bound >= e2 {
            candidates.push(e2);
        }
        if bound >= 0.0 {
            let m = (bound.min(e2) / grid_step).floor();
            candidates.push(m * grid_step);
            if m >= 1.0 {
                candidates.push((m - 1.0) * grid_step);
            }
        }
        candidates
            .into_iter()
            .filter(|&m2| feasible(m1, m2))
            .map(|m2| (m1 + m2, k, m1, m2))
            .max_by(|a, b| a.0.total_cmp(&b.0))
    };

    let best = (0..=rows + 1)
        .into_par_iter()
        .filter_map(best_for_row)
        .reduce_with(|a, b| match a.0.total_cmp(&b.0) {
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Equal => {
                if a.1 <= b.1 {
                    a
                } else {
                    b
                }
            }
        })
        .expect("μ = 0 is always feasible");
    Ok(GridOptimum {
        mu1: best.2,
        mu2: best.3,
        p_success: best.0,
    })
}

/// Predictive UD measurement `Π_1 = c_1|ψ_2^⊥⟩⟨ψ_2^⊥|`, `Π_2 = c_2|ψ_1^⊥⟩⟨ψ_1^⊥|`,
/// `Π_0 = I − Π_1 − Π_2`, with elements ordered `(Π_1, Π_2, Π_0)`.
#[derive(Debug, Clone)]
pub struct PredictiveUdPovm {
    pub povm: Povm,
    pub c: [f64; 2],
}

impl PredictiveUdPovm {
    /// `η_1⟨ψ_1|Π_1|ψ_1⟩ + η_2⟨ψ_2|Π_2|ψ_2⟩`
    pub fn success_probability(&self, instance: &UdInstance) -> Result<f64> {
        let terms = self.success_terms(instance)?;
        Ok(terms[0] + terms[1])
    }

    /// `η_i⟨ψ_i|Π_i|ψ_i⟩` for `i = 1, 2`.
    pub fn success_terms(&self, instance: &UdInstance) -> Result<[f64; 2]> {
        let (p1, p2) = ud_states(instance);
        let e = self.povm.elements();
        Ok([
            instance.eta1 * retrodiction::predictive_prob(&e[0], &p1.projector())?,
            instance.eta2 * retrodiction::predictive_prob(&e[1], &p2.projector())?,
        ])
    }

    /// Largest of `⟨ψ_2|Π_1|ψ_2⟩` and `⟨ψ_1|Π_2|ψ_1⟩`.
    pub fn error_probability(&self, instance: &UdInstance) -> Result<f64> {
        let (p1, p2) = ud_states(instance);
        let e = self.povm.elements();
        Ok(retrodiction::predictive_prob(&e[0], &p2.projector())?
            .max(retrodiction::predictive_prob(&e[1], &p1.projector())?))
    }
}

/// The optimal predictive measurement, with `c_i` fixed by `η_i⟨ψ_i|Π_i|ψ_i⟩ = μ_i`.
pub fn optimal_predictive_povm(instance: &UdInstance) -> Result<PredictiveUdPovm> {
    let dual = optimal_dual(instance)?;
    let (p1, p2) = ud_states(instance);
    let (perp1, perp2) = ud_perp_states(instance);
    let weight = |p: &PureState, perp: &PureState| p.inner(perp).norm_sqr();
    let coefficient = |mu: f64, eta: f64, w: f64| -> Result<f64> {
        let c = mu / (eta * w);
        if !(-1e-12..=1.0 + 1e-12).contains(&c) {
            return Err(Error::NumericIntegrity {
                quantity: "UD detector weight",
                value: c,
            });
        }
        Ok(c.clamp(0.0, 1.0))
    };
    let c1 = coefficient(dual.mu1, instance.eta1, weight(&p1, &perp2))?;
    let c2 = coefficient(dual.mu2, instance.eta2, weight(&p2, &perp1))?;
    let pi1 = HermitianOperator::projector(perp2.amplitudes()).scale(c1);
    let pi2 = HermitianOperator::projector(perp1.amplitudes()).scale(c2);
    let pi0 = HermitianOperator::identity(2).sub(&pi1)?.sub(&pi2)?;
    Ok(PredictiveUdPovm {
        povm: Povm::from_operators(vec![pi1, pi2, pi0])?,
        c: [c1, c2],
    })
}

/// Retrodictive success `μ_1 Tr(Π_1^ret ρ_1^ret) + μ_2 Tr(Π_2^ret ρ_2^ret)`
/// evaluated through the general transform of the optimal predictive measurement.
pub fn retrodictive_success(instance: &UdInstance) -> Result<f64> {
    let povm = optimal_predictive_povm(instance)?;
    let dual = retrodiction::retro_transform(&instance.ensemble(), &povm.povm)?;
    let mut total = 0.0;
    for i in 0..2 {
        let mu = dual.mu().mu[i];
        if mu > MU_FLOOR {
            total += mu * retrodiction::retrodictive_prob_symmetric(&dual, i, i)?;
        }
    }
    Ok(total)
}

/// Residuals of the purity and identification identities for one outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentificationEntry {
    /// 0 for `Π_1`, 1 for `Π_2`.
    pub outcome: usize,
    /// `|Tr((ρ_j^ret)²) − 1|`
    pub purity_residual: f64,
    /// `‖ρ_j^ret − |φ_j⟩⟨φ_j|‖`
    pub basis_distance: f64,
    /// `‖ρ_j^ret − P[√Ω ψ_i^⊥]‖` for the normalized `√Ω|ψ_i^⊥⟩`.
    pub perp_form_distance: f64,
    /// `‖Π_j^ret − |φ_j⟩⟨φ_j|‖`
    pub detector_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentificationReport {
    pub entries: Vec<IdentificationEntry>,
    /// Outcomes with `c_j = 0`, whose retrodictive state is undefined.
    pub skipped: Vec<usize>,
    /// `‖ρ_0^ret(transform) − ρ_0^ret(dual optimum)‖`, when both exist.
    pub failure_state_distance: Option<f64>,
}

impl IdentificationReport {
    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|e| [e.purity_residual, e.basis_distance, e.perp_form_distance, e.detector_distance])
            .chain(self.failure_state_distance)
            .fold(0.0, f64::max)
    }
}

/// Checks that the optimal UD detectors transform into the pure states
/// `ρ_j^ret = |φ_j⟩⟨φ_j|`, and that `Π_j^ret = |φ_j⟩⟨φ_j|`.
pub fn verify_purity_identification(instance: &UdInstance) -> Result<IdentificationReport> {
    let povm = optimal_predictive_povm(instance)?;
    let dual = retrodiction::retro_transform(&instance.ensemble(), &povm.povm)?;
    let optimum = optimal_dual(instance)?;
    let basis = &optimum.basis;
    let sqrt_omega = linalg::sqrt(dual.omega().op())?;
    let (perp1, perp2) = ud_perp_states(instance);
    // Π_1 lives on ψ_2^⊥, Π_2 on ψ_1^⊥
    let perps = [perp2, perp1];

    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for j in 0..2 {
        let Some(rho) = dual.retro_states()[j].as_ref() else {
            skipped.push(j);
            continue;
        };
        let phi_proj = HermitianOperator::projector(basis.phi(j).amplitudes());
        let perp_form = PureState::normalize(&sqrt_omega.matrix().apply(perps[j].amplitudes()))?;
        entries.push(IdentificationEntry {
            outcome: j,
            purity_residual: (rho.purity() - 1.0).abs(),
            basis_distance: rho.op().max_abs_diff(&phi_proj),
            perp_form_distance: rho.op().max_abs_diff(&HermitianOperator::projector(perp_form.amplitudes())),
            detector_distance: dual.retro_detectors()[j].max_abs_diff(&phi_proj),
        });
    }
    let failure_state_distance = match (&dual.retro_states()[2], &optimum.rho0_ret) {
        (Some(a), Some(b)) => Some(a.op().max_abs_diff(b.op())),
        _ => None,
    };
    Ok(IdentificationReport {
        entries,
        skipped,
        failure_state_distance,
    })
}
