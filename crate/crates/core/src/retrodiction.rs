//! Predictive and retrodictive probabilities, and the source-dependent
//! transform that makes retrodiction a Born rule in its own right.
//!
//! Given an ensemble `{η_i, ρ_i}` with source `Ω = Σ η_i ρ_i` and detectors
//! `{Π_j}` clicking with probabilities `μ_j = Tr(Π_j Ω)`, the transform is
//!
//! ```text
//! Π_i^ret = Ω^{-1/2} η_i ρ_i Ω^{-1/2}        (indexed like the ensemble)
//! ρ_j^ret = Ω^{1/2} Π_j Ω^{1/2} / μ_j        (indexed like the POVM)
//! ```
//!
//! so that `P(a_i | b_j) = Tr(Π_i^ret ρ_j^ret)`, `Σ_i Π_i^ret = I`,
//! `Tr ρ_j^ret = 1` and `Σ_j μ_j ρ_j^ret = Ω`.

use serde::Serialize;

use crate::ensembles::{DensityOperator, Ensemble, Povm, SourceFunction, State};
use crate::error::{Error, Result};
use crate::linalg::{self, HermitianOperator, MatrixFunction, SpectralOptions};

/// Outcomes at or below this probability have no retrodictive state.
pub const MU_FLOOR: f64 = 1e-12;
/// Probabilities within this distance of `[0, 1]` are clamped; further out is an error.
pub const PROBABILITY_SLACK: f64 = 1e-12;
/// Tolerance for the transform identities enforced by [`retro_transform`].
pub const TOL_IDENTITY: f64 = 1e-10;

fn clamp_probability(p: f64, quantity: &'static str) -> Result<f64> {
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(Error::NumericIntegrity { quantity, value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn check_index(what: &'static str, index: usize, len: usize) -> Result<()> {
    if index >= len {
        return Err(Error::IndexOutOfRange { what, index, len });
    }
    Ok(())
}

/// Born rule `P(b_j | a_i) = Tr(Π_j ρ_i)`.
pub fn predictive_prob(element: &HermitianOperator, state: &DensityOperator) -> Result<f64> {
    check_dims(element.dim(), state.dim())?;
    clamp_probability(element.trace_product(state.op())?, "predictive probability")
}

/// Detector click probabilities `μ_j = Tr(Π_j Ω)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    pub mu: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.mu.iter().sum()
    }
}

pub fn outcome_probs(povm: &Povm, omega: &SourceFunction) -> Result<OutcomeDistribution> {
    check_dims(omega.dim(), povm.dim())?;
    let mu = povm
        .elements()
        .iter()
        .map(|e| clamp_probability(e.trace_product(omega.op())?, "outcome probability"))
        .collect::<Result<Vec<_>>>()?;
    let dist = OutcomeDistribution { mu };
    let total = dist.total();
    if (total - 1.0).abs() > TOL_IDENTITY {
        return Err(Error::NumericIntegrity {
            quantity: "sum of outcome probabilities",
            value: total,
        });
    }
    Ok(dist)
}

/// Retrodictive probability from Bayes' theorem:
/// `P(a_i | b_j) = η_i Tr(Π_j ρ_i) / Σ_k η_k Tr(Π_j ρ_k)`.
pub fn retrodictive_prob_bayes(ensemble: &Ensemble, povm: &Povm, i: usize, j: usize) -> Result<f64> {
    check_dims(ensemble.dim(), povm.dim())?;
    check_index("ensemble", i, ensemble.len())?;
    check_index("povm", j, povm.len())?;
    let element = &povm.elements()[j];
    let mut numerator = 0.0;
    let mut mu = 0.0;
    for (k, (state, &eta)) in ensemble.states().iter().zip(ensemble.priors()).enumerate() {
        let joint = eta * predictive_prob(element, &state.density())?;
        if k == i {
            numerator = joint;
        }
        mu += joint;
    }
    if mu <= MU_FLOOR {
        return Err(Error::ZeroProbabilityOutcome {
            index: j,
            mu,
            floor: MU_FLOOR,
        });
    }
    clamp_probability(numerator / mu, "retrodictive probability")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformOptions {
    pub spectral: SpectralOptions,
    pub mu_floor: f64,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            spectral: SpectralOptions::default(),
            mu_floor: MU_FLOOR,
        }
    }
}

impl TransformOptions {
    pub fn support_restricted() -> Self {
        Self {
            spectral: SpectralOptions {
                support_restricted: true,
                ..SpectralOptions::default()
            },
            ..Self::default()
        }
    }
}

/// Max-abs residuals of the transform identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformResiduals {
    /// `‖Σ_i Π_i^ret − I‖` (against the support projector in support-restricted mode).
    pub completeness: f64,
    /// `max_j |Tr ρ_j^ret − 1|` over defined retrodictive states.
    pub trace: f64,
    /// `‖Σ_j μ_j ρ_j^ret − Ω‖`
    pub source: f64,
}

impl TransformResiduals {
    pub fn max(&self) -> f64 {
        self.completeness.max(self.trace).max(self.source)
    }
}

/// Retrodictive detectors and states produced by the transform.
#[derive(Debug, Clone)]
pub struct RetroDual {
    retro_detectors: Vec<HermitianOperator>,
    retro_states: Vec<Option<DensityOperator>>,
    mu: OutcomeDistribution,
    omega: SourceFunction,
    support: HermitianOperator,
    residuals: TransformResiduals,
}

impl RetroDual {
    /// Runs the transform without enforcing the identities; see [`retro_transform`].
    pub fn compute(ensemble: &Ensemble, povm: &Povm, options: &TransformOptions) -> Result<Self> {
        check_dims(ensemble.dim(), povm.dim())?;
        let omega = ensemble.source()?;
        let spectrum = omega.op().eig();
        let inv_sqrt = linalg::spectral_map_from(&spectrum, MatrixFunction::InverseSqrt, &options.spectral)?;
        let sqrt = linalg::spectral_map_from(&spectrum, MatrixFunction::Sqrt, &options.spectral)?;
        let floor = options.spectral.min_eig;
        let support = spectrum.rebuild_with(|l| if l >= floor { 1.0 } else { 0.0 });

        let retro_detectors = ensemble
            .states()
            .iter()
            .zip(ensemble.priors())
            .map(|(state, &eta)| state.density().op().scale(eta).conjugate_by(&inv_sqrt))
            .collect::<Result<Vec<_>>>()?;

        let mu = outcome_probs(povm, &omega)?;
        let retro_states = povm
            .elements()
            .iter()
            .zip(&mu.mu)
            .map(|(element, &m)| {
                if m <= options.mu_floor {
                    return Ok(None);
                }
                let op = element.conjugate_by(&sqrt)?.scale(1.0 / m);
                Ok(Some(DensityOperator::new_unchecked(op)))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut dual = Self {
            retro_detectors,
            retro_states,
            mu,
            omega,
            support,
            residuals: TransformResiduals {
                completeness: 0.0,
                trace: 0.0,
                source: 0.0,
            },
        };
        dual.residuals = dual.measure_residuals();
        Ok(dual)
    }

    fn measure_residuals(&self) -> TransformResiduals {
        let d = self.omega.dim();
        let total = self
            .retro_detectors
            .iter()
            .fold(HermitianOperator::zeros(d), |acc, p| acc.add(p).expect("same dimension"));
        let completeness = total.max_abs_diff(&self.support);

        let trace = self
            .retro_states
            .iter()
            .flatten()
            .map(|r| (r.op().trace() - 1.0).abs())
            .fold(0.0, f64::max);

        // undefined states carry weight μ_j ≤ floor; the source identity is checked without them
        let rebuilt = self
            .retro_states
            .iter()
            .zip(&self.mu.mu)
            .filter_map(|(r, &m)| r.as_ref().map(|r| r.op().scale(m)))
            .fold(HermitianOperator::zeros(d), |acc, p| acc.add(&p).expect("same dimension"));
        let source = rebuilt.max_abs_diff(self.omega.op());

        TransformResiduals {
            completeness,
            trace,
            source,
        }
    }

    pub fn residuals(&self) -> TransformResiduals {
        self.residuals
    }

    /// `Π_i^ret`, indexed like the ensemble.
    pub fn retro_detectors(&self) -> &[HermitianOperator] {
        &self.retro_detectors
    }

    /// The retrodictive detectors as a validated POVM.
    pub fn retro_povm(&self) -> Result<Povm> {
        Povm::from_operators(self.retro_detectors.clone())
    }

    /// `ρ_j^ret`, indexed like the POVM; `None` where `μ_j` is at or below the floor.
    pub fn retro_states(&self) -> &[Option<DensityOperator>] {
        &self.retro_states
    }

    pub fn retro_state(&self, j: usize) -> Result<&DensityOperator> {
        check_index("povm", j, self.retro_states.len())?;
        self.retro_states[j].as_ref().ok_or(Error::ZeroProbabilityOutcome {
            index: j,
            mu: self.mu.mu[j],
            floor: MU_FLOOR,
        })
    }

    /// Outcome indices whose retrodictive state is undefined.
    pub fn undefined_outcomes(&self) -> Vec<usize> {
        (0..self.retro_states.len())
            .filter(|&j| self.retro_states[j].is_none())
            .collect()
    }

    pub fn mu(&self) -> &OutcomeDistribution {
        &self.mu
    }

    pub fn omega(&self) -> &SourceFunction {
        &self.omega
    }

    /// Retrodictive states with priors `μ_j`, as an ensemble in its own right.
    pub fn retro_ensemble(&self) -> Result<Ensemble> {
        let (states, priors): (Vec<State>, Vec<f64>) = self
            .retro_states
            .iter()
            .zip(&self.mu.mu)
            .filter_map(|(r, &m)| r.as_ref().map(|r| (State::Mixed(r.clone()), m)))
            .unzip();
        Ensemble::from_states(states, priors)
    }

    /// `P(a_i | b_j)` for every pair; `None` in columns with an undefined outcome.
    pub fn conditional_matrix(&self) -> Result<Vec<Vec<Option<f64>>>> {
        (0..self.retro_detectors.len())
            .map(|i| {
                (0..self.retro_states.len())
                    .map(|j| match retrodictive_prob_symmetric(self, i, j) {
                        Ok(p) => Ok(Some(p)),
                        Err(Error::ZeroProbabilityOutcome { .. }) => Ok(None),
                        Err(e) => Err(e),
                    })
                    .collect()
            })
            .collect()
    }
}

/// The transform, with its identities enforced at [`TOL_IDENTITY`].
pub fn retro_transform(ensemble: &Ensemble, povm: &Povm) -> Result<RetroDual> {
    retro_transform_with(ensemble, povm, &TransformOptions::default())
}

pub fn retro_transform_with(ensemble: &Ensemble, povm: &Povm, options: &TransformOptions) -> Result<RetroDual> {
    let dual = RetroDual::compute(ensemble, povm, options)?;
    let r = dual.residuals;
    for (quantity, value) in [
        ("retrodictive completeness", r.completeness),
        ("retrodictive state trace", r.trace),
        ("retrodictive source identity", r.source),
    ] {
        if !(value <= TOL_IDENTITY) {
            return Err(Error::NumericIntegrity { quantity, value });
        }
    }
    Ok(dual)
}

/// Born rule for the retrodictive operators: `Tr(Π_i^ret ρ_j^ret)`.
pub fn retrodictive_prob_symmetric(dual: &RetroDual, i: usize, j: usize) -> Result<f64> {
    check_index("ensemble", i, dual.retro_detectors.len())?;
    let state = dual.retro_state(j)?;
    clamp_probability(
        dual.retro_detectors[i].trace_product(state.op())?,
        "retrodictive probability",
    )
}

/// The construction valid for maximally mixed sources only:
/// `Π_i^ret = D η_i ρ_i`, `ρ_j^ret = Π_j / Tr Π_j`.
#[derive(Debug, Clone)]
pub struct UnbiasedDual {
    pub retro_detectors: Vec<HermitianOperator>,
    pub retro_states: Vec<Option<DensityOperator>>,
}

pub fn unbiased_dual(ensemble: &Ensemble, povm: &Povm) -> Result<UnbiasedDual> {
    check_dims(ensemble.dim(), povm.dim())?;
    let d = ensemble.dim() as f64;
    let retro_detectors = ensemble
        .states()
        .iter()
        .zip(ensemble.priors())
        .map(|(s, &eta)| s.density().op().scale(d * eta))
        .collect();
    let retro_states = povm
        .elements()
        .iter()
        .map(|e| {
            let tr = e.trace();
            (tr > MU_FLOOR).then(|| DensityOperator::new_unchecked(e.scale(1.0 / tr)))
        })
        .collect();
    Ok(UnbiasedDual {
        retro_detectors,
        retro_states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{PureState, StateSpec};
    use crate::linalg::{re, SquareMatrix};
    use approx::assert_abs_diff_eq;

    fn ket(amps: &[f64]) -> Vec<num_complex::Complex64> {
        amps.iter().map(|&x| re(x)).collect()
    }

    fn ud_ensemble(eta1: f64, alpha: f64) -> Ensemble {
        let (c, s) = (alpha.cos(), alpha.sin());
        Ensemble::new(
            vec![StateSpec::Pure(ket(&[c, s])), StateSpec::Pure(ket(&[c, -s]))],
            vec![eta1, 1.0 - eta1],
        )
        .unwrap()
    }

    #[test]
    fn predictive_examples() {
        let zero = PureState::from_real(&[1.0, 0.0]).unwrap();
        let proj = zero.projector();
        assert_eq!(predictive_prob(proj.op(), &proj).unwrap(), 1.0);
        let mixed = DensityOperator::maximally_mixed(2);
        assert_abs_diff_eq!(predictive_prob(proj.op(), &mixed).unwrap(), 0.5);
        assert!(matches!(
            predictive_prob(proj.op(), &DensityOperator::maximally_mixed(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn two_outcome_probabilities() {
        let e = ud_ensemble(0.7, 0.5);
        let v = ket(&[0.6, 0.8]);
        let p = SquareMatrix::outer(&v, &v);
        let povm = Povm::new(vec![p.clone(), &SquareMatrix::identity(2) - &p]).unwrap();
        let src = e.source().unwrap();
        let mu = outcome_probs(&povm, &src).unwrap();
        let expected = HermitianOperator::new(p).unwrap().trace_product(src.op()).unwrap();
        assert_abs_diff_eq!(mu.mu[0], expected, epsilon = 1e-15);
        assert_abs_diff_eq!(mu.mu[1], 1.0 - expected, epsilon = 1e-15);

        let basis = outcome_probs(&Povm::computational_basis(2), &SourceFunction::new(DensityOperator::maximally_mixed(2)))
            .unwrap();
        assert_eq!(basis.mu, vec![0.5, 0.5]);
    }

    #[test]
    fn bayes_on_orthogonal_states() {
        let e = Ensemble::new(
            vec![StateSpec::Pure(ket(&[1.0, 0.0])), StateSpec::Pure(ket(&[0.0, 1.0]))],
            vec![0.3, 0.7],
        )
        .unwrap();
        let povm = Povm::computational_basis(2);
        assert_eq!(retrodictive_prob_bayes(&e, &povm, 0, 0).unwrap(), 1.0);
        assert_eq!(retrodictive_prob_bayes(&e, &povm, 1, 0).unwrap(), 0.0);
    }

    #[test]
    fn bayes_rejects_impossible_outcome() {
        let e = Ensemble::new(vec![StateSpec::Pure(ket(&[1.0, 0.0]))], vec![1.0]).unwrap();
        let povm = Povm::computational_basis(2);
        assert!(matches!(
            retrodictive_prob_bayes(&e, &povm, 0, 1),
            Err(Error::ZeroProbabilityOutcome { index: 1, .. })
        ));
    }

    #[test]
    fn unbiased_source_reduces_to_barnett_construction() {
        // |0>,|1>,|+>,|-> with equal priors: Ω = I/2
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let e = Ensemble::new(
            vec![
                StateSpec::Pure(ket(&[1.0, 0.0])),
                StateSpec::Pure(ket(&[0.0, 1.0])),
                StateSpec::Pure(ket(&[h, h])),
                StateSpec::Pure(ket(&[h, -h])),
            ],
            vec![0.25; 4],
        )
        .unwrap();
        assert!(e.source().unwrap().unbiased);
        let v = ket(&[0.8, 0.6]);
        let p = SquareMatrix::outer(&v, &v).scale_real(0.5);
        let povm = Povm::new(vec![p.clone(), &SquareMatrix::identity(2) - &p]).unwrap();
        let dual = retro_transform(&e, &povm).unwrap();
        let barnett = unbiased_dual(&e, &povm).unwrap();
        for (a, b) in dual.retro_detectors().iter().zip(&barnett.retro_detectors) {
            assert!(a.max_abs_diff(b) < 1e-10);
        }
        for (a, b) in dual.retro_states().iter().zip(&barnett.retro_states) {
            assert!(a.as_ref().unwrap().op().max_abs_diff(b.as_ref().unwrap().op()) < 1e-10);
        }
        for i in 0..4 {
            for j in 0..2 {
                let bayes = retrodictive_prob_bayes(&e, &povm, i, j).unwrap();
                let sym = barnett.retro_detectors[i]
                    .trace_product(barnett.retro_states[j].as_ref().unwrap().op())
                    .unwrap();
                assert_abs_diff_eq!(bayes, sym, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn identities_on_biased_ud_source() {
        let e = ud_ensemble(0.8, 0.35);
        let v = ket(&[0.28, 0.96]);
        let p = SquareMatrix::outer(&v, &v);
        let povm = Povm::new(vec![p.clone(), &SquareMatrix::identity(2) - &p]).unwrap();
        let dual = retro_transform(&e, &povm).unwrap();
        assert!(dual.residuals().max() < 1e-12);
        assert!(dual.retro_povm().is_ok());
        let m = dual.conditional_matrix().unwrap();
        for j in 0..2 {
            let column: f64 = (0..2).map(|i| m[i][j].unwrap()).sum();
            assert_abs_diff_eq!(column, 1.0, epsilon = 1e-12);
            for i in 0..2 {
                let bayes = retrodictive_prob_bayes(&e, &povm, i, j).unwrap();
                assert_abs_diff_eq!(m[i][j].unwrap(), bayes, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn zero_probability_outcome_is_flagged() {
        let e = Ensemble::new(
            vec![StateSpec::Pure(ket(&[1.0, 0.0])), StateSpec::Pure(ket(&[0.0, 1.0]))],
            vec![0.5, 0.5],
        )
        .unwrap();
        let povm = Povm::new(vec![
            SquareMatrix::identity(2),
            SquareMatrix::zeros(2),
        ])
        .unwrap();
        let dual = retro_transform(&e, &povm).unwrap();
        assert_eq!(dual.undefined_outcomes(), vec![1]);
        assert!(matches!(
            retrodictive_prob_symmetric(&dual, 0, 1),
            Err(Error::ZeroProbabilityOutcome { index: 1, .. })
        ));
        assert_abs_diff_eq!(retrodictive_prob_symmetric(&dual, 0, 0).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rank_deficient_source_is_singular() {
        let e = Ensemble::new(vec![StateSpec::Pure(ket(&[0.6, 0.8]))], vec![1.0]).unwrap();
        let povm = Povm::computational_basis(2);
        assert!(matches!(
            retro_transform(&e, &povm),
            Err(Error::SingularOperator { .. })
        ));
        let dual = retro_transform_with(&e, &povm, &TransformOptions::support_restricted()).unwrap();
        // on its support the single detector is the projector onto the state
        let expected = e.density(0);
        assert!(dual.retro_detectors()[0].max_abs_diff(expected.op()) < 1e-12);
        assert_abs_diff_eq!(retrodictive_prob_symmetric(&dual, 0, 1).unwrap(), 1.0, epsilon = 1e-12);
    }
}
