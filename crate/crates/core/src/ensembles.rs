//! States, priors and measurements, with validation, and the source function
//! `Ω = Σ_i η_i ρ_i` built from a prepared ensemble.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianOperator, SquareMatrix, TOL_HERMITIAN};

pub const TOL_NORM: f64 = 1e-10;
pub const TOL_PSD: f64 = 1e-10;
pub const TOL_TRACE: f64 = 1e-10;
pub const TOL_PRIOR_SUM: f64 = 1e-12;
pub const TOL_COMPLETENESS: f64 = 1e-10;
pub const TOL_UNBIASED: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Empty,
    LengthMismatch,
    DimensionMismatch,
    NonFinite,
    NotHermitian,
    NotPositiveSemidefinite,
    TraceNotOne,
    NotNormalized,
    NegativePrior,
    PriorSum,
    Completeness,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Empty => "empty list",
            ViolationKind::LengthMismatch => "length mismatch",
            ViolationKind::DimensionMismatch => "dimension mismatch",
            ViolationKind::NonFinite => "non-finite entry",
            ViolationKind::NotHermitian => "not Hermitian",
            ViolationKind::NotPositiveSemidefinite => "not positive semidefinite",
            ViolationKind::TraceNotOne => "trace differs from 1",
            ViolationKind::NotNormalized => "vector not normalized",
            ViolationKind::NegativePrior => "negative prior",
            ViolationKind::PriorSum => "sum of priors differs from 1",
            ViolationKind::Completeness => "elements do not sum to identity",
        };
        f.write_str(s)
    }
}

/// One violated invariant with its measured residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub subject: String,
    pub kind: ViolationKind,
    pub residual: f64,
    pub tolerance: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} (residual {:.3e}, tolerance {:.0e})",
            self.subject, self.kind, self.residual, self.tolerance
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn find(&self, kind: ViolationKind) -> Option<&Violation> {
        self.violations.iter().find(|v| v.kind == kind)
    }

    pub fn push(&mut self, subject: impl Into<String>, kind: ViolationKind, residual: f64, tolerance: f64) {
        self.violations.push(Violation {
            subject: subject.into(),
            kind,
            residual,
            tolerance,
        });
    }

    fn into_result(self) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut report = ValidationReport::default();
        check_vector(&amplitudes, "state", &mut report);
        report.into_result()?;
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalize(v: &[Complex64]) -> Result<Self> {
        let amplitudes = linalg::normalized(v).ok_or(Error::InvalidParameter {
            name: "state",
            reason: "cannot normalize a zero or non-finite vector".into(),
        })?;
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| linalg::re(x)).collect())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator {
            op: HermitianOperator::projector(&self.amplitudes),
        }
    }
}

/// Positive semidefinite operator of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let mut report = ValidationReport::default();
        check_density(op.matrix(), "density operator", &mut report);
        report.into_result()?;
        Ok(Self { op })
    }

    pub fn from_matrix(m: SquareMatrix) -> Result<Self> {
        let mut report = ValidationReport::default();
        check_density(&m, "density operator", &mut report);
        report.into_result()?;
        Ok(Self {
            op: HermitianOperator::new(m)?,
        })
    }

    /// For operators whose invariants are checked by the caller through residuals.
    pub(crate) fn new_unchecked(op: HermitianOperator) -> Self {
        Self { op }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &SquareMatrix {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> f64 {
        self.op.trace_product(&self.op).expect("same operator")
    }
}

/// Raw, unvalidated description of an ensemble member.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Pure(Vec<Complex64>),
    Mixed(SquareMatrix),
}

/// A validated ensemble member. Pure states keep their amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Pure(p) => p.dim(),
            State::Mixed(d) => d.dim(),
        }
    }

    pub fn density(&self) -> DensityOperator {
        match self {
            State::Pure(p) => p.projector(),
            State::Mixed(d) => d.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            State::Pure(p) => Some(p),
            State::Mixed(_) => None,
        }
    }
}

impl From<PureState> for State {
    fn from(p: PureState) -> Self {
        State::Pure(p)
    }
}

impl From<DensityOperator> for State {
    fn from(d: DensityOperator) -> Self {
        State::Mixed(d)
    }
}

/// States `ρ_i` prepared with prior probabilities `η_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    states: Vec<State>,
    priors: Vec<f64>,
}

impl Ensemble {
    /// Validates raw input and builds the ensemble.
    pub fn new(states: Vec<StateSpec>, priors: Vec<f64>) -> Result<Self> {
        Self::validate_parts(&states, &priors).into_result()?;
        let states = states
            .into_iter()
            .map(|s| {
                Ok(match s {
                    StateSpec::Pure(v) => State::Pure(PureState { amplitudes: v }),
                    StateSpec::Mixed(m) => State::Mixed(DensityOperator {
                        op: HermitianOperator::new(m)?,
                    }),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { states, priors })
    }

    /// Builds an ensemble from already validated states; only priors and dimensions are checked.
    pub fn from_states(states: Vec<State>, priors: Vec<f64>) -> Result<Self> {
        let mut report = ValidationReport::default();
        check_priors(&priors, states.len(), &mut report);
        check_common_dim(states.iter().map(State::dim), "states", &mut report);
        report.into_result()?;
        Ok(Self { states, priors })
    }

    pub fn from_pure(states: Vec<PureState>, priors: Vec<f64>) -> Result<Self> {
        Self::from_states(states.into_iter().map(State::Pure).collect(), priors)
    }

    /// Lists every violated invariant of a candidate ensemble.
    pub fn validate_parts(states: &[StateSpec], priors: &[f64]) -> ValidationReport {
        let mut report = ValidationReport::default();
        check_priors(priors, states.len(), &mut report);
        check_common_dim(
            states.iter().map(|s| match s {
                StateSpec::Pure(v) => v.len(),
                StateSpec::Mixed(m) => m.dim(),
            }),
            "states",
            &mut report,
        );
        for (i, s) in states.iter().enumerate() {
            let subject = format!("states[{i}]");
            match s {
                StateSpec::Pure(v) => check_vector(v, &subject, &mut report),
                StateSpec::Mixed(m) => check_density(m, &subject, &mut report),
            }
        }
        report
    }

    /// Always empty for a constructed ensemble; present for symmetry with raw validation.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        check_priors(&self.priors, self.states.len(), &mut report);
        for (i, s) in self.states.iter().enumerate() {
            let d = s.density();
            check_density(d.matrix(), &format!("states[{i}]"), &mut report);
        }
        report
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn density(&self, i: usize) -> DensityOperator {
        self.states[i].density()
    }

    pub fn densities(&self) -> Vec<DensityOperator> {
        self.states.iter().map(State::density).collect()
    }

    pub fn source(&self) -> Result<SourceFunction> {
        source_from_ensemble(self)
    }
}

/// Positive operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(elements: Vec<SquareMatrix>) -> Result<Self> {
        Self::validate_elements(&elements).into_result()?;
        let elements = elements
            .into_iter()
            .map(HermitianOperator::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { elements })
    }

    pub fn from_operators(elements: Vec<HermitianOperator>) -> Result<Self> {
        let raw: Vec<SquareMatrix> = elements.iter().map(|e| e.matrix().clone()).collect();
        Self::validate_elements(&raw).into_result()?;
        Ok(Self { elements })
    }

    /// Projective measurement in the computational basis.
    pub fn computational_basis(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|k| {
                let mut diag = vec![0.0; dim];
                diag[k] = 1.0;
                HermitianOperator::diagonal(&diag)
            })
            .collect();
        Self { elements }
    }

    pub fn validate_elements(elements: &[SquareMatrix]) -> ValidationReport {
        let mut report = ValidationReport::default();
        if elements.is_empty() {
            report.push("elements", ViolationKind::Empty, 0.0, 0.0);
            return report;
        }
        check_common_dim(elements.iter().map(SquareMatrix::dim), "elements", &mut report);
        if !report.is_empty() {
            return report;
        }
        let mut all_hermitian = true;
        for (j, m) in elements.iter().enumerate() {
            let subject = format!("elements[{j}]");
            if !m.is_finite() {
                report.push(subject, ViolationKind::NonFinite, f64::NAN, 0.0);
                all_hermitian = false;
                continue;
            }
            let herm = m.hermiticity_residual();
            if herm > TOL_HERMITIAN {
                report.push(subject, ViolationKind::NotHermitian, herm, TOL_HERMITIAN);
                all_hermitian = false;
                continue;
            }
            let op = HermitianOperator::new(m.clone()).expect("checked Hermitian");
            let min = op.min_eigenvalue();
            if min < -TOL_PSD {
                report.push(subject, ViolationKind::NotPositiveSemidefinite, -min, TOL_PSD);
            }
        }
        if all_hermitian {
            let total = linalg::sum_matrices(elements.iter()).expect("non-empty");
            let residual = total.max_abs_diff(&SquareMatrix::identity(total.dim()));
            if residual > TOL_COMPLETENESS {
                report.push("elements", ViolationKind::Completeness, residual, TOL_COMPLETENESS);
            }
        }
        report
    }

    pub fn validate(&self) -> ValidationReport {
        let raw: Vec<SquareMatrix> = self.elements.iter().map(|e| e.matrix().clone()).collect();
        Self::validate_elements(&raw)
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

/// The source function `Ω` and whether it is maximally mixed.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceFunction {
    pub omega: DensityOperator,
    pub unbiased: bool,
}

impl SourceFunction {
    pub fn new(omega: DensityOperator) -> Self {
        let d = omega.dim();
        let unbiased = omega
            .op()
            .max_abs_diff(&HermitianOperator::identity(d).scale(1.0 / d as f64))
            <= TOL_UNBIASED;
        Self { omega, unbiased }
    }

    pub fn op(&self) -> &HermitianOperator {
        self.omega.op()
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }
}

/// `Ω = Σ_i η_i ρ_i`
pub fn source_from_ensemble(e: &Ensemble) -> Result<SourceFunction> {
    let d = e.dim();
    let mut acc = HermitianOperator::zeros(d);
    for (state, &eta) in e.states.iter().zip(&e.priors) {
        acc = acc.add(&state.density().op().scale(eta))?;
    }
    Ok(SourceFunction::new(DensityOperator::new(acc)?))
}

fn check_priors(priors: &[f64], n_states: usize, report: &mut ValidationReport) {
    if n_states == 0 {
        report.push("states", ViolationKind::Empty, 0.0, 0.0);
    }
    if priors.len() != n_states {
        report.push(
            "priors",
            ViolationKind::LengthMismatch,
            (priors.len() as f64 - n_states as f64).abs(),
            0.0,
        );
    }
    for (i, &p) in priors.iter().enumerate() {
        if !p.is_finite() {
            report.push(format!("priors[{i}]"), ViolationKind::NonFinite, f64::NAN, 0.0);
        } else if p < 0.0 {
            report.push(format!("priors[{i}]"), ViolationKind::NegativePrior, -p, 0.0);
        }
    }
    if !priors.is_empty() {
        let sum: f64 = priors.iter().sum();
        let residual = (sum - 1.0).abs();
        if !(residual <= TOL_PRIOR_SUM) {
            report.push("priors", ViolationKind::PriorSum, residual, TOL_PRIOR_SUM);
        }
    }
}

fn check_common_dim(dims: impl Iterator<Item = usize>, subject: &str, report: &mut ValidationReport) {
    let dims: Vec<usize> = dims.collect();
    if let Some(&first) = dims.first() {
        if first == 0 {
            report.push(subject, ViolationKind::DimensionMismatch, 0.0, 0.0);
        }
        if let Some(&bad) = dims.iter().find(|&&d| d != first) {
            report.push(
                subject,
                ViolationKind::DimensionMismatch,
                (bad as f64 - first as f64).abs(),
                0.0,
            );
        }
    }
}

fn check_vector(v: &[Complex64], subject: &str, report: &mut ValidationReport) {
    if v.is_empty() {
        report.push(subject, ViolationKind::Empty, 0.0, 0.0);
        return;
    }
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        report.push(subject, ViolationKind::NonFinite, f64::NAN, 0.0);
        return;
    }
    let residual = (linalg::norm(v) - 1.0).abs();
    if residual > TOL_NORM {
        report.push(subject, ViolationKind::NotNormalized, residual, TOL_NORM);
    }
}

fn check_density(m: &SquareMatrix, subject: &str, report: &mut ValidationReport) {
    if !m.is_finite() {
        report.push(subject, ViolationKind::NonFinite, f64::NAN, 0.0);
        return;
    }
    let herm = m.hermiticity_residual();
    if herm > TOL_HERMITIAN {
        report.push(subject, ViolationKind::NotHermitian, herm, TOL_HERMITIAN);
        return;
    }
    let op = HermitianOperator::new(m.clone()).expect("checked Hermitian");
    let min = op.min_eigenvalue();
    if min < -TOL_PSD {
        report.push(subject, ViolationKind::NotPositiveSemidefinite, -min, TOL_PSD);
    }
    let residual = (op.trace() - 1.0).abs();
    if residual > TOL_TRACE {
        report.push(subject, ViolationKind::TraceNotOne, residual, TOL_TRACE);
    }
}
