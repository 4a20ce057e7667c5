//! JSON file formats for ensembles and POVMs.
//!
//! Complex numbers are two-element arrays `[re, im]` and matrices are row-major
//! lists of rows. Floats are written in the shortest form that parses back to
//! the same `f64`, so a write/read cycle is exact.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use retrodictor_core::ensembles::{Ensemble, Povm, State, StateSpec, ValidationReport, ViolationKind};
use retrodictor_core::linalg::SquareMatrix;
use retrodictor_core::Error;

use crate::CliError;

pub type ComplexEntry = [f64; 2];
pub type MatrixEntries = Vec<Vec<ComplexEntry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub pure: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<ComplexEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixEntries>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub dim: usize,
    pub priors: Vec<f64>,
    pub states: Vec<StateEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmFile {
    pub dim: usize,
    pub elements: Vec<MatrixEntries>,
}

pub fn complex_entry(z: Complex64) -> ComplexEntry {
    [z.re, z.im]
}

pub fn matrix_entries(m: &SquareMatrix) -> MatrixEntries {
    m.rows().into_iter().map(|row| row.into_iter().map(complex_entry).collect()).collect()
}

fn to_vector(entries: &[ComplexEntry]) -> Vec<Complex64> {
    entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn to_matrix(rows: &MatrixEntries, subject: &str) -> Result<SquareMatrix, CliError> {
    let converted: Vec<Vec<Complex64>> = rows.iter().map(|r| to_vector(r)).collect();
    SquareMatrix::from_rows(&converted).map_err(|e| CliError::Input(format!("{subject}: matrix is not square ({e})")))
}

fn declared_dim(report: &mut ValidationReport, subject: String, declared: usize, found: usize) {
    if declared != found {
        report.push(subject, ViolationKind::DimensionMismatch, found as f64, declared as f64);
    }
}

impl EnsembleFile {
    pub fn from_ensemble(e: &Ensemble) -> Self {
        let states = e
            .states()
            .iter()
            .map(|s| match s {
                State::Pure(p) => StateEntry {
                    pure: true,
                    amplitudes: Some(p.amplitudes().iter().copied().map(complex_entry).collect()),
                    matrix: None,
                },
                State::Mixed(d) => StateEntry {
                    pure: false,
                    amplitudes: None,
                    matrix: Some(matrix_entries(d.matrix())),
                },
            })
            .collect();
        Self {
            dim: e.dim(),
            priors: e.priors().to_vec(),
            states,
        }
    }

    /// Converts to a validated ensemble, naming every violated invariant on failure.
    pub fn to_ensemble(&self) -> Result<Ensemble, CliError> {
        let mut specs = Vec::with_capacity(self.states.len());
        let mut report = ValidationReport::default();
        for (i, s) in self.states.iter().enumerate() {
            let subject = format!("states[{i}]");
            let spec = match (s.pure, &s.amplitudes, &s.matrix) {
                (true, Some(a), None) => StateSpec::Pure(to_vector(a)),
                (false, None, Some(m)) => StateSpec::Mixed(to_matrix(m, &subject)?),
                _ => {
                    return Err(CliError::Input(format!(
                        "{subject}: expected either {{\"pure\": true, \"amplitudes\": ...}} or {{\"matrix\": ...}}"
                    )))
                }
            };
            let found = match &spec {
                StateSpec::Pure(v) => v.len(),
                StateSpec::Mixed(m) => m.dim(),
            };
            declared_dim(&mut report, subject, self.dim, found);
            specs.push(spec);
        }
        report.violations.extend(Ensemble::validate_parts(&specs, &self.priors).violations);
        if !report.is_empty() {
            return Err(Error::Validation(report).into());
        }
        Ok(Ensemble::new(specs, self.priors.clone())?)
    }
}

impl PovmFile {
    pub fn from_povm(p: &Povm) -> Self {
        Self {
            dim: p.dim(),
            elements: p.elements().iter().map(|e| matrix_entries(e.matrix())).collect(),
        }
    }

    pub fn to_povm(&self) -> Result<Povm, CliError> {
        let mut report = ValidationReport::default();
        let mut elements = Vec::with_capacity(self.elements.len());
        for (k, rows) in self.elements.iter().enumerate() {
            let subject = format!("elements[{k}]");
            let m = to_matrix(rows, &subject)?;
            declared_dim(&mut report, subject, self.dim, m.dim());
            elements.push(m);
        }
        report.violations.extend(Povm::validate_elements(&elements).violations);
        if !report.is_empty() {
            return Err(Error::Validation(report).into());
        }
        Ok(Povm::new(elements)?)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {what} file {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("malformed {what} file {}: {e}", path.display())))
}

pub fn load_ensemble(path: &Path) -> Result<Ensemble, CliError> {
    read_json::<EnsembleFile>(path, "ensemble")?.to_ensemble()
}

pub fn load_povm(path: &Path) -> Result<Povm, CliError> {
    read_json::<PovmFile>(path, "POVM")?.to_povm()
}
