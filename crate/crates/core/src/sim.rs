//! Seeded Monte Carlo sampling of the prepare-and-measure experiment.
//!
//! Trials are split into fixed-size shards. Shard `k` draws from a SplitMix64
//! stream seeded with `seed ^ k`, and shard tallies are merged in shard order,
//! so the counts depend only on `(inputs, n, seed)` and not on the thread pool.

use rand::RngCore;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{Ensemble, Povm};
use crate::error::{Error, Result};
use crate::retrodiction::{self, RetroDual, TransformOptions, MU_FLOOR};

pub const RNG_ALGORITHM: &str = "splitmix64";
pub const SHARD_SIZE: u64 = 1 << 16;
/// Table entries below this are treated as structural zeros and never drawn.
pub const STRUCTURAL_ZERO: f64 = 1e-14;
/// Width of the statistical acceptance band, in binomial standard deviations.
pub const SIGMA_BAND: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCounts {
    pub n_total: u64,
    /// `counts[i][j]`: trials that prepared state `i` and observed outcome `j`.
    pub counts: Vec<Vec<u64>>,
    pub seed: u64,
    pub rng_algorithm: String,
}

impl SampleCounts {
    pub fn row_total(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    pub fn column_total(&self, j: usize) -> u64 {
        self.counts.iter().map(|row| row[j]).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// Inverse-CDF table over a finite distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    cdf: Vec<f64>,
}

impl CdfTable {
    /// Builds the table with compensated summation. Entries below
    /// [`STRUCTURAL_ZERO`] are dropped, and the last positive bucket is pinned
    /// to exactly 1 so every uniform draw in `[0, 1)` lands in range.
    pub fn new(probabilities: &[f64]) -> Result<Self> {
        let cleaned: Vec<f64> = probabilities
            .iter()
            .map(|&p| if p < STRUCTURAL_ZERO { 0.0 } else { p })
            .collect();
        let total = neumaier_sum(&cleaned);
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::NumericIntegrity {
                quantity: "sampling table mass",
                value: total,
            });
        }
        let last = cleaned.iter().rposition(|&p| p > 0.0).expect("positive mass");
        let mut cdf = Vec::with_capacity(cleaned.len());
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for (k, &p) in cleaned.iter().enumerate() {
            let t = sum + p;
            carry += if sum.abs() >= p.abs() { (sum - t) + p } else { (p - t) + sum };
            sum = t;
            cdf.push(if k >= last { 1.0 } else { ((sum + carry) / total).min(1.0) });
        }
        Ok(Self { cdf })
    }

    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }

    /// Smallest index `k` with `u < cdf[k]`; zero-probability buckets are never chosen.
    pub fn draw(&self, u: f64) -> usize {
        self.cdf.partition_point(|&c| c <= u)
    }
}

fn neumaier_sum(values: &[f64]) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for &v in values {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + carry
}

/// Uniform double in `[0, 1)` from the top 53 bits.
fn uniform(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Joint probabilities `Tr(Π_j ρ_i)` for every state and outcome.
pub fn likelihood_table(ensemble: &Ensemble, povm: &Povm) -> Result<Vec<Vec<f64>>> {
    if ensemble.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: ensemble.dim(),
            found: povm.dim(),
        });
    }
    ensemble
        .densities()
        .iter()
        .map(|rho| povm.elements().iter().map(|e| retrodiction::predictive_prob(e, rho)).collect())
        .collect()
}

/// Draws `n` trials: a state `i ~ η`, then an outcome `j ~ Tr(Π_j ρ_i)`.
pub fn sample(ensemble: &Ensemble, povm: &Povm, n: u64, seed: u64) -> Result<SampleCounts> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "at least one trial is required".into(),
        });
    }
    let prior_table = CdfTable::new(ensemble.priors())?;
    let outcome_tables = likelihood_table(ensemble, povm)?
        .iter()
        .map(|row| CdfTable::new(row))
        .collect::<Result<Vec<_>>>()?;
    let (n_states, n_outcomes) = (ensemble.len(), povm.len());

    let shards = n.div_ceil(SHARD_SIZE);
    let tallies: Vec<Vec<u64>> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let trials = SHARD_SIZE.min(n - shard * SHARD_SIZE);
            let mut rng = SplitMix64::seed_from_u64(seed ^ shard);
            let mut local = vec![0u64; n_states * n_outcomes];
            for _ in 0..trials {
                let i = prior_table.draw(uniform(&mut rng));
                let j = outcome_tables[i].draw(uniform(&mut rng));
                local[i * n_outcomes + j] += 1;
            }
            local
        })
        .collect();

    let mut flat = vec![0u64; n_states * n_outcomes];
    for local in &tallies {
        for (acc, x) in flat.iter_mut().zip(local) {
            *acc += x;
        }
    }
    Ok(SampleCounts {
        n_total: n,
        counts: flat.chunks(n_outcomes).map(<[u64]>::to_vec).collect(),
        seed,
        rng_algorithm: RNG_ALGORITHM.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    /// `P(b_j | a_i)`
    Predictive,
    /// `P(a_i | b_j)`
    Retrodictive,
    /// `μ_j`
    Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCell {
    pub kind: CellKind,
    /// State index; `None` for outcome cells.
    pub state: Option<usize>,
    pub outcome: usize,
    /// `None` when the conditioning event never occurred.
    pub empirical: Option<f64>,
    pub analytic: f64,
    /// `Tr(Π_i^ret ρ_j^ret)` for retrodictive cells, when the transform is defined.
    pub symmetric: Option<f64>,
    pub deviation: Option<f64>,
    /// `3·sqrt(p(1 − p)/n)` with `p` the analytic value.
    pub bound: Option<f64>,
    /// Number of trials in the conditioning event.
    pub denominator: u64,
    pub flagged: bool,
}

impl EmpiricalCell {
    fn new(kind: CellKind, state: Option<usize>, outcome: usize, hits: u64, denominator: u64, analytic: f64) -> Self {
        let (empirical, deviation, bound, flagged) = if denominator == 0 {
            (None, None, None, false)
        } else {
            let e = hits as f64 / denominator as f64;
            let d = (e - analytic).abs();
            let b = SIGMA_BAND * (analytic * (1.0 - analytic)).max(0.0).sqrt() / (denominator as f64).sqrt();
            // a structural zero (or certainty) has a zero-width band
            let flagged = d > b + STRUCTURAL_ZERO.max(f64::EPSILON * analytic);
            (Some(e), Some(d), Some(b), flagged)
        };
        Self {
            kind,
            state,
            outcome,
            empirical,
            analytic,
            symmetric: None,
            deviation,
            bound,
            denominator,
            flagged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub n_total: u64,
    pub seed: u64,
    pub rng_algorithm: String,
    pub cells: Vec<EmpiricalCell>,
}

impl EmpiricalReport {
    pub fn flagged(&self) -> impl Iterator<Item = &EmpiricalCell> {
        self.cells.iter().filter(|c| c.flagged)
    }

    pub fn flagged_count(&self) -> usize {
        self.flagged().count()
    }

    pub fn cells_of(&self, kind: CellKind) -> impl Iterator<Item = &EmpiricalCell> {
        self.cells.iter().filter(move |c| c.kind == kind)
    }

    pub fn cell(&self, kind: CellKind, state: Option<usize>, outcome: usize) -> Option<&EmpiricalCell> {
        self.cells
            .iter()
            .find(|c| c.kind == kind && c.state == state && c.outcome == outcome)
    }
}

/// Compares sampled frequencies with Born-rule, Bayes and outcome probabilities.
pub fn empirical_report(counts: &SampleCounts, ensemble: &Ensemble, povm: &Povm) -> Result<EmpiricalReport> {
    let (n_states, n_outcomes) = (ensemble.len(), povm.len());
    if counts.counts.len() != n_states {
        return Err(Error::DimensionMismatch {
            expected: n_states,
            found: counts.counts.len(),
        });
    }
    if let Some(row) = counts.counts.iter().find(|r| r.len() != n_outcomes) {
        return Err(Error::DimensionMismatch {
            expected: n_outcomes,
            found: row.len(),
        });
    }
    if counts.total() != counts.n_total {
        return Err(Error::NumericIntegrity {
            quantity: "sample count total",
            value: counts.total() as f64,
        });
    }

    let table = likelihood_table(ensemble, povm)?;
    let mu = retrodiction::outcome_probs(povm, &ensemble.source()?)?.mu;
    // the symmetric form needs an invertible source; report it only when available
    let dual = RetroDual::compute(ensemble, povm, &TransformOptions::default()).ok();
    let mut cells = Vec::with_capacity(2 * n_states * n_outcomes + n_outcomes);

    for i in 0..n_states {
        let row = counts.row_total(i);
        for j in 0..n_outcomes {
            cells.push(EmpiricalCell::new(CellKind::Predictive, Some(i), j, counts.counts[i][j], row, table[i][j]));
        }
    }
    for j in 0..n_outcomes {
        let column = counts.column_total(j);
        for i in 0..n_states {
            let bayes = if mu[j] > MU_FLOOR {
                ensemble.priors()[i] * table[i][j] / mu[j]
            } else {
                0.0
            };
            let mut cell = EmpiricalCell::new(CellKind::Retrodictive, Some(i), j, counts.counts[i][j], column, bayes);
            cell.symmetric = dual
                .as_ref()
                .and_then(|d| retrodiction::retrodictive_prob_symmetric(d, i, j).ok());
            cells.push(cell);
        }
    }
    for j in 0..n_outcomes {
        cells.push(EmpiricalCell::new(
            CellKind::Outcome,
            None,
            j,
            counts.column_total(j),
            counts.n_total,
            mu[j],
        ));
    }
    Ok(EmpiricalReport {
        n_total: counts.n_total,
        seed: counts.seed,
        rng_algorithm: counts.rng_algorithm.clone(),
        cells,
    })
}
