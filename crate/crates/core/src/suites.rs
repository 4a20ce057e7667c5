//! Property suites over parameter grids and seeded random instances.
//!
//! Each suite returns a list of [`Check`]s, one per property, holding the worst
//! residual seen and the tolerance it must stay under.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel;
use crate::ensembles::{Ensemble, Povm};
use crate::error::{Error, Result};
use crate::linalg::{self, HermitianOperator, SquareMatrix};
use crate::random;
use crate::retrodiction::{self, RetroDual, TransformOptions};
use crate::sim::{self, CellKind};
use crate::ud::{self, Regime, UdInstance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance` (a NaN value never passes).
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Linalg,
    Retrodiction,
    Ud,
    Channel,
    Sim,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["linalg", "retrodiction", "ud", "channel", "sim", "all"];

    pub fn run(self) -> Result<Vec<Check>> {
        match self {
            Suite::Linalg => linalg_suite(),
            Suite::Retrodiction => retrodiction_suite(),
            Suite::Ud => ud_suite(),
            Suite::Channel => channel_suite(),
            Suite::Sim => sim_suite(),
            Suite::All => {
                let mut all = Vec::new();
                for s in [Suite::Linalg, Suite::Retrodiction, Suite::Ud, Suite::Channel, Suite::Sim] {
                    all.extend(s.run()?);
                }
                Ok(all)
            }
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Self::NAMES[i])
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linalg" => Ok(Suite::Linalg),
            "retrodiction" => Ok(Suite::Retrodiction),
            "ud" => Ok(Suite::Ud),
            "channel" => Ok(Suite::Channel),
            "sim" => Ok(Suite::Sim),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidParameter {
                name: "suite",
                reason: format!("unknown suite {other:?}; expected one of {}", Self::NAMES.join(", ")),
            }),
        }
    }
}

/// `n × n` instances with `η_1 = η_max ∈ [0.5, 0.98]` and `s ∈ [0.02, 0.95]`, evenly spaced.
pub fn ud_grid(n: usize) -> Vec<UdInstance> {
    let lerp = |lo: f64, hi: f64, k: usize| if n == 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| UdInstance::from_overlap(lerp(0.5, 0.98, a), lerp(0.02, 0.95, b)).expect("grid inside the valid range"))
        .collect()
}

/// A seeded random (ensemble, POVM) pair whose source and outcome
/// probabilities are bounded away from zero.
#[derive(Debug, Clone)]
pub struct RandomCase {
    pub seed: u64,
    pub ensemble: Ensemble,
    pub povm: Povm,
}

pub const CORPUS_MIN_EIG: f64 = 1e-3;
pub const CORPUS_MIN_MU: f64 = 1e-3;

/// Draws cases with `D` cycling through 2, 3, 4 until `count` pass the
/// well-conditioning filter.
pub fn random_corpus(count: usize, base_seed: u64) -> Vec<RandomCase> {
    let mut out = Vec::with_capacity(count);
    let mut seed = base_seed;
    while out.len() < count {
        let dim = 2 + out.len() % 3;
        let mut rng = random::rng(seed);
        let n_states = 2 + (seed as usize % 3);
        let n_outcomes = 2 + ((seed / 3) as usize % 4);
        let ensemble = random::random_ensemble(&mut rng, dim, n_states, 0.5);
        let povm = random::random_povm(&mut rng, dim, n_outcomes).expect("random POVM");
        let source = ensemble.source().expect("valid ensemble");
        let well_conditioned = source.op().min_eigenvalue() >= CORPUS_MIN_EIG
            && retrodiction::outcome_probs(&povm, &source)
                .map(|d| d.mu.iter().all(|&m| m >= CORPUS_MIN_MU))
                .unwrap_or(false);
        if well_conditioned {
            out.push(RandomCase { seed, ensemble, povm });
        }
        seed += 1;
    }
    out
}

/// `max_{i,j} |Tr(Π_i^ret ρ_j^ret) − η_i Tr(Π_j ρ_i)/μ_j|`
pub fn symmetric_born_residual(dual: &RetroDual, ensemble: &Ensemble, povm: &Povm) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..ensemble.len() {
        for j in 0..povm.len() {
            let sym = retrodiction::retrodictive_prob_symmetric(dual, i, j)?;
            let bayes = retrodiction::retrodictive_prob_bayes(ensemble, povm, i, j)?;
            worst = worst.max((sym - bayes).abs());
        }
    }
    Ok(worst)
}

fn fold_max(values: impl ParallelIterator<Item = Result<f64>>) -> Result<f64> {
    values.try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

fn linalg_suite() -> Result<Vec<Check>> {
    let mut reconstruct = 0.0f64;
    let mut orthonormal = 0.0f64;
    let mut sqrt_square = 0.0f64;
    let mut inverse_sqrt = 0.0f64;
    for seed in 0..150u64 {
        let mut rng = random::rng(seed);
        let dim = 2 + (seed % 3) as usize;
        let h = random::random_hermitian(&mut rng, dim);
        let spec = h.eig();
        reconstruct = reconstruct.max(spec.reconstruct().max_abs_diff(&h));
        orthonormal = orthonormal.max(spec.orthonormality_residual());
        let rho = random::random_density(&mut rng, dim);
        if rho.op().min_eigenvalue() < 1e-4 {
            continue;
        }
        let root = linalg::sqrt(rho.op())?;
        let squared = root.matrix() * root.matrix();
        sqrt_square = sqrt_square.max(squared.max_abs_diff(rho.matrix()));
        let inv = linalg::inverse_sqrt(rho.op())?;
        let product = &(inv.matrix() * rho.matrix()) * inv.matrix();
        inverse_sqrt = inverse_sqrt.max(product.max_abs_diff(&SquareMatrix::identity(dim)));
    }
    Ok(vec![
        Check::at_most("linalg.eig_reconstruction", reconstruct, 1e-10),
        Check::at_most("linalg.eig_orthonormality", orthonormal, 1e-10),
        Check::at_most("linalg.sqrt_squares_back", sqrt_square, 1e-10),
        Check::at_most("linalg.inverse_sqrt_whitens", inverse_sqrt, 1e-8),
    ])
}

fn retrodiction_suite() -> Result<Vec<Check>> {
    let corpus = random_corpus(300, 1);
    let residuals: Vec<(f64, f64, f64, f64)> = corpus
        .par_iter()
        .map(|case| {
            let dual = RetroDual::compute(&case.ensemble, &case.povm, &TransformOptions::default())?;
            let r = dual.residuals();
            Ok((
                symmetric_born_residual(&dual, &case.ensemble, &case.povm)?,
                r.completeness,
                r.trace,
                r.source,
            ))
        })
        .collect::<Result<_>>()?;
    let max_of = |f: fn(&(f64, f64, f64, f64)) -> f64| residuals.iter().map(f).fold(0.0, f64::max);

    let unbiased = fold_max((0..60u64).into_par_iter().map(|seed| {
        let mut rng = random::rng(10_000 + seed);
        let dim = 2 + (seed % 3) as usize;
        let basis = random::random_projective(&mut rng, dim);
        let states = basis
            .elements()
            .iter()
            .map(|e| crate::ensembles::State::Mixed(crate::ensembles::DensityOperator::new(e.clone()).expect("projector")))
            .collect();
        let ensemble = Ensemble::from_states(states, vec![1.0 / dim as f64; dim])?;
        let povm = random::random_povm(&mut rng, dim, dim + 1)?;
        unbiased_residual(&ensemble, &povm)
    }))?;

    Ok(vec![
        Check::at_most("retrodiction.symmetric_born", max_of(|r| r.0), 1e-9),
        Check::at_most("retrodiction.detector_completeness", max_of(|r| r.1), 1e-10),
        Check::at_most("retrodiction.state_trace", max_of(|r| r.2), 1e-10),
        Check::at_most("retrodiction.source_reconstruction", max_of(|r| r.3), 1e-10),
        Check::at_most("retrodiction.unbiased_reduction", unbiased, 1e-10),
    ])
}

/// Largest entry deviation from `Π_i^ret = Dη_iρ_i` and `ρ_j^ret = Π_j / Tr Π_j`.
pub fn unbiased_residual(ensemble: &Ensemble, povm: &Povm) -> Result<f64> {
    let dual = retrodiction::retro_transform(ensemble, povm)?;
    let dim = ensemble.dim() as f64;
    let mut worst = 0.0f64;
    for (i, det) in dual.retro_detectors().iter().enumerate() {
        let expected = ensemble.density(i).op().scale(dim * ensemble.priors()[i]);
        worst = worst.max(det.max_abs_diff(&expected));
    }
    for (j, element) in povm.elements().iter().enumerate() {
        let expected = element.scale(1.0 / element.trace());
        worst = worst.max(dual.retro_state(j)?.op().max_abs_diff(&expected));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, Default)]
struct UdResiduals {
    grid_gap: f64,
    regime_mismatch: f64,
    orthonormality: f64,
    basis_closed_form: f64,
    spectrum_closed_form: f64,
    identification: f64,
    failure_det: f64,
}

impl UdResiduals {
    fn merge(self, o: Self) -> Self {
        Self {
            grid_gap: self.grid_gap.max(o.grid_gap),
            regime_mismatch: self.regime_mismatch.max(o.regime_mismatch),
            orthonormality: self.orthonormality.max(o.orthonormality),
            basis_closed_form: self.basis_closed_form.max(o.basis_closed_form),
            spectrum_closed_form: self.spectrum_closed_form.max(o.spectrum_closed_form),
            identification: self.identification.max(o.identification),
            failure_det: self.failure_det.max(o.failure_det),
        }
    }
}

fn ud_instance_residuals(inst: &UdInstance) -> Result<UdResiduals> {
    let opt = ud::optimal_dual(inst)?;
    let grid = ud::brute_force_dual(inst, 1e-4)?;
    let expected_regime = if inst.eta_max() < inst.regime_threshold() {
        Regime::Interior
    } else {
        Regime::Clamped
    };
    let basis = ud::retro_basis(inst)?;
    let closed = ud::retro_basis_closed_form(inst)?;
    let cf = ud::omega_closed_form(inst)?;
    let spec = inst.omega()?.eig();
    let top = HermitianOperator::projector(&spec.eigenvector(1));
    let spectrum_gap = (spec.eigenvalues[1] - cf.w1)
        .abs()
        .max((spec.eigenvalues[0] - cf.w2).abs())
        .max(top.max_abs_diff(&HermitianOperator::projector(&cf.omega1())));
    Ok(UdResiduals {
        grid_gap: (opt.p_success - grid.p_success).abs(),
        regime_mismatch: if opt.regime == expected_regime { 0.0 } else { 1.0 },
        orthonormality: basis.orthonormality_residual(),
        basis_closed_form: basis.max_distance(&closed),
        spectrum_closed_form: spectrum_gap,
        identification: ud::verify_purity_identification(inst)?.max_residual(),
        failure_det: opt.failure_determinant().abs(),
    })
}

fn ud_suite() -> Result<Vec<Check>> {
    let grid = ud_grid(25);
    let r = grid
        .par_iter()
        .map(ud_instance_residuals)
        .try_reduce(UdResiduals::default, |a, b| Ok(a.merge(b)))?;
    let continuity = (1..=50)
        .map(|k| {
            let s = 0.95 * k as f64 / 50.0;
            let inst = UdInstance::from_overlap(1.0 / (1.0 + s * s), s).expect("boundary instance");
            (ud::interior_branch_success(&inst) - ud::clamped_branch_success(&inst)).abs()
        })
        .fold(0.0, f64::max);
    let spot_balanced = (ud::optimal_dual(&UdInstance::from_overlap(0.5, 0.5)?)?.p_success - 0.5).abs();
    let spot_clamped = (ud::optimal_dual(&UdInstance::from_overlap(0.9, 0.5f64.sqrt())?)?.p_success - 0.45).abs();
    Ok(vec![
        Check::at_most("ud.closed_form_vs_grid", r.grid_gap, 2e-4),
        Check::at_most("ud.regime_classification", r.regime_mismatch, 0.0),
        Check::at_most("ud.branch_continuity", continuity, 1e-9),
        Check::at_most("ud.spot_balanced_half_overlap", spot_balanced, 1e-12),
        Check::at_most("ud.spot_clamped", spot_clamped, 1e-12),
        Check::at_most("ud.retro_basis_orthonormality", r.orthonormality, 1e-9),
        Check::at_most("ud.retro_basis_closed_form", r.basis_closed_form, 1e-10),
        Check::at_most("ud.omega_spectrum_closed_form", r.spectrum_closed_form, 1e-10),
        Check::at_most("ud.purity_identification", r.identification, 1e-9),
        Check::at_most("ud.failure_determinant", r.failure_det, 1e-10),
    ])
}

fn channel_suite() -> Result<Vec<Check>> {
    let grid = ud_grid(25);
    let per_instance: Vec<[f64; 4]> = grid
        .par_iter()
        .map(|inst| {
            let st = channel::symmetric_state(inst)?;
            let omega = inst.omega()?;
            let reduced = st
                .reduced_a()?
                .op()
                .max_abs_diff(&omega)
                .max(st.reduced_b()?.op().max_abs_diff(&omega));
            let root = channel::sqrt_omega_in_retro_basis(inst)?;
            Ok([
                st.swap_residual(),
                reduced,
                channel::no_signaling_check(inst)?.max_residual,
                (root.get(0, 1) - root.get(1, 0)).norm(),
            ])
        })
        .collect::<Result<_>>()?;
    let col = |k: usize| per_instance.iter().map(|r| r[k]).fold(0.0, f64::max);
    Ok(vec![
        Check::at_most("channel.swap_symmetry", col(0), 1e-10),
        Check::at_most("channel.reduced_states_equal_source", col(1), 1e-10),
        Check::at_most("channel.no_signaling", col(2), 1e-10),
        Check::at_most("channel.sqrt_source_symmetric", col(3), 1e-12),
    ])
}

fn sim_suite() -> Result<Vec<Check>> {
    let inst = UdInstance::from_overlap(0.5, 0.5)?;
    let ensemble = inst.ensemble();
    let povm = ud::optimal_predictive_povm(&inst)?.povm;
    let counts = sim::sample(&ensemble, &povm, 1_000_000, 42)?;
    let rerun = sim::sample(&ensemble, &povm, 1_000_000, 42)?;
    let report = sim::empirical_report(&counts, &ensemble, &povm)?;
    // state 1 never fires Π_2, state 2 never fires Π_1
    let structural = (counts.counts[0][1] + counts.counts[1][0]) as f64;
    let mu0 = report
        .cell(CellKind::Outcome, None, 2)
        .and_then(|c| c.deviation)
        .unwrap_or(f64::INFINITY);
    let symmetric_gap = report
        .cells_of(CellKind::Retrodictive)
        .filter_map(|c| match (c.empirical, c.symmetric, c.bound) {
            (Some(e), Some(s), Some(b)) => Some((e - s).abs() - b),
            _ => None,
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![
        Check::at_most("sim.structural_zeros", structural, 0.0),
        Check::at_most("sim.inconclusive_rate", mu0, 0.0015),
        Check::at_most("sim.flagged_cells", report.flagged_count() as f64, 0.0),
        Check::at_most("sim.symmetric_retrodiction_excess", symmetric_gap.max(0.0), 1e-12),
        Check::at_most("sim.rerun_identical", if counts == rerun { 0.0 } else { 1.0 }, 0.0),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn grid_spans_the_requested_box() {
        let g = ud_grid(25);
        assert_eq!(g.len(), 625);
        assert_eq!(g[0].eta1(), 0.5);
        assert_eq!(g[0].overlap(), 0.02);
        assert!((g[624].eta1() - 0.98).abs() < 1e-15);
        assert!((g[624].overlap() - 0.95).abs() < 1e-15);
    }

    #[test]
    fn corpus_is_well_conditioned_and_cycles_dimension() {
        let corpus = random_corpus(9, 0);
        let dims: Vec<usize> = corpus.iter().map(|c| c.ensemble.dim()).collect();
        assert_eq!(dims, vec![2, 3, 4, 2, 3, 4, 2, 3, 4]);
    }
}
