use std::path::Path;

use serde_json::{json, Value};

use retrodictor_core::channel;
use retrodictor_core::ensembles::{Ensemble, Povm};
use retrodictor_core::retrodiction::{self, RetroDual, TransformOptions, MU_FLOOR, TOL_IDENTITY};
use retrodictor_core::sim;
use retrodictor_core::suites::Suite;
use retrodictor_core::ud::{self, UdInstance};

use crate::files::{EnsembleFile, PovmFile};
use crate::report::{density_value, matrix_value, operator_value, vector_value, Report};
use crate::{Angle, CliError};

type CmdResult = Result<Report, CliError>;

/// Largest `|Tr(Π_i^ret ρ_j^ret) − η_i Tr(Π_j ρ_i)/μ_j|` over outcomes with `μ_j` above the floor.
fn symmetric_born_residual(dual: &RetroDual, ensemble: &Ensemble, povm: &Povm) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for j in 0..povm.len() {
        if dual.mu().mu[j] <= MU_FLOOR {
            continue;
        }
        for i in 0..ensemble.len() {
            let sym = retrodiction::retrodictive_prob_symmetric(dual, i, j)?;
            let bayes = retrodiction::retrodictive_prob_bayes(ensemble, povm, i, j)?;
            worst = worst.max((sym - bayes).abs());
        }
    }
    Ok(worst)
}

pub fn transform(ensemble_path: &Path, povm_path: &Path, support_restricted: bool) -> CmdResult {
    let ensemble = crate::files::load_ensemble(ensemble_path)?;
    let povm = crate::files::load_povm(povm_path)?;
    let options = if support_restricted {
        TransformOptions::support_restricted()
    } else {
        TransformOptions::default()
    };
    let dual = RetroDual::compute(&ensemble, &povm, &options)?;

    let mut r = Report::new(
        "transform",
        json!({
            "ensemble": EnsembleFile::from_ensemble(&ensemble),
            "povm": PovmFile::from_povm(&povm),
            "support_restricted": support_restricted,
        }),
    );
    r.derive("omega", operator_value(dual.omega().op()));
    r.derive("unbiased_source", dual.omega().unbiased);
    r.derive("mu", &dual.mu().mu);
    r.derive(
        "retro_detectors",
        dual.retro_detectors().iter().map(operator_value).collect::<Vec<_>>(),
    );
    r.derive(
        "retro_states",
        dual.retro_states()
            .iter()
            .map(|s| s.as_ref().map(density_value).unwrap_or(Value::Null))
            .collect::<Vec<_>>(),
    );
    r.derive("retrodictive_conditionals", dual.conditional_matrix()?);
    let undefined = dual.undefined_outcomes();
    if !undefined.is_empty() {
        r.notes.push(format!(
            "outcomes {undefined:?} have zero probability; their retrodictive states are undefined"
        ));
    }
    r.derive("zero_probability_outcomes", &undefined);

    let res = dual.residuals();
    r.derive("residuals", res);
    r.check("transform.detector_completeness", res.completeness, TOL_IDENTITY);
    r.check("transform.state_trace", res.trace, TOL_IDENTITY);
    r.check("transform.source_reconstruction", res.source, TOL_IDENTITY);
    r.check(
        "transform.symmetric_born",
        symmetric_born_residual(&dual, &ensemble, &povm)?,
        1e-9,
    );
    if dual.omega().unbiased {
        let reduced = retrodiction::unbiased_dual(&ensemble, &povm)?;
        let mut worst = 0.0f64;
        for (a, b) in dual.retro_detectors().iter().zip(&reduced.retro_detectors) {
            worst = worst.max(a.max_abs_diff(b));
        }
        for (a, b) in dual.retro_states().iter().zip(&reduced.retro_states) {
            if let (Some(a), Some(b)) = (a, b) {
                worst = worst.max(a.op().max_abs_diff(b.op()));
            }
        }
        r.check("transform.unbiased_reduction", worst, 1e-10);
    }
    Ok(r)
}

fn instance(eta1: f64, angle: &Angle) -> Result<UdInstance, CliError> {
    Ok(match (angle.alpha, angle.overlap) {
        (Some(a), None) => UdInstance::new(eta1, a)?,
        (None, Some(s)) => UdInstance::from_overlap(eta1, s)?,
        _ => return Err(CliError::Input("exactly one of --alpha and --overlap is required".into())),
    })
}

fn instance_value(inst: &UdInstance) -> Value {
    json!({
        "eta1": inst.eta1(),
        "eta2": inst.eta2(),
        "alpha": inst.alpha(),
        "theta": inst.theta(),
        "overlap": inst.overlap(),
    })
}

pub fn ud(eta1: f64, angle: &Angle, grid_check: Option<f64>) -> CmdResult {
    let inst = instance(eta1, angle)?;
    let opt = ud::optimal_dual(&inst)?;
    let cf = ud::omega_closed_form(&inst)?;
    let predictive = ud::optimal_predictive_povm(&inst)?;
    let identification = ud::verify_purity_identification(&inst)?;

    let mut r = Report::new("ud", json!({ "eta1": eta1, "alpha": angle.alpha, "overlap": angle.overlap, "grid_check": grid_check }));
    r.derive("instance", instance_value(&inst));
    r.derive("regime", opt.regime);
    r.derive("regime_threshold", inst.regime_threshold());
    r.derive("omega", operator_value(&inst.omega()?));
    r.derive("omega_spectrum", cf);
    r.derive(
        "retro_basis",
        [vector_value(opt.basis.phi1.amplitudes()), vector_value(opt.basis.phi2.amplitudes())],
    );
    r.derive("mu", json!({ "mu1": opt.mu1, "mu2": opt.mu2, "mu0": opt.mu0 }));
    r.derive("p_success", opt.p_success);
    r.derive("rho0_ret", opt.rho0_ret.as_ref().map(density_value));
    r.derive("failure_operator_retro_basis", operator_value(&opt.failure_operator));
    r.derive(
        "predictive_povm",
        json!({
            "c": predictive.c,
            "elements": predictive.povm.elements().iter().map(operator_value).collect::<Vec<_>>(),
        }),
    );
    r.derive("identification", &identification);

    r.check("ud.weights_sum_to_one", opt.trace_residual(), 1e-12);
    r.check("ud.weights_within_priors", opt.bound_violation(&inst), 0.0);
    r.check("ud.source_constraint", opt.constraint_residual(&inst)?, 1e-10);
    r.check("ud.failure_determinant", opt.failure_determinant().abs(), 1e-10);
    r.check(
        "ud.predictive_success_matches",
        (predictive.success_probability(&inst)? - opt.p_success).abs(),
        1e-10,
    );
    r.check("ud.predictive_error", predictive.error_probability(&inst)?, 1e-10);
    r.check("ud.purity_identification", identification.max_residual(), 1e-9);
    r.check(
        "ud.retro_basis_orthonormality",
        opt.basis.orthonormality_residual(),
        1e-9,
    );
    if let Some(step) = grid_check {
        let grid = ud::brute_force_dual(&inst, step)?;
        r.derive("grid_optimum", grid);
        r.check("ud.grid_oracle_gap", (grid.p_success - opt.p_success).abs(), 2.0 * step);
    }
    Ok(r)
}

pub fn channel(eta1: f64, angle: &Angle) -> CmdResult {
    let inst = instance(eta1, angle)?;
    let entangled = channel::entangled_state(&inst);
    let symmetric = channel::symmetric_state(&inst)?;
    let omega = inst.omega()?;
    let retro_matrix = ud::omega_in_retro_basis(&inst)?;
    let ns = channel::no_signaling_check(&inst)?;
    let root = channel::sqrt_omega_in_retro_basis(&inst)?;
    let rotated = entangled.apply_local_a(&channel::alice_unitary(&inst)?)?;

    let mut r = Report::new("channel", json!({ "eta1": eta1, "alpha": angle.alpha, "overlap": angle.overlap }));
    r.derive("instance", instance_value(&inst));
    r.derive("entangled_state", vector_value(entangled.amplitudes()));
    r.derive("symmetric_state", vector_value(symmetric.amplitudes()));
    r.derive("omega", operator_value(&omega));
    r.derive("rho_a", density_value(&ns.rho_a));
    r.derive("rho_a_tilde", density_value(&ns.rho_a_tilde));
    r.derive("rho_b", density_value(&ns.rho_b));
    r.derive("sqrt_omega_retro_basis", matrix_value(&root));
    r.derive("mu", ns.mu);

    r.check("channel.swap_symmetry", symmetric.swap_residual(), 1e-10);
    r.check(
        "channel.symmetric_reduced_a",
        symmetric.reduced_a()?.op().max_abs_diff(&omega),
        1e-10,
    );
    r.check(
        "channel.symmetric_reduced_b",
        symmetric.reduced_b()?.op().max_abs_diff(&omega),
        1e-10,
    );
    r.check(
        "channel.entangled_reduced_b",
        entangled.reduced_b()?.op().max_abs_diff(&omega),
        1e-10,
    );
    r.check(
        "channel.entangled_reduced_a",
        entangled.reduced_a()?.op().max_abs_diff(&retro_matrix),
        1e-10,
    );
    r.check("channel.alice_rotation", rotated.projector_distance(&symmetric), 1e-10);
    r.check("channel.no_signaling", ns.max_residual, 1e-10);
    r.check(
        "channel.sqrt_source_symmetric",
        (root.get(0, 1) - root.get(1, 0)).norm(),
        1e-12,
    );
    Ok(r)
}

pub fn simulate(ensemble_path: &Path, povm_path: &Path, n: u64, seed: u64) -> CmdResult {
    let ensemble = crate::files::load_ensemble(ensemble_path)?;
    let povm = crate::files::load_povm(povm_path)?;
    let counts = sim::sample(&ensemble, &povm, n, seed)?;
    let report = sim::empirical_report(&counts, &ensemble, &povm)?;

    let mut r = Report::new(
        "simulate",
        json!({
            "ensemble": EnsembleFile::from_ensemble(&ensemble),
            "povm": PovmFile::from_povm(&povm),
            "n": n,
        }),
    );
    r.seed = Some(seed);
    r.derive("rng_algorithm", &counts.rng_algorithm);
    r.derive("counts", &counts.counts);
    r.derive("cells", &report.cells);
    let flagged = report.flagged_count();
    let judged = report.cells.iter().filter(|c| c.deviation.is_some()).count().max(1);
    r.check("simulate.count_total", (counts.total() as f64 - n as f64).abs(), 0.0);
    // 3σ bands: a correct sampler exceeds about 0.3% of them by chance
    r.check("simulate.flagged_fraction", flagged as f64 / judged as f64, 0.02);
    Ok(r)
}

pub fn verify(suite: &str) -> CmdResult {
    let parsed: Suite = suite.parse()?;
    let mut r = Report::new("verify", json!({ "suite": suite }));
    r.checks = parsed.run()?.into_iter().map(Into::into).collect();
    r.derive("suites", suites_covered(parsed));
    Ok(r)
}

fn suites_covered(s: Suite) -> Vec<String> {
    match s {
        Suite::All => Suite::NAMES[..5].iter().map(|n| n.to_string()).collect(),
        other => vec![other.to_string()],
    }
}
