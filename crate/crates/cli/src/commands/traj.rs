//! `traj`: trajectory-ensemble observables against a deterministic
//! master-equation reference, with per-element standard errors.

use std::path::Path;

use lindblad_core::{
    ensemble_density, evolve, mcwf_ensemble, metts_sample, thermal_state, CollapseBasis,
    DensityMatrix, MemoryBudget, MettsConfig, PureState, TrajectoryConfig,
};

use crate::commands::{initial_pure_state, resolve_elements};
use crate::config::{InitialStateConfig, IntegratorConfig, MethodConfig, TrajConfig};
use crate::output::{fmt_f64, write_csv, write_manifest};
use crate::CliError;

/// One CSV row: an observable at a sample time.
#[derive(Clone, Debug)]
pub struct TrajRow {
    pub time: f64,
    pub element: String,
    pub mcwf_value: f64,
    pub reference_value: f64,
    pub stderr_estimate: f64,
}

fn default_reference(cfg: &TrajConfig) -> IntegratorConfig {
    IntegratorConfig {
        method: MethodConfig::TaylorSeries,
        dt: cfg.dt,
        order: Some(10),
        error_target: None,
    }
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn run(cfg: &TrajConfig) -> Result<Vec<TrajRow>, CliError> {
    let budget = MemoryBudget::from_bytes(cfg.memory_budget_bytes);
    let model = cfg.system.build(budget)?;
    let dim = model.dim();
    let elements = resolve_elements(&cfg.elements, dim)?;

    // initial states: one per trajectory from the thermal sampler, or a
    // single shared pure state
    let (initial_states, rho0_ref): (Vec<PureState>, DensityMatrix) = match &cfg.initial_state {
        InitialStateConfig::Thermal { beta } => {
            let metts_cfg = MettsConfig {
                beta: *beta,
                n_samples: cfg.n_trajectories,
                burn_in: cfg.metts_burn_in,
                master_seed: cfg.seed,
                collapse_basis: CollapseBasis::from(cfg.collapse_basis),
                thin: cfg.metts_thin,
            };
            let states = metts_sample(model.hamiltonian(), &metts_cfg)?;
            let rho0 = thermal_state(model.hamiltonian(), *beta)?;
            (states, rho0)
        }
        other => {
            let psi = initial_pure_state(&cfg.system, other)?;
            let rho0 = ensemble_density(std::slice::from_ref(&psi))?;
            (vec![psi], rho0)
        }
    };

    let traj_cfg = TrajectoryConfig {
        dt: cfg.dt,
        n_trajectories: cfg.n_trajectories,
        master_seed: cfg.seed,
        taylor_order: cfg.taylor_order,
    };
    let ensemble = mcwf_ensemble(&model, &initial_states, &traj_cfg, cfg.t_final)?;

    let reference_cfg = cfg.reference.unwrap_or_else(|| default_reference(cfg));
    let sample_interval = cfg.sample_every as f64 * cfg.dt;
    let ref_every = {
        let ratio = sample_interval / reference_cfg.dt;
        let rounded = ratio.round();
        if rounded < 1.0 || (ratio - rounded).abs() > 1e-9 * ratio.max(1.0) {
            return Err(CliError::Config(format!(
                "reference dt {} does not divide the sampling interval {sample_interval}",
                reference_cfg.dt
            )));
        }
        rounded as usize
    };
    let reference = evolve(
        &model,
        &rho0_ref,
        &reference_cfg.to_spec(),
        cfg.t_final,
        ref_every,
        budget,
    )?;

    let mut rows = Vec::new();
    for sample in &reference {
        let t = sample.time;
        // per-trajectory estimates of each element at this time
        for &(i, j) in &elements {
            if i == j {
                let values: Vec<f64> = ensemble
                    .iter()
                    .map(|traj| traj.state_at(t).probability(i))
                    .collect();
                let (mean, stderr) = mean_and_stderr(&values);
                rows.push(TrajRow {
                    time: t,
                    element: format!("rho_{i}_{j}"),
                    mcwf_value: mean,
                    reference_value: sample.state.element(i, j).re,
                    stderr_estimate: stderr,
                });
            } else {
                let re_values: Vec<f64> = ensemble
                    .iter()
                    .map(|traj| {
                        let psi = traj.state_at(t);
                        (psi.amplitudes()[i] * psi.amplitudes()[j].conj()).re
                    })
                    .collect();
                let im_values: Vec<f64> = ensemble
                    .iter()
                    .map(|traj| {
                        let psi = traj.state_at(t);
                        (psi.amplitudes()[i] * psi.amplitudes()[j].conj()).im
                    })
                    .collect();
                let (mean_re, stderr_re) = mean_and_stderr(&re_values);
                let (mean_im, stderr_im) = mean_and_stderr(&im_values);
                let reference_value = sample.state.element(i, j);
                rows.push(TrajRow {
                    time: t,
                    element: format!("rho_{i}_{j}_re"),
                    mcwf_value: mean_re,
                    reference_value: reference_value.re,
                    stderr_estimate: stderr_re,
                });
                rows.push(TrajRow {
                    time: t,
                    element: format!("rho_{i}_{j}_im"),
                    mcwf_value: mean_im,
                    reference_value: reference_value.im,
                    stderr_estimate: stderr_im,
                });
            }
        }
    }
    Ok(rows)
}

pub fn execute(cfg: &TrajConfig, out: &Path) -> Result<(), CliError> {
    let rows = run(cfg)?;
    let header = vec![
        "t".to_string(),
        "element".to_string(),
        "mcwf_value".to_string(),
        "reference_value".to_string(),
        "stderr_estimate".to_string(),
    ];
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.time),
                r.element.clone(),
                fmt_f64(r.mcwf_value),
                fmt_f64(r.reference_value),
                fmt_f64(r.stderr_estimate),
            ]
        })
        .collect();
    write_csv(out, &header, &csv_rows)?;
    write_manifest(out, "traj", cfg.seed, cfg)
}
