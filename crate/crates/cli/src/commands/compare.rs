//! `compare`: per-time max-element deviations of two methods from a
//! reference trajectory on a shared system and time grid.

use std::path::Path;

use lindblad_core::{evolve, EvolutionSample, MemoryBudget};

use crate::commands::initial_density;
use crate::config::{CompareConfig, IntegratorConfig};
use crate::output::{fmt_f64, write_csv, write_manifest};
use crate::CliError;

pub struct CompareData {
    pub times: Vec<f64>,
    pub dev_a: Vec<f64>,
    pub dev_b: Vec<f64>,
}

fn sample_ratio(sample_dt: f64, dt: f64, what: &str) -> Result<usize, CliError> {
    let ratio = sample_dt / dt;
    let rounded = ratio.round();
    if rounded < 1.0 || (ratio - rounded).abs() > 1e-9 * ratio.max(1.0) {
        return Err(CliError::Config(format!(
            "{what} dt {dt} does not divide the sampling step {sample_dt}"
        )));
    }
    Ok(rounded as usize)
}

fn evolve_on_grid(
    cfg: &CompareConfig,
    integrator: &IntegratorConfig,
    sample_dt: f64,
    what: &str,
) -> Result<Vec<EvolutionSample>, CliError> {
    let budget = MemoryBudget::from_bytes(cfg.memory_budget_bytes);
    let model = cfg.system.build(budget)?;
    let rho0 = initial_density(&cfg.system, &cfg.initial_state, &model)?;
    let every = sample_ratio(sample_dt, integrator.dt, what)?;
    evolve(
        &model,
        &rho0,
        &integrator.to_spec(),
        cfg.t_final,
        every,
        budget,
    )
    .map_err(CliError::from)
}

pub fn run(cfg: &CompareConfig) -> Result<CompareData, CliError> {
    let sample_dt = cfg
        .sample_dt
        .unwrap_or_else(|| cfg.method_a.dt.max(cfg.method_b.dt));
    if !(sample_dt > 0.0) {
        return Err(CliError::Config("sample_dt must be positive".into()));
    }

    let reference = evolve_on_grid(cfg, &cfg.reference, sample_dt, "reference")?;
    let a = evolve_on_grid(cfg, &cfg.method_a, sample_dt, "method_a")?;
    let b = evolve_on_grid(cfg, &cfg.method_b, sample_dt, "method_b")?;

    if a.len() != reference.len() || b.len() != reference.len() {
        return Err(CliError::Config(format!(
            "sampling grids disagree: reference {} points, method_a {}, method_b {}",
            reference.len(),
            a.len(),
            b.len()
        )));
    }

    let mut times = Vec::with_capacity(reference.len());
    let mut dev_a = Vec::with_capacity(reference.len());
    let mut dev_b = Vec::with_capacity(reference.len());
    for ((r, sa), sb) in reference.iter().zip(a.iter()).zip(b.iter()) {
        if (sa.time - r.time).abs() > 1e-9 * r.time.max(1.0)
            || (sb.time - r.time).abs() > 1e-9 * r.time.max(1.0)
        {
            return Err(CliError::Config(format!(
                "sample times misaligned at t = {}",
                r.time
            )));
        }
        times.push(r.time);
        dev_a.push(sa.state.matrix().max_abs_diff(r.state.matrix()));
        dev_b.push(sb.state.matrix().max_abs_diff(r.state.matrix()));
    }
    Ok(CompareData {
        times,
        dev_a,
        dev_b,
    })
}

pub fn execute(cfg: &CompareConfig, out: &Path) -> Result<(), CliError> {
    let data = run(cfg)?;
    let header = vec![
        "t".to_string(),
        "method_a_dev".to_string(),
        "method_b_dev".to_string(),
    ];
    let rows: Vec<Vec<String>> = data
        .times
        .iter()
        .zip(data.dev_a.iter())
        .zip(data.dev_b.iter())
        .map(|((t, a), b)| vec![fmt_f64(*t), fmt_f64(*a), fmt_f64(*b)])
        .collect();
    write_csv(out, &header, &rows)?;
    write_manifest(out, "compare", cfg.seed, cfg)
}
