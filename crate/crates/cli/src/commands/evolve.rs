//! `evolve`: one deterministic integration, sampled to CSV.

use std::path::Path;

use lindblad_core::{evolve, EvolutionSample, MemoryBudget};

use crate::commands::{initial_density, resolve_elements};
use crate::config::RunConfig;
use crate::output::{fmt_f64, fmt_opt_f64, write_csv, write_manifest};
use crate::CliError;

pub struct EvolveData {
    pub elements: Vec<(usize, usize)>,
    pub samples: Vec<EvolutionSample>,
}

pub fn run(cfg: &RunConfig) -> Result<EvolveData, CliError> {
    let budget = MemoryBudget::from_bytes(cfg.memory_budget_bytes);
    let model = cfg.system.build(budget)?;
    let rho0 = initial_density(&cfg.system, &cfg.initial_state, &model)?;
    let elements = resolve_elements(&cfg.elements, model.dim())?;
    let samples = evolve(
        &model,
        &rho0,
        &cfg.integrator.to_spec(),
        cfg.t_final,
        cfg.sample_every,
        budget,
    )?;
    Ok(EvolveData { elements, samples })
}

pub fn execute(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let data = run(cfg)?;

    let mut header = vec!["t".to_string()];
    for &(i, j) in &data.elements {
        header.push(format!("rho_{i}_{j}_re"));
        header.push(format!("rho_{i}_{j}_im"));
    }
    header.push("trace".to_string());
    header.push("error_bound".to_string());

    let rows: Vec<Vec<String>> = data
        .samples
        .iter()
        .map(|sample| {
            let mut row = vec![fmt_f64(sample.time)];
            for &(i, j) in &data.elements {
                let value = sample.state.element(i, j);
                row.push(fmt_f64(value.re));
                row.push(fmt_f64(value.im));
            }
            row.push(fmt_f64(sample.state.trace().re));
            row.push(fmt_opt_f64(sample.report.error_bound));
            row
        })
        .collect();

    write_csv(out, &header, &rows)?;
    write_manifest(out, "evolve", cfg.seed, cfg)
}
