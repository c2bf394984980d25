//! `metts`: thermal sampling of a chain Hamiltonian, with sample-average
//! diagonals checked against the dense Gibbs state.

use std::path::Path;

use lindblad_core::{
    ensemble_density, metts_sample, thermal_state, CollapseBasis, MemoryBudget, MettsConfig,
};

use crate::config::MettsRunConfig;
use crate::output::{fmt_f64, write_csv, write_manifest};
use crate::CliError;

#[derive(Clone, Debug)]
pub struct MettsRow {
    pub element: String,
    pub metts_value: f64,
    pub gibbs_value: f64,
    pub stderr_estimate: f64,
}

pub fn run(cfg: &MettsRunConfig) -> Result<Vec<MettsRow>, CliError> {
    let budget = MemoryBudget::from_bytes(cfg.memory_budget_bytes);
    let model = cfg.system.build(budget)?;
    let metts_cfg = MettsConfig {
        beta: cfg.beta,
        n_samples: cfg.n_samples,
        burn_in: cfg.burn_in,
        master_seed: cfg.seed,
        collapse_basis: CollapseBasis::from(cfg.collapse_basis),
        thin: cfg.thin,
    };
    let samples = metts_sample(model.hamiltonian(), &metts_cfg)?;
    let average = ensemble_density(&samples)?;
    let gibbs = thermal_state(model.hamiltonian(), cfg.beta)?;

    let n = samples.len() as f64;
    let mut rows = Vec::new();
    for i in 0..model.dim() {
        let values: Vec<f64> = samples.iter().map(|s| s.probability(i)).collect();
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        rows.push(MettsRow {
            element: format!("rho_{i}_{i}"),
            metts_value: average.element(i, i).re,
            gibbs_value: gibbs.element(i, i).re,
            stderr_estimate: (var / n).sqrt(),
        });
    }
    Ok(rows)
}

pub fn execute(cfg: &MettsRunConfig, out: &Path) -> Result<(), CliError> {
    let rows = run(cfg)?;
    let header = vec![
        "element".to_string(),
        "metts_value".to_string(),
        "gibbs_value".to_string(),
        "stderr_estimate".to_string(),
    ];
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.element.clone(),
                fmt_f64(r.metts_value),
                fmt_f64(r.gibbs_value),
                fmt_f64(r.stderr_estimate),
            ]
        })
        .collect();
    write_csv(out, &header, &csv_rows)?;
    write_manifest(out, "metts", cfg.seed, cfg)
}
