//! `bench`: median one-step wall time per (method, chain length) cell,
//! with memory refusals recorded instead of aborting the sweep.
//!
//! Cells run strictly sequentially so timings stay clean. One warm-up step
//! precedes the timed repeats, matching a single-integration-step protocol;
//! the full-vectorization step times the propagator exponential itself each
//! repeat, since that is the method's per-step cost when steps differ.

use std::path::Path;
use std::time::Instant;

use lindblad_core::memory::{matrix_bytes, superoperator_bytes};
use lindblad_core::{
    applies_per_step, basis_product_state, ensemble_density, heisenberg_model, neel_pattern,
    rk4_step, taylor_step, vec_full_step, vec_taylor_step, vectorize, ExpmConfig, MemoryBudget,
    Method, SpinChainSpec,
};

use crate::config::BenchConfig;
use crate::output::{fmt_f64, write_csv, write_manifest};
use crate::CliError;

/// Environment variable capping the number of timed repeats (CI hook).
pub const BENCH_REPEATS_ENV: &str = "LINDBLAD_BENCH_MAX_REPEATS";

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub method: Method,
    pub sites: usize,
    pub dimension: usize,
    /// Median over repeats; `None` when the cell was refused.
    pub seconds_per_step: Option<f64>,
    pub apply_count: usize,
    pub peak_bytes_estimate: u128,
    pub status: String,
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn effective_repeats(requested: usize) -> usize {
    match std::env::var(BENCH_REPEATS_ENV) {
        Ok(v) => match v.parse::<usize>() {
            Ok(cap) if cap >= 1 => requested.min(cap),
            _ => requested,
        },
        Err(_) => requested,
    }
}

/// Coarse static peak-memory estimate per cell: the model matrices plus the
/// method's working set.
fn peak_bytes(method: Method, dim: usize, n_jumps: usize) -> u128 {
    let model = (1 + 3 * n_jumps as u128) * matrix_bytes(dim);
    match method {
        Method::TaylorSeries | Method::Rk4 => model + 6 * matrix_bytes(dim),
        Method::VectorizationTaylor => model + superoperator_bytes(dim) + 3 * matrix_bytes(dim),
        Method::VectorizationFull => model + 4 * superoperator_bytes(dim),
    }
}

/// Runs the sweep over `methods` × `sites`. Budget refusals produce records
/// rather than errors, so the sweep always completes.
pub fn run(cfg: &BenchConfig) -> Result<Vec<BenchOutcome>, CliError> {
    if cfg.repeats < 3 {
        return Err(CliError::Config("bench repeats must be >= 3".into()));
    }
    if cfg.sites.is_empty() || cfg.methods.is_empty() {
        return Err(CliError::Config(
            "bench needs at least one method and one site count".into(),
        ));
    }
    let budget = MemoryBudget::from_bytes(cfg.memory_budget_bytes);
    let repeats = effective_repeats(cfg.repeats);
    let mut outcomes = Vec::new();

    for &sites in &cfg.sites {
        let dim = 1usize << sites;
        for &method_cfg in &cfg.methods {
            let method: Method = method_cfg.into();
            let apply_count = applies_per_step(method, cfg.order);
            let peak = peak_bytes(method, dim, 2);

            // refusal predicate identical to the superoperator builder's
            if method.is_vectorized() && superoperator_bytes(dim) > u128::from(budget.bytes()) {
                outcomes.push(BenchOutcome {
                    method,
                    sites,
                    dimension: dim,
                    seconds_per_step: None,
                    apply_count,
                    peak_bytes_estimate: peak,
                    status: format!(
                        "refused: superoperator requires {} bytes > budget {} bytes",
                        superoperator_bytes(dim),
                        budget.bytes()
                    ),
                });
                continue;
            }

            let model = match heisenberg_model(
                &SpinChainSpec {
                    length: sites,
                    coupling: cfg.coupling,
                    gamma: cfg.gamma,
                    hbar: cfg.hbar,
                },
                budget,
            ) {
                Ok(m) => m,
                Err(e) => {
                    outcomes.push(BenchOutcome {
                        method,
                        sites,
                        dimension: dim,
                        seconds_per_step: None,
                        apply_count,
                        peak_bytes_estimate: peak,
                        status: format!("refused: {e}"),
                    });
                    continue;
                }
            };

            let rho0 = ensemble_density(&[basis_product_state(&neel_pattern(sites))])?;
            let superop = if method.is_vectorized() {
                Some(model.build_superoperator(budget)?)
            } else {
                None
            };
            let v0 = if method.is_vectorized() {
                Some(vectorize(rho0.matrix())?)
            } else {
                None
            };

            let step = || -> Result<f64, CliError> {
                let start = Instant::now();
                match method {
                    Method::TaylorSeries => {
                        let _ = taylor_step(&model, &rho0, cfg.dt, cfg.order)?;
                    }
                    Method::Rk4 => {
                        let _ = rk4_step(&model, &rho0, cfg.dt)?;
                    }
                    Method::VectorizationTaylor => {
                        let _ = vec_taylor_step(
                            superop.as_ref().unwrap(),
                            v0.as_ref().unwrap(),
                            cfg.dt,
                            cfg.order,
                        )?;
                    }
                    Method::VectorizationFull => {
                        let _ = vec_full_step(
                            superop.as_ref().unwrap(),
                            v0.as_ref().unwrap(),
                            cfg.dt,
                            &ExpmConfig::default(),
                        )?;
                    }
                }
                Ok(start.elapsed().as_secs_f64())
            };

            step()?; // warm-up
            let mut timings = Vec::with_capacity(repeats);
            for _ in 0..repeats {
                timings.push(step()?);
            }
            outcomes.push(BenchOutcome {
                method,
                sites,
                dimension: dim,
                seconds_per_step: Some(median(timings)),
                apply_count,
                peak_bytes_estimate: peak,
                status: "ok".to_string(),
            });
        }
    }
    Ok(outcomes)
}

pub fn execute(cfg: &BenchConfig, out: &Path) -> Result<(), CliError> {
    let outcomes = run(cfg)?;
    let header = vec![
        "method".to_string(),
        "sites".to_string(),
        "dimension".to_string(),
        "seconds_per_step".to_string(),
        "apply_count".to_string(),
        "peak_bytes_estimate".to_string(),
        "status".to_string(),
    ];
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .map(|o| {
            vec![
                o.method.name().to_string(),
                o.sites.to_string(),
                o.dimension.to_string(),
                o.seconds_per_step.map(fmt_f64).unwrap_or_default(),
                o.apply_count.to_string(),
                o.peak_bytes_estimate.to_string(),
                o.status.clone(),
            ]
        })
        .collect();
    write_csv(out, &header, &rows)?;
    write_manifest(out, "bench", cfg.seed, cfg)
}
