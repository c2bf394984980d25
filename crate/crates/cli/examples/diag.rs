use lindblad_cli::commands::traj;
use lindblad_cli::config::{
    CollapseBasisConfig, InitialStateConfig, SystemConfig, TrajConfig,
};
use lindblad_core::{
    basis_product_state, ensemble_density, evolve, heisenberg_model, neel_pattern,
    DensityMatrix, EvolutionSample, IntegratorSpec, MemoryBudget, NormStrategy, SpinChainSpec,
};

fn state_at<'a>(samples: &'a [EvolutionSample], t: f64) -> &'a DensityMatrix {
    &samples
        .iter()
        .find(|s| (s.time - t).abs() < 1e-9 * t.max(1.0))
        .unwrap()
        .state
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();
    if which == "c5" {
        diag_c5();
    } else {
        diag_c7();
    }
}

fn diag_c5() {
    let sites = 7;
    let model = heisenberg_model(
        &SpinChainSpec { length: sites, coupling: 1.0, gamma: 1.0, hbar: 1.0 },
        MemoryBudget::default(),
    )
    .unwrap();
    let norm_probe = model
        .lindbladian_norm(NormStrategy::random_probe(1), MemoryBudget::default())
        .unwrap();
    println!("probe norm estimate for L=7 chain: {norm_probe:.3}");
    let rho0 = ensemble_density(&[basis_product_state(&neel_pattern(sites))]).unwrap();
    let t_final = 5.0;
    let reference = evolve(&model, &rho0, &IntegratorSpec::rk4(0.01), t_final, 50, MemoryBudget::default()).unwrap();
    let rk4_coarse = evolve(&model, &rho0, &IntegratorSpec::rk4(0.1), t_final, 5, MemoryBudget::default()).unwrap();

    for (order, dt) in [(20usize, 0.5f64), (10, 0.5), (10, 1.0), (5, 1.0), (5, 2.0)] {
        let taylor = evolve(&model, &rho0, &IntegratorSpec::taylor(dt, order), t_final, 1, MemoryBudget::default()).unwrap();
        println!("cell (n={order}, dt={dt}):");
        for s in taylor.iter().skip(1) {
            let r = state_at(&reference, s.time);
            let dev_t = s.state.matrix().max_abs_diff(r.matrix());
            let dev_rk = state_at(&rk4_coarse, s.time).matrix().max_abs_diff(r.matrix());
            // also diagonal-only deviations
            let mut diag_t = 0.0f64;
            let mut diag_rk = 0.0f64;
            for i in 0..s.state.dim() {
                diag_t = diag_t.max((s.state.element(i, i).re - r.element(i, i).re).abs());
                diag_rk = diag_rk.max(
                    (state_at(&rk4_coarse, s.time).element(i, i).re - r.element(i, i).re).abs(),
                );
            }
            println!(
                "  t={:>4}: dev_taylor={:.3e} dev_rk4={:.3e} ratio={:.1} | diag_t={:.3e} diag_rk={:.3e} ratio={:.1}",
                s.time, dev_t, dev_rk, dev_t / dev_rk, diag_t, diag_rk, diag_t / diag_rk
            );
        }
    }
}

fn diag_c7() {
    let cfg = TrajConfig {
        system: SystemConfig::Heisenberg { length: 3, coupling: 1.0, gamma: 1.0, hbar: 1.0 },
        initial_state: InitialStateConfig::Thermal { beta: 1.0 },
        t_final: 2.0,
        dt: 0.1,
        n_trajectories: 1000,
        taylor_order: 10,
        metts_burn_in: 10,
        metts_thin: 10,
        collapse_basis: CollapseBasisConfig::X,
        reference: None,
        sample_every: 10,
        memory_budget_bytes: MemoryBudget::DEFAULT_BYTES,
        seed: 20240811,
        output_path: None,
        elements: None,
    };
    let rows = traj::run(&cfg).unwrap();
    for row in &rows {
        println!(
            "t={:>3} {}: mcwf={:+.5} ref={:+.5} diff={:+.5} stderr={:.5} (diff/stderr={:.1})",
            row.time,
            row.element,
            row.mcwf_value,
            row.reference_value,
            row.mcwf_value - row.reference_value,
            row.stderr_estimate,
            (row.mcwf_value - row.reference_value).abs() / row.stderr_estimate.max(1e-12)
        );
    }
}
