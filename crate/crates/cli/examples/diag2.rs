use lindblad_core::{
    ensemble_density, evolve, heisenberg_model, metts_sample, thermal_state, IntegratorSpec,
    MemoryBudget, MettsConfig, SpinChainSpec,
};

fn main() {
    let model = heisenberg_model(
        &SpinChainSpec { length: 3, coupling: 1.0, gamma: 1.0, hbar: 1.0 },
        MemoryBudget::default(),
    )
    .unwrap();
    let beta = 1.0;
    let metts_cfg = MettsConfig::new(beta, 1000, 20240811);
    let samples = metts_sample(model.hamiltonian(), &metts_cfg).unwrap();
    let rho_hat0 = ensemble_density(&samples).unwrap();
    let rho_eq = thermal_state(model.hamiltonian(), beta).unwrap();

    println!("start gap per diagonal (rho_hat(0) - rho_eq):");
    for i in 0..8 {
        println!("  {i}: {:+.5}", rho_hat0.element(i, i).re - rho_eq.element(i, i).re);
    }

    // propagate both starts deterministically and compare at t = 1, 2
    let spec = IntegratorSpec::taylor(0.1, 10);
    let a = evolve(&model, &rho_hat0, &spec, 2.0, 10, MemoryBudget::default()).unwrap();
    let b = evolve(&model, &rho_eq, &spec, 2.0, 10, MemoryBudget::default()).unwrap();
    for (sa, sb) in a.iter().zip(b.iter()) {
        println!("t={}: propagated start-gap per diagonal:", sa.time);
        for i in 0..8 {
            println!(
                "  {i}: {:+.5}",
                sa.state.element(i, i).re - sb.state.element(i, i).re
            );
        }
    }
}
