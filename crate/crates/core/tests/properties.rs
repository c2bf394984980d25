//! Cross-module invariants: algebraic identities on random inputs,
//! cross-method consistency, and the cost-matched accuracy inequality.

use lindblad_core::streams::{stream_rng, StreamDomain};
use lindblad_core::{
    basis_product_state, ensemble_density, evolve, expm, mcwf_ensemble, metts_sample,
    neel_pattern, spin_operator, taylor_step, thermal_state, truncation_error_bound,
    two_level_model, vectorize, Complex64, ComplexMatrix, DensityMatrix, ExpmConfig,
    IntegratorSpec, LindbladModel, MemoryBudget, MettsConfig, SpinChainSpec, TrajectoryConfig,
    TwoLevelSpec,
};
use proptest::prelude::*;
use rand::Rng;

fn matrix_strategy(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(move |pairs| {
        let entries = pairs
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(dim, dim, entries).unwrap()
    })
}

/// Rescales to a target Frobenius norm (no-op on the zero matrix).
fn with_norm(m: &ComplexMatrix, target: f64) -> ComplexMatrix {
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        m.clone()
    } else {
        m.scaled(Complex64::new(target / norm, 0.0))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_bilinear(
        a in matrix_strategy(2),
        b in matrix_strategy(3),
        re in -2.0..2.0f64,
        im in -2.0..2.0f64,
    ) {
        let alpha = Complex64::new(re, im);
        let scaled_first = a.scaled(alpha).kron(&b);
        let scaled_after = a.kron(&b).scaled(alpha);
        prop_assert!(scaled_first.max_abs_diff(&scaled_after) <= 1e-13);
    }

    #[test]
    fn kron_mixed_product(
        a in matrix_strategy(2),
        b in matrix_strategy(3),
        c in matrix_strategy(2),
        d in matrix_strategy(3),
    ) {
        let lhs = a.kron(&b).matmul(&c.kron(&d));
        let rhs = a.matmul(&c).kron(&b.matmul(&d));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn expm_norm_bound(m in matrix_strategy(4), target in 0.0..2.0f64) {
        let a = with_norm(&m, target);
        let e = expm(&a, &ExpmConfig::default()).unwrap();
        let dim = a.rows() as f64;
        prop_assert!(e.frobenius_norm() <= dim * a.frobenius_norm().exp() + 1e-12);
    }

    #[test]
    fn expm_methods_agree(m in matrix_strategy(8), target in 0.0..4.0f64) {
        let a = with_norm(&m, target);
        let taylor = expm(&a, &ExpmConfig::taylor(20)).unwrap();
        let pade = expm(&a, &ExpmConfig::pade(6)).unwrap();
        prop_assert!(taylor.max_abs_diff(&pade) <= 1e-10);
    }

    #[test]
    fn expm_inverse_identity(m in matrix_strategy(8), target in 0.0..4.0f64) {
        let a = with_norm(&m, target);
        let forward = expm(&a, &ExpmConfig::default()).unwrap();
        let backward = expm(&a.scaled(Complex64::new(-1.0, 0.0)), &ExpmConfig::default()).unwrap();
        let product = forward.matmul(&backward);
        prop_assert!(product.max_abs_diff(&ComplexMatrix::identity(a.rows())) <= 1e-10);
    }

    #[test]
    fn choi_identity(
        a in matrix_strategy(3),
        x in matrix_strategy(3),
        b in matrix_strategy(3),
    ) {
        let left = vectorize(&a.matmul(&x).matmul(&b)).unwrap();
        let right = b.transpose().kron(&a).matvec(vectorize(&x).unwrap().as_slice());
        let diff = left
            .as_slice()
            .iter()
            .zip(right.iter())
            .map(|(l, r)| (l - r).norm())
            .fold(0.0f64, f64::max);
        prop_assert!(diff <= 1e-13);
    }

    #[test]
    fn generator_preserves_hermiticity_and_trace(
        h_raw in matrix_strategy(3),
        l in matrix_strategy(3),
        rho_raw in matrix_strategy(3),
    ) {
        let h = ComplexMatrix::from_fn(3, 3, |i, j| (h_raw[(i, j)] + h_raw[(j, i)].conj()) * 0.5);
        let rho = ComplexMatrix::from_fn(3, 3, |i, j| (rho_raw[(i, j)] + rho_raw[(j, i)].conj()) * 0.5);
        let model = LindbladModel::new(1.0, h, vec![l]).unwrap();
        let image = model.apply_lindbladian(&rho).unwrap();
        prop_assert!(image.hermiticity_defect() <= 1e-12 * image.frobenius_norm().max(1e-30));
        prop_assert!(image.trace().norm() <= 1e-12 * rho.frobenius_norm().max(1e-30));
    }

    #[test]
    fn thermal_state_is_valid(h_raw in matrix_strategy(4), beta in 0.0..5.0f64, target in 0.1..10.0f64) {
        let sym = ComplexMatrix::from_fn(4, 4, |i, j| (h_raw[(i, j)] + h_raw[(j, i)].conj()) * 0.5);
        let h = with_norm(&sym, target);
        let rho = thermal_state(&h, beta).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(rho.min_eigenvalue().unwrap() >= -1e-10);
    }
}

/// Measured truncation error (the dropped-tail norm) never exceeds the
/// bound on random d = 2 and d = 4 models with Δ ≤ 2.
#[test]
fn truncation_bound_is_an_upper_bound() {
    let mut rng = stream_rng(2024, StreamDomain::NormProbe, 40);
    for dim in [2usize, 4] {
        for trial in 0..3 {
            let raw = ComplexMatrix::from_fn(dim, dim, |_, _| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let h = ComplexMatrix::from_fn(dim, dim, |i, j| (raw[(i, j)] + raw[(j, i)].conj()) * 0.5);
            let l = ComplexMatrix::from_fn(dim, dim, |_, _| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let model = LindbladModel::new(1.0, h, vec![l]).unwrap();
            let norm_l = model
                .lindbladian_norm(
                    lindblad_core::NormStrategy::ExactSmall,
                    MemoryBudget::default(),
                )
                .unwrap();
            for delta in [0.5f64, 1.0, 2.0] {
                let t = delta / norm_l;
                let rho0 = DensityMatrix::basis_projector(dim, 0);
                let mut running = rho0.matrix().clone();
                let mut terms = Vec::new();
                for k in 1..=50usize {
                    running = model
                        .apply_lindbladian(&running)
                        .unwrap()
                        .scaled(Complex64::new(t / k as f64, 0.0));
                    terms.push(running.clone());
                }
                for n in 1..=12usize {
                    let mut tail = ComplexMatrix::zeros(dim, dim);
                    for term in terms[n..].iter().rev() {
                        tail.add_assign_scaled(term, Complex64::new(1.0, 0.0));
                    }
                    let measured = tail.frobenius_norm() / rho0.matrix().frobenius_norm();
                    let bound = truncation_error_bound(norm_l, t, n).relative;
                    assert!(
                        measured <= bound,
                        "d={dim}, trial={trial}, n={n}, delta={delta}: {measured:.3e} > {bound:.3e}"
                    );
                }
            }
        }
    }
}

/// Cost-matched inequality: with n = 4m retained terms at sampling step
/// Δt = m·δt ≤ 1, the series method is at least as accurate as RK4 at δt.
#[test]
fn cost_matched_series_beats_rk4_below_unit_step() {
    let model = two_level_model(&TwoLevelSpec {
        energy: 1.0,
        rabi: 1.0,
        gamma: 0.5,
        hbar: 1.0,
    })
    .unwrap();
    let rho0 = DensityMatrix::basis_projector(2, 1);
    let t_final = 10.0;
    let reference = evolve(
        &model,
        &rho0,
        &IntegratorSpec::vectorization_full(1e-3),
        t_final,
        1000,
        MemoryBudget::default(),
    )
    .unwrap();
    let fine_dt = 0.1;
    for m in [5usize, 10] {
        let big_dt = m as f64 * fine_dt;
        let order = 4 * m;
        let taylor = evolve(
            &model,
            &rho0,
            &IntegratorSpec::taylor(big_dt, order),
            t_final,
            1,
            MemoryBudget::default(),
        )
        .unwrap();
        let rk4 = evolve(
            &model,
            &rho0,
            &IntegratorSpec::rk4(fine_dt),
            t_final,
            m,
            MemoryBudget::default(),
        )
        .unwrap();
        let mut dev_taylor = 0.0f64;
        let mut dev_rk4 = 0.0f64;
        for (ts, rs) in taylor.iter().zip(rk4.iter()).skip(1) {
            let reference_state = reference
                .iter()
                .find(|s| (s.time - ts.time).abs() < 1e-9)
                .unwrap();
            dev_taylor = dev_taylor.max(
                ts.state
                    .matrix()
                    .max_abs_diff(reference_state.state.matrix()),
            );
            dev_rk4 = dev_rk4.max(
                rs.state
                    .matrix()
                    .max_abs_diff(reference_state.state.matrix()),
            );
        }
        assert!(
            dev_taylor <= dev_rk4,
            "m={m}: series dev {dev_taylor:.3e} > rk4 dev {dev_rk4:.3e}"
        );
    }
}

/// Unraveling consistency on the driven two-level system:
/// ‖ρ_MCWF(t) − ρ_series(t)‖_F ≤ 4/√N at t ∈ {1, 2, 5}.
#[test]
fn unraveling_matches_deterministic_solution() {
    let model = two_level_model(&TwoLevelSpec {
        energy: 1.0,
        rabi: 1.0,
        gamma: 0.5,
        hbar: 1.0,
    })
    .unwrap();
    let n_trajectories = 1000;
    let cfg = TrajectoryConfig {
        dt: 0.01,
        n_trajectories,
        master_seed: 515,
        taylor_order: 8,
    };
    let psi0 = lindblad_core::PureState::basis_state(2, 1);
    let ensemble = mcwf_ensemble(&model, &[psi0], &cfg, 5.0).unwrap();
    let reference = evolve(
        &model,
        &DensityMatrix::basis_projector(2, 1),
        &IntegratorSpec::taylor(0.01, 10),
        5.0,
        100,
        MemoryBudget::default(),
    )
    .unwrap();
    let tolerance = 4.0 / (n_trajectories as f64).sqrt();
    for t in [1.0, 2.0, 5.0] {
        let states: Vec<_> = ensemble
            .iter()
            .map(|traj| traj.state_at(t).clone())
            .collect();
        let rho_mc = ensemble_density(&states).unwrap();
        let rho_ref = &reference
            .iter()
            .find(|s| (s.time - t).abs() < 1e-9)
            .unwrap()
            .state;
        let distance = (rho_mc.matrix() - rho_ref.matrix()).frobenius_norm();
        assert!(
            distance <= tolerance,
            "t={t}: Frobenius distance {distance:.4} > {tolerance:.4}"
        );
        assert!(rho_mc.min_eigenvalue().unwrap() >= -1e-12);
    }
}

/// Thermally initialized ensemble on the 5-site chain reproduces the
/// deterministic diagonals at t = 1 within 3/√N.
#[test]
fn chain_ensemble_matches_series_diagonals() {
    let spec = SpinChainSpec {
        length: 5,
        coupling: 1.0,
        gamma: 1.0,
        hbar: 1.0,
    };
    let model = lindblad_core::heisenberg_model(&spec, MemoryBudget::default()).unwrap();
    let beta = 1.0;
    let n_trajectories = 1000;

    let metts_cfg = MettsConfig::new(beta, n_trajectories, 99);
    let initial_states = metts_sample(model.hamiltonian(), &metts_cfg).unwrap();
    let cfg = TrajectoryConfig {
        dt: 0.1,
        n_trajectories,
        master_seed: 99,
        taylor_order: 10,
    };
    let ensemble = mcwf_ensemble(&model, &initial_states, &cfg, 1.0).unwrap();
    let finals: Vec<_> = ensemble
        .iter()
        .map(|traj| traj.states.last().unwrap().clone())
        .collect();
    let rho_mc = ensemble_density(&finals).unwrap();

    let rho0 = thermal_state(model.hamiltonian(), beta).unwrap();
    let reference = evolve(
        &model,
        &rho0,
        &IntegratorSpec::taylor(0.1, 10),
        1.0,
        10,
        MemoryBudget::default(),
    )
    .unwrap();
    let rho_ref = &reference.last().unwrap().state;
    let tolerance = 3.0 / (n_trajectories as f64).sqrt();
    for i in 0..model.dim() {
        let diff = (rho_mc.element(i, i).re - rho_ref.element(i, i).re).abs();
        assert!(diff <= tolerance, "diagonal {i}: {diff:.4} > {tolerance:.4}");
    }
}

/// The boundary-driven chain drifts toward its nonequilibrium steady
/// profile: total magnetization moves away from the Néel value under the
/// source/drain channels.
#[test]
fn boundary_drive_changes_magnetization() {
    let spec = SpinChainSpec {
        length: 3,
        coupling: 1.0,
        gamma: 1.0,
        hbar: 1.0,
    };
    let model = lindblad_core::heisenberg_model(&spec, MemoryBudget::default()).unwrap();
    let rho0 = ensemble_density(&[basis_product_state(&neel_pattern(3))]).unwrap();
    let (stepped, report) = taylor_step(&model, &rho0, 0.2, 12).unwrap();
    assert!(report.trace_drift.abs() < 1e-12);

    let mut total_sz = ComplexMatrix::zeros(8, 8);
    for site in 0..3 {
        total_sz.add_assign_scaled(
            &spin_operator(site, lindblad_core::SpinAxis::Z, 3).unwrap(),
            Complex64::new(1.0, 0.0),
        );
    }
    let before = rho0.matrix().matmul(&total_sz).trace().re;
    let after = stepped.matrix().matmul(&total_sz).trace().re;
    assert!(
        (after - before).abs() > 1e-4,
        "boundary drive left magnetization unchanged: {before} vs {after}"
    );
}
