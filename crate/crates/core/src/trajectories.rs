//! Stochastic unraveling: quantum-jump trajectories driven by the effective
//! non-Hermitian Hamiltonian, ensemble density-matrix reconstruction, and
//! thermal initial-state sampling by a collapse/imaginary-time Markov chain.
//!
//! The jump scheme is first order in δt: per step each channel fires with
//! probability δpᵢ = δt·⟨ψ|Lᵢ†Lᵢ|ψ⟩, otherwise the state drifts under
//! e^{−i H_eff δt/ħ} (itself evaluated as a truncated series) and is
//! renormalized. Validity requires Σδpᵢ well below 1; steps are rejected at
//! 0.5 and logged above 0.1.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::CoreError;
use crate::linalg::{expm, gershgorin_lower_bound, vec_norm, ComplexMatrix, ExpmConfig};
use crate::lindblad::{DensityMatrix, LindbladModel, HERMITICITY_REL_TOL};
use crate::streams::{stream_rng, StreamDomain};

/// Hard per-step cap on the total jump probability.
pub const JUMP_PROBABILITY_LIMIT: f64 = 0.5;
/// Above this total jump probability a warning is logged.
pub const JUMP_PROBABILITY_WARN: f64 = 0.1;
/// Norm floor below which non-Hermitian propagation is considered degenerate.
const SURVIVAL_NORM_FLOOR: f64 = 1e-14;

/// Normalized state vector of a single trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, CoreError> {
        if amplitudes.is_empty() {
            return Err(CoreError::dimension_mismatch("PureState: empty amplitudes"));
        }
        Ok(PureState { amplitudes })
    }

    /// Computational-basis unit vector |index⟩.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        PureState { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    pub fn normalized(mut self) -> Self {
        let norm = self.norm();
        if norm > 0.0 {
            for z in &mut self.amplitudes {
                *z /= norm;
            }
        }
        self
    }

    /// ⟨ψ|O|ψ⟩.
    pub fn expectation(&self, op: &ComplexMatrix) -> Complex64 {
        let image = op.matvec(&self.amplitudes);
        self.amplitudes
            .iter()
            .zip(image.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |⟨index|ψ⟩|².
    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }
}

/// Step size, ensemble size, seed, and the series order used for the
/// non-Hermitian drift propagator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryConfig {
    pub dt: f64,
    pub n_trajectories: usize,
    pub master_seed: u64,
    pub taylor_order: usize,
}

/// Primary collapse direction for the thermal-sampling Markov chain. The x
/// basis converges fastest for diagonal observables in the z representation
/// and is the default everywhere.
///
/// The sampler alternates the primary basis with a complementary one on odd
/// chain steps. A single-basis chain is not ergodic whenever H conserves
/// the corresponding total spin component (the isotropic chain conserves
/// all of them), because the imaginary-time kernel then never connects
/// different magnetization sectors of the product states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CollapseBasis {
    #[default]
    X,
    Y,
    Z,
}

impl CollapseBasis {
    /// Basis used on odd chain steps to keep the chain ergodic.
    fn complement(self) -> CollapseBasis {
        match self {
            CollapseBasis::X | CollapseBasis::Y => CollapseBasis::Z,
            CollapseBasis::Z => CollapseBasis::X,
        }
    }
}

/// Thermal-sampler parameters: inverse temperature, chain length, burn-in,
/// seed, and collapse basis.
///
/// `thin` keeps every thin-th chain state; successive chain samples are
/// autocorrelated, so estimators that assume independent samples (standard
/// errors in particular) want `thin` large enough to decorrelate them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MettsConfig {
    pub beta: f64,
    pub n_samples: usize,
    pub burn_in: usize,
    pub master_seed: u64,
    pub collapse_basis: CollapseBasis,
    pub thin: usize,
}

impl MettsConfig {
    pub fn new(beta: f64, n_samples: usize, master_seed: u64) -> Self {
        MettsConfig {
            beta,
            n_samples,
            burn_in: 10,
            master_seed,
            collapse_basis: CollapseBasis::X,
            thin: 1,
        }
    }
}

/// H_eff = H − (iħ/2) Σᵢ Lᵢ†Lᵢ, the no-jump generator.
pub fn effective_hamiltonian(model: &LindbladModel) -> ComplexMatrix {
    let mut h_eff = model.hamiltonian().clone();
    let factor = Complex64::new(0.0, -model.hbar() / 2.0);
    for l_dag_l in model.jump_products() {
        h_eff.add_assign_scaled(l_dag_l, factor);
    }
    h_eff
}

/// Applies the truncated series for e^{−i H_eff δt/ħ} to the state.
///
/// Returns the renormalized state and the pre-normalization norm (the
/// survival amplitude of the no-jump branch).
pub fn nh_propagate(
    h_eff: &ComplexMatrix,
    psi: &PureState,
    dt: f64,
    order: usize,
    hbar: f64,
) -> Result<(PureState, f64), CoreError> {
    if h_eff.cols() != psi.dim() {
        return Err(CoreError::dimension_mismatch(
            "nh_propagate: state dimension mismatch",
        ));
    }
    if !(dt >= 0.0) {
        return Err(CoreError::invalid_spec("dt must be non-negative"));
    }
    let mut sum = psi.amplitudes.clone();
    let mut running = psi.amplitudes.clone();
    for k in 1..=order {
        running = h_eff.matvec(&running);
        let factor = Complex64::new(0.0, -dt / (hbar * k as f64));
        for (s, r) in sum.iter_mut().zip(running.iter_mut()) {
            *r *= factor;
            *s += *r;
        }
    }
    let survival = vec_norm(&sum);
    if survival < SURVIVAL_NORM_FLOOR {
        return Err(CoreError::DegenerateState { norm: survival });
    }
    let state = PureState { amplitudes: sum }.normalized();
    Ok((state, survival))
}

/// A recorded quantum jump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpEvent {
    pub step: usize,
    pub time: f64,
    pub channel: usize,
}

/// One unraveled trajectory sampled on the step grid, t = 0 included.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PureState>,
    pub jumps: Vec<JumpEvent>,
}

impl Trajectory {
    /// State at the grid point closest to `t`.
    pub fn state_at(&self, t: f64) -> &PureState {
        let idx = self
            .times
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (*a - t).abs().total_cmp(&(*b - t).abs()))
            .map(|(i, _)| i)
            .unwrap();
        &self.states[idx]
    }
}

/// Unravels one trajectory; fully deterministic given
/// (cfg.master_seed, stream_id).
pub fn mcwf_trajectory(
    model: &LindbladModel,
    psi0: &PureState,
    cfg: &TrajectoryConfig,
    t_final: f64,
    stream_id: u64,
) -> Result<Trajectory, CoreError> {
    let h_eff = effective_hamiltonian(model);
    mcwf_trajectory_with(model, &h_eff, psi0, cfg, t_final, stream_id)
}

fn mcwf_trajectory_with(
    model: &LindbladModel,
    h_eff: &ComplexMatrix,
    psi0: &PureState,
    cfg: &TrajectoryConfig,
    t_final: f64,
    stream_id: u64,
) -> Result<Trajectory, CoreError> {
    if psi0.dim() != model.dim() {
        return Err(CoreError::dimension_mismatch(
            "mcwf_trajectory: state dimension mismatch",
        ));
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(CoreError::invalid_spec(
            "mcwf_trajectory: initial state must be normalized",
        ));
    }
    if !(cfg.dt > 0.0) {
        return Err(CoreError::invalid_spec("trajectory dt must be positive"));
    }
    if !(t_final >= 0.0) {
        return Err(CoreError::invalid_spec("t_final must be non-negative"));
    }

    let n_full = ((t_final + 1e-9 * cfg.dt) / cfg.dt).floor() as usize;
    let remainder = (t_final - n_full as f64 * cfg.dt).max(0.0);
    let has_partial = remainder > 1e-12 * t_final.max(1.0);
    let n_steps = n_full + usize::from(has_partial);

    let mut rng = stream_rng(cfg.master_seed, StreamDomain::Trajectory, stream_id);
    let mut psi = psi0.clone();
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut jumps = Vec::new();
    times.push(0.0);
    states.push(psi.clone());
    let mut warned = false;

    for step in 1..=n_steps {
        let dt_step = if step <= n_full { cfg.dt } else { remainder };
        let time = if step <= n_full {
            step as f64 * cfg.dt
        } else {
            t_final
        };

        let channel_probs: Vec<f64> = model
            .jump_products()
            .iter()
            .map(|l_dag_l| dt_step * psi.expectation(l_dag_l).re)
            .collect();
        let total: f64 = channel_probs.iter().sum();
        if total >= JUMP_PROBABILITY_LIMIT {
            return Err(CoreError::StepSizeTooLarge {
                total_jump_probability: total,
                limit: JUMP_PROBABILITY_LIMIT,
            }
            .at_step(step));
        }
        if total > JUMP_PROBABILITY_WARN && !warned {
            log::warn!(
                "trajectory {stream_id}: total jump probability {total:.3} per step exceeds \
                 {JUMP_PROBABILITY_WARN}; consider a smaller dt"
            );
            warned = true;
        }

        // The jump branch fires with the exact norm loss of the drifted
        // state (1 − ‖e^{−iH_eff δt/ħ}ψ‖²) rather than its first-order
        // approximation Σδpᵢ; channels keep their δpᵢ weights. Within the
        // jump branch the operator acts at the step midpoint. Both choices
        // remove O(δp²) ensemble bias that is visible at δt = 0.1.
        let (drifted, survival) =
            nh_propagate(h_eff, &psi, dt_step, cfg.taylor_order, model.hbar())
                .map_err(|e| e.at_step(step))?;
        let jump_probability = (1.0 - survival * survival).max(0.0);

        let draw: f64 = rng.random();
        if draw < jump_probability && total > 0.0 {
            // conditioned on the jump branch, rescale the draw to pick the
            // channel with weight δpᵢ
            let scaled = draw / jump_probability * total;
            let mut cumulative = 0.0;
            let mut channel = channel_probs.len() - 1;
            for (i, p) in channel_probs.iter().enumerate() {
                cumulative += p;
                if scaled < cumulative {
                    channel = i;
                    break;
                }
            }
            let (half_drifted, _) =
                nh_propagate(h_eff, &psi, dt_step / 2.0, cfg.taylor_order, model.hbar())
                    .map_err(|e| e.at_step(step))?;
            let jumped = model.jump_ops()[channel].matvec(&half_drifted.amplitudes);
            let norm = vec_norm(&jumped);
            if norm < SURVIVAL_NORM_FLOOR {
                return Err(CoreError::DegenerateState { norm }.at_step(step));
            }
            let jumped = PureState { amplitudes: jumped }.normalized();
            let (after_jump, _) =
                nh_propagate(h_eff, &jumped, dt_step / 2.0, cfg.taylor_order, model.hbar())
                    .map_err(|e| e.at_step(step))?;
            psi = after_jump;
            jumps.push(JumpEvent {
                step,
                time,
                channel,
            });
        } else {
            psi = drifted;
        }
        times.push(time);
        states.push(psi.clone());
    }

    Ok(Trajectory {
        times,
        states,
        jumps,
    })
}

/// Runs `cfg.n_trajectories` independent trajectories, fanned out across
/// threads and merged in trajectory order, so results are bit-identical
/// regardless of scheduling.
///
/// `initial_states` supplies one state per trajectory, or a single state
/// shared by all.
pub fn mcwf_ensemble(
    model: &LindbladModel,
    initial_states: &[PureState],
    cfg: &TrajectoryConfig,
    t_final: f64,
) -> Result<Vec<Trajectory>, CoreError> {
    if cfg.n_trajectories == 0 {
        return Err(CoreError::invalid_spec("n_trajectories must be >= 1"));
    }
    if initial_states.is_empty() {
        return Err(CoreError::invalid_spec(
            "mcwf_ensemble: at least one initial state required",
        ));
    }
    if initial_states.len() != 1 && initial_states.len() != cfg.n_trajectories {
        return Err(CoreError::invalid_spec(format!(
            "mcwf_ensemble: got {} initial states for {} trajectories",
            initial_states.len(),
            cfg.n_trajectories
        )));
    }
    let h_eff = effective_hamiltonian(model);
    (0..cfg.n_trajectories)
        .into_par_iter()
        .map(|k| {
            let psi0 = if initial_states.len() == 1 {
                &initial_states[0]
            } else {
                &initial_states[k]
            };
            mcwf_trajectory_with(model, &h_eff, psi0, cfg, t_final, k as u64)
        })
        .collect()
}

/// ρ ≈ (1/N) Σᵢ |ψᵢ⟩⟨ψᵢ|: Hermitian and positive semidefinite by
/// construction, trace 1 up to the states' normalization.
pub fn ensemble_density(states: &[PureState]) -> Result<DensityMatrix, CoreError> {
    let Some(first) = states.first() else {
        return Err(CoreError::invalid_spec(
            "ensemble_density: empty state list",
        ));
    };
    let d = first.dim();
    let weight = 1.0 / states.len() as f64;
    let mut mat = ComplexMatrix::zeros(d, d);
    for psi in states {
        if psi.dim() != d {
            return Err(CoreError::dimension_mismatch(
                "ensemble_density: inconsistent state dimensions",
            ));
        }
        for i in 0..d {
            let row = psi.amplitudes[i] * weight;
            for j in 0..d {
                mat[(i, j)] += row * psi.amplitudes[j].conj();
            }
        }
    }
    DensityMatrix::new(mat)
}

fn site_mask(site: usize, length: usize) -> usize {
    1 << (length - 1 - site)
}

/// Applies (I ± σ_axis)/2 at `site`, returning the squared norm of the
/// projected (still unnormalized) state.
pub(crate) fn project_site(
    amplitudes: &mut [Complex64],
    site: usize,
    length: usize,
    basis: CollapseBasis,
    plus: bool,
) -> f64 {
    let mask = site_mask(site, length);
    let sign = if plus { 1.0 } else { -1.0 };
    match basis {
        CollapseBasis::Z => {
            // (I ± σz)/2 keeps bit=0 (up) for +, bit=1 for −
            for (b, amp) in amplitudes.iter_mut().enumerate() {
                let up = b & mask == 0;
                if up != plus {
                    *amp = Complex64::new(0.0, 0.0);
                }
            }
        }
        CollapseBasis::X => {
            for b in 0..amplitudes.len() {
                if b & mask != 0 {
                    continue; // handle each pair once, from the bit=0 side
                }
                let flipped = b | mask;
                let lo = amplitudes[b];
                let hi = amplitudes[flipped];
                let proj_lo = (lo + hi * sign) * 0.5;
                amplitudes[b] = proj_lo;
                amplitudes[flipped] = proj_lo * sign;
            }
        }
        CollapseBasis::Y => {
            // σy maps (lo, hi) to (−i·hi, i·lo)
            let i = Complex64::new(0.0, 1.0);
            for b in 0..amplitudes.len() {
                if b & mask != 0 {
                    continue;
                }
                let flipped = b | mask;
                let lo = amplitudes[b];
                let hi = amplitudes[flipped];
                let proj_lo = (lo - i * hi * sign) * 0.5;
                amplitudes[b] = proj_lo;
                amplitudes[flipped] = proj_lo * (i * sign);
            }
        }
    }
    amplitudes.iter().map(|z| z.norm_sqr()).sum()
}

fn random_product_state(
    length: usize,
    basis: CollapseBasis,
    rng: &mut impl Rng,
) -> PureState {
    let dim = 1usize << length;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[0] = Complex64::new(1.0, 0.0);
    // collapse the |0…0⟩ state site by site with fair coin flips; for the
    // x/y bases this yields a uniform product state in that basis
    for site in 0..length {
        let plus = rng.random::<f64>() < 0.5;
        let norm_sqr = project_site(&mut amplitudes, site, length, basis, plus);
        let scale = if norm_sqr > 0.0 {
            1.0 / norm_sqr.sqrt()
        } else {
            // |0…0⟩ has no σ=−1 component along z; flip to the + branch
            let _ = project_site(&mut amplitudes, site, length, basis, !plus);
            1.0
        };
        for z in &mut amplitudes {
            *z *= scale;
        }
    }
    PureState { amplitudes }.normalized()
}

/// Thermal-state sampler: a Markov chain alternating imaginary-time
/// evolution e^{−βH/2} of a product state with site-by-site Born collapse.
/// The first `burn_in` samples are discarded. The sample average of |ψ⟩⟨ψ|
/// converges to the Gibbs state e^{−βH}/Z.
///
/// Collapses use the configured basis on even steps and its complement on
/// odd steps; each kernel satisfies detailed balance for the Gibbs weights,
/// and the alternation restores ergodicity across conserved magnetization
/// sectors (see [`CollapseBasis`]).
pub fn metts_sample(
    hamiltonian: &ComplexMatrix,
    cfg: &MettsConfig,
) -> Result<Vec<PureState>, CoreError> {
    if !hamiltonian.is_square() {
        return Err(CoreError::dimension_mismatch("metts_sample: H not square"));
    }
    let dim = hamiltonian.rows();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(CoreError::invalid_spec(format!(
            "metts_sample: dimension {dim} is not a spin-chain dimension 2^L"
        )));
    }
    if hamiltonian.hermiticity_defect() > HERMITICITY_REL_TOL * hamiltonian.frobenius_norm() {
        return Err(CoreError::invalid_model("metts_sample: H is not Hermitian"));
    }
    if cfg.n_samples == 0 {
        return Err(CoreError::invalid_spec("n_samples must be >= 1"));
    }
    if cfg.thin == 0 {
        return Err(CoreError::invalid_spec("thin must be >= 1"));
    }
    if !(cfg.beta >= 0.0) {
        return Err(CoreError::invalid_spec("beta must be non-negative"));
    }
    let length = dim.trailing_zeros() as usize;

    // e^{−βH/2} built once; the spectrum shift keeps large β in range and
    // cancels when each sample is normalized.
    let shift = gershgorin_lower_bound(hamiltonian);
    let scaled = ComplexMatrix::from_fn(dim, dim, |i, j| {
        let mut v = hamiltonian[(i, j)];
        if i == j {
            v -= Complex64::new(shift, 0.0);
        }
        v * Complex64::new(-cfg.beta / 2.0, 0.0)
    });
    let imaginary_time = expm(&scaled, &ExpmConfig::default())?;

    let mut rng = stream_rng(cfg.master_seed, StreamDomain::Metts, 0);
    let mut product = random_product_state(length, cfg.collapse_basis, &mut rng);
    let mut samples = Vec::with_capacity(cfg.n_samples);

    let total_steps = cfg.burn_in + cfg.n_samples * cfg.thin;
    for chain_step in 0..total_steps {
        let evolved = imaginary_time.matvec(&product.amplitudes);
        let norm = vec_norm(&evolved);
        if norm < 1e-150 {
            return Err(CoreError::DegenerateState { norm });
        }
        let metts = PureState { amplitudes: evolved }.normalized();
        if chain_step >= cfg.burn_in && (chain_step - cfg.burn_in) % cfg.thin == 0 {
            samples.push(metts.clone());
        }

        let basis = if chain_step % 2 == 0 {
            cfg.collapse_basis
        } else {
            cfg.collapse_basis.complement()
        };
        // collapse site by site with Born probabilities
        let mut amplitudes = metts.amplitudes;
        for site in 0..length {
            let mut trial = amplitudes.clone();
            let p_plus = project_site(&mut trial, site, length, basis, true);
            let plus = rng.random::<f64>() < p_plus;
            if plus {
                amplitudes = trial;
            } else {
                project_site(&mut amplitudes, site, length, basis, false);
            }
            let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
            let scale = 1.0 / norm_sqr.sqrt();
            for z in &mut amplitudes {
                *z *= scale;
            }
        }
        product = PureState { amplitudes };
    }
    Ok(samples)
}
