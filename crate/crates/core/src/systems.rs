//! Model builders and initial states: spin operator algebra on a chain, the
//! damped-Rabi two-level system, the boundary-driven Heisenberg chain, and
//! thermal / computational-basis product states.
//!
//! Basis convention, fixed once: site 0 is the most significant bit and
//! |↑⟩ = (1, 0). All tabulated values elsewhere assume this ordering.

use num_complex::Complex64;

use crate::error::CoreError;
use crate::linalg::{expm, ComplexMatrix, ExpmConfig};
use crate::lindblad::{DensityMatrix, LindbladModel, HERMITICITY_REL_TOL};
use crate::memory::{matrix_bytes, MemoryBudget};
use crate::trajectories::PureState;

/// Parameters of the driven dissipative two-level system: ground state at
/// energy zero, excited state at `energy`, drive `rabi`, decay rate `gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelSpec {
    pub energy: f64,
    pub rabi: f64,
    pub gamma: f64,
    pub hbar: f64,
}

/// Parameters of the boundary-driven Heisenberg chain: `length` spins,
/// isotropic coupling `coupling`, injection/removal rate `gamma` at the
/// first/last site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinChainSpec {
    pub length: usize,
    pub coupling: f64,
    pub gamma: f64,
    pub hbar: f64,
}

/// Spin-1/2 operator selector; x/y/z are half the Pauli matrices,
/// plus/minus are S^x ± i S^y.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinAxis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// One site of a computational-basis product state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

fn single_site_operator(axis: SpinAxis) -> ComplexMatrix {
    let c = Complex64::new;
    let entries = match axis {
        SpinAxis::X => vec![c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)],
        SpinAxis::Y => vec![c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)],
        SpinAxis::Z => vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)],
        SpinAxis::Plus => vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        SpinAxis::Minus => vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
    };
    ComplexMatrix::new(2, 2, entries).unwrap()
}

/// Embedding I ⊗ … ⊗ S^axis ⊗ … ⊗ I of a single-site spin operator into the
/// 2^length-dimensional chain space.
pub fn spin_operator(
    site: usize,
    axis: SpinAxis,
    length: usize,
) -> Result<ComplexMatrix, CoreError> {
    if length == 0 {
        return Err(CoreError::invalid_spec("chain length must be >= 1"));
    }
    if site >= length {
        return Err(CoreError::invalid_spec(format!(
            "site {site} out of range for chain of length {length}"
        )));
    }
    let op = single_site_operator(axis);
    let left = ComplexMatrix::identity(1 << site);
    let right = ComplexMatrix::identity(1 << (length - site - 1));
    Ok(left.kron(&op).kron(&right))
}

/// H = E|1⟩⟨1| + Ω(|0⟩⟨1| + |1⟩⟨0|) with a single decay channel
/// L = √Γ |0⟩⟨1|.
pub fn two_level_model(spec: &TwoLevelSpec) -> Result<LindbladModel, CoreError> {
    if spec.gamma < 0.0 {
        return Err(CoreError::invalid_model("gamma must be non-negative"));
    }
    let c = Complex64::new;
    let h = ComplexMatrix::new(
        2,
        2,
        vec![c(0.0, 0.0), c(spec.rabi, 0.0), c(spec.rabi, 0.0), c(spec.energy, 0.0)],
    )?;
    let mut decay = ComplexMatrix::zeros(2, 2);
    decay[(0, 1)] = c(spec.gamma.sqrt(), 0.0);
    LindbladModel::new(spec.hbar, h, vec![decay])
}

/// H = −J Σᵢ Sᵢ·Sᵢ₊₁ with source L₁ = √(2Γ) S₁⁺ and drain L_L = √(2Γ) S_L⁻
/// at the boundary sites.
pub fn heisenberg_model(
    spec: &SpinChainSpec,
    budget: MemoryBudget,
) -> Result<LindbladModel, CoreError> {
    if spec.length == 0 {
        return Err(CoreError::invalid_spec("chain length must be >= 1"));
    }
    let dim = 1usize << spec.length;
    budget.check(
        &format!("dense {dim}x{dim} chain operators (L={})", spec.length),
        matrix_bytes(dim),
        "reduce the chain length or raise the budget",
    )?;

    // Two-site bond Σ_a s_a ⊗ s_a assembled once, then embedded per bond.
    let mut bond = ComplexMatrix::zeros(4, 4);
    for axis in [SpinAxis::X, SpinAxis::Y, SpinAxis::Z] {
        let s = single_site_operator(axis);
        bond.kron_add_assign(&s, &s, Complex64::new(1.0, 0.0));
    }

    let mut h = ComplexMatrix::zeros(dim, dim);
    for site in 0..spec.length.saturating_sub(1) {
        let left = ComplexMatrix::identity(1 << site);
        let right = ComplexMatrix::identity(1 << (spec.length - site - 2));
        let term = left.kron(&bond).kron(&right);
        h.add_assign_scaled(&term, Complex64::new(-spec.coupling, 0.0));
    }

    let rate = Complex64::new((2.0 * spec.gamma).sqrt(), 0.0);
    let source = spin_operator(0, SpinAxis::Plus, spec.length)?.scaled(rate);
    let drain = spin_operator(spec.length - 1, SpinAxis::Minus, spec.length)?.scaled(rate);
    LindbladModel::new(spec.hbar, h, vec![source, drain])
}

/// Gibbs state e^{−βH} / Tr[e^{−βH}].
///
/// The Hamiltonian is shifted by its Gershgorin lower bound before
/// exponentiating so large β stays in floating-point range; the shift
/// cancels in the normalization.
pub fn thermal_state(hamiltonian: &ComplexMatrix, beta: f64) -> Result<DensityMatrix, CoreError> {
    if !hamiltonian.is_square() {
        return Err(CoreError::dimension_mismatch("thermal_state: H not square"));
    }
    if !(beta >= 0.0) {
        return Err(CoreError::invalid_spec("beta must be non-negative"));
    }
    let defect = hamiltonian.hermiticity_defect();
    if defect > HERMITICITY_REL_TOL * hamiltonian.frobenius_norm() {
        return Err(CoreError::invalid_model(
            "thermal_state: Hamiltonian is not Hermitian",
        ));
    }
    let d = hamiltonian.rows();
    let lower_bound = crate::linalg::gershgorin_lower_bound(hamiltonian);
    let shifted = ComplexMatrix::from_fn(d, d, |i, j| {
        let mut v = hamiltonian[(i, j)];
        if i == j {
            v -= Complex64::new(lower_bound, 0.0);
        }
        v * Complex64::new(-beta, 0.0)
    });
    let boltzmann = expm(&shifted, &ExpmConfig::default())?;
    let trace = boltzmann.trace().re;
    if !(trace > 0.0) || !trace.is_finite() {
        return Err(CoreError::numerical(format!(
            "thermal_state: Tr[e^(-beta H)] = {trace}"
        )));
    }
    DensityMatrix::new(boltzmann.scaled(Complex64::new(1.0 / trace, 0.0)))
}

/// Computational-basis unit vector for a spin pattern; site 0 is the most
/// significant bit with up = 0.
pub fn basis_product_state(pattern: &[Spin]) -> PureState {
    assert!(!pattern.is_empty(), "pattern must be non-empty");
    let dim = 1usize << pattern.len();
    let mut index = 0usize;
    for &s in pattern {
        index = (index << 1) | usize::from(s == Spin::Down);
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[index] = Complex64::new(1.0, 0.0);
    PureState::from_amplitudes(amplitudes).unwrap()
}

/// Alternating ↑↓↑↓… pattern starting with ↑.
pub fn neel_pattern(length: usize) -> Vec<Spin> {
    (0..length)
        .map(|i| if i % 2 == 0 { Spin::Up } else { Spin::Down })
        .collect()
}
