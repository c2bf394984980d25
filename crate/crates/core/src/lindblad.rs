//! The Lindblad generator: model container, direct action 𝓛(ρ), column
//! vectorization, dense superoperator construction, and generator-norm
//! estimation.
//!
//! The direct action evaluates
//!   𝓛ρ = (i/ħ)[ρ, H] + Σᵢ (Lᵢ ρ Lᵢ† − ½{Lᵢ†Lᵢ, ρ})
//! and the matrix form (for column stacking, first column on top) is
//!   𝓛 = −(i/ħ)(I⊗H − Hᵀ⊗I)
//!       + Σᵢ [Lᵢ*⊗Lᵢ − ½(I⊗Lᵢ†Lᵢ + (Lᵢ†Lᵢ)ᵀ⊗I)].

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::CoreError;
use crate::linalg::{hermitian_eigenvalues, spectral_norm, ComplexMatrix};
use crate::memory::{superoperator_bytes, MemoryBudget};
use crate::streams::{stream_rng, StreamDomain};

/// Relative Frobenius tolerance for Hermiticity checks.
pub const HERMITICITY_REL_TOL: f64 = 1e-12;
/// Absolute tolerance on |Tr ρ − 1| for physical states.
pub const TRACE_ABS_TOL: f64 = 1e-10;
/// Positivity diagnostic threshold: min eigenvalue ≥ −1e-10·|trace|.
pub const POSITIVITY_REL_TOL: f64 = 1e-10;
/// Safety factor applied on top of random-probe norm estimates.
pub const PROBE_SAFETY_FACTOR: f64 = 1.2;
/// Default number of Gaussian probes for the norm estimate.
pub const DEFAULT_PROBE_SAMPLES: usize = 32;

/// Hamiltonian, jump operators, and ħ: the data defining the generator.
///
/// Adjoints and Lᵢ†Lᵢ products are cached at construction since every
/// generator application needs them.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    hbar: f64,
    hamiltonian: ComplexMatrix,
    jump_ops: Vec<ComplexMatrix>,
    jump_adjoints: Vec<ComplexMatrix>,
    jump_products: Vec<ComplexMatrix>,
}

impl LindbladModel {
    pub fn new(
        hbar: f64,
        hamiltonian: ComplexMatrix,
        jump_ops: Vec<ComplexMatrix>,
    ) -> Result<Self, CoreError> {
        if !(hbar > 0.0) {
            return Err(CoreError::invalid_model(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        if !hamiltonian.is_square() {
            return Err(CoreError::invalid_model("Hamiltonian must be square"));
        }
        let defect = hamiltonian.hermiticity_defect();
        if defect > HERMITICITY_REL_TOL * hamiltonian.frobenius_norm() {
            return Err(CoreError::invalid_model(format!(
                "Hamiltonian is not Hermitian: defect {defect:.3e} exceeds relative \
                 tolerance {HERMITICITY_REL_TOL:.0e}"
            )));
        }
        let d = hamiltonian.rows();
        for (i, op) in jump_ops.iter().enumerate() {
            if op.rows() != d || op.cols() != d {
                return Err(CoreError::invalid_model(format!(
                    "jump operator {i} is {}x{}, expected {d}x{d}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        let jump_adjoints: Vec<ComplexMatrix> = jump_ops.iter().map(|l| l.adjoint()).collect();
        let jump_products: Vec<ComplexMatrix> = jump_ops
            .iter()
            .zip(jump_adjoints.iter())
            .map(|(l, l_dag)| l_dag.matmul(l))
            .collect();
        Ok(LindbladModel {
            hbar,
            hamiltonian,
            jump_ops,
            jump_adjoints,
            jump_products,
        })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn jump_ops(&self) -> &[ComplexMatrix] {
        &self.jump_ops
    }

    /// Cached Lᵢ†Lᵢ products.
    pub fn jump_products(&self) -> &[ComplexMatrix] {
        &self.jump_products
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.rows()
    }

    /// Direct action of the generator on a matrix.
    pub fn apply_lindbladian(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, CoreError> {
        let d = self.dim();
        if rho.rows() != d || rho.cols() != d {
            return Err(CoreError::dimension_mismatch(format!(
                "apply_lindbladian: state is {}x{}, model dimension is {d}",
                rho.rows(),
                rho.cols()
            )));
        }
        // (i/hbar) (rho H - H rho)
        let i_over_hbar = Complex64::new(0.0, 1.0 / self.hbar);
        let mut out = rho.matmul(&self.hamiltonian);
        out.add_assign_scaled(&self.hamiltonian.matmul(rho), Complex64::new(-1.0, 0.0));
        let mut out = out.scaled(i_over_hbar);

        let half = Complex64::new(0.5, 0.0);
        for ((l, l_dag), l_dag_l) in self
            .jump_ops
            .iter()
            .zip(self.jump_adjoints.iter())
            .zip(self.jump_products.iter())
        {
            let l_rho = l.matmul(rho);
            out.add_assign_scaled(&l_rho.matmul(l_dag), Complex64::new(1.0, 0.0));
            out.add_assign_scaled(&l_dag_l.matmul(rho), -half);
            out.add_assign_scaled(&rho.matmul(l_dag_l), -half);
        }
        Ok(out)
    }

    /// Dense d²×d² matrix form of the generator. Refuses (rather than
    /// allocates) when 16·d⁴ bytes exceed the budget.
    pub fn build_superoperator(&self, budget: MemoryBudget) -> Result<ComplexMatrix, CoreError> {
        let d = self.dim();
        budget.check(
            &format!("superoperator for d={d} ({0}x{0} dense matrix)", d * d),
            superoperator_bytes(d),
            "reduce the dimension or estimate norms with NormStrategy::RandomProbe",
        )?;
        let identity = ComplexMatrix::identity(d);
        let mut sup = ComplexMatrix::zeros(d * d, d * d);
        let minus_i_over_hbar = Complex64::new(0.0, -1.0 / self.hbar);
        sup.kron_add_assign(&identity, &self.hamiltonian, minus_i_over_hbar);
        sup.kron_add_assign(&self.hamiltonian.transpose(), &identity, -minus_i_over_hbar);
        let minus_half = Complex64::new(-0.5, 0.0);
        for (l, l_dag_l) in self.jump_ops.iter().zip(self.jump_products.iter()) {
            sup.kron_add_assign(&l.conj(), l, Complex64::new(1.0, 0.0));
            sup.kron_add_assign(&identity, l_dag_l, minus_half);
            sup.kron_add_assign(&l_dag_l.transpose(), &identity, minus_half);
        }
        Ok(sup)
    }

    /// Estimate of ‖𝓛‖ = sup ‖𝓛M‖/‖M‖.
    pub fn lindbladian_norm(
        &self,
        strategy: NormStrategy,
        budget: MemoryBudget,
    ) -> Result<f64, CoreError> {
        match strategy {
            NormStrategy::ExactSmall => {
                let sup = self.build_superoperator(budget)?;
                Ok(spectral_norm(&sup, 2000, 1e-12).value)
            }
            NormStrategy::RandomProbe { samples, seed } => {
                if samples == 0 {
                    return Err(CoreError::invalid_spec(
                        "RandomProbe requires at least one sample",
                    ));
                }
                let d = self.dim();
                let mut rng = stream_rng(seed, StreamDomain::NormProbe, 0);
                let mut best = 0.0f64;
                for _ in 0..samples {
                    let probe = ComplexMatrix::from_fn(d, d, |_, _| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex64::new(re, im)
                    });
                    let image = self.apply_lindbladian(&probe)?;
                    let ratio = image.frobenius_norm() / probe.frobenius_norm();
                    best = best.max(ratio);
                }
                Ok(best * PROBE_SAFETY_FACTOR)
            }
        }
    }
}

/// How to estimate the generator norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormStrategy {
    /// Materialize the superoperator and take its largest singular value.
    /// Requires the superoperator memory budget.
    ExactSmall,
    /// Max of ‖𝓛M‖_F/‖M‖_F over Gaussian probe matrices, times a 1.2
    /// safety factor. Probe ratios never exceed the supremum, so the
    /// factor biases error bounds conservatively.
    RandomProbe { samples: usize, seed: u64 },
}

impl NormStrategy {
    pub fn random_probe(seed: u64) -> Self {
        NormStrategy::RandomProbe {
            samples: DEFAULT_PROBE_SAMPLES,
            seed,
        }
    }
}

/// Hermitian state carrier with tracked (not silently repaired) trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity to 1e-12 relative Frobenius. Trace deviation
    /// is tracked through [`DensityMatrix::trace_deviation`], never
    /// renormalized away.
    pub fn new(mat: ComplexMatrix) -> Result<Self, CoreError> {
        if !mat.is_square() {
            return Err(CoreError::invalid_model("density matrix must be square"));
        }
        let defect = mat.hermiticity_defect();
        if defect > HERMITICITY_REL_TOL * mat.frobenius_norm() {
            return Err(CoreError::invalid_model(format!(
                "density matrix is not Hermitian: defect {defect:.3e}"
            )));
        }
        Ok(DensityMatrix { mat })
    }

    /// Internal constructor for integrator output; evolution preserves
    /// Hermiticity up to rounding and per-step checks live in the test
    /// suites, not the hot loop.
    pub(crate) fn from_evolution(mat: ComplexMatrix) -> Self {
        DensityMatrix { mat }
    }

    /// |i⟩⟨i| in a d-dimensional space.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut mat = ComplexMatrix::zeros(dim, dim);
        mat[(index, index)] = Complex64::new(1.0, 0.0);
        DensityMatrix { mat }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// |Tr ρ − 1|.
    pub fn trace_deviation(&self) -> f64 {
        (self.mat.trace() - Complex64::new(1.0, 0.0)).norm()
    }

    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    /// Smallest eigenvalue; on-demand positivity diagnostic.
    pub fn min_eigenvalue(&self) -> Result<f64, CoreError> {
        let eigs = hermitian_eigenvalues(&self.mat)?;
        Ok(eigs[0])
    }

    /// True when min eigenvalue ≥ −1e-10·|trace|.
    pub fn is_positive_semidefinite(&self) -> Result<bool, CoreError> {
        let min = self.min_eigenvalue()?;
        Ok(min >= -POSITIVITY_REL_TOL * self.trace().norm())
    }

    /// Tr[ρ²], the purity.
    pub fn purity(&self) -> f64 {
        self.mat.matmul(&self.mat).trace().re
    }
}

/// Column-stacked form of a d×d matrix: first column on top.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorizedState {
    vec: Vec<Complex64>,
    dim: usize,
}

impl VectorizedState {
    pub fn from_vec(vec: Vec<Complex64>) -> Result<Self, CoreError> {
        let dim = (vec.len() as f64).sqrt().round() as usize;
        if dim * dim != vec.len() {
            return Err(CoreError::dimension_mismatch(format!(
                "VectorizedState: length {} is not a perfect square",
                vec.len()
            )));
        }
        Ok(VectorizedState { vec, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.vec
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::vec_norm(&self.vec)
    }
}

/// Stacks the columns of a square matrix, first column on top.
pub fn vectorize(rho: &ComplexMatrix) -> Result<VectorizedState, CoreError> {
    if !rho.is_square() {
        return Err(CoreError::dimension_mismatch(
            "vectorize: matrix is not square",
        ));
    }
    let d = rho.rows();
    let mut vec = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            vec.push(rho[(i, j)]);
        }
    }
    Ok(VectorizedState { vec, dim: d })
}

/// Inverse of [`vectorize`]; exact bijection.
pub fn devectorize(v: &VectorizedState) -> ComplexMatrix {
    let d = v.dim;
    ComplexMatrix::from_fn(d, d, |i, j| v.vec[j * d + i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// H = 0, single decay channel L = sqrt(gamma)|0><1|.
    pub(crate) fn decay_only_model(gamma: f64) -> LindbladModel {
        let h = ComplexMatrix::zeros(2, 2);
        let mut l = ComplexMatrix::zeros(2, 2);
        l[(0, 1)] = c(gamma.sqrt(), 0.0);
        LindbladModel::new(1.0, h, vec![l]).unwrap()
    }

    fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let raw = ComplexMatrix::from_fn(dim, dim, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        ComplexMatrix::from_fn(dim, dim, |i, j| (raw[(i, j)] + raw[(j, i)].conj()) * 0.5)
    }

    fn random_model(dim: usize, n_jumps: usize, rng: &mut impl Rng) -> LindbladModel {
        let h = random_hermitian(dim, rng);
        let jumps = (0..n_jumps)
            .map(|_| {
                ComplexMatrix::from_fn(dim, dim, |_, _| {
                    c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                })
            })
            .collect();
        LindbladModel::new(1.0, h, jumps).unwrap()
    }

    #[test]
    fn zero_model_annihilates_everything() {
        let model = LindbladModel::new(1.0, ComplexMatrix::zeros(2, 2), vec![]).unwrap();
        let rho = ComplexMatrix::from_fn(2, 2, |i, j| c(i as f64, j as f64));
        let out = model.apply_lindbladian(&rho).unwrap();
        assert_eq!(out.frobenius_norm(), 0.0);
    }

    #[test]
    fn decay_only_generator_action() {
        let model = decay_only_model(0.5);
        let rho = DensityMatrix::basis_projector(2, 1);
        let out = model.apply_lindbladian(rho.matrix()).unwrap();
        let expected =
            ComplexMatrix::from_diag(&[c(0.5, 0.0), c(-0.5, 0.0)]);
        assert!(out.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn generator_is_traceless_and_hermiticity_preserving() {
        let mut rng = stream_rng(11, StreamDomain::NormProbe, 99);
        for dim in [2usize, 3, 4] {
            let model = random_model(dim, 2, &mut rng);
            for _ in 0..20 {
                let rho = random_hermitian(dim, &mut rng);
                let out = model.apply_lindbladian(&rho).unwrap();
                assert!(
                    out.trace().norm() <= 1e-12 * rho.frobenius_norm().max(1e-30),
                    "trace {} too large",
                    out.trace().norm()
                );
                assert!(out.hermiticity_defect() <= 1e-12 * out.frobenius_norm().max(1e-30));
            }
        }
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let model = decay_only_model(0.5);
        let rho = ComplexMatrix::zeros(3, 3);
        assert!(matches!(
            model.apply_lindbladian(&rho),
            Err(CoreError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn model_rejects_non_hermitian_hamiltonian() {
        let mut h = ComplexMatrix::zeros(2, 2);
        h[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            LindbladModel::new(1.0, h, vec![]),
            Err(CoreError::InvalidModel { .. })
        ));
    }

    #[test]
    fn vectorize_column_stacking_convention() {
        let rho = ComplexMatrix::from_fn(2, 2, |i, j| c((1 + i * 2 + j) as f64, 0.0));
        // [[a, b], [c, d]] -> (a, c, b, d)
        let v = vectorize(&rho).unwrap();
        let got: Vec<f64> = v.as_slice().iter().map(|z| z.re).collect();
        assert_eq!(got, vec![1.0, 3.0, 2.0, 4.0]);

        let id = vectorize(&ComplexMatrix::identity(2)).unwrap();
        let got: Vec<f64> = id.as_slice().iter().map(|z| z.re).collect();
        assert_eq!(got, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn vectorize_roundtrip_and_norm_correspondence() {
        let mut rng = stream_rng(3, StreamDomain::NormProbe, 5);
        let rho = ComplexMatrix::from_fn(3, 3, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let v = vectorize(&rho).unwrap();
        assert_eq!(devectorize(&v), rho);
        assert_relative_eq!(v.norm(), rho.frobenius_norm(), max_relative = 1e-15);
    }

    #[test]
    fn vectorized_state_rejects_non_square_length() {
        let v = vec![c(0.0, 0.0); 5];
        assert!(VectorizedState::from_vec(v).is_err());
    }

    #[test]
    fn superoperator_zero_model() {
        let model = LindbladModel::new(1.0, ComplexMatrix::zeros(2, 2), vec![]).unwrap();
        let sup = model.build_superoperator(MemoryBudget::default()).unwrap();
        assert_eq!(sup.rows(), 4);
        assert_eq!(sup.frobenius_norm(), 0.0);
    }

    #[test]
    fn superoperator_matches_decay_example() {
        let model = decay_only_model(0.5);
        let sup = model.build_superoperator(MemoryBudget::default()).unwrap();
        let rho = DensityMatrix::basis_projector(2, 1);
        let v = vectorize(rho.matrix()).unwrap();
        let out = devectorize(&VectorizedState::from_vec(sup.matvec(v.as_slice())).unwrap());
        let expected = ComplexMatrix::from_diag(&[c(0.5, 0.0), c(-0.5, 0.0)]);
        assert!(out.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn superoperator_agrees_with_direct_action() {
        let mut rng = stream_rng(42, StreamDomain::NormProbe, 7);
        let model = random_model(2, 2, &mut rng);
        let sup = model.build_superoperator(MemoryBudget::default()).unwrap();
        for _ in 0..100 {
            let rho = ComplexMatrix::from_fn(2, 2, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let direct = model.apply_lindbladian(&rho).unwrap();
            let v = vectorize(&rho).unwrap();
            let via_sup =
                devectorize(&VectorizedState::from_vec(sup.matvec(v.as_slice())).unwrap());
            assert!(via_sup.max_abs_diff(&direct) < 1e-13);
        }
    }

    #[test]
    fn superoperator_refuses_over_budget_naming_bytes() {
        let model = decay_only_model(0.5);
        let tiny = MemoryBudget::from_bytes(100);
        let err = model.build_superoperator(tiny).unwrap_err();
        match err {
            CoreError::OutOfMemoryBudget {
                required_bytes,
                budget_bytes,
                ..
            } => {
                assert_eq!(required_bytes, 256); // 16 * 2^4
                assert_eq!(budget_bytes, 100);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn norm_of_zero_model_is_zero() {
        let model = LindbladModel::new(1.0, ComplexMatrix::zeros(2, 2), vec![]).unwrap();
        let exact = model
            .lindbladian_norm(NormStrategy::ExactSmall, MemoryBudget::default())
            .unwrap();
        assert_eq!(exact, 0.0);
        let probed = model
            .lindbladian_norm(NormStrategy::random_probe(1), MemoryBudget::default())
            .unwrap();
        assert_eq!(probed, 0.0);
    }

    #[test]
    fn probe_estimate_bounded_by_scaled_supremum() {
        let mut rng = stream_rng(5, StreamDomain::NormProbe, 123);
        for seed in 0..5u64 {
            let model = random_model(2, 1, &mut rng);
            let exact = model
                .lindbladian_norm(NormStrategy::ExactSmall, MemoryBudget::default())
                .unwrap();
            let probed = model
                .lindbladian_norm(NormStrategy::random_probe(seed), MemoryBudget::default())
                .unwrap();
            assert!(
                probed <= exact * PROBE_SAFETY_FACTOR + 1e-9,
                "probe {probed} exceeds {exact} * 1.2"
            );
        }
    }

    #[test]
    fn decay_norm_matches_spectral_oracle() {
        let model = decay_only_model(0.5);
        let sup = model.build_superoperator(MemoryBudget::default()).unwrap();
        let oracle = spectral_norm(&sup, 2000, 1e-13).value;
        let exact = model
            .lindbladian_norm(NormStrategy::ExactSmall, MemoryBudget::default())
            .unwrap();
        assert_relative_eq!(exact, oracle, max_relative = 1e-9);
    }

    #[test]
    fn density_matrix_diagnostics() {
        let rho = DensityMatrix::basis_projector(2, 0);
        assert_eq!(rho.trace_deviation(), 0.0);
        assert!(rho.is_positive_semidefinite().unwrap());
        assert_relative_eq!(rho.purity(), 1.0, epsilon = 1e-15);

        let mut bad = ComplexMatrix::zeros(2, 2);
        bad[(0, 1)] = c(1.0, 0.0);
        assert!(DensityMatrix::new(bad).is_err());
    }
}
