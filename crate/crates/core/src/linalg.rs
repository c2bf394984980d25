//! Dense complex linear algebra: products, adjoints, norms, Kronecker
//! products, and matrix exponentials by truncated Taylor series and diagonal
//! Padé approximants, both with scaling and squaring.
//!
//! Matrices are stored row-major and dense. The matrix product is a standard
//! cubic kernel (blocked, via `matrixmultiply` on split real/imaginary
//! planes); asymptotically faster multiplication is deliberately out of
//! scope so that step-cost accounting stays proportional to d³.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::CoreError;

/// Default truncation order for the Taylor-series exponential.
pub const DEFAULT_TAYLOR_ORDER: usize = 16;
/// Default degree for the diagonal Padé exponential.
pub const DEFAULT_PADE_DEGREE: usize = 6;

/// Row threshold above which the matrix product fans out across threads.
const PAR_MIN_DIM: usize = 192;

/// Dense d×d (or rectangular) complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Fails if the length is not
    /// `rows * cols` or either dimension is zero.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, CoreError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(CoreError::dimension_mismatch(format!(
                "ComplexMatrix::new: {rows}x{cols} with {} entries",
                entries.len()
            )));
        }
        Ok(ComplexMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ComplexMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Convenience constructor from real row-major literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows[0].len();
        Self::from_fn(n_rows, n_cols, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        let entries = self.entries.iter().map(|z| z.conj()).collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// sqrt(Σ |m_ij|²); zero iff the matrix is zero.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let entries = self.entries.iter().map(|z| z * factor).collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// `self += factor * other`, the accumulation step of series evaluations.
    pub fn add_assign_scaled(&mut self, other: &Self, factor: Complex64) {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "add_assign_scaled shape mismatch"
        );
        for (a, b) in self.entries.iter_mut().zip(other.entries.iter()) {
            *a += factor * b;
        }
    }

    /// Largest |a_ij - b_ij| over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "max_abs_diff shape mismatch"
        );
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ‖A - A†‖_F, the Hermiticity defect (square matrices only).
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut sum = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                sum += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// Matrix product by the standard cubic kernel. Panics on shape mismatch.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let (a_re, a_im) = split_planes(&self.entries);
        let (b_re, b_im) = split_planes(&other.entries);
        let mut c_re = vec![0.0f64; m * n];
        let mut c_im = vec![0.0f64; m * n];

        if m >= PAR_MIN_DIM && rayon::current_num_threads() > 1 {
            let threads = rayon::current_num_threads();
            let chunk_rows = m.div_ceil(threads);
            use rayon::prelude::*;
            c_re.par_chunks_mut(chunk_rows * n)
                .zip(c_im.par_chunks_mut(chunk_rows * n))
                .enumerate()
                .for_each(|(idx, (cre, cim))| {
                    let r0 = idx * chunk_rows;
                    let rows = cre.len() / n;
                    complex_gemm_planar(
                        rows,
                        k,
                        n,
                        &a_re[r0 * k..(r0 + rows) * k],
                        &a_im[r0 * k..(r0 + rows) * k],
                        &b_re,
                        &b_im,
                        cre,
                        cim,
                    );
                });
        } else {
            complex_gemm_planar(m, k, n, &a_re, &a_im, &b_re, &b_im, &mut c_re, &mut c_im);
        }

        ComplexMatrix {
            rows: m,
            cols: n,
            entries: merge_planes(&c_re, &c_im),
        }
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for (i, out_i) in out.iter_mut().enumerate() {
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, x) in row.iter().zip(v.iter()) {
                acc += a * x;
            }
            *out_i = acc;
        }
        out
    }

    /// Kronecker (tensor) product: block (i,j) of the result is a_ij · B.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self
            .rows
            .checked_mul(other.rows)
            .expect("kron dimension overflow");
        let cols = self
            .cols
            .checked_mul(other.cols)
            .expect("kron dimension overflow");
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a_ij = self[(i, j)];
                if a_ij == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    let dst_row = i * other.rows + k;
                    for l in 0..other.cols {
                        out[(dst_row, j * other.cols + l)] = a_ij * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `self += factor * (a ⊗ b)` without materializing the product.
    pub fn kron_add_assign(&mut self, a: &Self, b: &Self, factor: Complex64) {
        assert_eq!(self.rows, a.rows * b.rows, "kron_add_assign shape mismatch");
        assert_eq!(self.cols, a.cols * b.cols, "kron_add_assign shape mismatch");
        for i in 0..a.rows {
            for j in 0..a.cols {
                let coeff = factor * a[(i, j)];
                if coeff == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..b.rows {
                    let dst_row = i * b.rows + k;
                    for l in 0..b.cols {
                        self[(dst_row, j * b.cols + l)] += coeff * b[(k, l)];
                    }
                }
            }
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows * self.cols <= 64 {
            writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
            for i in 0..self.rows {
                write!(f, "  ")?;
                for j in 0..self.cols {
                    let z = self[(i, j)];
                    write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
                }
                writeln!(f)?;
            }
            write!(f, "]")
        } else {
            write!(
                f,
                "ComplexMatrix {}x{} (|.|_F = {:.6e})",
                self.rows,
                self.cols,
                self.frobenius_norm()
            )
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scaled(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, factor: Complex64) -> ComplexMatrix {
        self.scaled(factor)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, factor: f64) -> ComplexMatrix {
        self.scaled(Complex64::new(factor, 0.0))
    }
}

fn split_planes(entries: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let mut re = Vec::with_capacity(entries.len());
    let mut im = Vec::with_capacity(entries.len());
    for z in entries {
        re.push(z.re);
        im.push(z.im);
    }
    (re, im)
}

fn merge_planes(re: &[f64], im: &[f64]) -> Vec<Complex64> {
    re.iter()
        .zip(im.iter())
        .map(|(&r, &i)| Complex64::new(r, i))
        .collect()
}

/// Complex GEMM on planar buffers as four real GEMMs:
///   C_re = A_re B_re - A_im B_im,  C_im = A_re B_im + A_im B_re.
#[allow(clippy::too_many_arguments)]
fn complex_gemm_planar(
    m: usize,
    k: usize,
    n: usize,
    a_re: &[f64],
    a_im: &[f64],
    b_re: &[f64],
    b_im: &[f64],
    c_re: &mut [f64],
    c_im: &mut [f64],
) {
    let gemm = |alpha: f64, a: &[f64], b: &[f64], beta: f64, c: &mut [f64]| unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            k as isize,
            1,
            b.as_ptr(),
            n as isize,
            1,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    };
    gemm(1.0, a_re, b_re, 0.0, c_re);
    gemm(-1.0, a_im, b_im, 1.0, c_re);
    gemm(1.0, a_re, b_im, 0.0, c_im);
    gemm(1.0, a_im, b_re, 1.0, c_im);
}

/// Which approximant backs the matrix exponential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpmMethod {
    /// Truncated Taylor series with scaling and squaring.
    TaylorSs,
    /// Diagonal Padé approximant with scaling and squaring.
    PadeSs,
}

/// Configuration for [`expm`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpmConfig {
    pub method: ExpmMethod,
    /// Taylor truncation order n or Padé degree m.
    pub order: usize,
    /// Scaling exponent s; `None` selects s = max(0, ceil(log2 ‖M‖_F)), so
    /// the scaled argument satisfies ‖M‖_F / 2^s ≤ 1.
    pub scaling: Option<u32>,
}

impl ExpmConfig {
    pub fn taylor(order: usize) -> Self {
        ExpmConfig {
            method: ExpmMethod::TaylorSs,
            order,
            scaling: None,
        }
    }

    pub fn pade(degree: usize) -> Self {
        ExpmConfig {
            method: ExpmMethod::PadeSs,
            order: degree,
            scaling: None,
        }
    }

    fn validate(&self) -> Result<(), CoreError> {
        if self.order == 0 {
            return Err(CoreError::invalid_spec("expm order must be >= 1"));
        }
        Ok(())
    }
}

impl Default for ExpmConfig {
    fn default() -> Self {
        ExpmConfig::pade(DEFAULT_PADE_DEGREE)
    }
}

fn auto_scaling(norm: f64) -> u32 {
    if norm <= 1.0 {
        0
    } else {
        norm.log2().ceil().max(0.0) as u32
    }
}

/// Matrix exponential e^M.
pub fn expm(m: &ComplexMatrix, cfg: &ExpmConfig) -> Result<ComplexMatrix, CoreError> {
    cfg.validate()?;
    if !m.is_square() {
        return Err(CoreError::dimension_mismatch(format!(
            "expm: matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(CoreError::numerical("expm: input has non-finite entries"));
    }
    let s = cfg.scaling.unwrap_or_else(|| auto_scaling(m.frobenius_norm()));
    let scaled = m.scaled(Complex64::new(0.5f64.powi(s as i32), 0.0));
    let mut result = match cfg.method {
        ExpmMethod::TaylorSs => expm_taylor_core(&scaled, cfg.order),
        ExpmMethod::PadeSs => expm_pade_core(&scaled, cfg.order)?,
    };
    for _ in 0..s {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// Σ_{k=0}^{n} M^k / k!, with the factorial folded into the running term.
fn expm_taylor_core(m: &ComplexMatrix, order: usize) -> ComplexMatrix {
    let dim = m.rows();
    let mut acc = ComplexMatrix::identity(dim);
    let mut term = ComplexMatrix::identity(dim);
    for k in 1..=order {
        term = term.matmul(m).scaled(Complex64::new(1.0 / k as f64, 0.0));
        acc.add_assign_scaled(&term, Complex64::new(1.0, 0.0));
    }
    acc
}

/// Diagonal Padé: R_mm = P_m(M) / Q_m(M) with Q_m(M) = P_m(-M), solved as
/// the linear system Q_m · R = P_m.
fn expm_pade_core(m: &ComplexMatrix, degree: usize) -> Result<ComplexMatrix, CoreError> {
    let dim = m.rows();
    let mut p = ComplexMatrix::identity(dim);
    let mut q = ComplexMatrix::identity(dim);
    let mut power = ComplexMatrix::identity(dim);
    let mut coeff = 1.0f64;
    for k in 1..=degree {
        // c_k = (2m-k)! m! / ((2m)! (m-k)! k!), built up incrementally
        coeff *= (degree - k + 1) as f64 / ((2 * degree - k + 1) as f64 * k as f64);
        power = power.matmul(m);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        p.add_assign_scaled(&power, Complex64::new(coeff, 0.0));
        q.add_assign_scaled(&power, Complex64::new(sign * coeff, 0.0));
    }
    solve_linear_system(&q, &p).map_err(|_| {
        CoreError::numerical(
            "expm: Padé denominator Q_m is numerically singular; retry with ExpmMethod::TaylorSs",
        )
    })
}

/// Solves A·X = B by Gaussian elimination with partial pivoting.
pub(crate) fn solve_linear_system(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<ComplexMatrix, CoreError> {
    assert!(a.is_square(), "solve requires a square system");
    assert_eq!(a.rows(), b.rows(), "solve shape mismatch");
    let n = a.rows();
    let ncols = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, lu[(r, col)].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot_mag < 1e-300 {
            return Err(CoreError::numerical("singular linear system"));
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            for j in 0..ncols {
                let tmp = x[(col, j)];
                x[(col, j)] = x[(pivot_row, j)];
                x[(pivot_row, j)] = tmp;
            }
        }
        let pivot = lu[(col, col)];
        for r in (col + 1)..n {
            let factor = lu[(r, col)] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let v = lu[(col, j)];
                lu[(r, j)] -= factor * v;
            }
            for j in 0..ncols {
                let v = x[(col, j)];
                x[(r, j)] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let pivot = lu[(col, col)];
        for j in 0..ncols {
            let mut acc = x[(col, j)];
            for r in (col + 1)..n {
                acc -= lu[(col, r)] * x[(r, j)];
            }
            x[(col, j)] = acc / pivot;
        }
    }
    Ok(x)
}

/// Result of the power-iteration singular value estimate.
#[derive(Clone, Copy, Debug)]
pub struct SpectralNormEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Largest singular value by power iteration on M†M.
///
/// Runs at most `iters` iterations; stops when two successive estimates
/// agree to relative `tol`. On non-convergence the best estimate is
/// returned with `converged = false`.
pub fn spectral_norm(m: &ComplexMatrix, iters: usize, tol: f64) -> SpectralNormEstimate {
    assert!(iters >= 1, "spectral_norm requires iters >= 1");
    let adj = m.adjoint();
    let mut rng = ChaCha12Rng::seed_from_u64(0x5EED_0001);
    let mut v: Vec<Complex64> = (0..m.cols())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    normalize(&mut v);

    let mut estimate = 0.0f64;
    for it in 0..iters {
        let w = m.matvec(&v);
        let sigma = vec_norm(&w);
        if sigma == 0.0 {
            return SpectralNormEstimate {
                value: 0.0,
                converged: true,
                iterations: it + 1,
            };
        }
        let relative_change = (sigma - estimate).abs() / sigma;
        estimate = sigma;
        if relative_change < tol && it > 0 {
            return SpectralNormEstimate {
                value: estimate,
                converged: true,
                iterations: it + 1,
            };
        }
        v = adj.matvec(&w);
        normalize(&mut v);
    }
    SpectralNormEstimate {
        value: estimate,
        converged: false,
        iterations: iters,
    }
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn normalize(v: &mut [Complex64]) {
    let norm = vec_norm(v);
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

/// Gershgorin lower bound on the spectrum of a Hermitian matrix:
/// min_i (Re m_ii − Σ_{j≠i} |m_ij|).
pub(crate) fn gershgorin_lower_bound(m: &ComplexMatrix) -> f64 {
    assert!(m.is_square());
    let mut bound = f64::INFINITY;
    for i in 0..m.rows() {
        let mut radius = 0.0;
        for j in 0..m.cols() {
            if i != j {
                radius += m[(i, j)].norm();
            }
        }
        bound = bound.min(m[(i, i)].re - radius);
    }
    bound
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
///
/// The input is symmetrized as (A + A†)/2 before iterating, so slightly
/// non-Hermitian diagnostics inputs are handled gracefully.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>, CoreError> {
    if !m.is_square() {
        return Err(CoreError::dimension_mismatch(
            "hermitian_eigenvalues: matrix not square",
        ));
    }
    let n = m.rows();
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let scale = a.frobenius_norm().max(1e-300);
    let tol = 1e-14 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= tol / (n as f64) {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // phase e^{i phi} of the off-diagonal entry
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotation: rows/cols p,q by [[c, s*phase],[-s*conj(phase), c]]
                for j in 0..n {
                    let ajp = a[(j, p)];
                    let ajq = a[(j, q)];
                    a[(j, p)] = ajp * c - ajq * (phase.conj() * s);
                    a[(j, q)] = ajp * (phase * s) + ajq * c;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c - aqj * (phase * s);
                    a[(q, j)] = apj * (phase.conj() * s) + aqj * c;
                }
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}
