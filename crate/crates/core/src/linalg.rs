//! Dense complex-matrix kernels.
//!
//! Matrices are `ndarray` row-major arrays of `Complex64`. Hermitian
//! eigendecompositions go through `faer`; everything else is written
//! directly against `ndarray`.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::space::{HilbertSpace, DEFAULT_MAX_DIM};

pub type C64 = Complex64;
pub type ComplexMatrix = Array2<C64>;

/// Absolute tolerance used by the Hermiticity precondition.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues below this are a genuine positivity violation.
pub const PSD_FAIL_TOL: f64 = 1e-6;

const BIG_PRODUCT: usize = 48;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    Array2::eye(n)
}

pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// max |m - m^†|.
pub fn hermitian_asymmetry(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diag().sum()
}

/// Tr(a b) without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (row, a_row) in a.axis_iter(Axis(0)).enumerate() {
        for (k, &x) in a_row.iter().enumerate() {
            acc += x * b[[k, row]];
        }
    }
    acc
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    matmul(a, b) - matmul(b, a)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn require_square(m: &ComplexMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

/// `m` must be `n`×`n`.
pub(crate) fn expect_dim(m: &ComplexMatrix, n: usize, what: &str) -> Result<()> {
    if m.dim() != (n, n) {
        return Err(Error::Shape(format!("{what} is {}x{}, expected {n}x{n}", m.nrows(), m.ncols())));
    }
    Ok(())
}

fn to_faer(m: ArrayView2<C64>) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

fn from_faer(m: faer::MatRef<C64>) -> ComplexMatrix {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Dense product; large operands go through faer's blocked kernel.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul: inner dimensions differ");
    if a.nrows().min(a.ncols()).min(b.ncols()) < BIG_PRODUCT {
        return a.dot(b);
    }
    let prod = to_faer(a.view()) * to_faer(b.view());
    from_faer(prod.as_ref())
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_limit(a, b, DEFAULT_MAX_DIM)
}

/// Kronecker product, refusing results larger than `max_dim` on either side.
pub fn kron_with_limit(a: &ComplexMatrix, b: &ComplexMatrix, max_dim: usize) -> Result<ComplexMatrix> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let rows = ar.checked_mul(br).unwrap_or(usize::MAX);
    let cols = ac.checked_mul(bc).unwrap_or(usize::MAX);
    if rows.max(cols) > max_dim {
        return Err(Error::Sizing {
            dim: rows.max(cols),
            max: max_dim,
        });
    }
    let mut out = Array2::zeros((rows, cols));
    for ((i, j), &x) in a.indexed_iter() {
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        block.zip_mut_with(b, |o, &y| *o = x * y);
    }
    Ok(out)
}

/// Eigenvalues (ascending) and column eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// V f(Λ) V^†.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (mut col, &lam) in scaled.axis_iter_mut(Axis(1)).zip(&self.values) {
            let w = f(lam);
            col.mapv_inplace(|z| z * w);
        }
        matmul(&scaled, &dagger(&self.vectors))
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<usize> {
    let n = require_square(m, "Hermitian input")?;
    let asym = hermitian_asymmetry(m);
    if asym > HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    Ok(n)
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = check_hermitian(m)?;
    if n == 0 {
        return Ok(HermitianEigen {
            values: vec![],
            vectors: Array2::zeros((0, 0)),
        });
    }
    let fm = to_faer(m.view());
    let evd = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Numerical(format!("Hermitian eigensolver: {e:?}")))?;
    let raw: Vec<f64> = (0..n).map(|i| evd.S().column_vector()[i].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| raw[x].total_cmp(&raw[y]));
    let u = evd.U();
    let values = order.iter().map(|&k| raw[k]).collect();
    let vectors = Array2::from_shape_fn((n, n), |(i, j)| u[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only (ascending); cheaper than [`eig_hermitian`].
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = check_hermitian(m)?;
    if n == 0 {
        return Ok(vec![]);
    }
    let mut vals: Vec<f64> = to_faer(m.view())
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Numerical(format!("Hermitian eigensolver: {e:?}")))?
        .into_iter()
        .collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Matrix exponential.
///
/// Hermitian and anti-Hermitian inputs use the spectral route; anything
/// else falls back to scaling and squaring with a converged Taylor sum.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = require_square(m, "expm input")?;
    if n == 0 {
        return Ok(m.clone());
    }
    let scale = max_abs(m).max(1.0);
    if hermitian_asymmetry(m) <= HERMITIAN_TOL * scale {
        let h = symmetrize(m);
        return Ok(eig_hermitian(&h)?.apply_fn(|l| C64::new(l.exp(), 0.0)));
    }
    // m = -iH with H Hermitian  <=>  i m Hermitian
    let im = m.mapv(|z| z * C64::i());
    if hermitian_asymmetry(&im) <= HERMITIAN_TOL * scale {
        let h = symmetrize(&im);
        return Ok(eig_hermitian(&h)?.apply_fn(|l| C64::from_polar(1.0, -l)));
    }
    Ok(expm_taylor(m))
}

fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + &dagger(m)).mapv(|z| z * 0.5)
}

fn expm_taylor(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.nrows();
    let norm = m
        .axis_iter(Axis(0))
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let a = m.mapv(|z| z / 2f64.powi(squarings as i32));
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=64 {
        term = matmul(&term, &a).mapv(|z| z / k as f64);
        sum += &term;
        if max_abs(&term) <= f64::EPSILON * 1e-2 * max_abs(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// Principal square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `(-1e-6, 0)` are clamped to zero; anything lower is an error.
pub fn sqrtm_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    if let Some(&min) = eig.values.first() {
        if min < -PSD_FAIL_TOL {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
    }
    Ok(eig.apply_fn(|l| C64::new(l.max(0.0).sqrt(), 0.0)))
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Offsets into the full index for every multi-index over `slots`
/// (mixed radix, first listed slot most significant).
fn slot_offsets(dims: &[usize], full_strides: &[usize], slots: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &s in slots {
        let mut next = Vec::with_capacity(offsets.len() * dims[s]);
        for &o in &offsets {
            for k in 0..dims[s] {
                next.push(o + k * full_strides[s]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Reduced matrix on the `keep` slots (sorted ascending), tracing out the rest.
pub fn partial_trace(rho: &ComplexMatrix, space: &HilbertSpace, keep: &[usize]) -> Result<ComplexMatrix> {
    let n = require_square(rho, "density matrix")?;
    if n != space.total_dim() {
        return Err(Error::Shape(format!(
            "matrix dimension {n} does not match space dimension {}",
            space.total_dim()
        )));
    }
    space.check_slots(keep)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..space.n_slots()).filter(|s| !kept.contains(s)).collect();
    let st = strides(space.dims());
    let kept_off = slot_offsets(space.dims(), &st, &kept);
    let traced_off = if traced.is_empty() {
        vec![0]
    } else {
        slot_offsets(space.dims(), &st, &traced)
    };
    let dk = kept_off.len();
    let mut out = Array2::zeros((dk, dk));
    for (i, &oi) in kept_off.iter().enumerate() {
        for (j, &oj) in kept_off.iter().enumerate() {
            out[[i, j]] = traced_off.iter().map(|&t| rho[[oi + t, oj + t]]).sum();
        }
    }
    Ok(out)
}

/// Outer product |a><b|.
pub fn outer(a: &Array1<C64>, b: &Array1<C64>) -> ComplexMatrix {
    Array2::from_shape_fn((a.len(), b.len()), |(i, j)| a[i] * b[j].conj())
}
