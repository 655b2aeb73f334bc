//! Compressed-row operators used inside the master-equation right-hand side.
//!
//! Only the time-stepping kernels use this; everything else stays dense.

use crate::linalg::{ComplexMatrix, C64};

#[derive(Debug, Clone)]
pub(crate) struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    /// (row, col) of every stored entry, in storage order.
    coords: Vec<(usize, usize)>,
}

impl Csr {
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let n = m.nrows();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut coords = Vec::new();
        row_ptr.push(0);
        for (i, row) in m.rows().into_iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v.re != 0.0 || v.im != 0.0 {
                    cols.push(j);
                    vals.push(v);
                    coords.push((i, j));
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
            coords,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// out += s · A x, with `x` and `out` row-major n×n.
    pub fn mul_dense_acc(&self, x: &[C64], out: &mut [C64], s: C64) {
        let n = self.n;
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let w = s * self.vals[p];
                let k = self.cols[p];
                let x_row = &x[k * n..(k + 1) * n];
                axpy(out_row, w, x_row);
            }
        }
    }

    /// out += s · Y A^†, with `y` and `out` row-major n×n.
    pub fn right_mul_dagger_acc(&self, y: &[C64], out: &mut [C64], s: C64) {
        let n = self.n;
        // (Y A†)[i, j] = Σ_k Y[i, k] conj(A[j, k])
        let weights: Vec<C64> = self.vals.iter().map(|v| s * v.conj()).collect();
        for i in 0..n {
            let y_row = &y[i * n..(i + 1) * n];
            let out_row = &mut out[i * n..(i + 1) * n];
            for (&(j, k), &w) in self.coords.iter().zip(&weights) {
                out_row[j] += y_row[k] * w;
            }
        }
    }

    /// Row-indexed form when every row holds at most one entry (ladder and
    /// projector-like operators embedded in a product space).
    pub fn to_monomial(&self) -> Option<Monomial> {
        if !self.row_ptr.windows(2).all(|w| w[1] - w[0] <= 1) {
            return None;
        }
        let mut cols = vec![0; self.n];
        let mut vals = vec![C64::new(0.0, 0.0); self.n];
        for (&(i, k), &v) in self.coords.iter().zip(&self.vals) {
            cols[i] = k;
            vals[i] = v;
        }
        let conj = vals.iter().map(|v| v.conj()).collect();
        Some(Monomial { n: self.n, cols, vals, conj })
    }

    /// out += s · A v for a vector.
    pub fn mul_vec_acc(&self, v: &[C64], out: &mut [C64], s: C64) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            let mut acc = C64::new(0.0, 0.0);
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[p] * v[self.cols[p]];
            }
            *o += s * acc;
        }
    }
}

/// Operator with row i equal to `vals[i]` at column `cols[i]` (zero rows allowed).
#[derive(Debug, Clone)]
pub(crate) struct Monomial {
    n: usize,
    cols: Vec<usize>,
    vals: Vec<C64>,
    conj: Vec<C64>,
}

impl Monomial {
    /// out += s · A ρ A† in one pass over ρ.
    pub fn sandwich_acc(&self, rho: &[C64], out: &mut [C64], s: f64) {
        let n = self.n;
        for i in 0..n {
            let v = self.vals[i];
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            let w = v * s;
            let rho_row = &rho[self.cols[i] * n..(self.cols[i] + 1) * n];
            let out_row = &mut out[i * n..(i + 1) * n];
            // (A ρ A†)[i, j] = A[i, k] ρ[k, l] conj(A[j, l])
            for ((o, &l), &u) in out_row.iter_mut().zip(&self.cols).zip(&self.conj) {
                *o += w * (rho_row[l] * u);
            }
        }
    }
}

#[inline]
fn axpy(out: &mut [C64], w: C64, x: &[C64]) {
    for (o, &v) in out.iter_mut().zip(x) {
        *o += w * v;
    }
}
