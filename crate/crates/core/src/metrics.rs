//! Phase-space and entanglement diagnostics: Wigner grids, two-qubit
//! concurrence, state fidelity.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, dagger, eigvals_hermitian, expect_dim, kron, matmul, partial_trace, require_square, sqrtm_psd, trace,
    trace_product, ComplexMatrix, C64,
};
use crate::model::{slots, Truncations};
use crate::space::HilbertSpace;

/// Grid-point tolerance on |W| ≤ 2/π.
pub const WIGNER_BOUND_SLACK: f64 = 1e-6;
/// Minimum weight of the NVE {0,1}⊗{0,1} block before the projection is refused.
pub const MIN_PROJECTION_WEIGHT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSelection {
    ReducedMode1,
    ReducedMode2,
    /// Two-mode displaced parity evaluated at (α, α).
    #[default]
    CorrelatedCut,
}

impl std::str::FromStr for ModeSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reduced_mode_1" | "mode1" => Ok(Self::ReducedMode1),
            "reduced_mode_2" | "mode2" => Ok(Self::ReducedMode2),
            "correlated_cut" | "cut" => Ok(Self::CorrelatedCut),
            other => Err(Error::Argument(format!(
                "unknown mode selection `{other}` (expected reduced_mode_1, reduced_mode_2 or correlated_cut)"
            ))),
        }
    }
}

/// Where to sample W. `x = Re α`, `p = Im α`, so ∬W dx dp = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WignerSpec {
    pub x_range: (f64, f64),
    pub p_range: (f64, f64),
    pub nx: usize,
    pub np: usize,
    pub mode: ModeSelection,
}

impl Default for WignerSpec {
    fn default() -> Self {
        Self {
            x_range: (-4.0, 4.0),
            p_range: (-4.0, 4.0),
            nx: 81,
            np: 81,
            mode: ModeSelection::default(),
        }
    }
}

impl WignerSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi), pts) in [("x_range", self.x_range, self.nx), ("p_range", self.p_range, self.np)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::param(name, format!("need finite lo < hi, got ({lo}, {hi})")));
            }
            if pts < 2 {
                return Err(Error::param(name, "need at least 2 points"));
            }
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_range, self.nx)
    }

    pub fn ps(&self) -> Vec<f64> {
        linspace(self.p_range, self.np)
    }
}

fn linspace((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect()
}

/// Sampled Wigner function; `values[[ix, ip]]` is W at `xs[ix] + i ps[ip]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    pub values: Array2<f64>,
    pub mode: ModeSelection,
}

impl WignerGrid {
    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// ∬ W dx dp by the 2-D trapezoid rule.
    pub fn integral(&self) -> f64 {
        let wx = trapezoid_weights(&self.xs);
        let wp = trapezoid_weights(&self.ps);
        let mut acc = 0.0;
        for (ix, a) in wx.iter().enumerate() {
            for (ip, b) in wp.iter().enumerate() {
                acc += a * b * self.values[[ix, ip]];
            }
        }
        acc
    }

    /// Value at the grid point closest to `alpha`.
    pub fn nearest(&self, alpha: C64) -> f64 {
        let closest = |axis: &[f64], v: f64| {
            (0..axis.len())
                .min_by(|&a, &b| (axis[a] - v).abs().total_cmp(&(axis[b] - v).abs()))
                .unwrap_or(0)
        };
        self.values[[closest(&self.xs, alpha.re), closest(&self.ps, alpha.im)]]
    }
}

fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { axis[i] - axis[i - 1] } else { 0.0 };
            let right = if i + 1 < n { axis[i + 1] - axis[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Matrix of the displaced parity D(α) P D†(α) = D(2α) P on the first `n`
/// Fock levels, from the closed-form Laguerre expression. Exact on the
/// truncated space (no truncated exponential involved).
pub fn displaced_parity(alpha: C64, n: usize) -> ComplexMatrix {
    let beta = alpha * 2.0;
    let x = beta.norm_sqr();
    let envelope = (-0.5 * x).exp();
    let mut out = ComplexMatrix::zeros((n, n));
    let mut beta_pow = c(1.0, 0.0);
    for d in 0..n {
        // L_k^{(d)}(x) for k = 0..n-d by the three-term recurrence
        let mut lag = Vec::with_capacity(n - d);
        lag.push(1.0);
        if n - d > 1 {
            lag.push(1.0 + d as f64 - x);
        }
        for k in 1..(n - d).saturating_sub(1) {
            let kf = k as f64;
            let next = ((2.0 * kf + 1.0 + d as f64 - x) * lag[k] - (kf + d as f64) * lag[k - 1]) / (kf + 1.0);
            lag.push(next);
        }
        // sqrt(k!/(k+d)!) updated incrementally along k
        let mut ratio = (1..=d).map(|j| j as f64).product::<f64>().sqrt().recip();
        for (k, &l) in lag.iter().enumerate() {
            if k > 0 {
                ratio *= (k as f64 / (k + d) as f64).sqrt();
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let v = beta_pow * (sign * ratio * envelope * l);
            out[[k + d, k]] = v;
            out[[k, k + d]] = v.conj();
        }
        beta_pow *= beta;
    }
    out
}

/// W(α) = (2/π) Tr[ρ D(α) P D†(α)] for a single-mode ρ.
pub fn wigner_point(rho: &ComplexMatrix, alpha: C64) -> Result<f64> {
    let n = require_square(rho, "single-mode state")?;
    Ok(2.0 / std::f64::consts::PI * trace_product(rho, &displaced_parity(alpha, n)).re)
}

/// Evaluate W on a grid for a state on a two-mode space.
pub fn wigner(rho: &ComplexMatrix, two_mode: &HilbertSpace, spec: &WignerSpec) -> Result<WignerGrid> {
    spec.validate()?;
    if two_mode.n_slots() != 2 {
        return Err(Error::Shape(format!(
            "Wigner grids need a two-mode space, got {} slots",
            two_mode.n_slots()
        )));
    }
    expect_dim(rho, two_mode.total_dim(), "two-mode state")?;
    let xs = spec.xs();
    let ps = spec.ps();
    let reach = xs.iter().map(|x| x * x).fold(0.0, f64::max) + ps.iter().map(|p| p * p).fold(0.0, f64::max);
    let levels = two_mode.dims().iter().copied().min().unwrap_or(0);
    if reach > levels as f64 {
        log::warn!(
            "Wigner grid reaches |α|² = {reach:.1} with only {levels} Fock levels; outer points are truncation-limited"
        );
    }
    let (n1, n2) = (two_mode.dim(0), two_mode.dim(1));
    let reduced = match spec.mode {
        ModeSelection::ReducedMode1 => Some((partial_trace(rho, two_mode, &[0])?, n1)),
        ModeSelection::ReducedMode2 => Some((partial_trace(rho, two_mode, &[1])?, n2)),
        ModeSelection::CorrelatedCut => None,
    };
    let mut values = Array2::zeros((xs.len(), ps.len()));
    for (ix, &x) in xs.iter().enumerate() {
        for (ip, &p) in ps.iter().enumerate() {
            let alpha = c(x, p);
            let w = match &reduced {
                Some((r, n)) => trace_product(r, &displaced_parity(alpha, *n)).re,
                None => {
                    let joint = kron(&displaced_parity(alpha, n1), &displaced_parity(alpha, n2))?;
                    trace_product(rho, &joint).re
                }
            };
            values[[ix, ip]] = 2.0 / std::f64::consts::PI * w;
        }
    }
    Ok(WignerGrid {
        xs,
        ps,
        values,
        mode: spec.mode,
    })
}

fn sigma_yy() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros((4, 4));
    // σ_y ⊗ σ_y is anti-diagonal with signs (-1, 1, 1, -1)
    m[[0, 3]] = c(-1.0, 0.0);
    m[[1, 2]] = c(1.0, 0.0);
    m[[2, 1]] = c(1.0, 0.0);
    m[[3, 0]] = c(-1.0, 0.0);
    m
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != (4, 4) {
        return Err(Error::Argument(format!(
            "concurrence needs a 4x4 state, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let yy = sigma_yy();
    let tilde = matmul(&matmul(&yy, &rho.mapv(|z| z.conj())), &yy);
    let s = sqrtm_psd(rho)?;
    let m = matmul(&matmul(&s, &tilde), &s);
    let m = (&m + &dagger(&m)).mapv(|z| z * 0.5);
    let mut lam: Vec<f64> = eigvals_hermitian(&m)?.into_iter().map(|v| v.max(0.0).sqrt()).collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).clamp(0.0, 1.0))
}

/// Concurrence between the two NVE modes after projecting each onto
/// {|0⟩, |1⟩}. Returns (C, weight of the projected block before renormalizing).
pub fn nve_concurrence(rho: &ComplexMatrix, space: &HilbertSpace) -> Result<(f64, f64)> {
    Truncations::from_space(space)?;
    expect_dim(rho, space.total_dim(), "state")?;
    let pair = partial_trace(rho, space, &[slots::NVE1, slots::NVE2])?;
    let nb = space.dim(slots::NVE2);
    let idx = [0, 1, nb, nb + 1];
    let block = Array2::from_shape_fn((4, 4), |(i, j)| pair[[idx[i], idx[j]]]);
    let weight = trace(&block).re;
    if weight < MIN_PROJECTION_WEIGHT {
        return Err(Error::DegenerateProjection { weight });
    }
    Ok((concurrence(&block.mapv(|z| z / weight))?, weight))
}

/// Uhlmann fidelity [Tr √(√ρ σ √ρ)]².
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let n = require_square(rho, "rho")?;
    expect_dim(sigma, n, "sigma")?;
    let s = sqrtm_psd(rho)?;
    let m = matmul(&matmul(&s, sigma), &s);
    let m = (&m + &dagger(&m)).mapv(|z| z * 0.5);
    let root_sum: f64 = eigvals_hermitian(&m)?.into_iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// ⟨ψ|ρ|ψ⟩, which equals the Uhlmann fidelity when one state is pure.
pub fn fidelity_pure(rho: &ComplexMatrix, psi: &[C64]) -> Result<f64> {
    let n = require_square(rho, "rho")?;
    if psi.len() != n {
        return Err(Error::Shape(format!("state vector has length {}, expected {n}", psi.len())));
    }
    let mut acc = C64::new(0.0, 0.0);
    for (i, row) in rho.rows().into_iter().enumerate() {
        let mut r = C64::new(0.0, 0.0);
        for (&x, &p) in row.iter().zip(psi) {
            r += x * p;
        }
        acc += psi[i].conj() * r;
    }
    Ok(acc.re.clamp(0.0, 1.0))
}
