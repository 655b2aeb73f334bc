//! Master-equation integration.
//!
//! The generator is
//!
//! dρ/dt = -i[H(t), ρ] + Σ rate · (2 o ρ o† - o†o ρ - ρ o†o)
//!
//! with H(t) = H₀ + e^{-iωt} K + e^{iωt} K†. Time stepping is classic
//! fixed-step RK4 (optionally with step-doubling error control) acting on
//! the density matrix directly; operators are compressed to sparse rows for
//! the inner kernels.

pub(crate) mod sparse;
pub mod series;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, dagger, eigvals_hermitian, expect_dim, hermitian_asymmetry, matmul, ComplexMatrix, C64,
};
use crate::model::{build_collapse_set, interaction_hamiltonian, slots, CollapseOp, InteractionHamiltonian, ModelParams, Truncations};
use crate::operators::{creation, annihilation, embed, embed_block, fock_projector};
use crate::space::HilbertSpace;
use crate::states::{cat_branches, l2_norm, CatSpec};
use sparse::{Csr, Monomial};

pub use series::TimeSeries;

/// Tolerance on the initial state's trace, Hermiticity and positivity.
pub const STATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceMode {
    #[default]
    Dissipative,
    /// Drop every collapse term.
    Unitary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    /// Final time, ns.
    pub t_end: f64,
    /// Fixed step (or initial step with `tolerance`), ns.
    pub dt: f64,
    /// Per-step error target for step doubling; `None` means fixed steps.
    pub tolerance: Option<f64>,
    /// Record every n-th step (every n·dt ns in adaptive mode).
    pub sample_every: usize,
    pub reference_mode: ReferenceMode,
    /// Check the smallest eigenvalue every n-th sample; 0 disables.
    pub positivity_check_every: usize,
    /// Dimensionless plot axis per ns; reported, never used in dynamics.
    pub time_scale: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            t_end: 10.0,
            dt: 0.01,
            tolerance: None,
            sample_every: 10,
            reference_mode: ReferenceMode::Dissipative,
            positivity_check_every: 10,
            time_scale: 1.0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::param("t_end", format!("must be > 0, got {}", self.t_end)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", format!("must be > 0, got {}", self.dt)));
        }
        if let Some(tol) = self.tolerance {
            if !(tol > 1e-12 && tol < 1e-3) {
                return Err(Error::param("tolerance", format!("must lie in (1e-12, 1e-3), got {tol}")));
            }
        }
        if self.sample_every == 0 {
            return Err(Error::param("sample_every", "must be at least 1"));
        }
        if !(self.time_scale.is_finite() && self.time_scale > 0.0) {
            return Err(Error::param("time_scale", "must be > 0"));
        }
        Ok(())
    }

    /// Number of fixed steps and the effective step that lands on `t_end`.
    pub fn fixed_grid(&self) -> (usize, f64) {
        let steps = (self.t_end / self.dt).round().max(1.0) as usize;
        (steps, self.t_end / steps as f64)
    }
}

/// Dense generator, valid for any square ρ. Uses the factor-2 dissipator.
pub fn lindblad_rhs(rho: &ComplexMatrix, h: &ComplexMatrix, collapse: &[CollapseOp]) -> Result<ComplexMatrix> {
    let n = rho.nrows();
    expect_dim(rho, n, "rho")?;
    expect_dim(h, n, "H")?;
    let mut out = (matmul(h, rho) - matmul(rho, h)).mapv(|z| z * c(0.0, -1.0));
    for term in collapse {
        expect_dim(&term.op, n, &term.label)?;
        let o = &term.op;
        let od = dagger(o);
        let odo = matmul(&od, o);
        let d = matmul(&matmul(o, rho), &od).mapv(|z| 2.0 * z) - matmul(&odo, rho) - matmul(rho, &odo);
        out += &d.mapv(|z| z * term.rate);
    }
    Ok(out)
}

/// Sparse-kernel generator for Hermitian ρ.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    n: usize,
    /// H₀ - i Σ rate o†o
    effective: Csr,
    oscillating: Option<Oscillating>,
    /// (2·rate, o)
    jumps: Vec<(f64, Jump)>,
}

#[derive(Debug, Clone)]
enum Jump {
    Monomial(Monomial),
    General(Csr),
}

#[derive(Debug, Clone)]
struct Oscillating {
    raising: Csr,
    lowering: Csr,
    omega: f64,
}

impl Oscillating {
    fn new(h: &InteractionHamiltonian) -> Option<Self> {
        let raising = Csr::from_dense(&h.raising_part);
        if raising.is_empty() {
            return None;
        }
        Some(Self {
            lowering: Csr::from_dense(&dagger(&h.raising_part)),
            raising,
            omega: h.omega,
        })
    }
}

impl MasterEquation {
    pub fn new(h: &InteractionHamiltonian, collapse: &[CollapseOp]) -> Result<Self> {
        let mut eq = Self::time_independent(&h.static_part, collapse)?;
        expect_dim(&h.raising_part, eq.n, "K")?;
        eq.oscillating = Oscillating::new(h);
        Ok(eq)
    }

    pub fn time_independent(h: &ComplexMatrix, collapse: &[CollapseOp]) -> Result<Self> {
        let n = h.nrows();
        expect_dim(h, n, "H")?;
        let mut eff = h.clone();
        let mut jumps = Vec::new();
        for term in collapse {
            expect_dim(&term.op, n, &term.label)?;
            if term.rate < 0.0 {
                return Err(Error::param(term.label.clone(), "negative collapse rate"));
            }
            if term.rate == 0.0 {
                continue;
            }
            let odo = matmul(&dagger(&term.op), &term.op);
            eff = eff - odo.mapv(|z| z * c(0.0, term.rate));
            let csr = Csr::from_dense(&term.op);
            let jump = match csr.to_monomial() {
                Some(m) => Jump::Monomial(m),
                None => Jump::General(csr),
            };
            jumps.push((2.0 * term.rate, jump));
        }
        let effective = Csr::from_dense(&eff);
        log::debug!(
            "generator on dim {n}: {} nonzeros in H_eff, {} jump operators",
            effective.nnz(),
            jumps.len()
        );
        Ok(Self {
            n,
            effective,
            oscillating: None,
            jumps,
        })
    }

    /// Generator for the interaction-frame model; `Unitary` drops all collapse terms.
    pub fn from_params(p: &ModelParams, space: &HilbertSpace, mode: ReferenceMode) -> Result<Self> {
        let h = interaction_hamiltonian(p, space)?;
        let collapse = match mode {
            ReferenceMode::Dissipative => build_collapse_set(p, space)?,
            ReferenceMode::Unitary => vec![],
        };
        Self::new(&h, &collapse)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// out = L(t)[ρ]; `scratch` is clobbered.
    fn rhs(&self, t: f64, rho: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        let n = self.n;
        let mi = c(0.0, -1.0);
        scratch.fill(C64::new(0.0, 0.0));
        // X = -i H_eff ρ; the coherent and anticommutator parts are X + X†
        self.effective.mul_dense_acc(rho, scratch, mi);
        if let Some(osc) = &self.oscillating {
            let ph = C64::from_polar(1.0, -osc.omega * t);
            osc.raising.mul_dense_acc(rho, scratch, mi * ph);
            osc.lowering.mul_dense_acc(rho, scratch, mi * ph.conj());
        }
        hermitian_part_into(scratch, out, n);
        for (w, o) in &self.jumps {
            match o {
                Jump::Monomial(m) => m.sandwich_acc(rho, out, *w),
                Jump::General(o) => {
                    scratch.fill(C64::new(0.0, 0.0));
                    o.mul_dense_acc(rho, scratch, c(1.0, 0.0));
                    o.right_mul_dagger_acc(scratch, out, c(*w, 0.0));
                }
            }
        }
    }

    /// Dense view of L(t)[ρ] for a Hermitian ρ.
    pub fn apply(&self, t: f64, rho: &ComplexMatrix) -> ComplexMatrix {
        let rho = rho.as_standard_layout();
        let mut out = vec![C64::new(0.0, 0.0); self.n * self.n];
        let mut scratch = out.clone();
        self.rhs(t, rho.as_slice().expect("standard layout"), &mut out, &mut scratch);
        Array2::from_shape_vec((self.n, self.n), out).expect("shape")
    }
}

/// out[i,j] = x[i,j] + conj(x[j,i])
fn hermitian_part_into(x: &[C64], out: &mut [C64], n: usize) {
    const B: usize = 32;
    for ib in (0..n).step_by(B) {
        for jb in (0..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                for j in jb..(jb + B).min(n) {
                    out[i * n + j] = x[i * n + j] + x[j * n + i].conj();
                }
            }
        }
    }
}

/// Replace ρ by (ρ + ρ†)/2 and return the asymmetry that was removed.
fn resymmetrize(rho: &mut [C64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let d = rho[i * n + i];
        worst = worst.max(2.0 * d.im.abs());
        rho[i * n + i] = C64::new(d.re, 0.0);
        for j in i + 1..n {
            let (a, b) = (rho[i * n + j], rho[j * n + i]);
            worst = worst.max((a - b.conj()).norm());
            let m = (a + b.conj()) * 0.5;
            rho[i * n + j] = m;
            rho[j * n + i] = m.conj();
        }
    }
    worst
}

/// RK4 stepper for the density matrix.
#[derive(Debug, Clone)]
pub struct Propagator {
    eq: MasterEquation,
    k: Vec<C64>,
    acc: Vec<C64>,
    stage: Vec<C64>,
    scratch: Vec<C64>,
    /// Asymmetry removed by the most recent step.
    pub last_drift: f64,
}

impl Propagator {
    pub fn new(eq: MasterEquation) -> Self {
        let len = eq.n * eq.n;
        let z = vec![C64::new(0.0, 0.0); len];
        Self {
            eq,
            k: z.clone(),
            acc: z.clone(),
            stage: z.clone(),
            scratch: z,
            last_drift: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.eq.n
    }

    /// One RK4 step from `t` to `t + dt`, followed by Hermitian re-symmetrization.
    pub fn step(&mut self, t: f64, rho: &mut [C64], dt: f64) {
        let n = self.eq.n;
        let Self { eq, k, acc, stage, scratch, .. } = self;
        eq.rhs(t, rho, k, scratch);
        for ((a, s), (&kk, &r)) in acc.iter_mut().zip(stage.iter_mut()).zip(k.iter().zip(rho.iter())) {
            *a = kk;
            *s = r + kk * (0.5 * dt);
        }
        eq.rhs(t + 0.5 * dt, stage, k, scratch);
        for ((a, s), (&kk, &r)) in acc.iter_mut().zip(stage.iter_mut()).zip(k.iter().zip(rho.iter())) {
            *a += kk * 2.0;
            *s = r + kk * (0.5 * dt);
        }
        eq.rhs(t + 0.5 * dt, stage, k, scratch);
        for ((a, s), (&kk, &r)) in acc.iter_mut().zip(stage.iter_mut()).zip(k.iter().zip(rho.iter())) {
            *a += kk * 2.0;
            *s = r + kk * dt;
        }
        eq.rhs(t + dt, stage, k, scratch);
        for ((r, &a), &kk) in rho.iter_mut().zip(acc.iter()).zip(k.iter()) {
            *r += (a + kk) * (dt / 6.0);
        }
        self.last_drift = resymmetrize(rho, n);
    }

    /// Step-doubling step. Returns the local error estimate; `rho` is only
    /// updated (with the two half steps, Richardson-corrected) when the
    /// estimate is within `tol`.
    pub fn try_doubling_step(&mut self, t: f64, rho: &mut [C64], dt: f64, tol: f64) -> f64 {
        let mut full = rho.to_vec();
        self.step(t, &mut full, dt);
        let mut half = rho.to_vec();
        self.step(t, &mut half, 0.5 * dt);
        self.step(t + 0.5 * dt, &mut half, 0.5 * dt);
        let err = half
            .iter()
            .zip(&full)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
            / 15.0;
        if err <= tol {
            for ((r, &h), &f) in rho.iter_mut().zip(&half).zip(&full) {
                *r = h + (h - f) / 15.0;
            }
            let n = self.eq.n;
            self.last_drift = self.last_drift.max(resymmetrize(rho, n));
        }
        err
    }
}

/// Schrödinger-equation RK4 stepper for the dissipation-free reference.
#[derive(Debug, Clone)]
pub struct PurePropagator {
    h: Csr,
    oscillating: Option<Oscillating>,
    k: Vec<C64>,
    acc: Vec<C64>,
    stage: Vec<C64>,
}

impl PurePropagator {
    pub fn new(h: &InteractionHamiltonian) -> Self {
        let n = h.static_part.nrows();
        let z = vec![C64::new(0.0, 0.0); n];
        Self {
            h: Csr::from_dense(&h.static_part),
            oscillating: Oscillating::new(h),
            k: z.clone(),
            acc: z.clone(),
            stage: z,
        }
    }

    fn rhs(h: &Csr, osc: &Option<Oscillating>, t: f64, psi: &[C64], out: &mut [C64]) {
        let mi = c(0.0, -1.0);
        out.fill(C64::new(0.0, 0.0));
        h.mul_vec_acc(psi, out, mi);
        if let Some(o) = osc {
            let ph = C64::from_polar(1.0, -o.omega * t);
            o.raising.mul_vec_acc(psi, out, mi * ph);
            o.lowering.mul_vec_acc(psi, out, mi * ph.conj());
        }
    }

    pub fn step(&mut self, t: f64, psi: &mut [C64], dt: f64) {
        let Self { h, oscillating, k, acc, stage } = self;
        Self::rhs(h, oscillating, t, psi, k);
        for ((a, s), (&kk, &p)) in acc.iter_mut().zip(stage.iter_mut()).zip(k.iter().zip(psi.iter())) {
            *a = kk;
            *s = p + kk * (0.5 * dt);
        }
        Self::rhs(h, oscillating, t + 0.5 * dt, stage, k);
        for ((a, s), (&kk, &p)) in acc.iter_mut().zip(stage.iter_mut()).zip(k.iter().zip(psi.iter())) {
            *a += kk * 2.0;
            *s = p + kk * (0.5 * dt);
        }
        Self::rhs(h, oscillating, t + 0.5 * dt, stage, k);
        for ((a, s), (&kk, &p)) in acc.iter_mut().zip(stage.iter_mut()).zip(k.iter().zip(psi.iter())) {
            *a += kk * 2.0;
            *s = p + kk * dt;
        }
        Self::rhs(h, oscillating, t + dt, stage, k);
        for ((p, &a), &kk) in psi.iter_mut().zip(acc.iter()).zip(k.iter()) {
            *p += (a + kk) * (dt / 6.0);
        }
    }
}

/// Health of a trajectory at each sample.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub times: Vec<f64>,
    /// |Tr ρ - 1|
    pub trace_deviation: Vec<f64>,
    /// max |ρ - ρ†| removed by the step that produced the sample.
    pub hermiticity_drift: Vec<f64>,
    /// (time, smallest eigenvalue) at the checked samples.
    pub min_eigenvalue: Vec<(f64, f64)>,
}

impl Diagnostics {
    pub fn max_trace_deviation(&self) -> f64 {
        self.trace_deviation.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_hermiticity_drift(&self) -> f64 {
        self.hermiticity_drift.iter().cloned().fold(0.0, f64::max)
    }

    pub fn lowest_eigenvalue(&self) -> f64 {
        self.min_eigenvalue.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }

    /// Record one sample; the eigenvalue check runs only when `check_positivity`.
    pub fn record(&mut self, t: f64, rho: &ComplexMatrix, drift: f64, check_positivity: bool) -> Result<()> {
        self.times.push(t);
        self.trace_deviation.push((crate::linalg::trace(rho) - c(1.0, 0.0)).norm());
        self.hermiticity_drift.push(drift);
        if check_positivity {
            let ev = eigvals_hermitian(rho)?;
            self.min_eigenvalue.push((t, ev[0]));
        }
        Ok(())
    }
}

/// Output of [`evolve`].
#[derive(Debug, Clone)]
pub struct Evolution {
    pub series: TimeSeries,
    pub final_state: ComplexMatrix,
    pub diagnostics: Diagnostics,
}

/// Named observable.
pub type NamedOperator = (String, ComplexMatrix);

/// Check unit trace, Hermiticity and positivity within [`STATE_TOL`].
pub fn validate_density_matrix(rho: &ComplexMatrix) -> Result<()> {
    let n = rho.nrows();
    expect_dim(rho, n, "rho")?;
    let tr = crate::linalg::trace(rho);
    if (tr - c(1.0, 0.0)).norm() > STATE_TOL {
        return Err(Error::Argument(format!("density matrix trace is {tr}, expected 1")));
    }
    let asym = hermitian_asymmetry(rho);
    if asym > STATE_TOL {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let min = eigvals_hermitian(rho)?[0];
    if min < -STATE_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(())
}

/// Tr(ρ O) using the transposed observable so both operands stream by rows.
#[derive(Debug, Clone)]
struct Probe {
    name: String,
    transposed: ComplexMatrix,
}

impl Probe {
    fn new(name: &str, op: &ComplexMatrix) -> Self {
        Self {
            name: name.to_string(),
            transposed: op.t().as_standard_layout().to_owned(),
        }
    }

    fn expect(&self, rho: &[C64]) -> f64 {
        let t = self.transposed.as_slice().expect("standard layout");
        rho.iter().zip(t).map(|(a, b)| a * b).sum::<C64>().re
    }
}

/// Integrate the interaction-frame model from `rho0`.
pub fn evolve(
    rho0: &ComplexMatrix,
    p: &ModelParams,
    cfg: &EvolutionConfig,
    observables: &[NamedOperator],
) -> Result<Evolution> {
    p.validate()?;
    let space = p.space()?;
    let eq = MasterEquation::from_params(p, &space, cfg.reference_mode)?;
    let mut ev = evolve_equation(rho0, eq, cfg, observables)?;
    ev.series.set_meta("model", &series::to_compact_json(p));
    Ok(ev)
}

/// Integrate an arbitrary generator.
pub fn evolve_equation(
    rho0: &ComplexMatrix,
    eq: MasterEquation,
    cfg: &EvolutionConfig,
    observables: &[NamedOperator],
) -> Result<Evolution> {
    cfg.validate()?;
    validate_density_matrix(rho0)?;
    let n = eq.dim();
    if rho0.nrows() != n {
        return Err(Error::Shape(format!("rho0 is {}x{}, generator acts on {n}", rho0.nrows(), rho0.ncols())));
    }
    for (name, op) in observables {
        expect_dim(op, n, name)?;
    }
    let probes: Vec<Probe> = observables.iter().map(|(name, op)| Probe::new(name, op)).collect();
    let mut prop = Propagator::new(eq);
    let mut rho = rho0.as_standard_layout().to_owned();
    let mut series = TimeSeries::new(probes.iter().map(|p| p.name.clone()));
    series.set_meta("evolution", &series::to_compact_json(cfg));
    let mut diag = Diagnostics::default();
    let mut n_samples = 0usize;

    let mut record = |t: f64, rho: &ComplexMatrix, drift: f64, series: &mut TimeSeries| -> Result<()> {
        let slice = rho.as_slice().expect("standard layout");
        if slice.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Integration {
                t,
                reason: "state contains non-finite entries".into(),
            });
        }
        let values: Vec<f64> = probes.iter().map(|p| p.expect(slice)).collect();
        series.push(t, &values);
        let check = cfg.positivity_check_every > 0 && n_samples % cfg.positivity_check_every == 0;
        diag.record(t, rho, drift, check)?;
        n_samples += 1;
        Ok(())
    };

    record(0.0, &rho, 0.0, &mut series)?;
    match cfg.tolerance {
        None => {
            let (steps, dt) = cfg.fixed_grid();
            for s in 0..steps {
                let t = s as f64 * dt;
                prop.step(t, rho.as_slice_mut().expect("standard layout"), dt);
                if (s + 1) % cfg.sample_every == 0 || s + 1 == steps {
                    record((s + 1) as f64 * dt, &rho, prop.last_drift, &mut series)?;
                }
            }
        }
        Some(tol) => {
            let interval = cfg.dt * cfg.sample_every as f64;
            let n_intervals = (cfg.t_end / interval).ceil() as usize;
            let mut h = cfg.dt;
            let mut t = 0.0;
            for k in 1..=n_intervals {
                let target = (k as f64 * interval).min(cfg.t_end);
                prop.last_drift = 0.0;
                while t < target - 1e-12 * cfg.t_end {
                    let step = h.min(target - t);
                    let err = prop.try_doubling_step(t, rho.as_slice_mut().expect("standard layout"), step, tol);
                    if err <= tol {
                        t += step;
                    }
                    let factor = if err == 0.0 { 2.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 2.0) };
                    h = step * factor;
                    if h < 1e-12 * cfg.t_end {
                        return Err(Error::Integration {
                            t,
                            reason: format!("step size underflow (error estimate {err:.3e} vs tolerance {tol:.1e})"),
                        });
                    }
                }
                t = target;
                record(t, &rho, prop.last_drift, &mut series)?;
            }
        }
    }
    Ok(Evolution {
        series,
        final_state: rho,
        diagnostics: diag,
    })
}

/// Standard observables on the canonical layout:
/// `nve1_pop`, `nve2_pop` (|1⟩⟨1| on each NVE), `n_a1`, `n_a2` (a†a per
/// resonator), and `plus`/`minus`, the projectors onto the orthonormalized
/// superpositions (|A⟩ ± e^{iφ}|B⟩) of the cat's two branches.
pub fn default_observables(space: &HilbertSpace, cat: &CatSpec) -> Result<Vec<NamedOperator>> {
    let t = Truncations::from_space(space)?;
    let mut out = Vec::new();
    for (name, slot) in [("nve1_pop", slots::NVE1), ("nve2_pop", slots::NVE2)] {
        out.push((name.to_string(), embed(&fock_projector(t.fock(slot), 1), slot, space)?));
    }
    for (name, slot) in [("n_a1", slots::RES1), ("n_a2", slots::RES2)] {
        let n = t.fock(slot);
        out.push((name.to_string(), embed(&matmul(&creation(n), &annihilation(n)), slot, space)?));
    }
    let (plus, minus) = superposition_projectors(cat, &t)?;
    out.push(("plus".to_string(), embed_block(&plus, slots::RES1, space)?));
    out.push(("minus".to_string(), embed_block(&minus, slots::RES1, space)?));
    Ok(out)
}

/// Gram–Schmidt on {|A⟩ + w|B⟩, |A⟩ - w|B⟩}, w = e^{iφ}; returns the two
/// rank-1 projectors on the two-mode resonator space.
pub fn superposition_projectors(cat: &CatSpec, t: &Truncations) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (a, b) = cat_branches(cat, t.fock(slots::RES1), t.fock(slots::RES2))?;
    let w = C64::from_polar(1.0, cat.cat_phase);
    let plus = &a + &b.mapv(|z| z * w);
    let minus = &a - &b.mapv(|z| z * w);
    let d = plus.len();
    let zero = || Array2::<C64>::zeros((d, d));
    let np = l2_norm(&plus);
    if np < 1e-12 {
        return Err(Error::VanishingNorm { norm: np });
    }
    let e1 = plus.mapv(|z| z / np);
    let overlap: C64 = e1.iter().zip(&minus).map(|(x, y)| x.conj() * y).sum();
    let rest: Array1<C64> = &minus - &e1.mapv(|z| z * overlap);
    let nr = l2_norm(&rest);
    let p1 = crate::linalg::outer(&e1, &e1);
    if nr < 1e-12 {
        return Ok((p1, zero()));
    }
    let e2 = rest.mapv(|z| z / nr);
    Ok((p1, crate::linalg::outer(&e2, &e2)))
}
