//! Paired dissipative/ideal runs of the full hybrid model for a cat input.
//!
//! Each branch (one cat spec) evolves ρ(t) under the master equation and the
//! dissipation-free state vector ψ(t) in lockstep on the same fixed grid, and
//! records populations, field observables, NVE concurrence and ⟨ψ|ρ|ψ⟩.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    default_observables, validate_density_matrix, Diagnostics, EvolutionConfig, MasterEquation, Propagator,
    PurePropagator, ReferenceMode, TimeSeries,
};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::metrics::{fidelity_pure, nve_concurrence};
use crate::model::{build_collapse_set, interaction_hamiltonian, ModelParams, Truncations};
use crate::states::{cat_state, initial_state_vector, CatSpec, ParitySign};

/// Resonator truncation and cat amplitude bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// α₀ = 1, resonators truncated at 6 (total dimension 648).
    #[default]
    Fast,
    /// α₀ = 2, resonators truncated at 12 (total dimension 2592).
    Full,
}

impl Scale {
    pub fn truncations(self) -> Truncations {
        match self {
            Scale::Fast => Truncations::fast(),
            Scale::Full => Truncations::full(),
        }
    }

    pub fn alpha0(self) -> f64 {
        match self {
            Scale::Fast => 1.0,
            Scale::Full => 2.0,
        }
    }
}

impl std::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Scale::Fast),
            "full" => Ok(Scale::Full),
            other => Err(Error::Argument(format!("unknown scale `{other}` (expected fast or full)"))),
        }
    }
}

/// Default squeezing for the squeezed-cat branch.
pub const DEFAULT_SQUEEZE_R: f64 = 0.3;
pub const DEFAULT_SQUEEZE_PHASE: f64 = std::f64::consts::PI;

/// The coherent and squeezed odd cats compared throughout.
pub fn default_cat_pair(scale: Scale) -> (CatSpec, CatSpec) {
    let a = scale.alpha0();
    (
        CatSpec::coherent(a, ParitySign::Minus),
        CatSpec::squeezed(a, ParitySign::Minus, DEFAULT_SQUEEZE_R, DEFAULT_SQUEEZE_PHASE),
    )
}

/// RK4 substeps of the state-vector reference per master-equation step. The
/// reference has no damping to suppress high-frequency error and costs a
/// tiny fraction of a density-matrix step, so it is integrated more finely.
pub const REFERENCE_SUBSTEPS: usize = 8;

/// Columns recorded for every branch, in order.
pub const BRANCH_COLUMNS: [&str; 9] = [
    "nve1_pop",
    "nve2_pop",
    "n_a1",
    "n_a2",
    "plus",
    "minus",
    "concurrence",
    "projection_weight",
    "fidelity",
];

#[derive(Debug, Clone)]
pub struct BranchResult {
    pub cat: CatSpec,
    pub series: TimeSeries,
    pub diagnostics: Diagnostics,
    pub final_state: ComplexMatrix,
}

/// Evolve one cat input. Always fixed-step: the dissipative and ideal
/// trajectories must share sample times.
pub fn run_branch(p: &ModelParams, cat: &CatSpec, cfg: &EvolutionConfig) -> Result<BranchResult> {
    p.validate()?;
    cfg.validate()?;
    if cfg.tolerance.is_some() {
        return Err(Error::param("tolerance", "paired runs use fixed steps; unset the tolerance"));
    }
    let space = p.space()?;
    let t = &p.truncations;
    let cat_vec = cat_state(cat, t.fock(crate::model::slots::RES1), t.fock(crate::model::slots::RES2))?;
    let psi0 = initial_state_vector(&cat_vec, &space)?;
    let rho0 = psi0.density_matrix();
    validate_density_matrix(&rho0)?;

    let h = interaction_hamiltonian(p, &space)?;
    let collapse = match cfg.reference_mode {
        ReferenceMode::Dissipative => build_collapse_set(p, &space)?,
        ReferenceMode::Unitary => vec![],
    };
    let mut prop = Propagator::new(MasterEquation::new(&h, &collapse)?);
    let mut pure = PurePropagator::new(&h);
    let observables = default_observables(&space, cat)?;
    let transposed: Vec<ComplexMatrix> = observables
        .iter()
        .map(|(_, o)| o.t().as_standard_layout().to_owned())
        .collect();

    let mut series = TimeSeries::new(BRANCH_COLUMNS.iter().map(|s| s.to_string()));
    series.set_meta("cat", &serde_json::to_string(cat).expect("plain data"));
    let mut diag = Diagnostics::default();
    let mut rho = rho0;
    let mut psi: Vec<C64> = psi0.amplitudes.to_vec();
    let mut n_samples = 0usize;

    let mut record = |time: f64, rho: &ComplexMatrix, psi: &[C64], drift: f64, series: &mut TimeSeries| -> Result<()> {
        let slice = rho.as_slice().expect("standard layout");
        if slice.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Integration {
                t: time,
                reason: "state contains non-finite entries".into(),
            });
        }
        let mut row: Vec<f64> = transposed
            .iter()
            .map(|ot| {
                let o = ot.as_slice().expect("standard layout");
                slice.iter().zip(o).map(|(a, b)| a * b).sum::<C64>().re
            })
            .collect();
        let (conc, weight) = nve_concurrence(rho, &space)?;
        row.push(conc);
        row.push(weight);
        row.push(fidelity_pure(rho, psi)?);
        series.push(time, &row);
        let check = cfg.positivity_check_every > 0 && n_samples % cfg.positivity_check_every == 0;
        diag.record(time, rho, drift, check)?;
        n_samples += 1;
        Ok(())
    };

    record(0.0, &rho, &psi, 0.0, &mut series)?;
    let (steps, dt) = cfg.fixed_grid();
    let mut drift: f64 = 0.0;
    for s in 0..steps {
        let time = s as f64 * dt;
        prop.step(time, rho.as_slice_mut().expect("standard layout"), dt);
        let h = dt / REFERENCE_SUBSTEPS as f64;
        for k in 0..REFERENCE_SUBSTEPS {
            pure.step(time + k as f64 * h, &mut psi, h);
        }
        drift = drift.max(prop.last_drift);
        if (s + 1) % cfg.sample_every == 0 || s + 1 == steps {
            record((s + 1) as f64 * dt, &rho, &psi, drift, &mut series)?;
            drift = 0.0;
        }
    }
    log::debug!("branch finished after {steps} steps");
    Ok(BranchResult {
        cat: *cat,
        series,
        diagnostics: diag,
        final_state: rho,
    })
}

/// Coherent-cat and squeezed-cat branches, in that order.
pub fn run_pair(
    p: &ModelParams,
    cscs: &CatSpec,
    sscs: &CatSpec,
    cfg: &EvolutionConfig,
) -> Result<(BranchResult, BranchResult)> {
    Ok((run_branch(p, cscs, cfg)?, run_branch(p, sscs, cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> (ModelParams, EvolutionConfig) {
        let p = ModelParams {
            truncations: Truncations::new([2, 2, 2, 3, 3]).unwrap(),
            ..ModelParams::default()
        };
        let cfg = EvolutionConfig {
            t_end: 0.5,
            dt: 0.005,
            sample_every: 20,
            positivity_check_every: 1,
            ..EvolutionConfig::default()
        };
        (p, cfg)
    }

    #[test]
    fn branch_starts_pure_and_product() {
        let (p, cfg) = tiny();
        let cat = CatSpec::coherent(0.5, ParitySign::Minus);
        let r = run_branch(&p, &cat, &cfg).unwrap();
        let s = &r.series;
        assert_eq!(s.names(), BRANCH_COLUMNS);
        assert_eq!(s.len(), 6);
        assert!((s.column("fidelity").unwrap()[0] - 1.0).abs() < 1e-12);
        assert!(s.column("concurrence").unwrap()[0].abs() < 1e-7);
        assert!((s.column("nve1_pop").unwrap()[0] - 0.5).abs() < 1e-12);
        assert!(s.column("fidelity").unwrap().iter().all(|f| (0.0..=1.0).contains(f)));
        assert!(r.diagnostics.max_trace_deviation() < 1e-8);
    }

    #[test]
    fn unitary_mode_keeps_fidelity_at_one() {
        let (p, cfg) = tiny();
        let cfg = EvolutionConfig {
            reference_mode: ReferenceMode::Unitary,
            ..cfg
        };
        let cat = CatSpec::squeezed(0.5, ParitySign::Minus, 0.2, 1.0);
        let r = run_branch(&p, &cat, &cfg).unwrap();
        assert!(r.series.column("fidelity").unwrap().iter().all(|f| (f - 1.0).abs() < 1e-8));
    }

    #[test]
    fn adaptive_configs_are_refused() {
        let (p, cfg) = tiny();
        let cfg = EvolutionConfig {
            tolerance: Some(1e-8),
            ..cfg
        };
        let cat = CatSpec::coherent(0.5, ParitySign::Minus);
        assert!(matches!(run_branch(&p, &cat, &cfg), Err(Error::Param { .. })));
    }

    #[test]
    fn scales() {
        assert_eq!(Scale::Fast.truncations().total_dim(), 648);
        assert_eq!(Scale::Full.truncations().total_dim(), 2592);
        assert_eq!("full".parse::<Scale>().unwrap(), Scale::Full);
        assert!("huge".parse::<Scale>().is_err());
        let (c, s) = default_cat_pair(Scale::Fast);
        assert!(c.squeeze.is_none() && s.squeeze.is_some());
    }
}
