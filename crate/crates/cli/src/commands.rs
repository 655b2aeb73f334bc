use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hybrid_qme::experiment::{run_pair, BranchResult, Scale, BRANCH_COLUMNS};
use hybrid_qme::linalg::PSD_FAIL_TOL;
use hybrid_qme::metrics::{wigner, ModeSelection, WignerSpec};
use hybrid_qme::model::slots;
use hybrid_qme::operators::FockTruncation;
use hybrid_qme::states::{cat_state, CatSpec, ParitySign};
use hybrid_qme::Error as CoreError;

use crate::config::{self, Overrides, Preset, RunConfig, CONFIG_META_KEY};
use crate::output::{diagnostics_line, paired_series, wigner_table, write_atomic};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "hybrid-qme", version, about = "Hybrid NV-ensemble / flux-qubit / resonator master-equation runs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a preset and write its CSV.
    Simulate(ConfigArgs),
    /// Sample the Wigner function of a cat state on a grid.
    Wigner(WignerArgs),
    /// Resolve and check a config without running it.
    Validate(ConfigArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// JSON config, or a previous output CSV to replay.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = parse_scale)]
    pub scale: Option<Scale>,
    /// Dotted override, e.g. `model.kappa=0.03`; repeatable.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    pub sets: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Cscs,
    Sscs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Even,
    Odd,
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    #[arg(long, value_enum, default_value = "cscs")]
    pub state: StateKind,
    /// Cat amplitude α₀ (both modes unless --alpha2 is given).
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha2: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub cat_phase: f64,
    #[arg(long, value_enum, default_value = "odd")]
    pub parity: ParityArg,
    /// Squeezing magnitude (squeezed cats only).
    #[arg(long, default_value_t = hybrid_qme::experiment::DEFAULT_SQUEEZE_R)]
    pub r: f64,
    #[arg(long, default_value_t = hybrid_qme::experiment::DEFAULT_SQUEEZE_PHASE, allow_negative_numbers = true)]
    pub squeeze_phase: f64,
    /// Fock levels per resonator mode.
    #[arg(long, default_value_t = 12)]
    pub levels: usize,
    /// Grid half-width in x and p.
    #[arg(long, default_value_t = 4.0)]
    pub extent: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 81)]
    pub points: usize,
    #[arg(long, default_value = "correlated_cut", value_parser = parse_mode)]
    pub mode: ModeSelection,
    #[arg(long, default_value = "wigner.csv")]
    pub out: PathBuf,
}

fn parse_scale(s: &str) -> Result<Scale, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

fn parse_mode(s: &str) -> Result<ModeSelection, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

/// Dispatch a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let result = match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Wigner(a) => cmd_wigner(&a),
        Command::Validate(a) => validate(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve_args(a: &ConfigArgs) -> Result<RunConfig, CliError> {
    let doc = a.config.as_deref().map(config::read_document).transpose()?;
    config::resolve(
        doc,
        &Overrides {
            sets: a.sets.clone(),
            scale: a.scale,
            out: a.out.clone(),
        },
    )
}

fn validate(a: &ConfigArgs) -> Result<(), CliError> {
    let cfg = resolve_args(a)?;
    print!("{}", cfg.report()?);
    Ok(())
}

fn integration(e: CoreError) -> CliError {
    match e {
        CoreError::Param { field, reason } => CliError::field(&field, reason),
        other => CliError::Integration(other.to_string()),
    }
}

fn check_physical(b: &BranchResult, tag: &str) -> Result<(), CliError> {
    let low = b.diagnostics.lowest_eigenvalue();
    if low < -PSD_FAIL_TOL {
        return Err(CliError::Integration(format!(
            "{tag} branch lost positivity (smallest eigenvalue {low:.3e})"
        )));
    }
    Ok(())
}

fn simulate(a: &ConfigArgs) -> Result<(), CliError> {
    let cfg = resolve_args(a)?;
    let path = cfg.output_path();
    let mut meta = vec![
        ("generator".to_string(), format!("hybrid-qme {}", env!("CARGO_PKG_VERSION"))),
        ("preset".to_string(), cfg.preset.name().to_string()),
        (CONFIG_META_KEY.to_string(), cfg.to_compact_json()),
    ];
    let text = match cfg.preset {
        Preset::Fig2Wigner => {
            let t = &cfg.model.truncations;
            let mut grids = Vec::new();
            for cat in [cfg.cat.coherent(), cfg.cat.squeezed()] {
                let st = cat_state(&cat, t.fock(slots::RES1), t.fock(slots::RES2)).map_err(integration)?;
                grids.push(wigner(&st.density_matrix(), &st.space, &cfg.wigner).map_err(integration)?);
            }
            wigner_table(&meta, &[("w_cscs", &grids[0]), ("w_sscs", &grids[1])])
        }
        preset => {
            let (cscs, sscs) = (cfg.cat.coherent(), cfg.cat.squeezed());
            log::info!(
                "running {} on dimension {} to t = {} ns",
                preset.name(),
                cfg.model.truncations.total_dim(),
                cfg.evolution.t_end
            );
            let (bc, bs) = run_pair(&cfg.model, &cscs, &sscs, &cfg.evolution).map_err(integration)?;
            check_physical(&bc, "coherent")?;
            check_physical(&bs, "squeezed")?;
            let columns: &[&str] = match preset {
                Preset::Fig3Populations => &["nve1_pop", "nve2_pop", "n_a1", "n_a2", "plus", "minus"],
                Preset::Fig4Concurrence => &["concurrence", "projection_weight"],
                Preset::Fig5Fidelity => &["fidelity"],
                _ => &BRANCH_COLUMNS,
            };
            let mut series = paired_series(&bc, &bs, columns);
            meta.push(("time_scale".to_string(), cfg.evolution.time_scale.to_string()));
            meta.push(("diagnostics_cscs".to_string(), diagnostics_line(&bc)));
            meta.push(("diagnostics_sscs".to_string(), diagnostics_line(&bs)));
            for (k, v) in &meta {
                series.set_meta(k, v);
            }
            series.to_csv_string()
        }
    };
    write_atomic(&path, text.as_bytes())?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn cmd_wigner(a: &WignerArgs) -> Result<(), CliError> {
    let levels = FockTruncation::new(a.levels).map_err(|e| CliError::field("levels", e))?;
    for (field, amp) in [("alpha", a.alpha), ("alpha2", a.alpha2.unwrap_or(a.alpha))] {
        if !amp.is_finite() || amp * amp > a.levels as f64 / 2.0 {
            return Err(CliError::field(
                field,
                format!("|alpha|^2 = {} is not representable with {} levels (limit n/2)", amp * amp, a.levels),
            ));
        }
    }
    if !(a.extent.is_finite() && a.extent > 0.0) {
        return Err(CliError::field("extent", "must be > 0"));
    }
    if !(a.r.is_finite() && a.r >= 0.0) {
        return Err(CliError::field("r", "must be >= 0"));
    }
    let parity = match a.parity {
        ParityArg::Even => ParitySign::Plus,
        ParityArg::Odd => ParitySign::Minus,
    };
    let spec = CatSpec {
        alpha1: hybrid_qme::C64::new(a.alpha, 0.0),
        alpha2: hybrid_qme::C64::new(a.alpha2.unwrap_or(a.alpha), 0.0),
        cat_phase: a.cat_phase,
        parity,
        squeeze: match a.state {
            StateKind::Cscs => None,
            StateKind::Sscs => Some(hybrid_qme::C64::from_polar(a.r, a.squeeze_phase)),
        },
    };
    let grid_spec = WignerSpec {
        x_range: (-a.extent, a.extent),
        p_range: (-a.extent, a.extent),
        nx: a.points,
        np: a.points,
        mode: a.mode,
    };
    grid_spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let st = cat_state(&spec, levels, levels).map_err(|e| match e {
        CoreError::VanishingNorm { .. } => CliError::Config(format!("the requested cat has zero norm: {e}")),
        other => CliError::Integration(other.to_string()),
    })?;
    let grid = wigner(&st.density_matrix(), &st.space, &grid_spec).map_err(integration)?;
    let meta = vec![
        ("generator".to_string(), format!("hybrid-qme {}", env!("CARGO_PKG_VERSION"))),
        ("state".to_string(), serde_json::to_string(&spec).expect("plain data")),
        ("levels".to_string(), a.levels.to_string()),
        ("grid".to_string(), serde_json::to_string(&grid_spec).expect("plain data")),
    ];
    write_atomic(&a.out, wigner_table(&meta, &[("w", &grid)]).as_bytes())
}
