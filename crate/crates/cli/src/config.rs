//! Run configuration: one JSON document, preset defaults underneath, dotted
//! `--set` overrides on top.

use std::path::{Path, PathBuf};

use hybrid_qme::dynamics::EvolutionConfig;
use hybrid_qme::experiment::Scale;
use hybrid_qme::metrics::WignerSpec;
use hybrid_qme::model::{n_thermal, ModelParams};
use hybrid_qme::states::{CatSpec, ParitySign};
use hybrid_qme::{Error as CoreError, C64};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

/// Header key under which every output file stores its resolved config.
pub const CONFIG_META_KEY: &str = "config";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Fig2Wigner,
    Fig3Populations,
    Fig4Concurrence,
    Fig5Fidelity,
    Custom,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2Wigner => "fig2_wigner",
            Preset::Fig3Populations => "fig3_populations",
            Preset::Fig4Concurrence => "fig4_concurrence",
            Preset::Fig5Fidelity => "fig5_fidelity",
            Preset::Custom => "custom",
        }
    }
}

/// Cat inputs shared by both branches; the coherent branch ignores the squeeze.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatConfig {
    pub alpha0: f64,
    /// Amplitude of the second mode; `null` means equal to `alpha0`.
    pub alpha2: Option<f64>,
    pub cat_phase: f64,
    pub parity: ParitySign,
    pub squeeze_r: f64,
    pub squeeze_phase: f64,
}

impl CatConfig {
    fn for_scale(scale: Scale) -> Self {
        Self {
            alpha0: scale.alpha0(),
            alpha2: None,
            cat_phase: 0.0,
            parity: ParitySign::Minus,
            squeeze_r: hybrid_qme::experiment::DEFAULT_SQUEEZE_R,
            squeeze_phase: hybrid_qme::experiment::DEFAULT_SQUEEZE_PHASE,
        }
    }

    pub fn coherent(&self) -> CatSpec {
        CatSpec {
            alpha1: C64::new(self.alpha0, 0.0),
            alpha2: C64::new(self.alpha2.unwrap_or(self.alpha0), 0.0),
            cat_phase: self.cat_phase,
            parity: self.parity,
            squeeze: None,
        }
    }

    pub fn squeezed(&self) -> CatSpec {
        CatSpec {
            squeeze: Some(C64::from_polar(self.squeeze_r, self.squeeze_phase)),
            ..self.coherent()
        }
    }

    pub fn validate(&self, levels: usize) -> Result<(), CliError> {
        let amps = [("cat.alpha0", self.alpha0), ("cat.alpha2", self.alpha2.unwrap_or(self.alpha0))];
        for (field, a) in amps {
            if !a.is_finite() {
                return Err(CliError::field(field, "must be finite"));
            }
            if a * a > levels as f64 / 2.0 {
                return Err(CliError::field(
                    field,
                    format!("|alpha|^2 = {} exceeds half the resonator truncation ({levels} levels)", a * a),
                ));
            }
        }
        if !self.cat_phase.is_finite() || !self.squeeze_phase.is_finite() {
            return Err(CliError::field("cat.cat_phase", "phases must be finite"));
        }
        if !(self.squeeze_r.is_finite() && self.squeeze_r >= 0.0) {
            return Err(CliError::field("cat.squeeze_r", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Preset,
    pub scale: Scale,
    pub model: ModelParams,
    pub cat: CatConfig,
    pub evolution: EvolutionConfig,
    /// Grid used by the `fig2_wigner` preset.
    pub wigner: WignerSpec,
    /// Not written back out, so a replayed CSV never targets its own path.
    #[serde(skip_serializing)]
    pub output_path: Option<PathBuf>,
    /// Reserved; every run is deterministic.
    pub seed: u64,
}

/// Evolution settings shared by the time-domain presets.
pub fn preset_evolution() -> EvolutionConfig {
    EvolutionConfig {
        t_end: 10.0,
        dt: 0.005,
        tolerance: None,
        sample_every: 20,
        positivity_check_every: 10,
        ..EvolutionConfig::default()
    }
}

impl RunConfig {
    pub fn preset_defaults(preset: Preset, scale: Scale) -> Self {
        Self {
            preset,
            scale,
            model: ModelParams {
                truncations: scale.truncations(),
                ..ModelParams::default()
            },
            cat: CatConfig::for_scale(scale),
            evolution: preset_evolution(),
            wigner: WignerSpec::default(),
            output_path: None,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.model.validate().map_err(|e| prefixed("model", e))?;
        self.evolution.validate().map_err(|e| prefixed("evolution", e))?;
        self.wigner.validate().map_err(|e| prefixed("wigner", e))?;
        let t = &self.model.truncations;
        self.cat.validate(t.resonator1().min(t.resonator2()))?;
        if self.evolution.tolerance.is_some() && self.preset != Preset::Fig2Wigner {
            return Err(CliError::field(
                "evolution.tolerance",
                "paired runs use fixed steps; remove the tolerance",
            ));
        }
        Ok(())
    }

    pub fn output_path(&self) -> PathBuf {
        self.output_path
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.preset.name())))
    }

    pub fn to_compact_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Human-readable summary printed by `validate`.
    pub fn report(&self) -> Result<String, CliError> {
        let mut out = serde_json::to_string_pretty(self).expect("config serializes");
        out.push('\n');
        out.push_str(&format!("total_dim: {}\n", self.model.truncations.total_dim()));
        for (name, w) in [("a1", self.model.omega_r1), ("a2", self.model.omega_r2)] {
            let n = n_thermal(&self.model, w).map_err(|e| prefixed("model", e))?;
            out.push_str(&format!("n_thermal_{name}: {n}\n"));
        }
        out.push_str(&format!("omega_q: {}\n", self.model.omega_q()));
        Ok(out)
    }
}

fn prefixed(section: &str, e: CoreError) -> CliError {
    match e {
        CoreError::Param { field, reason } => CliError::field(&format!("{section}.{field}"), reason),
        other => CliError::Config(format!("{section}: {other}")),
    }
}

/// Raw inputs before resolution.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub sets: Vec<String>,
    pub scale: Option<Scale>,
    pub out: Option<PathBuf>,
}

/// Read a config document. A file starting with `#` is treated as an output
/// CSV and its embedded config line is used, so runs can be replayed.
pub fn read_document(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let json = if text.trim_start().starts_with('#') {
        let prefix = format!("# {CONFIG_META_KEY}: ");
        text.lines()
            .find_map(|l| l.strip_prefix(&prefix))
            .ok_or_else(|| CliError::Config(format!("{} has no `{prefix}` header line", path.display())))?
            .to_string()
    } else {
        text
    };
    let v: Value = serde_json::from_str(&json)
        .map_err(|e| CliError::Config(format!("{} is not valid JSON: {e}", path.display())))?;
    if !v.is_object() {
        return Err(CliError::Config("config must be a JSON object".into()));
    }
    Ok(v)
}

/// Apply one `dotted.path=value` override. The value is parsed as JSON when
/// possible and kept as a string otherwise.
pub fn apply_set(doc: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{assignment}` must look like key.path=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Config(format!("override path `{path}` has an empty segment")));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = doc;
    for (i, key) in keys.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::field(&keys[..i].join("."), "is not an object"))?;
        if i + 1 == keys.len() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        node = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("non-empty key list")
}

/// Recursive object merge; `top` wins.
fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) => *b = t,
    }
}

/// Document (possibly empty) + overrides → validated config.
pub fn resolve(doc: Option<Value>, ov: &Overrides) -> Result<RunConfig, CliError> {
    let mut user = doc.unwrap_or_else(|| Value::Object(Map::new()));
    for s in &ov.sets {
        apply_set(&mut user, s)?;
    }
    if let Some(scale) = ov.scale {
        user["scale"] = serde_json::to_value(scale).expect("enum serializes");
    }
    if let Some(out) = &ov.out {
        user["output_path"] = Value::String(out.display().to_string());
    }
    let preset: Preset = match user.get("preset") {
        None | Some(Value::Null) => return Err(CliError::field("preset", "missing required field")),
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| CliError::field("preset", e.to_string()))?,
    };
    let scale: Scale = match user.get("scale") {
        None | Some(Value::Null) => Scale::Full,
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| CliError::field("scale", e.to_string()))?,
    };
    let mut full = serde_json::to_value(RunConfig::preset_defaults(preset, scale)).expect("config serializes");
    merge(&mut full, user);
    let cfg: RunConfig = serde_path_to_error::deserialize(full).map_err(|e| {
        let path = e.path().to_string();
        CliError::field(&path, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}
