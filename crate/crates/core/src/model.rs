//! Parameter record, Hamiltonians and collapse operators.
//!
//! Units: ħ = 1, energies and rates in GHz, times in ns. The composite space
//! always uses the slot order `[b1, b2, fq, a1, a2]` (see [`slots`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dagger, matmul, ComplexMatrix, C64};
use crate::operators::{annihilation, creation, embed, embed_product, number, pauli, FockTruncation, Pauli};
use crate::space::HilbertSpace;

/// Canonical slot indices.
pub mod slots {
    pub const NVE1: usize = 0;
    pub const NVE2: usize = 1;
    pub const QUBIT: usize = 2;
    pub const RES1: usize = 3;
    pub const RES2: usize = 4;
    pub const LABELS: [&str; 5] = ["b1", "b2", "fq", "a1", "a2"];
}

/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Per-slot truncations in canonical order; the qubit entry is always 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[usize; 5]", into = "[usize; 5]")]
pub struct Truncations([usize; 5]);

impl Truncations {
    pub fn new(levels: [usize; 5]) -> Result<Self> {
        for (slot, &n) in levels.iter().enumerate() {
            if slot == slots::QUBIT {
                if n != 2 {
                    return Err(Error::param("truncations", format!("flux-qubit slot must be 2, got {n}")));
                }
            } else if n < 2 {
                return Err(Error::param(
                    "truncations",
                    format!("slot {} needs at least 2 levels, got {n}", slots::LABELS[slot]),
                ));
            }
        }
        Ok(Self(levels))
    }

    pub fn fast() -> Self {
        Self([3, 3, 2, 6, 6])
    }

    pub fn full() -> Self {
        Self([3, 3, 2, 12, 12])
    }

    pub fn from_space(space: &HilbertSpace) -> Result<Self> {
        let dims: [usize; 5] = space
            .dims()
            .try_into()
            .map_err(|_| Error::Shape(format!("expected the 5-slot layout, got {:?}", space.dims())))?;
        Self::new(dims)
    }

    pub fn levels(&self) -> [usize; 5] {
        self.0
    }

    pub fn fock(&self, slot: usize) -> FockTruncation {
        FockTruncation::new(self.0[slot]).expect("validated on construction")
    }

    pub fn resonator1(&self) -> usize {
        self.0[slots::RES1]
    }

    pub fn resonator2(&self) -> usize {
        self.0[slots::RES2]
    }

    pub fn total_dim(&self) -> usize {
        self.0.iter().product()
    }

    pub fn with_resonators(&self, n: usize) -> Result<Self> {
        let mut l = self.0;
        l[slots::RES1] = n;
        l[slots::RES2] = n;
        Self::new(l)
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new(self.0, slots::LABELS)
    }
}

impl TryFrom<[usize; 5]> for Truncations {
    type Error = Error;
    fn try_from(v: [usize; 5]) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Truncations> for [usize; 5] {
    fn from(t: Truncations) -> Self {
        t.0
    }
}

/// How the flux-qubit term Λ D[σ±] is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitDissipatorMode {
    Lowering,
    Raising,
    #[default]
    Both,
    Dephasing,
}

/// Whether the frequency handed to the thermal occupation is an ordinary
/// frequency (E = h f) or an angular one (E = ħ ω).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyConvention {
    #[default]
    Ordinary,
    Angular,
}

/// Every physical parameter of the circuit. Frequencies and rates in GHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// NVE bosonic-mode frequency ω_j.
    pub omega_j: f64,
    #[serde(rename = "D_gs")]
    pub d_gs: Option<f64>,
    /// Combined Zeeman term g_e μ_B B_z.
    pub zeeman_term: Option<f64>,
    pub delta_x: f64,
    pub delta_z: f64,
    pub omega_r1: f64,
    pub omega_r2: f64,
    /// Frame frequency of the two-photon terms; defaults to `delta_x`.
    pub omega_q: Option<f64>,
    #[serde(rename = "G_nvf")]
    pub g_nvf: f64,
    #[serde(rename = "G_nvr")]
    pub g_nvr: f64,
    #[serde(rename = "G_fr")]
    pub g_fr: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Flux-qubit dissipation rate Λ.
    #[serde(rename = "Lambda")]
    pub qubit_rate: f64,
    pub kappa: f64,
    /// Bath temperature, K.
    #[serde(rename = "T")]
    pub temperature: f64,
    pub n_spins: u64,
    #[serde(rename = "Delta_nv")]
    pub delta_nv: Option<f64>,
    #[serde(rename = "Delta_f")]
    pub delta_f: Option<f64>,
    /// Undefined reference frequency in Δ_f = ω_r - λ; stored only.
    #[serde(rename = "lambda")]
    pub lambda_ref: Option<f64>,
    pub g_w: f64,
    pub truncations: Truncations,
    pub qubit_dissipator_mode: QubitDissipatorMode,
    pub thermal_convention: FrequencyConvention,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega_j: 2.87,
            d_gs: Some(2.87),
            zeeman_term: Some(0.0),
            delta_x: 2.87,
            delta_z: 0.0,
            omega_r1: 2.87,
            omega_r2: 2.87,
            omega_q: None,
            g_nvf: 2.0,
            g_nvr: 0.05,
            g_fr: 0.5,
            gamma1: 0.08,
            gamma2: 0.08,
            qubit_rate: 0.5,
            kappa: 0.02,
            temperature: 0.5,
            n_spins: 100,
            delta_nv: None,
            delta_f: None,
            lambda_ref: None,
            g_w: 1.0,
            truncations: Truncations::full(),
            qubit_dissipator_mode: QubitDissipatorMode::Both,
            thermal_convention: FrequencyConvention::Ordinary,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_j", self.omega_j),
            ("delta_x", self.delta_x),
            ("delta_z", self.delta_z),
            ("omega_r1", self.omega_r1),
            ("omega_r2", self.omega_r2),
            ("G_nvf", self.g_nvf),
            ("G_nvr", self.g_nvr),
            ("G_fr", self.g_fr),
            ("g_w", self.g_w),
            ("omega_q", self.omega_q()),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return Err(Error::param(field, "must be finite"));
            }
        }
        let rates = [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("Lambda", self.qubit_rate),
            ("kappa", self.kappa),
        ];
        for (field, v) in rates {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::param(field, format!("rate must be >= 0, got {v}")));
            }
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::param("T", format!("temperature must be > 0, got {}", self.temperature)));
        }
        for (field, v) in [("omega_r1", self.omega_r1), ("omega_r2", self.omega_r2)] {
            if v <= 0.0 {
                return Err(Error::param(field, "resonator frequency must be > 0"));
            }
        }
        if self.n_spins == 0 {
            return Err(Error::param("n_spins", "must be at least 1"));
        }
        if let (Some(d), Some(z)) = (self.d_gs, self.zeeman_term) {
            if (self.omega_j - (d - z)).abs() > 1e-9 {
                return Err(Error::param(
                    "omega_j",
                    format!("omega_j = {} but D_gs - zeeman_term = {}", self.omega_j, d - z),
                ));
            }
        }
        Truncations::new(self.truncations.levels())?;
        Ok(())
    }

    pub fn omega_q(&self) -> f64 {
        self.omega_q.unwrap_or(self.delta_x)
    }

    /// Δ_nv = ω_r - ω_j per resonator, when not overridden.
    pub fn nve_detunings(&self) -> [f64; 2] {
        match self.delta_nv {
            Some(d) => [d, d],
            None => [self.omega_r1 - self.omega_j, self.omega_r2 - self.omega_j],
        }
    }

    /// Δ_f = ω_r - λ, if either it or λ is known.
    pub fn qubit_detunings(&self) -> Option<[f64; 2]> {
        match (self.delta_f, self.lambda_ref) {
            (Some(d), _) => Some([d, d]),
            (None, Some(l)) => Some([self.omega_r1 - l, self.omega_r2 - l]),
            _ => None,
        }
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        self.truncations.space()
    }
}

/// Mean thermal occupation (e^{E/k_B T} - 1)^{-1} for a mode at frequency
/// `omega_ghz`, read per `p.thermal_convention`.
pub fn n_thermal(p: &ModelParams, omega_ghz: f64) -> Result<f64> {
    if !(omega_ghz.is_finite() && omega_ghz > 0.0) {
        return Err(Error::Argument(format!("frequency must be > 0, got {omega_ghz}")));
    }
    if !(p.temperature.is_finite() && p.temperature > 0.0) {
        return Err(Error::Argument(format!("temperature must be > 0, got {}", p.temperature)));
    }
    let energy = match p.thermal_convention {
        FrequencyConvention::Ordinary => PLANCK * omega_ghz * 1e9,
        FrequencyConvention::Angular => PLANCK / (2.0 * std::f64::consts::PI) * omega_ghz * 1e9,
    };
    let x = energy / (BOLTZMANN * p.temperature);
    Ok(1.0 / x.exp_m1())
}

fn scaled(m: &ComplexMatrix, s: f64) -> ComplexMatrix {
    m.mapv(|z| z * s)
}

fn check_layout(space: &HilbertSpace) -> Result<Truncations> {
    if space.labels().iter().map(String::as_str).ne(slots::LABELS) {
        return Err(Error::Shape(format!(
            "expected slot layout {:?}, got {:?}",
            slots::LABELS,
            space.labels()
        )));
    }
    Truncations::from_space(space)
}

/// H_w = g_w (c₁†c₂ + c₂†c₁)(c₃†c₄ + c₄†c₃) on a four-mode pump/signal space.
pub fn build_h_fourwave(p: &ModelParams, pump_space: &HilbertSpace) -> Result<ComplexMatrix> {
    if pump_space.n_slots() != 4 {
        return Err(Error::Shape(format!(
            "four-wave mixing needs 4 bosonic slots, got {}",
            pump_space.n_slots()
        )));
    }
    let ladder = |slot: usize| -> Result<(ComplexMatrix, ComplexMatrix)> {
        let n = FockTruncation::new(pump_space.dim(slot))?;
        Ok((embed(&annihilation(n), slot, pump_space)?, embed(&creation(n), slot, pump_space)?))
    };
    let (c1, c1d) = ladder(0)?;
    let (c2, c2d) = ladder(1)?;
    let (c3, c3d) = ladder(2)?;
    let (c4, c4d) = ladder(3)?;
    let pump = matmul(&c1d, &c2) + matmul(&c2d, &c1);
    let signal = matmul(&c3d, &c4) + matmul(&c4d, &c3);
    Ok(scaled(&matmul(&pump, &signal), p.g_w))
}

/// Flux-qubit Hamiltonian ½(δ_z σ_z + δ_x σ_x) on its own 2-level space.
pub fn build_h_fq(p: &ModelParams) -> ComplexMatrix {
    scaled(&pauli(Pauli::Z), 0.5 * p.delta_z) + scaled(&pauli(Pauli::X), 0.5 * p.delta_x)
}

/// Bosonic NVE Hamiltonian Σ_j ω_j b_j†b_j on the full space.
pub fn build_h_nve(p: &ModelParams, space: &HilbertSpace) -> Result<ComplexMatrix> {
    let t = check_layout(space)?;
    let mut h = ComplexMatrix::zeros((space.total_dim(), space.total_dim()));
    for slot in [slots::NVE1, slots::NVE2] {
        h += &scaled(&embed(&number(t.fock(slot)), slot, space)?, p.omega_j);
    }
    Ok(h)
}

/// Full system Hamiltonian H_S:
///
/// Σ_j ω_j b_j†b_j + δ_x σ_x + Σ_k ω_rk a_k†a_k
/// + Σ_j [G_nvf (b_j† + b_j) σ_z + G_nvr (b_j† a_j + a_j† b_j)]
/// + Σ_k G_fr (a_k + a_k†) σ_z
pub fn build_h_system(p: &ModelParams, space: &HilbertSpace) -> Result<ComplexMatrix> {
    let t = check_layout(space)?;
    let sz = pauli(Pauli::Z);
    let mut h = build_h_nve(p, space)?;
    h += &scaled(&embed(&pauli(Pauli::X), slots::QUBIT, space)?, p.delta_x);
    for (slot, w) in [(slots::RES1, p.omega_r1), (slots::RES2, p.omega_r2)] {
        h += &scaled(&embed(&number(t.fock(slot)), slot, space)?, w);
    }
    h += &spin_boson_and_exchange(p, space, &t)?;
    for slot in [slots::RES1, slots::RES2] {
        let n = t.fock(slot);
        let quad = annihilation(n) + creation(n);
        h += &scaled(&embed_product(&[(slots::QUBIT, &sz), (slot, &quad)], space)?, p.g_fr);
    }
    Ok(h)
}

/// Σ_j [G_nvf (b_j† + b_j) σ_z + G_nvr (b_j† a_j + a_j† b_j)].
fn spin_boson_and_exchange(p: &ModelParams, space: &HilbertSpace, t: &Truncations) -> Result<ComplexMatrix> {
    let sz = pauli(Pauli::Z);
    let mut h = ComplexMatrix::zeros((space.total_dim(), space.total_dim()));
    for (nve, res) in [(slots::NVE1, slots::RES1), (slots::NVE2, slots::RES2)] {
        let (nb, na) = (t.fock(nve), t.fock(res));
        let quad = annihilation(nb) + creation(nb);
        h += &scaled(&embed_product(&[(nve, &quad), (slots::QUBIT, &sz)], space)?, p.g_nvf);
        let hop = embed_product(&[(nve, &creation(nb)), (res, &annihilation(na))], space)?;
        h += &scaled(&(&hop + &dagger(&hop)), p.g_nvr);
    }
    Ok(h)
}

/// Interaction-frame Hamiltonian split as H(t) = H₀ + e^{-iω t} K + e^{iω t} K†.
#[derive(Debug, Clone)]
pub struct InteractionHamiltonian {
    pub static_part: ComplexMatrix,
    /// K = G_fr Σ_k a_k†² σ_z.
    pub raising_part: ComplexMatrix,
    pub omega: f64,
}

impl InteractionHamiltonian {
    pub fn at(&self, t: f64) -> ComplexMatrix {
        let ph = C64::from_polar(1.0, -self.omega * t);
        let k = self.raising_part.mapv(|z| z * ph);
        &self.static_part + &k + &dagger(&k)
    }
}

/// Builds the two pieces of H_int:
///
/// Σ_j [G_nvf (b_j† + b_j) σ_z + G_nvr (b_j† a_j + a_j† b_j)]
/// + Σ_k G_fr (a_k†² e^{-iω_q t} + a_k² e^{iω_q t}) σ_z
pub fn interaction_hamiltonian(p: &ModelParams, space: &HilbertSpace) -> Result<InteractionHamiltonian> {
    let t = check_layout(space)?;
    let static_part = spin_boson_and_exchange(p, space, &t)?;
    let sz = pauli(Pauli::Z);
    let mut raising = ComplexMatrix::zeros((space.total_dim(), space.total_dim()));
    for slot in [slots::RES1, slots::RES2] {
        let ad = creation(t.fock(slot));
        let ad2 = ad.dot(&ad);
        raising += &scaled(&embed_product(&[(slots::QUBIT, &sz), (slot, &ad2)], space)?, p.g_fr);
    }
    Ok(InteractionHamiltonian {
        static_part,
        raising_part: raising,
        omega: p.omega_q(),
    })
}

/// H_int at time `t` (ns).
pub fn build_h_int(p: &ModelParams, space: &HilbertSpace, t: f64) -> Result<ComplexMatrix> {
    Ok(interaction_hamiltonian(p, space)?.at(t))
}

/// One term `rate · D[op]` of the master equation.
#[derive(Debug, Clone)]
pub struct CollapseOp {
    pub label: String,
    pub rate: f64,
    pub op: ComplexMatrix,
}

/// Collapse set
/// γ₁D[b₁] + γ₂D[b₂] + ΛD[σ±] + Σ_k κ(n̄+1)D[a_k] + κn̄ D[a_k†].
pub fn build_collapse_set(p: &ModelParams, space: &HilbertSpace) -> Result<Vec<CollapseOp>> {
    let t = check_layout(space)?;
    let entry = |label: &str, rate: f64, local: ComplexMatrix, slot: usize| -> Result<CollapseOp> {
        Ok(CollapseOp {
            label: label.to_string(),
            rate,
            op: embed(&local, slot, space)?,
        })
    };
    let mut out = vec![
        entry("b1", p.gamma1, annihilation(t.fock(slots::NVE1)), slots::NVE1)?,
        entry("b2", p.gamma2, annihilation(t.fock(slots::NVE2)), slots::NVE2)?,
    ];
    let lam = p.qubit_rate;
    match p.qubit_dissipator_mode {
        QubitDissipatorMode::Lowering => out.push(entry("sigma_minus", lam, pauli(Pauli::Minus), slots::QUBIT)?),
        QubitDissipatorMode::Raising => out.push(entry("sigma_plus", lam, pauli(Pauli::Plus), slots::QUBIT)?),
        QubitDissipatorMode::Both => {
            out.push(entry("sigma_minus", lam, pauli(Pauli::Minus), slots::QUBIT)?);
            out.push(entry("sigma_plus", lam, pauli(Pauli::Plus), slots::QUBIT)?);
        }
        QubitDissipatorMode::Dephasing => out.push(entry("sigma_z", lam, pauli(Pauli::Z), slots::QUBIT)?),
    }
    for (slot, label, w) in [(slots::RES1, "a1", p.omega_r1), (slots::RES2, "a2", p.omega_r2)] {
        let nth = n_thermal(p, w)?;
        let n = t.fock(slot);
        out.push(entry(label, p.kappa * (nth + 1.0), annihilation(n), slot)?);
        out.push(entry(&format!("{label}_dag"), p.kappa * nth, creation(n), slot)?);
    }
    Ok(out)
}

/// (-1)^{total boson number} ⊗ 1_qubit.
pub fn boson_parity(space: &HilbertSpace) -> Result<ComplexMatrix> {
    let t = check_layout(space)?;
    let par: Vec<ComplexMatrix> = [slots::NVE1, slots::NVE2, slots::RES1, slots::RES2]
        .iter()
        .map(|&s| crate::operators::parity(t.fock(s)))
        .collect();
    embed_product(
        &[
            (slots::NVE1, &par[0]),
            (slots::NVE2, &par[1]),
            (slots::RES1, &par[2]),
            (slots::RES2, &par[3]),
        ],
        space,
    )
}
