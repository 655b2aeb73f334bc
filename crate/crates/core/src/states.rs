//! Coherent states, two-mode cat states and the full initial state.
//!
//! Cat normalization is always computed from the constructed vector. The
//! closed-form normalization constants are kept as [`reference_norm_cscs`]
//! and [`reference_norm_sscs`] so they can be compared against it.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, kron_with_limit, outer, ComplexMatrix, C64};
use crate::model::{slots, Truncations};
use crate::operators::{bogoliubov_params, two_mode_squeeze, FockTruncation};
use crate::space::HilbertSpace;

/// Leakage (population of the two highest Fock levels) above which a
/// truncation warning is emitted.
pub const LEAKAGE_WARN: f64 = 1e-4;

const MIN_NORM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParitySign {
    #[serde(alias = "+", alias = "even")]
    Plus,
    #[serde(alias = "-", alias = "odd")]
    Minus,
}

impl ParitySign {
    pub fn sign(self) -> f64 {
        match self {
            ParitySign::Plus => 1.0,
            ParitySign::Minus => -1.0,
        }
    }
}

/// Parameters of a two-mode cat: (|α₁,α₂⟩ ± e^{iφ}|-α₁,-α₂⟩), optionally squeezed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatSpec {
    pub alpha1: C64,
    pub alpha2: C64,
    /// Relative phase φ between the two branches, radians.
    pub cat_phase: f64,
    pub parity: ParitySign,
    /// Two-mode squeezing ξ = r e^{iφ_s}; `None` gives a coherent cat.
    pub squeeze: Option<C64>,
}

impl CatSpec {
    pub fn coherent(alpha: f64, parity: ParitySign) -> Self {
        Self {
            alpha1: c(alpha, 0.0),
            alpha2: c(alpha, 0.0),
            cat_phase: 0.0,
            parity,
            squeeze: None,
        }
    }

    pub fn squeezed(alpha: f64, parity: ParitySign, r: f64, squeeze_phase: f64) -> Self {
        Self {
            squeeze: Some(C64::from_polar(r, squeeze_phase)),
            ..Self::coherent(alpha, parity)
        }
    }

    /// Branch weight ±e^{iφ}.
    pub fn branch_coefficient(&self) -> C64 {
        C64::from_polar(1.0, self.cat_phase) * self.parity.sign()
    }
}

/// Normalized pure state on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub space: HilbertSpace,
    pub amplitudes: Array1<C64>,
}

impl StateVector {
    /// Normalizes `amplitudes`; fails on a vanishing norm.
    pub fn new(space: HilbertSpace, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::Shape(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                space.total_dim()
            )));
        }
        let norm = l2_norm(&amplitudes);
        if norm < MIN_NORM {
            return Err(Error::VanishingNorm { norm });
        }
        Ok(Self {
            space,
            amplitudes: amplitudes.mapv(|z| z / norm),
        })
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        outer(&self.amplitudes, &self.amplitudes)
    }

    /// Population in the top two Fock levels of `slot`.
    pub fn leakage(&self, slot: usize) -> f64 {
        let dims = self.space.dims();
        let d = dims[slot];
        let stride: usize = dims[slot + 1..].iter().product();
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i / stride) % d + 2 >= d)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    fn warn_on_leakage(&self, what: &str) {
        for slot in 0..self.space.n_slots() {
            let leak = self.leakage(slot);
            if leak > LEAKAGE_WARN {
                log::warn!(
                    "{what}: {leak:.3e} of the population sits in the top two levels of slot `{}`",
                    self.space.labels()[slot]
                );
            }
        }
    }
}

pub(crate) fn l2_norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Truncated Fock coefficients of D(α)|0⟩, not renormalized.
fn coherent_coefficients(alpha: C64, n: FockTruncation) -> Array1<C64> {
    let mut v = Array1::zeros(n.levels());
    let mut coef = c((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for k in 0..n.levels() {
        v[k] = coef;
        coef = coef * alpha / ((k + 1) as f64).sqrt();
    }
    v
}

/// |α⟩ = D(α)|0⟩ on a truncated mode, renormalized after truncation.
pub fn coherent(alpha: C64, n: FockTruncation) -> Result<StateVector> {
    let space = HilbertSpace::new([n.levels()], ["a"])?;
    let st = StateVector::new(space, coherent_coefficients(alpha, n))?;
    st.warn_on_leakage("coherent state");
    Ok(st)
}

fn two_mode_product(x: &Array1<C64>, y: &Array1<C64>) -> Array1<C64> {
    Array1::from_iter(x.iter().flat_map(|&a| y.iter().map(move |&b| a * b)))
}

fn two_mode_space(n1: FockTruncation, n2: FockTruncation) -> Result<HilbertSpace> {
    HilbertSpace::new([n1.levels(), n2.levels()], ["a1", "a2"])
}

/// The two unnormalized branches |β₁,β₂⟩ and |-β₁,-β₂⟩ of a cat, after
/// squeezing when the spec carries one. For a coherent cat β = α.
pub fn cat_branches(
    spec: &CatSpec,
    n1: FockTruncation,
    n2: FockTruncation,
) -> Result<(Array1<C64>, Array1<C64>)> {
    let (b1, b2) = match spec.squeeze {
        Some(xi) => {
            let (mu, nu) = bogoliubov_params(xi);
            (
                mu * spec.alpha1 + nu * spec.alpha1.conj(),
                mu * spec.alpha2 + nu * spec.alpha2.conj(),
            )
        }
        None => (spec.alpha1, spec.alpha2),
    };
    let plus = two_mode_product(&coherent_coefficients(b1, n1), &coherent_coefficients(b2, n2));
    let minus = two_mode_product(&coherent_coefficients(-b1, n1), &coherent_coefficients(-b2, n2));
    match spec.squeeze {
        Some(xi) if xi.norm() > 0.0 => {
            let s = two_mode_squeeze(xi, n1, n2)?;
            Ok((s.dot(&plus), s.dot(&minus)))
        }
        _ => Ok((plus, minus)),
    }
}

fn cat_from_branches(spec: &CatSpec, n1: FockTruncation, n2: FockTruncation, what: &str) -> Result<StateVector> {
    let (p, m) = cat_branches(spec, n1, n2)?;
    let w = spec.branch_coefficient();
    let sup = &p + &m.mapv(|z| z * w);
    let st = StateVector::new(two_mode_space(n1, n2)?, sup)?;
    st.warn_on_leakage(what);
    Ok(st)
}

/// Coherent Schrödinger cat (|α₁,α₂⟩ ± e^{iφ}|-α₁,-α₂⟩)/√B.
pub fn cscs(spec: &CatSpec, n1: FockTruncation, n2: FockTruncation) -> Result<StateVector> {
    if spec.squeeze.is_some() {
        return Err(Error::Argument("coherent cat spec must not carry a squeeze".into()));
    }
    cat_from_branches(spec, n1, n2, "coherent cat")
}

/// Squeezed cat S(ξ)(|β₁,β₂⟩ ± e^{iφ}|-β₁,-β₂⟩)/√B̂ with β = μα + να*.
pub fn sscs(spec: &CatSpec, n1: FockTruncation, n2: FockTruncation) -> Result<StateVector> {
    if spec.squeeze.is_none() {
        return Err(Error::Argument("squeezed cat spec needs a squeeze parameter".into()));
    }
    cat_from_branches(spec, n1, n2, "squeezed cat")
}

/// Dispatch on whether the spec is squeezed.
pub fn cat_state(spec: &CatSpec, n1: FockTruncation, n2: FockTruncation) -> Result<StateVector> {
    match spec.squeeze {
        Some(_) => sscs(spec, n1, n2),
        None => cscs(spec, n1, n2),
    }
}

/// Closed-form coherent-cat normalization 2[1 + exp(-2α₁²α₂²) cos φ],
/// with α² read as |α|². Reporting only.
pub fn reference_norm_cscs(spec: &CatSpec) -> f64 {
    let a = spec.alpha1.norm_sqr() * spec.alpha2.norm_sqr();
    2.0 * (1.0 + (-2.0 * a).exp() * spec.cat_phase.cos())
}

/// Closed-form squeezed-cat normalization B̂ evaluated term by term:
///
/// 2[1 + exp((Ξ - 4α₁²α₂² cos²φ_s) / ((μ-ν)(μ*-ν*))) cos φ]
///
/// with Ξ = [α₁(|ν|²+|μ|²-2μν*) - α₁*(|μ|²-|ν|²-2νμ*)]·[same for α₂].
/// Ξ is complex in general; the real part of the exponential is kept.
/// Reporting only.
pub fn reference_norm_sscs(spec: &CatSpec) -> f64 {
    let xi = spec.squeeze.unwrap_or(c(0.0, 0.0));
    let (mu, nu) = bogoliubov_params(xi);
    let squeeze_phase = if xi.norm() > 0.0 { xi.arg() } else { 0.0 };
    let (m2, n2) = (mu.norm_sqr(), nu.norm_sqr());
    let bracket = |a: C64| a * (n2 + m2 - 2.0 * mu * nu.conj()) - a.conj() * (m2 - n2 - 2.0 * nu * mu.conj());
    let big_xi = bracket(spec.alpha1) * bracket(spec.alpha2);
    let a = spec.alpha1.norm_sqr() * spec.alpha2.norm_sqr();
    let denom = (mu - nu) * (mu.conj() - nu.conj());
    let exponent = (big_xi - 4.0 * a * squeeze_phase.cos().powi(2)) / denom;
    2.0 * (1.0 + exponent.exp().re * spec.cat_phase.cos())
}

/// Squared norm of the unnormalized superposition built from the
/// truncated branches; the quantity the closed forms try to predict.
pub fn numerical_norm(spec: &CatSpec, n1: FockTruncation, n2: FockTruncation) -> Result<f64> {
    let (p, m) = cat_branches(spec, n1, n2)?;
    let sup = &p + &m.mapv(|z| z * spec.branch_coefficient());
    Ok(l2_norm(&sup).powi(2))
}

/// (|0⟩+|1⟩)/√2 padded to `levels`.
fn half_pulse(levels: usize) -> Array1<C64> {
    let mut v = Array1::zeros(levels);
    let s = 1.0 / 2f64.sqrt();
    v[0] = c(s, 0.0);
    v[1] = c(s, 0.0);
    v
}

/// |ψ₀⟩ = (|0⟩+|1⟩)/√2 ⊗ (|0⟩+|1⟩)/√2 ⊗ (|↻⟩+|↺⟩)/√2 ⊗ |cat⟩.
pub fn initial_state_vector(cat: &StateVector, space: &HilbertSpace) -> Result<StateVector> {
    let truncs = Truncations::from_space(space)?;
    let expect = [truncs.resonator1(), truncs.resonator2()];
    if cat.space.dims() != expect {
        return Err(Error::Shape(format!(
            "cat lives on {:?} but the resonator slots are {:?}",
            cat.space.dims(),
            expect
        )));
    }
    let mut v = half_pulse(space.dim(slots::NVE1)).insert_axis(ndarray::Axis(1));
    for slot in [slots::NVE2, slots::QUBIT] {
        v = kron_with_limit(&v, &half_pulse(space.dim(slot)).insert_axis(ndarray::Axis(1)), space.max_dim())?;
    }
    let cat_col: Array2<C64> = cat.amplitudes.clone().insert_axis(ndarray::Axis(1));
    let full = kron_with_limit(&v, &cat_col, space.max_dim())?;
    StateVector::new(space.clone(), full.column(0).to_owned())
}

/// ρ(0) = |ψ₀⟩⟨ψ₀|.
pub fn initial_system_state(cat: &StateVector, space: &HilbertSpace) -> Result<ComplexMatrix> {
    Ok(initial_state_vector(cat, space)?.density_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, partial_trace, trace};
    use crate::operators::{embed, number, parity};

    fn ft(n: usize) -> FockTruncation {
        FockTruncation::new(n).unwrap()
    }

    fn expect(op: &ComplexMatrix, v: &Array1<C64>) -> f64 {
        inner(v, &op.dot(v)).re
    }

    fn factorial(k: usize) -> f64 {
        (1..=k).map(|i| i as f64).product()
    }

    #[test]
    fn coherent_vacuum_and_mean() {
        let v = coherent(c(0., 0.), ft(6)).unwrap();
        assert_eq!(v.amplitudes[0], c(1., 0.));
        assert!(v.amplitudes.iter().skip(1).all(|z| z.norm() == 0.0));
        let alpha = 1.3;
        let st = coherent(c(alpha, 0.), ft(20)).unwrap();
        assert!((expect(&number(ft(20)), &st.amplitudes) - alpha * alpha).abs() < 1e-6);
    }

    #[test]
    fn coherent_coefficients_match_poisson_amplitudes() {
        let alpha = c(1.3, 0.4);
        let st = coherent(alpha, ft(20)).unwrap();
        for k in 0..20 {
            let want = (-alpha.norm_sqr() / 2.0).exp() * alpha.powu(k as u32) / factorial(k).sqrt();
            assert!((st.amplitudes[k] - want).norm() < 1e-8, "k = {k}");
        }
    }

    #[test]
    fn even_cat_at_origin_is_vacuum() {
        let spec = CatSpec::coherent(0.0, ParitySign::Plus);
        let st = cscs(&spec, ft(4), ft(4)).unwrap();
        assert!((st.amplitudes[0] - c(1., 0.)).norm() < 1e-14);
    }

    #[test]
    fn odd_cat_at_origin_vanishes() {
        let spec = CatSpec::coherent(0.0, ParitySign::Minus);
        assert!(matches!(cscs(&spec, ft(4), ft(4)), Err(Error::VanishingNorm { .. })));
    }

    #[test]
    fn odd_cat_has_odd_total_parity() {
        // both branches carry photon numbers with n1 + n2 of fixed parity
        let spec = CatSpec::coherent(2.0, ParitySign::Minus);
        let st = cscs(&spec, ft(20), ft(20)).unwrap();
        let space = HilbertSpace::from_dims([20, 20]).unwrap();
        let p = crate::operators::embed_product(&[(0, &parity(ft(20))), (1, &parity(ft(20)))], &space).unwrap();
        assert!((expect(&p, &st.amplitudes) + 1.0).abs() < 1e-10);
        let even = cscs(&CatSpec::coherent(2.0, ParitySign::Plus), ft(20), ft(20)).unwrap();
        assert!((expect(&p, &even.amplitudes) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn branch_overlap_is_gaussian() {
        let spec = CatSpec {
            alpha1: c(1.0, 0.3),
            alpha2: c(0.6, 0.0),
            ..CatSpec::coherent(0.0, ParitySign::Plus)
        };
        let (p, m) = cat_branches(&spec, ft(25), ft(25)).unwrap();
        let want = (-2.0 * (spec.alpha1.norm_sqr() + spec.alpha2.norm_sqr())).exp();
        assert!((inner(&p, &m) - c(want, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn squeezing_off_reproduces_coherent_cat() {
        let coh = cscs(&CatSpec::coherent(1.0, ParitySign::Plus), ft(10), ft(10)).unwrap();
        let sq = sscs(&CatSpec::squeezed(1.0, ParitySign::Plus, 0.0, 0.3), ft(10), ft(10)).unwrap();
        assert!((&coh.amplitudes - &sq.amplitudes).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn squeezing_adds_photons() {
        let space = HilbertSpace::from_dims([20, 20]).unwrap();
        let n1 = embed(&number(ft(20)), 0, &space).unwrap();
        let coh = cscs(&CatSpec::coherent(1.0, ParitySign::Plus), ft(20), ft(20)).unwrap();
        let sq = sscs(&CatSpec::squeezed(1.0, ParitySign::Plus, 0.5, 0.0), ft(20), ft(20)).unwrap();
        assert!((sq.norm() - 1.0).abs() < 1e-10);
        assert!(expect(&n1, &sq.amplitudes) > expect(&n1, &coh.amplitudes));
    }

    #[test]
    fn opposite_parity_cats_are_orthogonal() {
        for alpha in [1.0, 1.5] {
            let p = cscs(&CatSpec::coherent(alpha, ParitySign::Plus), ft(16), ft(16)).unwrap();
            let m = cscs(&CatSpec::coherent(alpha, ParitySign::Minus), ft(16), ft(16)).unwrap();
            assert!(p.inner(&m).norm() < 1e-8);
        }
    }

    #[test]
    fn squeezed_cat_is_continuous_in_r() {
        let coh = cscs(&CatSpec::coherent(1.0, ParitySign::Minus), ft(12), ft(12)).unwrap();
        let sq = sscs(&CatSpec::squeezed(1.0, ParitySign::Minus, 1e-3, 0.7), ft(12), ft(12)).unwrap();
        assert!(l2_norm(&(&coh.amplitudes - &sq.amplitudes)) <= 1e-2);
    }

    #[test]
    fn closed_form_coherent_norm() {
        let spec = CatSpec::coherent(1.0, ParitySign::Plus);
        assert!((reference_norm_cscs(&spec) - 2.0 * (1.0 + (-2f64).exp())).abs() < 1e-12);
        assert!((reference_norm_cscs(&spec) - 2.27067).abs() < 1e-5);
        assert!((reference_norm_cscs(&CatSpec::coherent(0.0, ParitySign::Plus)) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_norm_disagrees_with_overlap() {
        // α₁=α₂=1: printed exponent -2α₁²α₂² = -2, overlap exponent -2(|α₁|²+|α₂|²) = -4
        let spec = CatSpec::coherent(1.0, ParitySign::Plus);
        let numerical = numerical_norm(&spec, ft(25), ft(25)).unwrap();
        assert!((numerical - 2.0 * (1.0 + (-4f64).exp())).abs() < 1e-8);
        let gap = (reference_norm_cscs(&spec) - numerical).abs();
        assert!((gap - 2.0 * ((-2f64).exp() - (-4f64).exp())).abs() < 1e-8);
    }

    #[test]
    fn closed_form_squeezed_norm_reduces_without_squeezing() {
        // ξ = 0: μ=1, ν=0, Ξ = (α₁-α₁*)(α₂-α₂*) = 0 for real α
        let spec = CatSpec::squeezed(1.0, ParitySign::Plus, 0.0, 0.0);
        let want = 2.0 * (1.0 + (-4f64).exp());
        assert!((reference_norm_sscs(&spec) - want).abs() < 1e-12);
    }

    #[test]
    fn initial_state_structure() {
        let truncs = Truncations::new([2, 2, 2, 4, 4]).unwrap();
        let space = truncs.space().unwrap();
        let cat = cscs(&CatSpec::coherent(0.5, ParitySign::Plus), ft(4), ft(4)).unwrap();
        let rho = initial_system_state(&cat, &space).unwrap();
        assert!((trace(&rho) - c(1., 0.)).norm() < 1e-12);
        assert!(max_abs(&(rho.dot(&rho) - &rho)) < 1e-10);
        let red = partial_trace(&rho, &space, &[slots::NVE1]).unwrap();
        assert!(max_abs(&red.mapv(|z| z - c(0.5, 0.0))) < 1e-12);
        let wrong = cscs(&CatSpec::coherent(0.5, ParitySign::Plus), ft(3), ft(4)).unwrap();
        assert!(initial_system_state(&wrong, &space).is_err());
    }

    #[test]
    fn leakage_measures_top_levels() {
        let st = coherent(c(2.0, 0.0), ft(6)).unwrap();
        let manual: f64 = st.amplitudes.iter().skip(4).map(|z| z.norm_sqr()).sum();
        assert!((st.leakage(0) - manual).abs() < 1e-15);
        assert!(st.leakage(0) > LEAKAGE_WARN);
    }
}
