//! Truncated bosonic and qubit operators and their embedding into a
//! composite space.
//!
//! Qubit basis: index 0 is the clockwise persistent-current state |↻⟩,
//! index 1 the anticlockwise state |↺⟩, so σ_z = diag(1, -1).

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, expm, identity, kron_with_limit, matmul, ComplexMatrix, C64};
use crate::space::HilbertSpace;

/// Number of retained Fock levels |0⟩..|n-1⟩, at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct FockTruncation(usize);

impl FockTruncation {
    pub fn new(n_levels: usize) -> Result<Self> {
        if n_levels < 2 {
            return Err(Error::Argument(format!(
                "Fock truncation needs at least 2 levels, got {n_levels}"
            )));
        }
        Ok(Self(n_levels))
    }

    pub fn levels(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for FockTruncation {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<FockTruncation> for usize {
    fn from(t: FockTruncation) -> usize {
        t.0
    }
}

/// a with a|k⟩ = √k |k-1⟩.
pub fn annihilation(n: FockTruncation) -> ComplexMatrix {
    let n = n.levels();
    let mut a = Array2::zeros((n, n));
    for k in 1..n {
        a[[k - 1, k]] = c((k as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation(n: FockTruncation) -> ComplexMatrix {
    annihilation(n).reversed_axes()
}

pub fn number(n: FockTruncation) -> ComplexMatrix {
    Array2::from_diag(&ndarray::Array1::from_iter(
        (0..n.levels()).map(|k| c(k as f64, 0.0)),
    ))
}

/// diag((-1)^k).
pub fn parity(n: FockTruncation) -> ComplexMatrix {
    Array2::from_diag(&ndarray::Array1::from_iter(
        (0..n.levels()).map(|k| c(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)),
    ))
}

/// |k⟩⟨k| on a truncated mode.
pub fn fock_projector(n: FockTruncation, k: usize) -> ComplexMatrix {
    let mut p = Array2::zeros((n.levels(), n.levels()));
    p[[k, k]] = c(1.0, 0.0);
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pauli {
    X,
    Y,
    Z,
    /// σ+ = |↻⟩⟨↺|
    Plus,
    /// σ- = |↺⟩⟨↻|
    Minus,
}

pub fn pauli(which: Pauli) -> ComplexMatrix {
    let (o, l, i) = (c(0., 0.), c(1., 0.), c(0., 1.));
    match which {
        Pauli::X => ndarray::array![[o, l], [l, o]],
        Pauli::Y => ndarray::array![[o, -i], [i, o]],
        Pauli::Z => ndarray::array![[l, o], [o, -l]],
        Pauli::Plus => ndarray::array![[o, l], [o, o]],
        Pauli::Minus => ndarray::array![[o, o], [l, o]],
    }
}

/// Place `op` on `slot`, identity elsewhere.
pub fn embed(op: &ComplexMatrix, slot: usize, space: &HilbertSpace) -> Result<ComplexMatrix> {
    embed_product(&[(slot, op)], space)
}

/// Tensor product of single-slot factors, identity on unlisted slots.
///
/// Equivalent to the product of the individual embeddings, but built
/// directly as one Kronecker chain.
pub fn embed_product(factors: &[(usize, &ComplexMatrix)], space: &HilbertSpace) -> Result<ComplexMatrix> {
    let slots: Vec<usize> = factors.iter().map(|(s, _)| *s).collect();
    if !slots.is_empty() {
        space.check_slots(&slots)?;
    }
    for &(slot, op) in factors {
        let d = space.dim(slot);
        if op.dim() != (d, d) {
            return Err(Error::Argument(format!(
                "operator of shape {:?} does not fit slot {slot} ({}) of dimension {d}",
                op.dim(),
                space.labels()[slot]
            )));
        }
    }
    let mut out = identity(1);
    let mut pending_identity = 1usize;
    for slot in 0..space.n_slots() {
        match factors.iter().find(|(s, _)| *s == slot) {
            Some((_, op)) => {
                if pending_identity > 1 {
                    out = kron_with_limit(&out, &identity(pending_identity), space.max_dim())?;
                    pending_identity = 1;
                }
                out = kron_with_limit(&out, op, space.max_dim())?;
            }
            None => pending_identity *= space.dim(slot),
        }
    }
    if pending_identity > 1 {
        out = kron_with_limit(&out, &identity(pending_identity), space.max_dim())?;
    }
    Ok(out)
}

/// Place an operator acting on the contiguous slots `first..first+k` of
/// `space`, where `k` is inferred from the operator dimension.
pub fn embed_block(op: &ComplexMatrix, first: usize, space: &HilbertSpace) -> Result<ComplexMatrix> {
    let d = op.nrows();
    if op.ncols() != d {
        return Err(Error::Shape("block operator must be square".into()));
    }
    let mut covered = 1usize;
    let mut last = first;
    while covered < d && last < space.n_slots() {
        covered *= space.dim(last);
        last += 1;
    }
    if covered != d || first >= space.n_slots() {
        return Err(Error::Argument(format!(
            "operator dimension {d} does not match any slot run starting at {first}"
        )));
    }
    let before: usize = space.dims()[..first].iter().product();
    let after: usize = space.dims()[last..].iter().product();
    let left = kron_with_limit(&identity(before), op, space.max_dim())?;
    kron_with_limit(&left, &identity(after), space.max_dim())
}

/// D(α) = exp(α a† - α* a) on the truncated mode.
///
/// Warns when |α|² exceeds a quarter of the truncation, where edge effects
/// start to dominate.
pub fn displacement(alpha: C64, n: FockTruncation) -> Result<ComplexMatrix> {
    if alpha.norm_sqr() > n.levels() as f64 / 4.0 {
        log::warn!(
            "displacement |alpha|^2 = {:.3} is large for a {}-level truncation",
            alpha.norm_sqr(),
            n.levels()
        );
    }
    let a = annihilation(n);
    let ad = creation(n);
    let gen = ad.mapv(|z| z * alpha) - a.mapv(|z| z * alpha.conj());
    expm(&gen)
}

/// Two-mode squeezer S(ξ) = exp(ξ a₁†a₂† - ξ* a₁a₂) on the (n1 ⊗ n2) space.
pub fn two_mode_squeeze(xi: C64, n1: FockTruncation, n2: FockTruncation) -> Result<ComplexMatrix> {
    if xi.norm() > 1.5 {
        log::warn!("two-mode squeezing r = {:.3} is large for default truncations", xi.norm());
    }
    let space = HilbertSpace::from_dims([n1.levels(), n2.levels()])?;
    let a1 = embed(&annihilation(n1), 0, &space)?;
    let a2 = embed(&annihilation(n2), 1, &space)?;
    let pair = matmul(&a1, &a2);
    let pair_dag = crate::linalg::dagger(&pair);
    let gen = pair_dag.mapv(|z| z * xi) - pair.mapv(|z| z * xi.conj());
    expm(&gen)
}

/// Bogoliubov coefficients for ξ = r e^{iφ}: μ = cosh r, ν = e^{iφ} sinh r.
pub fn bogoliubov_params(xi: C64) -> (C64, C64) {
    let r = xi.norm();
    let phase = if r > 0.0 { xi / r } else { c(1.0, 0.0) };
    (c(r.cosh(), 0.0), phase * r.sinh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, max_abs};
    use crate::testutil::{random_hermitian, random_matrix, rng};
    use ndarray::Array1;

    fn ft(n: usize) -> FockTruncation {
        FockTruncation::new(n).unwrap()
    }

    fn vacuum(n: usize) -> Array1<C64> {
        let mut v = Array1::zeros(n);
        v[0] = c(1.0, 0.0);
        v
    }

    fn expect(op: &ComplexMatrix, v: &Array1<C64>) -> C64 {
        v.mapv(|z| z.conj()).dot(&op.dot(v))
    }

    #[test]
    fn truncation_rejects_single_level() {
        assert!(FockTruncation::new(1).is_err());
        assert!(serde_json::from_str::<FockTruncation>("1").is_err());
        assert_eq!(serde_json::from_str::<FockTruncation>("6").unwrap().levels(), 6);
    }

    #[test]
    fn ladder_matrices() {
        let a = annihilation(ft(2));
        assert_eq!(a, ndarray::array![[c(0., 0.), c(1., 0.)], [c(0., 0.), c(0., 0.)]]);
        let n = creation(ft(4)).dot(&annihilation(ft(4)));
        assert!(max_abs(&(n - number(ft(4)))) < 1e-15);
    }

    #[test]
    fn commutator_has_truncation_corner() {
        let n = 5;
        let a = annihilation(ft(n));
        let ad = creation(ft(n));
        let comm = a.dot(&ad) - ad.dot(&a);
        let mut expected = identity(n);
        expected[[n - 1, n - 1]] = c(1.0 - n as f64, 0.0);
        assert!(max_abs(&(comm - expected)) < 1e-14);
    }

    #[test]
    fn pauli_relations() {
        assert_eq!(pauli(Pauli::Z), ndarray::array![[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]]);
        let pm = pauli(Pauli::Plus).dot(&pauli(Pauli::Minus));
        assert_eq!(pm, ndarray::array![[c(1., 0.), c(0., 0.)], [c(0., 0.), c(0., 0.)]]);
        assert_eq!(pauli(Pauli::X), pauli(Pauli::Plus) + pauli(Pauli::Minus));
        let xy = pauli(Pauli::X).dot(&pauli(Pauli::Y));
        assert!(max_abs(&(xy - pauli(Pauli::Z).mapv(|z| z * C64::i()))) < 1e-15);
    }

    #[test]
    fn embed_identity_and_definition() {
        let space = HilbertSpace::from_dims([2, 3]).unwrap();
        assert_eq!(embed(&identity(3), 1, &space).unwrap(), identity(6));
        let mut r = rng(20);
        let a = random_matrix(&mut r, 2);
        let want = crate::linalg::kron(&a, &identity(3)).unwrap();
        assert_eq!(embed(&a, 0, &space).unwrap(), want);
        assert!(embed(&a, 1, &space).is_err());
    }

    #[test]
    fn disjoint_embeddings_commute() {
        let space = HilbertSpace::from_dims([2, 3, 2]).unwrap();
        let mut r = rng(21);
        let a = embed(&random_matrix(&mut r, 2), 0, &space).unwrap();
        let b = embed(&random_matrix(&mut r, 3), 1, &space).unwrap();
        assert!(max_abs(&(a.dot(&b) - b.dot(&a))) < 1e-14);
    }

    #[test]
    fn embed_product_equals_product_of_embeddings() {
        let space = HilbertSpace::from_dims([2, 3, 2]).unwrap();
        let mut r = rng(22);
        let x = random_matrix(&mut r, 2);
        let y = random_matrix(&mut r, 2);
        let joint = embed_product(&[(2, &y), (0, &x)], &space).unwrap();
        let prod = embed(&x, 0, &space).unwrap().dot(&embed(&y, 2, &space).unwrap());
        assert!(max_abs(&(joint - prod)) < 1e-14);
    }

    #[test]
    fn embed_preserves_hermiticity_and_unitarity() {
        let space = HilbertSpace::from_dims([3, 2, 2]).unwrap();
        let mut r = rng(23);
        let h = random_hermitian(&mut r, 2);
        let e = embed(&h, 1, &space).unwrap();
        assert!(crate::linalg::hermitian_asymmetry(&e) < 1e-15);
        let u = expm(&h.mapv(|z| z * C64::i())).unwrap();
        let eu = embed(&u, 2, &space).unwrap();
        assert!(max_abs(&(dagger(&eu).dot(&eu) - identity(12))) < 1e-12);
    }

    #[test]
    fn embed_block_places_two_slot_operator() {
        let space = HilbertSpace::from_dims([2, 3, 2, 2]).unwrap();
        let mut r = rng(24);
        let blk = random_matrix(&mut r, 6);
        let got = embed_block(&blk, 1, &space).unwrap();
        let want = crate::linalg::kron(
            &crate::linalg::kron(&identity(2), &blk).unwrap(),
            &identity(2),
        )
        .unwrap();
        assert_eq!(got, want);
        assert!(embed_block(&blk, 2, &space).is_err());
    }

    #[test]
    fn displacement_cases() {
        let d0 = displacement(c(0., 0.), ft(8)).unwrap();
        assert!(max_abs(&(d0 - identity(8))) < 1e-14);
        let d1 = displacement(c(1., 0.), ft(20)).unwrap();
        assert!((d1[[0, 0]].re - (-0.5f64).exp()).abs() < 1e-6);
        let alpha = c(1.5, 0.0);
        let p = displacement(alpha, ft(20))
            .unwrap()
            .dot(&displacement(-alpha, ft(20)).unwrap());
        assert!(max_abs(&(p - identity(20))) < 1e-8);
        let d = displacement(c(0.7, -0.4), ft(20)).unwrap();
        assert!(max_abs(&(dagger(&d).dot(&d) - identity(20))) < 1e-8);
    }

    #[test]
    fn squeezer_cases() {
        let s0 = two_mode_squeeze(c(0., 0.), ft(4), ft(4)).unwrap();
        assert!(max_abs(&(s0 - identity(16))) < 1e-14);
        let r = 0.5;
        let s = two_mode_squeeze(c(r, 0.), ft(20), ft(20)).unwrap();
        let psi = s.dot(&vacuum(400));
        let space = HilbertSpace::from_dims([20, 20]).unwrap();
        let n1 = embed(&number(ft(20)), 0, &space).unwrap();
        let n2 = embed(&number(ft(20)), 1, &space).unwrap();
        let m1 = expect(&n1, &psi).re;
        let m2 = expect(&n2, &psi).re;
        assert!((m1 - r.sinh().powi(2)).abs() < 1e-4);
        assert!((m1 - m2).abs() < 1e-8);
        assert!(max_abs(&(dagger(&s).dot(&s) - identity(400))) < 1e-8);
    }

    #[test]
    fn bogoliubov_cases() {
        assert_eq!(bogoliubov_params(c(0., 0.)), (c(1., 0.), c(0., 0.)));
        let (mu, nu) = bogoliubov_params(C64::from_polar(0.5, std::f64::consts::PI));
        assert!((mu.re - 1.12763).abs() < 1e-5 && mu.im == 0.0);
        assert!((nu.re + 0.52110).abs() < 1e-5 && nu.im.abs() < 1e-12);
    }

    #[test]
    fn parity_cases() {
        assert_eq!(parity(ft(2)), pauli(Pauli::Z));
        let p = parity(ft(7));
        assert_eq!(p.dot(&p), identity(7));
        // <P> on |α=1⟩ is e^{-2}
        let coh = displacement(c(1., 0.), ft(20)).unwrap().dot(&vacuum(20));
        assert!((expect(&parity(ft(20)), &coh).re - (-2f64).exp()).abs() < 1e-5);
    }

    proptest::proptest! {
        #[test]
        fn bogoliubov_unit_determinant(r in 0.0f64..2.0, phi in -3.2f64..3.2) {
            let (mu, nu) = bogoliubov_params(C64::from_polar(r, phi));
            proptest::prop_assert!((mu.norm_sqr() - nu.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }
}
