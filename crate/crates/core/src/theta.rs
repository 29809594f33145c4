//! Finite theta groups `Θ(δ)` with scalars in `Z/m` (exponents of an `m`-th
//! root of unity) and the embedding of a non-degenerate cyclic-centre
//! Heisenberg group into `Θ(δ(μ))`.

use std::sync::Arc;

use num_integer::Integer;
use serde::Serialize;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::finabel::{Character, FinAbElem, FinAbGroup, FinAbHom};
use crate::heisenberg::{BilinearPairing, CentralByAbelianExt, CheckReport, HeisenbergGroup};
use crate::table::{find_hom_violation, FiniteGroup, ProductGroup};

/// `d_t | … | d_1`, every entry at least 2; `char_exclusion = Some(p)` records
/// that the characteristic `p` does not divide `d_t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AdmissibleTuple {
    pub entries: Vec<u64>,
    pub char_exclusion: Option<u64>,
}

impl AdmissibleTuple {
    pub fn new(entries: Vec<u64>, char_exclusion: Option<u64>) -> Result<Self> {
        FinAbGroup::new(entries.clone())?;
        if let Some(p) = char_exclusion {
            if !is_prime(p) {
                return Err(Error::InvalidInput(format!("characteristic {p} is not prime")));
            }
            if let Some(&dt) = entries.last() {
                if dt % p == 0 {
                    return Err(Error::Coprimality {
                        p,
                        order: dt as u128,
                    });
                }
            }
        }
        Ok(AdmissibleTuple {
            entries,
            char_exclusion,
        })
    }

    /// The empty tuple stands for the trivial degree-one case and is not
    /// admissible in the strict sense (`d_1 > 1` fails).
    pub fn is_empty_case(&self) -> bool {
        self.entries.is_empty()
    }

    /// `K(δ) = ⊕ Z/d_i`.
    pub fn group(&self) -> FinAbGroup {
        FinAbGroup::new(self.entries.clone()).expect("validated on construction")
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// `(∏ d_i, (∏ d_i)²)`.
pub fn mumford_degree(delta: &AdmissibleTuple) -> (u128, u128) {
    let d: u128 = delta.entries.iter().map(|&x| x as u128).product();
    (d, d * d)
}

/// `(c, b, χ)` with `c ∈ Z/m`, `b ∈ K(δ)`, `χ ∈ Hom(K(δ), Z/m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ThetaElem {
    pub scalar: u64,
    pub b: FinAbElem,
    pub chi: Character,
}

/// `Θ(δ)` with a fixed scalar modulus `m`, a multiple of `d_1`.
///
/// As a [`FiniteGroup`], `(c, b, χ)` has index `c + m·(b + |K|·k)` where
/// `χ = Σ k_i·(m/d_i)·x_i` and `k` is read as an element of `K(δ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaGroup {
    delta: AdmissibleTuple,
    k: FinAbGroup,
    modulus: u64,
}

impl ThetaGroup {
    pub fn new(delta: AdmissibleTuple, modulus: u64) -> Result<Self> {
        let k = delta.group();
        if modulus == 0 || modulus % k.exponent() != 0 {
            return Err(Error::InvalidInput(format!(
                "scalar modulus {modulus} is not a multiple of {}",
                k.exponent()
            )));
        }
        Ok(ThetaGroup { delta, k, modulus })
    }

    pub fn delta(&self) -> &AdmissibleTuple {
        &self.delta
    }

    pub fn k_group(&self) -> &FinAbGroup {
        &self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The sequence `1 → Z/m → Θ(δ) → K(δ) × K(δ)^ → 1`, with the character
    /// group indexed like `K(δ)`.
    pub fn extension(self: &Arc<Self>) -> CentralByAbelianExt {
        let m = self.modulus as usize;
        let k: Arc<dyn FiniteGroup> = Arc::new(self.k.clone());
        let quotient = ProductGroup::new(vec![k.clone(), k]);
        CentralByAbelianExt {
            kernel: Arc::new(FinAbGroup::cyclic(self.modulus)),
            total: self.clone(),
            quotient: Arc::new(quotient),
            inject: (0..m).collect(),
            project: (0..self.order()).map(|x| x / m).collect(),
        }
    }

    pub fn identity_elem(&self) -> ThetaElem {
        ThetaElem {
            scalar: 0,
            b: self.k.zero(),
            chi: Character::trivial(&self.k, self.modulus),
        }
    }

    pub fn elem(&self, scalar: i64, b: &[i64], chi: &[u64]) -> Result<ThetaElem> {
        Ok(ThetaElem {
            scalar: scalar.rem_euclid(self.modulus as i64) as u64,
            b: self.k.elem(b)?,
            chi: Character::new(self.k.clone(), self.modulus, chi.to_vec())?,
        })
    }

    fn owns(&self, x: &ThetaElem) -> bool {
        x.b.group() == &self.k && x.chi.domain == self.k && x.chi.modulus == self.modulus
    }

    fn chi_index(&self, chi: &Character) -> usize {
        let coords: Vec<i64> = chi
            .exponents
            .iter()
            .zip(self.k.factors())
            .map(|(&e, &d)| (e / (self.modulus / d)) as i64)
            .collect();
        self.k.index_of(&self.k.elem(&coords).expect("rank matches"))
    }

    fn chi_at(&self, idx: usize) -> Character {
        let coords = self.k.elem_at(idx);
        Character {
            domain: self.k.clone(),
            modulus: self.modulus,
            exponents: coords
                .coords()
                .iter()
                .zip(self.k.factors())
                .map(|(&c, &d)| c * (self.modulus / d))
                .collect(),
        }
    }

    pub fn index_of(&self, x: &ThetaElem) -> usize {
        let nk = self.k.order() as usize;
        x.scalar as usize
            + self.modulus as usize * (self.k.index_of(&x.b) + nk * self.chi_index(&x.chi))
    }

    pub fn elem_at(&self, idx: usize) -> ThetaElem {
        let m = self.modulus as usize;
        let nk = self.k.order() as usize;
        ThetaElem {
            scalar: (idx % m) as u64,
            b: self.k.elem_at((idx / m) % nk),
            chi: self.chi_at(idx / (m * nk)),
        }
    }
}

/// `(c + c' + χ'(b), b + b', χ + χ')`.
pub fn theta_mul(g: &ThetaGroup, x: &ThetaElem, y: &ThetaElem) -> Result<ThetaElem> {
    if !g.owns(x) || !g.owns(y) {
        return Err(Error::GroupMismatch("element of a different theta group".into()));
    }
    Ok(theta_mul_unchecked(g, x, y))
}

fn theta_mul_unchecked(g: &ThetaGroup, x: &ThetaElem, y: &ThetaElem) -> ThetaElem {
    let m = g.modulus;
    ThetaElem {
        scalar: (x.scalar + y.scalar + y.chi.eval(&x.b)) % m,
        b: x.b.add_unchecked(&y.b),
        chi: x.chi.add_unchecked(&y.chi),
    }
}

/// `(χ(b) − c, −b, −χ)`.
pub fn theta_inv(g: &ThetaGroup, x: &ThetaElem) -> ThetaElem {
    let m = g.modulus;
    ThetaElem {
        scalar: (x.chi.eval(&x.b) + m - x.scalar % m) % m,
        b: x.b.neg(),
        chi: x.chi.neg(),
    }
}

/// `c ↦ (c, 0, 1)`.
pub fn iota_delta(g: &ThetaGroup, scalar: i64) -> ThetaElem {
    ThetaElem {
        scalar: scalar.rem_euclid(g.modulus as i64) as u64,
        ..g.identity_elem()
    }
}

/// `(c, b, χ) ↦ (b, χ)`.
pub fn pi_delta(x: &ThetaElem) -> (FinAbElem, Character) {
    (x.b.clone(), x.chi.clone())
}

impl FiniteGroup for ThetaGroup {
    fn order(&self) -> usize {
        let nk = self.k.order() as usize;
        self.modulus as usize * nk * nk
    }
    fn identity(&self) -> usize {
        0
    }
    fn mul(&self, x: usize, y: usize) -> usize {
        let p = theta_mul_unchecked(self, &self.elem_at(x), &self.elem_at(y));
        self.index_of(&p)
    }
    fn inv(&self, x: usize) -> usize {
        self.index_of(&theta_inv(self, &self.elem_at(x)))
    }
    fn generators(&self) -> Vec<usize> {
        let mut gens = vec![];
        if self.modulus > 1 {
            gens.push(self.index_of(&iota_delta(self, 1)));
        }
        for i in 0..self.k.rank() {
            let mut x = self.identity_elem();
            x.b = self.k.gen(i);
            gens.push(self.index_of(&x));
            let mut y = self.identity_elem();
            y.chi.exponents[i] = self.modulus / self.k.factors()[i];
            gens.push(self.index_of(&y));
        }
        gens
    }
}

/// Data of the embedding `H(μ) → Θ(δ(μ))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParametrisationWitness {
    pub delta: AdmissibleTuple,
    pub modulus: u64,
    /// `C → Z/m`, the embedding used inside `γ`.
    pub kappa: FinAbHom,
    /// Left vertical map of the diagram, `c ↦ κ(c)⁻¹`. With `γ` inverting the
    /// whole triple, `γ(0,0,c) = ι_δ(κ(c)⁻¹)`, so this is the map that makes
    /// the left square commute.
    pub kappa_mu: FinAbHom,
    /// `A → K(δ)`.
    pub lambda1: FinAbHom,
    /// `λ2(a_i)` for each canonical generator `a_i` of `A`.
    pub lambda2: Vec<Character>,
    /// `γ` on the generators `(a_i,0,0)`, `(0,b_j,0)`, `(0,0,c_k)` in that order.
    pub gamma_images: Vec<ThetaElem>,
}

impl ParametrisationWitness {
    pub fn theta_group(&self) -> Result<ThetaGroup> {
        ThetaGroup::new(self.delta.clone(), self.modulus)
    }

    /// `λ2(a) = Σ a_i λ2(a_i)`.
    pub fn lambda2_apply(&self, a: &FinAbElem) -> Character {
        let k = self.lambda1.codomain.clone();
        let mut chi = Character::trivial(&k, self.modulus);
        for (&ai, img) in a.coords().iter().zip(&self.lambda2) {
            chi = chi.add_unchecked(&img.scale(ai as i64));
        }
        chi
    }

    /// `γ(a,b,c) = (κ(c), λ1(b), λ2(a))⁻¹`.
    pub fn gamma(&self, g: &ThetaGroup, a: &FinAbElem, b: &FinAbElem, c: &FinAbElem) -> ThetaElem {
        let kc = self.kappa.apply(c);
        let scalar = kc.coords().first().copied().unwrap_or(0);
        theta_inv(
            g,
            &ThetaElem {
                scalar,
                b: self.lambda1.apply(b),
                chi: self.lambda2_apply(a),
            },
        )
    }

    /// `λ_μ(a, b) = (−λ1(b), −λ2(a))`.
    pub fn lambda_mu(&self, a: &FinAbElem, b: &FinAbElem) -> (FinAbElem, Character) {
        (self.lambda1.apply(b).neg(), self.lambda2_apply(a).neg())
    }
}

/// Scalar modulus `lcm(|C|, d_1)`.
pub fn theta_modulus(c_order: u64, delta: &AdmissibleTuple) -> u64 {
    let d1 = delta.entries.first().copied().unwrap_or(1);
    c_order.max(1).lcm(&d1)
}

fn check_parametrisable(mu: &BilinearPairing) -> Result<()> {
    if mu.a != mu.b {
        return Err(Error::GroupMismatch(format!(
            "A = {:?} and B = {:?} must coincide",
            mu.a, mu.b
        )));
    }
    if !mu.c.is_cyclic() {
        return Err(Error::NonCyclicCentre(mu.c.factors().to_vec()));
    }
    if let Some(a) = mu.left_kernel_witness() {
        return Err(Error::Degenerate(format!("μ({a:?}, B) = 0")));
    }
    if let Some(b) = mu.right_kernel_witness() {
        return Err(Error::Degenerate(format!("μ(A, {b:?}) = 0")));
    }
    Ok(())
}

/// The embedding with `λ1 = id`, `κ(generator) = m/|C|`.
pub fn parametrise(mu: &BilinearPairing, char_exclusion: Option<u64>) -> Result<ParametrisationWitness> {
    parametrise_with(mu, &FinAbHom::identity(&mu.a), char_exclusion)
}

/// The embedding for a caller-chosen automorphism `λ1` of `A`.
pub fn parametrise_with(
    mu: &BilinearPairing,
    lambda1: &FinAbHom,
    char_exclusion: Option<u64>,
) -> Result<ParametrisationWitness> {
    check_parametrisable(mu)?;
    let a = &mu.a;
    if lambda1.domain != *a || lambda1.codomain != *a {
        return Err(Error::GroupMismatch("λ1 must be an endomorphism of A".into()));
    }
    if !lambda1.is_injective() {
        return Err(Error::InvalidInput("λ1 is not an isomorphism".into()));
    }
    let delta = AdmissibleTuple::new(a.factors().to_vec(), char_exclusion)?;
    let nc = mu.c.order() as u64;
    let m = theta_modulus(nc, &delta);
    let zm = FinAbGroup::cyclic(m);
    let kappa_images = if mu.c.rank() == 0 {
        vec![]
    } else {
        vec![zm.elem(&[(m / nc) as i64])?]
    };
    let kappa_mu = FinAbHom::new(
        mu.c.clone(),
        zm.clone(),
        kappa_images.iter().map(|x| x.neg()).collect(),
    )?;
    let kappa = FinAbHom::new(mu.c.clone(), zm, kappa_images)?;
    let k = delta.group();

    // preimages of the canonical generators of K(δ) under λ1
    let inv: Vec<FinAbElem> = (0..k.rank())
        .map(|j| {
            a.elements()
                .find(|x| lambda1.apply(x) == k.gen(j))
                .ok_or_else(|| Error::Internal("λ1 is not surjective".into()))
        })
        .collect::<Result<_>>()?;
    let mut lambda2 = Vec::with_capacity(a.rank());
    for i in 0..a.rank() {
        let ai = a.gen(i);
        let exps: Vec<u64> = inv
            .iter()
            .map(|f| {
                let v = kappa.apply(&mu.apply(&ai, f));
                v.coords().first().copied().unwrap_or(0)
            })
            .collect();
        lambda2.push(Character::new(k.clone(), m, exps)?);
    }
    let mut w = ParametrisationWitness {
        delta,
        modulus: m,
        kappa,
        kappa_mu,
        lambda1: lambda1.clone(),
        lambda2,
        gamma_images: vec![],
    };
    // λ2 must be injective, otherwise μ was degenerate after all
    if a.elements().filter(|x| w.lambda2_apply(x).is_trivial()).count() != 1 {
        return Err(Error::Internal("λ2 is not injective".into()));
    }
    let g = w.theta_group()?;
    let mut images = Vec::new();
    for i in 0..a.rank() {
        images.push(w.gamma(&g, &a.gen(i), &a.zero(), &mu.c.zero()));
    }
    for j in 0..a.rank() {
        images.push(w.gamma(&g, &a.zero(), &a.gen(j), &mu.c.zero()));
    }
    for k in 0..mu.c.rank() {
        images.push(w.gamma(&g, &a.zero(), &a.zero(), &mu.c.gen(k)));
    }
    w.gamma_images = images;
    Ok(w)
}

/// Exhaustive check that `γ` is an injective homomorphism and both squares
/// of the embedding diagram commute.
pub fn verify_parametrisation(
    w: &ParametrisationWitness,
    mu: &BilinearPairing,
    bounds: &Bounds,
) -> Result<CheckReport> {
    let h = HeisenbergGroup::new(mu.clone())?;
    Bounds::check("parametrisation group order", h.order() as u128, bounds.group_order as u128)?;
    let g = w.theta_group()?;
    let mut failures = Vec::new();
    let k = g.k_group().clone();

    if w.lambda1.domain != mu.a || w.lambda1.codomain != k {
        failures.push("λ1 has the wrong domain or codomain".to_string());
        return Ok(CheckReport::from_failures(failures));
    }
    if !(w.lambda1.is_injective() && w.lambda1.is_surjective()) {
        failures.push("λ1 is not an isomorphism".to_string());
    }
    for i in 0..mu.a.rank() {
        for j in 0..mu.b.rank() {
            let (a, b) = (mu.a.gen(i), mu.b.gen(j));
            let lhs = w.lambda2_apply(&a).eval(&w.lambda1.apply(&b));
            let rhs = w.kappa.apply(&mu.apply(&a, &b));
            if lhs != rhs.coords().first().copied().unwrap_or(0) {
                failures.push(format!(
                    "λ2(a_{i})(λ1(b_{j})) = {lhs} differs from κ(μ(a_{i}, b_{j})) = {rhs:?}"
                ));
            }
        }
    }

    let gamma_of = |x: usize| {
        let e = h.elem_at(x);
        g.index_of(&w.gamma(&g, &e.a, &e.b, &e.c))
    };
    let map: Vec<usize> = (0..h.order()).map(gamma_of).collect();
    if let Some((x, y)) = find_hom_violation(&h, &g, &|x| map[x], bounds) {
        failures.push(format!(
            "γ is not a homomorphism at ({:?}, {:?})",
            h.elem_at(x),
            h.elem_at(y)
        ));
    }
    let mut seen = std::collections::HashMap::new();
    for (x, &y) in map.iter().enumerate() {
        if let Some(prev) = seen.insert(y, x) {
            failures.push(format!(
                "γ is not injective: {:?} and {:?} share an image",
                h.elem_at(prev),
                h.elem_at(x)
            ));
            break;
        }
    }
    for c in mu.c.elements() {
        let kc = w.kappa_mu.apply(&c);
        let left = iota_delta(&g, kc.coords().first().copied().unwrap_or(0) as i64);
        let right = w.gamma(&g, &mu.a.zero(), &mu.b.zero(), &c);
        if left != right {
            failures.push(format!("ι_δ∘κ_μ and γ∘ι differ at c = {c:?}"));
            break;
        }
    }
    for x in 0..h.order() {
        let e = h.elem_at(x);
        let left = pi_delta(&g.elem_at(map[x]));
        let right = w.lambda_mu(&e.a, &e.b);
        if left != right {
            failures.push(format!("π_δ∘γ and λ_μ∘π differ at {e:?}"));
            break;
        }
    }
    let gens = h.generators();
    if w.gamma_images.len() == gens.len() {
        for (s, img) in gens.iter().zip(&w.gamma_images) {
            if g.index_of(img) != map[*s] {
                failures.push(format!("recorded γ image differs at generator {:?}", h.elem_at(*s)));
                break;
            }
        }
    } else {
        failures.push("recorded γ images do not match the generator count".to_string());
    }
    Ok(CheckReport::from_failures(failures))
}

/// The parametrisation as a morphism of extensions
/// `(C → H(μ) → A×B) ⇒ (Z/m → Θ(δ) → K(δ) × K(δ)^)`, as index maps.
pub struct ParametrisationMaps {
    pub heisenberg: Arc<HeisenbergGroup>,
    pub theta: Arc<ThetaGroup>,
    pub gamma: Vec<usize>,
}

pub fn parametrisation_maps(w: &ParametrisationWitness, mu: &BilinearPairing) -> Result<ParametrisationMaps> {
    let h = Arc::new(HeisenbergGroup::new(mu.clone())?);
    let g = Arc::new(w.theta_group()?);
    let gamma = (0..h.order())
        .map(|x| {
            let e = h.elem_at(x);
            g.index_of(&w.gamma(&g, &e.a, &e.b, &e.c))
        })
        .collect();
    Ok(ParametrisationMaps {
        heisenberg: h,
        theta: g,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::centre;

    fn delta(e: &[u64]) -> AdmissibleTuple {
        AdmissibleTuple::new(e.to_vec(), None).unwrap()
    }

    #[test]
    fn multiplication_examples() {
        let g = ThetaGroup::new(delta(&[2]), 2).unwrap();
        let sgn = g.elem(0, &[1], &[1]).unwrap();
        let triv = g.elem(0, &[1], &[0]).unwrap();
        assert_eq!(theta_mul(&g, &sgn, &triv).unwrap(), g.elem(0, &[0], &[1]).unwrap());
        assert_eq!(theta_mul(&g, &triv, &sgn).unwrap(), g.elem(1, &[0], &[1]).unwrap());
        let e = g.identity_elem();
        assert_eq!(theta_mul(&g, &e, &sgn).unwrap(), sgn);
    }

    #[test]
    fn structural_maps() {
        let g = ThetaGroup::new(delta(&[2]), 2).unwrap();
        assert_eq!(iota_delta(&g, 1), g.elem(1, &[0], &[0]).unwrap());
        let x = g.elem(1, &[1], &[1]).unwrap();
        let (b, chi) = pi_delta(&x);
        assert_eq!(b.coords(), &[1]);
        assert_eq!(chi.exponents, vec![1]);
        for c in 0..2 {
            let (b, chi) = pi_delta(&iota_delta(&g, c));
            assert!(b.is_zero() && chi.is_trivial());
        }
    }

    #[test]
    fn index_roundtrip_and_inverse() {
        let g = ThetaGroup::new(delta(&[4, 2]), 8).unwrap();
        for x in (0..g.order()).step_by(13) {
            assert_eq!(g.index_of(&g.elem_at(x)), x);
            assert_eq!(g.mul(x, g.inv(x)), 0);
        }
    }

    #[test]
    fn scalars_are_the_centre() {
        let b = Bounds::default();
        for (d, m) in [(vec![2], 2), (vec![3], 3), (vec![4, 2], 4)] {
            let g = ThetaGroup::new(delta(&d), m).unwrap();
            let z = centre(&g, &b).unwrap();
            let scalars: Vec<usize> = (0..m as i64).map(|c| g.index_of(&iota_delta(&g, c))).collect();
            assert_eq!(z, scalars);
        }
    }

    #[test]
    fn commutator_scalar_is_the_character_value() {
        let g = ThetaGroup::new(delta(&[4, 2]), 4).unwrap();
        let x = g.elem(0, &[1, 1], &[0, 0]).unwrap();
        let y = g.elem(0, &[0, 0], &[3, 2]).unwrap();
        let c = g.elem_at(g.commutator(g.index_of(&x), g.index_of(&y)));
        assert!(c.b.is_zero() && c.chi.is_trivial());
        assert_eq!(c.scalar, y.chi.eval(&x.b));
    }

    #[test]
    fn degree_examples() {
        assert_eq!(mumford_degree(&delta(&[4, 2])), (8, 64));
        assert_eq!(mumford_degree(&delta(&[])), (1, 1));
        assert_eq!(mumford_degree(&delta(&[2])), (2, 4));
    }

    #[test]
    fn tuple_validation() {
        assert!(AdmissibleTuple::new(vec![4, 3], None).is_err());
        assert!(AdmissibleTuple::new(vec![4, 1], None).is_err());
        assert!(matches!(
            AdmissibleTuple::new(vec![6, 3], Some(3)),
            Err(Error::Coprimality { .. })
        ));
        assert!(AdmissibleTuple::new(vec![4, 2], Some(3)).is_ok());
        assert!(AdmissibleTuple::new(vec![4, 2], Some(4)).is_err());
        assert!(delta(&[]).is_empty_case());
    }

    #[test]
    fn parametrise_examples() {
        let b = Bounds::default();
        let mu = BilinearPairing::extraspecial(2, 1).unwrap();
        let w = parametrise(&mu, None).unwrap();
        assert_eq!(w.delta.entries, vec![2]);
        assert_eq!(w.modulus, 2);
        let r = verify_parametrisation(&w, &mu, &b).unwrap();
        assert!(r.ok, "{:?}", r.failures);

        let mu = BilinearPairing::extraspecial(3, 1).unwrap();
        let w = parametrise(&mu, None).unwrap();
        assert_eq!((w.delta.entries.clone(), w.modulus), (vec![3], 3));
        let maps = parametrisation_maps(&w, &mu).unwrap();
        let mut img = maps.gamma.clone();
        img.sort();
        img.dedup();
        assert_eq!(img.len(), 27);

        let a = FinAbGroup::new(vec![4, 2]).unwrap();
        let mu = BilinearPairing::cyclic(a.clone(), a, 4, &[vec![1, 0], vec![0, 2]]).unwrap();
        let w = parametrise(&mu, None).unwrap();
        assert_eq!(w.delta.entries, vec![4, 2]);
        let r = verify_parametrisation(&w, &mu, &b).unwrap();
        assert!(r.ok, "{:?}", r.failures);
    }

    #[test]
    fn parametrise_rejects_bad_inputs() {
        let z2 = FinAbGroup::cyclic(2);
        let zero = BilinearPairing::zero(z2.clone(), z2.clone(), z2.clone());
        assert!(matches!(parametrise(&zero, None), Err(Error::Degenerate(_))));
        let c = FinAbGroup::new(vec![2, 2]).unwrap();
        let mu = BilinearPairing::new(z2.clone(), z2.clone(), c, &[vec![vec![1, 0]]]).unwrap();
        assert!(matches!(parametrise(&mu, None), Err(Error::NonCyclicCentre(_))));
        let mu = BilinearPairing::extraspecial(2, 1).unwrap();
        assert!(matches!(parametrise(&mu, Some(2)), Err(Error::Coprimality { .. })));
    }

    #[test]
    fn mutated_witnesses_fail() {
        let b = Bounds::default();
        let mu = BilinearPairing::extraspecial(2, 1).unwrap();
        let w = parametrise(&mu, None).unwrap();
        let mut bad = w.clone();
        bad.kappa = FinAbHom::zero(&bad.kappa.domain, &bad.kappa.codomain);
        let r = verify_parametrisation(&bad, &mu, &b).unwrap();
        assert!(!r.ok);
        assert!(r.failures.iter().any(|f| f.contains("not injective")));

        let mu = BilinearPairing::extraspecial(3, 1).unwrap();
        let w = parametrise(&mu, None).unwrap();
        let mut bad = w.clone();
        bad.lambda1 = FinAbHom::zero(&bad.lambda1.domain, &bad.lambda1.codomain);
        let r = verify_parametrisation(&bad, &mu, &b).unwrap();
        assert!(!r.ok);
        assert!(r.failures.iter().any(|f| f.contains("λ1 is not an isomorphism")));
    }

    #[test]
    fn delta_independent_of_lambda1() {
        let a = FinAbGroup::new(vec![3, 3]).unwrap();
        let mu = BilinearPairing::extraspecial(3, 2).unwrap();
        let swap = FinAbHom::new(a.clone(), a.clone(), vec![a.gen(1), a.gen(0)]).unwrap();
        let w1 = parametrise(&mu, None).unwrap();
        let w2 = parametrise_with(&mu, &swap, None).unwrap();
        assert_eq!(w1.delta, w2.delta);
        let r = verify_parametrisation(&w2, &mu, &Bounds::default()).unwrap();
        assert!(r.ok, "{:?}", r.failures);
    }
}
