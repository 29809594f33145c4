//! Realizing a symmetric-type pairing `μ: A × A → C` as the imaginary part of
//! a Hermitian form on `M = A ⊕ B` over `Z_c[i]`.
//!
//! `M` is made a `Z_c[i]`-module by choosing an isomorphism `ψ: A → B` and
//! setting `i·a = ψ(a)`, `i·b = −ψ⁻¹(b)`. A Hermitian form that is real on
//! `A × A` is fixed by its restriction `R = h_M|A×A`, a symmetric bilinear
//! form into `Z_c`, and `Im h_M(a, ψ a') = −R(a, a')`. Given `ψ` and an
//! embedding `φ: Z_c → C`, the requirement `μ(a, b) = φ(Im h_M(a, b))` forces
//! `R(a, a') = −φ⁻¹(μ(a, ψ a'))`, so the search runs over `(ψ, φ)` only.

use num_integer::Integer;
use serde::Serialize;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::finabel::{FinAbElem, FinAbGroup, FinAbHom};
use crate::heisenberg::BilinearPairing;

/// Which value `Im h_M(α, iα)` took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignNormalization {
    /// `Im h_M(α, iα) = 1`.
    Standard,
    /// `Im h_M(α, iα) = −1`.
    Flipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HermitianSolution {
    pub c: u64,
    /// `ψ: A → B`, defining multiplication by `i`.
    pub psi: FinAbHom,
    pub psi_inv: FinAbHom,
    /// `φ(1) = unit · |C|/c`.
    pub unit: u64,
    pub phi: FinAbHom,
    /// `R(a_j, a_k) = h_M(a_j, a_k) ∈ Z_c` on the canonical generators of `A`.
    pub real_form: Vec<Vec<u64>>,
    pub alpha: FinAbElem,
    pub sign: SignNormalization,
}

impl HermitianSolution {
    /// `R(x, y) ∈ Z_c` for `x, y ∈ A`.
    pub fn real_value(&self, x: &FinAbElem, y: &FinAbElem) -> u64 {
        let c = self.c as u128;
        let mut acc = 0u128;
        for (j, &xj) in x.coords().iter().enumerate() {
            for (k, &yk) in y.coords().iter().enumerate() {
                acc = (acc + xj as u128 % c * (yk as u128 % c) % c * self.real_form[j][k] as u128) % c;
            }
        }
        acc as u64
    }

    /// `h_M((a, b), (a', b'))` as `(Re, Im)` in `Z_c × Z_c`.
    pub fn h_m(&self, x: (&FinAbElem, &FinAbElem), y: (&FinAbElem, &FinAbElem)) -> (u64, u64) {
        let c = self.c;
        let (p, q) = (self.psi_inv.apply(x.1), self.psi_inv.apply(y.1));
        let re = (self.real_value(x.0, y.0) + self.real_value(&p, &q)) % c;
        let im = (self.real_value(&p, y.0) + c - self.real_value(x.0, &q)) % c;
        (re, im)
    }

    /// Exhaustive check of `μ(a, b) = φ(Im h_M(a, b))`, conjugate symmetry,
    /// realness on `A × A` and `B × B`, and the normalization at `α`.
    pub fn verify(&self, mu: &BilinearPairing) -> Vec<String> {
        let mut failures = Vec::new();
        let a_elems: Vec<FinAbElem> = mu.a.elements().collect();
        let zero_a = mu.a.zero();
        let zero_b = mu.b.zero();
        let cyc = FinAbGroup::cyclic(self.c);
        let to_c = |v: u64| {
            if cyc.rank() == 0 {
                cyc.zero()
            } else {
                cyc.elem(&[v as i64]).expect("in range")
            }
        };
        for a in &a_elems {
            for a2 in &a_elems {
                let b = self.psi.apply(a2);
                let (_, im) = self.h_m((a, &zero_b), (&zero_a, &b));
                if self.phi.apply(&to_c(im)) != mu.apply(a, &b) {
                    failures.push(format!("μ({a:?}, {b:?}) ≠ φ(Im h_M)"));
                }
                let (re_ab, im_ab) = self.h_m((a, &zero_b), (a2, &zero_b));
                let (re_ba, im_ba) = self.h_m((a2, &zero_b), (a, &zero_b));
                if im_ab != 0 || re_ab != re_ba || im_ba != 0 {
                    failures.push(format!("h_M is not real symmetric at ({a:?}, {a2:?})"));
                }
                let b1 = self.psi.apply(a);
                let (_, im_bb) = self.h_m((&zero_a, &b1), (&zero_a, &b));
                if im_bb != 0 {
                    failures.push(format!("Im h_M(B, B) ≠ 0 at ({b1:?}, {b:?})"));
                }
            }
        }
        let ia = self.psi.apply(&self.alpha);
        let (_, im) = self.h_m((&self.alpha, &zero_b), (&zero_a, &ia));
        let expect = match self.sign {
            SignNormalization::Standard => 1 % self.c,
            SignNormalization::Flipped => (self.c - 1) % self.c,
        };
        if im != expect {
            failures.push(format!("Im h_M(α, iα) = {im}, expected {expect}"));
        }
        if self.alpha.order() != self.c {
            failures.push(format!("α has order {}, expected {}", self.alpha.order(), self.c));
        }
        failures
    }
}

fn mod_inverse(u: u64, c: u64) -> u64 {
    if c == 1 {
        return 0;
    }
    let e = (u as i128).extended_gcd(&(c as i128));
    e.x.rem_euclid(c as i128) as u64
}

/// Automorphisms of `A`: the identity, then every other bijective assignment
/// of generator images in lexicographic order of element indices.
struct Automorphisms<'a> {
    a: &'a FinAbGroup,
    counters: Option<Vec<usize>>,
    identity_done: bool,
}

impl<'a> Automorphisms<'a> {
    fn new(a: &'a FinAbGroup) -> Self {
        Automorphisms {
            a,
            counters: Some(vec![0; a.rank()]),
            identity_done: false,
        }
    }

    fn identity_indices(&self) -> Vec<usize> {
        (0..self.a.rank()).map(|i| self.a.index_of(&self.a.gen(i))).collect()
    }

    /// Next raw tuple, counting against `spent`.
    fn next_candidate(&mut self, spent: &mut u64) -> Option<Vec<usize>> {
        let n = self.a.order() as usize;
        let cur = self.counters.as_mut()?;
        let out = cur.clone();
        *spent += 1;
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.counters = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < n {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }

    fn next(&mut self, spent: &mut u64, budget: u64) -> Result<Option<FinAbHom>> {
        if !self.identity_done {
            self.identity_done = true;
            return Ok(Some(FinAbHom::identity(self.a)));
        }
        let id = self.identity_indices();
        while let Some(t) = self.next_candidate(spent) {
            Bounds::check("Hermitian search candidates", *spent as u128, budget as u128)?;
            if t == id {
                continue;
            }
            let images: Vec<FinAbElem> = t.iter().map(|&k| self.a.elem_at(k)).collect();
            if let Ok(h) = FinAbHom::new(self.a.clone(), self.a.clone(), images) {
                if h.is_injective() {
                    return Ok(Some(h));
                }
            }
        }
        Ok(None)
    }
}

/// Searches for `(ψ, φ, α)` such that `R(a, a') = −φ⁻¹(μ(a, ψ a'))` is a
/// symmetric form with `R(α, α) = −1` (`Im h_M(α, iα) = 1`) for some `α` of
/// order `c = |μ(A, A)|`.
///
/// Order: `ψ` as in [`Automorphisms`], then units `u` of `Z_c` ascending
/// (`φ(1) = u·|C|/c`), then `α` by element index. If no standard solution
/// exists, the same order is rerun accepting `R(α, α) = +1`.
pub fn hermitian_search(mu: &BilinearPairing, bounds: &Bounds) -> Result<HermitianSolution> {
    hermitian_search_ordered(
        mu,
        bounds,
        &[SignNormalization::Standard, SignNormalization::Flipped],
    )
}

/// As [`hermitian_search`], trying the normalizations in the given order.
pub fn hermitian_search_ordered(
    mu: &BilinearPairing,
    bounds: &Bounds,
    signs: &[SignNormalization],
) -> Result<HermitianSolution> {
    let a = &mu.a;
    if mu.a != mu.b {
        return Err(Error::GroupMismatch("hermitian_search needs A = B".into()));
    }
    if mu.c.rank() > 1 {
        return Err(Error::NonCyclicCentre(mu.c.factors().to_vec()));
    }
    Bounds::check("Hermitian search |A|", a.order(), bounds.hermitian_order as u128)?;
    if let Some(w) = mu.left_kernel_witness().or_else(|| mu.right_kernel_witness()) {
        return Err(Error::Degenerate(format!("kernel element {w:?}")));
    }
    let c = mu.image_members().iter().filter(|&&m| m).count() as u64;
    if a.exponent() != c {
        return Err(Error::NoSolution(format!(
            "exponent of A is {}, |μ(A,A)| is {c}",
            a.exponent()
        )));
    }
    let g = mu.c.order() as u64;
    let step = g / c;
    let zc = FinAbGroup::cyclic(c);
    let units: Vec<u64> = (1..c.max(2)).filter(|&u| u.gcd(&c) == 1).collect();
    let t = a.rank();
    let elems: Vec<FinAbElem> = a.elements().collect();

    for &sign in signs {
        let target = match sign {
            SignNormalization::Standard => (c - 1) % c,
            SignNormalization::Flipped => 1 % c,
        };
        let mut spent = 0u64;
        let mut auts = Automorphisms::new(a);
        while let Some(psi) = auts.next(&mut spent, bounds.search_budget)? {
            let raw: Vec<Vec<u64>> = (0..t)
                .map(|j| {
                    (0..t)
                        .map(|k| {
                            let v = mu.apply(&a.gen(j), &psi.apply(&a.gen(k)));
                            v.coords().first().copied().unwrap_or(0)
                        })
                        .collect()
                })
                .collect();
            let symmetric = (0..t).all(|j| (0..t).all(|k| raw[j][k] == raw[k][j]));
            if !symmetric || raw.iter().flatten().any(|&v| v % step != 0) {
                continue;
            }
            for &u in &units {
                let u_inv = mod_inverse(u, c);
                let real_form: Vec<Vec<u64>> = raw
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|&v| (c - (v / step) % c * u_inv % c) % c)
                            .collect()
                    })
                    .collect();
                let phi_image = if mu.c.rank() == 0 {
                    mu.c.zero()
                } else {
                    mu.c.elem(&[(u * step) as i64])?
                };
                let phi_images = if zc.rank() == 0 { vec![] } else { vec![phi_image] };
                let phi = FinAbHom::new(zc.clone(), mu.c.clone(), phi_images)?;
                let psi_inv = invert(&psi)?;
                let mut sol = HermitianSolution {
                    c,
                    psi: psi.clone(),
                    psi_inv,
                    unit: u % c.max(1),
                    phi,
                    real_form,
                    alpha: a.zero(),
                    sign,
                };
                let found = elems
                    .iter()
                    .find(|x| x.order() == c && sol.real_value(x, x) == target);
                if let Some(alpha) = found {
                    sol.alpha = alpha.clone();
                    return Ok(sol);
                }
            }
        }
    }
    Err(Error::NoSolution(
        "no Hermitian form realizes μ with Im h_M(α, iα) = ±1".into(),
    ))
}

/// Inverse of a bijective endomorphism, by enumeration.
fn invert(psi: &FinAbHom) -> Result<FinAbHom> {
    let a = &psi.domain;
    let images = (0..a.rank())
        .map(|i| {
            let target = a.gen(i);
            a.elements()
                .find(|x| psi.apply(x) == target)
                .ok_or_else(|| Error::Internal("automorphism is not surjective".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    FinAbHom::new(a.clone(), a.clone(), images)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(mu: &BilinearPairing) -> HermitianSolution {
        let s = hermitian_search(mu, &Bounds::default()).unwrap();
        assert!(s.verify(mu).is_empty(), "{:?}", s.verify(mu));
        s
    }

    #[test]
    fn cyclic_standard_pairings() {
        let s = solve(&BilinearPairing::extraspecial(2, 1).unwrap());
        assert_eq!(s.c, 2);
        assert_eq!(s.real_value(&s.alpha, &s.alpha), 1); // ≡ −1 mod 2
        assert_eq!(s.sign, SignNormalization::Standard);

        let s = solve(&BilinearPairing::extraspecial(3, 1).unwrap());
        assert_eq!(s.alpha.order(), 3);
        assert_eq!(s.real_value(&s.alpha, &s.alpha), 2);

        solve(&BilinearPairing::extraspecial(5, 1).unwrap());
        solve(&BilinearPairing::extraspecial(3, 2).unwrap());
    }

    #[test]
    fn alternating_pairing_needs_a_twist() {
        // μ(a, b) = a1 b2 − a2 b1 on (Z/3)²: not symmetric under ψ = id.
        let a = FinAbGroup::new(vec![3, 3]).unwrap();
        let mu = BilinearPairing::cyclic(a.clone(), a, 3, &[vec![0, 1], vec![-1, 0]]).unwrap();
        let s = solve(&mu);
        assert_ne!(s.psi, FinAbHom::identity(&mu.a));
    }

    #[test]
    fn hyperbolic_pairing_mod_two() {
        // R = [[0,1],[1,0]] has no anisotropic vector under ψ = id.
        let a = FinAbGroup::new(vec![2, 2]).unwrap();
        let mu = BilinearPairing::cyclic(a.clone(), a, 2, &[vec![0, 1], vec![1, 0]]).unwrap();
        solve(&mu);
    }

    #[test]
    fn non_minimal_centre() {
        // C = Z/4, image of order 2.
        let mu = BilinearPairing::cyclic(FinAbGroup::cyclic(2), FinAbGroup::cyclic(2), 4, &[vec![2]]).unwrap();
        let s = solve(&mu);
        assert_eq!(s.c, 2);
    }

    #[test]
    fn mixed_orders() {
        let a = FinAbGroup::new(vec![4, 2]).unwrap();
        let mu = BilinearPairing::cyclic(a.clone(), a, 4, &[vec![1, 0], vec![0, 2]]).unwrap();
        let s = solve(&mu);
        assert_eq!(s.c, 4);
    }

    #[test]
    fn degenerate_rejected() {
        let a = FinAbGroup::new(vec![2, 2]).unwrap();
        let mu = BilinearPairing::cyclic(a.clone(), a, 2, &[vec![1, 0], vec![0, 0]]).unwrap();
        assert!(matches!(hermitian_search(&mu, &Bounds::default()), Err(Error::Degenerate(_))));
    }
}
