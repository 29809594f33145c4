//! Finite abelian groups in invariant-factor form.
//!
//! A group is `Z/d_1 ⊕ … ⊕ Z/d_t` with `d_{i+1} | d_i` and every `d_i ≥ 2`.
//! Elements are residue tuples. As a [`FiniteGroup`], element indices are mixed
//! radix with `coords[0]` varying fastest.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::intmat::{self, IntMat};
use crate::table::{closure, FiniteGroup};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinAbGroup {
    factors: Vec<u64>,
}

impl fmt::Debug for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinAb{:?}", self.factors)
    }
}

impl Serialize for FinAbGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.factors.serialize(s)
    }
}

impl FinAbGroup {
    /// Validates the divisibility chain and that every factor is at least 2.
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if let Some(&d) = factors.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidGroup(format!(
                "invariant factor {d} is below 2 in {factors:?}"
            )));
        }
        for w in factors.windows(2) {
            if w[0] % w[1] != 0 {
                return Err(Error::InvalidGroup(format!(
                    "{} does not divide {} in {factors:?}",
                    w[1], w[0]
                )));
            }
        }
        Ok(FinAbGroup { factors })
    }

    pub fn trivial() -> Self {
        FinAbGroup { factors: vec![] }
    }

    pub fn cyclic(n: u64) -> Self {
        if n <= 1 {
            Self::trivial()
        } else {
            FinAbGroup { factors: vec![n] }
        }
    }

    /// Invariant factors of `Z/n_1 ⊕ … ⊕ Z/n_k` for arbitrary orders.
    pub fn from_cyclic_orders(orders: &[u64]) -> Result<Self> {
        let k = orders.len();
        let m: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { orders[i] as i64 } else { 0 })
                    .collect()
            })
            .collect();
        smith_invariant_factors(&m)
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Number of invariant factors.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u128 {
        self.factors.iter().map(|&d| d as u128).product()
    }

    /// Exponent; 1 for the trivial group.
    pub fn exponent(&self) -> u64 {
        self.factors.first().copied().unwrap_or(1)
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    pub fn zero(&self) -> FinAbElem {
        FinAbElem {
            group: self.clone(),
            coords: vec![0; self.factors.len()],
        }
    }

    /// The `i`-th canonical generator.
    pub fn gen(&self, i: usize) -> FinAbElem {
        let mut x = self.zero();
        x.coords[i] = 1;
        x
    }

    /// Reduces arbitrary integer coordinates into canonical residues.
    pub fn elem(&self, coords: &[i64]) -> Result<FinAbElem> {
        if coords.len() != self.factors.len() {
            return Err(Error::GroupMismatch(format!(
                "{} coordinates for a group with {} factors",
                coords.len(),
                self.factors.len()
            )));
        }
        Ok(FinAbElem {
            group: self.clone(),
            coords: coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &d)| c.rem_euclid(d as i64) as u64)
                .collect(),
        })
    }

    pub fn elem_big(&self, coords: &[BigInt]) -> FinAbElem {
        FinAbElem {
            group: self.clone(),
            coords: coords
                .iter()
                .zip(&self.factors)
                .map(|(c, &d)| c.mod_floor(&BigInt::from(d)).to_u64().unwrap())
                .collect(),
        }
    }

    pub fn index_of(&self, x: &FinAbElem) -> usize {
        let mut idx = 0usize;
        for (&c, &d) in x.coords.iter().zip(&self.factors).rev() {
            idx = idx * d as usize + c as usize;
        }
        idx
    }

    pub fn elem_at(&self, mut idx: usize) -> FinAbElem {
        let coords = self
            .factors
            .iter()
            .map(|&d| {
                let c = idx % d as usize;
                idx /= d as usize;
                c as u64
            })
            .collect();
        FinAbElem {
            group: self.clone(),
            coords,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FinAbElem> + '_ {
        (0..self.order() as usize).map(move |i| self.elem_at(i))
    }
}

impl FiniteGroup for FinAbGroup {
    fn order(&self) -> usize {
        FinAbGroup::order(self) as usize
    }
    fn identity(&self) -> usize {
        0
    }
    fn mul(&self, x: usize, y: usize) -> usize {
        let (mut x, mut y) = (x, y);
        let mut out = 0;
        let mut place = 1;
        for &d in &self.factors {
            let d = d as usize;
            out += ((x % d + y % d) % d) * place;
            x /= d;
            y /= d;
            place *= d;
        }
        out
    }
    fn inv(&self, x: usize) -> usize {
        let mut x = x;
        let mut out = 0;
        let mut place = 1;
        for &d in &self.factors {
            let d = d as usize;
            out += ((d - x % d) % d) * place;
            x /= d;
            place *= d;
        }
        out
    }
    fn generators(&self) -> Vec<usize> {
        (0..self.rank()).map(|i| self.index_of(&self.gen(i))).collect()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinAbElem {
    group: FinAbGroup,
    coords: Vec<u64>,
}

impl fmt::Debug for FinAbElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

impl Serialize for FinAbElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

impl FinAbElem {
    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &FinAbElem) -> Result<FinAbElem> {
        self.same_group(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &FinAbElem) -> Result<FinAbElem> {
        self.same_group(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub(crate) fn add_unchecked(&self, other: &FinAbElem) -> FinAbElem {
        FinAbElem {
            group: self.group.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .zip(&self.group.factors)
                .map(|((&a, &b), &d)| (a + b) % d)
                .collect(),
        }
    }

    pub fn neg(&self) -> FinAbElem {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> FinAbElem {
        FinAbElem {
            group: self.group.clone(),
            coords: self
                .coords
                .iter()
                .zip(&self.group.factors)
                .map(|(&a, &d)| ((a as i128 * k as i128).rem_euclid(d as i128)) as u64)
                .collect(),
        }
    }

    /// Additive order.
    pub fn order(&self) -> u64 {
        self.coords
            .iter()
            .zip(&self.group.factors)
            .map(|(&a, &d)| d / a.gcd(&d))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    fn same_group(&self, other: &FinAbElem) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch(format!(
                "{:?} vs {:?}",
                self.group, other.group
            )));
        }
        Ok(())
    }
}

/// Componentwise sum reduced mod `d_i`.
pub fn elem_add(x: &FinAbElem, y: &FinAbElem) -> Result<FinAbElem> {
    x.add(y)
}

/// A homomorphism given by the images of the canonical generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinAbHom {
    pub domain: FinAbGroup,
    pub codomain: FinAbGroup,
    pub images: Vec<FinAbElem>,
}

impl FinAbHom {
    pub fn new(domain: FinAbGroup, codomain: FinAbGroup, images: Vec<FinAbElem>) -> Result<Self> {
        if images.len() != domain.rank() {
            return Err(Error::GroupMismatch(format!(
                "{} images for {} generators",
                images.len(),
                domain.rank()
            )));
        }
        for (i, (img, &d)) in images.iter().zip(domain.factors()).enumerate() {
            if img.group != codomain {
                return Err(Error::GroupMismatch(format!("image {i} lies outside the codomain")));
            }
            if !img.scale(d as i64).is_zero() {
                return Err(Error::InvalidInput(format!(
                    "image {img:?} of generator {i} is not killed by its order {d}"
                )));
            }
        }
        Ok(FinAbHom {
            domain,
            codomain,
            images,
        })
    }

    pub fn identity(g: &FinAbGroup) -> Self {
        FinAbHom {
            domain: g.clone(),
            codomain: g.clone(),
            images: (0..g.rank()).map(|i| g.gen(i)).collect(),
        }
    }

    pub fn zero(domain: &FinAbGroup, codomain: &FinAbGroup) -> Self {
        FinAbHom {
            domain: domain.clone(),
            codomain: codomain.clone(),
            images: vec![codomain.zero(); domain.rank()],
        }
    }

    pub fn apply(&self, x: &FinAbElem) -> FinAbElem {
        let mut out = self.codomain.zero();
        for (&c, img) in x.coords.iter().zip(&self.images) {
            out = out.add_unchecked(&img.scale(c as i64));
        }
        out
    }

    pub fn compose(&self, first: &FinAbHom) -> Result<FinAbHom> {
        if first.codomain != self.domain {
            return Err(Error::GroupMismatch("composition domains differ".into()));
        }
        Ok(FinAbHom {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            images: first.images.iter().map(|x| self.apply(x)).collect(),
        })
    }

    /// Exhaustive over the domain.
    pub fn is_injective(&self) -> bool {
        self.domain.elements().filter(|x| self.apply(x).is_zero()).count() == 1
    }

    /// Exhaustive over the domain.
    pub fn is_surjective(&self) -> bool {
        let image: HashSet<FinAbElem> = self.domain.elements().map(|x| self.apply(&x)).collect();
        image.len() as u128 == self.codomain.order()
    }
}

/// A character `x ↦ Σ e_i x_i mod m`, an additive stand-in for a map to the
/// `m`-th roots of unity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Character {
    pub domain: FinAbGroup,
    pub modulus: u64,
    pub exponents: Vec<u64>,
}

impl Character {
    pub fn new(domain: FinAbGroup, modulus: u64, exponents: Vec<u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidInput("character modulus must be positive".into()));
        }
        if exponents.len() != domain.rank() {
            return Err(Error::GroupMismatch("exponent count differs from rank".into()));
        }
        for (&e, &d) in exponents.iter().zip(domain.factors()) {
            if e >= modulus || (d as u128 * e as u128) % modulus as u128 != 0 {
                return Err(Error::InvalidInput(format!(
                    "exponent {e} is not a character value on Z/{d} mod {modulus}"
                )));
            }
        }
        Ok(Character {
            domain,
            modulus,
            exponents,
        })
    }

    pub fn trivial(domain: &FinAbGroup, modulus: u64) -> Self {
        Character {
            domain: domain.clone(),
            modulus,
            exponents: vec![0; domain.rank()],
        }
    }

    pub fn eval(&self, x: &FinAbElem) -> u64 {
        let m = self.modulus as u128;
        (x.coords
            .iter()
            .zip(&self.exponents)
            .map(|(&c, &e)| c as u128 * e as u128 % m)
            .sum::<u128>()
            % m) as u64
    }

    pub fn add(&self, other: &Character) -> Result<Character> {
        if self.domain != other.domain || self.modulus != other.modulus {
            return Err(Error::GroupMismatch("characters on different groups".into()));
        }
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Character) -> Character {
        Character {
            domain: self.domain.clone(),
            modulus: self.modulus,
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(&a, &b)| (a + b) % self.modulus)
                .collect(),
        }
    }

    pub fn neg(&self) -> Character {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Character {
        let m = self.modulus as i128;
        Character {
            domain: self.domain.clone(),
            modulus: self.modulus,
            exponents: self
                .exponents
                .iter()
                .map(|&e| (e as i128 * k as i128).rem_euclid(m) as u64)
                .collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }
}

/// The cokernel of `Z^cols → Z^rows` together with the quotient map in
/// canonical coordinates and lifts of the canonical generators.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub group: FinAbGroup,
    /// Row `k` gives the `k`-th canonical coordinate (before reduction).
    projection: IntMat,
    /// Column of `Z^rows` mapping to the `k`-th canonical generator.
    lifts: IntMat,
}

impl Presentation {
    /// Relations are the columns of `m` (`rows × cols`).
    pub fn of_relations(m: &[Vec<i64>], rows: usize) -> Result<Self> {
        let cols = m.first().map_or(0, |r| r.len());
        let big = intmat::to_big(m);
        let big = if rows == 0 { vec![] } else { big };
        let s = intmat::smith(&big, rows, cols);
        if s.rank < rows {
            return Err(Error::InfiniteCokernel { rank: s.rank, rows });
        }
        // SNF order is increasing; canonical order is decreasing.
        let keep: Vec<usize> = (0..rows).rev().filter(|&i| !s.diag[i].is_one()).collect();
        let factors: Vec<u64> = keep
            .iter()
            .map(|&i| {
                s.diag[i]
                    .to_u64()
                    .ok_or_else(|| Error::InvalidInput("invariant factor exceeds u64".into()))
            })
            .collect::<Result<_>>()?;
        let group = FinAbGroup::new(factors)?;
        let projection = keep.iter().map(|&i| s.u[i].clone()).collect();
        let lifts = keep
            .iter()
            .map(|&i| (0..rows).map(|r| s.u_inv[r][i].clone()).collect())
            .collect();
        Ok(Presentation {
            group,
            projection,
            lifts,
        })
    }

    pub fn project(&self, x: &[BigInt]) -> FinAbElem {
        let coords: Vec<BigInt> = self
            .projection
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        self.group.elem_big(&coords)
    }

    /// A preimage of the `k`-th canonical generator.
    pub fn lift(&self, k: usize) -> &[BigInt] {
        &self.lifts[k]
    }

    /// A preimage of `x` (combination of generator lifts with coefficients in `[0, d_k)`).
    pub fn lift_elem(&self, x: &FinAbElem) -> Vec<BigInt> {
        let n = self.lifts.first().map_or(0, |l| l.len());
        let mut out = vec![BigInt::zero(); n];
        for (k, &c) in x.coords().iter().enumerate() {
            for (o, l) in out.iter_mut().zip(&self.lifts[k]) {
                *o += l * c;
            }
        }
        out
    }
}

/// Invariant factors (`> 1`, decreasing divisibility) of the cokernel of an
/// integer matrix whose columns are relations among its rows.
pub fn smith_invariant_factors(m: &[Vec<i64>]) -> Result<FinAbGroup> {
    Presentation::of_relations(m, m.len()).map(|p| p.group)
}

/// Generators of `Hom(A, Z/m)`; requires `exp(A) | m`.
pub fn dual_group(a: &FinAbGroup, m: u64) -> Result<Vec<Character>> {
    if m == 0 || m % a.exponent() != 0 {
        return Err(Error::InvalidInput(format!(
            "modulus {m} is not a multiple of the exponent {}",
            a.exponent()
        )));
    }
    Ok((0..a.rank())
        .map(|i| {
            let mut e = vec![0; a.rank()];
            e[i] = m / a.factors()[i];
            Character {
                domain: a.clone(),
                modulus: m,
                exponents: e,
            }
        })
        .collect())
}

/// Smallest generating-set size of a finite abelian group.
pub fn min_generators(a: &FinAbGroup) -> usize {
    a.rank()
}

type Bits = Vec<u64>;

fn bits_of(members: &[bool]) -> Bits {
    let mut b = vec![0u64; members.len().div_ceil(64)];
    for (i, &m) in members.iter().enumerate() {
        if m {
            b[i / 64] |= 1 << (i % 64);
        }
    }
    b
}

fn has_bit(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

/// Maximum over all subgroups of the minimal number of generators, by
/// enumerating subgroups level by level (level `k` = exactly `k` generators).
pub fn rank_bruteforce<G: FiniteGroup + ?Sized>(g: &G, bounds: &Bounds) -> Result<usize> {
    let n = g.order();
    Bounds::check("rank_bruteforce group order", n as u128, bounds.rank_order as u128)?;
    let mut seen: HashSet<Bits> = HashSet::new();
    seen.insert(bits_of(&closure(g, &[])));
    let mut level: Vec<(Bits, Vec<usize>)> = vec![(bits_of(&closure(g, &[])), vec![])];
    let mut rank = 0;
    let mut work: u64 = 0;
    loop {
        let mut next = Vec::new();
        for (sub, gens) in &level {
            for x in 0..n {
                if has_bit(sub, x) {
                    continue;
                }
                let mut ext = gens.clone();
                ext.push(x);
                work += 1;
                if work > bounds.search_budget {
                    return Err(Error::BoundExceeded {
                        what: "rank_bruteforce subgroup closures",
                        needed: work as u128,
                        limit: bounds.search_budget as u128,
                    });
                }
                let bits = bits_of(&closure(g, &ext));
                if seen.insert(bits.clone()) {
                    next.push((bits, ext));
                }
            }
        }
        if next.is_empty() {
            return Ok(rank);
        }
        rank += 1;
        level = next;
    }
}
