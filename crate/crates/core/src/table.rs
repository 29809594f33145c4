//! Finite groups given by index arithmetic, and dense multiplication tables.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite group whose elements are the indices `0..order()`.
pub trait FiniteGroup: Send + Sync {
    fn order(&self) -> usize;
    fn identity(&self) -> usize;
    fn mul(&self, x: usize, y: usize) -> usize;
    fn inv(&self, x: usize) -> usize;

    /// A generating set. The default is the greedy one in index order.
    fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut members = closure(self, &gens);
        for x in 0..self.order() {
            if !members[x] {
                gens.push(x);
                members = closure(self, &gens);
            }
        }
        gens
    }

    fn elem_order(&self, x: usize) -> usize {
        let e = self.identity();
        let mut y = x;
        let mut k = 1;
        while y != e {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// `x⁻¹ y⁻¹ x y`.
    fn commutator(&self, x: usize, y: usize) -> usize {
        let xy = self.mul(x, y);
        let yx = self.mul(y, x);
        self.mul(self.inv(yx), xy)
    }
}

/// Membership vector of the subgroup generated by `gens`.
pub fn closure<G: FiniteGroup + ?Sized>(g: &G, gens: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; g.order()];
    let e = g.identity();
    seen[e] = true;
    let mut stack = vec![e];
    while let Some(x) = stack.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Whether every pair of generators commutes.
pub fn is_abelian<G: FiniteGroup + ?Sized>(g: &G) -> bool {
    let gens = g.generators();
    gens.iter()
        .all(|&x| gens.iter().all(|&y| g.mul(x, y) == g.mul(y, x)))
}

/// A pair `(x, y)` with `f(xy) ≠ f(x)f(y)`, or `(x, x)` if `f(1) ≠ 1`.
///
/// All pairs are compared when `|G|²` fits the centre-work budget; otherwise
/// `y` ranges over generators, which is equivalent once `f(1) = 1`.
pub fn find_hom_violation<G, H>(
    g: &G,
    h: &H,
    f: &dyn Fn(usize) -> usize,
    bounds: &crate::bounds::Bounds,
) -> Option<(usize, usize)>
where
    G: FiniteGroup + ?Sized,
    H: FiniteGroup + ?Sized,
{
    let e = g.identity();
    if f(e) != h.identity() {
        return Some((e, e));
    }
    let n = g.order();
    let ys: Vec<usize> = if (n as u128) * (n as u128) <= bounds.centre_work as u128 {
        (0..n).collect()
    } else {
        g.generators()
    };
    let images: Vec<usize> = (0..n).map(f).collect();
    for x in 0..n {
        for &y in &ys {
            if images[g.mul(x, y)] != h.mul(images[x], images[y]) {
                return Some((x, y));
            }
        }
    }
    None
}

/// Dense 0-indexed multiplication table; `row = left factor`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    n: usize,
    table: Vec<u32>,
    identity: usize,
    inverse: Vec<u32>,
}

impl CayleyTable {
    /// Accepts a square table with entries in range, a two-sided identity and
    /// two-sided inverses. Associativity is not checked here; see
    /// [`crate::verify::check_group_axioms`].
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidGroup("table too large".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::InvalidGroup(format!("entry {v} out of range in row {i}")));
                }
                table.push(v as u32);
            }
        }
        Self::from_flat(n, table)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let rows = (0..n).map(|x| (0..n).map(|y| f(x, y)).collect()).collect();
        Self::new(rows)
    }

    /// Materializes any group.
    pub fn from_group<G: FiniteGroup + ?Sized>(g: &G) -> Result<Self> {
        Self::from_fn(g.order(), |x, y| g.mul(x, y))
    }

    fn from_flat(n: usize, table: Vec<u32>) -> Result<Self> {
        let at = |x: usize, y: usize| table[x * n + y] as usize;
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::InvalidGroup("no two-sided identity".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for x in 0..n {
            let y = (0..n)
                .find(|&y| at(x, y) == identity && at(y, x) == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {x} has no inverse")))?;
            inverse.push(y as u32);
        }
        Ok(CayleyTable {
            n,
            table,
            identity,
            inverse,
        })
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.n)
            .map(|r| r.iter().map(|&v| v as usize).collect())
            .collect()
    }

    pub fn cyclic(n: usize) -> Self {
        Self::from_fn(n.max(1), |x, y| (x + y) % n.max(1)).expect("cyclic table")
    }

    /// `(Z/p)^k`, coordinates in base `p`.
    pub fn elementary_abelian(p: usize, k: u32) -> Self {
        let n = p.pow(k);
        Self::from_fn(n, |mut x, mut y| {
            let mut out = 0;
            let mut place = 1;
            for _ in 0..k {
                out += ((x % p + y % p) % p) * place;
                x /= p;
                y /= p;
                place *= p;
            }
            out
        })
        .expect("elementary abelian table")
    }

    /// Dihedral group of order `2n`; index `i + n·j` is `r^i s^j`.
    pub fn dihedral(n: usize) -> Self {
        Self::from_fn(2 * n, |x, y| {
            let (i, a) = (x % n, x / n);
            let (j, b) = (y % n, y / n);
            let rot = if a == 0 { (i + j) % n } else { (i + n - j) % n };
            rot + n * ((a + b) % 2)
        })
        .expect("dihedral table")
    }

    /// Quaternion group; index `4·s + u` is `(-1)^s · [1, i, j, k][u]`.
    pub fn quaternion() -> Self {
        // unit products as (sign, unit)
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        Self::from_fn(8, |x, y| {
            let (s, u) = UNIT[x % 4][y % 4];
            4 * ((s + x / 4 + y / 4) % 2) + u
        })
        .expect("quaternion table")
    }

    /// Symmetric group on `k` points; permutations in lexicographic order,
    /// product `(στ)(i) = σ(τ(i))`.
    pub fn symmetric(k: usize) -> Self {
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut p: Vec<usize> = (0..k).collect();
        loop {
            perms.push(p.clone());
            // next permutation
            let Some(i) = (1..k).rev().find(|&i| p[i - 1] < p[i]) else {
                break;
            };
            let j = (i..k).rev().find(|&j| p[j] > p[i - 1]).unwrap();
            p.swap(i - 1, j);
            p[i..].reverse();
        }
        let index: HashMap<Vec<usize>, usize> =
            perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Self::from_fn(perms.len(), |x, y| {
            let prod: Vec<usize> = (0..k).map(|i| perms[x][perms[y][i]]).collect();
            index[&prod]
        })
        .expect("symmetric table")
    }
}

impl FiniteGroup for CayleyTable {
    fn order(&self) -> usize {
        self.n
    }
    fn identity(&self) -> usize {
        self.identity
    }
    fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }
    fn inv(&self, x: usize) -> usize {
        self.inverse[x] as usize
    }
}

/// Direct product; index is mixed radix with the first factor varying fastest.
#[derive(Clone)]
pub struct ProductGroup {
    factors: Vec<Arc<dyn FiniteGroup>>,
    strides: Vec<usize>,
    order: usize,
}

impl std::fmt::Debug for ProductGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let orders: Vec<usize> = self.factors.iter().map(|g| g.order()).collect();
        f.debug_struct("ProductGroup").field("orders", &orders).finish()
    }
}

impl ProductGroup {
    pub fn new(factors: Vec<Arc<dyn FiniteGroup>>) -> Self {
        let mut strides = Vec::with_capacity(factors.len());
        let mut order = 1usize;
        for g in &factors {
            strides.push(order);
            order *= g.order();
        }
        ProductGroup {
            factors,
            strides,
            order,
        }
    }

    pub fn factors(&self) -> &[Arc<dyn FiniteGroup>] {
        &self.factors
    }

    pub fn split(&self, x: usize) -> Vec<usize> {
        self.factors
            .iter()
            .zip(&self.strides)
            .map(|(g, &s)| (x / s) % g.order())
            .collect()
    }

    pub fn join(&self, parts: &[usize]) -> usize {
        parts.iter().zip(&self.strides).map(|(&p, &s)| p * s).sum()
    }

    /// Embeds an element of factor `i`.
    pub fn inject(&self, i: usize, x: usize) -> usize {
        let mut parts: Vec<usize> = self.factors.iter().map(|g| g.identity()).collect();
        parts[i] = x;
        self.join(&parts)
    }
}

impl FiniteGroup for ProductGroup {
    fn order(&self) -> usize {
        self.order
    }
    fn identity(&self) -> usize {
        let parts: Vec<usize> = self.factors.iter().map(|g| g.identity()).collect();
        self.join(&parts)
    }
    fn mul(&self, x: usize, y: usize) -> usize {
        let mut out = 0;
        for (g, &s) in self.factors.iter().zip(&self.strides) {
            let n = g.order();
            out += g.mul((x / s) % n, (y / s) % n) * s;
        }
        out
    }
    fn inv(&self, x: usize) -> usize {
        let mut out = 0;
        for (g, &s) in self.factors.iter().zip(&self.strides) {
            out += g.inv((x / s) % g.order()) * s;
        }
        out
    }
    fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        for (i, g) in self.factors.iter().enumerate() {
            for x in g.generators() {
                gens.push(self.inject(i, x));
            }
        }
        gens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_orders() {
        assert_eq!(CayleyTable::symmetric(4).order(), 24);
        assert_eq!(CayleyTable::dihedral(4).order(), 8);
        assert_eq!(CayleyTable::quaternion().order(), 8);
        assert_eq!(CayleyTable::elementary_abelian(3, 2).order(), 9);
    }

    #[test]
    fn quaternion_relations() {
        let q = CayleyTable::quaternion();
        let (i, j, k, minus_one) = (1, 2, 3, 4);
        assert_eq!(q.mul(i, i), minus_one);
        assert_eq!(q.mul(i, j), k);
        assert_eq!(q.mul(j, i), 4 + k);
        assert_eq!(q.elem_order(i), 4);
        assert!(!is_abelian(&q));
    }

    #[test]
    fn dihedral_reflections_have_order_two() {
        let d = CayleyTable::dihedral(4);
        for x in 4..8 {
            assert_eq!(d.elem_order(x), 2);
        }
        assert_eq!(d.elem_order(1), 4);
    }

    #[test]
    fn symmetric_identity_is_first() {
        let s = CayleyTable::symmetric(3);
        assert_eq!(s.identity(), 0);
        assert!(!is_abelian(&s));
    }

    #[test]
    fn bad_tables_rejected() {
        assert!(CayleyTable::new(vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(CayleyTable::new(vec![vec![0, 2], vec![1, 0]]).is_err());
        assert!(CayleyTable::new(vec![vec![0]]).is_ok());
    }

    #[test]
    fn product_split_join() {
        let p = ProductGroup::new(vec![
            Arc::new(CayleyTable::cyclic(2)),
            Arc::new(CayleyTable::cyclic(3)),
        ]);
        assert_eq!(p.order(), 6);
        assert_eq!(p.split(5), vec![1, 2]);
        assert_eq!(p.join(&[1, 2]), 5);
        assert_eq!(p.elem_order(5), 6);
        assert_eq!(closure(&p, &p.generators()).iter().filter(|&&b| b).count(), 6);
    }
}
