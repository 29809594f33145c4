//! Bilinear pairings `μ: A × B → C` and the Heisenberg group `H(μ)` on
//! `A × B × C` with `(a,b,c)(a',b',c') = (a+a', b+b', c + μ(a,b') + c')`.

use std::sync::Arc;

use serde::Serialize;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::finabel::{FinAbElem, FinAbGroup, FinAbHom};
use crate::table::{find_hom_violation, FiniteGroup, ProductGroup};

/// `μ(a, b) = Σ a_i b_j M_ij` with `M_ij ∈ C`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BilinearPairing {
    pub a: FinAbGroup,
    pub b: FinAbGroup,
    pub c: FinAbGroup,
    pub matrix: Vec<Vec<FinAbElem>>,
}

impl BilinearPairing {
    /// `matrix[i][j]` holds the `C`-coordinates of `μ(a_i, b_j)`.
    pub fn new(
        a: FinAbGroup,
        b: FinAbGroup,
        c: FinAbGroup,
        matrix: &[Vec<Vec<i64>>],
    ) -> Result<Self> {
        if matrix.len() != a.rank() {
            return Err(Error::InvalidInput(format!(
                "pairing matrix has {} rows, A has {} generators",
                matrix.len(),
                a.rank()
            )));
        }
        let mut rows = Vec::with_capacity(a.rank());
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != b.rank() {
                return Err(Error::InvalidInput(format!(
                    "pairing row {i} has {} entries, B has {} generators",
                    row.len(),
                    b.rank()
                )));
            }
            let mut out = Vec::with_capacity(row.len());
            for (j, entry) in row.iter().enumerate() {
                let v = c.elem(entry)?;
                let g = num_integer::gcd(a.factors()[i], b.factors()[j]);
                if !v.scale(g as i64).is_zero() {
                    return Err(Error::InvalidInput(format!(
                        "μ(a_{i}, b_{j}) = {v:?} has order not dividing {g}"
                    )));
                }
                out.push(v);
            }
            rows.push(out);
        }
        Ok(BilinearPairing {
            a,
            b,
            c,
            matrix: rows,
        })
    }

    /// Pairing into a cyclic group `Z/n` with integer entries.
    pub fn cyclic(a: FinAbGroup, b: FinAbGroup, n: u64, matrix: &[Vec<i64>]) -> Result<Self> {
        let c = FinAbGroup::cyclic(n);
        let wrapped: Vec<Vec<Vec<i64>>> = matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&v| if c.rank() == 0 { vec![] } else { vec![v] })
                    .collect()
            })
            .collect();
        Self::new(a, b, c, &wrapped)
    }

    /// `A = B = (Z/p)^n`, `C = Z/p`, dot product.
    pub fn extraspecial(p: u64, n: usize) -> Result<Self> {
        let a = FinAbGroup::new(vec![p; n])?;
        let m: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::cyclic(a.clone(), a, p, &m)
    }

    pub fn zero(a: FinAbGroup, b: FinAbGroup, c: FinAbGroup) -> Self {
        let matrix = vec![vec![c.zero(); b.rank()]; a.rank()];
        BilinearPairing { a, b, c, matrix }
    }

    pub fn apply(&self, x: &FinAbElem, y: &FinAbElem) -> FinAbElem {
        let mut out = self.c.zero();
        for (i, &xi) in x.coords().iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.coords().iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let k = (xi as u128 * yj as u128 % self.c.exponent().max(1) as u128) as i64;
                out = out.add_unchecked(&self.matrix[i][j].scale(k));
            }
        }
        out
    }

    /// `μ(a,B) = 0 ⟹ a = 0` and `μ(A,b) = 0 ⟹ b = 0`, scanned exhaustively.
    pub fn is_nondegenerate(&self) -> bool {
        self.left_kernel_witness().is_none() && self.right_kernel_witness().is_none()
    }

    /// A nonzero `a` with `μ(a, B) = 0`.
    pub fn left_kernel_witness(&self) -> Option<FinAbElem> {
        self.a.elements().find(|x| {
            !x.is_zero() && (0..self.b.rank()).all(|j| self.apply(x, &self.b.gen(j)).is_zero())
        })
    }

    /// A nonzero `b` with `μ(A, b) = 0`.
    pub fn right_kernel_witness(&self) -> Option<FinAbElem> {
        self.b.elements().find(|y| {
            !y.is_zero() && (0..self.a.rank()).all(|i| self.apply(&self.a.gen(i), y).is_zero())
        })
    }

    /// The subgroup `μ(A, B)` of `C`, as a membership vector over `C`'s indices.
    pub fn image_members(&self) -> Vec<bool> {
        let gens: Vec<usize> = self
            .matrix
            .iter()
            .flatten()
            .map(|v| self.c.index_of(v))
            .collect();
        crate::table::closure(&self.c, &gens)
    }

    pub fn order(&self) -> u128 {
        self.a.order() * self.b.order() * self.c.order()
    }
}

/// A triple `(a, b, c)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HeisenbergElem {
    pub a: FinAbElem,
    pub b: FinAbElem,
    pub c: FinAbElem,
}

impl HeisenbergElem {
    pub fn new(mu: &BilinearPairing, a: &[i64], b: &[i64], c: &[i64]) -> Result<Self> {
        Ok(HeisenbergElem {
            a: mu.a.elem(a)?,
            b: mu.b.elem(b)?,
            c: mu.c.elem(c)?,
        })
    }

    pub fn identity(mu: &BilinearPairing) -> Self {
        HeisenbergElem {
            a: mu.a.zero(),
            b: mu.b.zero(),
            c: mu.c.zero(),
        }
    }

    fn belongs(&self, mu: &BilinearPairing) -> bool {
        self.a.group() == &mu.a && self.b.group() == &mu.b && self.c.group() == &mu.c
    }
}

/// `(a+a', b+b', c + μ(a,b') + c')`.
pub fn hh_mul(mu: &BilinearPairing, x: &HeisenbergElem, y: &HeisenbergElem) -> Result<HeisenbergElem> {
    if !x.belongs(mu) || !y.belongs(mu) {
        return Err(Error::GroupMismatch("element does not belong to this pairing".into()));
    }
    Ok(HeisenbergElem {
        a: x.a.add_unchecked(&y.a),
        b: x.b.add_unchecked(&y.b),
        c: x.c.add_unchecked(&mu.apply(&x.a, &y.b)).add_unchecked(&y.c),
    })
}

/// `(−a, −b, μ(a,b) − c)`.
pub fn hh_inv(mu: &BilinearPairing, x: &HeisenbergElem) -> Result<HeisenbergElem> {
    if !x.belongs(mu) {
        return Err(Error::GroupMismatch("element does not belong to this pairing".into()));
    }
    Ok(HeisenbergElem {
        a: x.a.neg(),
        b: x.b.neg(),
        c: mu.apply(&x.a, &x.b).add_unchecked(&x.c.neg()),
    })
}

/// `H(μ)` with indices `a + |A|·(b + |B|·c)` over the component indices.
#[derive(Debug, Clone)]
pub struct HeisenbergGroup {
    pairing: BilinearPairing,
    na: usize,
    nb: usize,
    nc: usize,
    mu: Vec<u32>,
}

/// Largest `|A|·|B|` for which a value table of `μ` is built.
const MU_TABLE_LIMIT: u128 = 1 << 24;

impl HeisenbergGroup {
    pub fn new(pairing: BilinearPairing) -> Result<Self> {
        let (na, nb, nc) = (pairing.a.order(), pairing.b.order(), pairing.c.order());
        Bounds::check("Heisenberg pairing table |A|·|B|", na * nb, MU_TABLE_LIMIT)?;
        Bounds::check("Heisenberg group order", na * nb * nc, u32::MAX as u128)?;
        let (na, nb, nc) = (na as usize, nb as usize, nc as usize);
        let mut mu = Vec::with_capacity(na * nb);
        for x in 0..na {
            let ex = pairing.a.elem_at(x);
            for y in 0..nb {
                mu.push(pairing.c.index_of(&pairing.apply(&ex, &pairing.b.elem_at(y))) as u32);
            }
        }
        Ok(HeisenbergGroup {
            pairing,
            na,
            nb,
            nc,
            mu,
        })
    }

    pub fn pairing(&self) -> &BilinearPairing {
        &self.pairing
    }

    pub fn encode(&self, a: usize, b: usize, c: usize) -> usize {
        a + self.na * (b + self.nb * c)
    }

    pub fn decode(&self, x: usize) -> (usize, usize, usize) {
        (x % self.na, (x / self.na) % self.nb, x / (self.na * self.nb))
    }

    pub fn index_of(&self, x: &HeisenbergElem) -> usize {
        self.encode(
            self.pairing.a.index_of(&x.a),
            self.pairing.b.index_of(&x.b),
            self.pairing.c.index_of(&x.c),
        )
    }

    pub fn elem_at(&self, x: usize) -> HeisenbergElem {
        let (a, b, c) = self.decode(x);
        HeisenbergElem {
            a: self.pairing.a.elem_at(a),
            b: self.pairing.b.elem_at(b),
            c: self.pairing.c.elem_at(c),
        }
    }

    /// `μ` on component indices.
    pub fn mu_index(&self, a: usize, b: usize) -> usize {
        self.mu[a * self.nb + b] as usize
    }

    /// Index of `(0, 0, c)`.
    pub fn central(&self, c: usize) -> usize {
        self.encode(0, 0, c)
    }

    /// The sequence `1 → C → H(μ) → A × B → 1`.
    pub fn extension(self: &Arc<Self>) -> CentralByAbelianExt {
        let quotient = ProductGroup::new(vec![
            Arc::new(self.pairing.a.clone()),
            Arc::new(self.pairing.b.clone()),
        ]);
        let inject = (0..self.nc).map(|c| self.central(c)).collect();
        let project = (0..self.order())
            .map(|x| {
                let (a, b, _) = self.decode(x);
                quotient.join(&[a, b])
            })
            .collect();
        CentralByAbelianExt {
            kernel: Arc::new(self.pairing.c.clone()),
            total: self.clone(),
            quotient: Arc::new(quotient),
            inject,
            project,
        }
    }
}

impl FiniteGroup for HeisenbergGroup {
    fn order(&self) -> usize {
        self.na * self.nb * self.nc
    }
    fn identity(&self) -> usize {
        0
    }
    fn mul(&self, x: usize, y: usize) -> usize {
        let (xa, xb, xc) = self.decode(x);
        let (ya, yb, yc) = self.decode(y);
        let p = &self.pairing;
        let c = p.c.mul(p.c.mul(xc, self.mu_index(xa, yb)), yc);
        self.encode(p.a.mul(xa, ya), p.b.mul(xb, yb), c)
    }
    fn inv(&self, x: usize) -> usize {
        let (a, b, c) = self.decode(x);
        let p = &self.pairing;
        self.encode(p.a.inv(a), p.b.inv(b), p.c.mul(self.mu_index(a, b), p.c.inv(c)))
    }
    fn generators(&self) -> Vec<usize> {
        let p = &self.pairing;
        let mut g: Vec<usize> = FiniteGroup::generators(&p.a)
            .into_iter()
            .map(|a| self.encode(a, 0, 0))
            .collect();
        g.extend(FiniteGroup::generators(&p.b).into_iter().map(|b| self.encode(0, b, 0)));
        g.extend(FiniteGroup::generators(&p.c).into_iter().map(|c| self.encode(0, 0, c)));
        g
    }
}

/// Elements of `g` commuting with every generator.
pub fn centre<G: FiniteGroup + ?Sized>(g: &G, bounds: &Bounds) -> Result<Vec<usize>> {
    let gens = g.generators();
    let work = 2 * g.order() as u128 * gens.len() as u128;
    Bounds::check("centre multiplications", work, bounds.centre_work as u128)?;
    Ok((0..g.order())
        .filter(|&x| gens.iter().all(|&s| g.mul(x, s) == g.mul(s, x)))
        .collect())
}

/// The centre of `H(μ)`, exhaustively.
pub fn center_of(mu: &BilinearPairing, bounds: &Bounds) -> Result<Vec<HeisenbergElem>> {
    let h = HeisenbergGroup::new(mu.clone())?;
    Ok(centre(&h, bounds)?.into_iter().map(|x| h.elem_at(x)).collect())
}

pub fn is_nondegenerate(mu: &BilinearPairing) -> bool {
    mu.is_nondegenerate()
}

/// `(a,b,c) ↦ (λ_A a, λ_B b, κ c)`.
#[derive(Debug, Clone)]
pub struct HeisenbergMorphism {
    pub source: Arc<HeisenbergGroup>,
    pub target: Arc<HeisenbergGroup>,
    pub lambda_a: FinAbHom,
    pub lambda_b: FinAbHom,
    pub kappa: FinAbHom,
    map: Vec<usize>,
}

impl HeisenbergMorphism {
    pub fn apply(&self, x: &HeisenbergElem) -> HeisenbergElem {
        HeisenbergElem {
            a: self.lambda_a.apply(&x.a),
            b: self.lambda_b.apply(&x.b),
            c: self.kappa.apply(&x.c),
        }
    }

    /// The map on indices.
    pub fn index_map(&self) -> &[usize] {
        &self.map
    }
}

/// Builds the induced morphism `H(μ1) → H(μ2)` after checking
/// `κ ∘ μ1 = μ2 ∘ (λ_A × λ_B)` on generators; the result is then confirmed to
/// be a homomorphism exhaustively.
pub fn functorial_map(
    lambda_a: &FinAbHom,
    lambda_b: &FinAbHom,
    kappa: &FinAbHom,
    mu1: &BilinearPairing,
    mu2: &BilinearPairing,
    bounds: &Bounds,
) -> Result<HeisenbergMorphism> {
    let fits = lambda_a.domain == mu1.a
        && lambda_a.codomain == mu2.a
        && lambda_b.domain == mu1.b
        && lambda_b.codomain == mu2.b
        && kappa.domain == mu1.c
        && kappa.codomain == mu2.c;
    if !fits {
        return Err(Error::GroupMismatch("maps do not match the pairings' groups".into()));
    }
    for i in 0..mu1.a.rank() {
        for j in 0..mu1.b.rank() {
            let (x, y) = (mu1.a.gen(i), mu1.b.gen(j));
            let left = kappa.apply(&mu1.apply(&x, &y));
            let right = mu2.apply(&lambda_a.apply(&x), &lambda_b.apply(&y));
            if left != right {
                return Err(Error::SquareNotCommuting(format!(
                    "generators ({i},{j}): κ(μ1) = {left:?}, μ2(λ,λ) = {right:?}"
                )));
            }
        }
    }
    let source = Arc::new(HeisenbergGroup::new(mu1.clone())?);
    let target = Arc::new(HeisenbergGroup::new(mu2.clone())?);
    Bounds::check("functorial_map source order", source.order() as u128, bounds.group_order as u128)?;
    let map: Vec<usize> = (0..source.order())
        .map(|x| {
            let (a, b, c) = source.decode(x);
            target.encode(
                mu2.a.index_of(&lambda_a.apply(&mu1.a.elem_at(a))),
                mu2.b.index_of(&lambda_b.apply(&mu1.b.elem_at(b))),
                mu2.c.index_of(&kappa.apply(&mu1.c.elem_at(c))),
            )
        })
        .collect();
    if let Some((x, y)) = find_hom_violation(&*source, &*target, &|x| map[x], bounds) {
        return Err(Error::Internal(format!(
            "induced map fails the homomorphism law at ({x}, {y})"
        )));
    }
    Ok(HeisenbergMorphism {
        source,
        target,
        lambda_a: lambda_a.clone(),
        lambda_b: lambda_b.clone(),
        kappa: kappa.clone(),
        map,
    })
}

/// Whether every commutator is central, i.e. `[[g,h],k] = 1` for all triples.
pub fn nilpotency_class_le2<G: FiniteGroup + ?Sized>(g: &G, bounds: &Bounds) -> Result<bool> {
    Ok(class_two_violation(g, bounds)?.is_none())
}

/// A triple `(g, h, k)` with `[[g,h],k] ≠ 1`, if any. `k` ranges over
/// generators, which suffices because the centralizer of `[g,h]` is a subgroup.
pub fn class_two_violation<G: FiniteGroup + ?Sized>(
    g: &G,
    bounds: &Bounds,
) -> Result<Option<(usize, usize, usize)>> {
    let n = g.order();
    Bounds::check("class-two check group order", n as u128, bounds.group_order as u128)?;
    let gens = g.generators();
    let mut central = vec![None::<Option<usize>>; n];
    for x in 0..n {
        for y in 0..n {
            let c = g.commutator(x, y);
            let slot = &mut central[c];
            let witness = *slot.get_or_insert_with(|| {
                gens.iter()
                    .copied()
                    .find(|&s| g.mul(c, s) != g.mul(s, c))
            });
            if let Some(k) = witness {
                return Ok(Some((x, y, k)));
            }
        }
    }
    Ok(None)
}

/// `1 → kernel → total → quotient → 1` given by index maps.
#[derive(Clone)]
pub struct CentralByAbelianExt {
    pub kernel: Arc<dyn FiniteGroup>,
    pub total: Arc<dyn FiniteGroup>,
    pub quotient: Arc<dyn FiniteGroup>,
    pub inject: Vec<usize>,
    pub project: Vec<usize>,
}

impl std::fmt::Debug for CentralByAbelianExt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CentralByAbelianExt")
            .field("kernel", &self.kernel.order())
            .field("total", &self.total.order())
            .field("quotient", &self.quotient.order())
            .finish()
    }
}

/// Outcome of an exhaustive check, with human-readable witnesses on failure.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn from_failures(failures: Vec<String>) -> Self {
        CheckReport {
            ok: failures.is_empty(),
            failures,
        }
    }
}

/// Exactness, centrality of the kernel image, abelian quotient.
pub fn verify_extension(ext: &CentralByAbelianExt, bounds: &Bounds) -> Result<CheckReport> {
    let (k, g, q) = (&*ext.kernel, &*ext.total, &*ext.quotient);
    Bounds::check("extension total order", g.order() as u128, bounds.group_order as u128)?;
    let mut failures = Vec::new();
    if ext.inject.len() != k.order() || ext.project.len() != g.order() {
        failures.push("map lengths do not match group orders".to_string());
        return Ok(CheckReport::from_failures(failures));
    }
    if ext.inject.iter().any(|&x| x >= g.order()) || ext.project.iter().any(|&x| x >= q.order()) {
        failures.push("map values out of range".to_string());
        return Ok(CheckReport::from_failures(failures));
    }
    if let Some((x, y)) = find_hom_violation(k, g, &|x| ext.inject[x], bounds) {
        failures.push(format!("inject is not a homomorphism at ({x}, {y})"));
    }
    if let Some((x, y)) = find_hom_violation(g, q, &|x| ext.project[x], bounds) {
        failures.push(format!("project is not a homomorphism at ({x}, {y})"));
    }
    let mut hit = vec![false; g.order()];
    for (x, &y) in ext.inject.iter().enumerate() {
        if hit[y] {
            failures.push(format!("inject is not injective: {x} collides at {y}"));
            break;
        }
        hit[y] = true;
    }
    let mut covered = vec![false; q.order()];
    for &y in &ext.project {
        covered[y] = true;
    }
    if let Some(y) = covered.iter().position(|&c| !c) {
        failures.push(format!("project is not surjective: {y} has no preimage"));
    }
    let e = q.identity();
    for x in 0..g.order() {
        if hit[x] != (ext.project[x] == e) {
            failures.push(format!(
                "image of inject differs from kernel of project at {x}"
            ));
            break;
        }
    }
    let gens = g.generators();
    'outer: for &x in &ext.inject {
        for &s in &gens {
            if g.mul(x, s) != g.mul(s, x) {
                failures.push(format!(
                    "kernel image is not central: [{x}, {s}] = {}",
                    g.commutator(x, s)
                ));
                break 'outer;
            }
        }
    }
    let qg = q.generators();
    'abel: for &x in &qg {
        for &y in &qg {
            if q.mul(x, y) != q.mul(y, x) {
                failures.push(format!("quotient is not abelian: {x}, {y} do not commute"));
                break 'abel;
            }
        }
    }
    Ok(CheckReport::from_failures(failures))
}
