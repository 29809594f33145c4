//! Isotropic sublattice data realizing a non-degenerate pairing
//! `μ: A × A → C` with `C` cyclic, together with the isomorphism
//! `H(μ) ≅ H(μ_D)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::finabel::{FinAbElem, FinAbGroup, FinAbHom};
use crate::heisenberg::{functorial_map, BilinearPairing, CheckReport};
use crate::intmat;
use crate::table::closure;

use super::search::{hermitian_search_ordered, HermitianSolution, SignNormalization};
use super::{mu_from_data, validate_data, GaussianRational, IsotropicSublatticeData, QuotientPairing};

/// Output of [`data_from_heisenberg`].
#[derive(Debug, Clone)]
pub struct LatticeConstruction {
    pub data: IsotropicSublatticeData,
    /// `None` when `A` is trivial.
    pub hermitian: Option<HermitianSolution>,
    /// `S = (α_1 = α, α_2, …)`, the images of the basis of `L_Re` in `A`.
    pub basis: Vec<FinAbElem>,
    pub quotient: QuotientPairing,
    /// `a ↦ [x]` where `Σ x_j α_j = a`.
    pub lambda_a: FinAbHom,
    /// `b ↦ [y]` (class of `i·y`) where `Σ y_j α_j = ψ⁻¹(b)`.
    pub lambda_b: FinAbHom,
    /// `C → Γ/Z ≅ Z/g`, multiplication by `kappa_unit`.
    pub kappa: FinAbHom,
    pub kappa_unit: u64,
}

/// Builds `D` from `μ`: `c = |μ(A, A)|`, `h_M` from the Hermitian search,
/// `L_Re = Z^n` on a minimal generating set containing `α`, entries of
/// `H_L` lifted into `[0, c)`, `Λ_Re = ker(Z^n → A)` in Hermite form,
/// `h = H_L / c`, `Γ = (1/|C|)Z`.
///
/// The search prefers `R(α, α) = 1`, i.e. `Im h_M(α, iα) = −1` for a form
/// linear in its first argument: with the `[0, c)` lift this gives
/// `Im h(ᾱ_1, i·c·ᾱ_1) = −1`, which the lattice condition needs. The other
/// normalization lifts `R(α, α) = −1` to `c − 1` and the pairings
/// `Im h(L_Re, iΛ_Re)` then only generate `(c − 1)Z`.
pub fn data_from_heisenberg(mu: &BilinearPairing, bounds: &Bounds) -> Result<LatticeConstruction> {
    if mu.a != mu.b {
        return Err(Error::GroupMismatch("data_from_heisenberg needs A = B".into()));
    }
    if mu.c.rank() > 1 {
        return Err(Error::NonCyclicCentre(mu.c.factors().to_vec()));
    }
    let g = mu.c.order() as u64;
    let zg = FinAbGroup::cyclic(g);
    let a = &mu.a;

    if a.order() == 1 {
        // Any isomorphism C ≅ Γ/Z works; take the identity on Z/g.
        let data = IsotropicSublatticeData::zero(g);
        let quotient = mu_from_data(&data, bounds)?;
        let q = quotient.group().clone();
        let kappa = cyclic_scaling(&mu.c, &zg, 1)?;
        let out = LatticeConstruction {
            data,
            hermitian: None,
            basis: vec![],
            lambda_a: FinAbHom::zero(a, &q),
            lambda_b: FinAbHom::zero(a, &q),
            quotient,
            kappa,
            kappa_unit: 1,
        };
        return check(out, mu, bounds);
    }

    let sol = hermitian_search_ordered(
        mu,
        bounds,
        &[SignNormalization::Flipped, SignNormalization::Standard],
    )?;
    let c = sol.c;
    let basis = extend_to_generating_set(a, &sol.alpha)?;
    let n = basis.len();

    let h_matrix: Vec<Vec<GaussianRational>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| GaussianRational::int(sol.real_value(&basis[j], &basis[k]) as i64, 0))
                .collect()
        })
        .collect();

    // Λ_Re = {x : Σ x_j α_j = 0}: kernel of [P | D] projected to the first n coordinates.
    let t = a.rank();
    let mut m = vec![vec![BigInt::from(0); n + t]; t];
    for i in 0..t {
        for (j, s) in basis.iter().enumerate() {
            m[i][j] = BigInt::from(s.coords()[i]);
        }
        m[i][n + i] = BigInt::from(a.factors()[i]);
    }
    let ker = intmat::kernel(&m, t, n + t);
    let proj: Vec<Vec<BigInt>> = ker.iter().map(|v| v[..n].to_vec()).collect();
    let hnf = intmat::hermite_rows(&proj)
        .ok_or_else(|| Error::Internal("kernel lattice is not of full rank".into()))?;
    let lambda_basis = hnf
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| intmat::to_i64(v).ok_or_else(|| Error::Internal("lattice entry overflow".into())))
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let data = IsotropicSublatticeData::new(n, h_matrix, c, lambda_basis, g)?;
    let quotient = mu_from_data(&data, bounds)?;
    let q = quotient.group().clone();

    let coeffs = coefficient_table(a, &basis, bounds)?;
    let project = |x: &FinAbElem| -> Result<FinAbElem> {
        let v = coeffs
            .get(&a.index_of(x))
            .ok_or_else(|| Error::Internal(format!("{x:?} not reached by the basis")))?;
        let big: Vec<BigInt> = v.iter().map(|&k| BigInt::from(k)).collect();
        Ok(quotient.presentation.project(&big))
    };
    let lambda_a = FinAbHom::new(
        a.clone(),
        q.clone(),
        (0..t).map(|i| project(&a.gen(i))).collect::<Result<_>>()?,
    )?;
    let lambda_b = FinAbHom::new(
        a.clone(),
        q.clone(),
        (0..t)
            .map(|i| project(&sol.psi_inv.apply(&a.gen(i))))
            .collect::<Result<_>>()?,
    )?;

    let u_inv = mod_inverse(sol.unit, c);
    let w = (1..=g)
        .find(|&w| w % c == u_inv % c && w.gcd(&g) == 1)
        .ok_or_else(|| Error::Internal("no unit lifting φ⁻¹".into()))?;
    let kappa = cyclic_scaling(&mu.c, &zg, w)?;

    let out = LatticeConstruction {
        data,
        hermitian: Some(sol),
        basis,
        quotient,
        lambda_a,
        lambda_b,
        kappa,
        kappa_unit: w,
    };
    check(out, mu, bounds)
}

fn check(out: LatticeConstruction, mu: &BilinearPairing, bounds: &Bounds) -> Result<LatticeConstruction> {
    let report = verify_construction(&out, mu, bounds)?;
    if !report.ok {
        return Err(Error::Internal(format!(
            "constructed lattice data fails verification: {}",
            report.failures.join("; ")
        )));
    }
    Ok(out)
}

/// Validates the data and checks exhaustively that `(λ_A, λ_B, κ)` are
/// isomorphisms inducing `H(μ) ≅ H(μ_D)`.
pub fn verify_construction(
    out: &LatticeConstruction,
    mu: &BilinearPairing,
    bounds: &Bounds,
) -> Result<CheckReport> {
    let mut failures = validate_data(&out.data).failures();
    if let Some(sol) = &out.hermitian {
        failures.extend(sol.verify(mu));
    }
    for (name, f) in [("λ_A", &out.lambda_a), ("λ_B", &out.lambda_b), ("κ", &out.kappa)] {
        if !(f.is_injective() && f.is_surjective()) {
            failures.push(format!("{name} is not an isomorphism"));
        }
    }
    match functorial_map(
        &out.lambda_a,
        &out.lambda_b,
        &out.kappa,
        mu,
        &out.quotient.pairing,
        bounds,
    ) {
        Ok(_) => {}
        Err(e @ Error::BoundExceeded { .. }) => return Err(e),
        Err(e) => failures.push(format!("diagram: {e}")),
    }
    Ok(CheckReport::from_failures(failures))
}

/// `C = Z/g → Z/g`, generator to `w`.
fn cyclic_scaling(c: &FinAbGroup, zg: &FinAbGroup, w: u64) -> Result<FinAbHom> {
    if c.rank() == 0 {
        return Ok(FinAbHom::zero(c, zg));
    }
    FinAbHom::new(c.clone(), zg.clone(), vec![zg.elem(&[w as i64])?])
}

fn mod_inverse(u: u64, c: u64) -> u64 {
    if c <= 1 {
        return 0;
    }
    let e = (u as i128).extended_gcd(&(c as i128));
    e.x.rem_euclid(c as i128) as u64
}

/// A minimal generating set `(α, …)`: `α` replaces the first canonical
/// generator it can stand in for.
fn extend_to_generating_set(a: &FinAbGroup, alpha: &FinAbElem) -> Result<Vec<FinAbElem>> {
    let t = a.rank();
    for j in 0..t {
        let mut s = vec![alpha.clone()];
        s.extend((0..t).filter(|&k| k != j).map(|k| a.gen(k)));
        let idx: Vec<usize> = s.iter().map(|x| a.index_of(x)).collect();
        if closure(a, &idx).iter().all(|&m| m) {
            return Ok(s);
        }
    }
    Err(Error::Internal(format!(
        "{alpha:?} does not extend to a minimal generating set"
    )))
}

/// For each element (by index), coefficients `x` with `Σ x_j s_j` equal to it,
/// `0 ≤ x_j < ord(s_j)`, lexicographically first.
fn coefficient_table(
    a: &FinAbGroup,
    s: &[FinAbElem],
    bounds: &Bounds,
) -> Result<HashMap<usize, Vec<i64>>> {
    let orders: Vec<u64> = s.iter().map(FinAbElem::order).collect();
    let total: u128 = orders.iter().map(|&o| o as u128).product();
    Bounds::check("coefficient enumeration", total, bounds.search_budget as u128)?;
    let mut out = HashMap::new();
    let mut x = vec![0u64; s.len()];
    loop {
        let mut v = a.zero();
        for (xj, sj) in x.iter().zip(s) {
            v = v.add_unchecked(&sj.scale(*xj as i64));
        }
        out.entry(a.index_of(&v))
            .or_insert_with(|| x.iter().map(|&k| k as i64).collect());
        let mut i = s.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            x[i] += 1;
            if x[i] < orders[i] {
                break;
            }
            x[i] = 0;
        }
    }
}
