//! The maps `χ_D`, `f_D`, `σ_D`, `ρ_D` at the level of exponents of
//! `exp(π·z)`, their composition laws, and the action of `H(μ_D)`.
//!
//! A map `(v, z) ↦ (v + s, exp(π(h(v, w) + κ))·z)` is stored as `(s, w, κ)`.
//! Then `ρ_D(l) = (l, l, χ(l) + h(l,l)/2)`, `σ(c) = (0, 0, −2ic)`, and
//! `(s1, w1, κ1) ∘ (s2, w2, κ2) = (s1 + s2, w1 + w2, κ1 + κ2 + h(s2, w1))`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::heisenberg::{CheckReport, HeisenbergGroup};
use crate::intmat;
use crate::table::FiniteGroup;

use super::gaussian::{frac, rat};
use super::{mu_from_data, GaussianRational, IsotropicSublatticeData, LatticeVec, QuotientPairing};

/// The scalar `exp(π·value)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentValue {
    pub value: GaussianRational,
    /// Set when only `value mod 2i` is meaningful.
    pub modulo_two_i: bool,
}

impl ExponentValue {
    pub fn new(value: GaussianRational) -> Self {
        ExponentValue {
            value,
            modulo_two_i: true,
        }
    }

    pub fn zero() -> Self {
        Self::new(GaussianRational::zero())
    }

    /// Whether both represent the same scalar.
    pub fn same_scalar(&self, other: &ExponentValue) -> bool {
        (&self.value - &other.value).in_two_i_z()
    }

    /// Whether the scalar is 1.
    pub fn is_trivial(&self) -> bool {
        self.value.in_two_i_z()
    }

    pub fn add(&self, other: &ExponentValue) -> ExponentValue {
        ExponentValue::new(&self.value + &other.value)
    }
}

/// `i · Im h(l_Re, l'_Im)` helper values.
fn im_h_re_im(d: &IsotropicSublatticeData, l: &LatticeVec, lp: &LatticeVec) -> BigRational {
    d.h_lattice(&l.real_part(), &lp.imaginary_part()).im
}

/// `χ_D(l) = exp(πi·Im h(l_Re, l_Im))`.
pub fn chi(d: &IsotropicSublatticeData, l: &LatticeVec) -> ExponentValue {
    ExponentValue::new(GaussianRational::imag(im_h_re_im(d, l, l)))
}

/// `f_D(l, v) = χ_D(l)·exp(π h(v, l) + (π/2) h(l, l))`.
pub fn f_exponent(d: &IsotropicSublatticeData, l: &LatticeVec, v: &[GaussianRational]) -> ExponentValue {
    let lc = l.to_complex();
    let half = frac(1, 2);
    let z = &(&chi(d, l).value + &d.h(v, &lc)) + &d.h(&lc, &lc).scale(&half);
    ExponentValue::new(z)
}

/// `(v, z) ↦ (v + shift, exp(π(h(v, linear) + constant))·z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMultiplier {
    pub shift: Vec<GaussianRational>,
    pub linear: Vec<GaussianRational>,
    pub constant: GaussianRational,
}

impl AffineMultiplier {
    pub fn identity(n: usize) -> Self {
        AffineMultiplier {
            shift: vec![GaussianRational::zero(); n],
            linear: vec![GaussianRational::zero(); n],
            constant: GaussianRational::zero(),
        }
    }

    pub fn rho(d: &IsotropicSublatticeData, l: &LatticeVec) -> Self {
        let lc = l.to_complex();
        let constant = &chi(d, l).value + &d.h(&lc, &lc).scale(&frac(1, 2));
        AffineMultiplier {
            shift: lc.clone(),
            linear: lc,
            constant,
        }
    }

    /// `σ(c)`: multiplication by `exp(−2πic)`.
    pub fn sigma(n: usize, c: &BigRational) -> Self {
        AffineMultiplier {
            constant: GaussianRational::imag(-(c * rat(2))),
            ..Self::identity(n)
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, d: &IsotropicSublatticeData, other: &AffineMultiplier) -> Self {
        let add = |a: &[GaussianRational], b: &[GaussianRational]| -> Vec<GaussianRational> {
            a.iter().zip(b).map(|(x, y)| x + y).collect()
        };
        AffineMultiplier {
            shift: add(&self.shift, &other.shift),
            linear: add(&self.linear, &other.linear),
            constant: &(&self.constant + &other.constant) + &d.h(&other.shift, &self.linear),
        }
    }

    /// Image of `(v, exp(π·e))`, returned as `(v', e')`.
    pub fn apply(
        &self,
        d: &IsotropicSublatticeData,
        v: &[GaussianRational],
        e: &GaussianRational,
    ) -> (Vec<GaussianRational>, GaussianRational) {
        let v2 = v.iter().zip(&self.shift).map(|(a, b)| a + b).collect();
        let e2 = &(e + &d.h(v, &self.linear)) + &self.constant;
        (v2, e2)
    }

    /// Same shift and linear part, constants equal mod `2i`.
    pub fn same_map(&self, other: &AffineMultiplier) -> bool {
        self.shift == other.shift
            && self.linear == other.linear
            && (&self.constant - &other.constant).in_two_i_z()
    }
}

/// Outcome of [`check_cocycle_identities`]: per identity, whether it holds
/// and the exponent difference (left minus right).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CocycleCheck {
    pub chi: bool,
    pub f: bool,
    pub rho: bool,
    pub chi_difference: GaussianRational,
    pub f_difference: GaussianRational,
    pub rho_difference: GaussianRational,
}

impl CocycleCheck {
    pub fn all(&self) -> bool {
        self.chi && self.f && self.rho
    }
}

/// Checks, modulo `2i`:
/// `χ(l+l') = χ(l)χ(l')·exp(πi Im h(l', l))·exp(2πi Im h(l_Re, l'_Im))`,
/// `f(l+l', v) = f(l, l'+v) f(l', v)·exp(2πi Im h(l_Re, l'_Im))`,
/// `ρ(l+l') = ρ(l) ∘ ρ(l') ∘ σ(−Im h(l_Re, l'_Im))`.
pub fn check_cocycle_identities(
    d: &IsotropicSublatticeData,
    l: &LatticeVec,
    lp: &LatticeVec,
    v: &[GaussianRational],
) -> CocycleCheck {
    let sum = l.add(lp);
    let cross = im_h_re_im(d, l, lp);
    let two_i_cross = GaussianRational::imag(&cross * rat(2));

    let lhs = chi(d, &sum).value;
    let rhs = &(&(&chi(d, l).value + &chi(d, lp).value)
        + &GaussianRational::imag(d.h_lattice(lp, l).im))
        + &two_i_cross;
    let chi_difference = &lhs - &rhs;

    let lpv: Vec<GaussianRational> = lp.to_complex().iter().zip(v).map(|(a, b)| a + b).collect();
    let lhs = f_exponent(d, &sum, v).value;
    let rhs = &(&f_exponent(d, l, &lpv).value + &f_exponent(d, lp, v).value) + &two_i_cross;
    let f_difference = &lhs - &rhs;

    let n = l.dim();
    let left = AffineMultiplier::rho(d, &sum);
    let right = AffineMultiplier::rho(d, l)
        .compose(d, &AffineMultiplier::rho(d, lp))
        .compose(d, &AffineMultiplier::sigma(n, &-cross));
    let rho_difference = &left.constant - &right.constant;
    let rho = left.shift == right.shift && left.linear == right.linear && rho_difference.in_two_i_z();

    CocycleCheck {
        chi: chi_difference.in_two_i_z(),
        f: f_difference.in_two_i_z(),
        rho,
        chi_difference,
        f_difference,
        rho_difference,
    }
}

/// `ρ_D(l)`, with the multiplier `v ↦ f_D(l, v)` determined by `l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TwistedTranslation {
    pub shift: LatticeVec,
}

impl TwistedTranslation {
    pub fn new(shift: LatticeVec) -> Self {
        TwistedTranslation { shift }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(LatticeVec::zero(n))
    }

    pub fn multiplier(&self, d: &IsotropicSublatticeData, v: &[GaussianRational]) -> ExponentValue {
        f_exponent(d, &self.shift, v)
    }

    pub fn as_affine(&self, d: &IsotropicSublatticeData) -> AffineMultiplier {
        AffineMultiplier::rho(d, &self.shift)
    }
}

/// `ρ(l) ∘ ρ(l') = ρ(l + l') ∘ σ(Im h(l_Re, l'_Im))`: returns the translation
/// by `l + l'` and the correction `exp(−2πi Im h(l_Re, l'_Im))`.
pub fn twisted_compose(
    t1: &TwistedTranslation,
    t2: &TwistedTranslation,
    d: &IsotropicSublatticeData,
) -> (TwistedTranslation, ExponentValue) {
    let cross = im_h_re_im(d, &t1.shift, &t2.shift);
    (
        TwistedTranslation::new(t1.shift.add(&t2.shift)),
        ExponentValue::new(GaussianRational::imag(-(cross * rat(2)))),
    )
}

/// Reduces a map in the group generated by `ρ_D(L)` and `σ` modulo
/// left composition with `ρ_D(Λ)`: the shift is brought into the Hermite
/// fundamental domain of `Λ_Re ⊕ iΛ_Re` and the constant into `[0, 2)` for
/// its imaginary part.
struct Canonicalizer<'a> {
    d: &'a IsotropicSublatticeData,
    hnf: intmat::IntMat,
}

type CanonKey = (Vec<BigInt>, Vec<BigInt>, BigRational, BigRational);

impl<'a> Canonicalizer<'a> {
    fn new(d: &'a IsotropicSublatticeData) -> Result<Self> {
        let big: intmat::IntMat = d
            .lambda_basis
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let hnf = intmat::hermite_rows(&big)
            .ok_or_else(|| Error::InvalidInput("Λ_Re basis is singular".into()))?;
        Ok(Canonicalizer { d, hnf })
    }

    fn lattice_part(&self, s: &[GaussianRational]) -> Result<(LatticeVec, Vec<BigInt>, Vec<BigInt>)> {
        let to_int = |q: &BigRational| -> Result<BigInt> {
            if q.is_integer() {
                Ok(q.to_integer())
            } else {
                Err(Error::Internal("shift is not a lattice vector".into()))
            }
        };
        let re: Vec<BigInt> = s.iter().map(|z| to_int(&z.re)).collect::<Result<_>>()?;
        let im: Vec<BigInt> = s.iter().map(|z| to_int(&z.im)).collect::<Result<_>>()?;
        let (r_re, k_re) = intmat::reduce_mod_hermite(&re, &self.hnf);
        let (r_im, k_im) = intmat::reduce_mod_hermite(&im, &self.hnf);
        let n = self.d.n;
        let comb = |k: &[BigInt]| -> Result<Vec<i64>> {
            (0..n)
                .map(|j| {
                    let v: BigInt = (0..n).map(|i| &k[i] * &self.hnf[i][j]).sum();
                    v.to_i64().ok_or_else(|| Error::Internal("lattice coordinate overflow".into()))
                })
                .collect()
        };
        Ok((LatticeVec::new(comb(&k_re)?, comb(&k_im)?), r_re, r_im))
    }

    fn canonical(&self, f: &AffineMultiplier) -> Result<(AffineMultiplier, CanonKey)> {
        let (lam, r_re, r_im) = self.lattice_part(&f.shift)?;
        let g = AffineMultiplier::rho(self.d, &lam.neg()).compose(self.d, f);
        let two = rat(2);
        let im = &g.constant.im - (&g.constant.im / &two).floor() * &two;
        let key = (r_re, r_im, g.constant.re.clone(), im.clone());
        let reduced = AffineMultiplier {
            constant: GaussianRational::new(g.constant.re.clone(), im),
            ..g
        };
        Ok((reduced, key))
    }
}

fn big_lift(x: &[BigInt]) -> Result<Vec<i64>> {
    x.iter()
        .map(|v| v.to_i64().ok_or_else(|| Error::Internal("lift overflow".into())))
        .collect()
}

/// `H(μ_D)` with the affine map `ρ(l_Im) ∘ σ(c) ∘ ρ(l_Re)` attached to each
/// element, normalized modulo `ρ_D(Λ)`.
pub struct QuotientAction {
    pub group: HeisenbergGroup,
    pub pairing: QuotientPairing,
    reps: Vec<AffineMultiplier>,
    keys: Vec<CanonKey>,
}

impl QuotientAction {
    /// Whether elements `x` and `y` act identically.
    pub fn same_action(&self, x: usize, y: usize) -> bool {
        self.keys[x] == self.keys[y]
    }

    /// Number of distinct maps among the given elements.
    pub fn distinct_actions(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().map(|x| &self.keys[x]).collect::<HashSet<_>>().len()
    }

    /// Normalized affine map of element `x`.
    pub fn representative(&self, x: usize) -> &AffineMultiplier {
        &self.reps[x]
    }
}

/// Builds the action of `H(μ_D)` modulo `ρ_D(Λ)`.
pub fn quotient_action(d: &IsotropicSublatticeData, bounds: &Bounds) -> Result<QuotientAction> {
    let mut failures = Vec::new();
    let out = quotient_action_checked(d, bounds, &mut failures)?;
    if let Some(f) = failures.first() {
        return Err(Error::Internal(f.clone()));
    }
    Ok(out)
}

fn quotient_action_checked(
    d: &IsotropicSublatticeData,
    bounds: &Bounds,
    failures: &mut Vec<String>,
) -> Result<QuotientAction> {
    let n = d.n;
    let q = mu_from_data(d, bounds)?;
    let heis = HeisenbergGroup::new(q.pairing.clone())?;
    let order = heis.order();
    Bounds::check("action group order", order as u128, bounds.group_order as u128)?;
    let canon = Canonicalizer::new(d)?;
    let g = d.gamma_denominator as i64;
    let group = q.group().clone();
    let zg = &q.pairing.c;

    let build = |re: &[i64], im: &[i64], c: &BigRational| -> AffineMultiplier {
        AffineMultiplier::rho(d, &LatticeVec::imaginary(im.to_vec()))
            .compose(d, &AffineMultiplier::sigma(n, c))
            .compose(d, &AffineMultiplier::rho(d, &LatticeVec::real(re.to_vec())))
    };
    let c_value = |x: usize| -> BigRational {
        let c = zg.elem_at(x);
        frac(c.coords().first().copied().unwrap_or(0) as i64, g)
    };

    let mut reps = Vec::with_capacity(order);
    let mut keys = Vec::with_capacity(order);
    for x in 0..order {
        let (ai, bi, ci) = heis.decode(x);
        let re = big_lift(&q.presentation.lift_elem(&group.elem_at(ai)))?;
        let im = big_lift(&q.presentation.lift_elem(&group.elem_at(bi)))?;
        let c = c_value(ci);
        let (r, k) = canon.canonical(&build(&re, &im, &c))?;
        // Other representatives of the same cosets give the same map.
        for s in &d.lambda_basis {
            let re2: Vec<i64> = re.iter().zip(s).map(|(a, b)| a + b).collect();
            let im2: Vec<i64> = im.iter().zip(s).map(|(a, b)| a + b).collect();
            for (rr, ii, cc) in [(&re2, &im, c.clone()), (&re, &im2, c.clone()), (&re, &im, &c + BigRational::one())] {
                if canon.canonical(&build(rr, ii, &cc))?.1 != k {
                    failures.push(format!("ρ depends on the representative of element {x}"));
                }
            }
        }
        reps.push(r);
        keys.push(k);
    }
    Ok(QuotientAction {
        group: heis,
        pairing: q,
        reps,
        keys,
    })
}

/// Checks that (a) `ρ_D` restricted to `L_Re ⊕ Λ_Im` and to `Λ_Re ⊕ L_Im`
/// composes with trivial corrections, (b) `(x, y, c) ↦ ρ(l_Im) ∘ σ(c) ∘
/// ρ(l_Re)` is a well-defined injective homomorphism from `H(μ_D)` modulo
/// `ρ_D(Λ)`, and (c) `σ` is injective on `Γ/Z`.
pub fn verify_action_morphisms(d: &IsotropicSublatticeData, bounds: &Bounds) -> Result<CheckReport> {
    let n = d.n;
    let mut failures = Vec::new();
    let e = |j: usize| {
        let mut v = vec![0; n];
        v[j] = 1;
        v
    };

    // (a) corrections are bilinear in (l, l'), so generator pairs suffice.
    let re_gens: Vec<LatticeVec> = (0..n).map(|j| LatticeVec::real(e(j))).collect();
    let im_gens: Vec<LatticeVec> = (0..n).map(|j| LatticeVec::imaginary(e(j))).collect();
    let lam_re: Vec<LatticeVec> = (0..n).map(|k| d.lambda_real(k)).collect();
    let lam_im: Vec<LatticeVec> = (0..n).map(|k| d.lambda_imaginary(k)).collect();
    for (name, gens) in [
        ("L_Re ⊕ Λ_Im", [re_gens.clone(), lam_im].concat()),
        ("Λ_Re ⊕ L_Im", [lam_re, im_gens].concat()),
    ] {
        for x in &gens {
            for y in &gens {
                let (_, corr) = twisted_compose(&TwistedTranslation::new(x.clone()), &TwistedTranslation::new(y.clone()), d);
                if !corr.is_trivial() {
                    failures.push(format!(
                        "ρ_D on {name}: correction {:?} for ({x:?}, {y:?})",
                        corr.value
                    ));
                }
            }
        }
    }

    // (b) quotient level.
    let QuotientAction {
        group: heis,
        reps,
        keys,
        ..
    } = quotient_action_checked(d, bounds, &mut failures)?;
    let order = heis.order();
    let canon = Canonicalizer::new(d)?;
    let g = d.gamma_denominator as i64;

    let distinct: HashSet<&CanonKey> = keys.iter().collect();
    if distinct.len() != order {
        failures.push(format!(
            "ρ is not injective: {} distinct maps for {order} elements",
            distinct.len()
        ));
    }

    let all_pairs = (order as u64).saturating_mul(order as u64) <= bounds.centre_work;
    let second: Vec<usize> = if all_pairs {
        (0..order).collect()
    } else {
        heis.generators()
    };
    'hom: for x in 0..order {
        for &y in &second {
            let composed = reps[x].compose(d, &reps[y]);
            let (_, k) = canon.canonical(&composed)?;
            if k != keys[heis.mul(x, y)] {
                failures.push(format!("ρ(x)ρ(y) ≠ ρ(xy) at ({x}, {y})"));
                break 'hom;
            }
        }
    }

    // (c) σ on Γ/Z.
    let mut seen = HashSet::new();
    for c in 0..g {
        let (_, k) = canon.canonical(&AffineMultiplier::sigma(n, &frac(c, g)))?;
        if !seen.insert(k) {
            failures.push(format!("σ is not injective on Γ/Z at {c}/{g}"));
        }
    }
    if !AffineMultiplier::sigma(n, &BigRational::one()).same_map(&AffineMultiplier::identity(n)) {
        failures.push("σ(1) is not the identity".into());
    }

    Ok(CheckReport::from_failures(failures))
}

/// Exponent arithmetic for the cocycle identities with every quantity scaled
/// to a Gaussian integer over the common denominator `2·q·c·N`, where `q`
/// clears the denominators of `H` and `v` ranges over `(1/N)·Z[i]^n`.
#[derive(Debug, Clone)]
pub struct ScaledCocycle {
    n: usize,
    hq: Vec<Vec<(i128, i128)>>,
    grid: i128,
    den: i128,
}

type Cx = (i128, i128);

fn cadd(a: Cx, b: Cx) -> Cx {
    (a.0 + b.0, a.1 + b.1)
}

fn csub(a: Cx, b: Cx) -> Cx {
    (a.0 - b.0, a.1 - b.1)
}

fn cscale(a: Cx, k: i128) -> Cx {
    (a.0 * k, a.1 * k)
}

/// Differences (left minus right) of the three identities, as numerators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaledDifferences {
    pub chi: (i128, i128),
    pub f: (i128, i128),
    pub rho: (i128, i128),
}

impl ScaledCocycle {
    pub fn new(d: &IsotropicSublatticeData, grid: u64) -> Result<Self> {
        let mut q = BigInt::one();
        for z in d.h_matrix.iter().flatten() {
            q = q.lcm(&z.denominator());
        }
        let qr = BigRational::from_integer(q.clone());
        let to = |x: &BigRational| -> Result<i128> {
            (x * &qr)
                .to_integer()
                .to_i128()
                .filter(|v| v.abs() < 1 << 40)
                .ok_or_else(|| Error::InvalidInput("H entries too large for scaled arithmetic".into()))
        };
        let hq = d
            .h_matrix
            .iter()
            .map(|r| r.iter().map(|z| Ok((to(&z.re)?, to(&z.im)?))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let q = q.to_i128().filter(|v| v.abs() < 1 << 20).ok_or_else(|| {
            Error::InvalidInput("H denominators too large for scaled arithmetic".into())
        })?;
        let grid = grid.max(1) as i128;
        Ok(ScaledCocycle {
            n: d.n,
            hq,
            grid,
            den: 2 * q * d.c as i128 * grid,
        })
    }

    pub fn denominator(&self) -> i128 {
        self.den
    }

    pub fn grid(&self) -> i128 {
        self.grid
    }

    /// `Σ u_j (qH)_jk conj(w_k)`.
    fn herm(&self, u: &[Cx], w: &[Cx]) -> Cx {
        self.herm_by(|j| u[j], |k| w[k])
    }

    fn herm_by(&self, u: impl Fn(usize) -> Cx, w: impl Fn(usize) -> Cx) -> Cx {
        let mut acc = (0, 0);
        for j in 0..self.n {
            let (ur, ui) = u(j);
            if ur == 0 && ui == 0 {
                continue;
            }
            for k in 0..self.n {
                let (wr, wi) = w(k);
                let (hr, hi) = self.hq[j][k];
                // u·H
                let (pr, pi) = (ur * hr - ui * hi, ur * hi + ui * hr);
                // ·conj(w)
                acc.0 += pr * wr + pi * wi;
                acc.1 += pi * wr - pr * wi;
            }
        }
        acc
    }

    /// `h(x_Re, i·y_Im)`, scaled.
    fn h_re_im(&self, x: &[Cx], y: &[Cx]) -> Cx {
        cscale(self.herm_by(|j| (x[j].0, 0), |k| (0, y[k].1)), 2 * self.grid)
    }

    fn vec_of(l: &LatticeVec) -> Vec<Cx> {
        l.re.iter().zip(&l.im).map(|(&a, &b)| (a as i128, b as i128)).collect()
    }

    /// `h(u, w)` for lattice vectors, scaled.
    fn h_int(&self, u: &[Cx], w: &[Cx]) -> Cx {
        cscale(self.herm(u, w), 2 * self.grid)
    }

    fn chi_s(&self, l: &[Cx]) -> Cx {
        (0, self.h_re_im(l, l).1)
    }

    /// `f(l, v)` with `v = v_num / N`.
    fn f_s(&self, l: &[Cx], v_num: &[Cx]) -> Cx {
        let hv = cscale(self.herm(v_num, l), 2);
        let hll = cscale(self.herm(l, l), self.grid);
        cadd(cadd(self.chi_s(l), hv), hll)
    }

    /// `2i·Im h(l_Re, l'_Im)`, scaled.
    fn two_i_cross(&self, l: &[Cx], lp: &[Cx]) -> Cx {
        (0, 2 * self.h_re_im(l, lp).1)
    }

    /// `f(l+l', v) − f(l, l'+v) − f(l', v) − 2i·Im h(l_Re, l'_Im)`.
    fn f_difference(&self, a: &[Cx], b: &[Cx], s: &[Cx], v: &[Cx], cross: Cx) -> Cx {
        let bv: Vec<Cx> = b
            .iter()
            .zip(v)
            .map(|(&x, &y)| cadd(cscale(x, self.grid), y))
            .collect();
        csub(
            self.f_s(s, v),
            cadd(cadd(self.f_s(a, &bv), self.f_s(b, v)), cross),
        )
    }

    /// The `f` difference for every `v`, sharing the per-pair work.
    fn f_differences<'a>(
        &'a self,
        l: &LatticeVec,
        lp: &LatticeVec,
        vs: &'a [Vec<(i64, i64)>],
    ) -> impl Iterator<Item = (&'a Vec<(i64, i64)>, Cx)> + 'a {
        let (a, b) = (Self::vec_of(l), Self::vec_of(lp));
        let s: Vec<Cx> = a.iter().zip(&b).map(|(&x, &y)| cadd(x, y)).collect();
        let cross = self.two_i_cross(&a, &b);
        let mut v: Vec<Cx> = vec![(0, 0); self.n];
        vs.iter().map(move |vn| {
            for (slot, &(x, y)) in v.iter_mut().zip(vn) {
                *slot = (x as i128, y as i128);
            }
            (vn, self.f_difference(&a, &b, &s, &v, cross))
        })
    }

    pub fn differences(&self, l: &LatticeVec, lp: &LatticeVec, v_num: &[(i64, i64)]) -> ScaledDifferences {
        let (a, b) = (Self::vec_of(l), Self::vec_of(lp));
        let s: Vec<Cx> = a.iter().zip(&b).map(|(&x, &y)| cadd(x, y)).collect();
        let v: Vec<Cx> = v_num.iter().map(|&(x, y)| (x as i128, y as i128)).collect();
        let cross = self.two_i_cross(&a, &b);

        let chi = csub(
            self.chi_s(&s),
            cadd(
                cadd(self.chi_s(&a), self.chi_s(&b)),
                cadd((0, self.h_int(&b, &a).1), cross),
            ),
        );

        let f = self.f_difference(&a, &b, &s, &v, cross);

        // ρ(l) = (l, l, κ(l)); ρ(l)∘ρ(l')∘σ(c) has constant κ(l) + κ(l') + h(l', l) − 2ic.
        let kappa = |x: &[Cx]| cadd(self.chi_s(x), cscale(self.herm(x, x), self.grid));
        let sigma = cross; // −2i·(−Im h(l_Re, l'_Im))
        let rho = csub(
            kappa(&s),
            cadd(cadd(kappa(&a), kappa(&b)), cadd(self.h_int(&b, &a), sigma)),
        );
        ScaledDifferences { chi, f, rho }
    }

    /// Whether a scaled exponent lies in `2i·Z`.
    pub fn in_two_i_z(&self, z: (i128, i128)) -> bool {
        z.0 == 0 && z.1.rem_euclid(2 * self.den) == 0
    }

    pub fn to_exact(&self, z: (i128, i128)) -> GaussianRational {
        let d = BigInt::from(self.den);
        GaussianRational::new(
            BigRational::new(BigInt::from(z.0), d.clone()),
            BigRational::new(BigInt::from(z.1), d),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// Counts from a sweep of the identities.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub pairs: u64,
    pub triples: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl SweepSummary {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, what: &str, l: &LatticeVec, lp: &LatticeVec, v: &[(i64, i64)], z: GaussianRational) {
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(format!(
                "{what} identity fails at l={l:?}, l'={lp:?}, v·N={v:?}: difference {z:?}"
            ));
        }
    }
}

/// Every lattice vector with all `2n` coordinates in `[−r, r]`.
pub fn box_vectors(n: usize, r: i64) -> Vec<LatticeVec> {
    let side = (2 * r + 1) as usize;
    let total = side.pow(2 * n as u32);
    (0..total)
        .map(|mut idx| {
            let mut coords = Vec::with_capacity(2 * n);
            for _ in 0..2 * n {
                coords.push((idx % side) as i64 - r);
                idx /= side;
            }
            LatticeVec::new(coords[..n].to_vec(), coords[n..].to_vec())
        })
        .collect()
}

/// Numerators of `v ∈ (1/N)Z[i]^n` with real and imaginary parts in `[0, 1)`.
pub fn cell_grid(n: usize, grid: i64) -> Vec<Vec<(i64, i64)>> {
    let side = grid as usize;
    let total = side.pow(2 * n as u32);
    (0..total)
        .map(|mut idx| {
            let mut coords = Vec::with_capacity(2 * n);
            for _ in 0..2 * n {
                coords.push((idx % side) as i64);
                idx /= side;
            }
            (0..n).map(|j| (coords[2 * j], coords[2 * j + 1])).collect()
        })
        .collect()
}

/// Checks the `χ` and `ρ` identities for every `(l, l')` and the `f` identity
/// for every `(l, l', v)`, modulo `2i`.
pub fn sweep(
    s: &ScaledCocycle,
    ls: &[LatticeVec],
    lps: &[LatticeVec],
    vs: &[Vec<(i64, i64)>],
) -> SweepSummary {
    let mut out = SweepSummary::default();
    let zero = vec![(0, 0); s.dim()];
    for l in ls {
        for lp in lps {
            out.pairs += 1;
            let d0 = s.differences(l, lp, &zero);
            if !s.in_two_i_z(d0.chi) {
                out.record("χ", l, lp, &zero, s.to_exact(d0.chi));
            }
            if !s.in_two_i_z(d0.rho) {
                out.record("ρ", l, lp, &zero, s.to_exact(d0.rho));
            }
            for (v, f) in s.f_differences(l, lp, vs) {
                out.triples += 1;
                if !s.in_two_i_z(f) {
                    out.record("f", l, lp, v, s.to_exact(f));
                }
            }
        }
    }
    out
}

/// All three differences vanish identically (not just mod `2i`) on
/// `{−1, 0, 1}^{4n} × {0, 1/N, 2/N}^{2n}`. Each difference is a polynomial of
/// degree at most 2 in every real coordinate of `(l, l', v)`, so vanishing on
/// three values per coordinate forces it to be the zero polynomial; the
/// identities then hold for all `l, l' ∈ L` and all `v ∈ V`.
pub fn polynomial_certificate(s: &ScaledCocycle) -> SweepSummary {
    let n = s.dim();
    let ls = box_vectors(n, 1);
    let vs: Vec<Vec<(i64, i64)>> = {
        let pts = 3usize.pow(2 * n as u32);
        (0..pts)
            .map(|mut idx| {
                let mut c = Vec::with_capacity(2 * n);
                for _ in 0..2 * n {
                    c.push((idx % 3) as i64);
                    idx /= 3;
                }
                (0..n).map(|j| (c[2 * j], c[2 * j + 1])).collect()
            })
            .collect()
    };
    let mut out = SweepSummary::default();
    let zero = vec![(0, 0); n];
    for l in &ls {
        for lp in &ls {
            out.pairs += 1;
            let d0 = s.differences(l, lp, &zero);
            if d0.chi != (0, 0) {
                out.record("χ (exact)", l, lp, &zero, s.to_exact(d0.chi));
            }
            if d0.rho != (0, 0) {
                out.record("ρ (exact)", l, lp, &zero, s.to_exact(d0.rho));
            }
            for (v, f) in s.f_differences(l, lp, &vs) {
                out.triples += 1;
                if f != (0, 0) {
                    out.record("f (exact)", l, lp, v, s.to_exact(f));
                }
            }
        }
    }
    out
}

/// Grid `v` as exact coordinates.
pub fn grid_point(v_num: &[(i64, i64)], grid: i64) -> Vec<GaussianRational> {
    v_num
        .iter()
        .map(|&(a, b)| GaussianRational::new(frac(a, grid), frac(b, grid)))
        .collect()
}

/// Whether a scaled difference and the exact one agree.
pub fn scaled_matches_exact(s: &ScaledCocycle, scaled: (i128, i128), exact: &GaussianRational) -> bool {
    &s.to_exact(scaled) == exact
}
