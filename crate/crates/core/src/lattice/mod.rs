//! Isotropic sublattice data `(h, L, Λ, Γ)` over `Z[i]`, the finite pairing it
//! induces on lattice quotients, and exact exponent-level cocycle checks.
//!
//! Conventions: `L = L_Re ⊕ i·L_Re` with `L_Re = Z^n`, `V = C^n` in the same
//! basis, `h(u, w) = (1/c) Σ u_j H_jk conj(w_k)` (linear in the first
//! argument), `Λ = Λ_Re ⊕ i·Λ_Re` with `Λ_Re` spanned by the rows of
//! `lambda_basis`, and `Γ = (1/g)·Z`.

pub mod cocycle;
pub mod construct;
pub mod gaussian;
pub mod search;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::finabel::{FinAbGroup, Presentation};
use crate::heisenberg::BilinearPairing;

pub use cocycle::{
    check_cocycle_identities, chi, f_exponent, quotient_action, twisted_compose, verify_action_morphisms,
    CocycleCheck, ExponentValue, QuotientAction, TwistedTranslation,
};
pub use construct::{data_from_heisenberg, verify_construction, LatticeConstruction};
pub use gaussian::GaussianRational;
pub use search::{hermitian_search, hermitian_search_ordered, HermitianSolution, SignNormalization};

/// `l = Σ re_j e_j + i Σ im_j e_j` in the basis of `L_Re`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeVec {
    pub re: Vec<i64>,
    pub im: Vec<i64>,
}

impl LatticeVec {
    pub fn new(re: Vec<i64>, im: Vec<i64>) -> Self {
        assert_eq!(re.len(), im.len(), "real and imaginary parts differ in length");
        LatticeVec { re, im }
    }

    pub fn zero(n: usize) -> Self {
        LatticeVec::new(vec![0; n], vec![0; n])
    }

    pub fn real(re: Vec<i64>) -> Self {
        let n = re.len();
        LatticeVec::new(re, vec![0; n])
    }

    pub fn imaginary(im: Vec<i64>) -> Self {
        let n = im.len();
        LatticeVec::new(vec![0; n], im)
    }

    pub fn dim(&self) -> usize {
        self.re.len()
    }

    pub fn is_zero(&self) -> bool {
        self.re.iter().chain(&self.im).all(|&x| x == 0)
    }

    pub fn add(&self, o: &LatticeVec) -> LatticeVec {
        LatticeVec::new(
            self.re.iter().zip(&o.re).map(|(a, b)| a + b).collect(),
            self.im.iter().zip(&o.im).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn neg(&self) -> LatticeVec {
        LatticeVec::new(
            self.re.iter().map(|a| -a).collect(),
            self.im.iter().map(|a| -a).collect(),
        )
    }

    /// `l_Re` as a lattice vector.
    pub fn real_part(&self) -> LatticeVec {
        LatticeVec::real(self.re.clone())
    }

    /// `l_Im` (which is `i` times a real vector) as a lattice vector.
    pub fn imaginary_part(&self) -> LatticeVec {
        LatticeVec::imaginary(self.im.clone())
    }

    pub fn to_complex(&self) -> Vec<GaussianRational> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(&a, &b)| GaussianRational::int(a, b))
            .collect()
    }
}

/// The data `(n, H, c, Λ_Re, g)` with `h = H/c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsotropicSublatticeData {
    pub n: usize,
    #[serde(rename = "H")]
    pub h_matrix: Vec<Vec<GaussianRational>>,
    pub c: u64,
    /// Rows are a basis of `Λ_Re` in the basis of `L_Re`.
    #[serde(rename = "lambda")]
    pub lambda_basis: Vec<Vec<i64>>,
    pub gamma_denominator: u64,
}

impl IsotropicSublatticeData {
    /// Checks shapes and positivity only; see [`validate_data`] for the
    /// defining conditions.
    pub fn new(
        n: usize,
        h_matrix: Vec<Vec<GaussianRational>>,
        c: u64,
        lambda_basis: Vec<Vec<i64>>,
        gamma_denominator: u64,
    ) -> Result<Self> {
        if c == 0 || gamma_denominator == 0 {
            return Err(Error::InvalidInput("c and gamma_denominator must be positive".into()));
        }
        let square = |m: usize, rows: &[usize]| rows.len() == m && rows.iter().all(|&r| r == m);
        let h_shape: Vec<usize> = h_matrix.iter().map(Vec::len).collect();
        let l_shape: Vec<usize> = lambda_basis.iter().map(Vec::len).collect();
        if !square(n, &h_shape) || !square(n, &l_shape) {
            return Err(Error::InvalidInput(format!(
                "H and lambda must be {n}×{n}"
            )));
        }
        Ok(IsotropicSublatticeData {
            n,
            h_matrix,
            c,
            lambda_basis,
            gamma_denominator,
        })
    }

    /// `n = 0` data with value group `(1/g)Z`.
    pub fn zero(gamma_denominator: u64) -> Self {
        IsotropicSublatticeData {
            n: 0,
            h_matrix: vec![],
            c: 1,
            lambda_basis: vec![],
            gamma_denominator: gamma_denominator.max(1),
        }
    }

    /// `h(u, w)` for arbitrary complex vectors.
    pub fn h(&self, u: &[GaussianRational], w: &[GaussianRational]) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (j, uj) in u.iter().enumerate() {
            if uj.is_zero() {
                continue;
            }
            for (k, wk) in w.iter().enumerate() {
                if wk.is_zero() {
                    continue;
                }
                acc = &acc + &(&(uj * &self.h_matrix[j][k]) * &wk.conj());
            }
        }
        acc.scale(&BigRational::new(BigInt::one(), BigInt::from(self.c)))
    }

    pub fn h_lattice(&self, l: &LatticeVec, m: &LatticeVec) -> GaussianRational {
        self.h(&l.to_complex(), &m.to_complex())
    }

    pub fn is_zero_form(&self) -> bool {
        self.h_matrix.iter().flatten().all(GaussianRational::is_zero)
    }

    /// `Λ_Re` generator `k` as a real lattice vector.
    pub fn lambda_real(&self, k: usize) -> LatticeVec {
        LatticeVec::real(self.lambda_basis[k].clone())
    }

    /// `i` times `Λ_Re` generator `k`.
    pub fn lambda_imaginary(&self, k: usize) -> LatticeVec {
        LatticeVec::imaginary(self.lambda_basis[k].clone())
    }

    /// `Z^n / Λ_Re`, relations are the `Λ_Re` basis vectors.
    pub fn quotient_presentation(&self) -> Result<Presentation> {
        let rel: Vec<Vec<i64>> = (0..self.n)
            .map(|i| (0..self.n).map(|k| self.lambda_basis[k][i]).collect())
            .collect();
        Presentation::of_relations(&rel, self.n)
    }

    /// `Im h(x, i·y)` for real integer vectors, which equals `−Re h(x, y)`.
    pub fn im_h_real_imag(&self, x: &[BigInt], y: &[BigInt]) -> BigRational {
        let xs: Vec<GaussianRational> = x
            .iter()
            .map(|v| GaussianRational::real(BigRational::from_integer(v.clone())))
            .collect();
        let ys: Vec<GaussianRational> = y
            .iter()
            .map(|v| GaussianRational::imag(BigRational::from_integer(v.clone())))
            .collect();
        self.h(&xs, &ys).im
    }
}

/// One condition of [`validate_data`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub ok: bool,
    pub witness: Option<String>,
}

impl Condition {
    fn pass() -> Self {
        Condition { ok: true, witness: None }
    }

    fn fail(w: String) -> Self {
        Condition { ok: false, witness: Some(w) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub conjugate_symmetry: Condition,
    pub isotropy: Condition,
    pub lambda_full_rank: Condition,
    pub lattice_pairing: Condition,
    pub gamma_containment: Condition,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.conditions().iter().all(|(_, c)| c.ok)
    }

    pub fn conditions(&self) -> [(&'static str, &Condition); 5] {
        [
            ("conjugate_symmetry", &self.conjugate_symmetry),
            ("isotropy", &self.isotropy),
            ("lambda_full_rank", &self.lambda_full_rank),
            ("lattice_pairing", &self.lattice_pairing),
            ("gamma_containment", &self.gamma_containment),
        ]
    }

    pub fn failures(&self) -> Vec<String> {
        self.conditions()
            .iter()
            .filter(|(_, c)| !c.ok)
            .map(|(name, c)| format!("{name}: {}", c.witness.clone().unwrap_or_default()))
            .collect()
    }
}

/// Checks every defining condition exactly:
/// `H = H*`, `Im h(L_Re, L_Re) = 0`, `Λ_Re` of full rank,
/// `Im h(L_Re, iΛ_Re) = Z` when `h ≠ 0`, and `Im h(L_Re, iL_Re) ⊆ (1/g)Z`.
pub fn validate_data(d: &IsotropicSublatticeData) -> ValidationReport {
    let n = d.n;
    let e = |j: usize| {
        let mut v = vec![0; n];
        v[j] = 1;
        v
    };

    let mut conjugate_symmetry = Condition::pass();
    'sym: for j in 0..n {
        for k in 0..n {
            if d.h_matrix[j][k] != d.h_matrix[k][j].conj() {
                conjugate_symmetry = Condition::fail(format!(
                    "H[{j}][{k}] = {:?} but conj(H[{k}][{j}]) = {:?}",
                    d.h_matrix[j][k],
                    d.h_matrix[k][j].conj()
                ));
                break 'sym;
            }
        }
    }

    let mut isotropy = Condition::pass();
    'iso: for j in 0..n {
        for k in 0..n {
            let v = d.h_lattice(&LatticeVec::real(e(j)), &LatticeVec::real(e(k)));
            if !v.im.is_zero() {
                isotropy = Condition::fail(format!("Im h(e_{j}, e_{k}) = {}", v.im));
                break 'iso;
            }
        }
    }

    let big: Vec<Vec<BigInt>> = d
        .lambda_basis
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let lambda_full_rank = match crate::intmat::hermite_rows(&big) {
        Some(_) => Condition::pass(),
        None => Condition::fail("lambda_basis rows are linearly dependent".into()),
    };

    let mut lattice_pairing = Condition::pass();
    if !d.is_zero_form() {
        let mut g = BigInt::zero();
        'pair: for j in 0..n {
            for k in 0..n {
                let p = d.h_lattice(&LatticeVec::real(e(j)), &d.lambda_imaginary(k)).im;
                if !p.is_integer() {
                    lattice_pairing = Condition::fail(format!(
                        "Im h(e_{j}, i·λ_{k}) = {p} is not an integer"
                    ));
                    break 'pair;
                }
                g = g.gcd(&p.to_integer());
            }
        }
        if lattice_pairing.ok && !g.is_one() {
            lattice_pairing =
                Condition::fail(format!("pairings Im h(L_Re, iΛ_Re) generate {g}Z, not Z"));
        }
    }

    let mut gamma_containment = Condition::pass();
    let gq = BigRational::from_integer(BigInt::from(d.gamma_denominator));
    'gamma: for j in 0..n {
        for k in 0..n {
            let p = d.h_lattice(&LatticeVec::real(e(j)), &LatticeVec::imaginary(e(k))).im;
            if !(&p * &gq).is_integer() {
                gamma_containment = Condition::fail(format!(
                    "Im h(e_{j}, i·e_{k}) = {p} is not in (1/{})Z",
                    d.gamma_denominator
                ));
                break 'gamma;
            }
        }
    }

    ValidationReport {
        conjugate_symmetry,
        isotropy,
        lambda_full_rank,
        lattice_pairing,
        gamma_containment,
    }
}

/// `μ_D` on `(L_Re/Λ_Re) × (L_Im/Λ_Im)` together with the presentation of
/// the quotient. `L_Im/Λ_Im` is identified with `L_Re/Λ_Re` through `i`.
#[derive(Debug, Clone)]
pub struct QuotientPairing {
    pub pairing: BilinearPairing,
    pub presentation: Presentation,
    pub gamma_denominator: u64,
}

impl QuotientPairing {
    pub fn group(&self) -> &FinAbGroup {
        &self.presentation.group
    }
}

/// `g · Im h(x, i·y)` reduced into `[0, g)`.
struct IntegerForm<'a> {
    data: &'a IsotropicSublatticeData,
    g: BigRational,
}

impl IntegerForm<'_> {
    /// `None` if the value is not integral.
    fn value(&self, x: &[BigInt], y: &[BigInt]) -> Option<u64> {
        let v = &self.data.im_h_real_imag(x, y) * &self.g;
        if !v.is_integer() {
            return None;
        }
        let g = BigInt::from(self.data.gamma_denominator);
        let r = v.to_integer().mod_floor(&g);
        num_traits::ToPrimitive::to_u64(&r)
    }
}

/// Builds `μ_D(x, y) = Im h(x_Re, i·y_Re) mod Z` in `Z/g` and checks
/// well-definedness over all pairs of quotient elements and all `Λ_Re`
/// generator shifts on either side.
pub fn mu_from_data(d: &IsotropicSublatticeData, bounds: &Bounds) -> Result<QuotientPairing> {
    let report = validate_data(d);
    if !report.ok() {
        return Err(Error::InvalidInput(format!(
            "sublattice data fails validation: {}",
            report.failures().join("; ")
        )));
    }
    let presentation = d.quotient_presentation()?;
    let q = presentation.group.clone();
    Bounds::check("quotient order for μ_D", q.order(), bounds.group_order as u128)?;
    let form = IntegerForm {
        data: d,
        g: BigRational::from_integer(BigInt::from(d.gamma_denominator)),
    };
    let non_integral = |x: &[BigInt], y: &[BigInt]| {
        Error::Internal(format!("g·Im h({x:?}, i·{y:?}) is not integral"))
    };

    let t = q.rank();
    let mut matrix = vec![vec![0i64; t]; t];
    for (j, row) in matrix.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            let (x, y) = (presentation.lift(j), presentation.lift(k));
            *entry = form.value(x, y).ok_or_else(|| non_integral(x, y))? as i64;
        }
    }
    let pairing = BilinearPairing::cyclic(q.clone(), q.clone(), d.gamma_denominator, &matrix)?;

    let shifts: Vec<Vec<BigInt>> = d
        .lambda_basis
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let lifts: Vec<Vec<BigInt>> = q.elements().map(|x| presentation.lift_elem(&x)).collect();
    let add = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> { a.iter().zip(b).map(|(u, v)| u + v).collect() };
    for (xi, x) in lifts.iter().enumerate() {
        for (yi, y) in lifts.iter().enumerate() {
            let base = form.value(x, y).ok_or_else(|| non_integral(x, y))?;
            let via_pairing = pairing.apply(&q.elem_at(xi), &q.elem_at(yi));
            let expect = if q.rank() == 0 || d.gamma_denominator == 1 {
                0
            } else {
                via_pairing.coords()[0]
            };
            if base != expect {
                return Err(Error::Internal(format!(
                    "μ_D table disagrees with direct evaluation at ({xi}, {yi})"
                )));
            }
            for s in &shifts {
                let (xs, ys) = (add(x, s), add(y, s));
                if form.value(&xs, y) != Some(base) || form.value(x, &ys) != Some(base) {
                    return Err(Error::Internal(format!(
                        "μ_D is not well defined: shift by {s:?} changes the value at ({xi}, {yi})"
                    )));
                }
            }
        }
    }
    Ok(QuotientPairing {
        pairing,
        presentation,
        gamma_denominator: d.gamma_denominator,
    })
}
