//! Chern characters of sums of line-bundle powers on a real torus of
//! dimension `m`, computed in the even part of the exterior algebra on
//! `e1, …, em` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::gaussian::{parse_rational, rational_string};
use crate::waring::{r1_bound, waring_extend, WaringCertificate};

/// Largest supported torus dimension; subsets are stored as `u32` bitmasks.
pub const MAX_DIM: usize = 32;

/// Element of `⊕_k Λ^{2k} Q^m`, keyed by generator bitmask (bit `j` is
/// `e_{j+1}`). Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenClass {
    m: usize,
    terms: BTreeMap<u32, BigRational>,
}

/// Sign of `e_A ∧ e_B` relative to `e_{A∪B}` for disjoint `A`, `B`.
fn merge_sign(a: u32, b: u32) -> bool {
    // Count pairs (i ∈ a, j ∈ b) with i > j.
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> j).count_ones();
        rest &= rest - 1;
    }
    inversions % 2 == 1
}

impl EvenClass {
    pub fn zero(m: usize) -> Result<Self> {
        if m > MAX_DIM {
            return Err(Error::InvalidInput(format!("torus dimension {m} exceeds {MAX_DIM}")));
        }
        Ok(Self {
            m,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(m: usize, c: BigRational) -> Result<Self> {
        let mut x = Self::zero(m)?;
        x.add_term(0, c)?;
        Ok(x)
    }

    /// Generators are 1-based: `from_terms(4, [(&[1, 2], 1)])` is `e1∧e2`.
    pub fn from_terms<'a, I>(m: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [usize], BigRational)>,
    {
        let mut x = Self::zero(m)?;
        for (gens, c) in terms {
            let mut sorted = gens.to_vec();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let mut mask = 0u32;
            for &g in &sorted {
                if g == 0 || g > m {
                    return Err(Error::InvalidInput(format!("generator e{g} outside 1..={m}")));
                }
                mask |= 1 << (g - 1);
            }
            // Sign of the permutation sorting `gens`.
            let mut inv = 0;
            for i in 0..gens.len() {
                for j in i + 1..gens.len() {
                    if gens[i] > gens[j] {
                        inv += 1;
                    }
                }
            }
            x.add_term(mask, if inv % 2 == 1 { -c } else { c })?;
        }
        Ok(x)
    }

    /// Adds `c·e_mask`. The mask must have even size.
    pub fn add_term(&mut self, mask: u32, c: BigRational) -> Result<()> {
        if mask.count_ones() % 2 == 1 {
            return Err(Error::InvalidInput("odd-degree term in an even class".into()));
        }
        if self.m < 32 && mask >> self.m != 0 {
            return Err(Error::InvalidInput("term uses a generator beyond the dimension".into()));
        }
        if c.is_zero() {
            return Ok(());
        }
        let entry = self.terms.entry(mask).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &BTreeMap<u32, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, mask: u32) -> BigRational {
        self.terms.get(&mask).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree-0 coefficient.
    pub fn constant_term(&self) -> BigRational {
        self.coefficient(0)
    }

    /// Part of cohomological degree `2k`.
    pub fn degree_part(&self, k: usize) -> Self {
        Self {
            m: self.m,
            terms: self
                .terms
                .iter()
                .filter(|(mask, _)| mask.count_ones() as usize == 2 * k)
                .map(|(&mask, c)| (mask, c.clone()))
                .collect(),
        }
    }

    /// Whether all coefficients in degree `> 0` vanish.
    pub fn is_degree_zero(&self) -> bool {
        self.terms.keys().all(|&mask| mask == 0)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn is_homogeneous_degree_two(&self) -> bool {
        self.terms.keys().all(|mask| mask.count_ones() == 2)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return Err(Error::InvalidInput(format!(
                "generator counts differ: {} vs {}",
                self.m, other.m
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (&mask, c) in &other.terms {
            out.add_term(mask, c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self {
                m: self.m,
                terms: BTreeMap::new(),
            };
        }
        Self {
            m: self.m,
            terms: self.terms.iter().map(|(&k, c)| (k, c * s)).collect(),
        }
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.m)?;
        for (&a, x) in &self.terms {
            for (&b, y) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let c = x * y;
                out.add_term(a | b, if merge_sign(a, b) { -c } else { c })?;
            }
        }
        Ok(out)
    }

    /// Coefficients of the degree-`2k` part divided by `d`, or the first
    /// term whose quotient is not an integer.
    pub fn divide_positive_degrees(&self, d: &BigInt) -> std::result::Result<Self, (u32, BigRational)> {
        let dq = BigRational::from_integer(d.clone());
        let mut out = Self {
            m: self.m,
            terms: BTreeMap::new(),
        };
        for (&mask, c) in &self.terms {
            if mask == 0 {
                continue;
            }
            let q = c / &dq;
            if !q.is_integer() {
                return Err((mask, c.clone()));
            }
            out.terms.insert(mask, q);
        }
        Ok(out)
    }

    /// Parses `"e12:1,e34:-1/2,1:3"`. A key is `e` followed by generator
    /// indices, either single digits or separated by `_` (`e10_11`); the key
    /// `1` denotes the constant term.
    pub fn parse(m: usize, s: &str) -> Result<Self> {
        let mut out = Self::zero(m)?;
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = item
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("term {item:?} lacks ':'")))?;
            let c = parse_rational(value.trim())?;
            let key = key.trim();
            let gens: Vec<usize> = if key == "1" {
                vec![]
            } else {
                let body = key
                    .strip_prefix('e')
                    .ok_or_else(|| Error::InvalidInput(format!("term key {key:?} must start with 'e'")))?;
                let parts: Vec<&str> = if body.contains('_') {
                    body.split('_').collect()
                } else {
                    body.split("").filter(|p| !p.is_empty()).collect()
                };
                parts
                    .iter()
                    .map(|p| {
                        p.parse::<usize>()
                            .map_err(|_| Error::InvalidInput(format!("bad generator index in {key:?}")))
                    })
                    .collect::<Result<_>>()?
            };
            if gens.len() % 2 == 1 {
                return Err(Error::InvalidInput(format!("{key:?} has odd degree")));
            }
            let mut sorted = gens.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!("{key:?} repeats a generator")));
            }
            out = out.add(&Self::from_terms(m, [(gens.as_slice(), c)])?)?;
        }
        Ok(out)
    }

    /// Key naming a generator subset, as accepted by `parse`.
    pub fn key(&self, mask: u32) -> String {
        if mask == 0 {
            return "1".into();
        }
        let idx: Vec<String> = (0..32)
            .filter(|j| mask >> j & 1 == 1)
            .map(|j| (j + 1).to_string())
            .collect();
        if self.m <= 9 {
            format!("e{}", idx.concat())
        } else {
            format!("e{}", idx.join("_"))
        }
    }
}

impl fmt::Display for EvenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&mask, c)| format!("{}:{}", self.key(mask), rational_string(c)))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Serialize for EvenClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (&mask, c) in &self.terms {
            map.serialize_entry(&self.key(mask), &rational_string(c))?;
        }
        map.end()
    }
}

/// A line bundle described by its first Chern class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineBundleSymbol {
    pub c1: EvenClass,
}

impl LineBundleSymbol {
    pub fn new(c1: EvenClass) -> Result<Self> {
        if !c1.is_homogeneous_degree_two() {
            return Err(Error::InvalidInput("first Chern class must be of degree 2".into()));
        }
        if !c1.is_integral() {
            return Err(Error::InvalidInput("first Chern class must be integral".into()));
        }
        Ok(Self { c1 })
    }

    pub fn dim(&self) -> usize {
        self.c1.dim()
    }

    /// `[1, c1, c1², …]` up to the last nonzero power.
    pub fn powers(&self) -> Vec<EvenClass> {
        let m = self.dim();
        let mut out = vec![EvenClass::constant(m, BigRational::one()).expect("dimension checked")];
        loop {
            let next = out
                .last()
                .expect("nonempty")
                .wedge(&self.c1)
                .expect("same dimension");
            if next.is_zero() {
                break;
            }
            out.push(next);
        }
        out
    }
}

/// `⊕_{t∈powers} L^{⊗t} ⊕ O^{extra_trivial}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VirtualBundleSymbol {
    pub base: LineBundleSymbol,
    pub powers: Vec<i64>,
    pub extra_trivial: u64,
}

impl VirtualBundleSymbol {
    pub fn rank(&self) -> u64 {
        self.powers.len() as u64 + self.extra_trivial
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, j| a * j)
}

/// `exp(t·c1)`, truncated where the powers of `c1` vanish.
pub fn exp_trunc(c1: &LineBundleSymbol, t: i64) -> EvenClass {
    let mut out = EvenClass::zero(c1.dim()).expect("dimension checked");
    let mut tk = BigInt::one();
    for (k, p) in c1.powers().iter().enumerate() {
        let coeff = BigRational::new(tk.clone(), factorial(k));
        out = out.add(&p.scale(&coeff)).expect("same dimension");
        tk *= t;
    }
    out
}

/// `Σ_{t} exp(t·c1) + extra_trivial`, evaluated as
/// `Σ_k (Σ_t t^k)·c1^k/k!`.
pub fn ch_virtual(v: &VirtualBundleSymbol) -> EvenClass {
    let powers = v.base.powers();
    let mut out = EvenClass::zero(v.base.dim()).expect("dimension checked");
    for (k, p) in powers.iter().enumerate() {
        let mut sum: BigInt = v
            .powers
            .iter()
            .map(|&t| num_traits::Pow::pow(BigInt::from(t), k as u32))
            .sum();
        if k == 0 {
            sum += v.extra_trivial;
        }
        out = out
            .add(&p.scale(&BigRational::new(sum, factorial(k))))
            .expect("same dimension");
    }
    out
}

/// `R1(⌊m/2⌋, 1) − 1`.
pub fn r2_bound(m: u32) -> u128 {
    r1_bound(m / 2, 1) - 1
}

/// `R1(⌊m/2⌋, 2) − 1`, the larger reading of the same rank bound.
pub fn r2_bound_alternative(m: u32) -> u128 {
    r1_bound(m / 2, 2) - 1
}

/// `1 + R2(m) + ⌊m/2⌋`.
pub fn r3_bound(m: u32) -> u128 {
    1 + r2_bound(m) + (m / 2) as u128
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleCertificate {
    pub rank: u64,
    pub ch: EvenClass,
    pub d: u64,
    /// `(ch − rank)/d` restricted to positive degrees, keyed by `2k`.
    pub divisibility_witness: BTreeMap<usize, EvenClass>,
    pub trivial: bool,
    pub failures: Vec<String>,
}

impl BundleCertificate {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn witness_by_degree(ch: &EvenClass, d: u64) -> std::result::Result<BTreeMap<usize, EvenClass>, String> {
    let q = ch
        .divide_positive_degrees(&BigInt::from(d))
        .map_err(|(mask, c)| {
            format!(
                "coefficient {} of {} is not divisible by {d}",
                rational_string(&c),
                ch.key(mask)
            )
        })?;
    Ok((1..=ch.dim() / 2)
        .map(|k| (2 * k, q.degree_part(k)))
        .filter(|(_, c)| !c.is_zero())
        .collect())
}

/// `ch` is that of the trivial bundle of rank `rank`, and `rank ≥ ⌈m/2⌉`.
pub fn triviality_certificate(rank: u64, ch: &EvenClass, m: usize) -> BundleCertificate {
    let mut failures = vec![];
    if !ch.is_degree_zero() {
        failures.push(format!("ch has positive-degree part {ch}"));
    }
    if ch.constant_term() != BigRational::from_integer(rank.into()) {
        failures.push(format!(
            "degree-0 part {} differs from rank {rank}",
            rational_string(&ch.constant_term())
        ));
    }
    if (rank as usize) < m.div_ceil(2) {
        failures.push(format!("rank {rank} below ⌈{m}/2⌉"));
    }
    BundleCertificate {
        rank,
        ch: ch.clone(),
        d: 1,
        divisibility_witness: BTreeMap::new(),
        trivial: failures.is_empty(),
        failures,
    }
}

/// `α[d]` together with its integrality certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaExtension {
    /// `α[d] = ⊕_{t ∈ T∖{1}} α^{⊗t}`.
    pub bundle: VirtualBundleSymbol,
    pub waring: WaringCertificate,
    /// For `ch(α ⊕ α[d])`.
    pub certificate: BundleCertificate,
    pub rank_bound: u128,
    pub rank_bound_alternative: u128,
}

/// Builds `α[d]` from `T = waring_extend(⌊m/2⌋, {1}, ⌊m/2⌋!·d)` and checks
/// `ch(α ⊕ α[d]) − rank ∈ d·H_Z` coefficientwise.
pub fn alpha_d(c1: &LineBundleSymbol, d: u64, m: usize) -> Result<AlphaExtension> {
    let waring = alpha_waring(d, m)?;
    alpha_d_from_waring(c1, d, m, waring)
}

/// The Waring certificate `alpha_d` uses; depends only on `d` and `m`.
pub fn alpha_waring(d: u64, m: usize) -> Result<WaringCertificate> {
    if d == 0 {
        return Err(Error::InvalidInput("d must be positive".into()));
    }
    let n = m / 2;
    let delta = factorial(n) * d;
    let delta = delta
        .to_u64()
        .ok_or_else(|| Error::InvalidInput("⌊m/2⌋!·d overflows u64".into()))?;
    waring_extend(n as u32, &[1], delta)
}

/// `alpha_d` with a precomputed Waring certificate.
pub fn alpha_d_from_waring(
    c1: &LineBundleSymbol,
    d: u64,
    m: usize,
    waring: WaringCertificate,
) -> Result<AlphaExtension> {
    if c1.dim() != m {
        return Err(Error::InvalidInput(format!(
            "c1 lives on {} generators, torus dimension is {m}",
            c1.dim()
        )));
    }
    if d == 0 {
        return Err(Error::InvalidInput("d must be positive".into()));
    }
    let mut powers = waring.output.entries.clone();
    if let Some(pos) = powers.iter().position(|&t| t == 1) {
        powers.remove(pos);
    }
    let bundle = VirtualBundleSymbol {
        base: c1.clone(),
        powers,
        extra_trivial: 0,
    };
    let mut total = bundle.clone();
    total.powers.insert(0, 1);
    let ch = ch_virtual(&total);
    let rank = total.rank();

    let mut failures = vec![];
    if !waring.checks.all() {
        failures.push("Waring certificate checks failed".into());
    }
    if ch.constant_term() != BigRational::from_integer(rank.into()) {
        failures.push("degree-0 part differs from rank".into());
    }
    let divisibility_witness = match witness_by_degree(&ch, d) {
        Ok(w) => w,
        Err(e) => {
            failures.push(e);
            BTreeMap::new()
        }
    };
    let rank_bound = r2_bound(m as u32);
    if bundle.rank() as u128 > rank_bound {
        failures.push(format!("rank {} of α[d] exceeds {rank_bound}", bundle.rank()));
    }
    let trivial = ch.is_degree_zero() && rank as usize >= m.div_ceil(2);
    Ok(AlphaExtension {
        bundle,
        waring,
        certificate: BundleCertificate {
            rank,
            ch,
            d,
            divisibility_witness,
            trivial,
            failures,
        },
        rank_bound,
        rank_bound_alternative: r2_bound_alternative(m as u32),
    })
}

/// A summand of the complement bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summand {
    pub name: String,
    pub rank: u64,
    pub ch: EvenClass,
    /// `computed` or `declared`; a declared summand's existence is assumed,
    /// only its rank and Chern character enter the certificate.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplementPlan {
    pub m: usize,
    pub d: u64,
    pub alpha: AlphaExtension,
    /// `rank − ch(α ⊕ α[d])`, a class in `d·H_Z`.
    pub residual: EvenClass,
    pub summands: Vec<Summand>,
    pub target_rank: u128,
    pub total: BundleCertificate,
}

impl ComplementPlan {
    pub fn ok(&self) -> bool {
        self.alpha.certificate.ok() && self.total.ok() && self.total.trivial
    }
}

/// `α ⊕ α[d] ⊕ α_χ ⊕ O^pad` with total rank `R3(m)` and Chern character in
/// degree 0. `α_χ` has declared Chern character `χ + ⌊m/2⌋` where `χ` is the
/// residual of `α ⊕ α[d]`; it is omitted when `χ = 0`.
pub fn complement_plan(c1: &LineBundleSymbol, d: u64, m: usize) -> Result<ComplementPlan> {
    let alpha = alpha_d(c1, d, m)?;
    complement_plan_from(alpha, m)
}

pub fn complement_plan_from(alpha: AlphaExtension, m: usize) -> Result<ComplementPlan> {
    let d = alpha.certificate.d;
    let base = &alpha.bundle.base;
    let rank_aa = alpha.certificate.rank;
    let ch_aa = alpha.certificate.ch.clone();
    let residual = EvenClass::constant(m, BigRational::from_integer(rank_aa.into()))?.sub(&ch_aa)?;

    let mut summands = vec![
        Summand {
            name: "alpha".into(),
            rank: 1,
            ch: exp_trunc(base, 1),
            source: "computed".into(),
        },
        Summand {
            name: "alpha[d]".into(),
            rank: alpha.bundle.rank(),
            ch: ch_virtual(&alpha.bundle),
            source: "computed".into(),
        },
    ];
    if !residual.is_zero() {
        let r = (m / 2) as u64;
        let ch = residual.add(&EvenClass::constant(m, BigRational::from_integer(r.into()))?)?;
        summands.push(Summand {
            name: "alpha_chi".into(),
            rank: r,
            ch,
            source: "declared".into(),
        });
    }
    let target_rank = r3_bound(m as u32);
    let used: u128 = summands.iter().map(|s| s.rank as u128).sum();
    let pad = target_rank
        .checked_sub(used)
        .ok_or_else(|| Error::Internal(format!("summand ranks {used} exceed {target_rank}")))?;
    summands.push(Summand {
        name: "trivial".into(),
        rank: pad as u64,
        ch: EvenClass::constant(m, BigRational::from_integer(pad.into()))?,
        source: "computed".into(),
    });

    let mut total_ch = EvenClass::zero(m)?;
    for s in &summands {
        total_ch = total_ch.add(&s.ch)?;
    }
    let mut total = triviality_certificate(target_rank as u64, &total_ch, m);
    total.d = d;
    match witness_by_degree(&residual, d) {
        Ok(w) => total.divisibility_witness = w,
        Err(e) => {
            total.failures.push(format!("residual: {e}"));
            total.trivial = false;
        }
    }
    Ok(ComplementPlan {
        m,
        d,
        alpha,
        residual,
        summands,
        target_rank,
        total,
    })
}

/// `d` divides every positive-degree numerator of `x` when all
/// coefficients are integers.
pub fn positive_degrees_divisible(x: &EvenClass, d: u64) -> bool {
    let d = BigInt::from(d);
    x.terms
        .iter()
        .filter(|(&mask, _)| mask != 0)
        .all(|(_, c)| c.is_integer() && c.to_integer().mod_floor(&d).is_zero())
}
