//! Multisets of integers whose power sums `Σ t^k`, `1 ≤ k ≤ n`, all vanish
//! modulo `δ`, built by extending a given multiset `S`.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::bounds::Bounds;
use crate::error::{Error, Result};

/// `(m + 1)·∏_{k=2}^{n} (4k + 1)`.
pub fn r1_bound(n: u32, m: u64) -> u128 {
    (2..=n as u128).fold(m as u128 + 1, |acc, k| acc * (4 * k + 1))
}

/// Least representative of `x` modulo `m` in `[0, m)`.
fn residue(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

fn pow_mod(x: u64, k: u32, m: u64) -> u64 {
    let mut acc = 1 % m as u128;
    for _ in 0..k {
        acc = acc * x as u128 % m as u128;
    }
    acc as u64
}

/// A smallest multiset of integers in `[0, m)` whose `k`-th powers sum to
/// `−1` mod `m`, lexicographically least among those (sorted ascending).
/// For `m = 1` the empty multiset already works.
pub fn negone_powers(k: u32, m: u64) -> Result<Vec<u64>> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidInput("negone_powers needs k ≥ 1 and m ≥ 1".into()));
    }
    let powers: Vec<u64> = (0..m).map(|x| pow_mod(x, k, m)).collect();
    let mut distinct = powers.clone();
    distinct.sort_unstable();
    distinct.dedup();
    // dist[r]: fewest k-th powers summing to r.
    let mut dist = vec![u32::MAX; m as usize];
    dist[0] = 0;
    let mut queue = VecDeque::from([0u64]);
    while let Some(r) = queue.pop_front() {
        for &p in &distinct {
            let s = ((r + p) % m) as usize;
            if dist[s] == u32::MAX {
                dist[s] = dist[r as usize] + 1;
                queue.push_back(s as u64);
            }
        }
    }
    let target = m - 1;
    let size = dist[target as usize];
    if size == u32::MAX {
        return Err(Error::NoSolution(format!("−1 is not a sum of {k}-th powers mod {m}")));
    }
    // The least element of the lex-least multiset is the least x whose
    // removal leaves a target reachable in one step fewer.
    let mut out = Vec::with_capacity(size as usize);
    let mut rem = target;
    for left in (1..=size).rev() {
        let x = (0..m)
            .find(|&x| dist[((rem + m - powers[x as usize]) % m) as usize] == left - 1)
            .ok_or_else(|| Error::Internal("BFS reconstruction failed".into()))?;
        out.push(x);
        rem = (rem + m - powers[x as usize]) % m;
    }
    Ok(out)
}

/// Multiset `T` with `Σ_{t∈T} t^k ≡ 0 (mod modulus)` for `1 ≤ k ≤ degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WaringMultiset {
    pub entries: Vec<i64>,
    pub modulus: u64,
    pub degree: u32,
}

impl WaringMultiset {
    /// `Σ t^k` for `1 ≤ k ≤ degree`, exact.
    pub fn power_sums(&self) -> Vec<BigInt> {
        power_sums(&self.entries, self.degree)
    }

    /// Whether every power sum vanishes modulo `modulus`.
    pub fn satisfies_congruences(&self) -> bool {
        let m = BigInt::from(self.modulus);
        self.power_sums().iter().all(|s| s.mod_floor(&m).is_zero())
    }

    /// Entries as representatives in `(−δ/2, δ/2]`, sorted.
    pub fn centered_residues(&self) -> Vec<i64> {
        let m = self.modulus as i64;
        let mut v: Vec<i64> = self
            .entries
            .iter()
            .map(|&t| {
                let r = t.rem_euclid(m);
                if 2 * r > m {
                    r - m
                } else {
                    r
                }
            })
            .collect();
        v.sort_unstable();
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn power_sums(entries: &[i64], degree: u32) -> Vec<BigInt> {
    (1..=degree)
        .map(|k| entries.iter().map(|&t| Pow::pow(BigInt::from(t), k)).sum())
        .collect()
}

/// Whether `sub` is contained in `sup` counting multiplicities.
pub fn is_submultiset(sub: &[i64], sup: &[i64]) -> bool {
    let mut counts: BTreeMap<i64, i64> = BTreeMap::new();
    for &x in sup {
        *counts.entry(x).or_default() += 1;
    }
    for &x in sub {
        let c = counts.entry(x).or_default();
        *c -= 1;
        if *c < 0 {
            return false;
        }
    }
    true
}

/// Intermediate multisets of the construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WaringTrace {
    /// `S ∪ {−Σ S}`.
    pub t1: Vec<i64>,
    /// `P_k` for `k = 2..=n`.
    pub p: BTreeMap<u32, Vec<i64>>,
    /// `T_k = P_k ∪ {1}` for `k = 2..=n`.
    pub t: BTreeMap<u32, Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WaringChecks {
    pub congruences: bool,
    pub contains_input: bool,
    pub within_bound: bool,
    /// `Σ_T t^k = ∏_j Σ_{T_j} t^k` for every `k`.
    pub multiplicative: bool,
    /// `|P_k| ≤ 4k` for every `k`.
    pub negone_within_4k: bool,
    /// Power sums as decimal strings, `k = 1..=n`.
    pub power_sums: Vec<String>,
}

impl WaringChecks {
    pub fn all(&self) -> bool {
        self.congruences
            && self.contains_input
            && self.within_bound
            && self.multiplicative
            && self.negone_within_4k
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WaringCertificate {
    pub input_set: Vec<i64>,
    pub output: WaringMultiset,
    pub bound: u128,
    pub trace: WaringTrace,
    pub checks: WaringChecks,
}

/// `T_1 = S ∪ {−Σ S}`, `T_k = P_k ∪ {1}` with `P_k = negone_powers(k, δ)`,
/// and `T = {t_1 ⋯ t_n : t_j ∈ T_j}` as a multiset. Every claimed property is
/// checked and recorded in `checks`.
pub fn waring_extend(n: u32, s: &[i64], delta: u64) -> Result<WaringCertificate> {
    if delta == 0 {
        return Err(Error::InvalidInput("modulus must be at least 1".into()));
    }
    let bound = r1_bound(n, s.len() as u64);
    let mut trace = WaringTrace {
        t1: vec![],
        p: BTreeMap::new(),
        t: BTreeMap::new(),
    };
    let entries = if n == 0 || s.is_empty() {
        vec![]
    } else {
        let total: i64 = s
            .iter()
            .try_fold(0i64, |a, &x| a.checked_add(x))
            .ok_or_else(|| Error::InvalidInput("sum of S overflows".into()))?;
        trace.t1 = s.to_vec();
        trace.t1.push(-total);
        let mut factors = vec![trace.t1.clone()];
        for k in 2..=n {
            let p: Vec<i64> = negone_powers(k, delta)?.into_iter().map(|x| x as i64).collect();
            let mut tk = p.clone();
            tk.push(1);
            trace.p.insert(k, p);
            trace.t.insert(k, tk.clone());
            factors.push(tk);
        }
        let mut out = vec![1i64];
        for f in &factors {
            let mut next = Vec::with_capacity(out.len() * f.len());
            for &a in &out {
                for &b in f {
                    next.push(
                        a.checked_mul(b)
                            .ok_or_else(|| Error::InvalidInput("product entries overflow i64".into()))?,
                    );
                }
            }
            out = next;
        }
        out
    };
    let output = WaringMultiset {
        entries,
        modulus: delta,
        degree: n,
    };

    let sums = output.power_sums();
    let multiplicative = if output.entries.is_empty() {
        true
    } else {
        let mut factors = vec![trace.t1.clone()];
        factors.extend(trace.t.values().cloned());
        (1..=n).all(|k| {
            let prod: BigInt = factors
                .iter()
                .map(|f| f.iter().map(|&t| Pow::pow(BigInt::from(t), k)).sum::<BigInt>())
                .fold(BigInt::one(), |a, b| a * b);
            prod == sums[k as usize - 1]
        })
    };
    let checks = WaringChecks {
        congruences: output.satisfies_congruences(),
        contains_input: output.entries.is_empty() && (n == 0 || s.is_empty())
            || is_submultiset(s, &output.entries),
        within_bound: (output.len() as u128) <= bound,
        multiplicative,
        negone_within_4k: trace.p.iter().all(|(&k, p)| p.len() as u32 <= 4 * k),
        power_sums: sums.iter().map(ToString::to_string).collect(),
    };
    Ok(WaringCertificate {
        input_set: s.to_vec(),
        output,
        bound,
        trace,
        checks,
    })
}

/// Smallest superset of `S`, extra entries drawn from `[−δ, δ]` in the order
/// `0, 1, −1, 2, −2, …`, whose power sums up to degree `n` vanish mod `δ`;
/// `None` if no superset of size at most `size_cap` exists.
pub fn waring_minimal(
    n: u32,
    s: &[i64],
    delta: u64,
    size_cap: usize,
    bounds: &Bounds,
) -> Result<Option<WaringMultiset>> {
    if delta == 0 {
        return Err(Error::InvalidInput("modulus must be at least 1".into()));
    }
    let d = delta as i64;
    let mut candidates = vec![0i64];
    for x in 1..=d {
        candidates.push(x);
        candidates.push(-x);
    }
    let pw: Vec<Vec<u64>> = candidates
        .iter()
        .map(|&x| (1..=n).map(|k| pow_mod(residue(x as i128, delta), k, delta)).collect())
        .collect();
    let base: Vec<u64> = (1..=n)
        .map(|k| {
            s.iter()
                .fold(0u64, |a, &x| (a + pow_mod(residue(x as i128, delta), k, delta)) % delta)
        })
        .collect();

    let mut spent = 0u64;
    for extra in 0..=size_cap.saturating_sub(s.len()) {
        let mut chosen = Vec::with_capacity(extra);
        if let Some(found) = dfs(&pw, &base, delta, extra, 0, &mut chosen, &mut spent, bounds.search_budget)? {
            let mut entries = s.to_vec();
            entries.extend(found.iter().map(|&i| candidates[i]));
            return Ok(Some(WaringMultiset {
                entries,
                modulus: delta,
                degree: n,
            }));
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    pw: &[Vec<u64>],
    sums: &[u64],
    m: u64,
    left: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    spent: &mut u64,
    budget: u64,
) -> Result<Option<Vec<usize>>> {
    *spent += 1;
    Bounds::check("waring_minimal search nodes", *spent as u128, budget as u128)?;
    if left == 0 {
        return Ok(sums.iter().all(|&v| v == 0).then(|| chosen.clone()));
    }
    for i in start..pw.len() {
        let next: Vec<u64> = sums.iter().zip(&pw[i]).map(|(a, b)| (a + b) % m).collect();
        chosen.push(i);
        let r = dfs(pw, &next, m, left - 1, i, chosen, spent, budget)?;
        chosen.pop();
        if r.is_some() {
            return Ok(r);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negone_examples() {
        assert_eq!(negone_powers(2, 4).unwrap(), vec![1, 1, 1]);
        assert_eq!(negone_powers(1, 7).unwrap(), vec![6]);
        assert_eq!(negone_powers(3, 9).unwrap(), vec![2]);
        assert_eq!(negone_powers(2, 3).unwrap(), vec![1, 1]);
        assert_eq!(negone_powers(2, 2).unwrap(), vec![1]);
        assert!(negone_powers(5, 1).unwrap().is_empty());
    }

    #[test]
    fn negone_is_minimal_by_brute_force() {
        for m in 2..=30u64 {
            for k in 1..=4u32 {
                let got = negone_powers(k, m).unwrap();
                let sum: u64 = got.iter().map(|&x| pow_mod(x, k, m)).sum::<u64>() % m;
                assert_eq!(sum, m - 1);
                // No multiset of smaller size works.
                let powers: std::collections::BTreeSet<u64> = (0..m).map(|x| pow_mod(x, k, m)).collect();
                let mut reach = std::collections::BTreeSet::from([0u64]);
                for _ in 1..got.len() {
                    assert!(!reach.contains(&(m - 1)));
                    reach = reach.iter().flat_map(|&r| powers.iter().map(move |&p| (r + p) % m)).collect();
                }
                if !got.is_empty() {
                    assert!(!reach.contains(&(m - 1)) || got.len() == 1);
                }
                assert!(got.len() as u32 <= 4 * k);
            }
        }
    }

    #[test]
    fn r1_examples() {
        assert_eq!(r1_bound(2, 1), 18);
        assert_eq!(r1_bound(1, 1), 2);
        assert_eq!(r1_bound(0, 5), 6);
        assert_eq!(r1_bound(4, 1), 2 * 9 * 13 * 17);
    }

    #[test]
    fn extend_examples() {
        let c = waring_extend(2, &[1], 2).unwrap();
        assert_eq!(c.trace.t1, vec![1, -1]);
        assert_eq!(c.trace.p[&2], vec![1]);
        assert_eq!(c.trace.t[&2], vec![1, 1]);
        assert_eq!(c.output.entries, vec![1, 1, -1, -1]);
        assert!(c.checks.all());
        assert_eq!(c.bound, 18);

        let c = waring_extend(2, &[2], 3).unwrap();
        assert_eq!(c.trace.t1, vec![2, -2]);
        assert_eq!(c.trace.p[&2], vec![1, 1]);
        let mut e = c.output.entries.clone();
        e.sort_unstable();
        assert_eq!(e, vec![-2, -2, -2, 2, 2, 2]);
        assert_eq!(c.checks.power_sums, vec!["0", "24"]);
        assert!(c.checks.all());

        for (n, s) in [(0, vec![1, 2]), (3, vec![])] {
            let c = waring_extend(n, &s, 5).unwrap();
            assert!(c.output.is_empty());
            assert!(c.checks.all());
        }
    }

    #[test]
    fn minimal_examples() {
        let b = Bounds::default();
        let m = waring_minimal(2, &[1], 2, 4, &b).unwrap().unwrap();
        assert_eq!(m.entries, vec![1, 1]);
        let m = waring_minimal(1, &[3], 5, 2, &b).unwrap().unwrap();
        assert_eq!(m.entries, vec![3, 2]);
        let m = waring_minimal(2, &[1, 3], 2, 4, &b).unwrap().unwrap();
        assert_eq!(m.entries, vec![1, 3]);
        assert!(waring_minimal(2, &[1], 4, 2, &b).unwrap().is_none());
    }

    #[test]
    fn centered_display() {
        let w = WaringMultiset {
            entries: vec![4, -6, 3],
            modulus: 6,
            degree: 1,
        };
        assert_eq!(w.centered_residues(), vec![-2, 0, 3]);
    }
}
