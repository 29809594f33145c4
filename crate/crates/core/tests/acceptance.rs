//! Acceptance criteria. Each test prints one line
//! `criterion N <name>: PASS|FAIL (<details>; <elapsed> / limit <limit>)`.
//!
//! Every check is exact: zero failures allowed. Runtime limits are wall-clock
//! per criterion and assume the `test` profile (opt-level 3).

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use nilpotent_actions::chern::{
    alpha_d_from_waring, alpha_waring, complement_plan_from, r2_bound, r3_bound, EvenClass,
    LineBundleSymbol,
};
use nilpotent_actions::finabel::FinAbGroup;
use nilpotent_actions::heisenberg::{center_of, BilinearPairing, HeisenbergGroup};
use nilpotent_actions::lattice::cocycle::{
    box_vectors, cell_grid, check_cocycle_identities, grid_point, polynomial_certificate,
    scaled_matches_exact, sweep, ScaledCocycle,
};
use nilpotent_actions::lattice::{
    data_from_heisenberg, verify_action_morphisms, verify_construction, GaussianRational,
    IsotropicSublatticeData,
};
use nilpotent_actions::pipeline::{self, Config, Mode};
use nilpotent_actions::table::{CayleyTable, FiniteGroup};
use nilpotent_actions::theta::{parametrise, verify_parametrisation};
use nilpotent_actions::verify::{check_group_axioms, embed_exhaustive, embed_search, is_injective_hom};
use nilpotent_actions::waring::{waring_extend, waring_minimal};
use nilpotent_actions::Bounds;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_0001;

fn report(n: u32, name: &str, ok: bool, detail: &str, elapsed: Duration, limit: Option<Duration>) {
    let in_time = limit.map_or(true, |l| elapsed <= l);
    let pass = ok && in_time;
    let limit_text = limit.map_or("none".to_string(), |l| format!("{:.0}s", l.as_secs_f64()));
    // Through the handle rather than `println!`, so the line shows without `--nocapture`.
    let _ = writeln!(
        std::io::stdout().lock(),
        "criterion {n} {name}: {} ({detail}; {:.2}s / limit {limit_text})",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok, "criterion {n} failed: {detail}");
    assert!(in_time, "criterion {n} over time: {elapsed:?}");
}

fn bounds() -> Bounds {
    Bounds {
        search_budget: 100_000_000,
        ..Bounds::default()
    }
}

/// Standard pairings over `Z/p`, `Z/4⊕Z/2` with the diagonal pairing into
/// `Z/4`, and 20 seeded random pairings `A × A → Z/n` with `|H| ≤ 256`.
fn heisenberg_corpus() -> Vec<(String, BilinearPairing)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        out.push((format!("standard Z/{p}"), BilinearPairing::extraspecial(p, 1).unwrap()));
    }
    let a = FinAbGroup::new(vec![4, 2]).unwrap();
    out.push((
        "Z/4+Z/2".into(),
        BilinearPairing::cyclic(a.clone(), a, 4, &[vec![1, 0], vec![0, 2]]).unwrap(),
    ));

    let shapes: [(&[u64], &[u64]); 8] = [
        (&[2], &[2, 4, 8]),
        (&[3], &[3, 9]),
        (&[4], &[2, 4, 8]),
        (&[2, 2], &[2, 4]),
        (&[5], &[5]),
        (&[6], &[2, 3, 6]),
        (&[3, 3], &[3]),
        (&[4, 2], &[2, 4]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..20 {
        let (factors, moduli) = shapes[rng.gen_range(0..shapes.len())];
        let n = moduli[rng.gen_range(0..moduli.len())];
        let a = FinAbGroup::new(factors.to_vec()).unwrap();
        let m: Vec<Vec<i64>> = factors
            .iter()
            .map(|&fi| {
                factors
                    .iter()
                    .map(|&fj| {
                        // Entries must have order dividing gcd(f_i, f_j).
                        let g = fi.gcd(&fj);
                        let step = n / n.gcd(&g);
                        (rng.gen_range(0..n) * step % n) as i64
                    })
                    .collect()
            })
            .collect();
        let mu = BilinearPairing::cyclic(a.clone(), a, n, &m).unwrap();
        out.push((format!("random #{i} {factors:?}→Z/{n} {m:?}"), mu));
    }
    out
}

/// Non-degeneracy by brute force over all element pairs.
fn nondegenerate_oracle(mu: &BilinearPairing) -> bool {
    let left = mu.a.elements().filter(|a| !a.is_zero()).all(|a| mu.b.elements().any(|b| !mu.apply(&a, &b).is_zero()));
    let right = mu.b.elements().filter(|b| !b.is_zero()).all(|b| mu.a.elements().any(|a| !mu.apply(&a, &b).is_zero()));
    left && right
}

#[test]
fn criterion_1_heisenberg_group_laws() {
    let start = Instant::now();
    let b = bounds();
    let corpus = heisenberg_corpus();
    let mut failures = Vec::new();
    let mut nondeg = 0;
    for (name, mu) in &corpus {
        let h = HeisenbergGroup::new(mu.clone()).unwrap();
        assert!(h.order() <= 4096);
        let r = check_group_axioms(&h, &b).unwrap();
        if !r.ok {
            failures.push(format!("{name}: {:?}", r.failures));
        }
        let centre = center_of(mu, &b).unwrap();
        let scalars_only = centre.len() as u128 == mu.c.order()
            && centre.iter().all(|x| x.a.is_zero() && x.b.is_zero());
        let nd = nondegenerate_oracle(mu);
        nondeg += usize::from(nd);
        if scalars_only != nd || mu.is_nondegenerate() != nd {
            failures.push(format!("{name}: centre = scalars {scalars_only}, non-degenerate {nd}"));
        }
    }
    report(
        1,
        "heisenberg group laws",
        failures.is_empty(),
        &format!("{} pairings, {nondeg} non-degenerate, failures {:?}", corpus.len(), failures),
        start.elapsed(),
        Some(Duration::from_secs(10)),
    );
}

#[test]
fn criterion_2_parametrisation() {
    let start = Instant::now();
    let b = bounds();
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, mu) in heisenberg_corpus() {
        if !mu.c.is_cyclic() || !nondegenerate_oracle(&mu) {
            continue;
        }
        checked += 1;
        let w = parametrise(&mu, None).unwrap();
        let r = verify_parametrisation(&w, &mu, &b).unwrap();
        if !r.ok {
            failures.push(format!("{name}: {:?}", r.failures));
        }
    }
    report(
        2,
        "parametrisation",
        failures.is_empty() && checked >= 4,
        &format!("{checked} non-degenerate cyclic-centre pairings, failures {failures:?}"),
        start.elapsed(),
        Some(Duration::from_secs(30)),
    );
}

fn lattice_corpus() -> Vec<(String, BilinearPairing)> {
    vec![
        ("Z/2".into(), BilinearPairing::extraspecial(2, 1).unwrap()),
        ("Z/3".into(), BilinearPairing::extraspecial(3, 1).unwrap()),
        ("Z/5".into(), BilinearPairing::extraspecial(5, 1).unwrap()),
        ("(Z/3)^2".into(), BilinearPairing::extraspecial(3, 2).unwrap()),
    ]
}

#[test]
fn criterion_3_lattice_construction() {
    let start = Instant::now();
    let b = bounds();
    let mut failures = Vec::new();
    for (name, mu) in lattice_corpus() {
        let out = data_from_heisenberg(&mu, &b).unwrap();
        let r = verify_construction(&out, &mu, &b).unwrap();
        if !r.ok {
            failures.push(format!("{name} construction: {:?}", r.failures));
        }
        // κ(μ(a, b)) = μ_D(λ_A a, λ_B b) for every pair.
        let q = &out.quotient.pairing;
        for x in mu.a.elements() {
            for y in mu.b.elements() {
                let lhs = out.kappa.apply(&mu.apply(&x, &y));
                let rhs = q.apply(&out.lambda_a.apply(&x), &out.lambda_b.apply(&y));
                if lhs.coords() != rhs.coords() {
                    failures.push(format!("{name}: pairing differs at {x:?}, {y:?}"));
                }
            }
        }
        let r = verify_action_morphisms(&out.data, &b).unwrap();
        if !r.ok {
            failures.push(format!("{name} action: {:?}", r.failures));
        }
    }
    report(
        3,
        "lattice construction",
        failures.is_empty(),
        &format!("A in {{Z/2, Z/3, Z/5, (Z/3)^2}}, failures {failures:?}"),
        start.elapsed(),
        None,
    );
}

fn corrupt(d: &IsotropicSublatticeData) -> IsotropicSublatticeData {
    let mut bad = d.clone();
    bad.h_matrix[0][0] = &bad.h_matrix[0][0] + &GaussianRational::int(0, 1);
    bad
}

/// For `n = 1`: all `l, l'` in `[−2c, 2c]^2` and `v` on the `(1/2c)`-grid of
/// the unit cell. For `n = 2` the full box has `(4c+1)^4` points, so `χ` and
/// `ρ` run over the full box against `l' ∈ [−1, 1]^4`, and `f` over
/// `l, l' ∈ [−1, 1]^4` against the full grid. The polynomial certificate
/// covers all remaining points in both cases.
#[test]
fn criterion_4_cocycle_identities() {
    let start = Instant::now();
    let b = bounds();
    let mut failures = Vec::new();
    let mut counted = (0u64, 0u64);
    let mut mutations_caught = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let corpus = lattice_corpus();
    for (name, mu) in &corpus {
        let d = data_from_heisenberg(mu, &b).unwrap().data;
        let c = d.c as i64;
        let n = d.n;
        let grid = 2 * c;
        let s = ScaledCocycle::new(&d, grid as u64).unwrap();
        let full = box_vectors(n, 2 * c);
        let vs = cell_grid(n, grid);
        let sums = if n == 1 {
            vec![sweep(&s, &full, &full, &vs)]
        } else {
            let unit = box_vectors(n, 1);
            vec![sweep(&s, &full, &unit, &[]), sweep(&s, &unit, &unit, &vs)]
        };
        for sum in &sums {
            counted.0 += sum.pairs;
            counted.1 += sum.triples;
            if !sum.ok() {
                failures.push(format!("{name}: {:?}", sum.first_failure));
            }
        }
        let cert = polynomial_certificate(&s);
        if !cert.ok() {
            failures.push(format!("{name} certificate: {:?}", cert.first_failure));
        }
        // Scaled integers against exact rationals on random box points.
        for _ in 0..50 {
            let l = &full[rng.gen_range(0..full.len())];
            let lp = &full[rng.gen_range(0..full.len())];
            let vn = &vs[rng.gen_range(0..vs.len())];
            let exact = check_cocycle_identities(&d, l, lp, &grid_point(vn, grid));
            let scaled = s.differences(l, lp, vn);
            if !exact.all()
                || !scaled_matches_exact(&s, scaled.chi, &exact.chi_difference)
                || !scaled_matches_exact(&s, scaled.f, &exact.f_difference)
                || !scaled_matches_exact(&s, scaled.rho, &exact.rho_difference)
            {
                failures.push(format!("{name}: exact and scaled disagree at {l:?}, {lp:?}, {vn:?}"));
            }
        }
        let bad = corrupt(&d);
        let bs = ScaledCocycle::new(&bad, grid as u64).unwrap();
        let unit = box_vectors(n, 1);
        let bad_sweep = sweep(&bs, &unit, &unit, &cell_grid(n, grid));
        if !bad_sweep.ok() && !polynomial_certificate(&bs).ok() {
            mutations_caught += 1;
        } else {
            failures.push(format!("{name}: corrupted H passes"));
        }
    }
    report(
        4,
        "cocycle identities",
        failures.is_empty() && mutations_caught == corpus.len(),
        &format!(
            "{} pairs, {} triples, {mutations_caught}/{} mutations caught, failures {failures:?}",
            counted.0,
            counted.1,
            corpus.len()
        ),
        start.elapsed(),
        None,
    );
}

fn all_subsets(lo: i64, hi: i64, max: usize) -> Vec<Vec<i64>> {
    let vals: Vec<i64> = (lo..=hi).collect();
    let mut out = vec![vec![]];
    let mut frontier = vec![(vec![], 0usize)];
    for _ in 0..max {
        let mut next = Vec::new();
        for (s, from) in &frontier {
            for (i, &v) in vals.iter().enumerate().skip(*from) {
                let mut t: Vec<i64> = s.clone();
                t.push(v);
                out.push(t.clone());
                next.push((t, i + 1));
            }
        }
        frontier = next;
    }
    out
}

fn power_sum_mod(xs: &[i64], k: u32, delta: u64) -> u64 {
    let d = delta as i128;
    xs.iter().fold(0i128, |acc, &x| {
        let r = (x as i128).rem_euclid(d);
        let mut p = 1i128;
        for _ in 0..k {
            p = p * r % d;
        }
        (acc + p) % d
    }) as u64
}

fn contains_multiset(big: &[i64], small: &[i64]) -> bool {
    let mut counts: BTreeMap<i64, i64> = BTreeMap::new();
    for &x in big {
        *counts.entry(x).or_default() += 1;
    }
    for &x in small {
        let c = counts.entry(x).or_default();
        *c -= 1;
        if *c < 0 {
            return false;
        }
    }
    true
}

fn r1_oracle(n: u32, s: usize) -> u128 {
    (s as u128 + 1) * (2..=n as u128).map(|k| 4 * k + 1).product::<u128>()
}

#[test]
fn criterion_5_waring() {
    let start = Instant::now();
    let sets = all_subsets(-5, 5, 3);
    let mut failures = Vec::new();
    let mut runs = 0u64;
    for delta in 1..=50u64 {
        for n in 1..=4u32 {
            for s in &sets {
                runs += 1;
                let cert = waring_extend(n, s, delta).unwrap();
                let t = &cert.output.entries;
                let mut bad = Vec::new();
                if (1..=n).any(|k| power_sum_mod(t, k, delta) != 0) {
                    bad.push("congruence");
                }
                if !contains_multiset(t, s) {
                    bad.push("S not in T");
                }
                if t.len() as u128 > r1_oracle(n, s.len()) {
                    bad.push("size");
                }
                for (&k, p) in &cert.trace.p {
                    if p.len() > 4 * k as usize {
                        bad.push("negone size");
                    }
                    if delta > 1 && power_sum_mod(p, k, delta) != delta - 1 {
                        bad.push("negone sum");
                    }
                }
                if !cert.checks.all() {
                    bad.push("self-check");
                }
                if !bad.is_empty() && failures.len() < 10 {
                    failures.push(format!("δ={delta} n={n} S={s:?}: {bad:?}"));
                }
            }
        }
    }
    report(
        5,
        "waring",
        failures.is_empty(),
        &format!("{runs} instances, failures {failures:?}"),
        start.elapsed(),
        Some(Duration::from_secs(60)),
    );
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, j| a * j)
}

fn random_c1(m: usize, rng: &mut ChaCha8Rng) -> LineBundleSymbol {
    let mut terms = Vec::new();
    for i in 1..=m {
        for j in i + 1..=m {
            terms.push((vec![i, j], rng.gen_range(-4i64..=4)));
        }
    }
    let c = EvenClass::from_terms(
        m,
        terms.iter().map(|(g, v)| (g.as_slice(), BigRational::from_integer((*v).into()))),
    )
    .unwrap();
    LineBundleSymbol::new(c).unwrap()
}

/// `Σ_{t ∈ T} exp(t·c1)` from power sums of `T` and wedge powers of `c1`.
fn ch_oracle(c1: &LineBundleSymbol, t: &[i64], m: usize) -> EvenClass {
    let mut out = EvenClass::zero(m).unwrap();
    let mut power = EvenClass::constant(m, BigRational::one()).unwrap();
    for k in 0..=m / 2 {
        let sum: BigInt = t.iter().map(|&x| BigInt::from(x).pow(k as u32)).sum();
        out = out.add(&power.scale(&BigRational::new(sum, factorial(k)))).unwrap();
        power = power.wedge(&c1.c1).unwrap();
    }
    out
}

fn divisible_positive(x: &EvenClass, d: u64) -> bool {
    x.terms()
        .iter()
        .filter(|(&mask, _)| mask != 0)
        .all(|(_, c)| c.is_integer() && (c.to_integer() % BigInt::from(d)).is_zero())
}

const CHERN_DIMS: [usize; 4] = [2, 4, 6, 8];
const CHERN_SAMPLES: usize = 50;
const CHERN_MAX_D: u64 = 100;

#[test]
fn criterion_6_chern_integrality() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut cases = 0u64;
    for &m in &CHERN_DIMS {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ m as u64);
        let samples: Vec<LineBundleSymbol> = (0..CHERN_SAMPLES).map(|_| random_c1(m, &mut rng)).collect();
        for d in 1..=CHERN_MAX_D {
            let w = alpha_waring(d, m).unwrap();
            for c1 in &samples {
                cases += 1;
                let a = alpha_d_from_waring(c1, d, m, w.clone()).unwrap();
                let expect = ch_oracle(c1, &w.output.entries, m);
                let mut bad = Vec::new();
                if a.certificate.ch != expect {
                    bad.push("ch differs from oracle");
                }
                if !divisible_positive(&expect, d) {
                    bad.push("not divisible");
                }
                if !a.certificate.ok() {
                    bad.push("certificate");
                }
                if a.bundle.rank() as u128 > r2_bound(m as u32) {
                    bad.push("rank above R2");
                }
                if !bad.is_empty() && failures.len() < 10 {
                    failures.push(format!("m={m} d={d} c1={}: {bad:?}", c1.c1));
                }
            }
        }
    }
    let r2_2 = r2_bound(2);
    report(
        6,
        "chern integrality",
        failures.is_empty() && r2_2 == 1,
        &format!("{cases} cases, R2(2) = {r2_2}, failures {failures:?}"),
        start.elapsed(),
        Some(Duration::from_secs(120)),
    );
}

#[test]
fn criterion_7_uniformisation_certificate() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut cases = 0u64;
    for &m in &CHERN_DIMS {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ m as u64);
        let samples: Vec<LineBundleSymbol> = (0..CHERN_SAMPLES).map(|_| random_c1(m, &mut rng)).collect();
        let half = (m / 2) as u128;
        let target = 1 + r2_bound(m as u32) + half;
        for d in 1..=CHERN_MAX_D {
            let w = alpha_waring(d, m).unwrap();
            for c1 in &samples {
                cases += 1;
                let a = alpha_d_from_waring(c1, d, m, w.clone()).unwrap();
                let plan = complement_plan_from(a, m).unwrap();
                // Summands add up to the total, which is trivial in degree 0.
                let mut ch = EvenClass::zero(m).unwrap();
                let mut rank = 0u64;
                for s in &plan.summands {
                    ch = ch.add(&s.ch).unwrap();
                    rank += s.rank;
                }
                let mut bad = Vec::new();
                if ch != plan.total.ch || rank != plan.total.rank {
                    bad.push("summands do not add up");
                }
                if !ch.is_degree_zero() || ch.constant_term() != BigRational::from_integer(rank.into()) {
                    bad.push("ch not the rank");
                }
                if rank as u128 != target || plan.target_rank != target {
                    bad.push("rank not R3");
                }
                if !plan.ok() || !plan.total.trivial {
                    bad.push("certificate");
                }
                if !bad.is_empty() && failures.len() < 10 {
                    failures.push(format!("m={m} d={d} c1={}: {bad:?}", c1.c1));
                }
            }
        }
    }
    let r3_2 = r3_bound(2);
    report(
        7,
        "uniformisation certificate",
        failures.is_empty() && r3_2 == 3,
        &format!("{cases} cases, R3(2) = {r3_2}, failures {failures:?}"),
        start.elapsed(),
        None,
    );
}

#[test]
fn criterion_8_end_to_end() {
    let start = Instant::now();
    let b = Bounds::default();
    let mut failures = Vec::new();
    for p in [2u64, 3, 5] {
        let cfg = Config::from_json(&format!(r#"{{"group": {{"extraspecial": {{"p": {p}}}}}}}"#)).unwrap();
        let first = pipeline::run(&cfg, Mode::Both, &b).unwrap();
        let second = pipeline::run(&cfg, Mode::Both, &b).unwrap();
        if first.to_json() != second.to_json() {
            failures.push(format!("p={p}: reports differ"));
        }
        if !first.ok {
            let bad: Vec<_> = first.verification.iter().filter(|(_, v)| !v.ok).map(|(k, _)| k).collect();
            failures.push(format!("p={p}: failing {bad:?}"));
        }
        // Extraspecial p^{1+2} has rank 2: variety T^2 × P^2, manifold T^4 with t = R3(2) = 3.
        let r = first.input_summary.rank.used;
        let v = first.variety_params;
        let mp = &first.manifold_params;
        if r != 2 || (v.torus_power, v.projective_dim) != (2, 2) || (mp.torus_dim, mp.t) != (4, 3) {
            failures.push(format!("p={p}: r={r}, variety {v:?}, manifold ({}, {})", mp.torus_dim, mp.t));
        }
    }
    report(
        8,
        "end-to-end",
        failures.is_empty(),
        &format!("extraspecial p^(1+2), p in {{2, 3, 5}}, failures {failures:?}"),
        start.elapsed(),
        None,
    );
}

/// Upper unitriangular 3×3 matrices over `Z/3`, as `(x, y, z)` with
/// `(x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y')`.
fn unitriangular_3() -> CayleyTable {
    let idx = |x: usize, y: usize, z: usize| x + 3 * y + 9 * z;
    CayleyTable::from_fn(27, |a, b| {
        let (x, y, z) = (a % 3, a / 3 % 3, a / 9);
        let (u, v, w) = (b % 3, b / 3 % 3, b / 9);
        idx((x + u) % 3, (y + v) % 3, (z + w + x * v) % 3)
    })
    .unwrap()
}

#[test]
fn criterion_9_oracle_cross_checks() {
    let start = Instant::now();
    let b = Bounds::default();
    let mut failures = Vec::new();
    let mut confirmed = 0u64;
    for delta in 1..=12u64 {
        for n in 1..=2u32 {
            for s in all_subsets(-2, 2, 2) {
                let cert = waring_extend(n, &s, delta).unwrap();
                let cap = cert.output.entries.len();
                match waring_minimal(n, &s, delta, cap, &b) {
                    Ok(Some(m)) => {
                        let e = &m.entries;
                        if e.len() <= cap
                            && contains_multiset(e, &s)
                            && (1..=n).all(|k| power_sum_mod(e, k, delta) == 0)
                        {
                            confirmed += 1;
                        } else {
                            failures.push(format!("δ={delta} n={n} S={s:?}: invalid {e:?}"));
                        }
                    }
                    other => failures.push(format!("δ={delta} n={n} S={s:?}: {other:?}")),
                }
            }
        }
    }

    let source = unitriangular_3();
    let target = HeisenbergGroup::new(BilinearPairing::extraspecial(3, 1).unwrap()).unwrap();
    match embed_search(&source, &target, &b).unwrap() {
        Some(f) if is_injective_hom(&source, &target, &f, &b) => {}
        other => failures.push(format!("3^(1+2) into H(μ): {other:?}")),
    }
    let q8 = CayleyTable::quaternion();
    let d4 = CayleyTable::dihedral(4);
    assert_eq!((q8.order(), d4.order()), (8, 8));
    if embed_search(&q8, &d4, &b).unwrap().is_some() || embed_exhaustive(&q8, &d4, &b).unwrap().is_some() {
        failures.push("Q8 embeds in D4".into());
    }
    report(
        9,
        "oracle cross-checks",
        failures.is_empty(),
        &format!("{confirmed} waring outputs confirmed, embeddings as expected, failures {failures:?}"),
        start.elapsed(),
        None,
    );
}
