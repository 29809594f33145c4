//! Exhaustive oracles: group axioms on explicit tables, morphisms of central
//! extensions, embedding search, and composite checks along the pipeline.

use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::heisenberg::{functorial_map, BilinearPairing, CentralByAbelianExt, CheckReport, HeisenbergGroup, HeisenbergMorphism};
use crate::lattice::{data_from_heisenberg, quotient_action, verify_action_morphisms};
use crate::table::{closure, find_hom_violation, FiniteGroup};
use crate::theta::{parametrisation_maps, parametrise, ParametrisationWitness, ThetaElem, ThetaGroup};

/// Closure, identity, inverses and associativity, all checked exhaustively.
pub fn check_group_axioms<G: FiniteGroup + ?Sized>(g: &G, bounds: &Bounds) -> Result<CheckReport> {
    let n = g.order();
    Bounds::check("associativity triples", (n as u128).pow(3), bounds.search_budget as u128)?;
    let mut failures = Vec::new();
    let e = g.identity();
    if e >= n {
        failures.push(format!("identity {e} out of range"));
        return Ok(CheckReport::from_failures(failures));
    }
    let mut table = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let xy = g.mul(x, y);
            if xy >= n {
                failures.push(format!("{x}·{y} out of range"));
                return Ok(CheckReport::from_failures(failures));
            }
            table.push(xy);
        }
    }
    let mul = |x: usize, y: usize| table[x * n + y];
    for x in 0..n {
        if mul(e, x) != x || mul(x, e) != x {
            failures.push(format!("{e} is not an identity for {x}"));
            break;
        }
    }
    for x in 0..n {
        let y = g.inv(x);
        if y >= n || mul(x, y) != e || mul(y, x) != e {
            failures.push(format!("{y} is not an inverse of {x}"));
            break;
        }
    }
    'assoc: for x in 0..n {
        for y in 0..n {
            let xy = mul(x, y);
            for z in 0..n {
                if mul(xy, z) != mul(x, mul(y, z)) {
                    failures.push(format!("({x}·{y})·{z} ≠ {x}·({y}·{z})"));
                    break 'assoc;
                }
            }
        }
    }
    Ok(CheckReport::from_failures(failures))
}

/// Three vertical maps between two central extensions, as index maps.
#[derive(Clone)]
pub struct SesMorphismWitness {
    pub source: CentralByAbelianExt,
    pub target: CentralByAbelianExt,
    pub kernel_map: Vec<usize>,
    pub total_map: Vec<usize>,
    pub quotient_map: Vec<usize>,
}

impl SesMorphismWitness {
    pub fn identity(ext: &CentralByAbelianExt) -> Self {
        SesMorphismWitness {
            source: ext.clone(),
            target: ext.clone(),
            kernel_map: (0..ext.kernel.order()).collect(),
            total_map: (0..ext.total.order()).collect(),
            quotient_map: (0..ext.quotient.order()).collect(),
        }
    }

    /// The morphism of extensions induced by `(λ_A, λ_B, κ)`.
    pub fn from_heisenberg(m: &HeisenbergMorphism) -> Self {
        let (src, tgt) = (m.source.pairing(), m.target.pairing());
        let na = src.a.order() as usize;
        let nta = tgt.a.order() as usize;
        let kernel_map = (0..src.c.order() as usize)
            .map(|c| tgt.c.index_of(&m.kappa.apply(&src.c.elem_at(c))))
            .collect();
        let quotient_map = (0..na * src.b.order() as usize)
            .map(|x| {
                let a = tgt.a.index_of(&m.lambda_a.apply(&src.a.elem_at(x % na)));
                let b = tgt.b.index_of(&m.lambda_b.apply(&src.b.elem_at(x / na)));
                a + nta * b
            })
            .collect();
        SesMorphismWitness {
            source: m.source.extension(),
            target: m.target.extension(),
            kernel_map,
            total_map: m.index_map().to_vec(),
            quotient_map,
        }
    }

    /// `(κ_μ, γ, λ_μ)` from `H(μ)` into `Θ(δ)`.
    pub fn from_parametrisation(w: &ParametrisationWitness, mu: &BilinearPairing) -> Result<Self> {
        let maps = parametrisation_maps(w, mu)?;
        let theta: &Arc<ThetaGroup> = &maps.theta;
        let m = theta.modulus() as usize;
        let kernel_map = (0..mu.c.order() as usize)
            .map(|c| {
                let img = w.kappa_mu.apply(&mu.c.elem_at(c));
                img.coords().first().copied().unwrap_or(0) as usize % m
            })
            .collect();
        let na = mu.a.order() as usize;
        let quotient_map = (0..na * mu.b.order() as usize)
            .map(|x| {
                let (b, chi) = w.lambda_mu(&mu.a.elem_at(x % na), &mu.b.elem_at(x / na));
                theta.index_of(&ThetaElem { scalar: 0, b, chi }) / m
            })
            .collect();
        Ok(SesMorphismWitness {
            source: maps.heisenberg.extension(),
            target: theta.extension(),
            kernel_map,
            total_map: maps.gamma,
            quotient_map,
        })
    }
}

/// Homomorphism property of all three maps and commutativity of both squares.
pub fn check_ses_morphism(w: &SesMorphismWitness, bounds: &Bounds) -> Result<CheckReport> {
    let (s, t) = (&w.source, &w.target);
    Bounds::check("extension morphism order", s.total.order() as u128, bounds.group_order as u128)?;
    let mut failures = Vec::new();
    let shapes = [
        ("kernel", &w.kernel_map, s.kernel.order(), t.kernel.order()),
        ("total", &w.total_map, s.total.order(), t.total.order()),
        ("quotient", &w.quotient_map, s.quotient.order(), t.quotient.order()),
    ];
    for (name, map, n, m) in shapes {
        if map.len() != n || map.iter().any(|&y| y >= m) {
            failures.push(format!("{name} map does not fit the group orders"));
        }
    }
    if !failures.is_empty() {
        return Ok(CheckReport::from_failures(failures));
    }
    for (name, map, src, tgt) in [
        ("kernel", &w.kernel_map, &s.kernel, &t.kernel),
        ("total", &w.total_map, &s.total, &t.total),
        ("quotient", &w.quotient_map, &s.quotient, &t.quotient),
    ] {
        if let Some((x, y)) = find_hom_violation(&**src, &**tgt, &|x| map[x], bounds) {
            failures.push(format!("{name} map is not a homomorphism at ({x}, {y})"));
        }
    }
    for k in 0..s.kernel.order() {
        if w.total_map[s.inject[k]] != t.inject[w.kernel_map[k]] {
            failures.push(format!("left square fails at kernel element {k}"));
            break;
        }
    }
    for x in 0..s.total.order() {
        if t.project[w.total_map[x]] != w.quotient_map[s.project[x]] {
            failures.push(format!("right square fails at element {x}"));
            break;
        }
    }
    Ok(CheckReport::from_failures(failures))
}

fn element_orders<G: FiniteGroup + ?Sized>(g: &G) -> Vec<usize> {
    (0..g.order()).map(|x| g.elem_order(x)).collect()
}

/// Extends generator images to the subgroup they generate. Fails on an
/// inconsistent relation or a repeated image.
fn extend_partial<G, H>(g: &G, h: &H, gens: &[usize], images: &[usize]) -> Option<Vec<Option<usize>>>
where
    G: FiniteGroup + ?Sized,
    H: FiniteGroup + ?Sized,
{
    let mut map = vec![None; g.order()];
    let mut used = HashSet::new();
    let e = g.identity();
    map[e] = Some(h.identity());
    used.insert(h.identity());
    let mut stack = vec![e];
    while let Some(x) = stack.pop() {
        let fx = map[x].expect("reached elements are mapped");
        for (&s, &fs) in gens.iter().zip(images) {
            let y = g.mul(x, s);
            let fy = h.mul(fx, fs);
            match map[y] {
                Some(v) if v != fy => return None,
                Some(_) => {}
                None => {
                    if !used.insert(fy) {
                        return None;
                    }
                    map[y] = Some(fy);
                    stack.push(y);
                }
            }
        }
    }
    Some(map)
}

/// An injective homomorphism `G → H`, by backtracking over generator images.
/// Generators are taken in decreasing order of element order, redundant ones
/// dropped; candidates are the elements of `H` of the same order, by index.
pub fn embed_search<G, H>(g: &G, h: &H, bounds: &Bounds) -> Result<Option<Vec<usize>>>
where
    G: FiniteGroup + ?Sized,
    H: FiniteGroup + ?Sized,
{
    Bounds::check("embedding source order", g.order() as u128, bounds.embed_source as u128)?;
    Bounds::check("embedding target order", h.order() as u128, bounds.embed_target as u128)?;
    if g.order() > h.order() || h.order() % g.order() != 0 {
        return Ok(None);
    }
    let og = element_orders(g);
    let oh = element_orders(h);
    let mut sorted = g.generators();
    sorted.sort_by_key(|&x| (std::cmp::Reverse(og[x]), x));
    let mut gens = Vec::new();
    for s in sorted {
        if !closure(g, &gens)[s] {
            gens.push(s);
        }
    }
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| (0..h.order()).filter(|&y| oh[y] == og[s]).collect())
        .collect();
    let mut images = Vec::with_capacity(gens.len());
    let mut spent = 0u64;
    let found = backtrack(g, h, &gens, &candidates, &mut images, &mut spent, bounds.search_budget)?;
    Ok(found.map(|m| m.into_iter().map(|x| x.expect("generators reach every element")).collect()))
}

fn backtrack<G, H>(
    g: &G,
    h: &H,
    gens: &[usize],
    candidates: &[Vec<usize>],
    images: &mut Vec<usize>,
    spent: &mut u64,
    budget: u64,
) -> Result<Option<Vec<Option<usize>>>>
where
    G: FiniteGroup + ?Sized,
    H: FiniteGroup + ?Sized,
{
    if gens.is_empty() {
        // Trivial source: only the identity to map.
        return Ok(extend_partial(g, h, gens, images));
    }
    let i = images.len();
    for &y in &candidates[i] {
        *spent += 1;
        Bounds::check("embedding search nodes", *spent as u128, budget as u128)?;
        images.push(y);
        if let Some(map) = extend_partial(g, h, &gens[..=i], images) {
            if i + 1 == gens.len() {
                return Ok(Some(map));
            }
            if let Some(done) = backtrack(g, h, gens, candidates, images, spent, budget)? {
                return Ok(Some(done));
            }
        }
        images.pop();
    }
    Ok(None)
}

/// Reference search without order pruning: every image of every generator,
/// in the default generator order, with the result confirmed on all pairs.
/// Limited to `|G| ≤ 16`, `|H| ≤ 256`.
pub fn embed_exhaustive<G, H>(g: &G, h: &H, bounds: &Bounds) -> Result<Option<Vec<usize>>>
where
    G: FiniteGroup + ?Sized,
    H: FiniteGroup + ?Sized,
{
    Bounds::check("exhaustive embedding source order", g.order() as u128, 16)?;
    Bounds::check("exhaustive embedding target order", h.order() as u128, 256)?;
    let gens = g.generators();
    let all: Vec<Vec<usize>> = gens.iter().map(|_| (0..h.order()).collect()).collect();
    let mut images = Vec::new();
    let mut spent = 0u64;
    let Some(map) = backtrack(g, h, &gens, &all, &mut images, &mut spent, bounds.search_budget)? else {
        return Ok(None);
    };
    let map: Vec<usize> = map.into_iter().map(|x| x.expect("generators reach every element")).collect();
    let all_pairs = Bounds {
        centre_work: u64::MAX,
        ..*bounds
    };
    if find_hom_violation(g, h, &|x| map[x], &all_pairs).is_some() {
        return Err(Error::Internal("exhaustive embedding is not a homomorphism".into()));
    }
    Ok(Some(map))
}

/// Whether `f` is an injective homomorphism `G → H`.
pub fn is_injective_hom<G, H>(g: &G, h: &H, f: &[usize], bounds: &Bounds) -> bool
where
    G: FiniteGroup + ?Sized,
    H: FiniteGroup + ?Sized,
{
    f.len() == g.order()
        && f.iter().all(|&y| y < h.order())
        && f.iter().collect::<HashSet<_>>().len() == f.len()
        && find_hom_violation(g, h, &|x| f[x], bounds).is_none()
}

/// Which final representation the composite lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// `G → H(μ) → Θ(δ)`.
    Theta,
    /// `G → H(μ) → H(μ_D) → ` affine maps of `V` modulo `ρ_D(Λ)`.
    Lattice,
}

/// A group together with an embedding into a Heisenberg group.
#[derive(Clone)]
pub struct PipelineInput {
    pub group: Arc<dyn FiniteGroup>,
    pub mu: BilinearPairing,
    /// Index map `G → H(μ)`.
    pub embedding: Vec<usize>,
    pub char_exclusion: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArrowReport {
    pub name: String,
    pub ok: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComposedReport {
    pub arrows: Vec<ArrowReport>,
    pub source_order: usize,
    pub final_image_order: usize,
    pub ok: bool,
}

fn arrow(name: &str, failures: Vec<String>) -> ArrowReport {
    ArrowReport {
        name: name.into(),
        ok: failures.is_empty(),
        failures,
    }
}

fn hom_failures<G, H>(g: &G, h: &H, f: &[usize], bounds: &Bounds) -> Vec<String>
where
    G: FiniteGroup + ?Sized,
    H: FiniteGroup + ?Sized,
{
    let mut failures = Vec::new();
    if let Some((x, y)) = find_hom_violation(g, h, &|x| f[x], bounds) {
        failures.push(format!("not a homomorphism at ({x}, {y})"));
    }
    let distinct = f.iter().collect::<HashSet<_>>().len();
    if distinct != f.len() {
        failures.push(format!("not injective: {distinct} images for {} elements", f.len()));
    }
    failures
}

/// Checks every arrow of `G → H(μ) → …` and the full composite.
pub fn composed_pipeline_check(input: &PipelineInput, target: Target, bounds: &Bounds) -> Result<ComposedReport> {
    let g = &*input.group;
    let order = g.order();
    if let Some(p) = input.char_exclusion {
        if p > 1 && order as u64 % p == 0 {
            return Err(Error::Coprimality {
                p,
                order: order as u128,
            });
        }
    }
    Bounds::check("pipeline source order", order as u128, bounds.group_order as u128)?;
    let heis = Arc::new(HeisenbergGroup::new(input.mu.clone())?);
    Bounds::check("pipeline Heisenberg order", heis.order() as u128, bounds.group_order as u128)?;
    if input.embedding.len() != order || input.embedding.iter().any(|&y| y >= heis.order()) {
        return Err(Error::InvalidInput("embedding does not fit the group orders".into()));
    }
    let mut arrows = vec![arrow("G → H(μ)", hom_failures(g, &*heis, &input.embedding, bounds))];

    let final_image_order = match target {
        Target::Theta => {
            let w = parametrise(&input.mu, input.char_exclusion)?;
            let ses = SesMorphismWitness::from_parametrisation(&w, &input.mu)?;
            let mut failures = check_ses_morphism(&ses, bounds)?.failures;
            failures.extend(hom_failures(&*heis, &*ses.target.total, &ses.total_map, bounds));
            arrows.push(arrow("H(μ) → Θ(δ)", failures));
            let composite: Vec<usize> = input.embedding.iter().map(|&x| ses.total_map[x]).collect();
            arrows.push(arrow("G → Θ(δ)", hom_failures(g, &*ses.target.total, &composite, bounds)));
            composite.iter().collect::<HashSet<_>>().len()
        }
        Target::Lattice => {
            let out = data_from_heisenberg(&input.mu, bounds)?;
            let m = functorial_map(
                &out.lambda_a,
                &out.lambda_b,
                &out.kappa,
                &input.mu,
                &out.quotient.pairing,
                bounds,
            )?;
            let ses = SesMorphismWitness::from_heisenberg(&m);
            let mut failures = check_ses_morphism(&ses, bounds)?.failures;
            failures.extend(hom_failures(&*m.source, &*m.target, m.index_map(), bounds));
            arrows.push(arrow("H(μ) → H(μ_D)", failures));

            let action = quotient_action(&out.data, bounds)?;
            arrows.push(arrow(
                "H(μ_D) → affine maps mod ρ_D(Λ)",
                verify_action_morphisms(&out.data, bounds)?.failures,
            ));
            let composite: Vec<usize> = input.embedding.iter().map(|&x| m.index_map()[x]).collect();
            let mut failures = hom_failures(g, &*m.target, &composite, bounds);
            let image = action.distinct_actions(composite.iter().copied());
            if image != order {
                failures.push(format!("composite action has {image} distinct maps for {order} elements"));
            }
            arrows.push(arrow("G → affine maps mod ρ_D(Λ)", failures));
            image
        }
    };
    let ok = arrows.iter().all(|a| a.ok) && final_image_order == order;
    Ok(ComposedReport {
        arrows,
        source_order: order,
        final_image_order,
        ok,
    })
}

/// `H(μ)` itself with the identity embedding.
pub fn heisenberg_input(mu: &BilinearPairing, char_exclusion: Option<u64>) -> Result<PipelineInput> {
    let h = HeisenbergGroup::new(mu.clone())?;
    let n = h.order();
    Ok(PipelineInput {
        group: Arc::new(h),
        mu: mu.clone(),
        embedding: (0..n).collect(),
        char_exclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finabel::FinAbGroup;
    use crate::heisenberg::BilinearPairing;
    use crate::table::CayleyTable;

    fn b() -> Bounds {
        Bounds::default()
    }

    #[test]
    fn axioms_hold_for_standard_tables() {
        for t in [CayleyTable::cyclic(6), CayleyTable::dihedral(4), CayleyTable::quaternion(), CayleyTable::symmetric(3)] {
            assert!(check_group_axioms(&t, &b()).unwrap().ok);
        }
        let h = HeisenbergGroup::new(BilinearPairing::extraspecial(3, 1).unwrap()).unwrap();
        assert!(check_group_axioms(&h, &b()).unwrap().ok);
    }

    #[test]
    fn non_associative_loop_is_rejected() {
        // A Latin square with identity 0 and two-sided inverses, not a group.
        let rows = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let t = CayleyTable::new(rows).unwrap();
        let r = check_group_axioms(&t, &b()).unwrap();
        assert!(!r.ok);
        assert!(r.failures[0].contains("≠"));
    }

    #[test]
    fn ses_identity_and_functorial() {
        let mu = BilinearPairing::extraspecial(2, 1).unwrap();
        let h = Arc::new(HeisenbergGroup::new(mu.clone()).unwrap());
        let w = SesMorphismWitness::identity(&h.extension());
        assert!(check_ses_morphism(&w, &b()).unwrap().ok);

        let mu = BilinearPairing::extraspecial(3, 1).unwrap();
        let out = data_from_heisenberg(&mu, &b()).unwrap();
        let m = functorial_map(&out.lambda_a, &out.lambda_b, &out.kappa, &mu, &out.quotient.pairing, &b()).unwrap();
        assert!(check_ses_morphism(&SesMorphismWitness::from_heisenberg(&m), &b()).unwrap().ok);
    }

    #[test]
    fn ses_parametrisation_witnesses() {
        for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let mu = BilinearPairing::extraspecial(p, n).unwrap();
            let w = parametrise(&mu, None).unwrap();
            let ses = SesMorphismWitness::from_parametrisation(&w, &mu).unwrap();
            let r = check_ses_morphism(&ses, &b()).unwrap();
            assert!(r.ok, "p={p} n={n}: {:?}", r.failures);
        }
    }

    #[test]
    fn corrupted_total_map_is_caught() {
        let mu = BilinearPairing::extraspecial(2, 1).unwrap();
        let w = parametrise(&mu, None).unwrap();
        let mut ses = SesMorphismWitness::from_parametrisation(&w, &mu).unwrap();
        ses.total_map.swap(1, 2);
        let r = check_ses_morphism(&ses, &b()).unwrap();
        assert!(!r.ok);
        assert!(r.failures.iter().any(|f| f.contains("total map")));
    }

    #[test]
    fn quaternion_does_not_embed_in_dihedral() {
        let h = HeisenbergGroup::new(BilinearPairing::extraspecial(2, 1).unwrap()).unwrap();
        let q8 = CayleyTable::quaternion();
        assert_eq!(embed_search(&q8, &h, &b()).unwrap(), None);
        assert_eq!(embed_exhaustive(&q8, &h, &b()).unwrap(), None);
        assert!(embed_search(&h, &CayleyTable::dihedral(4), &b()).unwrap().is_some());
    }

    #[test]
    fn cauchy_and_extraspecial_embeddings() {
        let z2 = CayleyTable::cyclic(2);
        for t in [CayleyTable::cyclic(6), CayleyTable::symmetric(3), CayleyTable::quaternion()] {
            let f = embed_search(&z2, &t, &b()).unwrap().unwrap();
            assert!(is_injective_hom(&z2, &t, &f, &b()));
        }
        let e3 = HeisenbergGroup::new(BilinearPairing::extraspecial(3, 1).unwrap()).unwrap();
        let e3t = CayleyTable::from_group(&e3).unwrap();
        let big = HeisenbergGroup::new(BilinearPairing::extraspecial(3, 2).unwrap()).unwrap();
        let f = embed_search(&e3t, &big, &b()).unwrap().unwrap();
        assert!(is_injective_hom(&e3t, &big, &f, &b()));
    }

    #[test]
    fn search_agrees_with_exhaustive_on_small_pairs() {
        let small = [CayleyTable::cyclic(2), CayleyTable::cyclic(4), CayleyTable::elementary_abelian(2, 2), CayleyTable::quaternion(), CayleyTable::dihedral(4), CayleyTable::symmetric(3)];
        let targets = [CayleyTable::cyclic(8), CayleyTable::dihedral(4), CayleyTable::quaternion(), CayleyTable::symmetric(3), CayleyTable::dihedral(6), CayleyTable::elementary_abelian(2, 3)];
        for g in &small {
            for h in &targets {
                let fast = embed_search(g, h, &b()).unwrap();
                let slow = embed_exhaustive(g, h, &b()).unwrap();
                assert_eq!(fast.is_some(), slow.is_some(), "|G|={} |H|={}", g.order(), h.order());
                if let Some(f) = fast {
                    assert!(is_injective_hom(g, h, &f, &b()));
                }
            }
        }
    }

    #[test]
    fn composed_checks() {
        for (p, order) in [(2u64, 8usize), (3, 27)] {
            let mu = BilinearPairing::extraspecial(p, 1).unwrap();
            let input = heisenberg_input(&mu, None).unwrap();
            for target in [Target::Theta, Target::Lattice] {
                let r = composed_pipeline_check(&input, target, &b()).unwrap();
                assert!(r.ok, "{p} {target:?}: {:?}", r.arrows);
                assert_eq!(r.final_image_order, order);
            }
        }
        let mu = BilinearPairing::extraspecial(3, 1).unwrap();
        let input = heisenberg_input(&mu, Some(3)).unwrap();
        assert!(matches!(
            composed_pipeline_check(&input, Target::Theta, &b()),
            Err(Error::Coprimality { p: 3, .. })
        ));
    }

    #[test]
    fn composed_check_catches_a_bad_embedding() {
        let mu = BilinearPairing::extraspecial(2, 1).unwrap();
        let h = HeisenbergGroup::new(mu.clone()).unwrap();
        let z4 = FinAbGroup::cyclic(4);
        // Not a homomorphism: sends everything of order 4 to order 2.
        let input = PipelineInput {
            group: Arc::new(z4),
            mu,
            embedding: vec![0, 1, 2, 3].into_iter().map(|x| x % h.order()).collect(),
            char_exclusion: None,
        };
        let r = composed_pipeline_check(&input, Target::Theta, &b()).unwrap();
        assert!(!r.arrows[0].ok);
        assert!(!r.ok);
    }
}
