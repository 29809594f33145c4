//! End-to-end runs: group spec → Heisenberg factors → theta groups and/or
//! lattice data → Waring and Chern certificates → target-space parameters.

pub mod config;
pub mod params;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::bounds::Bounds;
use crate::chern::{complement_plan, r3_bound, ComplementPlan, EvenClass, LineBundleSymbol};
use crate::error::{Error, Result};
use crate::heisenberg::{BilinearPairing, CheckReport, HeisenbergGroup};
use crate::lattice::cocycle::{polynomial_certificate, ScaledCocycle, SweepSummary};
use crate::lattice::{
    data_from_heisenberg, mu_from_data, validate_data, verify_action_morphisms, verify_construction,
    IsotropicSublatticeData,
};
use crate::table::{FiniteGroup, ProductGroup};
use crate::theta::{is_prime, parametrise, verify_parametrisation, ThetaGroup};
use crate::verify::{
    check_group_axioms, check_ses_morphism, composed_pipeline_check, heisenberg_input, ComposedReport,
    SesMorphismWitness, Target,
};
use crate::waring::WaringCertificate;

pub use config::{Config, GroupSpec, Mode};
pub use params::{manifold_params, variety_params, ManifoldParams, VarietyParams};

pub const SCHEMA_VERSION: u32 = 1;

/// Witness lists in reports are cut after this many entries.
pub const WITNESS_CAP: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub ok: bool,
    pub witnesses: Vec<String>,
    /// Witnesses dropped beyond [`WITNESS_CAP`].
    pub truncated: usize,
}

impl Verdict {
    pub fn from_failures(mut failures: Vec<String>) -> Self {
        let truncated = failures.len().saturating_sub(WITNESS_CAP);
        failures.truncate(WITNESS_CAP);
        Verdict {
            ok: failures.is_empty(),
            witnesses: failures,
            truncated,
        }
    }

    pub fn from_report(r: CheckReport) -> Self {
        Self::from_failures(r.failures)
    }

    fn from_sweep(s: &SweepSummary) -> Self {
        let mut f = vec![];
        if let Some(w) = &s.first_failure {
            f.push(format!("{} of {} pairs / {} triples fail; first: {w}", s.failures, s.pairs, s.triples));
        } else if !s.ok() {
            f.push(format!("{} failures", s.failures));
        }
        Self::from_failures(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankInfo {
    pub declared: Option<usize>,
    /// Exhaustive rank of the whole group, when its order permits.
    pub bruteforce: Option<usize>,
    /// `Σ d(A_i) + d(B_i) + d(C_i)`, an upper bound for the rank.
    pub structural_bound: usize,
    pub used: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputSummary {
    pub description: String,
    pub order: u128,
    pub factors: usize,
    pub char_exclusion: Option<u64>,
    pub rank: RankInfo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorGroups {
    #[serde(rename = "A")]
    pub a: Vec<u64>,
    #[serde(rename = "B")]
    pub b: Vec<u64>,
    #[serde(rename = "C")]
    pub c: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorReport {
    pub index: usize,
    pub groups: FactorGroups,
    pub admissible_tuple: Option<Vec<u64>>,
    pub theta_modulus: Option<u64>,
    pub lattice_data: Option<IsotropicSublatticeData>,
    pub c1: Option<EvenClass>,
    pub waring_certificate: Option<WaringCertificate>,
    pub chern_certificate: Option<ComplementPlan>,
    pub composed: Vec<ComposedReport>,
}

/// What the construction actually uses, to compare with the uniform bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealizedParams {
    /// `Σ` of the admissible tuple lengths.
    pub torus_power: u128,
    pub projective_factors: u128,
    /// `Σ 2·n_i` over the lattice data.
    pub torus_dim: u128,
    /// Largest complement rank `R3(2·n_i)`.
    pub max_bundle_rank: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub schema: u32,
    pub mode: Mode,
    pub input_summary: InputSummary,
    pub per_factor: Vec<FactorReport>,
    pub variety_params: VarietyParams,
    pub manifold_params: ManifoldParams,
    pub realized: RealizedParams,
    pub verification: BTreeMap<String, Verdict>,
    pub ok: bool,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per failing check, or a pass line.
    pub fn summary(&self) -> String {
        let failing: Vec<&String> = self
            .verification
            .iter()
            .filter(|(_, v)| !v.ok)
            .map(|(k, _)| k)
            .collect();
        let mut s = format!(
            "{}: order {}, {} factor(s), r = {}, {} checks",
            self.input_summary.description,
            self.input_summary.order,
            self.input_summary.factors,
            self.input_summary.rank.used,
            self.verification.len()
        );
        if failing.is_empty() {
            s.push_str(", all pass");
        } else {
            for k in failing {
                s.push_str(&format!("\nFAIL {k}: {:?}", self.verification[k].witnesses.first()));
            }
        }
        s
    }
}

/// `Σ_{j<k} Im h(b_j, b_k)·e_j∧e_k` over the basis `(λ_1, …, λ_n, iλ_1, …, iλ_n)`
/// of `Λ`. Integral whenever the data is valid.
pub fn first_chern_class(d: &IsotropicSublatticeData) -> Result<LineBundleSymbol> {
    let n = d.n;
    let basis: Vec<_> = (0..n)
        .map(|k| d.lambda_real(k))
        .chain((0..n).map(|k| d.lambda_imaginary(k)))
        .map(|v| v.to_complex())
        .collect();
    let mut c1 = EvenClass::zero(2 * n)?;
    for j in 0..2 * n {
        for k in j + 1..2 * n {
            let e = d.h(&basis[j], &basis[k]).im;
            if !e.is_integer() {
                return Err(Error::InvalidInput(format!(
                    "Im h(b_{j}, b_{k}) = {e} is not an integer"
                )));
            }
            c1.add_term((1 << j) | (1 << k), e)?;
        }
    }
    LineBundleSymbol::new(c1)
}

fn cocycle_certificate(d: &IsotropicSublatticeData, bounds: &Bounds) -> Result<SweepSummary> {
    let work = 3u128.pow(6 * d.n as u32);
    Bounds::check("cocycle certificate points", work, bounds.search_budget as u128)?;
    let s = ScaledCocycle::new(d, 2 * d.c.max(1))?;
    Ok(polynomial_certificate(&s))
}

fn ranks(mu: &BilinearPairing) -> usize {
    mu.a.rank() + mu.b.rank() + mu.c.rank()
}

fn order_of(factors: &[BilinearPairing]) -> u128 {
    factors
        .iter()
        .map(|mu| mu.a.order() * mu.b.order() * mu.c.order())
        .product()
}

fn rank_info(factors: &[BilinearPairing], declared: Option<usize>, bounds: &Bounds) -> Result<RankInfo> {
    let structural_bound = factors.iter().map(ranks).sum();
    let order = order_of(factors);
    let bruteforce = if order <= bounds.rank_order as u128 {
        let parts: Vec<Arc<dyn FiniteGroup>> = factors
            .iter()
            .map(|mu| HeisenbergGroup::new(mu.clone()).map(|h| Arc::new(h) as Arc<dyn FiniteGroup>))
            .collect::<Result<_>>()?;
        match crate::finabel::rank_bruteforce(&ProductGroup::new(parts), bounds) {
            Ok(r) => Some(r),
            Err(Error::BoundExceeded { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(RankInfo {
        declared,
        bruteforce,
        structural_bound,
        used: declared.or(bruteforce).unwrap_or(structural_bound),
    })
}

/// Runs every stage selected by `mode` on every factor. Coprimality
/// violations and exhausted bounds are errors; failed checks are recorded in
/// the report and make `ok` false.
pub fn run(cfg: &Config, mode: Mode, bounds: &Bounds) -> Result<PipelineReport> {
    let spec = cfg.group()?;
    let factors = spec.factors()?;
    let order = order_of(&factors);
    if let Some(p) = cfg.char_exclusion {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("characteristic {p} is not prime")));
        }
        if order % p as u128 == 0 {
            return Err(Error::Coprimality { p, order });
        }
    }
    let rank = rank_info(&factors, cfg.rank_bound, bounds)?;
    let mut verification = BTreeMap::new();
    let mut rank_failures = vec![];
    if let (Some(dcl), Some(bf)) = (rank.declared, rank.bruteforce) {
        if dcl < bf {
            rank_failures.push(format!("declared rank bound {dcl} is below the exhaustive rank {bf}"));
        }
    }
    verification.insert("params.rank".to_string(), Verdict::from_failures(rank_failures));

    let mut per_factor = Vec::with_capacity(factors.len());
    let mut realized = RealizedParams {
        torus_power: 0,
        projective_factors: factors.len() as u128,
        torus_dim: 0,
        max_bundle_rank: 0,
    };
    for (i, mu) in factors.iter().enumerate() {
        let key = |s: &str| format!("factor[{i}].{s}");
        let mut fr = FactorReport {
            index: i,
            groups: FactorGroups {
                a: mu.a.factors().to_vec(),
                b: mu.b.factors().to_vec(),
                c: mu.c.factors().to_vec(),
            },
            admissible_tuple: None,
            theta_modulus: None,
            lattice_data: None,
            c1: None,
            waring_certificate: None,
            chern_certificate: None,
            composed: vec![],
        };
        realized.torus_power += mu.a.rank() as u128;
        let input = heisenberg_input(mu, cfg.char_exclusion)?;

        if mode.birational() {
            let w = parametrise(mu, cfg.char_exclusion)?;
            fr.admissible_tuple = Some(w.delta.entries.clone());
            fr.theta_modulus = Some(w.modulus);
            verification.insert(
                key("theta.parametrisation"),
                Verdict::from_report(verify_parametrisation(&w, mu, bounds)?),
            );
            let ses = SesMorphismWitness::from_parametrisation(&w, mu)?;
            verification.insert(key("theta.diagram"), Verdict::from_report(check_ses_morphism(&ses, bounds)?));
            let composed = composed_pipeline_check(&input, Target::Theta, bounds)?;
            verification.insert(key("theta.composed"), composed_verdict(&composed));
            fr.composed.push(composed);
        }

        if mode.diff() {
            let out = data_from_heisenberg(mu, bounds)?;
            verification.insert(
                key("lattice.construction"),
                Verdict::from_report(verify_construction(&out, mu, bounds)?),
            );
            verification.insert(
                key("lattice.cocycle"),
                Verdict::from_sweep(&cocycle_certificate(&out.data, bounds)?),
            );
            let composed = composed_pipeline_check(&input, Target::Lattice, bounds)?;
            verification.insert(key("lattice.composed"), composed_verdict(&composed));
            fr.composed.push(composed);

            let m = 2 * out.data.n;
            let c1 = first_chern_class(&out.data)?;
            let plan = complement_plan(&c1, cfg.d, m)?;
            let mut alpha_failures = plan.alpha.certificate.failures.clone();
            if !plan.alpha.waring.checks.all() {
                alpha_failures.push(format!("Waring checks: {:?}", plan.alpha.waring.checks));
            }
            verification.insert(key("chern.alpha"), Verdict::from_failures(alpha_failures));
            let mut total_failures = plan.total.failures.clone();
            if !plan.total.trivial && total_failures.is_empty() {
                total_failures.push("total bundle not certified trivial".into());
            }
            if plan.target_rank != r3_bound(m as u32) {
                total_failures.push(format!("total rank {} differs from R3({m})", plan.target_rank));
            }
            verification.insert(key("chern.complement"), Verdict::from_failures(total_failures));

            realized.torus_dim += m as u128;
            realized.max_bundle_rank = realized.max_bundle_rank.max(plan.target_rank);
            fr.waring_certificate = Some(plan.alpha.waring.clone());
            fr.c1 = Some(c1.c1);
            fr.lattice_data = Some(out.data);
            fr.chern_certificate = Some(plan);
        }
        per_factor.push(fr);
    }

    let r = rank.used as u64;
    let variety = variety_params(r);
    let manifold = manifold_params(r);
    if mode.birational() {
        let mut f = vec![];
        if realized.torus_power > variety.torus_power {
            f.push(format!(
                "torus power {} exceeds r⌊r/2⌋ = {}",
                realized.torus_power, variety.torus_power
            ));
        }
        if realized.projective_factors > variety.projective_dim {
            f.push(format!(
                "{} projective factors exceed r = {}",
                realized.projective_factors, variety.projective_dim
            ));
        }
        verification.insert("params.variety".into(), Verdict::from_failures(f));
    }
    if mode.diff() {
        let mut f = vec![];
        if realized.torus_dim > manifold.torus_dim {
            f.push(format!(
                "torus dimension {} exceeds 2r⌊r/2⌋ = {}",
                realized.torus_dim, manifold.torus_dim
            ));
        }
        if realized.max_bundle_rank > manifold.t {
            f.push(format!(
                "bundle rank {} exceeds t = {}",
                realized.max_bundle_rank, manifold.t
            ));
        }
        verification.insert("params.manifold".into(), Verdict::from_failures(f));
    }

    let ok = verification.values().all(|v| v.ok);
    Ok(PipelineReport {
        schema: SCHEMA_VERSION,
        mode,
        input_summary: InputSummary {
            description: spec.describe(),
            order,
            factors: factors.len(),
            char_exclusion: cfg.char_exclusion,
            rank,
        },
        per_factor,
        variety_params: variety,
        manifold_params: manifold,
        realized,
        verification,
        ok,
    })
}

fn composed_verdict(r: &ComposedReport) -> Verdict {
    let mut f: Vec<String> = r
        .arrows
        .iter()
        .flat_map(|a| a.failures.iter().map(move |w| format!("{}: {w}", a.name)))
        .collect();
    if r.final_image_order != r.source_order {
        f.push(format!(
            "image order {} differs from source order {}",
            r.final_image_order, r.source_order
        ));
    }
    Verdict::from_failures(f)
}

/// Output of the `theta check` and `lattice check` commands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutput {
    pub schema: u32,
    pub command: String,
    pub details: BTreeMap<String, serde_json::Value>,
    pub verification: BTreeMap<String, Verdict>,
    pub ok: bool,
}

impl CheckOutput {
    fn new(command: &str) -> Self {
        CheckOutput {
            schema: SCHEMA_VERSION,
            command: command.into(),
            details: BTreeMap::new(),
            verification: BTreeMap::new(),
            ok: true,
        }
    }

    fn finish(mut self) -> Self {
        self.ok = self.verification.values().all(|v| v.ok);
        self
    }

    fn detail<T: Serialize>(&mut self, key: String, value: &T) {
        self.details
            .insert(key, serde_json::to_value(value).expect("detail serializes"));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("output serializes")
    }

    pub fn summary(&self) -> String {
        let failing: Vec<&String> = self.verification.iter().filter(|(_, v)| !v.ok).map(|(k, _)| k).collect();
        if failing.is_empty() {
            format!("{}: {} checks, all pass", self.command, self.verification.len())
        } else {
            format!("{}: failing {:?}", self.command, failing)
        }
    }
}

/// Parametrisation checks per factor of `group`, and group-law checks of
/// `Θ(δ)` for an `admissible` tuple (scalar modulus `d_1`).
pub fn theta_check(cfg: &Config, bounds: &Bounds) -> Result<CheckOutput> {
    if cfg.group.is_none() && cfg.admissible.is_none() {
        return Err(Error::InvalidInput("config needs \"group\" or \"admissible\"".into()));
    }
    let mut out = CheckOutput::new("theta check");
    if let Some(spec) = &cfg.group {
        for (i, mu) in spec.factors()?.iter().enumerate() {
            let w = parametrise(mu, cfg.char_exclusion)?;
            out.detail(format!("factor[{i}].witness"), &w);
            out.verification.insert(
                format!("factor[{i}].parametrisation"),
                Verdict::from_report(verify_parametrisation(&w, mu, bounds)?),
            );
            let ses = SesMorphismWitness::from_parametrisation(&w, mu)?;
            out.verification.insert(
                format!("factor[{i}].diagram"),
                Verdict::from_report(check_ses_morphism(&ses, bounds)?),
            );
        }
    }
    if let Some(adm) = &cfg.admissible {
        let delta = adm.tuple()?;
        let m = delta.entries.first().copied().unwrap_or(1);
        let g = ThetaGroup::new(delta.clone(), m)?;
        Bounds::check("theta group order", g.order() as u128, bounds.group_order as u128)?;
        out.detail("admissible.entries".into(), &delta.entries);
        out.detail("admissible.order".into(), &g.order());
        out.verification.insert(
            "admissible.group_axioms".into(),
            Verdict::from_report(check_group_axioms(&g, bounds)?),
        );
        let centre = crate::heisenberg::centre(&g, bounds)?;
        let scalars: Vec<usize> = (0..m as usize).collect();
        let f = if centre == scalars {
            vec![]
        } else {
            vec![format!("centre has {} elements, expected the {m} scalars", centre.len())]
        };
        out.verification.insert("admissible.centre".into(), Verdict::from_failures(f));
    }
    Ok(out.finish())
}

/// Validation, induced pairing, action and cocycle checks for `sublattice`
/// data, and the construction from each factor of `group`.
pub fn lattice_check(cfg: &Config, bounds: &Bounds) -> Result<CheckOutput> {
    if cfg.group.is_none() && cfg.sublattice.is_none() {
        return Err(Error::InvalidInput("config needs \"group\" or \"sublattice\"".into()));
    }
    let mut out = CheckOutput::new("lattice check");
    let mut datasets = vec![];
    if let Some(s) = &cfg.sublattice {
        datasets.push(("sublattice".to_string(), s.data()?));
    }
    if let Some(spec) = &cfg.group {
        for (i, mu) in spec.factors()?.iter().enumerate() {
            let c = data_from_heisenberg(mu, bounds)?;
            out.verification.insert(
                format!("factor[{i}].construction"),
                Verdict::from_report(verify_construction(&c, mu, bounds)?),
            );
            datasets.push((format!("factor[{i}]"), c.data));
        }
    }
    for (name, d) in datasets {
        let v = validate_data(&d);
        out.detail(format!("{name}.data"), &d);
        out.detail(format!("{name}.validation"), &v);
        out.verification.insert(format!("{name}.validation"), Verdict::from_failures(v.failures()));
        if !v.ok() {
            continue;
        }
        let q = mu_from_data(&d, bounds)?;
        out.detail(format!("{name}.quotient"), &q.pairing);
        out.verification.insert(
            format!("{name}.action"),
            Verdict::from_report(verify_action_morphisms(&d, bounds)?),
        );
        out.verification.insert(
            format!("{name}.cocycle"),
            Verdict::from_sweep(&cocycle_certificate(&d, bounds)?),
        );
    }
    Ok(out.finish())
}

/// `c1` of a single lattice dataset, for display.
pub fn chern_class_of(d: &IsotropicSublatticeData) -> Result<EvenClass> {
    Ok(first_chern_class(d)?.c1)
}
