//! The reproducibility report: every stage run on `H_k`, with certificates,
//! hashes, bound formulas and a consistency audit.

mod audit;
mod formulas;
mod table;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinat::{
    chromatic_number, clique_number, explicit_independent_set_hk, hadamard_clique_hk, independence_number, Param, ParamResult, Witness,
};
use crate::error::{Error, Result};
use crate::graphs::{make_hk, CayleyZ2, Graph};
use crate::hadamard::hadamard_of_order;
use crate::hash::canonical_hash;
use crate::polybound::{rank_certificate, representation_for_hk, RankBoundCertificate};
use crate::qsim::{
    chrom_witness_from_flat_rep, hk_clique_lists, orth_rep_hk, simulate_channel_protocol_hk, simulate_source_protocol, verify_chrom_witness,
    ChannelReport, ChromJson, ChromWitness, Permutations, SourceReport, WitnessReport,
};
use crate::relax::{theta_cayley_lp_reduced, witness_to_theta_plus_certificate, CayleyLpOptions, OrbitPartition, ThetaCertificate, ThetaVariant};

pub use audit::{consistency_audit, verify_artifacts, AuditLink, AuditResult, AUDIT_TOL};
pub use formulas::{eval_theorem_bounds, prime_power_form, BoundLine, FormulaRecord, Relation};
pub use table::render_table;

pub const SCHEMA: &str = "zesc/1";
/// Largest `H_k` expanded for searches, witnesses and rank computations.
pub const MAX_EXPANDED_VERTICES: usize = 1 << 12;

/// Knobs for [`reproduce`]. Budgets are search-node counts, so a report
/// depends only on `(k, config)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReproduceConfig {
    pub seed: u64,
    /// Verification tolerance for witnesses and simulations.
    pub tol: f64,
    /// Node budget for each exact parameter search.
    pub budget: u64,
    pub simulations: bool,
    /// Random maximal cliques offered per input in the source simulation.
    pub extra_cliques: usize,
    /// Seeded random adversaries in the channel simulation.
    pub adversaries: usize,
    /// Random coordinate permutations used to spread the Hadamard cliques.
    pub permutations: usize,
    /// Witness certificates are built up to this many vertices.
    pub max_dense_vertices: usize,
}

impl Default for ReproduceConfig {
    fn default() -> Self {
        ReproduceConfig {
            seed: 0,
            tol: 1e-9,
            budget: 100_000,
            simulations: true,
            extra_cliques: 5,
            adversaries: 100,
            permutations: 4,
            max_dense_vertices: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GraphSummary {
    pub m: u32,
    pub vertices: usize,
    pub degree: usize,
    pub edges: usize,
    pub edgeless: bool,
    pub hash: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// `H_k` itself.
    Graph,
    Complement,
}

impl Role {
    fn key(self) -> &'static str {
        match self {
            Role::Graph => "h",
            Role::Complement => "complement",
        }
    }
}

fn variant_key(v: ThetaVariant) -> &'static str {
    match v {
        ThetaVariant::Theta => "theta",
        ThetaVariant::ThetaPlus => "theta-plus",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ThetaEntry {
    pub role: Role,
    pub variant: ThetaVariant,
    /// Certified upper bound (the certificate's `λ`).
    pub value: f64,
    pub exact: Option<String>,
    /// Value of the spectral side, a lower bound.
    pub lower: Option<f64>,
    pub certificate: ThetaCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WitnessSummary {
    pub d: usize,
    pub t: usize,
    /// Largest `|⟨f(u), f(v)⟩|` over edges of the flat representation.
    pub orthogonality_residual: f64,
    pub report: Option<WitnessReport>,
    /// Canonical hash of the witness in its JSON form.
    pub witness_hash: Option<String>,
    /// `θ+` certificate of the complement at `λ = t`.
    pub certificate: Option<ThetaCertificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExplicitSummary {
    pub independent_set: Vec<usize>,
    pub clique: Option<Vec<usize>>,
    pub clique_construction: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Simulations {
    pub source: Option<SourceReport>,
    pub channel: Option<ChannelReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct StageRecord {
    pub name: String,
    /// `ok`, `partial(budget)`, `skipped(<reason>)` or `error`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

/// Everything [`reproduce`] established about `H_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BoundsReport {
    pub schema: String,
    pub k: usize,
    pub config: ReproduceConfig,
    pub graph: Option<GraphSummary>,
    pub params: Vec<ParamResult>,
    pub theta: Vec<ThetaEntry>,
    pub witness: Option<WitnessSummary>,
    pub explicit: Option<ExplicitSummary>,
    pub rank: Option<RankBoundCertificate>,
    pub simulations: Simulations,
    pub formulas: FormulaRecord,
    pub stages: Vec<StageRecord>,
    pub notes: Vec<String>,
    /// Artifact name to canonical hash.
    pub provenance: BTreeMap<String, String>,
}

/// Lower and upper ends of a bracketed quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl BoundsReport {
    /// A report with no stage results.
    pub fn empty(k: usize) -> BoundsReport {
        BoundsReport {
            schema: SCHEMA.into(),
            k,
            config: ReproduceConfig::default(),
            graph: None,
            params: vec![],
            theta: vec![],
            witness: None,
            explicit: None,
            rank: None,
            simulations: Simulations::default(),
            formulas: eval_theorem_bounds(k),
            stages: vec![],
            notes: vec![],
            provenance: BTreeMap::new(),
        }
    }

    pub fn param(&self, p: Param) -> Option<&ParamResult> {
        self.params.iter().find(|r| r.param == p)
    }

    pub fn theta_entry(&self, role: Role, variant: ThetaVariant) -> Option<&ThetaEntry> {
        self.theta.iter().find(|e| e.role == role && e.variant == variant)
    }

    pub fn theta_value(&self, role: Role, variant: ThetaVariant) -> Option<f64> {
        self.theta_entry(role, variant).map(|e| e.value)
    }

    /// `α(H_k)` combining the search, the explicit set and the rank bound.
    pub fn alpha_bracket(&self) -> Option<Bracket> {
        let search = self.param(Param::Alpha);
        let mut lower = search.map(|r| r.lower as f64);
        if let Some(e) = &self.explicit {
            lower = Some(lower.unwrap_or(0.0).max(e.independent_set.len() as f64));
        }
        let mut upper = search.map(|r| r.upper as f64);
        if let Some(r) = &self.rank {
            upper = Some(upper.unwrap_or(f64::INFINITY).min(r.alpha_upper as f64));
        }
        Some(Bracket { lower: lower?, upper: upper.unwrap_or(f64::INFINITY) })
    }

    /// `ω(H_k)` from the search, capped by `θ(H̄_k)`.
    pub fn omega_bracket(&self) -> Option<Bracket> {
        let w = self.param(Param::Omega)?;
        let cap = self.theta_value(Role::Complement, ThetaVariant::Theta).map_or(f64::INFINITY, |t| (t + AUDIT_TOL).floor());
        Some(Bracket { lower: w.lower as f64, upper: (w.upper as f64).min(cap) })
    }

    /// `χ(H_k)` from the search, raised to `⌈n / α⌉` with the combined `α`
    /// upper bound.
    pub fn chi_bracket(&self) -> Option<Bracket> {
        let c = self.param(Param::Chi)?;
        let mut lower = c.lower as f64;
        if let (Some(g), Some(a)) = (&self.graph, self.alpha_bracket()) {
            if a.upper.is_finite() && a.upper > 0.0 {
                lower = lower.max((g.vertices as f64 / a.upper).ceil());
            }
        }
        Some(Bracket { lower, upper: c.upper as f64 })
    }

    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }

    /// Whether any stage ended in an error.
    pub fn has_errors(&self) -> bool {
        self.stages.iter().any(|s| s.status == "error")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<BoundsReport> {
        let r: BoundsReport = serde_json::from_str(s)?;
        if r.schema != SCHEMA {
            return Err(Error::Serde(format!("unsupported schema {:?}", r.schema)));
        }
        Ok(r)
    }
}

struct Run {
    report: BoundsReport,
}

impl Run {
    fn record(&mut self, name: &str, status: impl Into<String>, detail: Option<String>) {
        self.report.stages.push(StageRecord { name: name.into(), status: status.into(), detail });
    }

    fn hash<S: Serialize>(&mut self, key: impl Into<String>, value: &S) -> Result<()> {
        self.report.provenance.insert(key.into(), canonical_hash(value)?);
        Ok(())
    }

    /// Runs a stage, recording `ok` or the error.
    fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Run) -> Result<T>) -> Option<T> {
        match f(self) {
            Ok(v) => {
                if self.report.stage(name).is_none() {
                    self.record(name, "ok", None);
                }
                Some(v)
            }
            Err(e) => {
                self.record(name, "error", Some(e.to_string()));
                None
            }
        }
    }
}

fn skip_size(n: usize) -> String {
    format!("{n} vertices exceed the expansion limit {MAX_EXPANDED_VERTICES}")
}

/// Runs the pipeline on `H_k`. Individual stage failures are recorded in
/// `stages` and the report is still returned; only an invalid `k` is an
/// error.
pub fn reproduce(k: usize, config: &ReproduceConfig) -> Result<BoundsReport> {
    let hk = make_hk(k)?;
    let n = hk.order();
    let mut run = Run { report: BoundsReport::empty(k) };
    run.report.config = config.clone();

    let summary = GraphSummary {
        m: hk.m(),
        vertices: n,
        degree: hk.degree(),
        edges: hk.edge_count(),
        edgeless: hk.degree() == 0,
        hash: hk.hash(),
    };
    run.report.provenance.insert("graph".into(), summary.hash.clone());
    run.report.graph = Some(summary);
    run.record("graph", "ok", None);
    if hk.degree() == 0 {
        run.report.notes.push(format!(
            "H_{k} has no edges since (k+1)/2 is odd: every parameter is trivial and the rates carry no information"
        ));
    }

    let graph: Option<Graph> = if n <= MAX_EXPANDED_VERTICES { hk.to_graph().ok() } else { None };

    // exact parameters
    match &graph {
        Some(g) => {
            run.stage("params", |run| {
                let params = vec![
                    independence_number(g, config.budget),
                    clique_number(g, config.budget),
                    chromatic_number(g, config.budget),
                ];
                let open: Vec<String> =
                    params.iter().filter(|p| !p.is_exact()).map(|p| format!("{} in [{}, {}]", param_key(p.param), p.lower, p.upper)).collect();
                for p in &params {
                    run.hash(format!("param/{}", param_key(p.param)), p)?;
                }
                run.report.params = params;
                if !open.is_empty() {
                    run.record("params", "partial(budget)", Some(open.join("; ")));
                }
                Ok(())
            });
        }
        None => run.record("params", "skipped(size)", Some(skip_size(n))),
    }

    // θ and θ+ of H_k and its complement
    run.stage("theta", |run| theta_stage(run, k, &hk));

    // flat representation, witness and θ+ certificate
    let mut chrom: Option<ChromWitness> = None;
    match &graph {
        Some(g) => {
            chrom = run.stage("witness", |run| witness_stage(run, k, g, config)).flatten();
        }
        None => run.record("witness", "skipped(size)", Some(skip_size(n))),
    }

    // explicit independent set and Hadamard clique
    match &graph {
        Some(g) => {
            run.stage("explicit", |run| explicit_stage(run, k, g));
        }
        None => run.record("explicit", "skipped(size)", Some(skip_size(n))),
    }

    // rank certificate
    match (prime_power_form(k), &graph) {
        (None, _) => run.record("rank", "skipped(form)", Some(format!("k = {k} is not 4 p^l - 1 with p an odd prime"))),
        (Some(_), None) => run.record("rank", "skipped(size)", Some(skip_size(n))),
        (Some((p, l)), Some(g)) => {
            run.stage("rank", |run| {
                let rep = representation_for_hk(k, p, l)?;
                let mut probes = vec![];
                if let Some(e) = &run.report.explicit {
                    probes.push(e.independent_set.clone());
                }
                if let Some(Witness::VertexSet(s)) = run.report.param(Param::Alpha).map(|a| &a.witness) {
                    if !s.is_empty() {
                        probes.push(s.clone());
                    }
                }
                let cert = rank_certificate(&rep, g, &probes, Some(l))?;
                run.hash("rank", &cert)?;
                run.report.rank = Some(cert);
                Ok(())
            });
        }
    }

    // protocol simulations
    if !config.simulations {
        run.record("source-simulation", "skipped(disabled)", None);
        run.record("channel-simulation", "skipped(disabled)", None);
    } else {
        match (&graph, &chrom) {
            _ if hk.degree() == 0 => run.record("source-simulation", "skipped(edgeless)", None),
            (Some(g), Some(w)) => {
                run.stage("source-simulation", |run| {
                    let perms = if k <= 7 { Permutations::All } else { Permutations::Random(config.permutations) };
                    let (_, lists) = hk_clique_lists(k, perms, config.extra_cliques, config.seed)?;
                    let r = simulate_source_protocol(g, w, &lists, config.seed, config.tol)?;
                    run.hash("simulation/source", &r)?;
                    run.report.simulations.source = Some(r);
                    Ok(())
                });
            }
            _ => run.record("source-simulation", "skipped(no-witness)", None),
        }
        let code = run.report.explicit.as_ref().map_or(0, |e| e.independent_set.len());
        if hk.degree() == 0 {
            run.record("channel-simulation", "skipped(edgeless)", None);
        } else if graph.is_none() {
            run.record("channel-simulation", "skipped(size)", Some(skip_size(n)));
        } else if code < k + 1 {
            run.record(
                "channel-simulation",
                "skipped(precondition)",
                Some(format!("explicit independent set of size {code} is smaller than d = {}", k + 1)),
            );
        } else {
            run.stage("channel-simulation", |run| {
                let r = simulate_channel_protocol_hk(k, 1, config.permutations, config.adversaries, config.seed)?;
                run.hash("simulation/channel", &r)?;
                run.report.simulations.channel = Some(r);
                Ok(())
            });
        }
    }

    // formulas
    let formulas = eval_theorem_bounds(k);
    run.hash("formulas", &formulas)?;
    if let (Some(cs), Some(cu)) = (formulas.line("c*-lower").and_then(|l| l.value), formulas.line("c-upper").and_then(|l| l.value)) {
        let verdict = if cs > cu { "exceeds" } else { "does not exceed" };
        run.report.notes.push(format!(
            "at k = {k} the c* lower bound {cs:.4} {verdict} the c upper bound {cu:.4}; the separations between the quantum and classical quantities are asymptotic in k and are not claimed at this size"
        ));
    }
    run.report.formulas = formulas;
    run.record("formulas", "ok", None);
    Ok(run.report)
}

fn param_key(p: Param) -> &'static str {
    match p {
        Param::Alpha => "alpha",
        Param::Omega => "omega",
        Param::Chi => "chi",
    }
}

fn theta_stage(run: &mut Run, k: usize, hk: &CayleyZ2) -> Result<()> {
    let part = OrbitPartition::hk(k)?;
    for (role, c) in [(Role::Graph, hk.clone()), (Role::Complement, hk.complement())] {
        for variant in [ThetaVariant::Theta, ThetaVariant::ThetaPlus] {
            let lp = theta_cayley_lp_reduced(&c, variant, &part, CayleyLpOptions::default())?;
            let mut cert = lp.certificate;
            // the invariant vector determines Z; the dense copy is dropped
            cert.z = None;
            run.hash(format!("theta/{}/{}", role.key(), variant_key(variant)), &cert)?;
            run.report.theta.push(ThetaEntry {
                role,
                variant,
                value: cert.lambda,
                exact: cert.lambda_exact.clone(),
                lower: cert.primal,
                certificate: cert,
            });
        }
    }
    Ok(())
}

fn witness_stage(run: &mut Run, k: usize, g: &Graph, config: &ReproduceConfig) -> Result<Option<ChromWitness>> {
    let rep = orth_rep_hk(k)?;
    let residual = rep.verify(g, 1e-9)?;
    let mut summary =
        WitnessSummary { d: rep.d, t: rep.d, orthogonality_residual: residual, report: None, witness_hash: None, certificate: None };
    if g.n() > config.max_dense_vertices {
        run.report.witness = Some(summary);
        run.record(
            "witness",
            "skipped(size)",
            Some(format!("witness matrices and certificate are built up to {} vertices", config.max_dense_vertices)),
        );
        return Ok(None);
    }
    let w = chrom_witness_from_flat_rep(&rep, g)?;
    let report = verify_chrom_witness(&w, g, config.tol)?;
    let witness_hash = canonical_hash(&ChromJson::from(w.clone()))?;
    run.report.provenance.insert("witness".into(), witness_hash.clone());
    summary.witness_hash = Some(witness_hash);
    let pass = report.pass;
    summary.report = Some(report);
    if !pass {
        run.report.witness = Some(summary);
        return Err(Error::Verification("flat witness fails verification".into()));
    }
    let cert = witness_to_theta_plus_certificate(&w, g, config.tol)?;
    run.hash("witness/theta-plus", &cert)?;
    summary.certificate = Some(cert);
    run.report.witness = Some(summary);
    Ok(Some(w))
}

fn explicit_stage(run: &mut Run, k: usize, g: &Graph) -> Result<()> {
    let set: Vec<usize> = explicit_independent_set_hk(k)?.into_iter().map(|v| v as usize).collect();
    if !g.is_independent(&set) {
        return Err(Error::Verification("explicit set is not independent".into()));
    }
    let (clique, construction) = match hadamard_of_order(k + 1) {
        Some(h) => {
            let c: Vec<usize> = hadamard_clique_hk(&h)?.into_iter().map(|v| v as usize).collect();
            if !g.is_clique(&c) {
                return Err(Error::Verification("Hadamard clique is not a clique".into()));
            }
            (Some(c), Some(h.provenance().to_string()))
        }
        None => (None, None),
    };
    run.hash("explicit/independent-set", &set)?;
    if let Some(c) = &clique {
        run.hash("explicit/clique", c)?;
    }
    run.report.explicit = Some(ExplicitSummary { independent_set: set, clique, clique_construction: construction });
    Ok(())
}
