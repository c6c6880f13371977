use serde::{Deserialize, Serialize};

use super::{BoundsReport, Role};
use crate::combinat::{Param, Witness};
use crate::error::{Error, Result};
use crate::graphs::make_hk;
use crate::hash::canonical_hash;
use crate::qsim::{chrom_witness_from_flat_rep, orth_rep_hk, ChromJson};
use crate::relax::ThetaVariant;

/// Slack allowed on each link, relative to the larger side.
pub const AUDIT_TOL: f64 = 1e-6;

/// One inequality `lower ≤ upper` of the chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct AuditLink {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct AuditResult {
    pub pass: bool,
    pub links: Vec<AuditLink>,
    pub violated: Vec<String>,
}

struct Links(Vec<AuditLink>);

impl Links {
    fn check(&mut self, name: &str, lower: Option<f64>, upper: Option<f64>) {
        if let (Some(lower), Some(upper)) = (lower, upper) {
            if !lower.is_finite() || !upper.is_finite() {
                if lower.is_nan() || upper.is_nan() {
                    self.0.push(AuditLink { name: name.into(), lower, upper, holds: false });
                }
                return;
            }
            let slack = AUDIT_TOL * lower.abs().max(upper.abs()).max(1.0);
            self.0.push(AuditLink { name: name.into(), lower, upper, holds: lower <= upper + slack });
        }
    }
}

/// Checks every finite-level inequality between the quantities present in
/// the report. Links with a missing side are not evaluated, so a report
/// with no stage results passes.
pub fn consistency_audit(r: &BoundsReport) -> AuditResult {
    let mut l = Links(vec![]);
    let theta = |role, v| r.theta_value(role, v);
    let th = theta(Role::Graph, ThetaVariant::Theta);
    let thp = theta(Role::Graph, ThetaVariant::ThetaPlus);
    let tc = theta(Role::Complement, ThetaVariant::Theta);
    let tcp = theta(Role::Complement, ThetaVariant::ThetaPlus);
    let alpha = r.param(Param::Alpha);
    let omega = r.param(Param::Omega);
    let chi = r.param(Param::Chi);
    let bracket = r.alpha_bracket();
    let f = &r.formulas;

    for p in [alpha, omega, chi].into_iter().flatten() {
        l.check(&format!("{p:?} lower <= {p:?} upper", p = p.param).to_lowercase(), Some(p.lower as f64), Some(p.upper as f64));
    }
    l.check("alpha lower <= alpha upper (combined)", bracket.map(|b| b.lower), bracket.map(|b| b.upper));
    let (wb, cb) = (r.omega_bracket(), r.chi_bracket());
    l.check("omega lower <= omega upper (combined)", wb.map(|b| b.lower), wb.map(|b| b.upper));
    l.check("chi lower <= chi upper (combined)", cb.map(|b| b.lower), cb.map(|b| b.upper));
    l.check("alpha <= theta(H)", bracket.map(|b| b.lower), th);
    l.check("alpha <= rank bound", bracket.map(|b| b.lower), r.rank.as_ref().map(|c| c.alpha_upper as f64));
    if let Some(c) = &r.rank {
        l.check("rank <= D", Some(c.rank as f64), Some(c.dimension as f64));
    }
    for (e, lower) in r.theta.iter().filter_map(|e| e.lower.map(|x| (e, x))) {
        l.check(&format!("theta spectral side <= certificate ({:?}, {:?})", e.role, e.variant).to_lowercase(), Some(lower), Some(e.value));
    }
    l.check("theta(H) <= theta+(H)", th, thp);
    l.check("omega <= theta(complement)", omega.map(|p| p.lower as f64), tc);
    l.check("theta(complement) <= theta+(complement)", tc, tcp);
    l.check("theta+(complement) <= chi upper", tcp, chi.map(|p| p.upper as f64));
    l.check("omega <= chi upper", omega.map(|p| p.lower as f64), chi.map(|p| p.upper as f64));
    let t = r.witness.as_ref().map(|w| w.t as f64);
    l.check("theta+(complement) <= witness messages", tcp, t);
    if let Some(c) = r.witness.as_ref().and_then(|w| w.certificate.as_ref()) {
        l.check("theta+(complement) <= witness certificate", tcp, Some(c.lambda));
    }
    let n = r.graph.as_ref().map(|g| g.vertices as f64);
    l.check("n <= theta(H) theta(complement)", n, th.zip(tc).map(|(a, b)| a * b));
    // finite-level consequences of the closed-form lines
    let log2 = |x: f64| x.log2();
    l.check("log alpha <= c upper", bracket.map(|b| log2(b.lower.max(1.0))), f.applicable_value("c-upper"));
    l.check("R lower <= log chi upper", f.applicable_value("R-lower"), chi.map(|p| log2(p.upper as f64)));
    l.check("log theta(complement) <= R* upper", tc.map(log2), f.applicable_value("R*-upper"));
    l.check("c* lower <= log theta(H)", f.applicable_value("c*-lower"), th.map(log2));

    let violated: Vec<String> = l.0.iter().filter(|x| !x.holds).map(|x| x.name.clone()).collect();
    AuditResult { pass: violated.is_empty(), links: l.0, violated }
}

fn expect_hash<S: Serialize>(r: &BoundsReport, key: &str, value: &S) -> Result<()> {
    let want = r.provenance.get(key).ok_or_else(|| Error::Verification(format!("no provenance entry for {key}")))?;
    let got = canonical_hash(value)?;
    if &got != want {
        return Err(Error::Verification(format!("hash of {key} does not match")));
    }
    Ok(())
}

/// Recomputes the hash of every serialized artifact and re-checks it against
/// `H_k`: witness sets and colourings, `θ` certificates through their Walsh
/// spectra, and the witness certificate through its dense matrix. The
/// witness itself is not stored; it is rebuilt deterministically and its
/// hash compared. Returns the names of the checked artifacts.
pub fn verify_artifacts(r: &BoundsReport, tol: f64) -> Result<Vec<String>> {
    let hk = make_hk(r.k)?;
    let mut done = vec![];
    if let Some(g) = &r.graph {
        if g.hash != hk.hash() || r.provenance.get("graph") != Some(&g.hash) {
            return Err(Error::Verification("graph hash does not match H_k".into()));
        }
        done.push("graph".to_string());
    }
    let graph = if hk.order() <= super::MAX_EXPANDED_VERTICES { Some(hk.to_graph()?) } else { None };
    for p in &r.params {
        let key = format!("param/{}", super::param_key(p.param));
        expect_hash(r, &key, p)?;
        let g = graph.as_ref().ok_or_else(|| Error::TooLarge("graph too large to re-check".into()))?;
        if !p.verify(g) {
            return Err(Error::Verification(format!("{key} witness fails")));
        }
        done.push(key);
    }
    for e in &r.theta {
        let key = format!("theta/{}/{}", e.role.key(), super::variant_key(e.variant));
        expect_hash(r, &key, &e.certificate)?;
        let c = match e.role {
            Role::Graph => hk.clone(),
            Role::Complement => hk.complement(),
        };
        e.certificate.verify_cayley(&c, tol)?;
        if e.value != e.certificate.lambda || e.variant != e.certificate.variant {
            return Err(Error::Verification(format!("{key} value differs from its certificate")));
        }
        done.push(key);
    }
    if let Some(w) = &r.witness {
        if let Some(h) = &w.witness_hash {
            let g = graph.as_ref().ok_or_else(|| Error::TooLarge("graph too large to re-check".into()))?;
            let rebuilt = chrom_witness_from_flat_rep(&orth_rep_hk(r.k)?, g)?;
            if &canonical_hash(&ChromJson::from(rebuilt))? != h || r.provenance.get("witness") != Some(h) {
                return Err(Error::Verification("witness hash does not match the rebuilt witness".into()));
            }
            done.push("witness".into());
        }
        if let Some(c) = &w.certificate {
            expect_hash(r, "witness/theta-plus", c)?;
            let g = graph.as_ref().ok_or_else(|| Error::TooLarge("graph too large to re-check".into()))?;
            c.verify(&g.complement(), 1e-6)?;
            done.push("witness/theta-plus".into());
        }
    }
    if let Some(e) = &r.explicit {
        let g = graph.as_ref().ok_or_else(|| Error::TooLarge("graph too large to re-check".into()))?;
        expect_hash(r, "explicit/independent-set", &e.independent_set)?;
        if !g.is_independent(&e.independent_set) {
            return Err(Error::Verification("explicit set is not independent".into()));
        }
        done.push("explicit/independent-set".into());
        if let Some(c) = &e.clique {
            expect_hash(r, "explicit/clique", c)?;
            if !g.is_clique(c) {
                return Err(Error::Verification("explicit clique is not a clique".into()));
            }
            done.push("explicit/clique".into());
        }
    }
    if let Some(c) = &r.rank {
        expect_hash(r, "rank", c)?;
        if c.rank != c.rank_check || c.alpha_upper != c.rank || c.rank as u128 > c.dimension {
            return Err(Error::Verification("rank certificate is inconsistent".into()));
        }
        if c.k != r.k || c.probes.iter().any(|p| !p.invertible || p.size > c.rank) {
            return Err(Error::Verification("rank probes are inconsistent".into()));
        }
        if let Some(Witness::VertexSet(s)) = r.param(Param::Alpha).map(|a| &a.witness) {
            if s.len() > c.alpha_upper {
                return Err(Error::Verification("independent set exceeds the rank bound".into()));
            }
        }
        done.push("rank".into());
    }
    if let Some(s) = &r.simulations.source {
        expect_hash(r, "simulation/source", s)?;
        if s.pass != s.failures.is_empty() {
            return Err(Error::Verification("source simulation verdict is inconsistent".into()));
        }
        done.push("simulation/source".into());
    }
    if let Some(s) = &r.simulations.channel {
        expect_hash(r, "simulation/channel", s)?;
        if s.pass != s.failures.is_empty() {
            return Err(Error::Verification("channel simulation verdict is inconsistent".into()));
        }
        done.push("simulation/channel".into());
    }
    expect_hash(r, "formulas", &r.formulas)?;
    done.push("formulas".into());
    Ok(done)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{reproduce, ReproduceConfig};

    #[test]
    fn empty_report_passes_vacuously() {
        let r = BoundsReport::empty(7);
        let a = consistency_audit(&r);
        assert!(a.pass);
        assert!(a.links.is_empty());
    }

    #[test]
    fn lowered_theta_is_caught() {
        let mut r = reproduce(3, &ReproduceConfig { simulations: false, ..Default::default() }).unwrap();
        assert!(consistency_audit(&r).pass);
        assert!(verify_artifacts(&r, 1e-9).is_ok());
        let e = r.theta.iter_mut().find(|e| e.role == Role::Complement && e.variant == ThetaVariant::Theta).unwrap();
        e.value -= 1.0;
        let a = consistency_audit(&r);
        assert!(!a.pass);
        assert!(a.violated.iter().any(|v| v == "omega <= theta(complement)"), "{:?}", a.violated);
        assert!(verify_artifacts(&r, 1e-9).is_err());
    }
}
