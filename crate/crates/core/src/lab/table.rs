use std::fmt::Write as _;

use super::{consistency_audit, BoundsReport, Role};
use crate::relax::ThetaVariant;

fn opt(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.6}"))
}

/// Plain-text rendering of a report.
pub fn render_table(r: &BoundsReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "H_{} ({})", r.k, r.schema);
    if let Some(g) = &r.graph {
        let _ = writeln!(s, "  vertices {}  degree {}  edges {}  hash {}", g.vertices, g.degree, g.edges, &g.hash[..16]);
    }
    let _ = writeln!(s, "\nparameters");
    for p in &r.params {
        let _ = writeln!(s, "  {:<8} [{}, {}]  {:?}", format!("{:?}", p.param).to_lowercase(), p.lower, p.upper, p.status);
    }
    for (name, b) in [("alpha", r.alpha_bracket()), ("omega", r.omega_bracket()), ("chi", r.chi_bracket())] {
        if let Some(b) = b {
            let _ = writeln!(s, "  {name} combined [{}, {}]", b.lower, b.upper);
        }
    }
    let _ = writeln!(s, "\ntheta");
    for role in [Role::Graph, Role::Complement] {
        for v in [ThetaVariant::Theta, ThetaVariant::ThetaPlus] {
            if let Some(e) = r.theta_entry(role, v) {
                let name = format!("{:?}/{:?}", role, v).to_lowercase();
                let _ = writeln!(s, "  {:<22} {:<14} exact {}", name, format!("{:.6}", e.value), e.exact.as_deref().unwrap_or("-"));
            }
        }
    }
    if let Some(w) = &r.witness {
        let cert = w.certificate.as_ref().map(|c| c.lambda);
        let pass = w.report.as_ref().map(|x| x.pass);
        let _ = writeln!(s, "\nwitness  d = t = {}  verified {:?}  theta+ certificate {}", w.t, pass, opt(cert));
    }
    if let Some(e) = &r.explicit {
        let _ = writeln!(
            s,
            "explicit independent set {}  Hadamard clique {}",
            e.independent_set.len(),
            e.clique.as_ref().map_or("-".into(), |c| format!("{} ({})", c.len(), e.clique_construction.as_deref().unwrap_or("?")))
        );
    }
    if let Some(c) = &r.rank {
        let _ = writeln!(s, "rank over Z_{}: {}  (D = {})", c.p, c.rank, c.dimension);
    }
    if let Some(x) = &r.simulations.source {
        let _ = writeln!(s, "source simulation: {} cases, worst residual {:.2e}, pass {}", x.cases_run, x.worst_residual, x.pass);
    }
    if let Some(x) = &r.simulations.channel {
        let _ = writeln!(s, "channel simulation: {} messages, rate {}, pass {}", x.messages, x.rate, x.pass);
    }
    let _ = writeln!(s, "\nformulas");
    for l in &r.formulas.lines {
        let _ = writeln!(
            s,
            "  {:<11} {:<9} {}{}",
            l.name,
            opt(l.value),
            if l.applicable { "" } else { "not applicable: " },
            if l.applicable { String::new() } else { l.condition.clone() }
        );
    }
    let _ = writeln!(s, "\nstages");
    for st in &r.stages {
        let _ = writeln!(s, "  {:<20} {}{}", st.name, st.status, st.detail.as_ref().map_or(String::new(), |d| format!("  ({d})")));
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    let a = consistency_audit(r);
    let _ = writeln!(s, "\naudit: {} ({} links)", if a.pass { "pass" } else { "FAIL" }, a.links.len());
    for v in &a.violated {
        let _ = writeln!(s, "  violated: {v}");
    }
    s
}
