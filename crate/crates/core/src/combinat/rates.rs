use serde::{Deserialize, Serialize};

use super::{chromatic_number, independence_number, ParamResult, Status};
use crate::error::{invalid, Error, Result};
use crate::graphs::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateKind {
    /// Levels `(m, χ(G^m))`.
    Chi,
    /// Levels `(n, α(H^n))`.
    Alpha,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RateRecord {
    pub level: usize,
    pub lower: usize,
    pub upper: usize,
    pub status: Status,
    /// `log2(value) / level` with the certified side of the bracket:
    /// `upper` for `χ`, `lower` for `α`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RateTable {
    pub kind: RateKind,
    pub graph_hash: String,
    pub records: Vec<RateRecord>,
}

impl RateTable {
    /// For `χ` tables an upper bound on the rate (least ratio); for `α`
    /// tables a lower bound on the capacity (largest ratio).
    pub fn bound(&self) -> Option<f64> {
        let it = self.records.iter().map(|r| r.ratio);
        match self.kind {
            RateKind::Chi => it.reduce(f64::min),
            RateKind::Alpha => it.reduce(f64::max),
        }
    }

    pub fn level(&self, level: usize) -> Option<&RateRecord> {
        self.records.iter().find(|r| r.level == level)
    }
}

fn record(kind: RateKind, level: usize, p: &ParamResult) -> RateRecord {
    let v = match kind {
        RateKind::Chi => p.upper,
        RateKind::Alpha => p.lower,
    };
    RateRecord { level, lower: p.lower, upper: p.upper, status: p.status, ratio: (v as f64).log2() / level as f64 }
}

fn table(
    kind: RateKind,
    g: &Graph,
    max_level: usize,
    budget: u64,
    param: fn(&Graph, u64) -> ParamResult,
) -> Result<RateTable> {
    if max_level == 0 {
        return Err(invalid("rate table needs at least one level"));
    }
    let mut records = Vec::with_capacity(max_level);
    let mut power = g.clone();
    for level in 1..=max_level {
        if level > 1 {
            power = power.strong_product(g)?;
        }
        records.push(record(kind, level, &param(&power, budget)));
    }
    Ok(RateTable { kind, graph_hash: g.hash(), records })
}

pub fn rate_table_chi(g: &Graph, m_max: usize, budget: u64) -> Result<RateTable> {
    table(RateKind::Chi, g, m_max, budget, chromatic_number)
}

pub fn rate_table_alpha(h: &Graph, n_max: usize, budget: u64) -> Result<RateTable> {
    table(RateKind::Alpha, h, n_max, budget, independence_number)
}

/// Least `n` with `log2 α(H^n) >= m`, i.e. `α(H^n) >= 2^m`.
pub fn eta_m_channel(alpha_table: &RateTable, m: usize) -> Result<usize> {
    if alpha_table.kind != RateKind::Alpha {
        return Err(invalid("eta_m_channel needs an independence-number table"));
    }
    let need = 1u128.checked_shl(m as u32).ok_or_else(|| invalid("m too large"))?;
    let mut recs: Vec<&RateRecord> = alpha_table.records.iter().collect();
    recs.sort_by_key(|r| r.level);
    for (i, r) in recs.iter().enumerate() {
        if r.level != i + 1 {
            return Err(Error::TableInsufficient(format!("level {} missing", i + 1)));
        }
        if r.lower as u128 >= need {
            return Ok(r.level);
        }
        if r.status != Status::Exact && r.upper as u128 >= need {
            return Err(Error::TableInsufficient(format!("level {} is not exact", r.level)));
        }
    }
    Err(Error::TableInsufficient(format!("no recorded level reaches 2^{m}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EpsilonResult {
    pub n: usize,
    /// Certified upper bound on `χ(G^m)`.
    pub chi: usize,
    /// Certified lower bound on `α(H^n)`.
    pub alpha: usize,
    /// `true` when all parameters involved were exact, so `n` is least.
    pub exact: bool,
}

/// Least `n <= n_max` with `χ(G^m) <= α(H^n)`.
pub fn epsilon_m(g: &Graph, h: &Graph, m: usize, n_max: usize, budget: u64) -> Result<EpsilonResult> {
    if g.edge_count() == 0 {
        return Err(Error::Precondition("G must have at least one edge".into()));
    }
    if h.non_edges().next().is_none() {
        return Err(Error::Precondition("the complement of H must have at least one edge".into()));
    }
    let chi = chromatic_number(&g.strong_power(m)?, budget);
    let mut exact = chi.is_exact();
    let mut power = h.clone();
    for n in 1..=n_max {
        if n > 1 {
            power = power.strong_product(h)?;
        }
        let a = independence_number(&power, budget);
        if chi.upper <= a.lower {
            return Ok(EpsilonResult { n, chi: chi.upper, alpha: a.lower, exact });
        }
        exact &= a.is_exact();
    }
    Err(Error::TableInsufficient(format!("no n <= {n_max} satisfies the inequality")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete_graph, edgeless_graph, make_hk};

    #[test]
    fn tables() {
        let k3 = complete_graph(3).unwrap();
        let t = rate_table_chi(&k3, 1, 1000).unwrap();
        assert!((t.bound().unwrap() - 3f64.log2()).abs() < 1e-12);
        let c5 = Graph::cycle(5).unwrap();
        let a = rate_table_alpha(&c5, 2, 1_000_000).unwrap();
        assert!((a.bound().unwrap() - 5f64.log2() / 2.0).abs() < 1e-12);
        let h5 = make_hk(5).unwrap().to_graph().unwrap();
        assert_eq!(rate_table_alpha(&h5, 1, 1000).unwrap().bound(), Some(4.0));
    }

    #[test]
    fn eta_channel_values() {
        let c5 = Graph::cycle(5).unwrap();
        let a = rate_table_alpha(&c5, 2, 1_000_000).unwrap();
        assert_eq!(eta_m_channel(&a, 1).unwrap(), 1);
        assert_eq!(eta_m_channel(&a, 2).unwrap(), 2);
        assert!(matches!(eta_m_channel(&a, 3), Err(Error::TableInsufficient(_))));
        let e2 = rate_table_alpha(&edgeless_graph(2).unwrap(), 3, 1000).unwrap();
        assert_eq!(eta_m_channel(&e2, 3).unwrap(), 3);
    }

    #[test]
    fn epsilon_values() {
        let c5 = Graph::cycle(5).unwrap();
        let k2 = complete_graph(2).unwrap();
        assert_eq!(epsilon_m(&c5, &c5, 1, 3, 1_000_000).unwrap().n, 2);
        assert_eq!(epsilon_m(&k2, &c5, 1, 3, 1_000_000).unwrap().n, 1);
        assert!(epsilon_m(&complete_graph(1).unwrap(), &c5, 1, 3, 1000).is_err());
    }
}
