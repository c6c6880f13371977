//! Exact `α`, `ω`, `χ`, explicit independent sets and cliques of `H_k`, and
//! finite-level rate quantities.

mod clique;
mod coloring;
mod explicit;
mod rates;
mod transitivity;

use serde::{Deserialize, Serialize};

use crate::graphs::Graph;

pub use clique::{degeneracy_order, max_clique, CliqueSearch};
pub use coloring::{chromatic_search, dsatur_greedy, ColoringSearch};
pub use explicit::{explicit_independent_set_hk, hadamard_clique_hk};
pub use rates::{
    epsilon_m, eta_m_channel, rate_table_alpha, rate_table_chi, EpsilonResult, RateKind, RateRecord, RateTable,
};
pub use transitivity::{is_vertex_transitive, no_homomorphism_check, HomVerdict, Transitivity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Param {
    Alpha,
    Omega,
    Chi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Exact,
    /// `value` is witnessed but optimality was not established.
    LowerBoundOnly,
    /// Chromatic search stopped with `lower < upper`.
    Bracket,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    VertexSet(Vec<usize>),
    Coloring(Vec<usize>),
}

/// Parameter value with its witness and the hash of the graph it refers to.
///
/// For `α` and `ω`, `value` is the size of the witness set; for `χ` it is the
/// number of colours in the witness colouring. `lower..=upper` always brackets
/// the true parameter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ParamResult {
    pub param: Param,
    pub value: usize,
    pub lower: usize,
    pub upper: usize,
    pub status: Status,
    pub witness: Witness,
    pub graph_hash: String,
}

impl ParamResult {
    pub fn is_exact(&self) -> bool {
        self.status == Status::Exact
    }

    /// Re-checks the witness against `g`.
    pub fn verify(&self, g: &Graph) -> bool {
        if self.graph_hash != g.hash() || self.lower > self.upper {
            return false;
        }
        match (&self.param, &self.witness) {
            (Param::Alpha, Witness::VertexSet(s)) => g.is_independent(s) && s.len() == self.value,
            (Param::Omega, Witness::VertexSet(s)) => g.is_clique(s) && s.len() == self.value,
            (Param::Chi, Witness::Coloring(c)) => {
                g.is_proper_coloring(c) && c.iter().max().map_or(0, |&m| m + 1) <= self.value
            }
            _ => false,
        }
    }
}

fn set_result(param: Param, g: &Graph, r: CliqueSearch) -> ParamResult {
    ParamResult {
        param,
        value: r.clique.len(),
        lower: r.clique.len(),
        upper: r.upper,
        status: if r.exact { Status::Exact } else { Status::LowerBoundOnly },
        witness: Witness::VertexSet(r.clique),
        graph_hash: g.hash(),
    }
}

pub fn clique_number(g: &Graph, budget: u64) -> ParamResult {
    set_result(Param::Omega, g, max_clique(g, budget))
}

/// `α(G)` as the clique number of the complement.
pub fn independence_number(g: &Graph, budget: u64) -> ParamResult {
    set_result(Param::Alpha, g, max_clique(&g.complement(), budget))
}

pub fn chromatic_number(g: &Graph, budget: u64) -> ParamResult {
    let r = chromatic_search(g, budget);
    ParamResult {
        param: Param::Chi,
        value: r.upper,
        lower: r.lower,
        upper: r.upper,
        status: if r.exact() { Status::Exact } else { Status::Bracket },
        witness: Witness::Coloring(r.coloring),
        graph_hash: g.hash(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete_graph, edgeless_graph, hk_graph};

    #[test]
    fn named_values() {
        for t in 1..6 {
            let k = complete_graph(t).unwrap();
            assert_eq!(independence_number(&k, 1000).value, 1);
            assert_eq!(clique_number(&edgeless_graph(t).unwrap(), 1000).value, 1);
        }
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(independence_number(&c5, 1000).value, 2);
        let c52 = c5.strong_power(2).unwrap();
        let a = independence_number(&c52, 100_000);
        assert!(a.is_exact() && a.verify(&c52));
        assert_eq!(a.value, 5);
        let h3 = hk_graph(3).unwrap();
        assert_eq!(clique_number(&h3, 1000).value, 4);
        assert_eq!(chromatic_number(&h3, 1000).value, 4);
    }

    #[test]
    fn hk7_parameters() {
        let h7 = hk_graph(7).unwrap();
        let w = clique_number(&h7, 10_000_000);
        assert!(w.is_exact() && w.verify(&h7));
        assert_eq!(w.value, 8);
        let a = independence_number(&h7, 10_000_000);
        assert!(a.verify(&h7));
        assert!(a.value >= 4);
    }

    #[test]
    fn json_record() {
        let c5 = Graph::cycle(5).unwrap();
        let r = chromatic_number(&c5, 1000);
        let js = serde_json::to_value(&r).unwrap();
        assert_eq!(js["param"], "chi");
        assert_eq!(js["status"], "exact");
        assert_eq!(js["graph-hash"], c5.hash());
    }
}
