use serde::{Deserialize, Serialize};

use super::bitset::Bitset;
use super::graph::Graph;
use crate::error::{invalid, Result};

/// Default search budget, in search-tree nodes.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Vertex map `V(G) -> V(H)` sending edges to edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

impl Homomorphism {
    pub fn verify(&self, g: &Graph, h: &Graph) -> bool {
        self.map.len() == g.n()
            && self.map.iter().all(|&x| x < h.n())
            && g.edges().all(|(u, v)| h.has_edge(self.map[u], self.map[v]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomSearch {
    Found(Homomorphism),
    /// Exhaustively refuted.
    None,
    BudgetExhausted { nodes: u64 },
}

impl HomSearch {
    pub fn found(&self) -> Option<&Homomorphism> {
        match self {
            HomSearch::Found(h) => Some(h),
            _ => None,
        }
    }
}

/// Backtracking search for a homomorphism `G -> H`.
///
/// Vertices of `G` are assigned in order of decreasing degree, ties by index,
/// each trying images in increasing index order with forward checking on the
/// candidate sets of unassigned neighbours. The first map found is therefore
/// the lexicographically least one when read in that vertex order.
pub fn find_homomorphism(g: &Graph, h: &Graph, budget: u64) -> HomSearch {
    if g.n() == 0 {
        return HomSearch::Found(Homomorphism { map: Vec::new() });
    }
    if h.n() == 0 {
        return HomSearch::None;
    }
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut search = HomSearcher {
        g,
        h,
        order,
        map: vec![usize::MAX; g.n()],
        nodes: 0,
        budget,
    };
    let domains = vec![Bitset::full(h.n()); g.n()];
    match search.descend(0, domains) {
        Some(true) => {
            let hom = Homomorphism { map: search.map };
            assert!(hom.verify(g, h), "homomorphism search produced an invalid map");
            HomSearch::Found(hom)
        }
        Some(false) => HomSearch::None,
        None => HomSearch::BudgetExhausted { nodes: search.nodes },
    }
}

struct HomSearcher<'a> {
    g: &'a Graph,
    h: &'a Graph,
    order: Vec<usize>,
    map: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl HomSearcher<'_> {
    /// `Some(found)` on completion, `None` when the budget runs out.
    fn descend(&mut self, depth: usize, domains: Vec<Bitset>) -> Option<bool> {
        if depth == self.order.len() {
            return Some(true);
        }
        let v = self.order[depth];
        for x in domains[v].iter() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let mut next = domains.clone();
            let mut wiped = false;
            for w in self.g.neighbors(v).iter() {
                if self.map[w] == usize::MAX {
                    next[w].intersect_with(self.h.neighbors(x));
                    if next[w].is_empty() {
                        wiped = true;
                        break;
                    }
                }
            }
            if wiped {
                continue;
            }
            self.map[v] = x;
            if self.descend(depth + 1, next)? {
                return Some(true);
            }
            self.map[v] = usize::MAX;
        }
        Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EtaSearch {
    /// Least `n` with a homomorphism, and the map found at that level.
    Found { n: usize, map: Homomorphism },
    /// Every `n <= n_max` was refuted.
    NotFound { n_max: usize },
    /// Levels below `n` were refuted; level `n` ran out of budget.
    BudgetExhausted { n: usize },
}

/// Least `n <= n_max` with `G^m -> complement(H^n)` under strong powers.
pub fn eta_m(g: &Graph, h: &Graph, m: usize, n_max: usize, budget: u64) -> Result<EtaSearch> {
    if g.edge_count() == 0 {
        return Err(invalid("G must have at least one edge"));
    }
    if h.non_edges().next().is_none() {
        return Err(invalid("the complement of H must have at least one edge"));
    }
    let gm = g.strong_power(m)?;
    for n in 1..=n_max {
        let target = h.strong_power(n)?.complement();
        match find_homomorphism(&gm, &target, budget) {
            HomSearch::Found(map) => return Ok(EtaSearch::Found { n, map }),
            HomSearch::None => {}
            HomSearch::BudgetExhausted { .. } => return Ok(EtaSearch::BudgetExhausted { n }),
        }
    }
    Ok(EtaSearch::NotFound { n_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete_graph, edgeless_graph};

    #[test]
    fn small_searches() {
        let k2 = complete_graph(2).unwrap();
        let k3 = complete_graph(3).unwrap();
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(find_homomorphism(&k2, &k2, DEFAULT_BUDGET).found().unwrap().map, vec![0, 1]);
        assert_eq!(find_homomorphism(&k3, &k2, DEFAULT_BUDGET), HomSearch::None);
        let col = find_homomorphism(&c5, &k3, DEFAULT_BUDGET);
        let map = &col.found().unwrap().map;
        assert!(c5.is_proper_coloring(map));
    }

    #[test]
    fn budget_reported() {
        let k6 = complete_graph(6).unwrap();
        let k5 = complete_graph(5).unwrap();
        assert!(matches!(find_homomorphism(&k6, &k5, 3), HomSearch::BudgetExhausted { .. }));
    }

    #[test]
    fn eta_examples() {
        let k2 = complete_graph(2).unwrap();
        let k3 = complete_graph(3).unwrap();
        let c5 = Graph::cycle(5).unwrap();
        let e2 = edgeless_graph(2).unwrap();
        assert!(matches!(eta_m(&k2, &c5, 1, 3, DEFAULT_BUDGET).unwrap(), EtaSearch::Found { n: 1, .. }));
        assert!(matches!(eta_m(&k2, &c5, 2, 3, DEFAULT_BUDGET).unwrap(), EtaSearch::Found { n: 2, .. }));
        assert!(matches!(eta_m(&k3, &e2, 1, 3, DEFAULT_BUDGET).unwrap(), EtaSearch::Found { n: 2, .. }));
        assert!(eta_m(&complete_graph(1).unwrap(), &c5, 1, 2, DEFAULT_BUDGET).is_err());
        assert!(eta_m(&k2, &k3, 1, 2, DEFAULT_BUDGET).is_err());
    }
}
