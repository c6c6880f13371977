use crate::graphs::{Bitset, Graph};

/// Outcome of a maximum-clique search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueSearch {
    /// Best clique found, ascending vertex indices.
    pub clique: Vec<usize>,
    /// `true` when the search completed.
    pub exact: bool,
    /// Upper bound on the clique number (equals `clique.len()` when exact).
    pub upper: usize,
    pub nodes: u64,
}

/// Removal order of the smallest-last procedure: repeatedly remove a vertex
/// of minimum remaining degree, ties broken by the lower index.
pub fn degeneracy_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = Bitset::full(n);
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = alive.iter().min_by_key(|&v| (deg[v], v)).expect("vertex left");
        alive.remove(v);
        for w in g.neighbors(v).iter() {
            if alive.contains(w) {
                deg[w] -= 1;
            }
        }
        order.push(v);
    }
    order
}

/// Exact maximum clique by branch and bound.
///
/// Vertices are relabelled by [`degeneracy_order`] and branched on in
/// ascending position, each branch restricted to later neighbours. The bound
/// at a branch is a greedy colouring of the remaining candidates computed
/// from the back, so the number of colours on any suffix bounds the clique
/// in that suffix. Only strict improvements are accepted, which makes the
/// returned optimum the lexicographically least one in the relabelled order.
pub fn max_clique(g: &Graph, budget: u64) -> CliqueSearch {
    let n = g.n();
    if n == 0 {
        return CliqueSearch { clique: Vec::new(), exact: true, upper: 0, nodes: 0 };
    }
    let order = degeneracy_order(g);
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let adj: Vec<Bitset> =
        order.iter().map(|&v| Bitset::from_indices(n, g.neighbors(v).iter().map(|w| pos[w]))).collect();
    let mut s = CliqueSearcher { adj, best: vec![0], current: Vec::new(), nodes: 0, budget, aborted: false };
    let all = Bitset::full(n);
    let root_bound = s.suffix_bounds(&all).first().copied().unwrap_or(0);
    s.expand(all);
    let mut clique: Vec<usize> = s.best.iter().map(|&p| order[p]).collect();
    clique.sort_unstable();
    debug_assert!(g.is_clique(&clique));
    let exact = !s.aborted;
    CliqueSearch { upper: if exact { clique.len() } else { root_bound.max(clique.len()) }, clique, exact, nodes: s.nodes }
}

struct CliqueSearcher {
    adj: Vec<Bitset>,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl CliqueSearcher {
    /// For the candidates in ascending order, the number of colours used by
    /// a back-to-front greedy colouring on each suffix.
    fn suffix_bounds(&self, cand: &Bitset) -> Vec<usize> {
        let verts: Vec<usize> = cand.iter().collect();
        let mut classes: Vec<Bitset> = Vec::new();
        let mut bound = vec![0; verts.len()];
        let mut max_color = 0;
        for (i, &v) in verts.iter().enumerate().rev() {
            let c = classes
                .iter()
                .position(|cls| cls.intersection_count(&self.adj[v]) == 0)
                .unwrap_or(classes.len());
            if c == classes.len() {
                classes.push(Bitset::new(cand.len()));
            }
            classes[c].insert(v);
            max_color = max_color.max(c + 1);
            bound[i] = max_color;
        }
        bound
    }

    fn expand(&mut self, cand: Bitset) {
        let verts: Vec<usize> = cand.iter().collect();
        let bounds = self.suffix_bounds(&cand);
        let mut rest = cand;
        for (i, &v) in verts.iter().enumerate() {
            if self.current.len() + bounds[i] <= self.best.len() {
                return;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.aborted = true;
                return;
            }
            rest.remove(v);
            self.current.push(v);
            let next = rest.intersection(&self.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            if self.aborted {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::complete_graph;

    fn brute_clique_number(g: &Graph) -> usize {
        let n = g.n();
        (0u32..1 << n)
            .filter(|&s| {
                let set: Vec<usize> = (0..n).filter(|&i| s >> i & 1 == 1).collect();
                g.is_clique(&set)
            })
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn small_graphs() {
        assert_eq!(max_clique(&complete_graph(5).unwrap(), 1000).clique.len(), 5);
        let c5 = Graph::cycle(5).unwrap();
        let r = max_clique(&c5, 1000);
        assert!(r.exact);
        assert_eq!(r.clique.len(), 2);
        assert_eq!(max_clique(&c5.complement(), 1000).clique.len(), 2);
    }

    #[test]
    fn matches_brute_force() {
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..40 {
            let g = Graph::from_fn(11, |_, _| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state % 100 < 55
            });
            let r = max_clique(&g, u64::MAX);
            assert!(g.is_clique(&r.clique));
            assert_eq!(r.clique.len(), brute_clique_number(&g));
        }
    }

    #[test]
    fn budget_flags_inexact() {
        let g = Graph::from_fn(40, |u, v| (u * 7 + v * 3) % 5 != 0);
        let r = max_clique(&g, 2);
        assert!(!r.exact);
        assert!(r.upper >= r.clique.len());
    }
}
