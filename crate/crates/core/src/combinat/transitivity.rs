use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{CayleyZ2, Graph};

/// Largest graph accepted by the exhaustive automorphism search.
pub const MAX_AUTOMORPHISM_VERTICES: usize = 32;

/// How vertex-transitivity of the target graph is established.
pub enum Transitivity<'a> {
    /// XOR translations of a Cayley graph over `Z_2^m`.
    Cayley(&'a CayleyZ2),
    /// Exhaustive automorphism search on a small graph.
    Search(&'a Graph),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HomVerdict {
    NoHomomorphism,
    Inconclusive,
}

/// Checks for each vertex `v` an automorphism sending vertex 0 to `v`.
/// Returns `None` when the graph is too large or the search budget runs out.
pub fn is_vertex_transitive(g: &Graph, budget: u64) -> Option<bool> {
    let n = g.n();
    if n > MAX_AUTOMORPHISM_VERTICES {
        return None;
    }
    let mut nodes = 0u64;
    for v in 1..n {
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        map[0] = v;
        used[v] = true;
        match extend(g, 1, &mut map, &mut used, &mut nodes, budget) {
            Some(true) => {}
            Some(false) => return Some(false),
            None => return None,
        }
    }
    Some(true)
}

fn extend(g: &Graph, i: usize, map: &mut [usize], used: &mut [bool], nodes: &mut u64, budget: u64) -> Option<bool> {
    let n = g.n();
    if i == n {
        return Some(true);
    }
    for x in 0..n {
        if used[x] || g.degree(x) != g.degree(i) {
            continue;
        }
        if (0..i).any(|j| g.has_edge(i, j) != g.has_edge(x, map[j])) {
            continue;
        }
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        map[i] = x;
        used[x] = true;
        if extend(g, i + 1, map, used, nodes, budget)? {
            return Some(true);
        }
        used[x] = false;
        map[i] = usize::MAX;
    }
    Some(false)
}

/// Ratio obstruction for a homomorphism into a vertex-transitive graph:
/// none exists when `|V(G)|/α(G) > |V(H)|/α(H)`.
pub fn no_homomorphism_check(g: &Graph, h: Transitivity<'_>, alpha_g: usize, alpha_h: usize) -> Result<HomVerdict> {
    let n_h = match h {
        Transitivity::Cayley(c) => c.order(),
        Transitivity::Search(hg) => match is_vertex_transitive(hg, 10_000_000) {
            Some(true) => hg.n(),
            Some(false) => return Err(Error::Precondition("target graph is not vertex-transitive".into())),
            None => return Err(Error::Precondition("vertex-transitivity could not be established".into())),
        },
    };
    if alpha_g == 0 || alpha_h == 0 {
        return Err(Error::InvalidParameter("independence numbers must be positive".into()));
    }
    let lhs = g.n() as u128 * alpha_h as u128;
    let rhs = n_h as u128 * alpha_g as u128;
    Ok(if lhs > rhs { HomVerdict::NoHomomorphism } else { HomVerdict::Inconclusive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete_graph, find_homomorphism, HomSearch};

    #[test]
    fn transitivity() {
        assert_eq!(is_vertex_transitive(&Graph::cycle(5).unwrap(), 1 << 20), Some(true));
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(is_vertex_transitive(&path, 1 << 20), Some(false));
    }

    #[test]
    fn ratio_obstruction() {
        let k3 = complete_graph(3).unwrap();
        let k2 = complete_graph(2).unwrap();
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(no_homomorphism_check(&k3, Transitivity::Search(&c5), 1, 2).unwrap(), HomVerdict::NoHomomorphism);
        assert_eq!(find_homomorphism(&k3, &c5, 1 << 20), HomSearch::None);
        assert_eq!(no_homomorphism_check(&k2, Transitivity::Search(&c5), 1, 2).unwrap(), HomVerdict::Inconclusive);
        assert!(find_homomorphism(&k2, &c5, 1 << 20).found().is_some());
        assert_eq!(no_homomorphism_check(&c5, Transitivity::Search(&c5), 2, 2).unwrap(), HomVerdict::Inconclusive);
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert!(no_homomorphism_check(&k3, Transitivity::Search(&path), 1, 2).is_err());
    }
}
