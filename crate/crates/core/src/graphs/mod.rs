//! Graphs, Cayley graphs over `Z_2^m`, strong products and homomorphisms.

mod bitset;
mod cayley;
mod graph;
mod homomorphism;

pub use bitset::{Bitset, Ones};
pub use cayley::{even_weight, hk_graph, hk_label, hk_signs, hk_vertex, make_hk, CayleyZ2, MAX_EXPAND_EXPONENT, MAX_EXPONENT};
pub use graph::{complete_graph, edgeless_graph, Graph, MAX_PRODUCT_EDGES};
pub use homomorphism::{eta_m, find_homomorphism, EtaSearch, HomSearch, Homomorphism, DEFAULT_BUDGET};

/// Brute-force isomorphism test for graphs with at most 8 vertices.
pub fn is_isomorphic_small(a: &Graph, b: &Graph) -> Option<bool> {
    if a.n() != b.n() || a.n() > 8 {
        return if a.n() != b.n() { Some(false) } else { None };
    }
    if a.edge_count() != b.edge_count() {
        return Some(false);
    }
    let mut perm: Vec<usize> = (0..a.n()).collect();
    loop {
        if a.edges().all(|(u, v)| b.has_edge(perm[u], perm[v])) {
            return Some(true);
        }
        if !next_permutation(&mut perm) {
            return Some(false);
        }
    }
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
