use std::fmt::Write as _;

use super::bitset::Bitset;
use crate::error::{invalid, Error, Result};
use crate::hash::sha256_hex;

/// Edge cap for explicitly materialized strong products.
pub const MAX_PRODUCT_EDGES: u64 = 2_000_000;

/// Finite simple undirected graph with bitset adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Bitset>,
    labels: Option<Vec<Vec<u8>>>,
}

impl Graph {
    /// Edgeless graph on `n` vertices (`n = 0` allowed here; see [`edgeless_graph`]).
    pub fn empty(n: usize) -> Self {
        Graph { n, adj: vec![Bitset::new(n); n], labels: None }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Builds a graph from a symmetric adjacency predicate.
    pub fn from_fn(n: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if adjacent(u, v) {
                    g.adj[u].insert(v);
                    g.adj[v].insert(u);
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(invalid(format!("edge ({u},{v}) out of range for {} vertices", self.n)));
        }
        if u == v {
            return Err(invalid(format!("self-loop at {u}")));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn with_labels(mut self, labels: Vec<Vec<u8>>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(invalid("label count differs from vertex count"));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(invalid("labels are not distinct"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[Vec<u8>]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &Bitset {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Bitset::count).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.adj[u].iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Non-edges `(u, v)` with `u < v`.
    pub fn non_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| (u + 1..self.n).filter(move |&v| !self.adj[u].contains(v)).map(move |v| (u, v)))
    }

    pub fn complement(&self) -> Graph {
        let adj = (0..self.n)
            .map(|v| {
                let mut b = self.adj[v].complement();
                b.remove(v);
                b
            })
            .collect();
        Graph { n: self.n, adj, labels: self.labels.clone() }
    }

    /// Strong product with row-major vertex order `(u, w) -> u * |H| + w`.
    pub fn strong_product(&self, other: &Graph) -> Result<Graph> {
        let (a, b) = (self.n as u64, other.n as u64);
        let (ea, eb) = (self.edge_count() as u64, other.edge_count() as u64);
        // |E| = a*eb + b*ea + 2*ea*eb
        let edges = a * eb + b * ea + 2 * ea * eb;
        if edges > MAX_PRODUCT_EDGES {
            return Err(Error::TooLarge(format!("strong product would have {edges} edges")));
        }
        let n = self.n * other.n;
        let mut g = Graph::empty(n);
        for u1 in 0..self.n {
            let mut close1 = self.adj[u1].clone();
            close1.insert(u1);
            for u2 in 0..other.n {
                let mut close2 = other.adj[u2].clone();
                close2.insert(u2);
                let x = u1 * other.n + u2;
                let row = &mut g.adj[x];
                for v1 in close1.iter() {
                    for v2 in close2.iter() {
                        let y = v1 * other.n + v2;
                        if y != x {
                            row.insert(y);
                        }
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn strong_power(&self, m: usize) -> Result<Graph> {
        if m == 0 {
            return Err(invalid("strong power exponent must be positive"));
        }
        let mut g = self.clone();
        g.labels = None;
        for _ in 1..m {
            g = g.strong_product(self)?;
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(invalid("cycle needs at least 3 vertices"));
        }
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().all(|&v| v < self.n)
            && set.iter().enumerate().all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !self.has_edge(u, v)))
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter().all(|&v| v < self.n)
            && set.iter().enumerate().all(|(i, &u)| set[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    pub fn is_proper_coloring(&self, colors: &[usize]) -> bool {
        colors.len() == self.n && self.edges().all(|(u, v)| colors[u] != colors[v])
    }

    /// Symmetric adjacency, empty diagonal, labels distinct.
    pub fn check_invariants(&self) -> bool {
        (0..self.n).all(|u| !self.adj[u].contains(u) && self.adj[u].iter().all(|v| v < self.n && self.adj[v].contains(u)))
            && self.labels.as_ref().map_or(true, |l| {
                let mut s = l.clone();
                s.sort();
                s.dedup();
                s.len() == l.len()
            })
    }

    /// Text form: `p <n>` followed by `e <u> <v>` lines, `u < v`, sorted.
    pub fn to_text(&self) -> String {
        let mut s = format!("p {}\n", self.n);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "e {u} {v}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Graph> {
        let mut g: Option<Graph> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("p") => {
                    if g.is_some() {
                        return Err(perr("duplicate header"));
                    }
                    let n = parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| perr("bad vertex count"))?;
                    g = Some(Graph::empty(n));
                }
                Some("e") => {
                    let gr = g.as_mut().ok_or_else(|| perr("edge before header"))?;
                    let u: usize = parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| perr("bad endpoint"))?;
                    let v: usize = parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| perr("bad endpoint"))?;
                    gr.add_edge(u, v).map_err(|e| perr(&e.to_string()))?;
                }
                _ => return Err(perr("unknown record")),
            }
            if parts.next().is_some() {
                return Err(perr("trailing tokens"));
            }
        }
        g.ok_or(Error::Parse { line: 0, msg: "missing header".into() })
    }

    /// Canonical hash of the text serialization.
    pub fn hash(&self) -> String {
        sha256_hex(self.to_text().as_bytes())
    }

    /// Relabels vertices: new vertex `i` is old vertex `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Graph {
        let mut pos = vec![0; self.n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let adj = order
            .iter()
            .map(|&v| Bitset::from_indices(self.n, self.adj[v].iter().map(|w| pos[w])))
            .collect();
        Graph { n: self.n, adj, labels: None }
    }
}

pub fn complete_graph(t: usize) -> Result<Graph> {
    if t == 0 {
        return Err(invalid("complete graph needs t >= 1"));
    }
    Ok(Graph::from_fn(t, |_, _| true))
}

pub fn edgeless_graph(t: usize) -> Result<Graph> {
    if t == 0 {
        return Err(invalid("edgeless graph needs t >= 1"));
    }
    Ok(Graph::empty(t))
}
