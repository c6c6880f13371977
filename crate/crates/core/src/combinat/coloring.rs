use crate::graphs::Graph;

use super::clique::max_clique;

/// Outcome of a chromatic-number search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringSearch {
    /// Best proper colouring found, colours `0..upper`.
    pub coloring: Vec<usize>,
    pub lower: usize,
    pub upper: usize,
    pub nodes: u64,
}

impl ColoringSearch {
    pub fn exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Greedy DSATUR colouring: pick the uncoloured vertex with the most distinct
/// neighbour colours, then the largest degree, then the lowest index.
pub fn dsatur_greedy(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut color = vec![usize::MAX; n];
    let mut seen: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut sat = vec![0usize; n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| color[v] == usize::MAX)
            .max_by_key(|&v| (sat[v], g.degree(v), std::cmp::Reverse(v)))
            .expect("uncoloured vertex");
        let c = (0..).find(|&c| !seen[v].get(c).copied().unwrap_or(false)).expect("colour");
        color[v] = c;
        for w in g.neighbors(v).iter() {
            if seen[w].len() <= c {
                seen[w].resize(c + 1, false);
            }
            if !seen[w][c] {
                seen[w][c] = true;
                sat[w] += 1;
            }
        }
    }
    color
}

/// Exact chromatic number by iterative deepening on the colour count.
///
/// The lower bound is the larger of the clique number and `⌈n / α⌉`, both
/// computed exactly when the budget allows. Each level precolours a maximum
/// clique, selects vertices by DSATUR order, opens at most one new colour per
/// step and forward-checks the colour domains of neighbours.
pub fn chromatic_search(g: &Graph, budget: u64) -> ColoringSearch {
    let n = g.n();
    if n == 0 {
        return ColoringSearch { coloring: Vec::new(), lower: 0, upper: 0, nodes: 0 };
    }
    let greedy = dsatur_greedy(g);
    let mut upper = greedy.iter().max().map_or(0, |&c| c + 1);
    let mut best = greedy;
    let clique = max_clique(g, budget);
    let mut nodes = clique.nodes;
    let mut lower = clique.clique.len();
    let indep = max_clique(&g.complement(), budget.saturating_sub(nodes));
    nodes += indep.nodes;
    if indep.exact {
        lower = lower.max(n.div_ceil(indep.clique.len()));
    }
    while lower < upper {
        let k = lower;
        if k > 64 {
            break;
        }
        let mut s = Colorer::new(g, k, budget.saturating_sub(nodes));
        let res = s.run(&clique.clique);
        nodes += s.nodes;
        match res {
            Some(Some(col)) => {
                best = col;
                upper = k;
            }
            Some(None) => lower = k + 1,
            None => break,
        }
    }
    debug_assert!(g.is_proper_coloring(&best));
    ColoringSearch { coloring: best, lower, upper, nodes }
}

struct Colorer<'a> {
    g: &'a Graph,
    k: usize,
    color: Vec<usize>,
    domain: Vec<u64>,
    nodes: u64,
    budget: u64,
}

impl<'a> Colorer<'a> {
    fn new(g: &'a Graph, k: usize, budget: u64) -> Self {
        let full = if k == 64 { !0 } else { (1u64 << k) - 1 };
        Colorer { g, k, color: vec![usize::MAX; g.n()], domain: vec![full; g.n()], nodes: 0, budget }
    }

    /// `Some(Some(colouring))`, `Some(None)` when refuted, `None` on budget.
    fn run(&mut self, clique: &[usize]) -> Option<Option<Vec<usize>>> {
        if clique.len() > self.k {
            return Some(None);
        }
        for (c, &v) in clique.iter().enumerate() {
            if self.domain[v] >> c & 1 == 0 || !self.assign(v, c).1 {
                return Some(None);
            }
        }
        let used = clique.len();
        match self.descend(used) {
            Some(true) => Some(Some(self.color.clone())),
            Some(false) => Some(None),
            None => None,
        }
    }

    /// Assigns and forward-checks; returns the undo log and feasibility.
    fn assign(&mut self, v: usize, c: usize) -> (Vec<usize>, bool) {
        self.color[v] = c;
        let mut touched = Vec::new();
        let mut ok = true;
        for w in self.g.neighbors(v).iter() {
            if self.color[w] == usize::MAX && self.domain[w] >> c & 1 == 1 {
                self.domain[w] &= !(1 << c);
                touched.push(w);
                if self.domain[w] == 0 {
                    ok = false;
                }
            }
        }
        (touched, ok)
    }

    fn descend(&mut self, used: usize) -> Option<bool> {
        let n = self.g.n();
        let pick = (0..n)
            .filter(|&v| self.color[v] == usize::MAX)
            .min_by_key(|&v| {
                let uncolored_deg = self.g.neighbors(v).iter().filter(|&w| self.color[w] == usize::MAX).count();
                (self.domain[v].count_ones(), std::cmp::Reverse(uncolored_deg), v)
            });
        let Some(v) = pick else { return Some(true) };
        let limit = (used + 1).min(self.k);
        for c in 0..limit {
            if self.domain[v] >> c & 1 == 0 {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let (touched, ok) = self.assign(v, c);
            let res = if ok { self.descend(used.max(c + 1)) } else { Some(false) };
            for w in touched {
                self.domain[w] |= 1 << c;
            }
            match res {
                Some(true) => return Some(true),
                None => {
                    self.color[v] = usize::MAX;
                    return None;
                }
                Some(false) => self.color[v] = usize::MAX,
            }
        }
        Some(false)
    }
}
