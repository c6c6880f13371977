use std::fmt::Write as _;

use super::bitset::Bitset;
use super::graph::Graph;
use crate::error::{invalid, Error, Result};
use crate::hash::sha256_hex;

/// Largest group exponent accepted for a connection set.
pub const MAX_EXPONENT: u32 = 24;
/// Largest group exponent for explicit expansion to a [`Graph`].
pub const MAX_EXPAND_EXPONENT: u32 = 14;

/// Cayley graph on `Z_2^m`: `u ~ v` iff `u ^ v` lies in `conn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyZ2 {
    m: u32,
    conn: Vec<u64>,
}

impl CayleyZ2 {
    pub fn new(m: u32, conn: impl IntoIterator<Item = u64>) -> Result<Self> {
        if m > MAX_EXPONENT {
            return Err(Error::TooLarge(format!("group exponent {m} exceeds {MAX_EXPONENT}")));
        }
        let mut conn: Vec<u64> = conn.into_iter().collect();
        conn.sort_unstable();
        conn.dedup();
        if conn.first() == Some(&0) {
            return Err(invalid("connection set contains the identity"));
        }
        if conn.last().is_some_and(|&s| s >> m != 0) {
            return Err(invalid("connection element outside the group"));
        }
        Ok(CayleyZ2 { m, conn })
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> usize {
        1usize << self.m
    }

    /// Sorted connection set.
    pub fn conn(&self) -> &[u64] {
        &self.conn
    }

    pub fn contains(&self, s: u64) -> bool {
        self.conn.binary_search(&s).is_ok()
    }

    /// Indicator of the connection set over the whole group.
    pub fn conn_mask(&self) -> Bitset {
        Bitset::from_indices(self.order(), self.conn.iter().map(|&s| s as usize))
    }

    pub fn degree(&self) -> usize {
        self.conn.len()
    }

    pub fn edge_count(&self) -> usize {
        self.order() * self.conn.len() / 2
    }

    pub fn complement(&self) -> CayleyZ2 {
        let mask = self.conn_mask();
        let conn = (1..self.order() as u64).filter(|&s| !mask.contains(s as usize)).collect();
        CayleyZ2 { m: self.m, conn }
    }

    /// Strong product; the first factor occupies the high bits so that the
    /// element order is row-major over the two factors.
    pub fn strong_product(&self, other: &CayleyZ2) -> Result<CayleyZ2> {
        let m = self.m + other.m;
        if m > MAX_EXPONENT {
            return Err(Error::TooLarge(format!("group exponent {m} exceeds {MAX_EXPONENT}")));
        }
        let with_zero = |c: &[u64]| std::iter::once(0).chain(c.iter().copied()).collect::<Vec<_>>();
        let (a, b) = (with_zero(&self.conn), with_zero(&other.conn));
        let mut conn = Vec::with_capacity(a.len() * b.len() - 1);
        for &x in &a {
            for &y in &b {
                let s = (x << other.m) | y;
                if s != 0 {
                    conn.push(s);
                }
            }
        }
        conn.sort_unstable();
        Ok(CayleyZ2 { m, conn })
    }

    pub fn strong_power(&self, power: usize) -> Result<CayleyZ2> {
        if power == 0 {
            return Err(invalid("strong power exponent must be positive"));
        }
        let mut g = self.clone();
        for _ in 1..power {
            g = g.strong_product(self)?;
        }
        Ok(g)
    }

    pub fn to_graph(&self) -> Result<Graph> {
        if self.m > MAX_EXPAND_EXPONENT {
            return Err(Error::TooLarge(format!("expansion of Z_2^{} is too large", self.m)));
        }
        let n = self.order();
        let edges = (0..n).flat_map(|u| {
            self.conn.iter().map(move |&s| (u, u ^ s as usize)).filter(|&(u, v)| u < v)
        });
        Graph::from_edges(n, edges)
    }

    /// `cayley-z2 m=<m> conn=<hex,...>` with lower-case hex in ascending order.
    pub fn to_text(&self) -> String {
        let mut s = format!("cayley-z2 m={} conn=", self.m);
        for (i, c) in self.conn.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{c:x}");
        }
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<CayleyZ2> {
        let perr = |msg: &str| Error::Parse { line: 1, msg: msg.to_string() };
        let line = text.trim();
        let mut parts = line.split_whitespace();
        if parts.next() != Some("cayley-z2") {
            return Err(perr("expected cayley-z2 header"));
        }
        let m = parts
            .next()
            .and_then(|t| t.strip_prefix("m="))
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| perr("bad m field"))?;
        let conn_field = parts.next().and_then(|t| t.strip_prefix("conn=")).ok_or_else(|| perr("bad conn field"))?;
        if parts.next().is_some() {
            return Err(perr("trailing tokens"));
        }
        let conn = if conn_field.is_empty() {
            Vec::new()
        } else {
            conn_field
                .split(',')
                .map(|h| u64::from_str_radix(h, 16).map_err(|_| perr("bad hex element")))
                .collect::<Result<Vec<_>>>()?
        };
        CayleyZ2::new(m, conn).map_err(|e| perr(&e.to_string()))
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.to_text().as_bytes())
    }
}

/// The quarter-orthogonality graph on even-weight `k`-bit strings, with the
/// parity bit dropped so that vertices are `Z_2^(k-1)`.
///
/// Bit `i` of a vertex holds coordinate `i` for `i < k-1`; coordinate `k-1` is
/// the parity of the others. Two strings are adjacent at Hamming distance
/// `(k+1)/2`, equivalently when their `±1` images have inner product `-1`.
/// For `k = 1 mod 4` that distance is odd and the graph has no edges.
pub fn make_hk(k: usize) -> Result<CayleyZ2> {
    if k < 3 || k % 2 == 0 {
        return Err(invalid(format!("H_k needs odd k >= 3, got {k}")));
    }
    let m = (k - 1) as u32;
    if m > MAX_EXPONENT {
        return Err(Error::TooLarge(format!("k = {k} is beyond the supported range")));
    }
    let target = (k + 1) / 2;
    let conn = (1u64..1 << m).filter(|&x| even_weight(x) == target);
    CayleyZ2::new(m, conn)
}

/// Hamming weight of the even-weight completion of `x`.
#[inline]
pub fn even_weight(x: u64) -> usize {
    let w = x.count_ones() as usize;
    w + (w & 1)
}

/// The full `k`-bit string of an `H_k` vertex as ASCII `0`/`1`.
pub fn hk_label(k: usize, x: u64) -> Vec<u8> {
    let mut s: Vec<u8> = (0..k - 1).map(|i| b'0' + (x >> i & 1) as u8).collect();
    s.push(b'0' + (x.count_ones() & 1) as u8);
    s
}

/// Inverse of [`hk_label`]; rejects odd-weight strings.
pub fn hk_vertex(label: &[u8]) -> Result<u64> {
    let k = label.len();
    if k < 2 || label.iter().any(|&c| c != b'0' && c != b'1') {
        return Err(invalid("label must be a 0/1 string"));
    }
    if label.iter().filter(|&&c| c == b'1').count() % 2 == 1 {
        return Err(invalid("label has odd weight"));
    }
    Ok(label[..k - 1].iter().enumerate().fold(0, |x, (i, &c)| x | ((c - b'0') as u64) << i))
}

/// `±1` image of the full `k`-bit string: bit `0` maps to `+1`.
pub fn hk_signs(k: usize, x: u64) -> Vec<i8> {
    hk_label(k, x).iter().map(|&c| if c == b'0' { 1 } else { -1 }).collect()
}

/// Expansion of `H_k` with the `k`-bit strings attached as labels.
pub fn hk_graph(k: usize) -> Result<Graph> {
    let c = make_hk(k)?;
    let labels = (0..c.order() as u64).map(|x| hk_label(k, x)).collect();
    c.to_graph()?.with_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, r: usize) -> usize {
        (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn hk_small_cases() {
        let h3 = make_hk(3).unwrap();
        assert_eq!(h3.order(), 4);
        assert_eq!(h3.conn(), &[1, 2, 3]);
        let h5 = make_hk(5).unwrap();
        assert_eq!(h5.order(), 16);
        assert!(h5.conn().is_empty());
        let h7 = make_hk(7).unwrap();
        assert_eq!(h7.degree(), 35);
        assert_eq!(h7.edge_count(), 1120);
        assert!(make_hk(4).is_err());
        assert!(make_hk(1).is_err());
    }

    #[test]
    fn hk_degree_formula() {
        for k in (3..=15).step_by(2) {
            let d = make_hk(k).unwrap().degree();
            let want = if k % 4 == 3 { binom(k, (k + 1) / 2) } else { 0 };
            assert_eq!(d, want, "k = {k}");
        }
    }

    #[test]
    fn adjacency_matches_inner_product() {
        let k = 7;
        let g = hk_graph(k).unwrap();
        for u in 0..64u64 {
            for v in 0..64u64 {
                let su = hk_signs(k, u);
                let sv = hk_signs(k, v);
                let ip: i32 = su.iter().zip(&sv).map(|(&a, &b)| a as i32 * b as i32).sum();
                assert_eq!(g.has_edge(u as usize, v as usize), ip == -1);
            }
        }
    }

    #[test]
    fn labels_round_trip() {
        for x in 0..64 {
            let l = hk_label(7, x);
            assert_eq!(hk_vertex(&l).unwrap(), x);
        }
        assert!(hk_vertex(b"1000000").is_err());
    }

    #[test]
    fn power_conn_count() {
        let h7 = make_hk(7).unwrap();
        let p = h7.strong_power(2).unwrap();
        assert_eq!(p.m(), 12);
        assert_eq!(p.degree(), 36 * 36 - 1);
        assert!(h7.strong_power(0).is_err());
    }

    #[test]
    fn power_matches_graph_power() {
        let h3 = make_hk(3).unwrap();
        let a = h3.strong_power(2).unwrap().to_graph().unwrap();
        let b = h3.to_graph().unwrap().strong_power(2).unwrap();
        assert_eq!(a, b);
        let c = CayleyZ2::new(3, [1, 6]).unwrap();
        let d = CayleyZ2::new(2, [3]).unwrap();
        let x = c.strong_product(&d).unwrap().to_graph().unwrap();
        let y = c.to_graph().unwrap().strong_product(&d.to_graph().unwrap()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn complement_is_involution() {
        let h7 = make_hk(7).unwrap();
        assert_eq!(h7.complement().complement(), h7);
        assert_eq!(h7.complement().to_graph().unwrap(), h7.to_graph().unwrap().complement());
    }

    #[test]
    fn text_round_trip() {
        let h7 = make_hk(7).unwrap();
        let t = h7.to_text();
        assert!(t.starts_with("cayley-z2 m=6 conn="));
        assert_eq!(CayleyZ2::from_text(&t).unwrap(), h7);
        assert_eq!(CayleyZ2::from_text(&t).unwrap().to_text(), t);
        let e = CayleyZ2::new(2, []).unwrap();
        assert_eq!(e.to_text(), "cayley-z2 m=2 conn=\n");
        assert_eq!(CayleyZ2::from_text(&e.to_text()).unwrap(), e);
        assert!(CayleyZ2::from_text("cayley-z2 m=2 conn=0").is_err());
        assert!(CayleyZ2::from_text("cayley-z2 m=2 conn=4").is_err());
    }
}
