use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest variable count; monomials are bit masks.
pub const MAX_VARS: usize = 63;

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Multilinear polynomial over `Z_p` in `k` variables, keyed by the
/// bit mask of the monomial's variable set. Products reduce `x² → x`, which
/// is exact on `{0,1}` points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "PolyJson", try_from = "PolyJson")]
pub struct MultilinearPolyZp {
    p: u64,
    k: usize,
    terms: BTreeMap<u64, u64>,
}

impl MultilinearPolyZp {
    pub fn zero(p: u64, k: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(invalid(format!("{p} is not prime")));
        }
        if k > MAX_VARS {
            return Err(Error::TooLarge(format!("{k} variables")));
        }
        Ok(MultilinearPolyZp { p, k, terms: BTreeMap::new() })
    }

    pub fn constant(p: u64, k: usize, c: u64) -> Result<Self> {
        let mut f = Self::zero(p, k)?;
        f.add_term(0, c);
        Ok(f)
    }

    /// The variable `x_i` (zero-based).
    pub fn variable(p: u64, k: usize, i: usize) -> Result<Self> {
        if i >= k {
            return Err(invalid(format!("variable {i} out of {k}")));
        }
        let mut f = Self::zero(p, k)?;
        f.add_term(1 << i, 1);
        Ok(f)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &BTreeMap<u64, u64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest monomial size with a nonzero coefficient; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.count_ones() as usize).max()
    }

    pub fn add_term(&mut self, mask: u64, c: u64) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let e = self.terms.entry(mask).or_insert(0);
        *e = (*e + c) % self.p;
        if *e == 0 {
            self.terms.remove(&mask);
        }
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.k != other.k {
            return Err(invalid("polynomials over different rings"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut out = MultilinearPolyZp { p: self.p, k: self.k, terms: BTreeMap::new() };
        for (&m, &a) in &self.terms {
            out.add_term(m, a * (c % self.p));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(self.p - 1))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = MultilinearPolyZp { p: self.p, k: self.k, terms: BTreeMap::new() };
        for (&m1, &c1) in &self.terms {
            for (&m2, &c2) in &other.terms {
                out.add_term(m1 | m2, c1 * c2 % self.p);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut out = Self::constant(self.p, self.k, 1)?;
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Value at a `{0,1}` point given as a bit mask.
    pub fn eval_bits(&self, point: u64) -> u64 {
        self.terms.iter().filter(|(&m, _)| m & !point == 0).fold(0, |s, (_, &c)| (s + c) % self.p)
    }

    /// Value at a point of `Z_p^k`.
    pub fn eval(&self, point: &[u64]) -> Result<u64> {
        if point.len() != self.k {
            return Err(Error::Shape(format!("point of length {} for {} variables", point.len(), self.k)));
        }
        let p = self.p;
        let mut s = 0;
        for (&m, &c) in &self.terms {
            let mut v = c;
            let mut bits = m;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                v = v * (point[i] % p) % p;
                bits &= bits - 1;
            }
            s = (s + v) % p;
        }
        Ok(s)
    }

    /// Substitutes `x_i ↦ 1 − x_i` for every bit `i` of `flip`.
    pub fn flip(&self, flip: u64) -> Self {
        let p = self.p;
        let mut out = MultilinearPolyZp { p, k: self.k, terms: BTreeMap::new() };
        for (&m, &c) in &self.terms {
            // Π_{i∈m∩flip} (1 − x_i) expands over subsets T of m∩flip with sign (−1)^|T|
            let fixed = m & !flip;
            let f = m & flip;
            let mut t = f;
            loop {
                let sign = if t.count_ones() % 2 == 0 { c } else { (p - c) % p };
                out.add_term(fixed | t, sign);
                if t == 0 {
                    break;
                }
                t = (t - 1) & f;
            }
        }
        out
    }
}

/// Sum of all square-free monomials of degree `d` in `k` variables.
pub fn elementary_symmetric(p: u64, k: usize, d: usize) -> Result<MultilinearPolyZp> {
    if d > k {
        return Err(invalid(format!("degree {d} exceeds {k} variables")));
    }
    let mut f = MultilinearPolyZp::zero(p, k)?;
    // Gosper's hack over k-bit masks of weight d
    if d == 0 {
        f.add_term(0, 1);
        return Ok(f);
    }
    let mut m: u64 = (1 << d) - 1;
    let limit = 1u64 << k;
    while m < limit {
        f.add_term(m, 1);
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    Ok(f)
}

/// Multilinear `f` over `Z_p` of degree at most `p^l − 1` with
/// `f(c) = 1` when `|c| ≡ w (mod p^l)` and `f(c) = 0` otherwise, on
/// `c ∈ {0,1}^k`.
///
/// Digit `j` of `|c|` in base `p` is `e_{p^j}(c) mod p` (Lucas), and
/// `1 − (digit − w_j)^{p−1}` tests it against digit `j` of `w` (Fermat).
pub fn bbr_polynomial(p: u64, l: u32, k: usize, w: u64) -> Result<MultilinearPolyZp> {
    if p == 2 || !is_prime(p) {
        return Err(invalid(format!("{p} is not an odd prime")));
    }
    if l == 0 {
        return Err(invalid("l must be positive"));
    }
    let q = p.checked_pow(l).ok_or_else(|| invalid("p^l overflows"))?;
    if (k as u64) <= q {
        return Err(invalid(format!("need k > p^l = {q}, got k = {k}")));
    }
    let w = w % q;
    let mut f = MultilinearPolyZp::constant(p, k, 1)?;
    let mut wd = w;
    let mut pj = 1u64;
    for _ in 0..l {
        let digit = elementary_symmetric(p, k, pj as usize)?;
        let wj = wd % p;
        wd /= p;
        let diff = digit.sub(&MultilinearPolyZp::constant(p, k, wj)?)?;
        let ind = MultilinearPolyZp::constant(p, k, 1)?.sub(&diff.pow((p - 1) as u32)?)?;
        f = f.mul(&ind)?;
        pj *= p;
    }
    let deg = f.degree().unwrap_or(0);
    if deg as u64 > q - 1 {
        return Err(Error::Verification(format!("degree {deg} exceeds p^l − 1 = {}", q - 1)));
    }
    Ok(f)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub vars: Vec<usize>,
    pub coeff: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub p: u64,
    pub k: usize,
    pub terms: Vec<TermJson>,
}

impl From<MultilinearPolyZp> for PolyJson {
    fn from(f: MultilinearPolyZp) -> Self {
        let terms = f
            .terms
            .iter()
            .map(|(&m, &c)| TermJson { vars: (0..f.k).filter(|i| m >> i & 1 == 1).collect(), coeff: c })
            .collect();
        PolyJson { p: f.p, k: f.k, terms }
    }
}

impl TryFrom<PolyJson> for MultilinearPolyZp {
    type Error = Error;
    fn try_from(j: PolyJson) -> Result<Self> {
        let mut f = MultilinearPolyZp::zero(j.p, j.k)?;
        for t in j.terms {
            let mut m = 0u64;
            for v in t.vars {
                if v >= j.k || m >> v & 1 == 1 {
                    return Err(invalid(format!("bad variable {v}")));
                }
                m |= 1 << v;
            }
            f.add_term(m, t.coeff);
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, r: u64) -> u64 {
        if r > n {
            return 0;
        }
        (0..r).fold(1, |a, i| a * (n - i) / (i + 1))
    }

    #[test]
    fn elementary_values() {
        let e = elementary_symmetric(7, 3, 1).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e.eval_bits(0b011), 2);
        let e2 = elementary_symmetric(7, 4, 2).unwrap();
        assert_eq!(e2.eval_bits(0b0111), 3);
        let e0 = elementary_symmetric(7, 5, 0).unwrap();
        assert_eq!(e0, MultilinearPolyZp::constant(7, 5, 1).unwrap());
        for d in 0..=6 {
            let e = elementary_symmetric(101, 6, d).unwrap();
            assert_eq!(e.len() as u64, binom(6, d as u64));
            for x in 0u64..64 {
                assert_eq!(e.eval_bits(x), binom(x.count_ones() as u64, d as u64) % 101);
            }
        }
    }

    #[test]
    fn bbr_examples() {
        for &(p, l, k, w) in &[(3, 1, 11, 0), (3, 1, 4, 1), (5, 1, 6, 0), (3, 2, 10, 4), (7, 1, 9, 3)] {
            let f = bbr_polynomial(p, l, k, w).unwrap();
            let q = p.pow(l);
            assert!(f.degree().unwrap() as u64 <= q - 1);
            for c in 0u64..1 << k {
                let want = u64::from(c.count_ones() as u64 % q == w % q);
                assert_eq!(f.eval_bits(c), want, "p={p} l={l} k={k} w={w} c={c:b}");
            }
        }
        // 1 − e_1² for p = 3, reduced multilinearly
        let f = bbr_polynomial(3, 1, 11, 0).unwrap();
        let e1 = elementary_symmetric(3, 11, 1).unwrap();
        let g = MultilinearPolyZp::constant(3, 11, 1).unwrap().sub(&e1.mul(&e1).unwrap()).unwrap();
        assert_eq!(f, g);
        assert_eq!(f.degree(), Some(2));
        assert!(bbr_polynomial(3, 1, 3, 0).is_err());
        assert!(bbr_polynomial(4, 1, 9, 0).is_err());
    }

    #[test]
    fn flip_matches_shifted_evaluation() {
        let f = bbr_polynomial(3, 1, 11, 0).unwrap();
        for u in [0u64, 1, 0b101, 0x7ff, 0x2a5] {
            let fu = f.flip(u);
            for v in [0u64, 3, 0b110, 0x400, 0x3ff] {
                assert_eq!(fu.eval_bits(v), f.eval_bits(u ^ v));
            }
        }
    }

    #[test]
    fn general_points_and_json() {
        let x0 = MultilinearPolyZp::variable(5, 2, 0).unwrap();
        let x1 = MultilinearPolyZp::variable(5, 2, 1).unwrap();
        let f = x0.scale(3).add(&x1).unwrap().add(&MultilinearPolyZp::constant(5, 2, 4).unwrap()).unwrap();
        assert_eq!(f.eval(&[2, 3]).unwrap(), (6 + 3 + 4) % 5);
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"terms\""));
        assert_eq!(serde_json::from_str::<MultilinearPolyZp>(&s).unwrap(), f);
    }
}
