use serde::{Deserialize, Serialize};

use super::poly::{bbr_polynomial, is_prime, MultilinearPolyZp};
use crate::combinat::independence_number;
use crate::error::{invalid, Error, Result};
use crate::graphs::{make_hk, Graph};
use crate::hash::sha256_hex;

/// Largest vertex count for which every pair is checked.
pub const EXHAUSTIVE_PAIRS: usize = 4096;

/// Polynomials `f_u` and points `c_u` over `Z_p` with `f_u(c_u) ≠ 0` and
/// `f_u(c_v) = 0` for distinct non-adjacent `u`, `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub p: u64,
    pub k: usize,
    pub polys: Vec<MultilinearPolyZp>,
    pub points: Vec<Vec<u64>>,
}

impl Representation {
    pub fn new(polys: Vec<MultilinearPolyZp>, points: Vec<Vec<u64>>) -> Result<Self> {
        let first = polys.first().ok_or_else(|| invalid("empty representation"))?;
        let (p, k) = (first.p(), first.k());
        if polys.len() != points.len() {
            return Err(Error::Shape("one point per polynomial".into()));
        }
        if polys.iter().any(|f| f.p() != p || f.k() != k) || points.iter().any(|c| c.len() != k || c.iter().any(|&x| x >= p)) {
            return Err(Error::Shape("polynomials and points must share p and k".into()));
        }
        Ok(Representation { p, k, polys, points })
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// `f_u(c_v)`.
    pub fn value(&self, u: usize, v: usize) -> u64 {
        let c = &self.points[v];
        if c.iter().all(|&x| x <= 1) {
            let mask = c.iter().enumerate().fold(0u64, |m, (i, &x)| m | x << i);
            self.polys[u].eval_bits(mask)
        } else {
            self.polys[u].eval(c).expect("shape checked")
        }
    }

    /// Largest polynomial degree.
    pub fn degree(&self) -> usize {
        self.polys.iter().filter_map(MultilinearPolyZp::degree).max().unwrap_or(0)
    }

    /// Dimension of the multilinear polynomials of degree at most
    /// [`degree`](Self::degree), which contains every `f_u`.
    pub fn space_dimension(&self) -> u128 {
        binomial_sum(self.k as u64, self.degree() as u64 + 1)
    }

    /// Checks the defining conditions on `g`: every diagonal value, and every
    /// non-adjacent pair up to [`EXHAUSTIVE_PAIRS`] vertices, else `samples`
    /// seeded random pairs. Returns the number of pairs checked.
    pub fn verify(&self, g: &Graph, samples: usize, seed: u64) -> Result<usize> {
        let n = g.n();
        if self.len() != n {
            return Err(Error::Shape(format!("{} entries for {n} vertices", self.len())));
        }
        for u in 0..n {
            if self.value(u, u) == 0 {
                return Err(Error::Verification(format!("f_{u}(c_{u}) = 0")));
            }
        }
        let mut checked = 0;
        let mut check = |u: usize, v: usize| -> Result<()> {
            if u != v && !g.has_edge(u, v) {
                checked += 1;
                if self.value(u, v) != 0 {
                    return Err(Error::Verification(format!("f_{u}(c_{v}) ≠ 0 for non-adjacent {u}, {v}")));
                }
            }
            Ok(())
        };
        if n <= EXHAUSTIVE_PAIRS {
            for u in 0..n {
                for v in 0..n {
                    check(u, v)?;
                }
            }
        } else {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                check(rng.random_range(0..n), rng.random_range(0..n))?;
            }
        }
        Ok(checked)
    }
}

/// `Σ_{i < terms} C(k, i)`.
pub fn binomial_sum(k: u64, terms: u64) -> u128 {
    let mut total = 0u128;
    let mut b = 1u128;
    for i in 0..terms.min(k + 1) {
        total += b;
        b = b * (k - i) as u128 / (i + 1) as u128;
    }
    total
}

/// Full `k`-bit string of an `H_k` vertex as a mask (parity in bit `k−1`).
fn full_string(k: usize, x: u64) -> u64 {
    x | ((x.count_ones() as u64 & 1) << (k - 1))
}

/// Representation of `H_k` for `k = 4 p^l − 1`: `f_u` is the BBR polynomial
/// with `w = 0` after `x_i ↦ 1 − x_i` wherever `u_i = 1`, and `c_u = u`, so
/// `f_u(c_v) = f(u ⊕ v)` vanishes unless the distance is `0` or `2 p^l`.
pub fn representation_for_hk(k: usize, p: u64, l: u32) -> Result<Representation> {
    let q = p.checked_pow(l).ok_or_else(|| invalid("p^l overflows"))?;
    if k as u64 != 4 * q - 1 {
        return Err(invalid(format!("k = {k} is not 4 p^l − 1 = {}", 4 * q - 1)));
    }
    let hk = make_hk(k)?;
    if hk.m() > 16 {
        return Err(Error::TooLarge(format!("{} vertices", hk.order())));
    }
    let f = bbr_polynomial(p, l, k, 0)?;
    let mut polys = Vec::with_capacity(hk.order());
    let mut points = Vec::with_capacity(hk.order());
    for x in 0..hk.order() as u64 {
        let s = full_string(k, x);
        polys.push(f.flip(s));
        points.push((0..k).map(|i| s >> i & 1).collect());
    }
    Representation::new(polys, points)
}

/// Rank of a matrix over `Z_p` by row reduction, pivoting on columns in the
/// given order.
pub fn rank_mod_p(rows: &[Vec<u64>], p: u64, column_order: &[usize]) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let inv = |a: u64| -> u64 {
        // a^{p−2}
        let (mut r, mut b, mut e) = (1u64, a, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for &col in column_order {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, piv);
        let s = inv(m[rank][col]);
        let pivot: Vec<u64> = m[rank].iter().map(|&x| x * s % p).collect();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        m[rank] = pivot;
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Result of checking one probe set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub size: usize,
    pub rank: usize,
    pub invertible: bool,
}

/// Rank-based upper bound on the independence number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RankBoundCertificate {
    pub p: u64,
    pub l: Option<u32>,
    pub k: usize,
    #[serde(rename = "D")]
    pub dimension: u128,
    pub rank: usize,
    /// Rank under the reversed pivot order on the transpose.
    pub rank_check: usize,
    pub alpha_upper: usize,
    pub probes: Vec<ProbeResult>,
    pub pairs_checked: usize,
    pub matrix_hash: String,
}

impl RankBoundCertificate {
    /// `α(G^⊠m) ≤ D^m`.
    pub fn power_bound(&self, m: u32) -> Option<u128> {
        self.dimension.checked_pow(m)
    }
}

/// Evaluation matrix `M[u][v] = f_u(c_v)` and its rank over `Z_p`. Any
/// independent set indexes an invertible diagonal submatrix, so
/// `α(G) ≤ rank(M) ≤ D`.
pub fn rank_certificate(rep: &Representation, g: &Graph, probes: &[Vec<usize>], l: Option<u32>) -> Result<RankBoundCertificate> {
    let pairs_checked = rep.verify(g, 10_000, 0)?;
    let n = g.n();
    let m: Vec<Vec<u64>> = (0..n).map(|u| (0..n).map(|v| rep.value(u, v)).collect()).collect();
    let forward: Vec<usize> = (0..n).collect();
    let backward: Vec<usize> = (0..n).rev().collect();
    let rank = rank_mod_p(&m, rep.p, &forward);
    let transpose: Vec<Vec<u64>> = (0..n).map(|v| (0..n).map(|u| m[u][v]).collect()).collect();
    let rank_check = rank_mod_p(&transpose, rep.p, &backward);
    if rank != rank_check {
        return Err(Error::Verification(format!("elimination orders disagree: {rank} vs {rank_check}")));
    }
    let dimension = rep.space_dimension();
    if rank as u128 > dimension {
        return Err(Error::Verification(format!("rank {rank} exceeds the space dimension {dimension}")));
    }
    let mut results = vec![];
    for s in probes {
        if !g.is_independent(s) || s.iter().any(|&v| v >= n) {
            return Err(invalid(format!("probe {s:?} is not an independent set")));
        }
        let sub: Vec<Vec<u64>> = s.iter().map(|&u| s.iter().map(|&v| m[u][v]).collect()).collect();
        let r = rank_mod_p(&sub, rep.p, &(0..s.len()).collect::<Vec<_>>());
        results.push(ProbeResult { size: s.len(), rank: r, invertible: r == s.len() });
        if r != s.len() || s.len() > rank {
            return Err(Error::Verification(format!("probe of size {} has rank {r}", s.len())));
        }
    }
    let bytes: Vec<u8> = m.iter().flatten().map(|&x| x as u8).collect();
    Ok(RankBoundCertificate {
        p: rep.p,
        l,
        k: rep.k,
        dimension,
        rank,
        rank_check,
        alpha_upper: rank,
        probes: results,
        pairs_checked,
        matrix_hash: sha256_hex(&bytes),
    })
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// `D = Σ_{i < p^l} C(k, i)` with the entropy comparison values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DimensionBound {
    pub k: usize,
    pub p: u64,
    pub l: u32,
    #[serde(rename = "D")]
    pub dimension: u128,
    /// `2^{k H(3/11)}`.
    pub entropy_value: f64,
    /// `2^{0.846 k}`.
    pub cap: f64,
    /// `D ≤ 2^{k H(3/11)} < 2^{0.846 k}`.
    pub holds: bool,
}

pub fn dimension_bound(k: usize, p: u64, l: u32) -> Result<DimensionBound> {
    if !is_prime(p) || l == 0 {
        return Err(invalid("need a prime p and l ≥ 1"));
    }
    let q = p.checked_pow(l).ok_or_else(|| invalid("p^l overflows"))?;
    if (k as u64) < q {
        return Err(invalid(format!("k = {k} < p^l = {q}")));
    }
    let dimension = binomial_sum(k as u64, q);
    let entropy_value = (k as f64 * binary_entropy(3.0 / 11.0)).exp2();
    let cap = (0.846 * k as f64).exp2();
    let holds = (dimension as f64) <= entropy_value && entropy_value < cap;
    Ok(DimensionBound { k, p, l, dimension, entropy_value, cap, holds })
}

/// Brute-force `α(G^⊠n)` against `D^n` for a representation of `G`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct AlonSmoke {
    pub n: usize,
    pub alpha: usize,
    pub alpha_exact: bool,
    #[serde(rename = "D")]
    pub dimension: u128,
    pub bound: u128,
    pub holds: bool,
}

pub fn alon_bound_smoke(g: &Graph, rep: &Representation, n: usize, budget: u64) -> Result<AlonSmoke> {
    if n == 0 || n > 2 {
        return Err(invalid("power must be 1 or 2"));
    }
    rep.verify(g, 0, 0)?;
    let gn = g.strong_power(n)?;
    let a = independence_number(&gn, budget);
    let dimension = rep.space_dimension();
    let bound = dimension.pow(n as u32);
    Ok(AlonSmoke { n, alpha: a.lower, alpha_exact: a.is_exact(), dimension, bound, holds: (a.lower as u128) <= bound })
}
