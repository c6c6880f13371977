//! Hadamard matrices: Sylvester doubling, both Paley constructions over
//! prime fields, Kronecker products, normalization and exact verification.
//!
//! Rows are stored bit-packed (bit set for `-1`); inner products are counted
//! with integer popcounts, so no floating point is involved.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest Sylvester exponent; orders above `2^15` are refused.
pub const MAX_SYLVESTER_EXPONENT: u32 = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Sylvester,
    Paley1,
    Paley2,
    Kronecker,
    User,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Sylvester => "sylvester",
            Provenance::Paley1 => "paley-1",
            Provenance::Paley2 => "paley-2",
            Provenance::Kronecker => "kronecker",
            Provenance::User => "user",
        };
        f.write_str(s)
    }
}

/// Verified `±1` matrix with `A A^T = ℓ I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HadamardMatrix {
    order: usize,
    bits: Vec<Vec<u64>>,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct HadamardJson {
    order: usize,
    rows: Vec<Vec<i8>>,
}

impl Serialize for HadamardMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HadamardJson { order: self.order, rows: self.rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HadamardMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = HadamardJson::deserialize(d)?;
        if j.rows.len() != j.order {
            return Err(serde::de::Error::custom("row count differs from order"));
        }
        HadamardMatrix::from_rows(j.rows, Provenance::User).map_err(serde::de::Error::custom)
    }
}

fn words(order: usize) -> usize {
    order.div_ceil(64)
}

impl HadamardMatrix {
    /// Builds and verifies a matrix from `±1` rows.
    pub fn from_rows(rows: Vec<Vec<i8>>, provenance: Provenance) -> Result<Self> {
        let order = rows.len();
        let mut bits = vec![vec![0u64; words(order)]; order];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::Shape(format!("row {i} has length {}, expected {order}", row.len())));
            }
            for (j, &a) in row.iter().enumerate() {
                match a {
                    1 => {}
                    -1 => bits[i][j / 64] |= 1 << (j % 64),
                    _ => return Err(Error::NotHadamard(format!("entry ({i},{j}) is {a}"))),
                }
            }
        }
        Self::from_bits(order, bits, provenance)
    }

    fn from_bits(order: usize, bits: Vec<Vec<u64>>, provenance: Provenance) -> Result<Self> {
        let h = HadamardMatrix { order, bits, provenance };
        h.verify()?;
        Ok(h)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i8 {
        if self.bits[i][j / 64] >> (j % 64) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn row(&self, i: usize) -> Vec<i8> {
        (0..self.order).map(|j| self.entry(i, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<i8>> {
        (0..self.order).map(|i| self.row(i)).collect()
    }

    /// Row `i` as a bitmask with bit `j` set when entry `j` is `-1`
    /// (orders up to 64 only).
    pub fn row_mask(&self, i: usize) -> u64 {
        assert!(self.order <= 64, "row_mask needs order <= 64");
        self.bits[i].first().copied().unwrap_or(0)
    }

    /// Integer inner product of rows `i` and `j`.
    pub fn row_inner(&self, i: usize, j: usize) -> i64 {
        let diff: u32 = self.bits[i].iter().zip(&self.bits[j]).map(|(a, b)| (a ^ b).count_ones()).sum();
        self.order as i64 - 2 * diff as i64
    }

    /// Exact check of `A A^T = ℓ I` and of the order rule.
    pub fn verify(&self) -> Result<()> {
        let l = self.order;
        if l == 0 {
            return Err(Error::NotHadamard("empty matrix".into()));
        }
        if l > 2 && l % 4 != 0 {
            return Err(Error::NotHadamard(format!("order {l} is not 1, 2 or a multiple of 4")));
        }
        for i in 0..l {
            for j in i + 1..l {
                let ip = self.row_inner(i, j);
                if ip != 0 {
                    return Err(Error::NotHadamard(format!("rows {i} and {j} have inner product {ip}")));
                }
            }
        }
        Ok(())
    }

    /// Sign-flips rows and columns so the first row and column are all `+1`.
    pub fn normalize(&self) -> HadamardMatrix {
        let l = self.order;
        let col_flip = self.bits[0].clone();
        let bits = (0..l)
            .map(|i| {
                let flip_row = self.entry(i, 0) == -1;
                self.bits[i]
                    .iter()
                    .zip(&col_flip)
                    .enumerate()
                    .map(|(w, (&b, &c))| {
                        let mut x = b ^ c;
                        if flip_row {
                            x = !x;
                            let valid = l - w * 64;
                            if valid < 64 {
                                x &= (1u64 << valid) - 1;
                            }
                        }
                        x
                    })
                    .collect()
            })
            .collect();
        HadamardMatrix { order: l, bits, provenance: self.provenance }
    }

    pub fn is_normalized(&self) -> bool {
        (0..self.order).all(|i| self.entry(0, i) == 1 && self.entry(i, 0) == 1)
    }

    pub fn kronecker(&self, other: &HadamardMatrix) -> Result<HadamardMatrix> {
        let (a, b) = (self.order, other.order);
        let l = a * b;
        if l > 1 << MAX_SYLVESTER_EXPONENT {
            return Err(Error::TooLarge(format!("order {l}")));
        }
        let mut bits = vec![vec![0u64; words(l)]; l];
        for i1 in 0..a {
            for i2 in 0..b {
                let row = &mut bits[i1 * b + i2];
                for j1 in 0..a {
                    let s = self.entry(i1, j1);
                    for j2 in 0..b {
                        if s * other.entry(i2, j2) == -1 {
                            let j = j1 * b + j2;
                            row[j / 64] |= 1 << (j % 64);
                        }
                    }
                }
            }
        }
        HadamardMatrix::from_bits(l, bits, Provenance::Kronecker)
    }

    /// Rows of `+` and `-`, one per line.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.order * (self.order + 1));
        for i in 0..self.order {
            s.extend((0..self.order).map(|j| if self.entry(i, j) == 1 { '+' } else { '-' }));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<HadamardMatrix> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .enumerate()
            .map(|(i, l)| {
                l.chars()
                    .map(|c| match c {
                        '+' => Ok(1),
                        '-' => Ok(-1),
                        _ => Err(Error::Parse { line: i + 1, msg: format!("unexpected character {c:?}") }),
                    })
                    .collect::<Result<Vec<i8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        HadamardMatrix::from_rows(rows, Provenance::User)
    }
}

/// Order `2^n` by Kronecker doubling of `[[1,1],[1,-1]]`.
pub fn sylvester(n: u32) -> Result<HadamardMatrix> {
    if n > MAX_SYLVESTER_EXPONENT {
        return Err(Error::TooLarge(format!("Sylvester order 2^{n} exceeds 2^{MAX_SYLVESTER_EXPONENT}")));
    }
    let l = 1usize << n;
    // entry (i, j) = (-1)^{popcount(i & j)}
    let bits = (0..l)
        .map(|i| {
            let mut row = vec![0u64; words(l)];
            for j in 0..l {
                if (i & j).count_ones() & 1 == 1 {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();
    HadamardMatrix::from_bits(l, bits, Provenance::Sylvester)
}

fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

/// Legendre symbol of `a` modulo the odd prime `q`, as `-1`, `0` or `1`.
fn legendre(a: u64, q: u64) -> i8 {
    let a = a % q;
    if a == 0 {
        return 0;
    }
    let mut r = 1u64;
    let (mut b, mut e) = (a, (q - 1) / 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

fn check_field(q: u64, residue: u64) -> Result<()> {
    if !is_prime(q) || q == 2 {
        return Err(invalid(format!("q = {q} is not an odd prime (prime-power fields are not supported)")));
    }
    if q % 4 != residue {
        return Err(invalid(format!("q = {q} is not {residue} mod 4")));
    }
    Ok(())
}

/// Jacobsthal matrix `Q[i][j] = χ(j - i)` over `Z_q`.
fn jacobsthal(q: u64) -> Vec<Vec<i8>> {
    (0..q).map(|i| (0..q).map(|j| legendre((j + q - i) % q, q)).collect()).collect()
}

/// Order `q + 1` for a prime `q ≡ 3 (mod 4)`: `H = I + S` with `S` skew.
pub fn paley_1(q: u64) -> Result<HadamardMatrix> {
    check_field(q, 3)?;
    let n = q as usize + 1;
    let jac = jacobsthal(q);
    let mut rows = vec![vec![0i8; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            let s = match (i, j) {
                (0, 0) => 0,
                (0, _) => 1,
                (_, 0) => -1,
                _ => jac[i - 1][j - 1],
            };
            *e = s + i8::from(i == j);
        }
    }
    HadamardMatrix::from_rows(rows, Provenance::Paley1)
}

/// Order `2(q + 1)` for a prime `q ≡ 1 (mod 4)` from the symmetric
/// conference matrix `C`: `H = C ⊗ [[1,-1],[-1,-1]] + I ⊗ [[1,1],[1,-1]]`.
pub fn paley_2(q: u64) -> Result<HadamardMatrix> {
    check_field(q, 1)?;
    let n = q as usize + 1;
    let jac = jacobsthal(q);
    let c = |i: usize, j: usize| -> i8 {
        match (i, j) {
            (0, 0) => 0,
            (0, _) | (_, 0) => 1,
            _ => jac[i - 1][j - 1],
        }
    };
    const A: [[i8; 2]; 2] = [[1, -1], [-1, -1]];
    const B: [[i8; 2]; 2] = [[1, 1], [1, -1]];
    let mut rows = vec![vec![0i8; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            for a in 0..2 {
                for b in 0..2 {
                    let v = if i == j { B[a][b] } else { c(i, j) * A[a][b] };
                    rows[2 * i + a][2 * j + b] = v;
                }
            }
        }
    }
    HadamardMatrix::from_rows(rows, Provenance::Paley2)
}

/// A Hadamard matrix of order `ℓ` from the covered constructions, or `None`.
///
/// Tries orders 1 and 2, Sylvester, Paley I, Paley II, then Kronecker products
/// of smaller covered orders with the smaller factor ascending.
pub fn hadamard_of_order(l: usize) -> Option<HadamardMatrix> {
    match l {
        0 => return None,
        1 => return sylvester(0).ok(),
        2 => return sylvester(1).ok(),
        _ if l % 4 != 0 => return None,
        _ => {}
    }
    if l.is_power_of_two() {
        return sylvester(l.trailing_zeros()).ok();
    }
    if let Ok(h) = paley_1(l as u64 - 1) {
        return Some(h);
    }
    if l % 2 == 0 {
        if let Ok(h) = paley_2((l / 2) as u64 - 1) {
            return Some(h);
        }
    }
    let mut d = 2;
    while d * d <= l {
        if l % d == 0 {
            if let (Some(a), Some(b)) = (hadamard_of_order(d), hadamard_of_order(l / d)) {
                if let Ok(h) = a.kronecker(&b) {
                    return Some(h);
                }
            }
        }
        d += 1;
    }
    None
}
