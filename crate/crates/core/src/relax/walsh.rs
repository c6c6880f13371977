//! Walsh-Hadamard transform over `Z_2^m`.
//!
//! A matrix `Z(u, v) = z(u ⊕ v)` is diagonalized by the characters of
//! `Z_2^m`, with eigenvalues `ẑ(χ) = Σ_s (-1)^{χ·s} z(s)`.

use std::ops::{Add, Sub};

/// In-place unnormalized transform; applying it twice multiplies by `2^m`.
pub fn fwht<T: Clone + Add<Output = T> + Sub<Output = T>>(a: &mut [T]) {
    let n = a.len();
    assert!(n.is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (a[j].clone(), a[j + h].clone());
                a[j] = x.clone() + y.clone();
                a[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Character value `(-1)^{popcount(χ & s)}`.
#[inline]
pub fn character(chi: u64, s: u64) -> i64 {
    if (chi & s).count_ones() & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Spectrum of the group-invariant matrix with first row `z`.
pub fn spectrum(z: &[f64]) -> Vec<f64> {
    let mut a = z.to_vec();
    fwht(&mut a);
    a
}
