use crate::error::{invalid, Error, Result};
use crate::graphs::{hk_vertex, make_hk};
use crate::hadamard::HadamardMatrix;

/// Even-weight strings supported on the first `(k-1)/2` coordinates; an
/// independent set of `H_k` of size `2^((k-3)/2)`.
pub fn explicit_independent_set_hk(k: usize) -> Result<Vec<u64>> {
    let hk = make_hk(k)?;
    let free = (k - 1) / 2;
    let set: Vec<u64> = (0u64..1 << free).filter(|x| x.count_ones() % 2 == 0).collect();
    for (i, &u) in set.iter().enumerate() {
        for &v in &set[i + 1..] {
            if hk.contains(u ^ v) {
                return Err(Error::Verification(format!("vertices {u} and {v} are adjacent")));
            }
        }
    }
    Ok(set)
}

/// Clique of size `k+1` in `H_k` read off a Hadamard matrix of order `k+1`.
///
/// The matrix is normalized, its first column dropped, and each remaining
/// `±1` row read as a `k`-bit string with `-1` as bit one. Rows of a
/// normalized Hadamard matrix have pairwise inner product `-1` after the drop,
/// which is exactly adjacency in `H_k`. Row 0 becomes the zero vertex.
pub fn hadamard_clique_hk(a: &HadamardMatrix) -> Result<Vec<u64>> {
    a.verify()?;
    let l = a.order();
    if l < 4 || l % 2 != 0 {
        return Err(invalid(format!("order {l} does not correspond to an odd k >= 3")));
    }
    let k = l - 1;
    let hk = make_hk(k)?;
    let n = a.normalize();
    let clique = (0..l)
        .map(|i| {
            let label: Vec<u8> = (1..l).map(|j| if n.entry(i, j) == 1 { b'0' } else { b'1' }).collect();
            hk_vertex(&label)
        })
        .collect::<Result<Vec<u64>>>()?;
    for (i, &u) in clique.iter().enumerate() {
        for &v in &clique[i + 1..] {
            if !hk.contains(u ^ v) {
                return Err(Error::Verification(format!("rows give non-adjacent vertices {u} and {v}")));
            }
        }
    }
    Ok(clique)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::hk_label;
    use crate::hadamard::{paley_1, sylvester};

    #[test]
    fn independent_set_k7() {
        let s = explicit_independent_set_hk(7).unwrap();
        let labels: Vec<String> = s.iter().map(|&x| String::from_utf8(hk_label(7, x)).unwrap()).collect();
        assert_eq!(labels, ["0000000", "1100000", "1010000", "0110000"]);
        assert_eq!(explicit_independent_set_hk(11).unwrap().len(), 16);
        assert_eq!(explicit_independent_set_hk(5).unwrap().len(), 2);
    }

    #[test]
    fn hadamard_cliques() {
        let c = hadamard_clique_hk(&sylvester(3).unwrap()).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c[0], 0);
        assert_eq!(hadamard_clique_hk(&paley_1(11).unwrap()).unwrap().len(), 12);
        let mut c3 = hadamard_clique_hk(&sylvester(2).unwrap()).unwrap();
        c3.sort_unstable();
        assert_eq!(c3, vec![0, 1, 2, 3]);
        assert!(hadamard_clique_hk(&sylvester(1).unwrap()).is_err());
    }
}
