use proptest::prelude::*;
use zesc::combinat::{chromatic_search, max_clique};
use zesc::graphs::{hk_label, make_hk, CayleyZ2, Graph};
use zesc::hadamard::sylvester;
use zesc::polybound::MultilinearPolyZp;
use zesc::relax::walsh::fwht;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| Graph::from_fn(n, |u, v| bits[u.min(v) * n + u.max(v)]))
    })
}

fn brute_clique(g: &Graph) -> usize {
    let n = g.n();
    (0u32..1 << n)
        .filter(|m| {
            let set: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
            g.is_clique(&set)
        })
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn brute_chromatic(g: &Graph) -> usize {
    let n = g.n();
    (1..=n)
        .find(|&c| {
            let total = c.pow(n as u32);
            (0..total).any(|mut code| {
                let colors: Vec<usize> = (0..n)
                    .map(|_| {
                        let x = code % c;
                        code /= c;
                        x
                    })
                    .collect();
                g.is_proper_coloring(&colors)
            })
        })
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_roundtrip_and_complement(g in graph_strategy(14)) {
        prop_assert_eq!(Graph::from_text(&g.to_text()).unwrap(), g.clone());
        let c = g.complement();
        prop_assert_eq!(c.complement(), g.clone());
        let n = g.n();
        prop_assert_eq!(c.edge_count() + g.edge_count(), n * (n - 1) / 2);
        prop_assert!(c.check_invariants());
    }

    #[test]
    fn strong_product_degrees(a in graph_strategy(5), b in graph_strategy(5)) {
        let p = a.strong_product(&b).unwrap();
        for u in 0..a.n() {
            for w in 0..b.n() {
                let want = (a.degree(u) + 1) * (b.degree(w) + 1) - 1;
                prop_assert_eq!(p.degree(u * b.n() + w), want);
            }
        }
    }

    #[test]
    fn exact_clique_matches_brute_force(g in graph_strategy(10)) {
        let r = max_clique(&g, 1_000_000);
        prop_assert!(r.exact);
        prop_assert!(g.is_clique(&r.clique));
        prop_assert_eq!(r.clique.len(), brute_clique(&g));
    }

    #[test]
    fn exact_coloring_matches_brute_force(g in graph_strategy(7)) {
        let r = chromatic_search(&g, 1_000_000);
        prop_assert!(r.exact());
        prop_assert!(g.is_proper_coloring(&r.coloring));
        prop_assert_eq!(r.upper, brute_chromatic(&g));
    }

    #[test]
    fn fwht_is_an_involution_up_to_scale(v in proptest::collection::vec(-100i64..100, 16)) {
        let mut w = v.clone();
        fwht(&mut w);
        fwht(&mut w);
        prop_assert_eq!(w, v.iter().map(|x| x * 16).collect::<Vec<_>>());
    }

    #[test]
    fn cayley_expansion_uses_xor(m in 2u32..6, seed in any::<u64>()) {
        let conn: Vec<u64> = (1..1u64 << m).filter(|s| (seed >> (s % 64)) & 1 == 1).collect();
        let c = CayleyZ2::new(m, conn.clone()).unwrap();
        let g = c.to_graph().unwrap();
        for x in 0..c.order() {
            for y in 0..c.order() {
                prop_assert_eq!(g.has_edge(x, y), conn.contains(&((x ^ y) as u64)));
            }
        }
    }

    #[test]
    fn hk_adjacency_is_hamming_distance(k in prop::sample::select(vec![3usize, 5, 7, 9]), x in any::<u64>(), y in any::<u64>()) {
        let mask = (1u64 << (k - 1)) - 1;
        let (x, y) = (x & mask, y & mask);
        let (a, b) = (hk_label(k, x), hk_label(k, y));
        let dist = a.iter().zip(&b).filter(|(p, q)| p != q).count();
        let g = make_hk(k).unwrap();
        prop_assert_eq!(g.contains(x ^ y), dist == (k + 1) / 2);
    }

    #[test]
    fn polynomial_products_evaluate_pointwise(
        p in prop::sample::select(vec![3u64, 5, 7]),
        ta in proptest::collection::vec((0u64..32, 0u64..7), 0..6),
        tb in proptest::collection::vec((0u64..32, 0u64..7), 0..6),
        point in 0u64..32,
    ) {
        let build = |terms: &[(u64, u64)]| {
            let mut f = MultilinearPolyZp::zero(p, 5).unwrap();
            for &(m, c) in terms {
                f.add_term(m, c % p);
            }
            f
        };
        let (a, b) = (build(&ta), build(&tb));
        let prod = a.mul(&b).unwrap();
        prop_assert_eq!(prod.eval_bits(point), a.eval_bits(point) * b.eval_bits(point) % p);
        let sum = a.add(&b).unwrap();
        prop_assert_eq!(sum.eval_bits(point), (a.eval_bits(point) + b.eval_bits(point)) % p);
    }
}

#[test]
fn kronecker_of_hadamard_matrices_is_hadamard() {
    let a = sylvester(1).unwrap();
    let b = sylvester(2).unwrap();
    let k = a.kronecker(&b).unwrap();
    assert_eq!(k.order(), 8);
    k.verify().unwrap();
}
