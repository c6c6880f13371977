use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::measure::{hjw_state_and_measurements, orthogonality_measurement, rsp_correction, rsp_protocol, OrthMeasurement};
use super::ops::{c, partial_trace, Side};
use super::witness::{orth_rep_hk, verify_chrom_witness, ChromWitness, OrthRep, WitnessReport};
use crate::combinat::{explicit_independent_set_hk, hadamard_clique_hk};
use crate::error::{invalid, Error, Result};
use crate::graphs::{hk_graph, hk_label, hk_vertex, Graph};
use crate::hadamard::hadamard_of_order;
use crate::linalg::{CMatrix, CVector};

/// Success probability treated as certain.
pub const ZERO_ERROR_SLACK: f64 = 1e-9;

/// Largest message set a channel simulation will enumerate.
pub const MAX_MESSAGES: usize = 1 << 22;

/// Per-vertex lists of cliques containing that vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct CliqueLists {
    pub lists: Vec<Vec<Vec<usize>>>,
}

impl CliqueLists {
    /// Checks that every listed set is a clique containing its vertex.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.lists.len() != g.n() {
            return Err(Error::Shape(format!("{} lists for {} vertices", self.lists.len(), g.n())));
        }
        for (x, l) in self.lists.iter().enumerate() {
            if l.is_empty() {
                return Err(invalid(format!("no clique offered for vertex {x}")));
            }
            for cl in l {
                if !cl.contains(&x) || cl.iter().any(|&y| y >= g.n()) || !g.is_clique(cl) {
                    return Err(invalid(format!("oracle set {cl:?} is not a clique containing {x}")));
                }
            }
        }
        Ok(())
    }
}

/// Greedy maximal clique through `x`, adding uniformly random common neighbours.
pub fn random_maximal_clique(g: &Graph, x: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut clique = vec![x];
    let mut cand = g.neighbors(x).clone();
    while !cand.is_empty() {
        let pool: Vec<usize> = cand.iter().collect();
        let y = pool[rng.random_range(0..pool.len())];
        clique.push(y);
        cand.intersect_with(g.neighbors(y));
    }
    clique.sort_unstable();
    clique
}

fn permute_vertex(k: usize, perm: &[usize], v: u64) -> u64 {
    let label = hk_label(k, v);
    let mut out = vec![b'0'; k];
    for (i, &b) in label.iter().enumerate() {
        out[perm[i]] = b;
    }
    hk_vertex(&out).expect("permutation keeps the weight even")
}

/// Which coordinate permutations are applied to the base Hadamard clique.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Permutations {
    /// All `k!` permutations.
    All,
    /// Identity plus this many seeded random permutations.
    Random(usize),
}

/// Cliques of `H_k` containing each vertex: translates `x ⊕ c ⊕ π(K)`
/// (`c ∈ π(K)`) of the Hadamard clique `K` under the chosen permutations,
/// followed by `extra` random maximal cliques per vertex.
pub fn hk_clique_lists(k: usize, perms: Permutations, extra: usize, seed: u64) -> Result<(Graph, CliqueLists)> {
    let g = hk_graph(k)?;
    let h = hadamard_of_order(k + 1).ok_or_else(|| Error::Precondition(format!("no Hadamard matrix of order {}", k + 1)))?;
    let base = hadamard_clique_hk(&h)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm_list: Vec<Vec<usize>> = vec![];
    match perms {
        Permutations::All => {
            if k > 8 {
                return Err(Error::TooLarge(format!("{k}! permutations")));
            }
            let mut p: Vec<usize> = (0..k).collect();
            loop {
                perm_list.push(p.clone());
                if !crate::graphs::next_permutation(&mut p) {
                    break;
                }
            }
        }
        Permutations::Random(r) => {
            perm_list.push((0..k).collect());
            for _ in 0..r {
                let mut p: Vec<usize> = (0..k).collect();
                for i in (1..k).rev() {
                    p.swap(i, rng.random_range(0..=i));
                }
                perm_list.push(p);
            }
        }
    }
    // images through 0 (each contains 0 since the base does)
    let mut images: Vec<Vec<u64>> = perm_list
        .iter()
        .map(|p| {
            let mut s: Vec<u64> = base.iter().map(|&v| permute_vertex(k, p, v)).collect();
            s.sort_unstable();
            s
        })
        .collect();
    images.sort();
    images.dedup();
    let n = g.n();
    let mut lists = Vec::with_capacity(n);
    for x in 0..n as u64 {
        let mut l: Vec<Vec<usize>> = vec![];
        for img in &images {
            for &cst in img {
                let mut cl: Vec<usize> = img.iter().map(|&v| (x ^ cst ^ v) as usize).collect();
                cl.sort_unstable();
                l.push(cl);
            }
        }
        l.sort();
        l.dedup();
        for _ in 0..extra {
            l.push(random_maximal_clique(&g, x as usize, &mut rng));
        }
        lists.push(l);
    }
    let lists = CliqueLists { lists };
    lists.validate(&g)?;
    Ok((g, lists))
}

/// A case that did not decode with certainty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimFailure {
    pub input: Vec<usize>,
    pub clique: Vec<usize>,
    pub outcome: usize,
    pub success: f64,
    pub detail: String,
}

/// Outcome of the source-coding simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SourceReport {
    pub t: usize,
    pub d: usize,
    pub inputs: usize,
    pub cliques: usize,
    pub cases_run: usize,
    /// `1 − min success probability`.
    pub worst_residual: f64,
    pub witness: WitnessReport,
    pub seed: u64,
    pub failures: Vec<SimFailure>,
    pub pass: bool,
}

const MAX_FAILURES: usize = 20;

/// Entanglement-assisted source coding with `t` messages: Alice steers Bob's
/// half of a purification of `ρ` into `ρ_x^i / p_x^i` by the HJW measurement
/// for her input `x`, sends the outcome `i`, and Bob, knowing a clique
/// `C ∋ x`, separates `{ρ_y^i : y ∈ C}` by the orthogonality measurement.
/// Runs every input, every offered clique and every outcome of positive
/// probability.
pub fn simulate_source_protocol(g: &Graph, w: &ChromWitness, oracle: &CliqueLists, seed: u64, tol: f64) -> Result<SourceReport> {
    let witness = verify_chrom_witness(w, g, tol)?;
    oracle.validate(g)?;
    let d = w.d;
    let mut cache: HashMap<(Vec<usize>, usize), std::result::Result<OrthMeasurement, Error>> = HashMap::new();
    let mut failures = vec![];
    let mut worst = 1f64;
    let mut cases = 0;
    let mut distinct = std::collections::BTreeSet::new();
    let shared = hjw_state_and_measurements(&[(1.0, w.rho.clone())], 1e-6)?.sigma;
    for x in 0..g.n() {
        let probs: Vec<f64> = (0..w.t).map(|i| w.get(x, i).trace().re).collect();
        let live: Vec<usize> = (0..w.t).filter(|&i| probs[i] > ZERO_ERROR_SLACK).collect();
        let ensemble: Vec<(f64, CMatrix)> = live.iter().map(|&i| (probs[i], w.get(x, i) / c(probs[i], 0.0))).collect();
        let total: f64 = ensemble.iter().map(|e| e.0).sum();
        let ensemble: Vec<(f64, CMatrix)> = ensemble.into_iter().map(|(p, r)| (p / total, r)).collect();
        let hjw = hjw_state_and_measurements(&ensemble, 1e-6)?;
        // the entangled state is prepared before x is known
        let drift = super::ops::frobenius(&(&hjw.sigma - &shared));
        if drift > 1e-6 && failures.len() < MAX_FAILURES {
            failures.push(SimFailure { input: vec![x], clique: vec![], outcome: 0, success: 0.0, detail: format!("shared state depends on the input ({drift:.3e})") });
        }
        let bob_states: Vec<CMatrix> = hjw
            .measurements
            .iter()
            .zip(&ensemble)
            .map(|(a, (p, _))| {
                let b = partial_trace(&(a.kronecker(&CMatrix::identity(d, d)) * &hjw.sigma), d, d, Side::A).expect("square");
                b / c(*p, 0.0)
            })
            .collect();
        for clique in &oracle.lists[x] {
            distinct.insert(clique.clone());
            let pos = clique.iter().position(|&y| y == x).expect("validated");
            for (slot, &i) in live.iter().enumerate() {
                cases += 1;
                let m = cache
                    .entry((clique.clone(), i))
                    .or_insert_with(|| {
                        let states: Vec<CMatrix> = clique.iter().map(|&y| w.get(y, i).clone()).collect();
                        orthogonality_measurement(&states, tol.max(1e-12))
                    })
                    .clone();
                let (success, detail) = match m {
                    Ok(m) => ((&m.projectors[pos] * &bob_states[slot]).trace().re, String::new()),
                    Err(e) => (0.0, e.to_string()),
                };
                worst = worst.min(success);
                if success < 1.0 - ZERO_ERROR_SLACK && failures.len() < MAX_FAILURES {
                    failures.push(SimFailure { input: vec![x], clique: clique.clone(), outcome: i, success, detail });
                }
            }
        }
    }
    let pass = witness.pass && failures.is_empty();
    Ok(SourceReport {
        t: w.t,
        d,
        inputs: g.n(),
        cliques: distinct.len(),
        cases_run: cases,
        worst_residual: (1.0 - worst).max(0.0),
        witness,
        seed,
        failures,
        pass,
    })
}

/// How the channel picks the clique delivered to Bob.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adversary {
    /// Always the last clique offered for the input.
    MaxIndex,
    /// Uniform choice from a generator seeded with this value.
    Random(u64),
}

/// Data fixed before any message is sent.
pub struct ChannelSetup<'a> {
    pub graph: &'a Graph,
    pub rep: &'a OrthRep,
    /// Independent set carrying the preparation outcomes on the last use.
    pub code: &'a [usize],
    pub cliques: &'a CliqueLists,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ChannelReport {
    pub vertices: usize,
    pub t: usize,
    pub d: usize,
    pub messages: usize,
    pub channel_uses: usize,
    pub code_size: usize,
    pub adversaries: Vec<Adversary>,
    pub cases_run: usize,
    pub worst_residual: f64,
    /// `t log|V| / (t + 1)` bits per use.
    pub rate: f64,
    pub seed: u64,
    pub failures: Vec<SimFailure>,
    pub pass: bool,
}

/// Zero-error transmission of `|V|^t` messages in `t + 1` uses: each symbol
/// crosses the channel, which hands Bob a clique containing it; Alice then
/// remotely prepares `f(x_j) f(x_j)* / d` for every symbol and sends the
/// `d^t` outcome tuple as one codeword of an independent set on the last
/// use; Bob corrects phases and separates the states of each clique.
pub fn simulate_channel_protocol(setup: &ChannelSetup<'_>, t: usize, adversaries: &[Adversary], seed: u64) -> Result<ChannelReport> {
    let g = setup.graph;
    let f = setup.rep;
    let d = f.d;
    if t == 0 {
        return Err(Error::Precondition("t must be at least 1".into()));
    }
    if !f.flat {
        return Err(Error::Precondition("representation is not flat".into()));
    }
    f.verify(g, 1e-9)?;
    setup.cliques.validate(g)?;
    let outcomes = d.checked_pow(t as u32).ok_or_else(|| Error::Precondition("d^t overflows".into()))?;
    if setup.code.len() < outcomes {
        return Err(Error::Precondition(format!(
            "independent set of size {} is smaller than d^t = {outcomes}, so t exceeds log α / log d on the certified set",
            setup.code.len()
        )));
    }
    if !g.is_independent(setup.code) || setup.code.iter().any(|&v| v >= g.n()) {
        return Err(invalid("code is not an independent set"));
    }
    let n = g.n();
    let messages = n.checked_pow(t as u32).filter(|&m| m <= MAX_MESSAGES).ok_or_else(|| Error::TooLarge(format!("{n}^{t} messages")))?;

    // states, preparation records and decoders depend only on the vertex
    let states: Vec<CMatrix> = f.vectors.iter().map(|v| (v * v.adjoint()) / c(v.norm_squared(), 0.0)).collect();
    let rsp: Vec<Vec<CMatrix>> = f
        .vectors
        .iter()
        .map(|v| {
            let u: CVector = v / c(v.norm(), 0.0);
            rsp_protocol(&u).map(|r| r.outcomes.into_iter().map(|o| o.received).collect())
        })
        .collect::<Result<_>>()?;
    let corrections: Vec<Vec<f64>> = (0..d).map(|l| (0..d).map(|a| rsp_correction(d, l)[(a, a)].arg()).collect()).collect();
    let mut code_of = vec![usize::MAX; n];
    for (idx, &v) in setup.code.iter().enumerate() {
        code_of[v] = idx;
    }
    let mut decoders: HashMap<Vec<usize>, std::result::Result<OrthMeasurement, Error>> = HashMap::new();

    let mut failures = vec![];
    let mut worst = 1f64;
    let mut cases = 0usize;
    for adv in adversaries {
        let mut rng = ChaCha8Rng::seed_from_u64(match adv {
            Adversary::Random(s) => *s,
            Adversary::MaxIndex => 0,
        });
        let mut pick = |x: usize| -> Vec<usize> {
            let l = &setup.cliques.lists[x];
            match adv {
                Adversary::MaxIndex => l[l.len() - 1].clone(),
                Adversary::Random(_) => l[rng.random_range(0..l.len())].clone(),
            }
        };
        for msg in 0..messages {
            let xs: Vec<usize> = (0..t).map(|j| msg / n.pow(j as u32) % n).collect();
            let seen: Vec<Vec<usize>> = xs.iter().map(|&x| pick(x)).collect();
            for outcome in 0..outcomes {
                cases += 1;
                let ls: Vec<usize> = (0..t).map(|j| outcome / d.pow(j as u32) % d).collect();
                let word = pick(setup.code[outcome]);
                let hits: Vec<usize> = word.iter().filter(|&&v| code_of[v] != usize::MAX).map(|&v| code_of[v]).collect();
                let mut success = 1.0;
                let mut detail = String::new();
                if hits.len() != 1 {
                    success = 0.0;
                    detail = format!("last use delivered {} codewords", hits.len());
                } else {
                    let decoded = hits[0];
                    for j in 0..t {
                        let lj = decoded / d.pow(j as u32) % d;
                        let rec = &rsp[xs[j]][ls[j]];
                        let ph = &corrections[lj];
                        let bob = CMatrix::from_fn(d, d, |a, b| rec[(a, b)] * num_complex::Complex::from_polar(1.0, ph[a] - ph[b]));
                        let m = decoders
                            .entry(seen[j].clone())
                            .or_insert_with(|| {
                                let st: Vec<CMatrix> = seen[j].iter().map(|&y| states[y].clone()).collect();
                                orthogonality_measurement(&st, 1e-9)
                            })
                            .clone();
                        match m {
                            Ok(m) => {
                                let pos = seen[j].iter().position(|&y| y == xs[j]).expect("validated");
                                success *= (&m.projectors[pos] * bob).trace().re;
                            }
                            Err(e) => {
                                success = 0.0;
                                detail = e.to_string();
                            }
                        }
                    }
                }
                worst = worst.min(success);
                if success < 1.0 - ZERO_ERROR_SLACK && failures.len() < MAX_FAILURES {
                    failures.push(SimFailure { input: xs.clone(), clique: seen[0].clone(), outcome, success, detail });
                }
            }
        }
    }
    let rate = t as f64 * (n as f64).log2() / (t + 1) as f64;
    Ok(ChannelReport {
        vertices: n,
        t,
        d,
        messages,
        channel_uses: t + 1,
        code_size: setup.code.len(),
        adversaries: adversaries.to_vec(),
        cases_run: cases,
        worst_residual: (1.0 - worst).max(0.0),
        rate,
        seed,
        failures: failures.clone(),
        pass: failures.is_empty(),
    })
}

/// Channel simulation on `H_k` with the sign representation, the explicit
/// independent set as code, Hadamard cliques under `perms` random coordinate
/// permutations, the max-index adversary and `random` seeded adversaries.
pub fn simulate_channel_protocol_hk(k: usize, t: usize, perms: usize, random: usize, seed: u64) -> Result<ChannelReport> {
    let rep = orth_rep_hk(k)?;
    let code: Vec<usize> = explicit_independent_set_hk(k)?.into_iter().map(|v| v as usize).collect();
    let d = rep.d;
    if d.checked_pow(t as u32).is_none_or(|p| code.len() < p) {
        return Err(Error::Precondition(format!("independent set of size {} < {d}^{t}", code.len())));
    }
    let (g, cliques) = hk_clique_lists(k, Permutations::Random(perms), 0, seed)?;
    let mut advs = vec![Adversary::MaxIndex];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    advs.extend((0..random).map(|_| Adversary::Random(rng.random())));
    simulate_channel_protocol(&ChannelSetup { graph: &g, rep: &rep, code: &code, cliques: &cliques }, t, &advs, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::witness::chrom_witness_from_coloring;

    fn c5_cliques() -> (Graph, CliqueLists) {
        let g = Graph::cycle(5).unwrap();
        let lists = (0..5).map(|x| vec![{ let mut e = vec![x, (x + 1) % 5]; e.sort(); e }, { let mut e = vec![x, (x + 4) % 5]; e.sort(); e }]).collect();
        (g, CliqueLists { lists })
    }

    #[test]
    fn source_c5_scalar() {
        let (g, cl) = c5_cliques();
        let w = chrom_witness_from_coloring(&g, &[0, 1, 0, 1, 2]).unwrap();
        let r = simulate_source_protocol(&g, &w, &cl, 0, 1e-9).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.cases_run, 10);
    }

    #[test]
    fn source_corrupted_witness_pinpointed() {
        let (g, cl) = c5_cliques();
        let mut w = chrom_witness_from_coloring(&g, &[0, 1, 0, 1, 2]).unwrap();
        // vertex 1 moves to colour 0, clashing with its neighbours 0 and 2
        w.family[3] = CMatrix::from_element(1, 1, c(1.0, 0.0));
        w.family[4] = CMatrix::zeros(1, 1);
        let r = simulate_source_protocol(&g, &w, &cl, 0, 1e-9).unwrap();
        assert!(!r.pass);
        let f = &r.failures[0];
        assert_eq!(f.outcome, 0);
        assert!(f.clique.contains(&1));
        assert!(f.detail.contains("non-orthogonal"));
    }

    #[test]
    fn h7_clique_images() {
        let (g, cl) = hk_clique_lists(7, Permutations::All, 0, 1).unwrap();
        assert!(cl.lists.iter().all(|l| l.len() == 30));
        assert!(cl.lists[5].iter().all(|c| c.len() == 8 && g.is_clique(c)));
    }

    #[test]
    fn oracle_must_return_cliques() {
        let g = Graph::cycle(5).unwrap();
        let w = chrom_witness_from_coloring(&g, &[0, 1, 0, 1, 2]).unwrap();
        let bad = CliqueLists { lists: (0..5).map(|x| vec![vec![x, (x + 2) % 5]]).collect() };
        assert!(simulate_source_protocol(&g, &w, &bad, 0, 1e-9).is_err());
    }

    #[test]
    fn channel_preconditions() {
        assert!(matches!(simulate_channel_protocol_hk(3, 1, 0, 0, 0), Err(Error::Precondition(_))));
        assert!(matches!(simulate_channel_protocol_hk(11, 2, 0, 0, 0), Err(Error::Precondition(_))));
        assert!(matches!(simulate_channel_protocol_hk(11, 0, 0, 0, 0), Err(Error::Precondition(_))));
    }
}
