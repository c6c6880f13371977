//! Acceptance suite, run without the libtest harness so its report is
//! always printed. Each criterion runs independently and prints one
//! `pass`/`FAIL` line with its wall time; the process exits non-zero if any
//! criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zesc::combinat::{clique_number, explicit_independent_set_hk, hadamard_clique_hk};
use zesc::graphs::{complete_graph, edgeless_graph, hk_graph, make_hk, CayleyZ2, Graph};
use zesc::hadamard::{paley_1, sylvester};
use zesc::lab::{eval_theorem_bounds, reproduce, ReproduceConfig};
use zesc::polybound::{bbr_polynomial, binary_entropy, dimension_bound, rank_certificate, representation_for_hk};
use zesc::qsim::{
    c, chrom_witness_from_flat_rep, hjw_state_and_measurements, hk_clique_lists, min_eig, orth_rep_hk, orthogonality_measurement,
    rsp_batch, simulate_channel_protocol_hk, simulate_source_protocol, verify_chrom_witness, Adversary, CMatrix, CVector, Permutations,
};
use zesc::relax::{
    sandwich_check, theta_cayley_lp, theta_cayley_lp_reduced, theta_sdp, witness_to_theta_plus_certificate, CayleyLpOptions,
    OrbitPartition, SdpOptions, ThetaVariant,
};

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(what: &str, got: f64, want: f64, tol: f64) -> Check {
    ensure((got - want).abs() <= tol, || format!("{what}: got {got}, want {want} ± {tol:e}"))
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> Result<T, String>) -> Result<T, String> {
    let start = Instant::now();
    let out = f()?;
    let el = start.elapsed();
    ensure(el <= limit, || format!("{what} took {el:?}, limit {limit:?}"))?;
    Ok(out)
}

fn s(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn sdp(g: &Graph, v: ThetaVariant) -> Result<f64, String> {
    Ok(theta_sdp(g, v, SdpOptions { tol: 1e-9, max_iter: 200 }).map_err(s)?.lambda)
}

fn c1_theta_solvers() -> Check {
    let sec5 = Duration::from_secs(5);
    let pent = timed(sec5, "C5", || sdp(&Graph::cycle(5).map_err(s)?, ThetaVariant::Theta))?;
    within("theta(C5)", pent, 5f64.sqrt(), 1e-5)?;
    for t in 1..=8 {
        let k = timed(sec5, "K_t", || sdp(&complete_graph(t).map_err(s)?, ThetaVariant::Theta))?;
        within(&format!("theta(K_{t})"), k, 1.0, 1e-7)?;
        let e = timed(sec5, "edgeless", || sdp(&edgeless_graph(t).map_err(s)?, ThetaVariant::Theta))?;
        within(&format!("theta(edgeless_{t})"), e, t as f64, 1e-7)?;
    }
    // LP against SDP on Cayley graphs up to 64 vertices
    let mut graphs = vec![];
    for k in [3, 5, 7] {
        let h = make_hk(k).map_err(s)?;
        graphs.push(h.complement());
        graphs.push(h);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in [2u32, 3, 4, 5] {
        for _ in 0..3 {
            let conn: Vec<u64> = (1..1u64 << m).filter(|_| rng.random_bool(0.4)).collect();
            graphs.push(CayleyZ2::new(m, conn).map_err(s)?);
        }
    }
    for c in &graphs {
        let g = c.to_graph().map_err(s)?;
        for v in [ThetaVariant::Theta, ThetaVariant::ThetaPlus] {
            let lp = theta_cayley_lp(c, v, CayleyLpOptions::default()).map_err(s)?.certificate.lambda;
            let sd = sdp(&g, v)?;
            within(&format!("LP vs SDP ({v:?}, m = {}, |S| = {})", c.m(), c.degree()), lp, sd, 1e-4)?;
        }
    }
    Ok(())
}

fn c2_pincer_k7() -> Check {
    let g = hk_graph(7).map_err(s)?;
    let w = timed(Duration::from_secs(5), "omega(H7)", || Ok(clique_number(&g, 1_000_000)))?;
    ensure(w.is_exact() && w.value == 8, || format!("omega(H7) = {:?}", w))?;
    let wit = chrom_witness_from_flat_rep(&orth_rep_hk(7).map_err(s)?, &g).map_err(s)?;
    ensure(wit.t == 8, || format!("witness t = {}", wit.t))?;
    let rep = verify_chrom_witness(&wit, &g, 1e-9).map_err(s)?;
    ensure(rep.pass, || format!("witness violates {:?}", rep.violated))?;
    let cert = witness_to_theta_plus_certificate(&wit, &g, 1e-9).map_err(s)?;
    within("witness certificate lambda", cert.lambda, 8.0, 1e-6)?;
    let res = cert.verify(&g.complement(), 1e-6).map_err(s)?;
    ensure(res.within(1e-6), || format!("certificate residuals {res:?}"))?;
    let hc = make_hk(7).map_err(s)?.complement();
    for v in [ThetaVariant::Theta, ThetaVariant::ThetaPlus] {
        let lp = theta_cayley_lp(&hc, v, CayleyLpOptions::default()).map_err(s)?.certificate.lambda;
        within(&format!("{v:?}(complement H7) by LP"), lp, 8.0, 1e-4)?;
        within(&format!("{v:?}(complement H7) by SDP"), sdp(&g.complement(), v)?, 8.0, 1e-4)?;
    }
    Ok(())
}

fn c3_multiplicativity() -> Check {
    timed(Duration::from_secs(60), "theta of the square", || {
        let hc = make_hk(7).map_err(s)?.complement();
        let part = OrbitPartition::hk(7).map_err(s)?;
        let one = theta_cayley_lp_reduced(&hc, ThetaVariant::Theta, &part, CayleyLpOptions::default()).map_err(s)?;
        let sq = hc.strong_power(2).map_err(s)?;
        ensure(sq.m() == 12, || format!("square lives in Z_2^{}", sq.m()))?;
        let two = theta_cayley_lp_reduced(&sq, ThetaVariant::Theta, &part.power(2), CayleyLpOptions::default()).map_err(s)?;
        let (a, b) = (one.certificate.lambda, two.certificate.lambda);
        within("theta(square) - theta^2", b, a * a, 1e-3)
    })
}

fn c4_explicit_witnesses() -> Check {
    timed(Duration::from_secs(1), "explicit witnesses", || {
        for k in [7usize, 11] {
            let g = hk_graph(k).map_err(s)?;
            let set: Vec<usize> = explicit_independent_set_hk(k).map_err(s)?.into_iter().map(|v| v as usize).collect();
            ensure(set.len() == 1 << ((k - 3) / 2), || format!("k = {k}: set of size {}", set.len()))?;
            ensure(g.is_independent(&set), || format!("k = {k}: set not independent"))?;
        }
        for (k, h) in [(7usize, sylvester(3).map_err(s)?), (11, paley_1(11).map_err(s)?)] {
            h.verify().map_err(s)?;
            let g = hk_graph(k).map_err(s)?;
            let cl: Vec<usize> = hadamard_clique_hk(&h).map_err(s)?.into_iter().map(|v| v as usize).collect();
            ensure(cl.len() == k + 1 && g.is_clique(&cl), || format!("k = {k}: Hadamard clique of size {} fails", cl.len()))?;
        }
        Ok(())
    })
}

fn c5_rank_bound() -> Check {
    timed(Duration::from_secs(120), "rank bound", || {
        let f = bbr_polynomial(3, 1, 11, 0).map_err(s)?;
        for x in 0u64..1 << 11 {
            let want = u64::from(x.count_ones() % 3 == 0);
            ensure(f.eval_bits(x) == want, || format!("indicator wrong at {x:011b}"))?;
        }
        let g = hk_graph(11).map_err(s)?;
        let rep = representation_for_hk(11, 3, 1).map_err(s)?;
        let pairs = rep.verify(&g, 10_000, 0).map_err(s)?;
        ensure(pairs >= 10_000, || format!("only {pairs} off-diagonal pairs checked"))?;
        let set: Vec<usize> = explicit_independent_set_hk(11).map_err(s)?.into_iter().map(|v| v as usize).collect();
        let cert = rank_certificate(&rep, &g, &[set.clone()], Some(1)).map_err(s)?;
        // 1 + 11 + 55
        ensure(cert.rank <= 67 && cert.dimension == 67, || format!("rank {} with D = {}", cert.rank, cert.dimension))?;
        ensure(set.len() == 16 && g.is_independent(&set) && cert.alpha_upper <= 67, || {
            format!("bracket [{}, {}]", set.len(), cert.alpha_upper)
        })
    })
}

fn c6_entropy() -> Check {
    let d = dimension_bound(11, 3, 1).map_err(s)?;
    let x: f64 = 3.0 / 11.0;
    let h = -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
    within("H(3/11)", binary_entropy(x), h, 1e-12)?;
    let ent = 2f64.powf(11.0 * h);
    let cap = 2f64.powf(0.846 * 11.0);
    ensure(d.dimension == 67 && 67.0 <= ent && ent < cap && d.holds, || format!("67 <= {ent} < {cap} fails ({d:?})"))?;
    within("entropy side", d.entropy_value, ent, 1e-9)?;
    within("cap", d.cap, cap, 1e-9)
}

fn c7_rsp() -> Check {
    timed(Duration::from_secs(30), "RSP", || {
        for d in [2, 4, 8, 12] {
            let b = rsp_batch(d, 100, 7).map_err(s)?;
            ensure(b.trials == 100 && b.max_trace_distance <= 1e-9 && b.max_probability_error <= 1e-9, || format!("{b:?}"))?;
        }
        Ok(())
    })
}

fn c8_source_protocol() -> Check {
    timed(Duration::from_secs(120), "source protocol", || {
        let (g, lists) = hk_clique_lists(7, Permutations::All, 5, 0).map_err(s)?;
        let w = chrom_witness_from_flat_rep(&orth_rep_hk(7).map_err(s)?, &g).map_err(s)?;
        let r = simulate_source_protocol(&g, &w, &lists, 0, 1e-9).map_err(s)?;
        ensure(r.t == 8 && r.inputs == 64 && r.cases_run >= 64 * 6, || format!("t {} inputs {} cases {}", r.t, r.inputs, r.cases_run))?;
        ensure(r.pass && r.worst_residual <= 1e-9, || format!("worst residual {:e}, failures {:?}", r.worst_residual, r.failures))
    })
}

fn c9_channel_protocol() -> Check {
    timed(Duration::from_secs(300), "channel protocol", || {
        let r = simulate_channel_protocol_hk(11, 1, 4, 100, 0).map_err(s)?;
        ensure(r.messages == 1024 && r.channel_uses == 2, || format!("{} messages over {} uses", r.messages, r.channel_uses))?;
        let random = r.adversaries.iter().filter(|a| matches!(a, Adversary::Random(_))).count();
        ensure(r.adversaries.contains(&Adversary::MaxIndex) && random == 100, || format!("adversaries {:?}", r.adversaries.len()))?;
        within("rate", r.rate, 10.0 / 2.0, 1e-12)?;
        ensure(r.pass && r.failures.is_empty(), || format!("failures {:?}", r.failures))
    })
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let a = CMatrix::from_fn(d, d, |_, _| c(gaussian(rng), gaussian(rng)));
    a.qr().q()
}

fn from_columns(u: &CMatrix, cols: &[usize], rng: &mut ChaCha8Rng) -> CMatrix {
    let d = u.nrows();
    let mut rho = CMatrix::zeros(d, d);
    for &j in cols {
        let v: CVector = u.column(j).into();
        rho += &v * v.adjoint() * c(rng.random_range(0.1..1.0), 0.0);
    }
    let tr = rho.trace();
    rho / tr
}

fn c10_measurement_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for inst in 0..200 {
        let d = rng.random_range(2..=8);
        let u = random_unitary(d, &mut rng);
        let parts = rng.random_range(2..=d);
        let cuts: Vec<usize> = (0..d).map(|j| if j < parts { j } else { rng.random_range(0..parts) }).collect();
        let states: Vec<CMatrix> =
            (0..parts).map(|p| from_columns(&u, &(0..d).filter(|&j| cuts[j] == p).collect::<Vec<_>>(), &mut rng)).collect();
        let m = orthogonality_measurement(&states, 1e-9).map_err(|e| format!("instance {inst}: {e}"))?;
        ensure(m.completeness <= 1e-9 && m.trace_residual <= 1e-9, || {
            format!("instance {inst}: completeness {:e}, trace {:e}", m.completeness, m.trace_residual)
        })?;
        // overlapping supports must be rejected
        let mut bad = states.clone();
        bad[1] = (&bad[1] + &states[0] * c(0.01, 0.0)) / c(1.01, 0.0);
        ensure(orthogonality_measurement(&bad, 1e-9).is_err(), || format!("instance {inst}: overlap accepted"))?;
    }
    for inst in 0..200 {
        let d = rng.random_range(1..=8);
        let n = rng.random_range(1..=4);
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let ensemble: Vec<(f64, CMatrix)> = weights
            .iter()
            .map(|w| {
                let u = random_unitary(d, &mut rng);
                let r = rng.random_range(1..=d);
                (w / total, from_columns(&u, &(0..r).collect::<Vec<_>>(), &mut rng))
            })
            .collect();
        let h = hjw_state_and_measurements(&ensemble, 1e-9).map_err(|e| format!("instance {inst}: {e}"))?;
        let psd = h.measurements.iter().map(min_eig).fold(f64::INFINITY, f64::min);
        ensure(h.completeness <= 1e-9 && h.steering <= 1e-9 && psd >= -1e-9, || {
            format!("instance {inst}: completeness {:e}, steering {:e}, min eig {psd:e}", h.completeness, h.steering)
        })?;
        let mut heavy = ensemble.clone();
        heavy[0].0 += 0.1;
        ensure(hjw_state_and_measurements(&heavy, 1e-9).is_err(), || format!("instance {inst}: bad weights accepted"))?;
        let mut skew = ensemble.clone();
        skew[0].1[(0, d - 1)] += c(0.0, 0.5);
        if d > 1 {
            ensure(hjw_state_and_measurements(&skew, 1e-9).is_err(), || format!("instance {inst}: non-Hermitian state accepted"))?;
        }
    }
    Ok(())
}

fn c11_sandwich() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut graphs: Vec<Graph> = (0..50)
        .map(|_| {
            let n = rng.random_range(1..=12);
            let p = rng.random_range(0.1..0.9);
            Graph::from_fn(n, |_, _| rng.random_bool(p))
        })
        .collect();
    graphs.push(hk_graph(3).map_err(s)?);
    graphs.push(hk_graph(7).map_err(s)?);
    for (i, g) in graphs.iter().enumerate() {
        let r = sandwich_check(g, 1_000_000, 1e-4).map_err(s)?;
        ensure(r.holds && r.alpha_exact && r.chi_complement_exact, || format!("graph {i}: {r:?}"))?;
    }
    Ok(())
}

fn c12_formulas() -> Check {
    let r = eval_theorem_bounds(11);
    let k = 11f64;
    let lg = 12f64.log2();
    let cs = (k - 1.0) * (1.0 - 2.0 * lg / (k - 3.0));
    let expected = [
        ("R-lower", 0.154 * k - 1.0, 0.694),
        ("R*-upper", lg, 3.58496),
        ("c-upper", 0.846 * k, 9.306),
        ("c*-lower", cs, 1.0376),
        ("eta*-upper", lg / cs, 3.4551),
        ("eta-lower", (0.154 * k - 1.0) / (k - 1.0 - lg), 0.10819),
    ];
    for (name, oracle, printed) in expected {
        let v = r.applicable_value(name).ok_or_else(|| format!("{name} not applicable at k = 11"))?;
        within(name, v, oracle, 1e-3)?;
        within(&format!("{name} printed"), v, printed, 1e-3)?;
    }
    let rep = reproduce(7, &ReproduceConfig { simulations: false, ..Default::default() }).map_err(s)?;
    ensure(rep.notes.iter().any(|n| n.contains("asymptotic")), || format!("notes {:?}", rep.notes))
}

fn c13_determinism() -> Check {
    let config = ReproduceConfig::default();
    let a = reproduce(7, &config).map_err(s)?.to_json().map_err(s)?;
    let b = reproduce(7, &config).map_err(s)?.to_json().map_err(s)?;
    ensure(a == b, || "reports differ".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 13] = [
        ("theta solvers", c1_theta_solvers),
        ("pincer at k = 7", c2_pincer_k7),
        ("multiplicativity", c3_multiplicativity),
        ("explicit witnesses", c4_explicit_witnesses),
        ("rank bound at k = 11", c5_rank_bound),
        ("entropy comparison", c6_entropy),
        ("remote state preparation", c7_rsp),
        ("source protocol", c8_source_protocol),
        ("channel protocol", c9_channel_protocol),
        ("orthogonality and HJW suites", c10_measurement_suites),
        ("sandwich suite", c11_sandwich),
        ("formula evaluation", c12_formulas),
        ("determinism", c13_determinism),
    ];
    let mut failed = vec![];
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = f();
        let el = start.elapsed().as_secs_f64();
        match &r {
            Ok(()) => println!("criterion {:>2} {name:<30} pass ({el:.2} s)", i + 1),
            Err(e) => {
                println!("criterion {:>2} {name:<30} FAIL ({el:.2} s): {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
