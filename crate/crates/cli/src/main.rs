//! `zesc`: command-line front end for the laboratory.
//!
//! Exit codes: 0 on success, 1 when an audit or verification fails, 2 on
//! a stage error or bad input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use zesc::combinat::{chromatic_number, clique_number, independence_number, ParamResult};
use zesc::graphs::{make_hk, CayleyZ2, Graph};
use zesc::hadamard::hadamard_of_order;
use zesc::lab::{consistency_audit, render_table, reproduce, verify_artifacts, BoundsReport, ReproduceConfig};
use zesc::polybound::{dimension_bound, rank_certificate, representation_for_hk};
use zesc::qsim::{rsp_batch, simulate_channel_protocol_hk};
use zesc::relax::{
    theta_cayley_lp, theta_cayley_lp_reduced, theta_sdp, CayleyLpOptions, OrbitPartition, SdpOptions, ThetaCertificate, ThetaVariant,
};

#[derive(Parser)]
#[command(name = "zesc", version, about = "Zero-error source and channel coding laboratory")]
struct Cli {
    /// Numerical tolerance for solvers and verifiers.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Node budget for exact combinatorial searches.
    #[arg(long, global = true, default_value_t = 100_000)]
    budget: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,
    /// Emit a plain-text table.
    #[arg(long, global = true)]
    table: bool,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Iteration cap for the interior-point SDP.
    #[arg(long, global = true, default_value_t = 200)]
    max_iter: usize,
    #[command(subcommand)]
    command: Command,
}

/// A graph given either as `H_k` (optionally complemented and powered) or
/// as a file in the `p`/`e` text format.
#[derive(Args, Clone)]
struct GraphArg {
    #[arg(long, conflicts_with = "graph")]
    k: Option<usize>,
    /// Use the complement.
    #[arg(long)]
    complement: bool,
    /// Strong power of the graph.
    #[arg(long, default_value_t = 1)]
    power: usize,
    /// Text file with a `p <n>` header and `e <u> <v>` lines.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Summary or text serialization of a graph.
    Graph {
        #[command(flatten)]
        g: GraphArg,
        /// Print the edge list in the text format.
        #[arg(long)]
        edges: bool,
    },
    /// Exact α, ω and χ under the node budget.
    Params {
        #[command(flatten)]
        g: GraphArg,
    },
    /// Construct and verify a Hadamard matrix of the given order.
    Hadamard {
        #[arg(long)]
        order: usize,
    },
    /// Lovász θ or Szegedy θ+ with a certificate.
    Theta {
        #[command(flatten)]
        g: GraphArg,
        /// Compute θ+ instead of θ.
        #[arg(long)]
        plus: bool,
        /// Force the dense SDP even for Cayley graphs.
        #[arg(long)]
        sdp: bool,
    },
    /// Dimension bound and rank certificate for `k = 4 p^l − 1`.
    Polybound {
        #[arg(long)]
        k: usize,
    },
    /// Protocol simulations.
    Qsim {
        #[command(subcommand)]
        what: Qsim,
    },
    /// Reproducibility report for `H_k`.
    Report {
        #[arg(long)]
        k: usize,
        /// Skip the protocol simulations.
        #[arg(long)]
        no_sim: bool,
    },
    /// Audit a report file and re-verify its artifacts.
    Audit { file: PathBuf },
}

#[derive(Subcommand)]
enum Qsim {
    /// Remote state preparation on random flat vectors.
    Rsp {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Zero-error source protocol on `H_k` (the report pipeline stage).
    Source {
        #[arg(long)]
        k: usize,
    },
    /// Zero-error channel protocol on `H_k`.
    Channel {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 100)]
        adversaries: usize,
        #[arg(long, default_value_t = 4)]
        permutations: usize,
    },
}

/// Result of a command: output value and exit code.
struct Output {
    json: String,
    table: String,
    code: u8,
}

fn fail(msg: impl std::fmt::Display) -> String {
    msg.to_string()
}

fn pretty<T: serde::Serialize + ?Sized>(v: &T) -> Result<String, String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(fail)
}

type CmdResult = Result<Output, String>;

enum Resolved {
    Cayley(CayleyZ2, Option<OrbitPartition>),
    Dense(Graph),
}

fn resolve(g: &GraphArg) -> Result<Resolved, String> {
    match (&g.k, &g.graph) {
        (Some(k), None) => {
            let mut c = make_hk(*k).map_err(fail)?;
            let mut part = OrbitPartition::hk(*k).ok();
            if g.complement {
                c = c.complement();
            }
            if g.power > 1 {
                c = c.strong_power(g.power).map_err(fail)?;
                part = part.map(|p| p.power(g.power));
            }
            Ok(Resolved::Cayley(c, part))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let mut gr = Graph::from_text(&text).map_err(fail)?;
            if g.complement {
                gr = gr.complement();
            }
            if g.power > 1 {
                gr = gr.strong_power(g.power).map_err(fail)?;
            }
            Ok(Resolved::Dense(gr))
        }
        _ => Err("give exactly one of --k or --graph".into()),
    }
}

fn dense(r: &Resolved) -> Result<Graph, String> {
    match r {
        Resolved::Cayley(c, _) => c.to_graph().map_err(fail),
        Resolved::Dense(g) => Ok(g.clone()),
    }
}

fn cmd_graph(g: &GraphArg, edges: bool) -> CmdResult {
    let r = resolve(g)?;
    let (n, e, hash, cayley) = match &r {
        Resolved::Cayley(c, _) => (c.order(), c.edge_count(), c.hash(), Some(c.to_text())),
        Resolved::Dense(d) => (d.n(), d.edge_count(), d.hash(), None),
    };
    let text = if edges { Some(dense(&r)?.to_text()) } else { None };
    let table = match &text {
        Some(t) => t.clone(),
        None => format!("vertices {n}\nedges {e}\nhash {hash}\n"),
    };
    Ok(Output { json: pretty(&json!({"vertices": n, "edges": e, "hash": hash, "cayley": cayley, "text": text}))?, table, code: 0 })
}

fn param_line(p: &ParamResult) -> String {
    format!("{:<6} {:>5}  [{}, {}]  {:?}\n", format!("{:?}", p.param).to_lowercase(), p.value, p.lower, p.upper, p.status)
}

fn cmd_params(g: &GraphArg, budget: u64) -> CmdResult {
    let gr = dense(&resolve(g)?)?;
    let ps = [independence_number(&gr, budget), clique_number(&gr, budget), chromatic_number(&gr, budget)];
    let table = ps.iter().map(param_line).collect();
    Ok(Output { json: pretty(&ps)?, table, code: 0 })
}

fn cmd_hadamard(order: usize) -> CmdResult {
    let h = hadamard_of_order(order).ok_or_else(|| format!("no covered construction of order {order}"))?;
    h.verify().map_err(fail)?;
    let table = format!("order {} ({})\n{}", h.order(), h.provenance(), h.to_text());
    Ok(Output { json: pretty(&json!({"provenance": h.provenance().to_string(), "matrix": h}))?, table, code: 0 })
}

fn cert_table(c: &ThetaCertificate) -> String {
    format!(
        "{:?} = {:.9}{}\nmethod {:?}\nresiduals eq {:.2e} ineq {:.2e} min-eig {:.2e}\n",
        c.variant,
        c.lambda,
        c.lambda_exact.as_ref().map_or(String::new(), |q| format!(" (exact {q})")),
        c.method,
        c.residuals.eq,
        c.residuals.ineq,
        c.residuals.mineig
    )
}

fn cmd_theta(g: &GraphArg, plus: bool, sdp: bool, tol: f64, max_iter: usize) -> CmdResult {
    let variant = if plus { ThetaVariant::ThetaPlus } else { ThetaVariant::Theta };
    let r = resolve(g)?;
    let cert = match (&r, sdp) {
        (Resolved::Cayley(c, Some(part)), false) => {
            theta_cayley_lp_reduced(c, variant, part, CayleyLpOptions::default()).map_err(fail)?.certificate
        }
        (Resolved::Cayley(c, None), false) => theta_cayley_lp(c, variant, CayleyLpOptions::default()).map_err(fail)?.certificate,
        _ => theta_sdp(&dense(&r)?, variant, SdpOptions { tol: tol.max(1e-10), max_iter }).map_err(fail)?,
    };
    let table = cert_table(&cert);
    Ok(Output { json: pretty(&cert)?, table, code: 0 })
}

fn cmd_polybound(k: usize) -> CmdResult {
    let (p, l) = zesc::lab::prime_power_form(k).ok_or_else(|| format!("k = {k} is not 4 p^l - 1 with p an odd prime"))?;
    let dim = dimension_bound(k, p, l).map_err(fail)?;
    let g = make_hk(k).map_err(fail)?.to_graph().map_err(fail)?;
    let set: Vec<usize> = zesc::combinat::explicit_independent_set_hk(k).map_err(fail)?.into_iter().map(|v| v as usize).collect();
    let rep = representation_for_hk(k, p, l).map_err(fail)?;
    let cert = rank_certificate(&rep, &g, &[set.clone()], Some(l)).map_err(fail)?;
    let table = format!(
        "k = {k} = 4*{p}^{l} - 1\nD = {}  2^(k H(3/11)) = {:.3}  2^(0.846 k) = {:.3}  holds {}\nrank over Z_{p} = {}\n{} <= alpha(H_{k}) <= {}\n",
        dim.dimension,
        dim.entropy_value,
        dim.cap,
        dim.holds,
        cert.rank,
        set.len(),
        cert.alpha_upper
    );
    Ok(Output { json: pretty(&json!({"dimension": dim, "certificate": cert, "independent-set": set}))?, table, code: 0 })
}

fn cmd_qsim(what: &Qsim, cli: &Cli) -> CmdResult {
    match what {
        Qsim::Rsp { d, trials } => {
            let b = rsp_batch(*d, *trials, cli.seed).map_err(fail)?;
            let pass = b.max_trace_distance <= cli.tol && b.max_probability_error <= cli.tol;
            let table = format!(
                "d = {} trials {}: max trace distance {:.2e}, max probability error {:.2e}, pass {pass}\n",
                b.d, b.trials, b.max_trace_distance, b.max_probability_error
            );
            Ok(Output { json: pretty(&json!({"batch": b, "pass": pass}))?, table, code: if pass { 0 } else { 1 } })
        }
        Qsim::Source { k } => {
            let config = ReproduceConfig { seed: cli.seed, tol: cli.tol, budget: cli.budget, ..Default::default() };
            let r = reproduce(*k, &config).map_err(fail)?;
            let stage = r.stage("source-simulation").cloned();
            match &r.simulations.source {
                Some(s) => {
                    let table = format!("{} inputs, {} cases, worst residual {:.2e}, pass {}\n", s.inputs, s.cases_run, s.worst_residual, s.pass);
                    Ok(Output { json: pretty(s)?, table, code: if s.pass { 0 } else { 1 } })
                }
                None => Err(format!("source simulation not run: {stage:?}")),
            }
        }
        Qsim::Channel { k, t, adversaries, permutations } => {
            let r = simulate_channel_protocol_hk(*k, *t, *permutations, *adversaries, cli.seed).map_err(fail)?;
            let table = format!(
                "{} messages over {} uses, {} adversaries, rate {} bits/use, pass {}\n",
                r.messages,
                r.channel_uses,
                r.adversaries.len(),
                r.rate,
                r.pass
            );
            Ok(Output { json: pretty(&r)?, table, code: if r.pass { 0 } else { 1 } })
        }
    }
}

fn cmd_report(k: usize, no_sim: bool, cli: &Cli) -> CmdResult {
    let config = ReproduceConfig { seed: cli.seed, tol: cli.tol, budget: cli.budget, simulations: !no_sim, ..Default::default() };
    let r = reproduce(k, &config).map_err(fail)?;
    let audit = consistency_audit(&r);
    let code = if r.has_errors() {
        2
    } else if !audit.pass {
        1
    } else {
        0
    };
    Ok(Output { json: r.to_json().map_err(fail)? + "\n", table: render_table(&r), code })
}

fn cmd_audit(file: &PathBuf) -> CmdResult {
    let text = std::fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let r = BoundsReport::from_json(&text).map_err(fail)?;
    let audit = consistency_audit(&r);
    let artifacts = verify_artifacts(&r, 1e-6);
    let pass = audit.pass && artifacts.is_ok();
    let mut table = format!("audit {} ({} links)\n", if audit.pass { "pass" } else { "FAIL" }, audit.links.len());
    for v in &audit.violated {
        table.push_str(&format!("violated: {v}\n"));
    }
    match &artifacts {
        Ok(names) => table.push_str(&format!("artifacts verified: {}\n", names.len())),
        Err(e) => table.push_str(&format!("artifact check failed: {e}\n")),
    }
    let json = json!({
        "audit": audit,
        "artifacts": artifacts.as_ref().map_err(|e| e.to_string()),
        "pass": pass,
    });
    Ok(Output { json: pretty(&json)?, table, code: if pass { 0 } else { 1 } })
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Graph { g, edges } => cmd_graph(g, *edges),
        Command::Params { g } => cmd_params(g, cli.budget),
        Command::Hadamard { order } => cmd_hadamard(*order),
        Command::Theta { g, plus, sdp } => cmd_theta(g, *plus, *sdp, cli.tol, cli.max_iter),
        Command::Polybound { k } => cmd_polybound(*k),
        Command::Qsim { what } => cmd_qsim(what, cli),
        Command::Report { k, no_sim } => cmd_report(*k, *no_sim, cli),
        Command::Audit { file } => cmd_audit(file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    // reports default to JSON, everything else to the table
    let as_json = cli.json || (!cli.table && matches!(cli.command, Command::Report { .. }));
    let text = if as_json { out.json } else { out.table };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(out.code)
}
