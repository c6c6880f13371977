use serde::{Deserialize, Serialize};

use super::ops::{c, frobenius, hermitian_residual, min_eig, root_of_unity, CMatrixJson, C64};
use crate::error::{invalid, Error, Result};
use crate::graphs::{hk_signs, make_hk, Graph};
use crate::linalg::{CMatrix, CVector};

/// Vectors attached to vertices, orthogonal along edges.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthRep {
    pub d: usize,
    pub vectors: Vec<CVector>,
    /// All entries of each vector share one modulus.
    pub flat: bool,
}

impl OrthRep {
    pub fn new(vectors: Vec<CVector>) -> Result<OrthRep> {
        let d = vectors.first().map_or(0, |v| v.len());
        if d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::Shape("vectors must share a positive dimension".into()));
        }
        if vectors.iter().any(|v| v.norm() == 0.0) {
            return Err(invalid("zero vector in representation"));
        }
        let flat = vectors.iter().all(|v| is_flat(v, 1e-9));
        Ok(OrthRep { d, vectors, flat })
    }

    /// Largest `|⟨f(u), f(v)⟩| / (|f(u)| |f(v)|)` over edges; errors above `tol`.
    pub fn verify(&self, g: &Graph, tol: f64) -> Result<f64> {
        if self.vectors.len() != g.n() {
            return Err(Error::Shape(format!("{} vectors for {} vertices", self.vectors.len(), g.n())));
        }
        let mut worst = 0f64;
        for (u, v) in g.edges() {
            let (a, b) = (&self.vectors[u], &self.vectors[v]);
            let r = a.dotc(b).norm() / (a.norm() * b.norm());
            if r > tol {
                return Err(Error::Verification(format!("vectors of adjacent {u} and {v} overlap by {r:.3e}")));
            }
            worst = worst.max(r);
        }
        Ok(worst)
    }
}

fn is_flat(v: &CVector, tol: f64) -> bool {
    let target = v.norm() / (v.len() as f64).sqrt();
    v.iter().all(|z| (z.norm() - target).abs() <= tol * target.max(1.0))
}

/// `f(u) = (signs of u, 1)` in dimension `k+1`; adjacent strings have sign
/// inner product `-1`, so the appended `1` makes them orthogonal.
pub fn orth_rep_hk(k: usize) -> Result<OrthRep> {
    let hk = make_hk(k)?;
    let vectors = (0..hk.order() as u64)
        .map(|x| {
            let mut s: Vec<C64> = hk_signs(k, x).into_iter().map(|e| c(e as f64, 0.0)).collect();
            s.push(c(1.0, 0.0));
            CVector::from_vec(s)
        })
        .collect();
    OrthRep::new(vectors)
}

/// Constraint groups checked by the witness verifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintClass {
    Hermitian,
    Psd,
    Trace,
    Orthogonality,
    Sum,
}

/// Largest residual per constraint class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub hermitian: f64,
    pub psd: f64,
    pub trace: f64,
    pub orthogonality: f64,
    pub sum: f64,
    pub tol: f64,
    pub violated: Vec<ConstraintClass>,
    pub pass: bool,
}

struct Checker {
    r: WitnessReport,
}

impl Checker {
    fn new(rho: &CMatrix, d: usize, tol: f64) -> Result<Checker> {
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::Shape(format!("rho is {}x{}, d = {d}", rho.nrows(), rho.ncols())));
        }
        let t = rho.trace();
        let mut ch = Checker {
            r: WitnessReport {
                hermitian: 0.0,
                psd: 0.0,
                trace: (t - c(1.0, 0.0)).norm(),
                orthogonality: 0.0,
                sum: 0.0,
                tol,
                violated: vec![],
                pass: false,
            },
        };
        ch.state(rho);
        Ok(ch)
    }

    fn state(&mut self, m: &CMatrix) {
        self.r.hermitian = self.r.hermitian.max(hermitian_residual(m));
        self.r.psd = self.r.psd.max(-min_eig(m));
    }

    fn members(&mut self, family: &[CMatrix], d: usize) -> Result<()> {
        for m in family {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Shape(format!("member is {}x{}, d = {d}", m.nrows(), m.ncols())));
            }
            self.state(m);
        }
        Ok(())
    }

    fn product(&mut self, a: &CMatrix, b: &CMatrix) {
        self.r.orthogonality = self.r.orthogonality.max(frobenius(&(a * b)));
    }

    fn sum<'a>(&mut self, rho: &CMatrix, parts: impl Iterator<Item = &'a CMatrix>) {
        let mut s = -rho.clone();
        for p in parts {
            s += p;
        }
        self.r.sum = self.r.sum.max(frobenius(&s));
    }

    fn finish(mut self) -> WitnessReport {
        let r = &mut self.r;
        let tol = r.tol;
        for (cls, v) in [
            (ConstraintClass::Hermitian, r.hermitian),
            (ConstraintClass::Psd, r.psd),
            (ConstraintClass::Trace, r.trace),
            (ConstraintClass::Orthogonality, r.orthogonality),
            (ConstraintClass::Sum, r.sum),
        ] {
            if !(v <= tol) {
                r.violated.push(cls);
            }
        }
        r.pass = r.violated.is_empty();
        self.r
    }
}

/// `1 x 1` matrix holding `1` or `0`.
fn indicator(on: bool) -> CMatrix {
    CMatrix::from_element(1, 1, c(if on { 1.0 } else { 0.0 }, 0.0))
}

fn nonzero(m: &CMatrix) -> bool {
    m.iter().any(|z| *z != c(0.0, 0.0))
}

/// PSD family `ρ_x^i` (`x ∈ V(G)`, `i < t`) with `ρ_x^i ρ_y^i = 0` on edges
/// and `Σ_i ρ_x^i = ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ChromJson", try_from = "ChromJson")]
pub struct ChromWitness {
    pub t: usize,
    pub d: usize,
    pub rho: CMatrix,
    /// Member `(x, i)` sits at `x * t + i`.
    pub family: Vec<CMatrix>,
}

impl ChromWitness {
    pub fn n(&self) -> usize {
        self.family.len() / self.t.max(1)
    }

    pub fn get(&self, x: usize, i: usize) -> &CMatrix {
        &self.family[x * self.t + i]
    }
}

/// Classical witness from a proper colouring: `ρ_x^i = [colour(x) = i]`, `d = 1`.
pub fn chrom_witness_from_coloring(g: &Graph, colors: &[usize]) -> Result<ChromWitness> {
    if !g.is_proper_coloring(colors) {
        return Err(invalid("not a proper colouring"));
    }
    let t = colors.iter().max().map_or(1, |&m| m + 1);
    let family = colors.iter().flat_map(|&col| (0..t).map(move |i| indicator(i == col))).collect();
    Ok(ChromWitness { t, d: 1, rho: indicator(true), family })
}

/// Witness with `t = d` from a flat representation: with `v = f(u) ∘ h_i`
/// scaled to unit-modulus entries and `h_i = (ω^{im})_m`, set
/// `ρ_u^i = v v* / d²` and `ρ = I/d`.
pub fn chrom_witness_from_flat_rep(f: &OrthRep, g: &Graph) -> Result<ChromWitness> {
    if !f.flat {
        return Err(Error::Precondition("representation is not flat".into()));
    }
    f.verify(g, 1e-9)?;
    let d = f.d;
    let scale = 1.0 / (d * d) as f64;
    let mut family = Vec::with_capacity(g.n() * d);
    for u in 0..g.n() {
        let fu = &f.vectors[u];
        let unit = fu * c((d as f64).sqrt() / fu.norm(), 0.0);
        for i in 0..d {
            let v = CVector::from_fn(d, |m, _| unit[m] * root_of_unity(i * m, d));
            family.push(&v * v.adjoint() * c(scale, 0.0));
        }
    }
    let rho = CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0);
    Ok(ChromWitness { t: d, d, rho, family })
}

pub fn verify_chrom_witness(w: &ChromWitness, g: &Graph, tol: f64) -> Result<WitnessReport> {
    if w.t == 0 || w.family.len() != g.n() * w.t {
        return Err(Error::Shape(format!("family of {} for {} vertices and t = {}", w.family.len(), g.n(), w.t)));
    }
    let mut ch = Checker::new(&w.rho, w.d, tol)?;
    ch.members(&w.family, w.d)?;
    for (x, y) in g.edges() {
        for i in 0..w.t {
            ch.product(w.get(x, i), w.get(y, i));
        }
    }
    for x in 0..g.n() {
        ch.sum(&w.rho, (0..w.t).map(|i| w.get(x, i)));
    }
    Ok(ch.finish())
}

/// PSD family `ρ_i^u` (`i < M`, `u ∈ V(H)`) with `ρ_i^u ρ_j^v = 0` for
/// `i ≠ j` whenever `u = v` or `u ~ v`, and `Σ_u ρ_i^u = ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "IndepJson", try_from = "IndepJson")]
pub struct IndepWitness {
    pub messages: usize,
    pub d: usize,
    pub rho: CMatrix,
    /// Member `(i, u)` sits at `i * |V(H)| + u`.
    pub family: Vec<CMatrix>,
}

impl IndepWitness {
    pub fn n(&self) -> usize {
        self.family.len() / self.messages.max(1)
    }

    pub fn get(&self, i: usize, u: usize) -> &CMatrix {
        &self.family[i * self.n() + u]
    }
}

/// Classical witness from an independent set: `ρ_i^u = [u = S_i]`, `d = 1`.
pub fn indep_witness_from_set(h: &Graph, set: &[usize]) -> Result<IndepWitness> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != set.len() || set.iter().any(|&u| u >= h.n()) || !h.is_independent(set) {
        return Err(invalid("not an independent set"));
    }
    let family = set.iter().flat_map(|&s| (0..h.n()).map(move |u| indicator(u == s))).collect();
    Ok(IndepWitness { messages: set.len(), d: 1, rho: indicator(true), family })
}

pub fn verify_indep_witness(w: &IndepWitness, h: &Graph, tol: f64) -> Result<WitnessReport> {
    let n = h.n();
    if w.messages == 0 || w.family.len() != n * w.messages {
        return Err(Error::Shape(format!("family of {} for {} vertices and M = {}", w.family.len(), n, w.messages)));
    }
    let mut ch = Checker::new(&w.rho, w.d, tol)?;
    ch.members(&w.family, w.d)?;
    // only nonzero members can violate a product constraint
    let mut live: Vec<Vec<usize>> = vec![vec![]; n];
    for i in 0..w.messages {
        for (u, l) in live.iter_mut().enumerate() {
            if nonzero(w.get(i, u)) {
                l.push(i);
            }
        }
    }
    for u in 0..n {
        for v in std::iter::once(u).chain(h.neighbors(u).iter()) {
            for &i in &live[u] {
                for &j in &live[v] {
                    if i != j {
                        ch.product(w.get(i, u), w.get(j, v));
                    }
                }
            }
        }
    }
    for i in 0..w.messages {
        ch.sum(&w.rho, (0..n).map(|u| w.get(i, u)));
    }
    Ok(ch.finish())
}

/// PSD family `ρ_x^s` (`x ∈ V(G^⊠m)`, `s ∈ V(H^⊠n)`) with
/// `ρ_x^s ρ_y^t = 0` for `x ~ y` and (`s = t` or `s ~ t`), and `Σ_s ρ_x^s = ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "EtaJson", try_from = "EtaJson")]
pub struct EtaWitness {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub rho: CMatrix,
    /// Number of vertices of `H^⊠n`.
    pub symbols: usize,
    /// Member `(x, s)` sits at `x * symbols + s`.
    pub family: Vec<CMatrix>,
}

impl EtaWitness {
    pub fn get(&self, x: usize, s: usize) -> &CMatrix {
        &self.family[x * self.symbols + s]
    }
}

/// Classical witness from `φ: V(G^⊠m) → V(H^⊠n)`: `ρ_x^s = [s = φ(x)]`.
pub fn eta_witness_from_map(g: &Graph, h: &Graph, m: usize, n: usize, map: &[usize]) -> Result<EtaWitness> {
    let gm = g.strong_power(m)?;
    let hn = h.strong_power(n)?;
    if map.len() != gm.n() || map.iter().any(|&s| s >= hn.n()) {
        return Err(Error::Shape("map does not fit the powers".into()));
    }
    let symbols = hn.n();
    let family = map.iter().flat_map(|&p| (0..symbols).map(move |s| indicator(s == p))).collect();
    Ok(EtaWitness { m, n, d: 1, rho: indicator(true), symbols, family })
}

pub fn verify_eta_witness(w: &EtaWitness, g: &Graph, h: &Graph, m: usize, n: usize, tol: f64) -> Result<WitnessReport> {
    if w.m != m || w.n != n {
        return Err(Error::Shape(format!("witness is for powers ({}, {}), asked ({m}, {n})", w.m, w.n)));
    }
    let gm = g.strong_power(m)?;
    let hn = h.strong_power(n)?;
    if w.symbols != hn.n() || w.family.len() != gm.n() * hn.n() {
        return Err(Error::Shape(format!("family of {} for {} x {}", w.family.len(), gm.n(), hn.n())));
    }
    let mut ch = Checker::new(&w.rho, w.d, tol)?;
    ch.members(&w.family, w.d)?;
    let live: Vec<Vec<usize>> = (0..gm.n()).map(|x| (0..hn.n()).filter(|&s| nonzero(w.get(x, s))).collect()).collect();
    for (x, y) in gm.edges() {
        for &s in &live[x] {
            for &t in &live[y] {
                if s == t || hn.has_edge(s, t) {
                    ch.product(w.get(x, s), w.get(y, t));
                }
            }
        }
    }
    for x in 0..gm.n() {
        ch.sum(&w.rho, (0..hn.n()).map(|s| w.get(x, s)));
    }
    Ok(ch.finish())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub index: Vec<usize>,
    pub matrix: CMatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChromJson {
    pub t: usize,
    pub d: usize,
    pub rho: CMatrixJson,
    pub family: Vec<FamilyEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndepJson {
    #[serde(rename = "M")]
    pub messages: usize,
    pub d: usize,
    pub rho: CMatrixJson,
    pub family: Vec<FamilyEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EtaJson {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub symbols: usize,
    pub rho: CMatrixJson,
    pub family: Vec<FamilyEntry>,
}

fn entries(family: &[CMatrix], width: usize) -> Vec<FamilyEntry> {
    family
        .iter()
        .enumerate()
        .map(|(k, m)| FamilyEntry { index: vec![k / width, k % width], matrix: m.into() })
        .collect()
}

/// Rebuilds a family from indexed entries laid out `rows x width`.
fn collect(entries: &[FamilyEntry], width: usize, d: usize) -> Result<Vec<CMatrix>> {
    if width == 0 || entries.len() % width != 0 {
        return Err(Error::Shape("family size does not match its width".into()));
    }
    let mut out = vec![None; entries.len()];
    for e in entries {
        let [a, b] = e.index[..] else { return Err(Error::Shape("index must have two components".into())) };
        let k = a * width + b;
        if b >= width || k >= out.len() || out[k].is_some() {
            return Err(Error::Shape(format!("bad or repeated index {:?}", e.index)));
        }
        let m = CMatrix::try_from(&e.matrix)?;
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Shape("member dimension".into()));
        }
        out[k] = Some(m);
    }
    Ok(out.into_iter().map(|m| m.expect("all indices filled")).collect())
}

impl From<ChromWitness> for ChromJson {
    fn from(w: ChromWitness) -> Self {
        ChromJson { t: w.t, d: w.d, rho: (&w.rho).into(), family: entries(&w.family, w.t) }
    }
}

impl TryFrom<ChromJson> for ChromWitness {
    type Error = Error;
    fn try_from(j: ChromJson) -> Result<Self> {
        Ok(ChromWitness { t: j.t, d: j.d, rho: (&j.rho).try_into()?, family: collect(&j.family, j.t, j.d)? })
    }
}

impl From<IndepWitness> for IndepJson {
    fn from(w: IndepWitness) -> Self {
        let n = w.n();
        IndepJson { messages: w.messages, d: w.d, rho: (&w.rho).into(), family: entries(&w.family, n) }
    }
}

impl TryFrom<IndepJson> for IndepWitness {
    type Error = Error;
    fn try_from(j: IndepJson) -> Result<Self> {
        if j.messages == 0 {
            return Err(Error::Shape("M = 0".into()));
        }
        let width = j.family.len() / j.messages;
        Ok(IndepWitness { messages: j.messages, d: j.d, rho: (&j.rho).try_into()?, family: collect(&j.family, width, j.d)? })
    }
}

impl From<EtaWitness> for EtaJson {
    fn from(w: EtaWitness) -> Self {
        EtaJson { m: w.m, n: w.n, d: w.d, symbols: w.symbols, rho: (&w.rho).into(), family: entries(&w.family, w.symbols) }
    }
}

impl TryFrom<EtaJson> for EtaWitness {
    type Error = Error;
    fn try_from(j: EtaJson) -> Result<Self> {
        Ok(EtaWitness {
            m: j.m,
            n: j.n,
            d: j.d,
            symbols: j.symbols,
            rho: (&j.rho).try_into()?,
            family: collect(&j.family, j.symbols, j.d)?,
        })
    }
}
