use serde::{Deserialize, Serialize};

use crate::hadamard::hadamard_of_order;
use crate::polybound::{binary_entropy, dimension_bound, DimensionBound};

/// Direction of a bound line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtLeast,
    AtMost,
    Exceeds,
}

/// One closed-form bound evaluated at `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BoundLine {
    pub name: String,
    pub quantity: String,
    pub relation: Relation,
    pub expression: String,
    /// `None` when the expression is undefined or non-positive where it
    /// must be positive (small `k`).
    pub value: Option<f64>,
    pub applicable: bool,
    pub condition: String,
}

/// All bound lines for `H_k` with the inputs they were evaluated from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct FormulaRecord {
    pub k: usize,
    /// `(p, l)` with `k = 4 p^l − 1` and `p` an odd prime.
    pub p: Option<u64>,
    pub l: Option<u32>,
    /// Construction of a Hadamard matrix of order `k + 1`, if one is covered.
    pub hadamard: Option<String>,
    /// `H(3/11)` in bits.
    pub entropy_3_11: f64,
    pub dimension: Option<DimensionBound>,
    pub lines: Vec<BoundLine>,
}

impl FormulaRecord {
    pub fn line(&self, name: &str) -> Option<&BoundLine> {
        self.lines.iter().find(|l| l.name == name)
    }

    /// Value of the named line when it applies.
    pub fn applicable_value(&self, name: &str) -> Option<f64> {
        self.line(name).filter(|l| l.applicable).and_then(|l| l.value)
    }
}

fn is_odd_prime(p: u64) -> bool {
    p >= 3 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// `(p, l)` with `k = 4 p^l − 1` for an odd prime `p`.
pub fn prime_power_form(k: usize) -> Option<(u64, u32)> {
    if (k + 1) % 4 != 0 {
        return None;
    }
    let q = (k as u64 + 1) / 4;
    let p = (3..=q).step_by(2).find(|&d| q % d == 0)?;
    if !is_odd_prime(p) {
        return None;
    }
    let mut r = q;
    let mut l = 0;
    while r % p == 0 {
        r /= p;
        l += 1;
    }
    (r == 1).then_some((p, l))
}

fn positive(x: f64) -> Option<f64> {
    (x.is_finite() && x > 0.0).then_some(x)
}

/// Evaluates the rate, capacity and cost bounds for `H_k`, flagging the lines
/// whose hypotheses fail at this `k`.
pub fn eval_theorem_bounds(k: usize) -> FormulaRecord {
    let kf = k as f64;
    let log = (kf + 1.0).log2();
    let form = prime_power_form(k);
    let odd = k >= 3 && k % 2 == 1;
    let hadamard = hadamard_of_order(k + 1).map(|h| h.provenance().to_string());
    let pp = form.is_some();
    let pp_cond = "k = 4 p^l - 1 with p an odd prime";
    let eta_cond = "k = 4 p^l - 1 with p an odd prime and a Hadamard matrix of order k + 1";

    let r_lower = 0.154 * kf - 1.0;
    let c_star = if k > 3 { Some((kf - 1.0) * (1.0 - 2.0 * log / (kf - 3.0))) } else { None };
    let eta_star = c_star.and_then(positive).map(|c| log / c);
    let eta = positive(kf - 1.0 - log).map(|den| r_lower / den);

    let line = |name: &str, quantity: &str, relation, expression: &str, value, applicable, condition: &str| BoundLine {
        name: name.into(),
        quantity: quantity.into(),
        relation,
        expression: expression.into(),
        value,
        applicable,
        condition: condition.into(),
    };
    let lines = vec![
        line("R-lower", "R(H_k)", Relation::AtLeast, "0.154 k - 1", Some(r_lower), odd && pp, pp_cond),
        line("R*-upper", "R*(H_k)", Relation::AtMost, "log2(k + 1)", Some(log), odd, "k odd"),
        line("c-upper", "c(H_k)", Relation::AtMost, "0.846 k", Some(0.846 * kf), odd && pp, pp_cond),
        line(
            "c*-lower",
            "c*(H_k)",
            Relation::AtLeast,
            "(k - 1)(1 - 2 log2(k + 1)/(k - 3))",
            c_star,
            odd && k >= 11,
            "k odd, k >= 11",
        ),
        line(
            "eta*-upper",
            "eta*(H_k, H_k)",
            Relation::AtMost,
            "log2(k + 1) / ((k - 1)(1 - 2 log2(k + 1)/(k - 3)))",
            eta_star,
            odd && pp && hadamard.is_some(),
            eta_cond,
        ),
        line(
            "eta-lower",
            "eta(H_k, H_k)",
            Relation::Exceeds,
            "(0.154 k - 1) / (k - 1 - log2(k + 1))",
            eta,
            odd && pp && hadamard.is_some(),
            eta_cond,
        ),
    ];
    FormulaRecord {
        k,
        p: form.map(|f| f.0),
        l: form.map(|f| f.1),
        hadamard,
        entropy_3_11: binary_entropy(3.0 / 11.0),
        dimension: form.and_then(|(p, l)| dimension_bound(k, p, l).ok()),
        lines,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_forms() {
        assert_eq!(prime_power_form(11), Some((3, 1)));
        assert_eq!(prime_power_form(19), Some((5, 1)));
        assert_eq!(prime_power_form(35), Some((3, 2)));
        assert_eq!(prime_power_form(7), None);
        assert_eq!(prime_power_form(3), None);
        assert_eq!(prime_power_form(59), None);
        assert_eq!(prime_power_form(13), None);
    }

    #[test]
    fn k11_values() {
        let r = eval_theorem_bounds(11);
        let v = |n: &str| r.applicable_value(n).unwrap();
        assert!((v("R-lower") - 0.694).abs() < 1e-9);
        assert!((v("R*-upper") - 12f64.log2()).abs() < 1e-12);
        assert!((v("c-upper") - 9.306).abs() < 1e-9);
        assert!((v("c*-lower") - 1.0376).abs() < 1e-3);
        assert!((v("eta*-upper") - 3.4551).abs() < 1e-3);
        assert!((v("eta-lower") - 0.10819).abs() < 1e-4);
        assert_eq!(r.dimension.as_ref().unwrap().dimension, 67);
    }

    #[test]
    fn small_k_flags() {
        let r = eval_theorem_bounds(7);
        assert!(r.line("R*-upper").unwrap().applicable);
        assert!(!r.line("R-lower").unwrap().applicable);
        assert!(!r.line("c*-lower").unwrap().applicable);
        let r = eval_theorem_bounds(3);
        assert_eq!(r.line("c*-lower").unwrap().value, None);
        assert_eq!(r.line("eta*-upper").unwrap().value, None);
    }
}
