//! Operator identities evaluated as exact series equalities.

use std::fmt;

use serde_json::{json, Value};

use crate::arith::{pow_rational, CycNumber, Rational};
use crate::error::{Error, Result};
use crate::qseries::{Mismatch, SumMode, VVQSeries};

use super::bs::bs_op;
use super::ops::{h_op, h_op_closed, hecke_weight_sum, p_op, t_op, u_op};

/// One identity between operator words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `𝒯_m ∘ 𝒯_n = 𝒯_{mn}`.
    TMult { m: u64, n: u64 },
    /// `𝒯_{p^l} = 𝒯_p ∘ 𝒯_{p^{l−1}} − p^{w+w̄−1} 𝒰_{p²} ∘ 𝒯_{p^{l−2}}`.
    TRec { p: u64, l: u32 },
    /// `𝒰_{n²} ∘ 𝒯_{m²} = 𝒯_{m²} ∘ 𝒰_{n²}`.
    UTComm { n: u64, m: u64 },
    /// `𝒫_{m²} ∘ 𝒫_{n²} = 𝒫_{m²n²}`.
    PComp { m: u64, n: u64 },
    /// `𝒫_{n²} ∘ 𝒯_{m²} = 𝒯_{m²} ∘ 𝒫_{n²}`.
    PTComm { m: u64, n: u64 },
    /// `𝒫_{n²} ∘ 𝒰_{n²} = I`.
    PU { n: u64 },
    /// `𝒰_{n²} ∘ 𝒫_{n²} = I`, false in general.
    UP { n: u64 },
    /// `ℋ_{m²} ∘ ℋ_{n²} = ℋ_{m²n²}`.
    HMult { m: u64, n: u64 },
    /// Three-term recursion for `ℋ_{p^{2l}}`.
    HRec { p: u64, l: u32 },
    /// `𝒫_{n²} ∘ 𝒯_{n²}` against the closed formula.
    HClosed { n: u64 },
    /// Explicit odd-prime formula against double-coset `ℋ_{p^{2l}}`.
    BsEquiv { p: u64, l: u32 },
}

impl Relation {
    pub fn id(&self) -> &'static str {
        match self {
            Relation::TMult { .. } => "T-mult",
            Relation::TRec { .. } => "T-rec",
            Relation::UTComm { .. } => "UT-comm",
            Relation::PComp { .. } => "PP-comp",
            Relation::PTComm { .. } => "PT-comm",
            Relation::PU { .. } => "PU-id",
            Relation::UP { .. } => "UP-id",
            Relation::HMult { .. } => "H-mult",
            Relation::HRec { .. } => "H-rec",
            Relation::HClosed { .. } => "H-closed",
            Relation::BsEquiv { .. } => "BS-equiv",
        }
    }

    pub fn params(&self) -> String {
        match *self {
            Relation::TMult { m, n }
            | Relation::PComp { m, n }
            | Relation::PTComm { m, n }
            | Relation::HMult { m, n } => format!("m={m},n={n}"),
            Relation::UTComm { n, m } => format!("n={n},m={m}"),
            Relation::TRec { p, l } | Relation::HRec { p, l } | Relation::BsEquiv { p, l } => {
                format!("p={p},l={l}")
            }
            Relation::PU { n } | Relation::UP { n } | Relation::HClosed { n } => format!("n={n}"),
        }
    }

    /// Factor `f` such that the input must have type ρ_{L(R₀·f)}.
    pub fn input_scale(&self) -> u64 {
        match *self {
            Relation::PComp { m, n } => (m * n).pow(2),
            Relation::PTComm { n, .. } | Relation::UP { n } => n * n,
            _ => 1,
        }
    }

    /// Divisor applied to the input truncation by the deepest operator word.
    pub fn shrink(&self) -> u64 {
        match *self {
            Relation::TMult { m, n } => m * n,
            Relation::TRec { p, l } => p.pow(l),
            Relation::UTComm { m, .. } | Relation::PTComm { m, .. } => m * m,
            Relation::HMult { m, n } => (m * n).pow(2),
            Relation::HRec { p, l } | Relation::BsEquiv { p, l } => p.pow(2 * l),
            Relation::HClosed { n } => n * n,
            Relation::PComp { .. } | Relation::PU { .. } | Relation::UP { .. } => 1,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.id(), self.params())
    }
}

/// Debug-only perturbations used to confirm that the checker can fail.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Tamper {
    #[default]
    None,
    /// Doubles the prefactor of every 𝒯 on the left-hand side.
    Prefactor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Differs(Mismatch),
}

/// Machine-readable result of one relation check.
#[derive(Debug, Clone)]
pub struct RelationReport {
    pub relation: Relation,
    pub lattice: Vec<Vec<i64>>,
    pub input: String,
    pub mode: SumMode,
    /// Whether the identity is expected to hold (false for negative controls).
    pub expect_holds: bool,
    pub compared_to: Rational,
    pub outcome: Outcome,
    /// Composition-vs-closed-formula checks for every ℋ evaluated on the way.
    pub side_checks: Vec<(String, Outcome)>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        let main = matches!(self.outcome, Outcome::Holds) == self.expect_holds;
        main && self.side_checks.iter().all(|(_, o)| *o == Outcome::Holds)
    }

    pub fn first_mismatch(&self) -> Option<(&str, &Mismatch)> {
        self.side_checks
            .iter()
            .filter_map(|(n, o)| match o {
                Outcome::Differs(m) => Some((n.as_str(), m)),
                Outcome::Holds => None,
            })
            .next()
            .or(match &self.outcome {
                Outcome::Differs(m) => Some(("main", m)),
                Outcome::Holds => None,
            })
    }

    pub fn to_json(&self) -> Value {
        let mm = self.first_mismatch().map(|(w, m)| {
            json!({
                "check": w,
                "coset": m.coset,
                "exponent": m.exponent.to_string(),
                "left": m.left.to_string(),
                "right": m.right.to_string(),
            })
        });
        json!({
            "relation": self.relation.id(),
            "params": self.relation.params(),
            "lattice": self.lattice,
            "input": self.input,
            "mode": mode_name(self.mode),
            "expect": if self.expect_holds { "holds" } else { "differs" },
            "compared_to": self.compared_to.to_string(),
            "status": if self.passed() { "pass" } else { "fail" },
            "first_mismatch": mm,
        })
    }
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} L={:?} input={} mode={} up to q^{}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.relation,
            self.lattice,
            self.input,
            mode_name(self.mode),
            self.compared_to
        )?;
        if !self.expect_holds {
            write!(f, " (negative control)")?;
        }
        if let Some((w, m)) = self.first_mismatch() {
            write!(f, "; {w}: {m}")?;
        }
        Ok(())
    }
}

pub fn mode_name(mode: SumMode) -> &'static str {
    match mode {
        SumMode::All => "all",
        SumMode::DoubleCoset => "double-coset",
    }
}

struct Ctx {
    mode: SumMode,
    tamper: Tamper,
    side: Vec<(String, Outcome)>,
}

impl Ctx {
    fn t(&self, psi: &VVQSeries, r: u64, tampered: bool) -> Result<VVQSeries> {
        let out = t_op(psi, r, self.mode)?;
        Ok(if tampered && self.tamper == Tamper::Prefactor {
            out.scale(&CycNumber::integer(2))
        } else {
            out
        })
    }

    /// ℋ as 𝒫∘𝒯, cross-checked against the closed formula.
    fn h(&mut self, psi: &VVQSeries, n: u64) -> Result<VVQSeries> {
        let a = h_op(psi, n, self.mode)?;
        if n > 1 {
            let b = h_op_closed(psi, n, self.mode)?;
            let o = outcome(&a, &b)?;
            self.side.push((
                format!("H_{} closed formula at scale {}", n * n, psi.form().scale()),
                o,
            ));
        }
        Ok(a)
    }
}

fn outcome(a: &VVQSeries, b: &VVQSeries) -> Result<Outcome> {
    Ok(match a.compare(b)? {
        None => Outcome::Holds,
        Some(m) => Outcome::Differs(m),
    })
}

fn power(p: u64, e: &Rational) -> Result<CycNumber> {
    pow_rational(p, e)
}

fn require_coprime(m: u64, n: u64) -> Result<()> {
    if crate::arith::nt::gcd(m, n) != 1 {
        return Err(Error::Contract(format!("relation needs gcd({m}, {n}) = 1")));
    }
    Ok(())
}

/// Evaluates both sides of `rel` on `psi` and compares them up to the common truncation.
///
/// `expect_holds = false` marks a negative control: a located discrepancy is the pass condition.
pub fn check_relation(
    rel: Relation,
    psi: &VVQSeries,
    mode: SumMode,
    expect_holds: bool,
    tamper: Tamper,
    input: &str,
) -> Result<RelationReport> {
    let mut cx = Ctx {
        mode,
        tamper,
        side: Vec::new(),
    };
    let w1 = &hecke_weight_sum(psi) - &Rational::one();
    let (lhs, rhs) = match rel {
        Relation::TMult { m, n } => {
            require_coprime(m, n)?;
            let a = cx.t(&cx.t(psi, n, true)?, m, true)?;
            (a, cx.t(psi, m * n, false)?)
        }
        Relation::TRec { p, l } => {
            if l < 2 {
                return Err(Error::Contract("the 𝒯 recursion needs l ≥ 2".into()));
            }
            let lhs = cx.t(psi, p.pow(l), true)?;
            let first = cx.t(&cx.t(psi, p.pow(l - 1), false)?, p, false)?;
            let second = u_op(&cx.t(psi, p.pow(l - 2), false)?, p)?;
            let c = -&power(p, &w1)?;
            (lhs, first.add_scaled(&second, &c)?)
        }
        Relation::UTComm { n, m } => {
            let a = u_op(&cx.t(psi, m * m, true)?, n)?;
            (a, cx.t(&u_op(psi, n)?, m * m, false)?)
        }
        Relation::PComp { m, n } => (p_op(&p_op(psi, n)?, m)?, p_op(psi, m * n)?),
        Relation::PTComm { m, n } => {
            let a = p_op(&cx.t(psi, m * m, true)?, n)?;
            (a, cx.t(&p_op(psi, n)?, m * m, false)?)
        }
        Relation::PU { n } => (p_op(&u_op(psi, n)?, n)?, psi.clone()),
        Relation::UP { n } => (u_op(&p_op(psi, n)?, n)?, psi.clone()),
        Relation::HMult { m, n } => {
            require_coprime(m, n)?;
            let inner = cx.h(psi, n)?;
            let a = cx.h(&inner, m)?;
            (a, cx.h(psi, m * n)?)
        }
        Relation::HRec { p, l } => {
            if l < 2 {
                return Err(Error::Contract("the ℋ recursion needs l ≥ 2".into()));
            }
            let lhs = cx.h(psi, p.pow(l))?;
            let q = p.pow(l - 1);
            let lifted = u_op(psi, q)?;
            let inner = cx.h(&lifted, q)?;
            let inner = cx.h(&inner, p)?;
            let first = p_op(&inner, q)?;
            let second = cx.h(psi, q)?;
            let third = cx.h(psi, p.pow(l - 2))?;
            let c1 = -&power(p, &w1)?;
            let c2 = -&power(p, &(&w1 * &Rational::integer(2)))?;
            (
                lhs,
                first.add_scaled(&second, &c1)?.add_scaled(&third, &c2)?,
            )
        }
        Relation::HClosed { n } => {
            let a = p_op(&cx.t(psi, n * n, true)?, n)?;
            (a, h_op_closed(psi, n, mode)?)
        }
        Relation::BsEquiv { p, l } => {
            if mode != SumMode::DoubleCoset {
                return Err(Error::Contract(
                    "the explicit formula matches double-coset mode only".into(),
                ));
            }
            let a = bs_op(psi, p, l)?;
            (a, cx.h(psi, p.pow(l))?)
        }
    };
    let compared_to = lhs.trunc().clone().min(rhs.trunc().clone());
    let outcome = outcome(&lhs, &rhs)?;
    Ok(RelationReport {
        relation: rel,
        lattice: psi.form().lattice().gram().to_vec(),
        input: input.to_string(),
        mode,
        expect_holds,
        compared_to,
        outcome,
        side_checks: cx.side,
    })
}

/// Restriction of `psi` to the cosets outside `A(R·f)`, `R` the scale of `psi` divided by `f²`.
pub fn support_off(psi: &VVQSeries, f: u64, only_first: bool) -> Result<VVQSeries> {
    let form = psi.form();
    let r = form.scale();
    if !r.is_multiple_of(f * f) {
        return Err(Error::Contract(format!(
            "scale {r} is not divisible by {}",
            f * f
        )));
    }
    let sub = r / (f * f) * f;
    let mut out = VVQSeries::zero(
        psi.form_arc().clone(),
        psi.weight().clone(),
        psi.trunc().clone(),
    );
    let mut taken = false;
    for id in form.ids() {
        if form.contains_scale(id, sub) || (only_first && taken) {
            continue;
        }
        if psi.component(id).is_empty() {
            continue;
        }
        taken = true;
        for (m, c) in psi.component(id) {
            out.add_term(id, m.clone(), c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::hecke::generic;
    use crate::lattice::{DiscriminantForm, Lattice};
    use crate::qseries::vv_theta;

    fn form(g: Vec<Vec<i64>>, r: u64) -> Arc<DiscriminantForm> {
        Arc::new(DiscriminantForm::new(&Lattice::new(g).unwrap(), r).unwrap())
    }

    fn run(rel: Relation, psi: &VVQSeries) -> RelationReport {
        check_relation(rel, psi, SumMode::All, true, Tamper::None, "test").unwrap()
    }

    #[test]
    fn spec_examples() {
        let th = vv_theta(form(vec![vec![2]], 1), &Rational::integer(12)).unwrap();
        for n in [2, 3] {
            assert!(run(Relation::PU { n }, &th).passed());
        }
        let r = run(Relation::TMult { m: 2, n: 3 }, &th);
        assert!(r.passed(), "{r}");
        assert_eq!(r.compared_to, Rational::integer(2));
        let r = run(Relation::HClosed { n: 2 }, &th);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn negative_controls_find_discrepancies() {
        let g = generic(form(vec![vec![2]], 4), &Rational::integer(6), 11).unwrap();
        let off = support_off(&g, 2, false).unwrap();
        let r = check_relation(
            Relation::PTComm { m: 2, n: 2 },
            &off,
            SumMode::All,
            false,
            Tamper::None,
            "g",
        )
        .unwrap();
        assert!(r.passed(), "{r}");
        assert!(matches!(r.outcome, Outcome::Differs(_)));
        let one = support_off(&g, 2, true).unwrap();
        assert_eq!(one.components().iter().filter(|c| !c.is_empty()).count(), 1);
        assert!(!one.component(crate::lattice::CosetId(1)).is_empty());
        let r = check_relation(
            Relation::UP { n: 2 },
            &one,
            SumMode::All,
            false,
            Tamper::None,
            "g",
        )
        .unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn tamper_is_caught_and_located() {
        let th = vv_theta(form(vec![vec![2]], 1), &Rational::integer(12)).unwrap();
        let r = check_relation(
            Relation::TMult { m: 2, n: 3 },
            &th,
            SumMode::All,
            true,
            Tamper::Prefactor,
            "theta",
        )
        .unwrap();
        assert!(!r.passed());
        let (_, m) = r.first_mismatch().unwrap();
        assert_eq!(m.left, m.right.scale(&Rational::integer(4)));
        let v = r.to_json();
        assert_eq!(v["status"], "fail");
        assert_eq!(v["relation"], "T-mult");
    }

    #[test]
    fn empty_range_is_an_error() {
        let th = vv_theta(form(vec![vec![2]], 1), &Rational::integer(1)).unwrap();
        let z = th.scale(&CycNumber::zero());
        assert!(check_relation(
            Relation::PU { n: 2 },
            &z,
            SumMode::All,
            true,
            Tamper::None,
            "zero"
        )
        .is_err());
    }
}
