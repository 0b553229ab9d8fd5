//! Verification suites over a fixed set of lattices.

use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::{CycMatrix, CycNumber, Rational};
use crate::error::{Error, Result};
use crate::hecke::{check_relation, generic, support_off, Relation, Tamper};
use crate::lattice::{DiscriminantForm, Lattice};
use crate::qseries::{
    brute_force_counts, pairing, scalar_hecke, theta_rescaling_identity, vv_theta, SumMode,
    VVQSeries,
};
use crate::weil::{check_subrep, Generator, WeilRep};

/// `[[2]]`, `[[−2]]`, `[[2,0],[0,2]]`, `[[2,1],[1,2]]`, `[[0,1],[1,0]]`, `[[2,0],[0,−2]]`.
pub fn builtin_lattices() -> Vec<Vec<Vec<i64>>> {
    vec![
        vec![vec![2]],
        vec![vec![-2]],
        vec![vec![2, 0], vec![0, 2]],
        vec![vec![2, 1], vec![1, 2]],
        vec![vec![0, 1], vec![1, 0]],
        vec![vec![2, 0], vec![0, -2]],
    ]
}

fn positive() -> Vec<Vec<Vec<i64>>> {
    builtin_lattices()
        .into_iter()
        .filter(|g| Lattice::new(g.clone()).is_ok_and(|l| l.is_positive_definite()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Weil,
    Theta,
    Hecke,
    Bs,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        Ok(match s {
            "weil" => Suite::Weil,
            "theta" => Suite::Theta,
            "hecke" => Suite::Hecke,
            "bs" => Suite::Bs,
            "all" => Suite::All,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

/// One line of suite output.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub record: Value,
}

impl Check {
    fn new(name: String, passed: bool, detail: String) -> Check {
        let record = json!({"check": name, "status": if passed { "pass" } else { "fail" }, "detail": detail});
        Check {
            name,
            passed,
            detail,
            record,
        }
    }

    fn from_result(name: String, r: Result<(bool, String)>) -> Check {
        match r {
            Ok((p, d)) => Check::new(name, p, d),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

type Job = Box<dyn Fn() -> Result<(bool, String)> + Send + Sync>;

fn form(g: &[Vec<i64>], r: u64) -> Result<Arc<DiscriminantForm>> {
    Ok(Arc::new(DiscriminantForm::new(
        &Lattice::new(g.to_vec())?,
        r,
    )?))
}

fn is_unitary(m: &CycMatrix) -> bool {
    (m * &m.conj_transpose()).is_identity()
}

fn weil_checks() -> Vec<Check> {
    let mut jobs: Vec<(String, Job)> = Vec::new();
    for g in builtin_lattices() {
        jobs.push((
            format!("weil unitary L={g:?}"),
            Box::new(move || {
                let w = WeilRep::new(form(&g, 1)?);
                let ok = is_unitary(&w.rho_t()?) && is_unitary(&w.rho_s()?);
                Ok((ok, format!("|A| = {}", w.form().order())))
            }),
        ));
    }
    for g in builtin_lattices() {
        jobs.push((
            format!("weil (ST)^3 = S^2 L={g:?}"),
            Box::new(move || {
                let w = WeilRep::new(form(&g, 1)?);
                let st = w.rho_word(&[Generator::S, Generator::T])?;
                let lhs = &(&st * &st) * &st;
                let s = w.rho_s()?;
                Ok((lhs == &s * &s, String::new()))
            }),
        ));
    }
    for g in positive() {
        for n in [2u64, 3] {
            let g = g.clone();
            jobs.push((
                format!("weil subrep n={n} L={g:?}"),
                Box::new(move || {
                    let big = form(&g, n * n)?;
                    Ok((
                        check_subrep(&big, n)?,
                        format!("|A({})| = {}", n * n, big.order()),
                    ))
                }),
            ));
        }
    }
    jobs.into_par_iter()
        .map(|(n, f)| Check::from_result(n, f()))
        .collect()
}

fn theta_checks() -> Vec<Check> {
    let mut jobs: Vec<(String, Job)> = Vec::new();
    for g in builtin_lattices() {
        let pos = Lattice::new(g.clone()).is_ok_and(|l| l.is_positive_definite());
        if !pos {
            jobs.push((
                format!("theta L={g:?}"),
                Box::new(|| Ok((true, "skipped: not positive definite".into()))),
            ));
            continue;
        }
        for r in [1u64, 2] {
            let g = g.clone();
            jobs.push((
                format!("theta point counts r={r} L={g:?}"),
                Box::new(move || {
                    let f = form(&g, r)?;
                    let t = Rational::integer(4);
                    let th = vv_theta(f.clone(), &t)?;
                    let oracle = brute_force_counts(&f, &t)?;
                    let bad = f.ids().find(|&id| {
                        let got: std::collections::BTreeMap<Rational, CycNumber> = oracle[id.0]
                            .iter()
                            .map(|(m, c)| (m.clone(), CycNumber::integer(*c)))
                            .collect();
                        &got != th.component(id)
                    });
                    Ok(match bad {
                        None => (true, String::new()),
                        Some(id) => (
                            false,
                            format!("coset {:?} differs from the point count", f.coords(id)),
                        ),
                    })
                }),
            ));
        }
    }
    for r in [4u64, 9] {
        jobs.push((
            format!("theta rescaling identity r={r} L=[[2]]"),
            Box::new(move || rescaling(&[vec![2]], r, &Rational::integer(6))),
        ));
    }
    for g in positive() {
        for r in [2u64, 3, 4] {
            let g = g.clone();
            jobs.push((
                format!("theta pairing lift r={r} L={g:?}"),
                Box::new(move || pairing_lift(&g, r, &Rational::integer(12))),
            ));
        }
    }
    jobs.into_par_iter()
        .map(|(n, f)| Check::from_result(n, f()))
        .collect()
}

/// All `(γ, k, l, s)` instances of the theta rescaling identity.
pub fn rescaling(g: &[Vec<i64>], r: u64, trunc: &Rational) -> Result<(bool, String)> {
    let base = form(g, 1)?;
    let cases = theta_rescaling_identity(&base, r, trunc)?;
    let n = cases.len();
    Ok(match cases.into_iter().find(|c| c.mismatch.is_some()) {
        None => (true, format!("{n} cases")),
        Some(c) => {
            let (m, a, b) = c.mismatch.unwrap();
            (
                false,
                format!(
                    "γ={:?} k={} l={} s={}: q^{m}: {a} vs {b}",
                    c.gamma, c.k, c.l, c.s
                ),
            )
        }
    })
}

/// Scalar `T_r` of `⟨Θ, Θ⟩` against `⟨𝒯_r Θ, Θ_{L(r)}⟩`.
pub fn pairing_lift(g: &[Vec<i64>], r: u64, trunc: &Rational) -> Result<(bool, String)> {
    let th = vv_theta(form(g, 1)?, trunc)?;
    let big = vv_theta(form(g, r)?, trunc)?;
    let lhs = scalar_hecke(&pairing(&th, &th)?, r, SumMode::All)?;
    let rhs = pairing(&crate::hecke::t_op(&th, r, SumMode::All)?, &big)?;
    if lhs.is_zero() && rhs.is_zero() {
        return Err(Error::EmptyComparison("both pairings vanish".into()));
    }
    let t = lhs.trunc().clone().min(rhs.trunc().clone());
    Ok((
        lhs.agrees_with(&rhs),
        format!("up to q^{t}, {} terms", lhs.terms().len()),
    ))
}

/// Which input a relation is evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum Input {
    Theta,
    Generic(u64),
}

/// Builds the input for `rel` on base lattice `g` so that every output keeps truncation ≥ 2.
pub fn relation_input(rel: Relation, g: &[Vec<i64>], input: Input) -> Result<VVQSeries> {
    let f = form(g, rel.input_scale())?;
    let t = Rational::integer(2 * rel.shrink() as i64);
    match input {
        Input::Theta => vv_theta(f, &t),
        Input::Generic(seed) => generic(f, &t, seed),
    }
}

fn input_name(i: Input) -> String {
    match i {
        Input::Theta => "theta".into(),
        Input::Generic(s) => format!("generic(seed={s})"),
    }
}

/// A relation instance: identity, base lattice, input and summation mode.
#[derive(Debug, Clone)]
pub struct Instance {
    pub relation: Relation,
    pub lattice: Vec<Vec<i64>>,
    pub input: Input,
    pub mode: SumMode,
    pub negative: bool,
}

impl Instance {
    pub fn run(&self, tamper: Tamper) -> Check {
        let name = format!(
            "{} {} L={:?} input={}",
            if self.negative { "control" } else { "hecke" },
            self.relation,
            self.lattice,
            input_name(self.input)
        );
        let res = (|| {
            let mut psi = relation_input(self.relation, &self.lattice, self.input)?;
            if self.negative {
                let n = (self.relation.input_scale() as f64).sqrt() as u64;
                psi = support_off(&psi, n, matches!(self.relation, Relation::UP { .. }))?;
            }
            check_relation(
                self.relation,
                &psi,
                self.mode,
                !self.negative,
                tamper,
                &input_name(self.input),
            )
        })();
        match res {
            Ok(rep) => Check {
                name,
                passed: rep.passed(),
                detail: rep.to_string(),
                record: rep.to_json(),
            },
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

/// Relation instances of the hecke suite.
pub fn hecke_instances(seed: u64) -> Vec<Instance> {
    let mut rels = vec![
        Relation::TMult { m: 2, n: 3 },
        Relation::UTComm { n: 2, m: 3 },
        Relation::UTComm { n: 3, m: 2 },
        Relation::PComp { m: 2, n: 3 },
        Relation::PTComm { m: 2, n: 3 },
        Relation::PTComm { m: 3, n: 2 },
        Relation::HMult { m: 2, n: 3 },
        Relation::HClosed { n: 2 },
        Relation::HClosed { n: 3 },
    ];
    for p in [2u64, 3] {
        rels.push(Relation::TRec { p, l: 2 });
        rels.push(Relation::HRec { p, l: 2 });
    }
    for n in [2u64, 3, 6] {
        rels.push(Relation::PU { n });
    }
    let mut out = Vec::new();
    for g in positive() {
        for &relation in &rels {
            out.push(Instance {
                relation,
                lattice: g.clone(),
                input: Input::Theta,
                mode: SumMode::All,
                negative: false,
            });
        }
    }
    let a1 = vec![vec![2]];
    for &relation in &rels {
        out.push(Instance {
            relation,
            lattice: a1.clone(),
            input: Input::Generic(seed),
            mode: SumMode::All,
            negative: false,
        });
    }
    for p in [2u64, 3] {
        out.push(Instance {
            relation: Relation::TRec { p, l: 3 },
            lattice: a1.clone(),
            input: Input::Theta,
            mode: SumMode::All,
            negative: false,
        });
    }
    for relation in [Relation::PTComm { m: 2, n: 2 }, Relation::UP { n: 2 }] {
        out.push(Instance {
            relation,
            lattice: a1.clone(),
            input: Input::Generic(seed),
            mode: SumMode::All,
            negative: true,
        });
    }
    out
}

/// Relation instances of the bs suite.
pub fn bs_instances(seed: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for (g, input) in [
        (vec![vec![2]], Input::Theta),
        (vec![vec![2, 1], vec![1, 2]], Input::Theta),
        (vec![vec![2]], Input::Generic(seed)),
    ] {
        for l in [1u32, 2] {
            out.push(Instance {
                relation: Relation::BsEquiv { p: 3, l },
                lattice: g.clone(),
                input,
                mode: SumMode::DoubleCoset,
                negative: false,
            });
        }
    }
    out
}

/// Runs a suite; output order is fixed regardless of scheduling.
pub fn run_suite(suite: Suite, seed: u64, tamper: Tamper) -> Vec<Check> {
    match suite {
        Suite::Weil => weil_checks(),
        Suite::Theta => theta_checks(),
        Suite::Hecke => hecke_instances(seed)
            .par_iter()
            .map(|i| i.run(tamper))
            .collect(),
        Suite::Bs => bs_instances(seed)
            .par_iter()
            .map(|i| i.run(tamper))
            .collect(),
        Suite::All => [Suite::Weil, Suite::Theta, Suite::Hecke, Suite::Bs]
            .into_iter()
            .flat_map(|s| run_suite(s, seed, tamper))
            .collect(),
    }
}
