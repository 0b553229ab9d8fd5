//! Bigraded series in `q` and `q̄`, theta pairings, scalar Hecke operators.

use std::collections::BTreeMap;
use std::fmt;

use super::series::{add_into, VVQSeries, Weight};
use crate::arith::nt::{divisors, gcd, mobius};
use crate::arith::{pow_rational, CycNumber, Rational};
use crate::error::{Error, Result};

/// Which translations `s` enter the Hecke sums over `(k, l, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumMode {
    /// All `s` in `0..l`.
    #[default]
    All,
    /// Only `s` with `gcd(k, l, s) = 1` (primitive matrices, one double coset).
    DoubleCoset,
}

impl SumMode {
    /// Whether a translation `s` is kept for the pair `(k, l)`.
    pub fn keeps(self, k: u64, l: u64, s: u64) -> bool {
        match self {
            SumMode::All => true,
            SumMode::DoubleCoset => gcd(gcd(k, l), s) == 1,
        }
    }
}

/// `Σ_s 𝒆(j·s/l)` over the translations kept by `mode`; always an integer.
pub fn phase_sum(k: u64, l: u64, j: i64, mode: SumMode) -> i64 {
    let full = |len: u64| {
        if j.rem_euclid(len as i64) == 0 {
            len as i64
        } else {
            0
        }
    };
    match mode {
        SumMode::All => full(l),
        // Möbius inclusion–exclusion over common divisors d of k and l
        SumMode::DoubleCoset => divisors(gcd(k, l))
            .into_iter()
            .map(|d| mobius(d) * full(l / d))
            .sum(),
    }
}

/// `r^{w−1} · l^{−w}` for the weight sum `w = w₁ + w₂`.
pub fn hecke_prefactor(r: u64, l: u64, wsum: &Rational) -> Result<CycNumber> {
    let a = pow_rational(r, &(wsum - &Rational::one()))?;
    let b = pow_rational(l, &-wsum)?;
    Ok(&a * &b)
}

/// Σ c·q^m·q̄^m̄ with `m − m̄ ∈ ℤ`, guaranteed for `m, m̄ ≤ trunc`.
#[derive(Clone, PartialEq, Eq)]
pub struct MixedQSeries {
    weight: Weight,
    trunc: Rational,
    terms: BTreeMap<(Rational, Rational), CycNumber>,
}

impl MixedQSeries {
    pub fn new(weight: Weight, trunc: Rational) -> MixedQSeries {
        MixedQSeries {
            weight,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    /// A pure-`q` series (no `q̄` dependence).
    pub fn holomorphic<I: IntoIterator<Item = (Rational, CycNumber)>>(
        weight: Weight,
        trunc: Rational,
        terms: I,
    ) -> Result<MixedQSeries> {
        let mut s = MixedQSeries::new(weight, trunc);
        for (m, c) in terms {
            s.add_term(m, Rational::zero(), &c)?;
        }
        Ok(s)
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn trunc(&self) -> &Rational {
        &self.trunc
    }

    pub fn terms(&self) -> &BTreeMap<(Rational, Rational), CycNumber> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·q^m q̄^m̄`; ignored outside the truncation box.
    pub fn add_term(&mut self, m: Rational, mbar: Rational, c: &CycNumber) -> Result<()> {
        if !(&m - &mbar).is_integer() {
            return Err(Error::Contract(format!(
                "term q^{m} q̄^{mbar} has non-integral m − m̄"
            )));
        }
        if m <= self.trunc && mbar <= self.trunc {
            add_into(&mut self.terms, (m, mbar), c);
        }
        Ok(())
    }

    /// Inserts without the `m − m̄ ∈ ℤ` check (intermediate substitution results).
    fn add_term_raw(&mut self, m: Rational, mbar: Rational, c: &CycNumber) {
        if m <= self.trunc && mbar <= self.trunc {
            add_into(&mut self.terms, (m, mbar), c);
        }
    }

    /// Whether every stored term has `m − m̄ ∈ ℤ`.
    pub fn is_well_graded(&self) -> bool {
        self.terms.keys().all(|(m, mb)| (m - mb).is_integer())
    }

    pub fn coefficient(&self, m: &Rational, mbar: &Rational) -> CycNumber {
        self.terms
            .get(&(m.clone(), mbar.clone()))
            .cloned()
            .unwrap_or_default()
    }

    /// `f((kτ + s)/l)`: `c·q^m q̄^m̄ ↦ c·𝒆((m − m̄)s/l)·q^{mk/l} q̄^{m̄k/l}`.
    ///
    /// A single substitution may leave `m − m̄` non-integral; such terms
    /// cancel only after summing over `s`.
    pub fn substitute(&self, k: u64, l: u64, s: u64) -> MixedQSeries {
        let kl = Rational::frac(k as i64, l as i64);
        let sl = Rational::frac(s as i64, l as i64);
        let mut out = MixedQSeries::new(self.weight.clone(), &self.trunc * &kl);
        for ((m, mb), c) in &self.terms {
            let ph = &(m - mb) * &sl;
            out.add_term_raw(m * &kl, mb * &kl, &c.mul_e(&ph));
        }
        out
    }

    pub fn scale(&self, c: &CycNumber) -> MixedQSeries {
        let mut out = MixedQSeries::new(self.weight.clone(), self.trunc.clone());
        for (key, x) in &self.terms {
            add_into(&mut out.terms, key.clone(), &(x * c));
        }
        out
    }

    /// Sum truncated to the smaller guarantee; weights must match.
    pub fn add(&self, other: &MixedQSeries) -> Result<MixedQSeries> {
        if self.weight != other.weight {
            return Err(Error::Contract("adding series of different weights".into()));
        }
        let t = self.trunc.clone().min(other.trunc.clone());
        let mut out = MixedQSeries::new(self.weight.clone(), t);
        for ((m, mb), c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(m.clone(), mb.clone(), c)?;
        }
        Ok(out)
    }

    pub fn truncate(&self, t: &Rational) -> MixedQSeries {
        let t = t.clone().min(self.trunc.clone());
        let mut out = MixedQSeries::new(self.weight.clone(), t);
        for ((m, mb), c) in &self.terms {
            out.add_term(m.clone(), mb.clone(), c)
                .expect("already valid");
        }
        out
    }

    /// Equality of weights and of all terms within the common truncation box.
    pub fn agrees_with(&self, other: &MixedQSeries) -> bool {
        let t = self.trunc.clone().min(other.trunc.clone());
        self.weight == other.weight && self.truncate(&t).terms == other.truncate(&t).terms
    }
}

impl fmt::Debug for MixedQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((m, mb), c)| format!("({c})q^{m}q̄^{mb}"))
            .collect();
        write!(
            f,
            "[weight ({}, {}), trunc {}] {}",
            self.weight.0,
            self.weight.1,
            self.trunc,
            parts.join(" + ")
        )
    }
}

/// `⟨ψ, Θ⟩ = Σ_λ ψ_λ · conj(θ_λ)`, with `θ`'s exponents moved to `q̄`.
pub fn pairing(psi: &VVQSeries, theta: &VVQSeries) -> Result<MixedQSeries> {
    if !psi.form().same_as(theta.form()) {
        return Err(Error::Contract(format!(
            "pairing needs one discriminant form, got {:?} and {:?}",
            psi.form(),
            theta.form()
        )));
    }
    let (bp, bm) = psi.form().lattice().signature();
    let weight = (
        &psi.weight().0 + &Rational::frac(bp as i64, 2),
        &psi.weight().1 + &Rational::frac(bm as i64, 2),
    );
    let t = psi.trunc().clone().min(theta.trunc().clone());
    let mut out = MixedQSeries::new(weight, t);
    for id in psi.form().ids() {
        let th = theta.component(id);
        if th.is_empty() {
            continue;
        }
        for (m, c) in psi.component(id) {
            for (mb, d) in th {
                out.add_term(m.clone(), mb.clone(), &(c * &d.conj()))?;
            }
        }
    }
    Ok(out)
}

/// `T_r f = r^{w−1} Σ_{kl=r} l^{−w} Σ_s f((kτ+s)/l)`, `w` the weight sum.
///
/// The `s`-sum is evaluated in closed form through [`phase_sum`].
pub fn scalar_hecke(f: &MixedQSeries, r: u64, mode: SumMode) -> Result<MixedQSeries> {
    if r == 0 {
        return Err(Error::Contract("Hecke index must be positive".into()));
    }
    let wsum = &f.weight.0 + &f.weight.1;
    let mut out = MixedQSeries::new(f.weight.clone(), &f.trunc / &Rational::integer(r as i64));
    for l in divisors(r) {
        let k = r / l;
        let pref = hecke_prefactor(r, l, &wsum)?;
        let kl = Rational::frac(k as i64, l as i64);
        for ((m, mb), c) in &f.terms {
            let j = (m - mb).to_i64().expect("m − m̄ is a machine integer");
            let s = phase_sum(k, l, j, mode);
            if s != 0 {
                let coeff = (c * &pref).scale(&Rational::integer(s));
                out.add_term(m * &kl, mb * &kl, &coeff)?;
            }
        }
    }
    Ok(out)
}

/// Literal form of [`scalar_hecke`]: sums `substitute(k, l, s)` term by term.
pub fn scalar_hecke_literal(f: &MixedQSeries, r: u64, mode: SumMode) -> Result<MixedQSeries> {
    let wsum = &f.weight.0 + &f.weight.1;
    let mut out = MixedQSeries::new(f.weight.clone(), &f.trunc / &Rational::integer(r as i64));
    for l in divisors(r) {
        let k = r / l;
        let pref = hecke_prefactor(r, l, &wsum)?;
        for s in (0..l).filter(|&s| mode.keeps(k, l, s)) {
            let g = f.substitute(k, l, s).scale(&pref);
            for ((m, mb), c) in &g.terms {
                out.add_term_raw(m.clone(), mb.clone(), c);
            }
        }
    }
    if !out.is_well_graded() {
        return Err(Error::Contract(
            "translation sum left a term with m − m̄ ∉ ℤ".into(),
        ));
    }
    Ok(out)
}

/// The scaling operator acts only through the Jacobi variables, which are
/// fixed to zero here, so it is the identity on these series.
pub fn scalar_u(f: &MixedQSeries, _n: u64) -> MixedQSeries {
    f.clone()
}
