//! Truncated q-expansions: single-component and vector-valued.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::arith::nt::lcm;
use crate::arith::{CycNumber, Rational};
use crate::error::{Error, Result};
use crate::lattice::{CosetId, DiscriminantForm};

pub type Weight = (Rational, Rational);

/// Adds `c` at `key`, dropping entries that cancel to zero.
pub(crate) fn add_into<K: Ord>(map: &mut BTreeMap<K, CycNumber>, key: K, c: &CycNumber) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c.clone());
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get() + c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

/// Σ c_m q^m over rational exponents `m ≤ trunc`.
#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    trunc: Rational,
    terms: BTreeMap<Rational, CycNumber>,
}

impl QSeries {
    pub fn new(trunc: Rational) -> QSeries {
        QSeries {
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Rational, CycNumber)>>(
        trunc: Rational,
        terms: I,
    ) -> QSeries {
        let mut s = QSeries::new(trunc);
        for (m, c) in terms {
            s.add_term(m, &c);
        }
        s
    }

    pub fn trunc(&self) -> &Rational {
        &self.trunc
    }

    pub fn terms(&self) -> &BTreeMap<Rational, CycNumber> {
        &self.terms
    }

    /// Adds `c·q^m`; ignored when `m > trunc`.
    pub fn add_term(&mut self, m: Rational, c: &CycNumber) {
        if m <= self.trunc {
            add_into(&mut self.terms, m, c);
        }
    }

    pub fn coefficient(&self, m: &Rational) -> CycNumber {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// `f((kτ + s)/l)`: `c·q^m ↦ c·𝒆(ms/l)·q^{mk/l}`.
    pub fn substitute(&self, k: u64, l: u64, s: u64) -> QSeries {
        let kl = Rational::frac(k as i64, l as i64);
        let sl = Rational::frac(s as i64, l as i64);
        let mut out = QSeries::new(&self.trunc * &kl);
        for (m, c) in &self.terms {
            out.add_term(m * &kl, &c.mul_e(&(m * &sl)));
        }
        out
    }

    pub fn scale(&self, c: &CycNumber) -> QSeries {
        let mut out = QSeries::new(self.trunc.clone());
        for (m, x) in &self.terms {
            out.add_term(m.clone(), &(x * c));
        }
        out
    }

    /// Sum, truncated to the smaller guarantee.
    pub fn add(&self, other: &QSeries) -> QSeries {
        let mut out = QSeries::new(self.trunc.clone().min(other.trunc.clone()));
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn truncate(&self, t: &Rational) -> QSeries {
        let t = t.clone().min(self.trunc.clone());
        QSeries {
            terms: self
                .terms
                .range(..=t.clone())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            trunc: t,
        }
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c})q^{m}"))
            .collect();
        write!(f, "{} + O(q^>{})", parts.join(" + "), self.trunc)
    }
}

/// A truncated ℂ[A]-valued q-series of type ρ for `A = form`.
#[derive(Clone)]
pub struct VVQSeries {
    form: Arc<DiscriminantForm>,
    weight: Weight,
    trunc: Rational,
    components: Vec<BTreeMap<Rational, CycNumber>>,
}

/// First coefficient at which two series differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub coset: Vec<i64>,
    pub exponent: Rational,
    pub left: CycNumber,
    pub right: CycNumber,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "coset {:?}, exponent {}: left = {}, right = {}",
            self.coset, self.exponent, self.left, self.right
        )
    }
}

impl VVQSeries {
    pub fn zero(form: Arc<DiscriminantForm>, weight: Weight, trunc: Rational) -> VVQSeries {
        let n = form.order();
        VVQSeries {
            form,
            weight,
            trunc,
            components: vec![BTreeMap::new(); n],
        }
    }

    /// Assembles a series from per-coset maps (terms above `trunc` are dropped).
    pub fn from_components(
        form: Arc<DiscriminantForm>,
        weight: Weight,
        trunc: Rational,
        components: Vec<BTreeMap<Rational, CycNumber>>,
    ) -> Result<VVQSeries> {
        if components.len() != form.order() {
            return Err(Error::Contract(format!(
                "{} components for a form of order {}",
                components.len(),
                form.order()
            )));
        }
        let components = components
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .filter(|(m, x)| *m <= trunc && !x.is_zero())
                    .collect()
            })
            .collect();
        Ok(VVQSeries {
            form,
            weight,
            trunc,
            components,
        })
    }

    pub fn form(&self) -> &DiscriminantForm {
        &self.form
    }

    pub fn form_arc(&self) -> &Arc<DiscriminantForm> {
        &self.form
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// `v + v̄`.
    pub fn weight_sum(&self) -> Rational {
        &self.weight.0 + &self.weight.1
    }

    pub fn trunc(&self) -> &Rational {
        &self.trunc
    }

    pub fn component(&self, id: CosetId) -> &BTreeMap<Rational, CycNumber> {
        &self.components[id.0]
    }

    pub fn components(&self) -> &[BTreeMap<Rational, CycNumber>] {
        &self.components
    }

    pub fn component_series(&self, id: CosetId) -> QSeries {
        QSeries {
            trunc: self.trunc.clone(),
            terms: self.components[id.0].clone(),
        }
    }

    pub fn add_term(&mut self, id: CosetId, m: Rational, c: &CycNumber) {
        if m <= self.trunc {
            add_into(&mut self.components[id.0], m, c);
        }
    }

    pub fn coefficient(&self, id: CosetId, m: &Rational) -> CycNumber {
        self.components[id.0].get(m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(BTreeMap::is_empty)
    }

    pub fn num_terms(&self) -> usize {
        self.components.iter().map(BTreeMap::len).sum()
    }

    /// Every exponent on component `λ` is `≡ q(λ) (mod 1)`.
    pub fn is_t_equivariant(&self) -> bool {
        self.form.ids().all(|id| {
            let q = self.form.q(id);
            self.components[id.0].keys().all(|m| (m - &q).is_integer())
        })
    }

    pub fn require_t_equivariant(&self) -> Result<()> {
        for id in self.form.ids() {
            let q = self.form.q(id);
            if let Some(m) = self.components[id.0]
                .keys()
                .find(|m| !(*m - &q).is_integer())
            {
                return Err(Error::Contract(format!(
                    "exponent {m} on coset {:?} is not ≡ q = {q} mod 1",
                    self.form.coords(id)
                )));
            }
        }
        Ok(())
    }

    /// lcm of the cyclotomic orders of all coefficients.
    pub fn zeta_order(&self) -> u64 {
        self.components
            .iter()
            .flat_map(|c| c.values())
            .fold(1, |acc, x| lcm(acc, x.order()))
    }

    pub fn truncate(&self, t: &Rational) -> VVQSeries {
        let t = t.clone().min(self.trunc.clone());
        VVQSeries {
            form: self.form.clone(),
            weight: self.weight.clone(),
            components: self
                .components
                .iter()
                .map(|c| {
                    c.range(..=t.clone())
                        .map(|(m, x)| (m.clone(), x.clone()))
                        .collect()
                })
                .collect(),
            trunc: t,
        }
    }

    fn check_same_type(&self, other: &VVQSeries) -> Result<()> {
        if !self.form.same_as(&other.form) {
            return Err(Error::Contract(format!(
                "series types differ: {:?} vs {:?}",
                self.form, other.form
            )));
        }
        if self.weight != other.weight {
            return Err(Error::Contract(format!(
                "weights differ: ({}, {}) vs ({}, {})",
                self.weight.0, self.weight.1, other.weight.0, other.weight.1
            )));
        }
        Ok(())
    }

    /// `self + c·other`, truncated to the smaller guarantee.
    pub fn add_scaled(&self, other: &VVQSeries, c: &CycNumber) -> Result<VVQSeries> {
        self.check_same_type(other)?;
        let mut out = self.truncate(&other.trunc);
        for id in other.form.ids() {
            for (m, x) in &other.components[id.0] {
                out.add_term(id, m.clone(), &(x * c));
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &VVQSeries) -> Result<VVQSeries> {
        self.add_scaled(other, &CycNumber::integer(-1))
    }

    pub fn scale(&self, c: &CycNumber) -> VVQSeries {
        let mut out = VVQSeries::zero(self.form.clone(), self.weight.clone(), self.trunc.clone());
        for (id, comp) in self.components.iter().enumerate() {
            for (m, x) in comp {
                out.add_term(CosetId(id), m.clone(), &(x * c));
            }
        }
        out
    }

    /// Compares on exponents `≤ min(trunc)`. `Ok(None)` means equal there.
    ///
    /// Errors when the types differ, or when no nonzero coefficient lies in
    /// range on either side (nothing would actually be compared).
    pub fn compare(&self, other: &VVQSeries) -> Result<Option<Mismatch>> {
        self.check_same_type(other)?;
        let t = self.trunc.clone().min(other.trunc.clone());
        let a = self.truncate(&t);
        let b = other.truncate(&t);
        if a.is_zero() && b.is_zero() {
            return Err(Error::EmptyComparison(format!(
                "both sides vanish up to q^{t}; nothing to compare"
            )));
        }
        for id in self.form.ids() {
            let (ca, cb) = (&a.components[id.0], &b.components[id.0]);
            let mut keys: Vec<&Rational> = ca.keys().chain(cb.keys()).collect();
            keys.sort();
            keys.dedup();
            for m in keys {
                let x = ca.get(m).cloned().unwrap_or_default();
                let y = cb.get(m).cloned().unwrap_or_default();
                if x != y {
                    return Ok(Some(Mismatch {
                        coset: self.form.coords(id),
                        exponent: m.clone(),
                        left: x,
                        right: y,
                    }));
                }
            }
        }
        Ok(None)
    }

    /// Exact structural equality: type, weight, truncation and all terms.
    pub fn identical(&self, other: &VVQSeries) -> bool {
        self.form.same_as(&other.form)
            && self.weight == other.weight
            && self.trunc == other.trunc
            && self.components == other.components
    }
}

impl fmt::Debug for VVQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "VVQSeries over {:?}, weight ({}, {}), trunc {}",
            self.form, self.weight.0, self.weight.1, self.trunc
        )?;
        for id in self.form.ids() {
            let comp = &self.components[id.0];
            if comp.is_empty() {
                continue;
            }
            let parts: Vec<String> = comp.iter().map(|(m, c)| format!("({c})q^{m}")).collect();
            writeln!(f, "  {:?}: {}", self.form.coords(id), parts.join(" + "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn substitute_examples() {
        let s = QSeries::from_terms(
            q(4, 1),
            [
                (q(1, 1), CycNumber::one()),
                (q(1, 4), CycNumber::integer(3)),
            ],
        );
        assert_eq!(s.substitute(1, 1, 0), s);
        let d = QSeries::from_terms(q(4, 1), [(q(1, 1), CycNumber::one())]).substitute(2, 1, 0);
        assert_eq!(d.terms().keys().cloned().collect::<Vec<_>>(), vec![q(2, 1)]);
        assert_eq!(*d.trunc(), q(8, 1));
        let p = QSeries::from_terms(q(1, 1), [(q(1, 4), CycNumber::one())]).substitute(1, 2, 1);
        assert_eq!(p.coefficient(&q(1, 8)), CycNumber::e_of(&q(1, 8)));
        assert_eq!(*p.trunc(), q(1, 2));
    }

    #[test]
    fn substitute_composes() {
        let s = QSeries::from_terms(q(6, 1), (0..7).map(|i| (q(i, 3), CycNumber::root(5, i))));
        for k in 1..4 {
            for l in 1..4 {
                assert_eq!(
                    s.substitute(k, 1, 0).substitute(1, l, 0),
                    s.substitute(k, l, 0)
                );
            }
        }
    }

    #[test]
    fn terms_above_trunc_are_dropped() {
        let mut s = QSeries::new(q(1, 1));
        s.add_term(q(2, 1), &CycNumber::one());
        s.add_term(q(1, 2), &CycNumber::one());
        s.add_term(q(1, 2), &CycNumber::integer(-1));
        assert!(s.terms().is_empty());
    }
}
