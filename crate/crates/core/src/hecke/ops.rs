//! The operators 𝒯_r, 𝒰_{n²}, 𝒫_{n²} and ℋ_{n²} on truncated series.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::arith::nt::divisors;
use crate::arith::{CycNumber, Rational, RootSum};
use crate::error::{Error, Result};
use crate::lattice::{CosetId, DiscriminantForm};
use crate::qseries::{hecke_prefactor, phase_sum, QSeries, SumMode, VVQSeries};

/// `v + v̄ + dim/2`, the weight sum that governs the Hecke prefactors.
pub fn hecke_weight_sum(psi: &VVQSeries) -> Rational {
    &psi.weight_sum() + &Rational::frac(psi.form().dim() as i64, 2)
}

fn scaled_form(psi: &VVQSeries, factor: u64) -> Result<Arc<DiscriminantForm>> {
    if factor == 1 {
        return Ok(psi.form_arc().clone());
    }
    let scale = psi
        .form()
        .scale()
        .checked_mul(factor)
        .ok_or_else(|| Error::TooLarge("scale overflow".into()))?;
    Ok(Arc::new(DiscriminantForm::new(
        psi.form().lattice(),
        scale,
    )?))
}

fn divided_form(psi: &VVQSeries, n2: u64) -> Result<Arc<DiscriminantForm>> {
    let r = psi.form().scale();
    if n2 == 0 || !r.is_multiple_of(n2) {
        return Err(Error::Contract(format!(
            "series has scale {r}, which is not divisible by {n2}"
        )));
    }
    if n2 == 1 {
        return Ok(psi.form_arc().clone());
    }
    Ok(Arc::new(DiscriminantForm::new(
        psi.form().lattice(),
        r / n2,
    )?))
}

/// `𝒯_r`: type ρ_{L(R)} → ρ_{L(Rr)}, weight preserved, truncation divided by `r`.
///
/// Component `μ` collects, for each `kl = r` with `μ ∈ A(Rl)`, the terms
/// `c·q^m` of `ψ_{lμ}` moved to `q^{mk/l}`; the translation sum over `s`
/// collapses to [`phase_sum`] of `j = m − (l/k)·q_{Rr}(μ)`.
pub fn t_op(psi: &VVQSeries, r: u64, mode: SumMode) -> Result<VVQSeries> {
    if r == 0 {
        return Err(Error::Contract("𝒯_r needs r ≥ 1".into()));
    }
    psi.require_t_equivariant()?;
    let src = psi.form();
    let dst = scaled_form(psi, r)?;
    let wsum = hecke_weight_sum(psi);
    let base = src.scale();
    let pairs: Vec<(u64, u64, CycNumber)> = divisors(r)
        .into_iter()
        .map(|l| hecke_prefactor(r, l, &wsum).map(|p| (r / l, l, p)))
        .collect::<Result<_>>()?;
    let trunc = psi.trunc() / &Rational::integer(r as i64);
    let comps = dst
        .ids()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|mu| -> Result<BTreeMap<Rational, CycNumber>> {
            let mut acc: BTreeMap<Rational, RootSum> = BTreeMap::new();
            for (k, l, pref) in &pairs {
                if !dst.contains_scale(mu, base * l) {
                    continue;
                }
                let lm = dst.mul_to(mu, *l as i64, src)?;
                let kl = Rational::frac(*k as i64, *l as i64);
                let big_q = dst.qnorm(mu) * &Rational::frac(*l as i64, *k as i64);
                for (m, c) in psi.component(lm) {
                    let e = m * &kl;
                    if e > trunc {
                        break;
                    }
                    let j = (m - &big_q).to_i64().ok_or_else(|| {
                        Error::Contract(format!("exponent {m} off the q-congruence"))
                    })?;
                    let s = phase_sum(*k, *l, j, mode);
                    if s != 0 {
                        acc.entry(e)
                            .or_insert_with(|| RootSum::new(1))
                            .add_cyc(&(c * pref), &Rational::integer(s));
                    }
                }
            }
            Ok(acc
                .into_iter()
                .map(|(e, s)| (e, s.finish()))
                .filter(|(_, c)| !c.is_zero())
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    VVQSeries::from_components(dst, psi.weight().clone(), trunc, comps)
}

/// Reference 𝒯_r built literally from `Δ`, the phase `𝒆(−(s/k)·q(μ))` and
/// the substitution `τ ↦ (kτ + s)/l`, one translation at a time.
pub fn t_op_literal(psi: &VVQSeries, r: u64, mode: SumMode) -> Result<VVQSeries> {
    if r == 0 {
        return Err(Error::Contract("𝒯_r needs r ≥ 1".into()));
    }
    let src = psi.form();
    let dst = scaled_form(psi, r)?;
    let wsum = hecke_weight_sum(psi);
    let trunc = psi.trunc() / &Rational::integer(r as i64);
    let mut out = VVQSeries::zero(dst.clone(), psi.weight().clone(), trunc.clone());
    for mu in dst.ids() {
        let mut comp = QSeries::new(trunc.clone());
        for l in divisors(r) {
            let k = r / l;
            if !dst.delta(mu, k)? {
                continue;
            }
            let pref = hecke_prefactor(r, l, &wsum)?;
            let lm = dst.mul_to(mu, l as i64, src)?;
            let input = psi.component_series(lm);
            for s in (0..l).filter(|&s| mode.keeps(k, l, s)) {
                let phase = -&(dst.qnorm(mu) * &Rational::frac(s as i64, k as i64));
                let g = input.substitute(k, l, s).scale(&pref.mul_e(&phase));
                comp = comp.add(&g);
            }
        }
        for (m, c) in comp.terms() {
            out.add_term(mu, m.clone(), c);
        }
    }
    out.require_t_equivariant()?;
    Ok(out)
}

/// `𝒰_{n²}`: type ρ_{L(R)} → ρ_{L(Rn²)}, `ν ↦ Δ(ν, n)·ψ_{nν}`.
pub fn u_op(psi: &VVQSeries, n: u64) -> Result<VVQSeries> {
    if n == 0 {
        return Err(Error::Contract("𝒰_{n²} needs n ≥ 1".into()));
    }
    let src = psi.form();
    let dst = scaled_form(psi, n * n)?;
    let mut comps = vec![BTreeMap::new(); dst.order()];
    for nu in dst.ids() {
        if dst.contains_scale(nu, src.scale() * n) {
            let t = dst.mul_to(nu, n as i64, src)?;
            comps[nu.0] = psi.component(t).clone();
        }
    }
    VVQSeries::from_components(dst, psi.weight().clone(), psi.trunc().clone(), comps)
}

/// `𝒫_{n²}`: type ρ_{L(R)} → ρ_{L(R/n²)}, `λ ↦ n^{−dim} Σ_{γ ∈ A(R/n), nγ = λ} ψ_γ`.
pub fn p_op(psi: &VVQSeries, n: u64) -> Result<VVQSeries> {
    if n == 0 {
        return Err(Error::Contract("𝒫_{n²} needs n ≥ 1".into()));
    }
    let src = psi.form();
    let dst = divided_form(psi, n * n)?;
    let c = CycNumber::rational(Rational::integer(n as i64).pow(-(src.dim() as i32)));
    let mut out = VVQSeries::zero(dst.clone(), psi.weight().clone(), psi.trunc().clone());
    for g in src.ids() {
        if !src.contains_scale(g, dst.scale() * n) {
            continue;
        }
        let lam = src.mul_to(g, n as i64, &dst)?;
        for (m, x) in psi.component(g) {
            out.add_term(lam, m.clone(), &(x * &c));
        }
    }
    Ok(out)
}

/// `ℋ_{n²} = 𝒫_{n²} ∘ 𝒯_{n²}`.
pub fn h_op(psi: &VVQSeries, n: u64, mode: SumMode) -> Result<VVQSeries> {
    p_op(&t_op(psi, n * n, mode)?, n)
}

/// `ℋ_{n²}` from its closed double-`Δ` formula:
///
/// `ℋ[ψ]_λ = n^{2(v+v̄−1)} Σ_{kl=n²} l^{−(v+v̄+dim/2)} Σ_γ Σ_s 𝒆(−(s/k)q(γ)) ψ_{lγ}((kτ+s)/l)`
/// over `γ ∈ A(Rn²)` with `nγ = λ`, `Δ(γ, n)` and `Δ(γ, k)`.
pub fn h_op_closed(psi: &VVQSeries, n: u64, mode: SumMode) -> Result<VVQSeries> {
    if n == 0 {
        return Err(Error::Contract("ℋ_{n²} needs n ≥ 1".into()));
    }
    psi.require_t_equivariant()?;
    let base = psi.form();
    let r = n * n;
    let big = scaled_form(psi, r)?;
    let vsum = psi.weight_sum();
    let wsum = hecke_weight_sum(psi);
    let outer =
        crate::arith::pow_rational(n, &(&(&vsum - &Rational::one()) * &Rational::integer(2)))?;
    let trunc = psi.trunc() / &Rational::integer(r as i64);
    let gammas: Vec<CosetId> = big
        .ids()
        .filter(|&g| big.contains_scale(g, base.scale() * n))
        .collect();
    let mut acc: Vec<BTreeMap<Rational, RootSum>> = vec![BTreeMap::new(); base.order()];
    for l in divisors(r) {
        let k = r / l;
        let pref = &outer * &crate::arith::pow_rational(l, &-&wsum)?;
        let kl = Rational::frac(k as i64, l as i64);
        for &g in &gammas {
            if !big.contains_scale(g, base.scale() * l) {
                continue;
            }
            let lam = big.mul_to(g, n as i64, base)?;
            let src = big.mul_to(g, l as i64, base)?;
            let big_q = big.qnorm(g) * &Rational::frac(l as i64, k as i64);
            for (m, c) in psi.component(src) {
                let e = m * &kl;
                if e > trunc {
                    break;
                }
                let j = (m - &big_q).to_i64().expect("T-equivariant input");
                let s = phase_sum(k, l, j, mode);
                if s != 0 {
                    acc[lam.0]
                        .entry(e)
                        .or_insert_with(|| RootSum::new(1))
                        .add_cyc(&(c * &pref), &Rational::integer(s));
                }
            }
        }
    }
    let comps = acc
        .into_iter()
        .map(|m| m.into_iter().map(|(e, s)| (e, s.finish())).collect())
        .collect();
    VVQSeries::from_components(psi.form_arc().clone(), psi.weight().clone(), trunc, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::qseries::{pairing, scalar_hecke, vv_theta};

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn theta(g: &[&[i64]], r: u64, t: i64) -> VVQSeries {
        let l = Lattice::new(g.iter().map(|x| x.to_vec()).collect()).unwrap();
        vv_theta(Arc::new(DiscriminantForm::new(&l, r).unwrap()), &q(t, 1)).unwrap()
    }

    #[test]
    fn identity_cases() {
        let th = theta(&[&[2]], 1, 8);
        assert!(t_op(&th, 1, SumMode::All).unwrap().identical(&th));
        assert!(u_op(&th, 1).unwrap().identical(&th));
        assert!(p_op(&th, 1).unwrap().identical(&th));
        assert!(h_op(&th, 1, SumMode::All).unwrap().identical(&th));
    }

    #[test]
    fn fast_and_literal_t_agree() {
        for (g, t) in [(&[&[2i64][..]][..], 24), (&[&[2, 1], &[1, 2]], 12)] {
            let th = theta(g, 1, t);
            for r in [2u64, 3, 4, 6] {
                for mode in [SumMode::All, SumMode::DoubleCoset] {
                    let a = t_op(&th, r, mode).unwrap();
                    let b = t_op_literal(&th, r, mode).unwrap();
                    assert!(a.identical(&b), "{g:?} r={r} {mode:?}");
                    assert!(a.is_t_equivariant());
                }
            }
        }
    }

    #[test]
    fn u_examples() {
        let th = theta(&[&[2]], 1, 4);
        let u = u_op(&th, 2).unwrap();
        assert_eq!(u.form().scale(), 4);
        // ν = ¼ = 2/8 carries ψ_{½}; ν = ⅛ carries nothing
        assert_eq!(u.component(CosetId(2)), th.component(CosetId(1)));
        assert!(u.component(CosetId(1)).is_empty());
        assert_eq!(u.component(CosetId(4)), th.component(CosetId(0)));
    }

    #[test]
    fn p_examples() {
        let th = theta(&[&[2]], 4, 4);
        let p = p_op(&th, 2).unwrap();
        let m = q(0, 1);
        let expect =
            (&th.coefficient(CosetId(0), &m) + &th.coefficient(CosetId(4), &m)).scale(&q(1, 2));
        assert_eq!(p.coefficient(CosetId(0), &m), expect);
        assert!(p_op(&theta(&[&[2]], 2, 2), 2).is_err());
        // 𝒫∘𝒰 = I
        let base = theta(&[&[2]], 1, 6);
        for n in [2u64, 3] {
            assert!(p_op(&u_op(&base, n).unwrap(), n).unwrap().identical(&base));
        }
    }

    #[test]
    fn u_pairing_consistency() {
        for g in [&[&[2i64][..]][..], &[&[2, 1], &[1, 2]]] {
            let th = theta(g, 1, 6);
            for n in [2u64, 3] {
                let big = theta(g, n * n, 6);
                let lhs = pairing(&u_op(&th, n).unwrap(), &big).unwrap();
                assert!(lhs.agrees_with(&pairing(&th, &th).unwrap()), "{g:?} n={n}");
            }
        }
    }

    #[test]
    fn h_composition_matches_closed_formula() {
        let th = theta(&[&[2]], 1, 8);
        for mode in [SumMode::All, SumMode::DoubleCoset] {
            let a = h_op(&th, 2, mode).unwrap();
            let b = h_op_closed(&th, 2, mode).unwrap();
            assert!(a.identical(&b), "{mode:?}");
            assert!(!a.is_zero());
        }
    }

    #[test]
    fn pairing_lift_small() {
        let th = theta(&[&[2]], 1, 12);
        let lhs = scalar_hecke(&pairing(&th, &th).unwrap(), 2, SumMode::All).unwrap();
        let t2 = t_op(&th, 2, SumMode::All).unwrap();
        let big = theta(&[&[2]], 2, 12);
        let rhs = pairing(&t2, &big).unwrap();
        assert!(lhs.agrees_with(&rhs));
    }
}
