//! The explicit three-family formula for `ℋ_{p^{2l}}`, `p` an odd prime.
//!
//! Components are split by the shape of the coset representative
//! `diag(p^{2l−a}, p^a)` with translation `b`: the `a = 0` part (`C_α`),
//! the middle ranks `0 < a < 2l` with `p ∤ b` (`C_β`), and `a = 2l` (`C_γ`).

use std::collections::BTreeMap;

use crate::arith::nt::is_prime;
use crate::arith::{pow_rational, CycNumber, Rational, RootSum};
use crate::error::{Error, Result};
use crate::lattice::{CosetId, DiscriminantForm};
use crate::qseries::VVQSeries;

use super::ops::hecke_weight_sum;

struct Acc {
    comps: Vec<BTreeMap<Rational, RootSum>>,
    trunc: Rational,
}

impl Acc {
    fn add(&mut self, id: CosetId, e: Rational, c: &CycNumber) {
        if e <= self.trunc && !c.is_zero() {
            self.comps[id.0]
                .entry(e)
                .or_insert_with(|| RootSum::new(1))
                .add_cyc(c, &Rational::one());
        }
    }
}

fn pow_u(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e)
        .ok_or_else(|| Error::TooLarge(format!("{p}^{e}")))
}

/// `Σ_{δ ∈ A(R·p^t), p^t δ = ·} 𝒆(−b·f·q(δ))` per target coset and `b mod p^a`.
fn gauss_weights(
    big: &DiscriminantForm,
    base: &DiscriminantForm,
    pt: u64,
    f: u64,
    pa: u64,
) -> Result<Vec<Vec<CycNumber>>> {
    let mut acc: Vec<Vec<RootSum>> = (0..base.order())
        .map(|_| (0..pa).map(|_| RootSum::new(1)).collect())
        .collect();
    for d in big.ids() {
        let t = big.mul_to(d, pt as i64, base)?;
        let qd = big.q(d);
        for b in 0..pa {
            let x = -&(&qd * &Rational::integer((b * f) as i64));
            acc[t.0][b as usize].add_e(&x, &Rational::one());
        }
    }
    Ok(acc
        .into_iter()
        .map(|v| v.into_iter().map(RootSum::finish).collect())
        .collect())
}

/// `Σ_b W[b]·𝒆(m·b/p^a)` over units `b` (or all `b` when `units` is false).
fn twisted(w: &[CycNumber], m: &Rational, pa: u64, p: u64, units: bool) -> CycNumber {
    let mut s = RootSum::new(1);
    for b in 0..pa {
        if units && b % p == 0 {
            continue;
        }
        let ph = m * &Rational::frac(b as i64, pa as i64);
        s.add_cyc_e(&w[b as usize], &ph, &Rational::one());
    }
    s.finish()
}

/// `ℋ_{p^{2l}}` in double-coset mode from the explicit component formulas.
pub fn bs_op(psi: &VVQSeries, p: u64, l: u32) -> Result<VVQSeries> {
    if p == 2 {
        return Err(Error::Unsupported(
            "the explicit formula is only available for odd primes".into(),
        ));
    }
    if !is_prime(p) {
        return Err(Error::Contract(format!("p = {p} is not prime")));
    }
    if l == 0 {
        return Err(Error::Contract("l must be at least 1".into()));
    }
    psi.require_t_equivariant()?;
    let base = psi.form();
    let r0 = base.scale();
    let lat = base.lattice();
    let dim = base.dim() as i64;
    let w = psi.weight_sum();
    let wsum = hecke_weight_sum(psi);
    debug_assert_eq!(&wsum - &w, Rational::frac(dim, 2));
    let pl = pow_u(p, l)?;
    let p2l = pow_u(pl, 2)?;
    let trunc = psi.trunc() / &Rational::integer(p2l as i64);
    let mut acc = Acc {
        comps: (0..base.order()).map(|_| BTreeMap::new()).collect(),
        trunc: trunc.clone(),
    };
    let two_l = 2 * l as i64;

    // C_α: p^{2l(w−1)} ψ_λ(p^{2l}τ) e_{p^l λ}
    let pref = pow_rational(p, &(&(&w - &Rational::one()) * &Rational::integer(two_l)))?;
    for lam in base.ids() {
        let out = base.mul(lam, pl as i64);
        for (m, c) in psi.component(lam) {
            acc.add(out, m * &Rational::integer(p2l as i64), &(c * &pref));
        }
    }

    // C_β: ranks 0 < a < 2l, p ∤ b
    for a in 1..(2 * l) {
        let pa = pow_u(p, a)?;
        let exp = Rational::integer(2 * (l as i64 - a as i64));
        let scale = Rational::integer(p as i64).pow(exp.to_i64().unwrap() as i32);
        let pe = &(&w * &Rational::integer(two_l - a as i64))
            - &Rational::integer(two_l + a as i64 * dim);
        let pe = &pe + &(&Rational::integer(a as i64 * dim) / &Rational::integer(2));
        let pref = pow_rational(p, &pe)?;
        if a <= l {
            let big = DiscriminantForm::new(lat, r0 * pa)?;
            let wts = gauss_weights(&big, base, pa, 1, pa)?;
            let up = pow_u(p, l - a)? as i64;
            for lam in base.ids() {
                let out = base.mul(lam, up);
                for (m, c) in psi.component(lam) {
                    let t = twisted(&wts[lam.0], m, pa, p, true);
                    acc.add(out, m * &scale, &(&(&t * c) * &pref));
                }
            }
        } else {
            let big = DiscriminantForm::new(lat, r0 * pl)?;
            let f = pow_u(p, a - l)?;
            let wts = gauss_weights(&big, base, pl, f, pa)?;
            for rho in base.ids() {
                let src = base.mul(rho, f as i64);
                for (m, c) in psi.component(src) {
                    let t = twisted(&wts[rho.0], m, pa, p, true);
                    acc.add(rho, m * &scale, &(&(&t * c) * &pref));
                }
            }
        }
    }

    // C_γ: p^{−2l} Σ_b 𝒆(−b q(λ)) ψ_{p^l λ}((τ + b)/p^{2l}) e_λ
    let pref = CycNumber::rational(Rational::frac(1, p2l as i64));
    let shrink = Rational::frac(1, p2l as i64);
    for lam in base.ids() {
        let src = base.mul(lam, pl as i64);
        let ql = base.q(lam);
        for (m, c) in psi.component(src) {
            // Σ_b 𝒆(b(m/p^{2l} − q(λ))) is p^{2l} or 0
            let j = &(m * &shrink) - &ql;
            if j.is_integer() {
                acc.add(
                    lam,
                    m * &shrink,
                    &(&(c * &pref) * &CycNumber::integer(p2l as i64)),
                );
            }
        }
    }

    let comps = acc
        .comps
        .into_iter()
        .map(|m| m.into_iter().map(|(e, s)| (e, s.finish())).collect())
        .collect();
    VVQSeries::from_components(psi.form_arc().clone(), psi.weight().clone(), trunc, comps)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::hecke::ops::h_op;
    use crate::lattice::Lattice;
    use crate::qseries::{vv_theta, SumMode};

    fn theta(g: Vec<Vec<i64>>, t: i64) -> VVQSeries {
        let l = Lattice::new(g).unwrap();
        vv_theta(
            Arc::new(DiscriminantForm::new(&l, 1).unwrap()),
            &Rational::integer(t),
        )
        .unwrap()
    }

    #[test]
    fn matches_double_coset_h() {
        for g in [
            vec![vec![2]],
            vec![vec![2, 1], vec![1, 2]],
            vec![vec![2, 0], vec![0, 2]],
        ] {
            let th = theta(g.clone(), 18);
            let a = bs_op(&th, 3, 1).unwrap();
            let b = h_op(&th, 3, SumMode::DoubleCoset).unwrap();
            assert_eq!(a.compare(&b).unwrap(), None, "{g:?}");
        }
    }

    #[test]
    fn rejects_bad_primes() {
        let th = theta(vec![vec![2]], 8);
        assert!(matches!(bs_op(&th, 2, 1), Err(Error::Unsupported(_))));
        assert!(matches!(bs_op(&th, 9, 1), Err(Error::Contract(_))));
    }
}
