//! Theta series of positive-definite lattices, per coset of `A(R)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::series::{QSeries, VVQSeries};
use crate::arith::{CycNumber, Rational};
use crate::error::{Error, Result};
use crate::lattice::{CosetId, DiscriminantForm};

/// `θ_{L(R)+γ} = Σ_{x ∈ γ + L} q^{R·q(x)}`, for exponents `≤ trunc`.
pub fn theta_series(form: &DiscriminantForm, gamma: CosetId, trunc: &Rational) -> Result<QSeries> {
    let counts = theta_counts(form, gamma, trunc)?;
    Ok(QSeries::from_terms(
        trunc.clone(),
        counts.into_iter().map(|(m, c)| (m, CycNumber::integer(c))),
    ))
}

/// Lattice-point counts behind [`theta_series`].
pub fn theta_counts(
    form: &DiscriminantForm,
    gamma: CosetId,
    trunc: &Rational,
) -> Result<BTreeMap<Rational, i64>> {
    let lat = form.lattice();
    if !lat.is_positive_definite() {
        return Err(Error::Unsupported(format!(
            "theta series need a positive-definite lattice, got signature {:?}",
            lat.signature()
        )));
    }
    if trunc.is_negative() {
        return Ok(BTreeMap::new());
    }
    let n = lat.dim();
    let e = form.exponent() as i128;
    let r = form.scale() as i128;
    let z = form.lift_numerators(gamma);
    let inv = lat.inverse();
    let t = trunc.to_f64();
    // R·½xᵀGx ≤ T forces x_i² ≤ 2T·(G⁻¹)_ii / R
    let ranges: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            let b = (2.0 * t * inv[i][i].to_f64() / r as f64).sqrt() + 1e-9;
            let c = z[i] as f64 / e as f64;
            ((-b - c).floor() as i64 - 1, (b - c).ceil() as i64 + 1)
        })
        .collect();
    let (tn, td) = trunc
        .to_i64_parts()
        .ok_or_else(|| Error::TooLarge("truncation".into()))?;
    let gram = lat.gram();
    let den = 2 * e * e;
    let mut out: BTreeMap<Rational, i64> = BTreeMap::new();
    let mut y: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut w = vec![0i128; n];
    loop {
        for i in 0..n {
            w[i] = z[i] as i128 + e * y[i] as i128;
        }
        let mut num: i128 = 0;
        for i in 0..n {
            for j in 0..n {
                num += w[i] * gram[i][j] as i128 * w[j];
            }
        }
        let num = num * r;
        // num / den ≤ tn / td
        if num * td as i128 <= tn as i128 * den {
            let m = crate::arith::Rational::new(num.into(), den.into());
            *out.entry(m).or_insert(0) += 1;
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            if y[i] < ranges[i].1 {
                y[i] += 1;
                break;
            }
            y[i] = ranges[i].0;
            i += 1;
        }
    }
}

/// `Θ_{L(R)} = Σ_γ θ_{L(R)+γ} e_γ`, of weight `(dim/2, 0)`.
pub fn vv_theta(form: Arc<DiscriminantForm>, trunc: &Rational) -> Result<VVQSeries> {
    let weight = (Rational::frac(form.dim() as i64, 2), Rational::zero());
    let comps = form
        .ids()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|g| {
            theta_counts(&form, g, trunc).map(|c| {
                c.into_iter()
                    .map(|(m, k)| (m, CycNumber::integer(k)))
                    .collect::<BTreeMap<_, _>>()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    VVQSeries::from_components(form, weight, trunc.clone(), comps)
}

/// Independent point count: scans all `x ∈ (1/E)ℤⁿ` in a generous box, keeps
/// those in `L(R)′`, and bins `R·q(x)` by coset found through lift comparison.
pub fn brute_force_counts(
    form: &DiscriminantForm,
    trunc: &Rational,
) -> Result<Vec<BTreeMap<Rational, i64>>> {
    let lat = form.lattice();
    if !lat.is_positive_definite() {
        return Err(Error::Unsupported(
            "point counts need a positive-definite lattice".into(),
        ));
    }
    let e = form.exponent();
    let n = form.dim();
    let r = form.scale() as i64;
    let inv = lat.inverse();
    let diag = (0..n).map(|i| inv[i][i].to_f64()).fold(0.0, f64::max);
    let k = ((2.0 * trunc.to_f64() * diag / r as f64).sqrt().ceil() as i64 + 2) * e;
    let lifts: Vec<Vec<Rational>> = form.ids().map(|id| form.lift(id)).collect();
    let mut out: Vec<BTreeMap<Rational, i64>> = vec![BTreeMap::new(); form.order()];
    let mut pts = vec![-k; n];
    loop {
        let x: Vec<Rational> = pts.iter().map(|&p| Rational::frac(p, e)).collect();
        let gx_integral = lat.gram().iter().all(|row| {
            let v: Rational = row
                .iter()
                .zip(&x)
                .map(|(&a, b)| b * &Rational::integer(a * r))
                .sum();
            v.is_integer()
        });
        if gx_integral {
            let m = &lat.inner(&x, &x) * &Rational::frac(r, 2);
            if m <= *trunc {
                let id = lifts
                    .iter()
                    .position(|l| l.iter().zip(&x).all(|(a, b)| (a - b).is_integer()))
                    .ok_or_else(|| Error::Contract("point outside every coset".into()))?;
                *out[id].entry(m).or_insert(0) += 1;
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            if pts[i] < k {
                pts[i] += 1;
                break;
            }
            pts[i] = -k;
            i += 1;
        }
    }
}

/// One instance `(γ, k, l, s)` of the rescaling identity for theta series.
#[derive(Debug, Clone)]
pub struct RescalingCase {
    pub gamma: Vec<i64>,
    pub k: u64,
    pub l: u64,
    pub s: u64,
    /// First `(exponent, left, right)` where the sides differ.
    pub mismatch: Option<(Rational, CycNumber, CycNumber)>,
}

/// Checks `θ_{L+γ}((kτ+s)/l) = Σ_{ν ∈ A(r), lν = γ} Δ_r(ν, k)·𝒆((s/k)·q_r(ν))·θ_{L(r)+ν}(τ)`
/// for every `γ`, every `kl = r` and every `0 ≤ s < l`, up to `q^trunc`.
pub fn theta_rescaling_identity(
    base: &DiscriminantForm,
    r: u64,
    trunc: &Rational,
) -> Result<Vec<RescalingCase>> {
    let big = DiscriminantForm::new(base.lattice(), base.scale() * r)?;
    let big_theta: Vec<QSeries> = big
        .ids()
        .map(|nu| theta_series(&big, nu, trunc))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for l in crate::arith::nt::divisors(r) {
        let k = r / l;
        let mut fibers = vec![Vec::new(); base.order()];
        for (i, t) in big.partial_mul_map(l as i64, base)?.into_iter().enumerate() {
            if let Some(t) = t {
                fibers[t.0].push(CosetId(i));
            }
        }
        for gamma in base.ids() {
            let src = theta_series(base, gamma, &(trunc * &Rational::frac(l as i64, k as i64)))?;
            for s in 0..l {
                let lhs = src.substitute(k, l, s);
                let mut rhs = QSeries::new(trunc.clone());
                for &nu in &fibers[gamma.0] {
                    if !big.delta(nu, k)? {
                        continue;
                    }
                    let ph =
                        CycNumber::e_of(&(big.qnorm(nu) * &Rational::frac(s as i64, k as i64)));
                    rhs = rhs.add(&big_theta[nu.0].scale(&ph));
                }
                let mut keys: Vec<&Rational> =
                    lhs.terms().keys().chain(rhs.terms().keys()).collect();
                keys.sort();
                keys.dedup();
                let mismatch = keys.into_iter().filter(|m| *m <= trunc).find_map(|m| {
                    let (a, b) = (lhs.coefficient(m), rhs.coefficient(m));
                    (a != b).then(|| (m.clone(), a, b))
                });
                out.push(RescalingCase {
                    gamma: base.coords(gamma),
                    k,
                    l,
                    s,
                    mismatch,
                });
            }
        }
    }
    Ok(out)
}
