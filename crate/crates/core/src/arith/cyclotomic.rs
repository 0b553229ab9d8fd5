//! Elements of cyclotomic fields ℚ(ζ_M) in canonical power-basis form.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use super::nt::{divisors, euler_phi, lcm, mobius, radical};
use super::rational::Rational;
use crate::error::{Error, Result};

/// Sparse cyclotomic polynomial as `(exponent, coefficient)` pairs, ascending, monic.
type SparsePoly = Arc<Vec<(usize, i64)>>;

// Pure memo table: Φ_M depends only on M.
static PHI_CACHE: OnceLock<RwLock<HashMap<u64, SparsePoly>>> = OnceLock::new();

/// Dense Φ_n for squarefree `n`, from Φ_n = Π_{d|n} (x^d − 1)^{μ(n/d)}.
fn cyclotomic_dense_squarefree(n: u64) -> Vec<i64> {
    let mut num: Vec<i64> = vec![1];
    let mut dens = Vec::new();
    for d in divisors(n) {
        match mobius(n / d) {
            1 => {
                let d = d as usize;
                let mut next = vec![0i64; num.len() + d];
                for (i, &c) in num.iter().enumerate() {
                    next[i + d] += c;
                    next[i] -= c;
                }
                num = next;
            }
            -1 => dens.push(d as usize),
            _ => {}
        }
    }
    for d in dens {
        // exact division by (x^d − 1), solved from the constant term upward
        let qlen = num.len() - d;
        let mut q = vec![0i64; qlen];
        for i in 0..qlen {
            let prev = if i >= d { q[i - d] } else { 0 };
            q[i] = prev - num[i];
        }
        num = q;
    }
    num
}

/// Φ_M as a sparse polynomial, via Φ_M(x) = Φ_rad(M)(x^{M/rad(M)}).
fn cyclotomic_poly(m: u64) -> SparsePoly {
    let cache = PHI_CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().expect("cyclotomic cache poisoned").get(&m) {
        return p.clone();
    }
    let rad = radical(m);
    let stretch = (m / rad) as usize;
    let sparse: Vec<(usize, i64)> = cyclotomic_dense_squarefree(rad)
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c != 0)
        .map(|(i, c)| (i * stretch, c))
        .collect();
    let poly = Arc::new(sparse);
    cache
        .write()
        .expect("cyclotomic cache poisoned")
        .insert(m, poly.clone());
    poly
}

/// Reduces a coefficient vector on powers of ζ_M to canonical length φ(M).
pub(crate) fn reduce(mut buf: Vec<Rational>, m: u64) -> Vec<Rational> {
    let mu = m as usize;
    if buf.len() > mu {
        let tail: Vec<Rational> = buf.drain(mu..).collect();
        for (i, c) in tail.into_iter().enumerate() {
            if !c.is_zero() {
                buf[i % mu] += c;
            }
        }
    }
    let deg = euler_phi(m) as usize;
    let poly = cyclotomic_poly(m);
    let lower = &poly[..poly.len() - 1];
    for i in (deg..buf.len()).rev() {
        if buf[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut buf[i], Rational::zero());
        let shift = i - deg;
        for &(e, a) in lower {
            buf[shift + e] -= &(&c * &Rational::integer(a));
        }
    }
    buf.resize(deg, Rational::zero());
    buf
}

/// An element of ℚ(ζ_M), stored as coefficients on ζ_M^0 … ζ_M^{φ(M)−1}.
///
/// Rationals (including zero) are always stored at order 1.
#[derive(Clone)]
pub struct CycNumber {
    order: u64,
    coeffs: Vec<Rational>,
}

impl CycNumber {
    fn from_reduced(order: u64, coeffs: Vec<Rational>) -> CycNumber {
        debug_assert_eq!(coeffs.len() as u64, euler_phi(order));
        if order > 1 && coeffs[1..].iter().all(Rational::is_zero) {
            let c = coeffs.into_iter().next().expect("nonempty");
            return CycNumber::rational(c);
        }
        CycNumber { order, coeffs }
    }

    /// Builds Σ buf[k] ζ_M^k for an arbitrary-length buffer.
    pub fn from_buffer(order: u64, buf: Vec<Rational>) -> CycNumber {
        assert!(order >= 1, "cyclotomic order must be positive");
        CycNumber::from_reduced(order, reduce(buf, order))
    }

    pub fn rational(c: Rational) -> CycNumber {
        CycNumber {
            order: 1,
            coeffs: vec![c],
        }
    }

    pub fn integer(n: i64) -> CycNumber {
        CycNumber::rational(Rational::integer(n))
    }

    pub fn zero() -> CycNumber {
        CycNumber::integer(0)
    }

    pub fn one() -> CycNumber {
        CycNumber::integer(1)
    }

    /// ζ_M^k.
    pub fn root(order: u64, k: i64) -> CycNumber {
        assert!(order >= 1, "cyclotomic order must be positive");
        let k = k.rem_euclid(order as i64) as u64;
        let g = super::nt::gcd(k, order);
        let (order, k) = (order / g, k / g);
        if order % 4 == 2 {
            // ζ_{2m}^k = (−1)^k ζ_m^{k(m+1)/2} for odd m
            let m = order / 2;
            let e = (k as u128 * m.div_ceil(2) as u128 % m as u128) as i64;
            let r = CycNumber::root(m, e);
            return if k % 2 == 1 { -r } else { r };
        }
        let mut buf = vec![Rational::zero(); order as usize];
        buf[k as usize] = Rational::one();
        CycNumber::from_buffer(order, buf)
    }

    /// 𝒆(x) = exp(2πix) for rational x.
    pub fn e_of(x: &Rational) -> CycNumber {
        let f = x.fract_mod1();
        let (n, d) = f
            .to_i64_parts()
            .expect("root of unity order exceeds machine range");
        CycNumber::root(d as u64, n)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_one()
    }

    /// The rational value, if this number lies in ℚ.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.order == 1).then(|| &self.coeffs[0])
    }

    /// Same number written in ℚ(ζ_{M′}); `M` must divide `M′`.
    pub fn embed(&self, target: u64) -> Result<CycNumber> {
        if target == 0 || !target.is_multiple_of(self.order) {
            return Err(Error::Contract(format!(
                "cannot embed order {} into order {target}",
                self.order
            )));
        }
        Ok(self.embed_unchecked(target))
    }

    /// Raw coefficient vector in ℚ(ζ_{M′}) (length φ(M′)); `M | M′` assumed.
    fn embed_unchecked(&self, target: u64) -> CycNumber {
        if target == self.order {
            return self.clone();
        }
        CycNumber {
            order: target,
            coeffs: self.embedded_coeffs(target),
        }
    }

    fn embedded_coeffs(&self, target: u64) -> Vec<Rational> {
        if target == self.order {
            return self.coeffs.clone();
        }
        let t = (target / self.order) as usize;
        let mut buf = vec![Rational::zero(); target as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                buf[i * t] = c.clone();
            }
        }
        reduce(buf, target)
    }

    /// Adds `scale · self · ζ_target^shift` into a length-`target` buffer; `M | target`.
    pub(crate) fn accumulate_into(
        &self,
        buf: &mut [Rational],
        target: u64,
        shift: u64,
        scale: &Rational,
    ) {
        let t = target / self.order;
        debug_assert_eq!(target % self.order, 0);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let idx = ((i as u64 * t + shift) % target) as usize;
                if scale.is_one() {
                    buf[idx] += c;
                } else {
                    buf[idx] += &(c * scale);
                }
            }
        }
    }

    /// `self · ζ_M^k`.
    pub fn mul_root(&self, order: u64, k: i64) -> CycNumber {
        if self.is_zero() {
            return CycNumber::zero();
        }
        let kk = k.rem_euclid(order as i64) as u64;
        if kk == 0 {
            return self.clone();
        }
        let target = lcm(self.order, order);
        let shift = kk * (target / order);
        let mut buf = vec![Rational::zero(); target as usize];
        self.accumulate_into(&mut buf, target, shift, &Rational::one());
        CycNumber::from_buffer(target, buf)
    }

    /// `self · 𝒆(x)`.
    pub fn mul_e(&self, x: &Rational) -> CycNumber {
        let (n, d) = x
            .fract_mod1()
            .to_i64_parts()
            .expect("root of unity order exceeds machine range");
        self.mul_root(d as u64, n)
    }

    pub fn scale(&self, c: &Rational) -> CycNumber {
        if c.is_zero() {
            return CycNumber::zero();
        }
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Complex conjugation ζ ↦ ζ⁻¹.
    pub fn conj(&self) -> CycNumber {
        if self.order == 1 {
            return self.clone();
        }
        let m = self.order as usize;
        let mut buf = vec![Rational::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                buf[(m - i) % m] += c;
            }
        }
        CycNumber::from_buffer(self.order, buf)
    }

    /// Floating-point value `(re, im)` under ζ_M ↦ exp(2πi/M).
    pub fn to_complex(&self) -> (f64, f64) {
        let m = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (i, c)| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / m;
                let v = c.to_f64();
                (re + v * th.cos(), im + v * th.sin())
            })
    }

    /// Nonzero `(k, c)` pairs meaning Σ c·ζ_M^k, ascending in `k`.
    pub fn terms(&self) -> Vec<(u64, Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as u64, c.clone()))
            .collect()
    }

    /// Inverse of [`terms`](Self::terms); exponents may be any residues.
    pub fn from_terms(order: u64, terms: &[(u64, Rational)]) -> Result<CycNumber> {
        if order == 0 {
            return Err(Error::Contract("cyclotomic order must be positive".into()));
        }
        let mut buf = vec![Rational::zero(); order as usize];
        for (k, c) in terms {
            buf[(*k % order) as usize] += c;
        }
        Ok(CycNumber::from_buffer(order, buf))
    }

    /// `self` with the order raised to `target`, coefficient-level view used for serialization.
    pub fn terms_at(&self, target: u64) -> Result<Vec<(u64, Rational)>> {
        Ok(self.embed(target)?.terms())
    }

    fn binop_coeffs(a: &CycNumber, b: &CycNumber) -> (u64, Vec<Rational>, Vec<Rational>) {
        let m = lcm(a.order, b.order);
        (m, a.embedded_coeffs(m), b.embedded_coeffs(m))
    }

    fn add_ref(a: &CycNumber, b: &CycNumber) -> CycNumber {
        if b.is_zero() {
            return a.clone();
        }
        if a.is_zero() {
            return b.clone();
        }
        if a.order == b.order {
            let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
            return CycNumber::from_reduced(a.order, coeffs);
        }
        let (m, x, y) = CycNumber::binop_coeffs(a, b);
        CycNumber::from_reduced(m, x.iter().zip(&y).map(|(p, q)| p + q).collect())
    }

    fn mul_ref(a: &CycNumber, b: &CycNumber) -> CycNumber {
        if a.is_zero() || b.is_zero() {
            return CycNumber::zero();
        }
        if let Some(c) = a.as_rational() {
            return b.scale(c);
        }
        if let Some(c) = b.as_rational() {
            return a.scale(c);
        }
        let (m, x, y) = if a.order == b.order {
            (a.order, a.coeffs.clone(), b.coeffs.clone())
        } else {
            CycNumber::binop_coeffs(a, b)
        };
        let xs: Vec<(usize, &Rational)> =
            x.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        let ys: Vec<(usize, &Rational)> =
            y.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        let mut buf = vec![Rational::zero(); 2 * x.len()];
        for &(i, p) in &xs {
            for &(j, q) in &ys {
                buf[i + j] += &(p * q);
            }
        }
        CycNumber::from_buffer(m, buf)
    }

    pub fn pow(&self, e: u32) -> CycNumber {
        let mut acc = CycNumber::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (_, x, y) = CycNumber::binop_coeffs(self, other);
        x == y
    }
}

impl Eq for CycNumber {}

impl Default for CycNumber {
    fn default() -> Self {
        CycNumber::zero()
    }
}

impl Add<&CycNumber> for &CycNumber {
    type Output = CycNumber;
    fn add(self, rhs: &CycNumber) -> CycNumber {
        CycNumber::add_ref(self, rhs)
    }
}

impl Add for CycNumber {
    type Output = CycNumber;
    fn add(self, rhs: CycNumber) -> CycNumber {
        CycNumber::add_ref(&self, &rhs)
    }
}

impl Sub<&CycNumber> for &CycNumber {
    type Output = CycNumber;
    fn sub(self, rhs: &CycNumber) -> CycNumber {
        CycNumber::add_ref(self, &-rhs)
    }
}

impl Sub for CycNumber {
    type Output = CycNumber;
    fn sub(self, rhs: CycNumber) -> CycNumber {
        CycNumber::add_ref(&self, &-rhs)
    }
}

impl Mul<&CycNumber> for &CycNumber {
    type Output = CycNumber;
    fn mul(self, rhs: &CycNumber) -> CycNumber {
        CycNumber::mul_ref(self, rhs)
    }
}

impl Mul for CycNumber {
    type Output = CycNumber;
    fn mul(self, rhs: CycNumber) -> CycNumber {
        CycNumber::mul_ref(&self, &rhs)
    }
}

impl Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        -&self
    }
}

impl AddAssign<&CycNumber> for CycNumber {
    fn add_assign(&mut self, rhs: &CycNumber) {
        *self = CycNumber::add_ref(self, rhs);
    }
}

impl SubAssign<&CycNumber> for CycNumber {
    fn sub_assign(&mut self, rhs: &CycNumber) {
        *self = CycNumber::add_ref(self, &-rhs);
    }
}

impl std::iter::Sum for CycNumber {
    fn sum<I: Iterator<Item = CycNumber>>(iter: I) -> CycNumber {
        iter.fold(CycNumber::zero(), |a, b| a + b)
    }
}

impl From<Rational> for CycNumber {
    fn from(c: Rational) -> Self {
        CycNumber::rational(c)
    }
}

impl From<i64> for CycNumber {
    fn from(n: i64) -> Self {
        CycNumber::integer(n)
    }
}

impl fmt::Display for CycNumber {
    /// Human-readable `c0 + c1*z24^1 + …`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_rational() {
            return write!(f, "{c}");
        }
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "z{}^{k}", self.order)?;
            } else {
                write!(f, "({c})*z{}^{k}", self.order)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Wire shape `{"order": M, "terms": [[k, "c"], …]}`.
#[derive(Serialize, Deserialize)]
struct CycWire {
    order: u64,
    terms: Vec<(u64, Rational)>,
}

impl Serialize for CycNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycWire {
            order: self.order,
            terms: self.terms(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = CycWire::deserialize(d)?;
        CycNumber::from_terms(w.order, &w.terms).map_err(serde::de::Error::custom)
    }
}
