//! Square roots of positive integers inside cyclotomic fields.

use super::cyclotomic::CycNumber;
use super::nt::factorize;
use super::rational::Rational;
use super::rootsum::RootSum;
use crate::error::{Error, Result};

/// √p for a prime `p`, from the quadratic Gauss sum.
fn sqrt_prime(p: u64) -> CycNumber {
    if p == 2 {
        return &CycNumber::root(8, 1) + &CycNumber::root(8, -1);
    }
    let mut g = RootSum::new(p);
    for a in 0..p {
        g.add_root(p, ((a * a) % p) as i64, &Rational::one());
    }
    let g = g.finish();
    // g = √p for p ≡ 1 (mod 4) and i·√p for p ≡ 3 (mod 4)
    if p % 4 == 1 {
        g
    } else {
        -(&CycNumber::root(4, 1) * &g)
    }
}

/// The positive square root of `n ≥ 1` as a cyclotomic number.
pub fn sqrt_int(n: u64) -> CycNumber {
    assert!(n >= 1, "sqrt_int needs a positive argument");
    let mut outside: i64 = 1;
    let mut root = CycNumber::one();
    for (p, e) in factorize(n) {
        outside *= (p as i64).pow(e / 2);
        if e % 2 == 1 {
            root = &root * &sqrt_prime(p);
        }
    }
    let y = root.scale(&Rational::integer(outside));
    if y.to_complex().0 < 0.0 {
        -y
    } else {
        y
    }
}

/// `n^e` for a positive integer `n` and an exponent with denominator 1 or 2.
pub fn pow_rational(n: u64, e: &Rational) -> Result<CycNumber> {
    assert!(n >= 1, "pow_rational needs a positive base");
    let twice = e * &Rational::integer(2);
    let t = twice
        .to_i64()
        .ok_or_else(|| Error::Unsupported(format!("exponent {e} is not half-integral")))?;
    let whole = t.div_euclid(2);
    let whole = i32::try_from(whole).map_err(|_| Error::TooLarge(format!("exponent {e}")))?;
    let base = CycNumber::rational(Rational::integer(n as i64).pow(whole));
    Ok(if t.rem_euclid(2) == 1 {
        &base * &sqrt_int(n)
    } else {
        base
    })
}
