//! Unreduced accumulator for sums of the form Σ c·ζ_M^k.

use super::cyclotomic::CycNumber;
use super::nt::lcm;
use super::rational::Rational;

/// Collects terms on powers of ζ_M and reduces once at the end.
///
/// The order grows to the lcm of everything added, so callers may mix
/// roots of different orders freely.
#[derive(Clone, Debug)]
pub struct RootSum {
    order: u64,
    buf: Vec<Rational>,
}

impl RootSum {
    pub fn new(order: u64) -> RootSum {
        assert!(order >= 1);
        RootSum {
            order,
            buf: vec![Rational::zero(); order as usize],
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    fn grow(&mut self, order: u64) {
        let m = lcm(self.order, order);
        if m == self.order {
            return;
        }
        let t = (m / self.order) as usize;
        let mut buf = vec![Rational::zero(); m as usize];
        for (i, c) in self.buf.drain(..).enumerate() {
            if !c.is_zero() {
                buf[i * t] = c;
            }
        }
        self.order = m;
        self.buf = buf;
    }

    /// Adds `c · ζ_d^k`.
    pub fn add_root(&mut self, d: u64, k: i64, c: &Rational) {
        if c.is_zero() {
            return;
        }
        self.grow(d);
        let t = (self.order / d) as i64;
        let idx = (k.rem_euclid(d as i64) * t) as usize;
        self.buf[idx] += c;
    }

    /// Adds `c · 𝒆(x)`.
    pub fn add_e(&mut self, x: &Rational, c: &Rational) {
        let (n, d) = x
            .fract_mod1()
            .to_i64_parts()
            .expect("root of unity order exceeds machine range");
        self.add_root(d as u64, n, c);
    }

    /// Adds `c · x · 𝒆(y)`.
    pub fn add_cyc_e(&mut self, x: &CycNumber, y: &Rational, c: &Rational) {
        if x.is_zero() || c.is_zero() {
            return;
        }
        let (n, d) = y
            .fract_mod1()
            .to_i64_parts()
            .expect("root of unity order exceeds machine range");
        self.grow(x.order());
        self.grow(d as u64);
        let shift = (n as u64) * (self.order / d as u64);
        x.accumulate_into(&mut self.buf, self.order, shift, c);
    }

    /// Adds `c · x`.
    pub fn add_cyc(&mut self, x: &CycNumber, c: &Rational) {
        self.add_cyc_e(x, &Rational::zero(), c);
    }

    pub fn finish(self) -> CycNumber {
        CycNumber::from_buffer(self.order, self.buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_orders_accumulate() {
        let mut s = RootSum::new(1);
        s.add_root(4, 1, &Rational::one());
        s.add_root(3, 1, &Rational::integer(2));
        s.add_e(&Rational::frac(1, 2), &Rational::one());
        let expect = &(&CycNumber::root(4, 1)
            + &CycNumber::root(3, 1).scale(&Rational::integer(2)))
            - &CycNumber::one();
        assert_eq!(s.finish(), expect);
    }

    #[test]
    fn cyc_times_root() {
        let x = &CycNumber::root(8, 1) + &CycNumber::integer(3);
        let mut s = RootSum::new(1);
        s.add_cyc_e(&x, &Rational::frac(1, 3), &Rational::integer(-2));
        let expect = (&x * &CycNumber::root(3, 1)).scale(&Rational::integer(-2));
        assert_eq!(s.finish(), expect);
    }
}
