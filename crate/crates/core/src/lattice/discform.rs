//! Discriminant forms `A(R) = (1/R)L′/L` with enumerated cosets.

use std::fmt;

use num_integer::Integer;
use num_traits::ToPrimitive;

use super::gram::Lattice;
use crate::arith::{smith_normal_form, Rational};
use crate::error::{Error, Result};

/// Default guard on `|A(R)|`.
pub const DEFAULT_ORDER_CAP: u64 = 1_000_000;

/// Index of a coset in canonical (lexicographic-coordinate) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetId(pub usize);

/// The finite quadratic module `A(R)` of a lattice `L`, with form `q_R = R·q`.
///
/// Elements are `x ∈ ℚⁿ` with `R·G·x ∈ ℤⁿ`, modulo `ℤⁿ`. Each coset
/// carries a fixed lift `z / E` (E the exponent of the group).
#[derive(Clone)]
pub struct DiscriminantForm {
    lattice: Lattice,
    scale: u64,
    /// Invariant factors of `R·G`, including trivial ones.
    divisors: Vec<u64>,
    /// Positions with `d_i > 1`, in canonical coordinate order.
    active: Vec<usize>,
    strides: Vec<usize>,
    exponent: i64,
    v: Vec<Vec<i64>>,
    v_inv: Vec<Vec<i64>>,
    order: usize,
    lifts: Vec<i64>,
    qnorms: Vec<Rational>,
}

fn big_to_i64(x: &num_bigint::BigInt, what: &str) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::TooLarge(format!("{what} exceeds machine range")))
}

impl DiscriminantForm {
    pub fn new(lattice: &Lattice, scale: u64) -> Result<DiscriminantForm> {
        DiscriminantForm::with_cap(lattice, scale, DEFAULT_ORDER_CAP)
    }

    /// Builds `A(scale)`, failing if its order exceeds `cap`.
    pub fn with_cap(lattice: &Lattice, scale: u64, cap: u64) -> Result<DiscriminantForm> {
        if scale == 0 {
            return Err(Error::Contract("scale must be positive".into()));
        }
        let n = lattice.dim();
        let predicted = (scale as u128)
            .checked_pow(n as u32)
            .and_then(|x| x.checked_mul(lattice.det().unsigned_abs() as u128));
        match predicted {
            Some(o) if o <= cap as u128 => {}
            _ => {
                return Err(Error::TooLarge(format!(
                    "|A({scale})| = {scale}^{n}·{} exceeds cap {cap}",
                    lattice.det().abs()
                )))
            }
        }
        let eff = lattice.rescale(scale)?;
        let snf = smith_normal_form(eff.gram())?;
        let divisors = snf
            .d
            .iter()
            .map(|d| big_to_i64(d, "invariant factor").map(|x| x as u64))
            .collect::<Result<Vec<u64>>>()?;
        let to_i64_mat = |m: &Vec<Vec<num_bigint::BigInt>>| -> Result<Vec<Vec<i64>>> {
            m.iter()
                .map(|r| r.iter().map(|x| big_to_i64(x, "transform entry")).collect())
                .collect()
        };
        let v = to_i64_mat(&snf.v)?;
        let v_inv = to_i64_mat(&snf.v_inv)?;
        let active: Vec<usize> = (0..n).filter(|&i| divisors[i] > 1).collect();
        let mut strides = vec![0usize; active.len()];
        let mut acc = 1usize;
        for (slot, &i) in active.iter().enumerate().rev() {
            strides[slot] = acc;
            acc *= divisors[i] as usize;
        }
        let order = acc;
        let exponent = *divisors.last().expect("dim ≥ 1") as i64;

        let mut form = DiscriminantForm {
            lattice: lattice.clone(),
            scale,
            divisors,
            active,
            strides,
            exponent,
            v,
            v_inv,
            order,
            lifts: Vec::with_capacity(order * n),
            qnorms: Vec::with_capacity(order),
        };
        let mut coords = vec![0i64; form.active.len()];
        for id in 0..order {
            form.decode_into(id, &mut coords);
            let z = form.lift_from_coords(&coords)?;
            let qn = form.qnorm_of_numerators(&z)?;
            form.lifts.extend_from_slice(&z);
            form.qnorms.push(qn);
        }
        Ok(form)
    }

    fn decode_into(&self, id: usize, out: &mut [i64]) {
        for (slot, &i) in self.active.iter().enumerate() {
            out[slot] = (id / self.strides[slot] % self.divisors[i] as usize) as i64;
        }
    }

    /// `z = V·(c·E/d)`, the numerator of the lift over `E`.
    fn lift_from_coords(&self, coords: &[i64]) -> Result<Vec<i64>> {
        let n = self.dim();
        let mut y = vec![0i128; n];
        for (slot, &i) in self.active.iter().enumerate() {
            y[i] = coords[slot] as i128 * (self.exponent / self.divisors[i] as i64) as i128;
        }
        (0..n)
            .map(|r| {
                let s: i128 = (0..n).map(|c| self.v[r][c] as i128 * y[c]).sum();
                i64::try_from(s).map_err(|_| Error::TooLarge("lift numerator".into()))
            })
            .collect()
    }

    /// `R·½·zᵀGz / E²` exactly.
    fn qnorm_of_numerators(&self, z: &[i64]) -> Result<Rational> {
        let num = self.gram_product(z, z)?;
        let den = 2i128 * self.exponent as i128 * self.exponent as i128;
        let num = num
            .checked_mul(self.scale as i128)
            .ok_or_else(|| Error::TooLarge("quadratic form value".into()))?;
        Ok(rational_from_i128(num, den))
    }

    fn gram_product(&self, a: &[i64], b: &[i64]) -> Result<i128> {
        let g = self.lattice.gram();
        let mut acc: i128 = 0;
        for (i, row) in g.iter().enumerate() {
            for (j, &gij) in row.iter().enumerate() {
                if gij == 0 {
                    continue;
                }
                let t = (a[i] as i128)
                    .checked_mul(b[j] as i128)
                    .and_then(|t| t.checked_mul(gij as i128))
                    .ok_or_else(|| Error::TooLarge("inner product".into()))?;
                acc = acc
                    .checked_add(t)
                    .ok_or_else(|| Error::TooLarge("inner product".into()))?;
            }
        }
        Ok(acc)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Invariant factors `d_i > 1` (the group is `⊕ ℤ/d_i`).
    pub fn divisors(&self) -> Vec<u64> {
        self.active.iter().map(|&i| self.divisors[i]).collect()
    }

    /// Exponent `E` of the group; lifts have denominator dividing `E`.
    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn ids(&self) -> impl Iterator<Item = CosetId> + Clone {
        (0..self.order).map(CosetId)
    }

    pub fn zero(&self) -> CosetId {
        CosetId(0)
    }

    pub fn coords(&self, id: CosetId) -> Vec<i64> {
        let mut out = vec![0; self.active.len()];
        self.decode_into(id.0, &mut out);
        out
    }

    /// Coset with the given canonical coordinates (reduced modulo the divisors).
    pub fn from_coords(&self, coords: &[i64]) -> Result<CosetId> {
        if coords.len() != self.active.len() {
            return Err(Error::Contract(format!(
                "expected {} coordinates, got {}",
                self.active.len(),
                coords.len()
            )));
        }
        Ok(CosetId(
            self.active
                .iter()
                .enumerate()
                .map(|(slot, &i)| {
                    coords[slot].rem_euclid(self.divisors[i] as i64) as usize * self.strides[slot]
                })
                .sum(),
        ))
    }

    /// Numerators `z` of the stored lift `z / E`.
    pub fn lift_numerators(&self, id: CosetId) -> &[i64] {
        let n = self.dim();
        &self.lifts[id.0 * n..(id.0 + 1) * n]
    }

    pub fn lift(&self, id: CosetId) -> Vec<Rational> {
        self.lift_numerators(id)
            .iter()
            .map(|&z| Rational::frac(z, self.exponent))
            .collect()
    }

    /// `q_R` evaluated on the stored lift, not reduced modulo 1.
    pub fn qnorm(&self, id: CosetId) -> &Rational {
        &self.qnorms[id.0]
    }

    /// `q_R(id) ∈ [0, 1)`.
    pub fn q(&self, id: CosetId) -> Rational {
        self.qnorms[id.0].fract_mod1()
    }

    /// `(x, y)_R mod 1`, in `[0, 1)`.
    pub fn bilinear(&self, a: CosetId, b: CosetId) -> Rational {
        let num = self
            .gram_product(self.lift_numerators(a), self.lift_numerators(b))
            .expect("lifts were range-checked at construction")
            * self.scale as i128;
        let den = self.exponent as i128 * self.exponent as i128;
        rational_from_i128(num.rem_euclid(den), den)
    }

    pub fn add(&self, a: CosetId, b: CosetId) -> CosetId {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let s: Vec<i64> = ca.iter().zip(&cb).map(|(x, y)| x + y).collect();
        self.from_coords(&s).expect("same coordinate length")
    }

    pub fn neg(&self, a: CosetId) -> CosetId {
        let c: Vec<i64> = self.coords(a).iter().map(|x| -x).collect();
        self.from_coords(&c).expect("same coordinate length")
    }

    /// `n·a` inside the same form.
    pub fn mul(&self, a: CosetId, n: i64) -> CosetId {
        let c: Vec<i64> = self
            .coords(a)
            .iter()
            .zip(self.active.iter())
            .map(|(&x, &i)| (x as i128 * n as i128).rem_euclid(self.divisors[i] as i128) as i64)
            .collect();
        self.from_coords(&c).expect("same coordinate length")
    }

    /// Whether both forms live over the same lattice basis up to a scalar
    /// factor (so their cosets share the ambient `ℚⁿ/ℤⁿ`).
    pub fn compatible(&self, other: &DiscriminantForm) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let (a, b) = (self.lattice.gram(), other.lattice.gram());
        let (sa, sb) = (self.scale as i128, other.scale as i128);
        // R·G proportional to R′·G′ with a positive ratio
        let mut ratio: Option<(i128, i128)> = None;
        for i in 0..a.len() {
            for j in 0..a.len() {
                let (x, y) = (a[i][j] as i128 * sa, b[i][j] as i128 * sb);
                if (x == 0) != (y == 0) {
                    return false;
                }
                if x == 0 {
                    continue;
                }
                match ratio {
                    None => {
                        if (x > 0) != (y > 0) {
                            return false;
                        }
                        ratio = Some((x, y));
                    }
                    Some((p, q)) => {
                        if x * q != y * p {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Whether the coset lies in `(1/s)L′/L`, i.e. `s·G·x ∈ ℤⁿ`.
    pub fn contains_scale(&self, id: CosetId, s: u64) -> bool {
        let z = self.lift_numerators(id);
        let e = self.exponent as i128;
        self.lattice.gram().iter().all(|row| {
            let t: i128 = row
                .iter()
                .zip(z)
                .map(|(&g, &x)| g as i128 * x as i128)
                .sum();
            (t * s as i128).rem_euclid(e) == 0
        })
    }

    /// `Δ_R(μ, k)`: true iff `μ ∈ A(R/k)`. Requires `k | R`.
    pub fn delta(&self, id: CosetId, k: u64) -> Result<bool> {
        if k == 0 || !self.scale.is_multiple_of(k) {
            return Err(Error::Contract(format!(
                "Δ needs k | R, got k = {k}, R = {}",
                self.scale
            )));
        }
        Ok(self.contains_scale(id, self.scale / k))
    }

    /// Coset of `n·x` in `target`, for `x` the lift of `id`.
    pub fn mul_to(&self, id: CosetId, n: i64, target: &DiscriminantForm) -> Result<CosetId> {
        if !self.compatible(target) {
            return Err(Error::Contract("forms do not share a lattice".into()));
        }
        let z = self.lift_numerators(id);
        let dim = self.dim();
        let e = self.exponent as i128;
        let mut coords = Vec::with_capacity(target.active.len());
        for (i, &d) in target.divisors.iter().enumerate() {
            // c_i = d_i · (V′⁻¹ · n·z / E)_i, which must be integral
            let y: i128 = (0..dim)
                .map(|c| target.v_inv[i][c] as i128 * z[c] as i128)
                .sum();
            let d = d as i128;
            let num = y
                .checked_mul(n as i128)
                .and_then(|t| t.checked_mul(d))
                .ok_or_else(|| Error::TooLarge("coordinate transfer".into()))?;
            if num.rem_euclid(e) != 0 {
                return Err(Error::Contract(format!(
                    "{n}·(coset {:?}) of A({}) does not lie in A({})",
                    self.coords(id),
                    self.scale,
                    target.scale
                )));
            }
            if d > 1 {
                coords.push((num / e).rem_euclid(d) as i64);
            }
        }
        target.from_coords(&coords)
    }

    /// `fibers[λ]` = all `ν` here with `n·ν = λ` in `target`. Requires every `n·ν` to land in `target`.
    pub fn fibers(&self, n: i64, target: &DiscriminantForm) -> Result<Vec<Vec<CosetId>>> {
        let mut out = vec![Vec::new(); target.order()];
        for id in self.ids() {
            let t = self.mul_to(id, n, target)?;
            out[t.0].push(id);
        }
        Ok(out)
    }

    /// All `ν` here with `n·ν = λ`.
    pub fn preimages(
        &self,
        lambda: CosetId,
        n: i64,
        target: &DiscriminantForm,
    ) -> Result<Vec<CosetId>> {
        let mut out = Vec::new();
        for id in self.ids() {
            if self.mul_to(id, n, target)? == lambda {
                out.push(id);
            }
        }
        Ok(out)
    }

    /// `mul_to` for the ids where it is defined, `None` elsewhere.
    pub fn partial_mul_map(
        &self,
        n: i64,
        target: &DiscriminantForm,
    ) -> Result<Vec<Option<CosetId>>> {
        if !self.compatible(target) {
            return Err(Error::Contract("forms do not share a lattice".into()));
        }
        Ok(self
            .ids()
            .map(|id| self.mul_to(id, n, target).ok())
            .collect())
    }

    /// Same group and form: same lattice and same scale.
    pub fn same_as(&self, other: &DiscriminantForm) -> bool {
        self.scale == other.scale && self.lattice == other.lattice
    }
}

fn rational_from_i128(num: i128, den: i128) -> Rational {
    let g = num.gcd(&den).max(1);
    let (n, d) = (num / g, den / g);
    match (i64::try_from(n), i64::try_from(d)) {
        (Ok(n), Ok(d)) => Rational::frac(n, d),
        _ => Rational::new(n.into(), d.into()),
    }
}

impl fmt::Debug for DiscriminantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "A({}) of {:?}, divisors {:?}",
            self.scale,
            self.lattice.gram(),
            self.divisors()
        )
    }
}

impl PartialEq for DiscriminantForm {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for DiscriminantForm {}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(g: &[&[i64]]) -> Lattice {
        Lattice::new(g.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn a1_forms() {
        let a = DiscriminantForm::new(&lat(&[&[2]]), 1).unwrap();
        assert_eq!(a.order(), 2);
        assert_eq!(a.divisors(), vec![2]);
        assert_eq!(a.q(CosetId(0)), q(0, 1));
        assert_eq!(a.q(CosetId(1)), q(1, 4));

        let a4 = DiscriminantForm::new(&lat(&[&[2]]), 4).unwrap();
        assert_eq!(a4.order(), 8);
        for j in 0..8 {
            assert_eq!(a4.lift(CosetId(j)), vec![q(j as i64, 8)]);
            assert_eq!(a4.q(CosetId(j)), q((j * j) as i64, 16).fract_mod1());
        }
    }

    #[test]
    fn unimodular_is_trivial() {
        let a = DiscriminantForm::new(&lat(&[&[0, 1], &[1, 0]]), 1).unwrap();
        assert_eq!(a.order(), 1);
        assert!(a.divisors().is_empty());
        assert_eq!(a.q(a.zero()), Rational::zero());
    }

    #[test]
    fn delta_examples() {
        let a4 = DiscriminantForm::new(&lat(&[&[2]]), 4).unwrap();
        assert!(a4.delta(CosetId(2), 2).unwrap());
        assert!(!a4.delta(CosetId(1), 2).unwrap());
        for k in [1, 2, 4] {
            assert!(a4.delta(a4.zero(), k).unwrap());
        }
        assert!(a4.delta(CosetId(1), 3).is_err());
        // Δ_R(μ, R) ⇔ μ ∈ A(1); Δ_R(μ, 1) always
        for id in a4.ids() {
            assert!(a4.delta(id, 1).unwrap());
            assert_eq!(a4.delta(id, 4).unwrap(), id.0 % 4 == 0);
        }
    }

    #[test]
    fn scalar_mult_examples() {
        let l = lat(&[&[2]]);
        let a = DiscriminantForm::new(&l, 1).unwrap();
        let a4 = DiscriminantForm::new(&l, 4).unwrap();
        assert!(a4.mul_to(CosetId(1), 2, &a).is_err());
        assert_eq!(a4.mul_to(CosetId(2), 2, &a).unwrap(), CosetId(1));
        assert_eq!(a4.mul_to(CosetId(4), 2, &a).unwrap(), CosetId(0));
        assert_eq!(a4.mul_to(CosetId(3), 1, &a4).unwrap(), CosetId(3));
        // A(1) embeds into A(4) as the multiples of 4/8
        assert_eq!(a.mul_to(CosetId(1), 1, &a4).unwrap(), CosetId(4));
    }

    #[test]
    fn preimage_examples() {
        let l = lat(&[&[2]]);
        let a = DiscriminantForm::new(&l, 1).unwrap();
        let a2 = DiscriminantForm::new(&l, 2).unwrap();
        // A(2) = {0, ¼, ½, ¾}
        assert_eq!(
            a2.preimages(CosetId(0), 2, &a).unwrap(),
            vec![CosetId(0), CosetId(2)]
        );
        assert_eq!(
            a2.preimages(CosetId(1), 2, &a).unwrap(),
            vec![CosetId(1), CosetId(3)]
        );
    }

    #[test]
    fn fibers_partition_with_uniform_size() {
        for g in [
            &[&[2i64][..]][..],
            &[&[2, 1], &[1, 2]],
            &[&[2, 0], &[0, 2]],
            &[&[0, 1], &[1, 0]],
        ] {
            let l = lat(g);
            let a = DiscriminantForm::new(&l, 1).unwrap();
            for n in [2u64, 3, 6] {
                let an = DiscriminantForm::new(&l, n).unwrap();
                let fib = an.fibers(n as i64, &a).unwrap();
                let expect = (n as usize).pow(l.dim() as u32);
                assert!(fib.iter().all(|f| f.len() == expect), "{g:?}, n = {n}");
                assert_eq!(an.order(), a.order() * expect);
            }
        }
    }

    #[test]
    fn quadratic_module_laws() {
        let l = lat(&[&[2, 1], &[1, 2]]);
        let base = DiscriminantForm::new(&l, 1).unwrap();
        for r in [1u64, 2, 3, 4] {
            let a = DiscriminantForm::new(&l, r).unwrap();
            assert_eq!(a.order() as i64, (r as i64).pow(2) * 3);
            for x in a.ids() {
                for y in a.ids() {
                    let lhs = (&(a.q(a.add(x, y)) - &a.q(x)) - &a.q(y)).fract_mod1();
                    assert_eq!(lhs, a.bilinear(x, y));
                }
                // shifting the lift by a lattice vector changes q_R by an integer
                let z: Vec<Rational> = a.lift(x);
                let shifted: Vec<Rational> = z.iter().map(|c| c + &Rational::one()).collect();
                let diff = &(&l.inner(&shifted, &shifted) - &l.inner(&z, &z))
                    * &Rational::frac(r as i64, 2);
                assert!(diff.is_integer());
            }
            // q_R on the image of A equals R·q
            for x in base.ids() {
                let y = base.mul_to(x, 1, &a).unwrap();
                assert_eq!(
                    a.q(y),
                    (&base.q(x) * &Rational::integer(r as i64)).fract_mod1()
                );
            }
        }
    }

    #[test]
    fn coords_round_trip_and_order_cap() {
        let a = DiscriminantForm::new(&lat(&[&[2, 0], &[0, 2]]), 3).unwrap();
        assert_eq!(a.divisors(), vec![6, 6]);
        for id in a.ids() {
            assert_eq!(a.from_coords(&a.coords(id)).unwrap(), id);
        }
        assert!(DiscriminantForm::with_cap(&lat(&[&[2]]), 100, 50).is_err());
    }
}
