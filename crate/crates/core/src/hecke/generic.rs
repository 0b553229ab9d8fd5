//! Seeded pseudo-random `T`-equivariant test series.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{CycNumber, Rational};
use crate::error::Result;
use crate::lattice::DiscriminantForm;
use crate::qseries::{VVQSeries, Weight};

fn palette() -> Vec<CycNumber> {
    vec![
        CycNumber::zero(),
        CycNumber::one(),
        CycNumber::integer(-1),
        CycNumber::integer(2),
        CycNumber::rational(Rational::frac(1, 2)),
        CycNumber::root(3, 1),
        CycNumber::root(4, 1),
        &CycNumber::root(8, 3) + &CycNumber::integer(1),
    ]
}

/// Fills every slot `q^m`, `m ≡ q(γ) mod 1`, `0 ≤ m ≤ trunc`, of every component.
pub fn generic_series(
    form: Arc<DiscriminantForm>,
    weight: Weight,
    trunc: &Rational,
    seed: u64,
) -> Result<VVQSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pal = palette();
    let mut out = VVQSeries::zero(form.clone(), weight, trunc.clone());
    for g in form.ids() {
        let mut m = form.q(g);
        while m <= *trunc {
            let c = &pal[rng.gen_range(0..pal.len())];
            out.add_term(g, m.clone(), c);
            m = &m + &Rational::one();
        }
    }
    Ok(out)
}

/// [`generic_series`] with weight `(1, 0)`.
pub fn generic(form: Arc<DiscriminantForm>, trunc: &Rational, seed: u64) -> Result<VVQSeries> {
    generic_series(form, (Rational::one(), Rational::zero()), trunc, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    #[test]
    fn deterministic_and_equivariant() {
        let l = Lattice::new(vec![vec![2, 1], vec![1, 2]]).unwrap();
        let f = Arc::new(DiscriminantForm::new(&l, 3).unwrap());
        let t = Rational::integer(5);
        let a = generic(f.clone(), &t, 7).unwrap();
        let b = generic(f.clone(), &t, 7).unwrap();
        let c = generic(f, &t, 8).unwrap();
        assert!(a.identical(&b));
        assert!(!a.identical(&c));
        assert!(a.is_t_equivariant());
        assert!(!a.is_zero());
    }
}
