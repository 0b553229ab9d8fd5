//! Smith normal form of nonsingular integer matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<BigInt>>;

/// `U·G·V = diag(d)` with `d_1 | d_2 | …`, all `d_i > 0`, `U` and `V` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub d: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// `V⁻¹`, tracked alongside `V`.
    pub v_inv: IntMatrix,
}

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// `row_i -= q·row_j`.
fn row_axpy(m: &mut IntMatrix, i: usize, j: usize, q: &BigInt) {
    let rj = m[j].clone();
    for (a, b) in m[i].iter_mut().zip(rj.iter()) {
        *a -= q * b;
    }
}

/// `col_i -= q·col_j`.
fn col_axpy(m: &mut IntMatrix, i: usize, j: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let b = row[j].clone();
        row[i] -= q * b;
    }
}

fn swap_cols(m: &mut IntMatrix, i: usize, j: usize) {
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

pub fn smith_normal_form(g: &[Vec<i64>]) -> Result<SnfResult> {
    let n = g.len();
    if g.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidLattice("matrix is not square".into()));
    }
    let mut a: IntMatrix = g
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut u = identity(n);
    let mut v = identity(n);
    let mut v_inv = identity(n);

    for t in 0..n {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let (pi, pj) =
                best.ok_or_else(|| Error::InvalidLattice("matrix is singular".into()))?;
            a.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);
            v_inv.swap(t, pj);

            let mut clean = true;
            for i in t + 1..n {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    row_axpy(&mut a, i, t, &q);
                    row_axpy(&mut u, i, t, &q);
                    clean &= a[i][t].is_zero();
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    col_axpy(&mut a, j, t, &q);
                    col_axpy(&mut v, j, t, &q);
                    // V ← V·E with E = I − q·e_t e_jᵀ, so V⁻¹ ← (I + q·e_t e_jᵀ)·V⁻¹
                    let neg = -q;
                    row_axpy(&mut v_inv, t, j, &neg);
                    clean &= a[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a[i][j].is_multiple_of(&a[t][t]));
            match bad {
                Some((i, _)) => {
                    let m1 = -BigInt::one();
                    row_axpy(&mut a, t, i, &m1);
                    row_axpy(&mut u, t, i, &m1);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    let d = (0..n).map(|i| a[i][i].clone()).collect();
    Ok(SnfResult { d, u, v, v_inv })
}

/// Integer matrix product.
pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(m: &[Vec<i64>]) -> IntMatrix {
        m.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn check(g: &[Vec<i64>]) -> SnfResult {
        let s = smith_normal_form(g).unwrap();
        let n = g.len();
        let prod = mat_mul(&mat_mul(&s.u, &big(g)), &s.v);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j {
                    s.d[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(prod[i][j], want);
            }
        }
        assert_eq!(mat_mul(&s.v, &s.v_inv), identity(n));
        for w in s.d.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(s.d.iter().all(|x| x.is_positive()));
        s
    }

    #[test]
    fn examples() {
        let s = check(&[vec![2]]);
        assert_eq!(s.d, vec![BigInt::from(2)]);
        assert_eq!(s.v, identity(1));
        let s = check(&[vec![2, 1], vec![1, 2]]);
        assert_eq!(s.d, vec![BigInt::from(1), BigInt::from(3)]);
        let s = check(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(s.d, vec![BigInt::from(1), BigInt::from(1)]);
        let s = check(&[vec![2, 0], vec![0, 4]]);
        assert_eq!(s.d, vec![BigInt::from(2), BigInt::from(4)]);
        let s = check(&[vec![4, 0], vec![0, 6]]);
        assert_eq!(s.d, vec![BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn singular_is_an_error() {
        assert!(smith_normal_form(&[vec![2, 4], vec![1, 2]]).is_err());
    }

    proptest! {
        #[test]
        fn random_nonsingular(m in proptest::collection::vec(-9i64..10, 9)) {
            let g: Vec<Vec<i64>> = m.chunks(3).map(|r| r.to_vec()).collect();
            if let Ok(s) = smith_normal_form(&g) {
                let _ = check(&g);
                // |det G| equals the product of the invariant factors
                let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
                    - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
                    + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
                let prod: BigInt = s.d.iter().product();
                prop_assert_eq!(prod, BigInt::from(det.abs()));
            }
        }
    }
}
