//! Even nondegenerate integral lattices given by a Gram matrix.

use std::fmt;

use crate::arith::nt::lcm;
use crate::arith::Rational;
use crate::error::{Error, Result};

/// An even lattice ℤⁿ with bilinear form `gram`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    gram: Vec<Vec<i64>>,
    sig_plus: usize,
    sig_minus: usize,
    det: i64,
    level: u64,
}

fn to_rational(g: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    g.iter()
        .map(|r| r.iter().map(|&x| Rational::integer(x)).collect())
        .collect()
}

/// Gauss–Jordan inverse and determinant over ℚ; `None` if singular.
pub(crate) fn inverse_and_det(g: &[Vec<i64>]) -> Option<(Vec<Vec<Rational>>, Rational)> {
    let n = g.len();
    let mut a = to_rational(g);
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut det = Rational::one();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        if p != c {
            a.swap(p, c);
            inv.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        let pinv = piv.recip();
        for j in 0..n {
            a[c][j] *= &pinv;
            inv[c][j] *= &pinv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= &t;
                    let t = &f * &inv[c][j];
                    inv[i][j] -= &t;
                }
            }
        }
    }
    Some((inv, det))
}

/// `(b⁺, b⁻)` by symmetric congruence diagonalization over ℚ.
fn signature(g: &[Vec<i64>]) -> (usize, usize) {
    let n = g.len();
    let mut a = to_rational(g);
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // replace e_k by e_k + e_j; the new diagonal entry is 2·a[k][j] ≠ 0
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[k][c] += &t;
                }
                for row in a.iter_mut() {
                    let t = row[j].clone();
                    row[k] += &t;
                }
            } else {
                continue;
            }
        }
        let piv = a[k][k].clone();
        if piv.is_negative() {
            neg += 1;
        } else {
            pos += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &piv;
            for c in 0..n {
                let t = &f * &a[k][c];
                a[i][c] -= &t;
            }
            for row in a.iter_mut() {
                let t = &f * &row[k];
                row[i] -= &t;
            }
        }
    }
    (pos, neg)
}

impl Lattice {
    /// Reads a Gram matrix written as JSON (`[[2,1],[1,2]]`) or as whitespace-separated rows.
    pub fn parse(text: &str) -> Result<Lattice> {
        let t = text.trim();
        let gram: Vec<Vec<i64>> = if t.starts_with('[') {
            serde_json::from_str(t).map_err(|e| Error::Parse(format!("gram: {e}")))?
        } else {
            t.lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    l.split_whitespace()
                        .map(|x| {
                            x.parse::<i64>()
                                .map_err(|e| Error::Parse(format!("gram entry {x:?}: {e}")))
                        })
                        .collect()
                })
                .collect::<Result<_>>()?
        };
        Lattice::new(gram)
    }

    /// Validates `gram` (square, symmetric, even diagonal, nonsingular).
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Lattice> {
        let n = gram.len();
        if n == 0 {
            return Err(Error::InvalidLattice("empty Gram matrix".into()));
        }
        if gram.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidLattice("Gram matrix is not square".into()));
        }
        for i in 0..n {
            if gram[i][i] % 2 != 0 {
                return Err(Error::InvalidLattice(format!(
                    "diagonal entry {} at position {i} is odd",
                    gram[i][i]
                )));
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidLattice("Gram matrix is not symmetric".into()));
                }
            }
        }
        let (inv, det) = inverse_and_det(&gram)
            .ok_or_else(|| Error::InvalidLattice("Gram matrix is singular".into()))?;
        let det = det
            .to_i64()
            .ok_or_else(|| Error::TooLarge("determinant exceeds machine range".into()))?;
        let mut level = 1u64;
        let half = Rational::frac(1, 2);
        for i in 0..n {
            for j in i..n {
                let v = if i == j {
                    &inv[i][i] * &half
                } else {
                    inv[i][j].clone()
                };
                let (_, d) = v
                    .to_i64_parts()
                    .ok_or_else(|| Error::TooLarge("level exceeds machine range".into()))?;
                level = lcm(level, d as u64);
            }
        }
        let (sig_plus, sig_minus) = signature(&gram);
        debug_assert_eq!(sig_plus + sig_minus, n);
        Ok(Lattice {
            gram,
            sig_plus,
            sig_minus,
            det,
            level,
        })
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.sig_plus, self.sig_minus)
    }

    /// `b⁺ − b⁻`.
    pub fn sgn(&self) -> i64 {
        self.sig_plus as i64 - self.sig_minus as i64
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn is_positive_definite(&self) -> bool {
        self.sig_minus == 0
    }

    /// `L(r)`: the same group with form multiplied by `r`.
    pub fn rescale(&self, r: u64) -> Result<Lattice> {
        if r == 0 {
            return Err(Error::Contract("rescaling factor must be positive".into()));
        }
        let r = i64::try_from(r).map_err(|_| Error::TooLarge("rescaling factor".into()))?;
        let gram = self
            .gram
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| {
                        x.checked_mul(r)
                            .ok_or_else(|| Error::TooLarge("rescaled Gram entry".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Lattice::new(gram)
    }

    /// `(x, y) = xᵀ G y` for rational vectors.
    pub fn inner(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (i, row) in self.gram.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                if g != 0 {
                    acc += &(&(&x[i] * &y[j]) * &Rational::integer(g));
                }
            }
        }
        acc
    }

    /// `G⁻¹` over ℚ.
    pub fn inverse(&self) -> Vec<Vec<Rational>> {
        inverse_and_det(&self.gram)
            .expect("validated lattice is nonsingular")
            .0
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice({:?})", self.gram)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.gram)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_both_layouts() {
        let a = Lattice::parse("[[2,1],[1,2]]").unwrap();
        let b = Lattice::parse("2 1\n1 2\n").unwrap();
        assert_eq!(a, b);
        assert!(Lattice::parse("3").is_err());
        assert!(Lattice::parse("2 x").is_err());
    }

    fn lat(g: &[&[i64]]) -> Lattice {
        Lattice::new(g.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn signatures_and_levels() {
        let a1 = lat(&[&[2]]);
        assert_eq!((a1.signature(), a1.level(), a1.det()), ((1, 0), 4, 2));
        let a1m = lat(&[&[-2]]);
        assert_eq!((a1m.signature(), a1m.level()), ((0, 1), 4));
        let a2 = lat(&[&[2, 1], &[1, 2]]);
        assert_eq!((a2.signature(), a2.level(), a2.det()), ((2, 0), 3, 3));
        let h = lat(&[&[0, 1], &[1, 0]]);
        assert_eq!((h.signature(), h.level(), h.det()), ((1, 1), 1, -1));
        let m = lat(&[&[2, 0], &[0, -2]]);
        assert_eq!((m.signature(), m.sgn()), ((1, 1), 0));
        let d4 = lat(&[
            &[2, -1, 0, 0],
            &[-1, 2, -1, -1],
            &[0, -1, 2, 0],
            &[0, -1, 0, 2],
        ]);
        assert_eq!((d4.signature(), d4.det(), d4.level()), ((4, 0), 4, 2));
    }

    #[test]
    fn zero_diagonal_pivots() {
        let g = lat(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, -4]]);
        assert_eq!(g.signature(), (1, 2));
        let g = lat(&[&[0, 3], &[3, 0]]);
        assert_eq!(g.signature(), (1, 1));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Lattice::new(vec![vec![1]]).is_err());
        assert!(Lattice::new(vec![vec![2, 1], vec![0, 2]]).is_err());
        assert!(Lattice::new(vec![vec![2, 2], vec![2, 2]]).is_err());
        assert!(Lattice::new(vec![]).is_err());
    }

    #[test]
    fn rescale_examples() {
        assert_eq!(lat(&[&[2]]).rescale(1).unwrap(), lat(&[&[2]]));
        assert_eq!(lat(&[&[2]]).rescale(4).unwrap().gram(), &[vec![8]]);
        let a2 = lat(&[&[2, 1], &[1, 2]]).rescale(2).unwrap();
        assert_eq!(a2.gram(), &[vec![4, 2], vec![2, 4]]);
        assert_eq!(a2.signature(), (2, 0));
        assert_eq!(a2.level(), 6);
    }
}
