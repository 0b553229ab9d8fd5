//! Dense square matrices over cyclotomic numbers.

use std::fmt;

use rayon::prelude::*;

use super::cyclotomic::CycNumber;
use super::rational::Rational;
use super::rootsum::RootSum;

#[derive(Clone, PartialEq, Eq)]
pub struct CycMatrix {
    n: usize,
    entries: Vec<CycNumber>,
}

impl CycMatrix {
    pub fn zeros(n: usize) -> CycMatrix {
        CycMatrix {
            n,
            entries: vec![CycNumber::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> CycMatrix {
        CycMatrix::diagonal((0..n).map(|_| CycNumber::one()).collect())
    }

    pub fn diagonal(d: Vec<CycNumber>) -> CycMatrix {
        let n = d.len();
        let mut m = CycMatrix::zeros(n);
        for (i, x) in d.into_iter().enumerate() {
            m.entries[i * n + i] = x;
        }
        m
    }

    /// Builds entry `(i, j)` from `f(i, j)`, rows in parallel.
    pub fn from_fn<F>(n: usize, f: F) -> CycMatrix
    where
        F: Fn(usize, usize) -> CycNumber + Sync,
    {
        let entries = (0..n * n)
            .into_par_iter()
            .map(|k| f(k / n, k % n))
            .collect();
        CycMatrix { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &CycNumber {
        &self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[CycNumber] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn conj_transpose(&self) -> CycMatrix {
        CycMatrix::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, c: &CycNumber) -> CycMatrix {
        CycMatrix {
            n: self.n,
            entries: self.entries.par_iter().map(|x| x * c).collect(),
        }
    }

    /// `self · v`.
    pub fn apply(&self, v: &[CycNumber]) -> Vec<CycNumber> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .into_par_iter()
            .map(|i| {
                let mut acc = RootSum::new(1);
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_cyc(&(a * b), &Rational::one());
                    }
                }
                acc.finish()
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let x = self.get(i, j);
                if i == j {
                    x.is_one()
                } else {
                    x.is_zero()
                }
            })
        })
    }
}

impl std::ops::Mul<&CycMatrix> for &CycMatrix {
    type Output = CycMatrix;
    fn mul(self, rhs: &CycMatrix) -> CycMatrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        let n = self.n;
        CycMatrix::from_fn(n, |i, j| {
            let mut acc = RootSum::new(1);
            for k in 0..n {
                let (a, b) = (self.get(i, k), rhs.get(k, j));
                if !a.is_zero() && !b.is_zero() {
                    acc.add_cyc(&(a * b), &Rational::one());
                }
            }
            acc.finish()
        })
    }
}

impl fmt::Debug for CycMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
