//! The Weil representation `ρ_L` of Mp₂(ℤ) on ℂ[A], exactly.

use std::sync::Arc;

use rayon::prelude::*;

use crate::arith::matrix::CycMatrix;
use crate::arith::{sqrt_int, CycNumber, Rational, RootSum};
use crate::error::{Error, Result};
use crate::lattice::{CosetId, DiscriminantForm};

/// Largest `|A|` for which dense matrices are built.
pub const MATRIX_CAP: usize = 1000;

/// Generators of Mp₂(ℤ) accepted in words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    S,
    T,
    TInv,
}

/// Parses a word over `S`, `T`, `t` (= T⁻¹); whitespace and commas are ignored.
pub fn parse_word(word: &str) -> Result<Vec<Generator>> {
    word.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            'S' => Ok(Generator::S),
            'T' => Ok(Generator::T),
            't' => Ok(Generator::TInv),
            other => Err(Error::Parse(format!(
                "unknown generator {other:?} in word {word:?}"
            ))),
        })
        .collect()
}

/// An element `(M, φ)` of Mp₂(ℤ) with `φ(τ) = sign·√(cτ + d)` (principal root).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetaplecticElement {
    pub m: [[i64; 2]; 2],
    pub sign: i8,
}

type C64 = (f64, f64);

fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C64, b: C64) -> C64 {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

fn csqrt(z: C64) -> C64 {
    let r = (z.0 * z.0 + z.1 * z.1).sqrt();
    let re = ((r + z.0) / 2.0).max(0.0).sqrt();
    let im = ((r - z.0) / 2.0).max(0.0).sqrt();
    (re, if z.1 < 0.0 { -im } else { im })
}

impl MetaplecticElement {
    pub fn identity() -> Self {
        MetaplecticElement {
            m: [[1, 0], [0, 1]],
            sign: 1,
        }
    }

    pub fn generator(g: Generator) -> Self {
        match g {
            Generator::S => MetaplecticElement {
                m: [[0, -1], [1, 0]],
                sign: 1,
            },
            Generator::T => MetaplecticElement {
                m: [[1, 1], [0, 1]],
                sign: 1,
            },
            Generator::TInv => MetaplecticElement {
                m: [[1, -1], [0, 1]],
                sign: 1,
            },
        }
    }

    fn moebius(&self, t: C64) -> C64 {
        let [[a, b], [c, d]] = self.m;
        cdiv(
            (a as f64 * t.0 + b as f64, a as f64 * t.1),
            (c as f64 * t.0 + d as f64, c as f64 * t.1),
        )
    }

    fn phi(&self, t: C64) -> C64 {
        let [_, [c, d]] = self.m;
        let r = csqrt((c as f64 * t.0 + d as f64, c as f64 * t.1));
        (self.sign as f64 * r.0, self.sign as f64 * r.1)
    }

    /// `(M₁, φ₁)(M₂, φ₂) = (M₁M₂, φ₁(M₂τ)·φ₂(τ))`; the sign is fixed by
    /// evaluation at a point of ℍ, where it is constant.
    pub fn compose(&self, other: &Self) -> Self {
        let [[a, b], [c, d]] = self.m;
        let [[e, f], [g, h]] = other.m;
        let m = [
            [a * e + b * g, a * f + b * h],
            [c * e + d * g, c * f + d * h],
        ];
        let tau = (0.1234, 1.0937);
        let lhs = cmul(self.phi(other.moebius(tau)), other.phi(tau));
        let base = MetaplecticElement { m, sign: 1 }.phi(tau);
        let ratio = cdiv(lhs, base);
        let sign = if ratio.0 > 0.0 { 1 } else { -1 };
        debug_assert!((ratio.0.abs() - 1.0).abs() < 1e-9 && ratio.1.abs() < 1e-9);
        MetaplecticElement { m, sign }
    }

    pub fn from_word(word: &[Generator]) -> Self {
        word.iter().fold(MetaplecticElement::identity(), |acc, &g| {
            acc.compose(&MetaplecticElement::generator(g))
        })
    }
}

/// `ρ_L` for a fixed discriminant form.
#[derive(Clone, Debug)]
pub struct WeilRep {
    form: Arc<DiscriminantForm>,
}

impl WeilRep {
    pub fn new(form: Arc<DiscriminantForm>) -> WeilRep {
        WeilRep { form }
    }

    pub fn form(&self) -> &DiscriminantForm {
        &self.form
    }

    /// `𝒆(−sgn/8) / √|A|`.
    pub fn s_prefactor(&self) -> CycNumber {
        let n = self.form.order() as u64;
        let inv_sqrt = sqrt_int(n).scale(&Rational::frac(1, n as i64));
        inv_sqrt.mul_e(&Rational::frac(-self.form.lattice().sgn(), 8))
    }

    fn check_size(&self) -> Result<()> {
        if self.form.order() > MATRIX_CAP {
            return Err(Error::TooLarge(format!(
                "|A| = {} exceeds the dense matrix cap {MATRIX_CAP}",
                self.form.order()
            )));
        }
        Ok(())
    }

    pub fn rho_t(&self) -> Result<CycMatrix> {
        self.check_size()?;
        Ok(CycMatrix::diagonal(
            self.form
                .ids()
                .map(|l| CycNumber::e_of(self.form.qnorm(l)))
                .collect(),
        ))
    }

    pub fn rho_t_inv(&self) -> Result<CycMatrix> {
        self.check_size()?;
        Ok(CycMatrix::diagonal(
            self.form
                .ids()
                .map(|l| CycNumber::e_of(&-self.form.qnorm(l)))
                .collect(),
        ))
    }

    /// Entry `(μ, λ)` is `𝒆(−sgn/8)/√|A| · 𝒆(−(λ, μ))`.
    pub fn rho_s(&self) -> Result<CycMatrix> {
        self.check_size()?;
        let c = self.s_prefactor();
        let f = &self.form;
        Ok(CycMatrix::from_fn(f.order(), |i, j| {
            c.mul_e(&-f.bilinear(CosetId(i), CosetId(j)))
        }))
    }

    pub fn rho_generator(&self, g: Generator) -> Result<CycMatrix> {
        match g {
            Generator::S => self.rho_s(),
            Generator::T => self.rho_t(),
            Generator::TInv => self.rho_t_inv(),
        }
    }

    /// Product of generator matrices in word order.
    pub fn rho_word(&self, word: &[Generator]) -> Result<CycMatrix> {
        self.check_size()?;
        let mut acc = CycMatrix::identity(self.form.order());
        for &g in word {
            acc = &acc * &self.rho_generator(g)?;
        }
        Ok(acc)
    }

    /// `ρ(T)·v` without building a matrix.
    pub fn apply_t(&self, v: &[CycNumber]) -> Vec<CycNumber> {
        v.par_iter()
            .enumerate()
            .map(|(i, x)| x.mul_e(self.form.qnorm(CosetId(i))))
            .collect()
    }

    /// `ρ(S)·v` without building a matrix.
    pub fn apply_s(&self, v: &[CycNumber]) -> Vec<CycNumber> {
        let c = self.s_prefactor();
        let f = &self.form;
        let support: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
        (0..f.order())
            .into_par_iter()
            .map(|mu| {
                let mut acc = RootSum::new(1);
                for &l in &support {
                    acc.add_cyc_e(
                        &v[l],
                        &-f.bilinear(CosetId(l), CosetId(mu)),
                        &Rational::one(),
                    );
                }
                &acc.finish() * &c
            })
            .collect()
    }

    /// The permutation `e_λ ↦ e_{−λ}`.
    pub fn negation(&self) -> Result<CycMatrix> {
        self.check_size()?;
        let f = &self.form;
        Ok(CycMatrix::from_fn(f.order(), |i, j| {
            if f.neg(CosetId(j)) == CosetId(i) {
                CycNumber::one()
            } else {
                CycNumber::zero()
            }
        }))
    }

    /// Σ_λ 𝒆(q(λ)).
    pub fn gauss_sum(&self) -> CycNumber {
        let mut acc = RootSum::new(1);
        for l in self.form.ids() {
            acc.add_e(self.form.qnorm(l), &Rational::one());
        }
        acc.finish()
    }
}

/// The vectors `f_λ = n^{−dim} Σ_{ν ∈ A(Rn), nν = λ} e_ν` in ℂ[A(Rn²)], one per `λ ∈ A(R)`.
///
/// Returns the base form `A(R)` together with the vectors, indexed by its cosets.
pub fn subrep_basis(
    big: &DiscriminantForm,
    n: u64,
) -> Result<(DiscriminantForm, Vec<Vec<CycNumber>>)> {
    let n2 = n * n;
    if n == 0 || !big.scale().is_multiple_of(n2) {
        return Err(Error::Contract(format!(
            "scale {} is not divisible by {n}²",
            big.scale()
        )));
    }
    let base_scale = big.scale() / n2;
    let base = DiscriminantForm::new(big.lattice(), base_scale)?;
    let coeff = CycNumber::rational(Rational::integer(n as i64).pow(-(big.dim() as i32)));
    let mut basis = vec![vec![CycNumber::zero(); big.order()]; base.order()];
    for nu in big.ids() {
        if big.contains_scale(nu, base_scale * n) {
            let lam = big.mul_to(nu, n as i64, &base)?;
            basis[lam.0][nu.0] = coeff.clone();
        }
    }
    Ok((base, basis))
}

/// Checks that `span{f_λ}` carries `ρ_L` inside `ρ_{L(n²)}`: on every `f_λ`,
/// `ρ(T)` acts by `𝒆(q(λ))` and `ρ(S)` by the `S`-matrix of `A`.
pub fn check_subrep(big: &DiscriminantForm, n: u64) -> Result<bool> {
    let (base, basis) = subrep_basis(big, n)?;
    let big_rep = WeilRep::new(Arc::new(big.clone()));
    let base_rep = WeilRep::new(Arc::new(base.clone()));
    let c = base_rep.s_prefactor();
    let ok = base.ids().collect::<Vec<_>>().par_iter().all(|&lam| {
        let f = &basis[lam.0];
        let t_side = big_rep.apply_t(f);
        let phase = CycNumber::e_of(base.qnorm(lam));
        if t_side.iter().zip(f).any(|(a, b)| *a != b * &phase) {
            return false;
        }
        let s_side = big_rep.apply_s(f);
        (0..big.order()).all(|nu| {
            let mut acc = RootSum::new(1);
            for gamma in base.ids() {
                let x = &basis[gamma.0][nu];
                if !x.is_zero() {
                    acc.add_cyc_e(x, &-base.bilinear(lam, gamma), &Rational::one());
                }
            }
            s_side[nu] == &acc.finish() * &c
        })
    });
    Ok(ok)
}
