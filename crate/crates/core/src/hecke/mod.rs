//! Hecke-type operators on vector-valued q-series and their relations.

pub mod bs;
pub mod generic;
pub mod ops;
pub mod relations;

pub use bs::bs_op;
pub use generic::{generic, generic_series};
pub use ops::{h_op, h_op_closed, hecke_weight_sum, p_op, t_op, t_op_literal, u_op};
pub use relations::{check_relation, support_off, Outcome, Relation, RelationReport, Tamper};

use crate::arith::nt::is_prime;
use crate::error::{Error, Result};
use crate::qseries::{SumMode, VVQSeries};

/// A single operator with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorDescriptor {
    T { r: u64, mode: SumMode },
    U { n: u64 },
    P { n: u64 },
    H { n: u64, mode: SumMode },
    Bs { p: u64, l: u32 },
}

impl OperatorDescriptor {
    /// Parameter checks that do not depend on the input series.
    pub fn validate(&self) -> Result<()> {
        let positive = |x: u64, what: &str| {
            if x == 0 {
                Err(Error::Contract(format!("{what} must be positive")))
            } else {
                Ok(())
            }
        };
        match *self {
            OperatorDescriptor::T { r, .. } => positive(r, "r"),
            OperatorDescriptor::U { n }
            | OperatorDescriptor::P { n }
            | OperatorDescriptor::H { n, .. } => positive(n, "n"),
            OperatorDescriptor::Bs { p, l } => {
                if p == 2 {
                    return Err(Error::Unsupported(
                        "the explicit formula is only available for odd primes".into(),
                    ));
                }
                if !is_prime(p) {
                    return Err(Error::Contract(format!("p = {p} is not prime")));
                }
                positive(l as u64, "l")
            }
        }
    }

    pub fn apply(&self, psi: &VVQSeries) -> Result<VVQSeries> {
        self.validate()?;
        match *self {
            OperatorDescriptor::T { r, mode } => t_op(psi, r, mode),
            OperatorDescriptor::U { n } => u_op(psi, n),
            OperatorDescriptor::P { n } => p_op(psi, n),
            OperatorDescriptor::H { n, mode } => h_op(psi, n, mode),
            OperatorDescriptor::Bs { p, l } => bs_op(psi, p, l),
        }
    }
}
