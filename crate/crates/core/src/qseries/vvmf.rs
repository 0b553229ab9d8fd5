//! The `vvmf-v1` JSON interchange format.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::series::VVQSeries;
use crate::arith::{CycNumber, Rational};
use crate::error::{Error, Result};
use crate::lattice::{DiscriminantForm, Lattice};

pub const FORMAT: &str = "vvmf-v1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    coset: Vec<i64>,
    exp: Rational,
    value: CycNumber,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    format: String,
    gram: Vec<Vec<i64>>,
    scale: u64,
    weight: [Rational; 2],
    trunc: Rational,
    zeta_order: u64,
    coeffs: Vec<Record>,
}

/// Serializes in canonical order. `zeta_order` overrides the declared field
/// `ℚ(ζ_M)`; it must be a multiple of every coefficient's order.
pub fn to_string(psi: &VVQSeries, zeta_order: Option<u64>) -> Result<String> {
    let natural = psi.zeta_order();
    let m = match zeta_order {
        Some(m) if m == 0 || m % natural != 0 => {
            return Err(Error::Contract(format!(
                "zeta order {m} is not a multiple of the coefficient field order {natural}"
            )))
        }
        Some(m) => m,
        None => natural,
    };
    let form = psi.form();
    let coeffs = form
        .ids()
        .flat_map(|id| {
            let coset = form.coords(id);
            psi.component(id).iter().map(move |(e, v)| Record {
                coset: coset.clone(),
                exp: e.clone(),
                value: v.clone(),
            })
        })
        .collect();
    let file = File {
        format: FORMAT.into(),
        gram: form.lattice().gram().to_vec(),
        scale: form.scale(),
        weight: [psi.weight().0.clone(), psi.weight().1.clone()],
        trunc: psi.trunc().clone(),
        zeta_order: m,
        coeffs,
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

/// Parses and validates a `vvmf-v1` document.
pub fn from_str(text: &str) -> Result<VVQSeries> {
    let file: File = serde_json::from_str(text).map_err(|e| Error::Parse(format!("vvmf: {e}")))?;
    if file.format != FORMAT {
        return Err(Error::Parse(format!(
            "unknown format tag {:?}",
            file.format
        )));
    }
    let lattice = Lattice::new(file.gram)?;
    let form = Arc::new(DiscriminantForm::new(&lattice, file.scale)?);
    let [v, vb] = file.weight;
    let mut psi = VVQSeries::zero(form.clone(), (v, vb), file.trunc.clone());
    let mut last: Option<(usize, Rational)> = None;
    for r in file.coeffs {
        let id = form.from_coords(&r.coset)?;
        if form.coords(id) != r.coset {
            return Err(Error::Parse(format!(
                "coset {:?} is not in canonical form",
                r.coset
            )));
        }
        let key = (id.0, r.exp.clone());
        if last.as_ref().is_some_and(|l| *l >= key) {
            return Err(Error::Parse(format!(
                "record for coset {:?} at q^{} is out of order",
                r.coset, r.exp
            )));
        }
        if r.exp > file.trunc {
            return Err(Error::Parse(format!(
                "exponent {} exceeds trunc {}",
                r.exp, file.trunc
            )));
        }
        if r.value.is_zero() {
            return Err(Error::Parse(format!(
                "zero coefficient stored at q^{}",
                r.exp
            )));
        }
        if file.zeta_order == 0 || !file.zeta_order.is_multiple_of(r.value.order()) {
            return Err(Error::Parse(format!(
                "coefficient order {} does not divide zeta_order {}",
                r.value.order(),
                file.zeta_order
            )));
        }
        psi.add_term(id, r.exp, &r.value);
        last = Some(key);
    }
    psi.require_t_equivariant()?;
    Ok(psi)
}

pub fn read(path: &Path) -> Result<VVQSeries> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_str(&text)
}

pub fn write(path: &Path, psi: &VVQSeries, zeta_order: Option<u64>) -> Result<()> {
    std::fs::write(path, to_string(psi, zeta_order)?)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::vv_theta;

    #[test]
    fn round_trip_is_bit_exact() {
        let l = Lattice::new(vec![vec![2, 1], vec![1, 2]]).unwrap();
        let f = Arc::new(DiscriminantForm::new(&l, 2).unwrap());
        let th = vv_theta(f, &Rational::integer(3)).unwrap();
        let psi =
            th.scale(&(&CycNumber::root(12, 5) + &CycNumber::rational(Rational::frac(-3, 7))));
        let s = to_string(&psi, None).unwrap();
        let back = from_str(&s).unwrap();
        assert!(back.identical(&psi));
        assert_eq!(to_string(&back, None).unwrap(), s);
        let wide = to_string(&psi, Some(24)).unwrap();
        assert!(from_str(&wide).unwrap().identical(&psi));
        assert!(to_string(&psi, Some(5)).is_err());
    }

    #[test]
    fn rejects_malformed_documents() {
        let l = Lattice::new(vec![vec![2]]).unwrap();
        let th = vv_theta(
            Arc::new(DiscriminantForm::new(&l, 1).unwrap()),
            &Rational::integer(1),
        )
        .unwrap();
        let good = to_string(&th, None).unwrap();
        assert!(from_str(&good.replace("vvmf-v1", "vvmf-v0")).is_err());
        assert!(from_str(&good.replace("\"1/4\"", "\"1/3\"")).is_err());
        assert!(from_str("{}").is_err());
    }
}
