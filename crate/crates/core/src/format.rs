//! Text, JSON and CSV renderings. Machine formats carry every number as a
//! decimal string; rationals are always `"p/q"`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coeffs::CoeffVector;
use crate::error::Result;
use crate::invariants::InvariantTable;
use crate::numeric::{format_int, format_rational, parse_int, parse_rational};
use crate::polyseq::EvenPoly;
use crate::trees::WeightMonomial;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub n: u32,
    pub coeffs: Vec<String>,
}

impl PolyJson {
    pub fn new(n: u32, p: &EvenPoly) -> Self {
        PolyJson { n, coeffs: p.coeffs().iter().map(format_int).collect() }
    }

    pub fn to_poly(&self) -> Result<EvenPoly> {
        let c = self.coeffs.iter().map(|s| parse_int(s)).collect::<Result<Vec<_>>>()?;
        Ok(EvenPoly::new(c))
    }
}

/// Decreasing degree, e.g. `x^4 - 4x^2 + 2`.
pub fn poly_text(p: &EvenPoly) -> String {
    let mut out = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let deg = 2 * k;
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let show_mag = deg == 0 || !mag.is_one();
        if show_mag {
            out.push_str(&mag.to_string());
        }
        match deg {
            0 => {}
            1 => out.push('x'),
            _ => out.push_str(&format!("x^{deg}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Rows `k,c` with `c` the coefficient of `x^(2k)`.
pub fn poly_csv(p: &EvenPoly, header: bool) -> String {
    let mut out = String::new();
    if header {
        out.push_str("k,c\n");
    }
    for (k, c) in p.coeffs().iter().enumerate() {
        out.push_str(&format!("{k},{c}\n"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffVectorJson {
    pub n: u32,
    pub kmax: u64,
    pub values: Vec<String>,
}

impl From<&CoeffVector> for CoeffVectorJson {
    fn from(v: &CoeffVector) -> Self {
        CoeffVectorJson { n: v.n, kmax: v.kmax, values: v.values.iter().map(format_int).collect() }
    }
}

impl CoeffVectorJson {
    pub fn to_vector(&self) -> Result<CoeffVector> {
        let values = self.values.iter().map(|s| parse_int(s)).collect::<Result<Vec<BigInt>>>()?;
        Ok(CoeffVector { n: self.n, kmax: self.kmax, values })
    }
}

pub fn coeff_vector_csv(v: &CoeffVector, header: bool) -> String {
    let mut out = String::new();
    if header {
        out.push_str("n,k,c\n");
    }
    for (k, c) in v.values.iter().enumerate() {
        out.push_str(&format!("{},{k},{c}\n", v.n));
    }
    out
}

/// `{"kmax": K, "a": [[a_{1,1}], [a_{1,2}, a_{2,2}], ...]}`; entry `a[k-1][j-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub kmax: u64,
    pub a: Vec<Vec<String>>,
}

impl From<&InvariantTable> for TableJson {
    fn from(t: &InvariantTable) -> Self {
        TableJson { kmax: t.kmax(), a: t.columns().iter().map(|c| c.iter().map(format_rational).collect()).collect() }
    }
}

impl TableJson {
    pub fn to_table(&self) -> Result<InvariantTable> {
        let columns = self
            .a
            .iter()
            .map(|c| c.iter().map(|s| parse_rational(s)).collect::<Result<Vec<BigRational>>>())
            .collect::<Result<Vec<_>>>()?;
        let t = InvariantTable::from_columns(columns)?;
        if t.kmax() != self.kmax {
            return Err(crate::Error::Parse(format!("kmax {} but {} columns", self.kmax, t.kmax())));
        }
        Ok(t)
    }
}

/// CSV rows `j,k,a` with `a` as `p/q`.
pub fn table_csv(t: &InvariantTable, header: bool) -> String {
    let mut out = String::new();
    if header {
        out.push_str("j,k,a\n");
    }
    for (ki, col) in t.columns().iter().enumerate() {
        for (ji, a) in col.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", ji + 1, ki + 1, format_rational(a)));
        }
    }
    out
}

/// One line per `k`: `k=4: -1/560, 7/2880, ...`, with decimal approximations
/// appended for humans.
pub fn table_text(t: &InvariantTable, approx: bool) -> String {
    let mut out = String::new();
    for (ki, col) in t.columns().iter().enumerate() {
        let entries: Vec<String> = col
            .iter()
            .map(|a| {
                if approx {
                    format!("{} (~{:.6e})", format_rational(a), a.to_f64().unwrap_or(f64::NAN))
                } else {
                    format_rational(a)
                }
            })
            .collect();
        out.push_str(&format!("k={}: {}\n", ki + 1, entries.join(", ")));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub monomial: BTreeMap<String, u32>,
    pub count: String,
}

pub fn grouped_json(groups: &BTreeMap<WeightMonomial, BigInt>) -> Vec<GroupJson> {
    groups
        .iter()
        .map(|(m, c)| GroupJson {
            monomial: m.exponents.iter().map(|(v, e)| (v.to_string(), *e)).collect(),
            count: format_int(c),
        })
        .collect()
}
