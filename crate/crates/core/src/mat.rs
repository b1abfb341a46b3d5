//! Dense matrices tagged with their scalar field, plus the involution kinds.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Scalar field of a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => write!(f, "real"),
            Field::Complex => write!(f, "complex"),
        }
    }
}

/// The star operation: transpose `T` or conjugate transpose `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Involution {
    T,
    H,
}

impl Involution {
    /// Real matrices under `H` behave exactly as under `T`.
    pub fn effective(self, field: Field) -> Involution {
        match field {
            Field::Real => Involution::T,
            Field::Complex => self,
        }
    }

    /// Applies the involution to a scalar: identity for `T`, conjugation for `H`.
    pub fn apply_scalar(self, z: C64) -> C64 {
        match self {
            Involution::T => z,
            Involution::H => z.conj(),
        }
    }
}

impl fmt::Display for Involution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Involution::T => write!(f, "T"),
            Involution::H => write!(f, "H"),
        }
    }
}

impl FromStr for Involution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "T" | "t" => Ok(Involution::T),
            "H" | "h" => Ok(Involution::H),
            other => Err(Error::Input(format!("unknown involution `{other}`"))),
        }
    }
}

/// Dense matrix with a uniform field tag. Real-tagged matrices have zero imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    field: Field,
    data: CMat,
}

impl Mat {
    /// Wraps a complex matrix with the given field; imaginary parts are dropped for `Real`.
    pub fn new(mut data: CMat, field: Field) -> Self {
        if field == Field::Real {
            data.iter_mut().for_each(|z| z.im = 0.0);
        }
        Mat { field, data }
    }

    pub fn complex(data: CMat) -> Self {
        Mat {
            field: Field::Complex,
            data,
        }
    }

    /// Infers the field: `Real` when every imaginary part is exactly zero.
    pub fn auto(data: CMat) -> Self {
        let field = if data.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        };
        Mat { field, data }
    }

    /// Real matrix from row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Mat {
            field: Field::Real,
            data: CMat::from_fn(rows, cols, |i, j| C64::new(entries[i * cols + j], 0.0)),
        }
    }

    /// Complex matrix from row-major entries.
    pub fn from_complex(rows: usize, cols: usize, entries: &[C64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Mat {
            field: Field::Complex,
            data: CMat::from_fn(rows, cols, |i, j| entries[i * cols + j]),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let flat: Vec<f64> = rows.iter().flat_map(|row| row.iter().copied()).collect();
        Mat::from_real(r, c, &flat)
    }

    pub fn zeros(rows: usize, cols: usize, field: Field) -> Self {
        Mat {
            field,
            data: CMat::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize, field: Field) -> Self {
        Mat {
            field,
            data: CMat::identity(n, n),
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn cm(&self) -> &CMat {
        &self.data
    }

    pub fn into_cmat(self) -> CMat {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn transpose(&self) -> Mat {
        Mat {
            field: self.field,
            data: self.data.transpose(),
        }
    }

    pub fn adjoint(&self) -> Mat {
        Mat {
            field: self.field,
            data: self.data.adjoint(),
        }
    }

    pub fn star(&self, inv: Involution) -> Mat {
        match inv {
            Involution::T => self.transpose(),
            Involution::H => self.adjoint(),
        }
    }

    pub fn scale(&self, s: C64) -> Mat {
        let field = if s.im == 0.0 {
            self.field
        } else {
            Field::Complex
        };
        Mat {
            field,
            data: &self.data * s,
        }
    }

    pub fn norm(&self) -> f64 {
        frob(&self.data)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Row-major real parts.
    pub fn real_entries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.data[(i, j)].re);
            }
        }
        out
    }

    /// Serializes to the repo-wide matrix JSON value.
    pub fn to_json(&self) -> Value {
        let data: Vec<Value> = (0..self.rows())
            .map(|i| {
                Value::Array(
                    (0..self.cols())
                        .map(|j| {
                            let z = self.data[(i, j)];
                            match self.field {
                                Field::Real => Value::from(z.re),
                                Field::Complex => Value::from(vec![z.re, z.im]),
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        serde_json::json!({
            "rows": self.rows(),
            "cols": self.cols(),
            "field": self.field,
            "data": data,
        })
    }

    /// Parses the matrix JSON schema. Complex-tagged data may mix bare numbers and `[re, im]` pairs.
    pub fn from_json(v: &Value) -> Result<Mat> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Input("matrix JSON must be an object".into()))?;
        let dim = |key: &str| -> Result<usize> {
            obj.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Input(format!("missing or invalid `{key}`")))
        };
        let rows = dim("rows")?;
        let cols = dim("cols")?;
        let field = match obj.get("field").and_then(Value::as_str) {
            Some("real") | None => Field::Real,
            Some("complex") => Field::Complex,
            Some(other) => return Err(Error::Input(format!("unknown field `{other}`"))),
        };
        let data = obj
            .get("data")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Input("missing `data`".into()))?;
        if data.len() != rows {
            return Err(Error::Input(format!(
                "expected {rows} rows, found {}",
                data.len()
            )));
        }
        let mut m = CMat::zeros(rows, cols);
        for (i, row) in data.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Input(format!("row {i} is not an array")))?;
            if row.len() != cols {
                return Err(Error::Input(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = parse_scalar(x)
                    .ok_or_else(|| Error::Input(format!("bad entry at ({i}, {j})")))?;
            }
        }
        if field == Field::Real && m.iter().any(|z| z.im != 0.0) {
            return Err(Error::Input(
                "real-tagged matrix has complex entries".into(),
            ));
        }
        Ok(Mat { field, data: m })
    }

    pub fn from_json_str(s: &str) -> Result<Mat> {
        let v: Value = serde_json::from_str(s)?;
        Mat::from_json(&v)
    }

    /// Parses a CSV of real numbers, one matrix row per line.
    pub fn from_csv_str(s: &str) -> Result<Mat> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (ln, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Input(format!("line {}: {e}", ln + 1)))?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Input("empty CSV matrix".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Input("ragged CSV matrix".into()));
        }
        Ok(Mat::from_rows(&rows))
    }
}

fn parse_scalar(x: &Value) -> Option<C64> {
    match x {
        Value::Number(n) => n.as_f64().map(|re| C64::new(re, 0.0)),
        Value::Array(pair) if pair.len() == 2 => {
            Some(C64::new(pair[0].as_f64()?, pair[1].as_f64()?))
        }
        _ => None,
    }
}

/// Frobenius norm of a complex matrix.
pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl<'a> Mul<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn mul(self, rhs: &'a Mat) -> Mat {
        Mat {
            field: self.field.join(rhs.field),
            data: &self.data * &rhs.data,
        }
    }
}

impl<'a> Add<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn add(self, rhs: &'a Mat) -> Mat {
        Mat {
            field: self.field.join(rhs.field),
            data: &self.data + &rhs.data,
        }
    }
}

impl<'a> Sub<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn sub(self, rhs: &'a Mat) -> Mat {
        Mat {
            field: self.field.join(rhs.field),
            data: &self.data - &rhs.data,
        }
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        Mat {
            field: self.field,
            data: -&self.data,
        }
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|j| {
                    let z = self.data[(i, j)];
                    match self.field {
                        Field::Real => format!("{:.6}", z.re),
                        Field::Complex => format!("{:.6}{:+.6}i", z.re, z.im),
                    }
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
