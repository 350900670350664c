//! Dense matrices and the operator traits shared by explicit and
//! matrix-free graph matrices.
//!
//! Real products skip zero entries and accumulate in ascending index order,
//! so a matrix-free operator that streams the same entries in the same order
//! reproduces the dense product bit for bit.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// A real linear map `R^ncols -> R^nrows` that can be applied and transposed.
pub trait LinearOperator: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>>;
}

/// Integer-valued matrix with random access to entries.
pub trait IntegerMatrix: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn entry_at(&self, i: usize, j: usize) -> i64;

    /// Exact product with an integer vector.
    fn apply_exact(&self, x: &[i64]) -> Result<Vec<i128>> {
        check_len(self.ncols(), x.len())?;
        (0..self.nrows())
            .into_par_iter()
            .map(|i| {
                let mut acc: i128 = 0;
                for (j, &xj) in x.iter().enumerate() {
                    if xj == 0 {
                        continue;
                    }
                    let e = self.entry_at(i, j);
                    acc = acc
                        .checked_add(e as i128 * xj as i128)
                        .ok_or_else(|| Error::Overflow("integer matrix-vector product".into()))?;
                }
                Ok(acc)
            })
            .collect()
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[i64] {
        &self.data
    }
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.data[i * self.cols + j] = value;
    }
    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v as f64).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    /// Entrywise `self * factor`, failing on overflow.
    pub fn scaled(&self, factor: i64) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|&v| v.checked_mul(factor))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Overflow("matrix scaling".into()))?;
        Ok(DenseMatrix { data, ..*self })
    }

    /// `self += other`, failing on overflow or shape mismatch.
    pub fn add_assign_checked(&mut self, other: &DenseMatrix) -> Result<()> {
        self.check_same(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = a
                .checked_add(b)
                .ok_or_else(|| Error::Overflow("matrix addition".into()))?;
        }
        Ok(())
    }

    fn check_same(&self, other: &DenseMatrix) -> Result<()> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: other.rows,
            });
        }
        check_len(self.cols, other.cols)
    }

    /// Exact sum of squared entries.
    pub fn frobenius_squared(&self) -> i128 {
        self.data.iter().map(|&v| v as i128 * v as i128).sum()
    }

    /// `⟨self, other⟩ = Σ self(i,j)·other(i,j)`, exact.
    pub fn inner_product(&self, other: &DenseMatrix) -> Result<i128> {
        self.check_same(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum())
    }

    /// Gram matrix over the smaller side (`M Mᵀ` or `Mᵀ M`), exact.
    pub fn gram_smaller_side(&self) -> Result<Vec<Vec<i128>>> {
        let (dim, len, get): (usize, usize, Box<dyn Fn(usize, usize) -> i64 + '_>) =
            if self.rows <= self.cols {
                (self.rows, self.cols, Box::new(|a, l| self.get(a, l)))
            } else {
                (self.cols, self.rows, Box::new(|a, l| self.get(l, a)))
            };
        let mut g = vec![vec![0i128; dim]; dim];
        for a in 0..dim {
            for b in a..dim {
                let mut acc: i128 = 0;
                for l in 0..len {
                    acc = acc
                        .checked_add(get(a, l) as i128 * get(b, l) as i128)
                        .ok_or_else(|| Error::Overflow("Gram matrix".into()))?;
                }
                g[a][b] = acc;
                g[b][a] = acc;
            }
        }
        Ok(g)
    }

    /// Writes one whitespace-separated text row per matrix row.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl IntegerMatrix for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }
    fn ncols(&self) -> usize {
        self.cols
    }
    fn entry_at(&self, i: usize, j: usize) -> i64 {
        self.get(i, j)
    }
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }
    fn ncols(&self) -> usize {
        self.cols
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        Ok((0..self.rows)
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                for (j, &e) in self.row(i).iter().enumerate() {
                    if e != 0 {
                        acc += e as f64 * x[j];
                    }
                }
                acc
            })
            .collect())
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            for (j, &e) in self.row(i).iter().enumerate() {
                if e != 0 {
                    out[j] += e as f64 * yi;
                }
            }
        }
        Ok(out)
    }
}

/// Row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RealMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn transpose(&self) -> Self {
        RealMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl LinearOperator for RealMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }
    fn ncols(&self) -> usize {
        self.cols
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        Ok((0..self.rows)
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                for (j, &e) in self.row(i).iter().enumerate() {
                    if e != 0.0 {
                        acc += e * x[j];
                    }
                }
                acc
            })
            .collect())
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            for (j, &e) in self.row(i).iter().enumerate() {
                if e != 0.0 {
                    out[j] += e * yi;
                }
            }
        }
        Ok(out)
    }
}

/// Operator `Mᵀ` for any operator `M`.
pub struct Transposed<'a, M: LinearOperator + ?Sized>(pub &'a M);

impl<M: LinearOperator + ?Sized> LinearOperator for Transposed<'_, M> {
    fn nrows(&self) -> usize {
        self.0.ncols()
    }
    fn ncols(&self) -> usize {
        self.0.nrows()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.0.apply_transpose(x)
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.0.apply(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_transposes_agree() {
        let m = DenseMatrix::from_fn(3, 4, |i, j| (i as i64 + 1) * (j as i64) - 2);
        let x = [1.0, -2.0, 0.5, 3.0];
        let y = m.apply(&x).unwrap();
        for i in 0..3 {
            let direct: f64 = (0..4).map(|j| m.get(i, j) as f64 * x[j]).sum();
            assert!((direct - y[i]).abs() < 1e-12);
        }
        let z = [1.0, 0.0, -1.0];
        assert_eq!(
            m.apply_transpose(&z).unwrap(),
            m.transpose().apply(&z).unwrap()
        );
        assert_eq!(m.to_real().apply(&x).unwrap(), y);
        assert!(m.apply(&[1.0]).is_err());
    }

    #[test]
    fn exact_product_and_inner_product() {
        let m = DenseMatrix::from_vec(2, 2, vec![1, -2, 3, 4]).unwrap();
        assert_eq!(m.apply_exact(&[5, 6]).unwrap(), vec![-7, 39]);
        assert_eq!(m.inner_product(&m).unwrap(), m.frobenius_squared());
        assert_eq!(m.frobenius_squared(), 30);
        assert_eq!(m.inner_product(&DenseMatrix::zeros(2, 2)).unwrap(), 0);
        assert!(m.inner_product(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn gram_uses_smaller_side() {
        let m = DenseMatrix::from_vec(1, 3, vec![1, 2, 3]).unwrap();
        assert_eq!(m.gram_smaller_side().unwrap(), vec![vec![14]]);
        assert_eq!(m.transpose().gram_smaller_side().unwrap(), vec![vec![14]]);
    }

    #[test]
    fn text_dump() {
        let m = DenseMatrix::from_vec(2, 2, vec![0, -1, 1, 0]).unwrap();
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 -1\n1 0\n");
    }
}
