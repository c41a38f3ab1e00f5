//! Small dense K x K real matrices for block-level statistics.

use crate::error::{MesoError, Result};

/// Row-major square matrix of `f64`, sized for group counts (K is small).
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    k: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(k: usize) -> Self {
        SquareMatrix {
            k,
            data: vec![0.0; k * k],
        }
    }

    pub fn constant(k: usize, value: f64) -> Self {
        SquareMatrix {
            k,
            data: vec![value; k * k],
        }
    }

    /// Builds a matrix from row slices; every row must have length `rows.len()`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        let mut data = Vec::with_capacity(k * k);
        for row in rows {
            if row.len() != k {
                return Err(MesoError::DimensionMismatch {
                    expected: k,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(SquareMatrix { k, data })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.k + b]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, value: f64) {
        self.data[a * self.k + b] = value;
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.k)
            .map(|a| (0..self.k).map(|b| self.get(a, b)).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.k)
            .map(|b| (0..self.k).map(|a| self.get(a, b)).sum())
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.k).all(|a| (a + 1..self.k).all(|b| (self.get(a, b) - self.get(b, a)).abs() <= tol))
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

impl std::fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for a in 0..self.k {
            let row: Vec<String> = (0..self.k).map(|b| format!("{}", self.get(a, b))).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_and_col_sums() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.row_sums(), vec![3.0, 7.0]);
        assert_eq!(m.col_sums(), vec![4.0, 6.0]);
        assert_eq!(m.total(), 10.0);
        assert!(!m.is_symmetric(0.0));
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, MesoError::DimensionMismatch { .. }));
    }
}
