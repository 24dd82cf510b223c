//! Symmetric dissimilarity matrix shared by both equivalence engines.

use crate::error::{Error, Result};

/// Dense symmetric matrix of pairwise dissimilarities in `[0, 1]` with a
/// zero diagonal. Stored row-major over the full square for O(1) access.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Matrix of the given size with every off-diagonal entry set to `fill`.
    pub fn filled(n: usize, fill: f64) -> Self {
        let mut values = vec![fill; n * n];
        for i in 0..n {
            values[i * n + i] = 0.0;
        }
        DissimilarityMatrix { n, values }
    }

    /// All-zero matrix of the given size.
    pub fn zeros(n: usize) -> Self {
        DissimilarityMatrix {
            n,
            values: vec![0.0; n * n],
        }
    }

    /// Builds a matrix from a full row-major square, validating symmetry,
    /// range, and the zero diagonal.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} values for n={}, got {}",
                n * n,
                n,
                values.len()
            )));
        }
        let m = DissimilarityMatrix { n, values };
        m.validate()?;
        Ok(m)
    }

    /// Number of rows (and columns).
    pub fn len(&self) -> usize {
        self.n
    }

    /// True for the 0x0 matrix.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Entry at `(i, j)`. Panics when out of range.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "matrix index out of range");
        self.values[i * self.n + j]
    }

    /// Sets the symmetric pair `(i, j)` and `(j, i)`; rejects the diagonal.
    pub fn set_pair(&mut self, i: usize, j: usize, value: f64) {
        assert!(i < self.n && j < self.n, "matrix index out of range");
        assert!(i != j, "diagonal entries are fixed at zero");
        self.values[i * self.n + j] = value;
        self.values[j * self.n + i] = value;
    }

    /// One full row of the matrix.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Checks symmetry, the `[0, 1]` range, and the zero diagonal.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            if self.values[i * self.n + i] != 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry ({i}, {i}) is {}, expected 0",
                    self.values[i * self.n + i]
                )));
            }
            for j in (i + 1)..self.n {
                let a = self.values[i * self.n + j];
                let b = self.values[j * self.n + i];
                if a != b {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetric pair ({i}, {j}): {a} vs {b}"
                    )));
                }
                if !(0.0..=1.0).contains(&a) {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i}, {j}) = {a} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filled_has_zero_diagonal() {
        let m = DissimilarityMatrix::filled(3, 1.0);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.get(0, 2), 1.0);
        m.validate().unwrap();
    }

    #[test]
    fn set_pair_is_symmetric() {
        let mut m = DissimilarityMatrix::filled(3, 1.0);
        m.set_pair(0, 2, 0.25);
        assert_eq!(m.get(0, 2), 0.25);
        assert_eq!(m.get(2, 0), 0.25);
    }

    #[test]
    fn from_values_rejects_asymmetry() {
        let v = vec![0.0, 0.3, 0.4, 0.0];
        assert!(DissimilarityMatrix::from_values(2, v).is_err());
    }

    #[test]
    fn from_values_rejects_out_of_range_entries() {
        let v = vec![0.0, 1.5, 1.5, 0.0];
        assert!(DissimilarityMatrix::from_values(2, v).is_err());
    }

    #[test]
    fn from_values_rejects_nonzero_diagonal() {
        let v = vec![0.1, 0.5, 0.5, 0.0];
        assert!(DissimilarityMatrix::from_values(2, v).is_err());
    }
}
