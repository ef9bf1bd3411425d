use super::{ComplexMatrix, C64, ZERO};

/// Coordinate-format complex matrix, entries sorted by (row, col).
///
/// The propagators only ever need "apply to the left/right of a dense block",
/// so this stays a plain triplet list.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseMatrix {
    pub fn from_triplets(rows: usize, cols: usize, mut entries: Vec<(usize, usize, C64)>) -> Self {
        entries.retain(|e| e.2 != ZERO);
        entries.sort_by_key(|e| (e.0, e.1));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            assert!(i < rows && j < cols, "sparse entry ({i}, {j}) out of bounds");
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        Self { rows, cols, entries: merged }
    }

    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m.get(i, j);
                if v != ZERO {
                    entries.push((i, j, v));
                }
            }
        }
        Self { rows: m.rows(), cols: m.cols(), entries }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn dagger(&self) -> SparseMatrix {
        Self::from_triplets(self.cols, self.rows, self.entries.iter().map(|&(i, j, v)| (j, i, v.conj())).collect())
    }

    pub fn scale(&self, factor: C64) -> SparseMatrix {
        Self::from_triplets(self.rows, self.cols, self.entries.iter().map(|&(i, j, v)| (i, j, v * factor)).collect())
    }

    /// Restrict a square operator to an index subset. `local[g]` maps a
    /// global index to its position in the subset. Entries whose column lies
    /// outside the subset are dropped; the subset must be closed under the
    /// operator, so their rows would never be reached.
    pub(crate) fn restrict(&self, local: &[Option<usize>], dim: usize) -> SparseMatrix {
        let entries = self
            .entries
            .iter()
            .filter_map(|&(i, j, v)| {
                let lj = local[j]?;
                let li = local[i].expect("index subset is not closed under operator");
                Some((li, lj, v))
            })
            .collect();
        Self::from_triplets(dim, dim, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip_and_dagger() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| if (i + j) % 2 == 0 { C64::new(i as f64, j as f64) } else { ZERO });
        let s = SparseMatrix::from_dense(&m);
        assert_eq!(s.to_dense(), m);
        assert_eq!(s.dagger().to_dense(), m.dagger());
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let s = SparseMatrix::from_triplets(2, 2, vec![(0, 1, C64::from(1.0)), (0, 1, C64::from(2.0)), (1, 0, ZERO)]);
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.entries()[0], (0, 1, C64::from(3.0)));
    }
}
