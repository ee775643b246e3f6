use super::SolverError;

/// Compressed sparse row matrix. Column indices are sorted and unique
/// within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays.
    ///
    /// Panics if the arrays are inconsistent or a row is not strictly
    /// increasing in column index.
    pub fn from_parts(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        assert_eq!(row_offsets.len(), nrows + 1);
        assert_eq!(row_offsets[nrows], col_indices.len());
        assert_eq!(col_indices.len(), values.len());
        for r in 0..nrows {
            let cols = &col_indices[row_offsets[r]..row_offsets[r + 1]];
            assert!(cols.windows(2).all(|w| w[0] < w[1]), "row {r} not sorted");
            assert!(cols.iter().all(|&c| c < ncols), "row {r} column out of range");
        }
        CsrMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
            symmetric: false,
        }
    }

    /// All-zero matrix with the given sparsity pattern (rows of sorted,
    /// unique column indices).
    pub fn from_pattern(ncols: usize, rows: &[Vec<usize>]) -> Self {
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        row_offsets.push(0);
        let mut col_indices = Vec::new();
        for r in rows {
            col_indices.extend_from_slice(r);
            row_offsets.push(col_indices.len());
        }
        let nnz = col_indices.len();
        Self::from_parts(rows.len(), ncols, row_offsets, col_indices, vec![0.0; nnz])
    }

    /// Sums duplicate `(row, col, value)` entries in input order.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for &(r, c, v) in triplets {
            rows[r].push((c, v));
        }
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                if col_indices.len() > *row_offsets.last().unwrap() && *col_indices.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Self::from_parts(nrows, ncols, row_offsets, col_indices, values)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let triplets: Vec<_> = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(move |(j, v)| (i, j, *v))
            })
            .collect();
        Self::from_triplets(rows.len(), ncols, &triplets)
    }

    pub fn identity(n: usize) -> Self {
        let triplets: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        let mut m = Self::from_triplets(n, n, &triplets);
        m.symmetric = true;
        m
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_parts(nrows, ncols, vec![0; nrows + 1], Vec::new(), Vec::new())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Whether the matrix is flagged symmetric.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Sets the symmetry flag after checking it holds within `tol`.
    pub fn mark_symmetric(&mut self, tol: f64) -> bool {
        self.symmetric = self.is_square() && self.max_asymmetry() <= tol;
        self.symmetric
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    /// Position of `(r, c)` in the value array, if stored.
    pub fn position(&self, r: usize, c: usize) -> Option<usize> {
        let start = self.row_offsets[r];
        let cols = &self.col_indices[start..self.row_offsets[r + 1]];
        cols.binary_search(&c).ok().map(|k| start + k)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.position(r, c).map_or(0.0, |k| self.values[k])
    }

    /// Adds `v` to a stored entry. Panics if `(r, c)` is outside the pattern.
    pub fn add_to(&mut self, r: usize, c: usize, v: f64) {
        let k = self
            .position(r, c)
            .unwrap_or_else(|| panic!("entry ({r}, {c}) not in pattern"));
        self.values[k] += v;
    }

    /// `y = A x`, summing each row left to right.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>, SolverError> {
        if x.len() != self.ncols {
            return Err(SolverError::DimensionMismatch {
                expected: self.ncols,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.nrows];
        self.mul_into(x, &mut y);
        Ok(y)
    }

    /// Unchecked `y = A x`; lengths must already match.
    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_offsets[r]..self.row_offsets[r + 1] {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            *yr = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        let mut sums = vec![0.0; self.ncols];
        for (c, v) in self.col_indices.iter().zip(&self.values) {
            sums[*c] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                triplets.push((*c, r, *v));
            }
        }
        let mut t = CsrMatrix::from_triplets(self.ncols, self.nrows, &triplets);
        t.symmetric = self.symmetric;
        t
    }

    /// `max |A_ij − A_ji|` including pattern mismatches.
    pub fn max_asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(*c, r)).abs());
            }
        }
        worst
    }

    /// `alpha A + beta B` on the union pattern.
    pub fn linear_combination(alpha: f64, a: &CsrMatrix, beta: f64, b: &CsrMatrix) -> Result<CsrMatrix, SolverError> {
        if a.nrows != b.nrows || a.ncols != b.ncols {
            return Err(SolverError::DimensionMismatch {
                expected: a.nrows,
                found: b.nrows,
            });
        }
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::with_capacity(a.nnz().max(b.nnz()));
        let mut values = Vec::with_capacity(a.nnz().max(b.nnz()));
        for r in 0..a.nrows {
            let (ca, va) = a.row(r);
            let (cb, vb) = b.row(r);
            let (mut i, mut j) = (0, 0);
            while i < ca.len() || j < cb.len() {
                let take_a = j >= cb.len() || (i < ca.len() && ca[i] <= cb[j]);
                let take_b = i >= ca.len() || (j < cb.len() && cb[j] <= ca[i]);
                let (col, value) = match (take_a, take_b) {
                    (true, true) => {
                        let out = (ca[i], alpha * va[i] + beta * vb[j]);
                        i += 1;
                        j += 1;
                        out
                    }
                    (true, false) => {
                        let out = (ca[i], alpha * va[i]);
                        i += 1;
                        out
                    }
                    _ => {
                        let out = (cb[j], beta * vb[j]);
                        j += 1;
                        out
                    }
                };
                col_indices.push(col);
                values.push(value);
            }
            row_offsets.push(col_indices.len());
        }
        let mut m = CsrMatrix::from_parts(a.nrows, a.ncols, row_offsets, col_indices, values);
        m.symmetric = a.symmetric && b.symmetric;
        Ok(m)
    }

    /// Submatrix with rows `rows` and columns `cols`, where `col_map[c]` gives
    /// the new index of old column `c` (or `None` to drop it).
    pub fn select(&self, rows: &[usize], col_map: &[Option<usize>], ncols: usize) -> CsrMatrix {
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for &r in rows {
            let (cols, vals) = self.row(r);
            let mut entries: Vec<(usize, f64)> = cols
                .iter()
                .zip(vals)
                .filter_map(|(c, v)| col_map[*c].map(|nc| (nc, *v)))
                .collect();
            entries.sort_by_key(|&(c, _)| c);
            for (c, v) in entries {
                col_indices.push(c);
                values.push(v);
            }
            row_offsets.push(col_indices.len());
        }
        CsrMatrix::from_parts(rows.len(), ncols, row_offsets, col_indices, values)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                row[*c] = *v;
            }
        }
        d
    }
}
