//! Sparse matrices and reduced row echelon forms.
//!
//! Rows are stored as two parallel arrays: strictly ascending column
//! indices and the matching nonzero values.

pub mod rational;
pub mod zp;

/// One row of a sparse matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SparseRow<E> {
    pub cols: Vec<u32>,
    pub vals: Vec<E>,
}

impl<E> SparseRow<E> {
    pub fn new() -> Self {
        SparseRow {
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, E)>) -> Self {
        let (cols, vals) = pairs.into_iter().unzip();
        SparseRow { cols, vals }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    /// Column of the first nonzero entry.
    pub fn lead(&self) -> Option<u32> {
        self.cols.first().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &E)> {
        self.cols.iter().copied().zip(self.vals.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix<E> {
    pub ncols: usize,
    pub rows: Vec<SparseRow<E>>,
}

impl<E: Clone> SparseMatrix<E> {
    pub fn new(ncols: usize) -> Self {
        SparseMatrix {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// `[A | I]`: appends an identity block so the echelon form of the
    /// result carries the row transformation in its right block.
    pub fn augment_identity(&self, one: &E) -> SparseMatrix<E> {
        let n = self.ncols as u32;
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut out = row.clone();
                out.cols.push(n + i as u32);
                out.vals.push(one.clone());
                out
            })
            .collect();
        SparseMatrix {
            ncols: self.ncols + self.rows.len(),
            rows,
        }
    }
}

/// Reduced row echelon form of an `nrows × ncols` matrix.
///
/// `rows` holds the nonzero rows sorted by pivot column; the remaining
/// `nrows - rank` rows are zero. When requested, `transforms[i]` expresses
/// `rows[i]` as a combination of the input rows (column = input row index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon<E> {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<SparseRow<E>>,
    pub transforms: Option<Vec<SparseRow<E>>>,
}

impl<E: Clone> Echelon<E> {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Ascending pivot columns.
    pub fn pivots(&self) -> Vec<u32> {
        self.rows.iter().filter_map(|r| r.lead()).collect()
    }

    /// The full matrix with zero rows at the bottom.
    pub fn to_matrix(&self) -> SparseMatrix<E> {
        let mut rows = self.rows.clone();
        rows.resize_with(self.nrows, SparseRow::new);
        SparseMatrix {
            ncols: self.ncols,
            rows,
        }
    }

    /// Splits the echelon form of `[A | I]` into `rref(A)` and the transform.
    pub fn split_augmented(self, ncols: usize) -> Echelon<E> {
        let boundary = ncols as u32;
        let nrows = self.ncols - ncols;
        let mut rows = Vec::new();
        let mut transforms = Vec::new();
        for row in self.rows {
            if row.lead().is_none_or(|c| c >= boundary) {
                continue;
            }
            let split = row.cols.partition_point(|&c| c < boundary);
            let mut left = row;
            let right_cols: Vec<u32> = left.cols.drain(split..).map(|c| c - boundary).collect();
            let right_vals = left.vals.split_off(split);
            rows.push(left);
            transforms.push(SparseRow {
                cols: right_cols,
                vals: right_vals,
            });
        }
        Echelon {
            nrows,
            ncols,
            rows,
            transforms: Some(transforms),
        }
    }
}
