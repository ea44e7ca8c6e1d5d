//! Dense linear algebra over a small finite field.
//!
//! Vectors are row vectors; a matrix's row space is the code it generates.
//! Pivoting always takes the first nonzero entry in the leftmost remaining
//! column, so every basis produced here is reproducible.

use std::fmt;

use thiserror::Error;

use crate::gf::Field;

/// Default bound on the number of vectors [`enumerate_coset`] will produce.
pub const DEFAULT_COSET_CAP: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatError {
    #[error("column index {index} out of range for {cols} columns")]
    ColumnOutOfRange { index: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("coset of size {size} exceeds enumeration cap {cap}")]
    CapExceeded { size: u128, cap: u64 },
}

#[derive(Clone, PartialEq, Eq)]
pub struct MatrixFq {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl fmt::Debug for MatrixFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixFq {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl MatrixFq {
    pub fn new(field: &Field, rows: usize, cols: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows * cols");
        let q = field.order();
        assert!(data.iter().all(|&x| (x as u32) < q), "entry out of field range");
        MatrixFq {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        MatrixFq::new(field, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = MatrixFq::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: &Field, cols: usize, rows: &[Vec<u8>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "row length mismatch");
            data.extend_from_slice(r);
        }
        MatrixFq::new(field, rows.len(), cols, data)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> MatrixFq {
        let mut t = MatrixFq::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Keep only the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<MatrixFq, MatError> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(MatError::ColumnOutOfRange {
                index: bad,
                cols: self.cols,
            });
        }
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            data.extend(cols.iter().map(|&c| self.get(r, c)));
        }
        Ok(MatrixFq::new(&self.field, self.rows, cols.len(), data))
    }

    pub fn select_rows(&self, rows: &[usize]) -> MatrixFq {
        let picked: Vec<Vec<u8>> = rows.iter().map(|&r| self.row(r).to_vec()).collect();
        MatrixFq::from_rows(&self.field, self.cols, &picked)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &MatrixFq) -> Result<MatrixFq, MatError> {
        if self.rows != other.rows {
            return Err(MatError::Shape(format!(
                "hconcat of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let mut data = Vec::with_capacity(self.rows * (self.cols + other.cols));
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(MatrixFq::new(
            &self.field,
            self.rows,
            self.cols + other.cols,
            data,
        ))
    }

    pub fn mul(&self, other: &MatrixFq) -> Result<MatrixFq, MatError> {
        if self.cols != other.rows {
            return Err(MatError::Shape(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = MatrixFq::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.add(out.get(r, c), f.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v * self`.
    pub fn vec_mul(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.rows, "vector length must equal row count");
        combine_rows(&self.field, self, v)
    }

    pub fn rank(&self) -> usize {
        rref(self).1
    }
}

/// Linear combination `sum coeffs[i] * rows[i]`.
fn combine_rows(f: &Field, m: &MatrixFq, coeffs: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; m.cols];
    for (r, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(m.row(r)) {
            *o = f.add(*o, f.mul(c, x));
        }
    }
    out
}

/// Reduced row-echelon form, rank, and pivot columns.
pub fn rref(m: &MatrixFq) -> (MatrixFq, usize, Vec<usize>) {
    let f = m.field.clone();
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(piv) = (rank..a.rows).find(|&r| a.get(r, col) != 0) else {
            continue;
        };
        if piv != rank {
            for c in 0..a.cols {
                a.data.swap(piv * a.cols + c, rank * a.cols + c);
            }
        }
        let inv = f.inv(a.get(rank, col)).expect("pivot is nonzero");
        for c in col..a.cols {
            let v = f.mul(a.get(rank, c), inv);
            a.set(rank, c, v);
        }
        for r in 0..a.rows {
            if r == rank {
                continue;
            }
            let factor = a.get(r, col);
            if factor == 0 {
                continue;
            }
            for c in col..a.cols {
                let v = f.sub(a.get(r, c), f.mul(factor, a.get(rank, c)));
                a.set(r, c, v);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    (a, rank, pivots)
}

/// Rows spanning `{v : M v^T = 0}`; there are `cols - rank(M)` of them.
pub fn kernel_basis(m: &MatrixFq) -> MatrixFq {
    let f = &m.field;
    let (r, rank, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![0u8; m.cols];
        v[fc] = 1;
        for (i, &pc) in pivots.iter().enumerate().take(rank) {
            v[pc] = f.neg(r.get(i, fc));
        }
        basis.push(v);
    }
    MatrixFq::from_rows(f, m.cols, &basis)
}

/// `offset + span(basis rows)`, with independent basis rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineCoset {
    pub offset: Vec<u8>,
    pub basis: MatrixFq,
}

impl AffineCoset {
    pub fn point(field: &Field, offset: Vec<u8>) -> Self {
        let n = offset.len();
        AffineCoset {
            offset,
            basis: MatrixFq::zeros(field, 0, n),
        }
    }

    pub fn dimension(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_len(&self) -> usize {
        self.offset.len()
    }

    /// Number of members, `q^dim`, saturating at `u128::MAX`.
    pub fn size(&self) -> u128 {
        (self.basis.field().order() as u128)
            .checked_pow(self.dimension() as u32)
            .unwrap_or(u128::MAX)
    }

    /// Member indexed by coefficient vector `coeffs` (length = dimension).
    pub fn member(&self, coeffs: &[u8]) -> Vec<u8> {
        let f = self.basis.field();
        let delta = combine_rows(f, &self.basis, coeffs);
        self.offset.iter().zip(delta).map(|(&o, d)| f.add(o, d)).collect()
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        if v.len() != self.offset.len() {
            return false;
        }
        let f = self.basis.field();
        let diff: Vec<u8> = v.iter().zip(&self.offset).map(|(&a, &b)| f.sub(a, b)).collect();
        in_row_space(&self.basis, &diff)
    }
}

/// Whether `v` lies in the row space of `m`.
pub fn in_row_space(m: &MatrixFq, v: &[u8]) -> bool {
    let base = m.rank();
    let mut rows = m.row_vectors();
    rows.push(v.to_vec());
    MatrixFq::from_rows(m.field(), m.cols(), &rows).rank() == base
}

/// Outcome of [`solve_affine`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Coset(AffineCoset),
    NoSolution,
}

impl Solution {
    pub fn into_coset(self) -> Option<AffineCoset> {
        match self {
            Solution::Coset(c) => Some(c),
            Solution::NoSolution => None,
        }
    }
}

/// Full solution set of `M x = b` (x a column vector of length `M.cols`).
pub fn solve_affine(m: &MatrixFq, b: &[u8]) -> Result<Solution, MatError> {
    if b.len() != m.rows {
        return Err(MatError::Shape(format!(
            "right-hand side of length {} for {} equations",
            b.len(),
            m.rows
        )));
    }
    let f = m.field();
    let rhs = MatrixFq::new(f, m.rows, 1, b.to_vec());
    let aug = m.hconcat(&rhs)?;
    let (r, rank, pivots) = rref(&aug);
    if pivots.last() == Some(&m.cols) {
        return Ok(Solution::NoSolution);
    }
    let mut offset = vec![0u8; m.cols];
    for (i, &pc) in pivots.iter().enumerate().take(rank) {
        offset[pc] = r.get(i, m.cols);
    }
    Ok(Solution::Coset(AffineCoset {
        offset,
        basis: kernel_basis(m),
    }))
}

/// Dimension of the code generated by `g` punctured to the columns `cols`.
pub fn projected_dim(g: &MatrixFq, cols: &[usize]) -> Result<usize, MatError> {
    Ok(g.select_columns(cols)?.rank())
}

/// Every member of `c`, ordered by coefficient vector in ascending base-q
/// order (first basis row most significant).
pub fn enumerate_coset(c: &AffineCoset, cap: u64) -> Result<Vec<Vec<u8>>, MatError> {
    let size = c.size();
    if size > cap as u128 {
        return Err(MatError::CapExceeded { size, cap });
    }
    let q = c.basis.field().order() as u8;
    let k = c.dimension();
    let mut coeffs = vec![0u8; k];
    let mut out = Vec::with_capacity(size as usize);
    loop {
        out.push(c.member(&coeffs));
        // increment, last coefficient least significant
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            coeffs[i] += 1;
            if coeffs[i] < q {
                break;
            }
            coeffs[i] = 0;
        }
    }
}
