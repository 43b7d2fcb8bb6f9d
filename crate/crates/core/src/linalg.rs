//! Dense matrices and canonical subspaces over GF(q).
//!
//! Vectors are row vectors and matrices act on the right. A [`Subspace`] is
//! stored by its reduced row echelon basis, so two subspaces are equal exactly
//! when their stored bases are entrywise equal.

use std::fmt;

use thiserror::Error;

use crate::gf::{FieldElem, FieldError, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<FieldElem>) -> Result<Self, LinalgError> {
        if rows * cols != data.len() {
            return Err(LinalgError::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![FieldElem::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElem::ONE);
        }
        m
    }

    /// Builds a matrix from rows of equal length `cols`.
    pub fn from_rows<R: AsRef<[FieldElem]>>(cols: usize, rows: &[R]) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::Shape(format!("row of length {} in a {cols}-column matrix", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn diagonal(entries: &[FieldElem]) -> Self {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElem) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[FieldElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn row_mut(&mut self, r: usize) -> &mut [FieldElem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[FieldElem]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, f: &FieldSpec, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
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

    pub fn map(&self, mut op: impl FnMut(FieldElem) -> FieldElem) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| op(x)).collect() }
    }

    pub fn scale(&self, f: &FieldSpec, k: FieldElem) -> Matrix {
        self.map(|x| f.mul(k, x))
    }

    pub fn neg(&self, f: &FieldSpec) -> Matrix {
        self.map(|x| f.neg(x))
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::Shape(format!("cannot stack {} and {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// The inverse, if the matrix is square and nonsingular.
    pub fn inverse(&self, f: &FieldSpec) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, FieldElem::ONE);
        }
        let ech = rref(f, &aug);
        if ech.pivots.len() < n || ech.pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, ech.matrix.get(r, n + c));
            }
        }
        Some(inv)
    }
}

impl fmt::Display for Matrix {
    /// Rows separated by `;`, coordinates by `,`, elements as integer codes.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            if r > 0 {
                f.write_str(";")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        Ok(())
    }
}

/// Parses the row/comma text format. All rows must have equal length.
pub fn parse_matrix(f: &FieldSpec, text: &str) -> Result<Matrix, LinalgError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(LinalgError::Parse("empty matrix text".into()));
    }
    let mut rows = Vec::new();
    for row in text.split(';') {
        let parsed = row
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                let code: u32 = tok.parse().map_err(|_| LinalgError::Parse(format!("bad element '{tok}'")))?;
                Ok(f.elem(code)?)
            })
            .collect::<Result<Vec<_>, LinalgError>>()?;
        rows.push(parsed);
    }
    let cols = rows[0].len();
    Matrix::from_rows(cols, &rows)
}

/// Result of Gauss-Jordan elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    /// The nonzero rows of the reduced row echelon form.
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Reduced row echelon form. Zero rows are dropped from the output.
pub fn rref(f: &FieldSpec, m: &Matrix) -> Echelon {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(pr) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if pr != r {
            for k in 0..a.cols {
                a.data.swap(pr * a.cols + k, r * a.cols + k);
            }
        }
        let inv = f.inv(a.get(r, c)).expect("pivot is nonzero");
        for x in a.row_mut(r) {
            *x = f.mul(*x, inv);
        }
        let pivot_row: Vec<FieldElem> = a.row(r).to_vec();
        for i in 0..a.rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c);
            if factor.is_zero() {
                continue;
            }
            let row = a.row_mut(i);
            for k in c..row.len() {
                row[k] = f.sub(row[k], f.mul(factor, pivot_row[k]));
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.data.truncate(r * a.cols);
    a.rows = r;
    Echelon { matrix: a, rank: r, pivots }
}

pub fn rank(f: &FieldSpec, m: &Matrix) -> usize {
    rref(f, m).rank
}

/// A particular solution `x` of `A x^t = b^t`, if one exists.
pub fn solve(f: &FieldSpec, a: &Matrix, b: &[FieldElem]) -> Option<Vec<FieldElem>> {
    assert_eq!(a.rows, b.len(), "right-hand side length must equal row count");
    let n = a.cols;
    let mut aug = Matrix::zeros(a.rows, n + 1);
    for r in 0..a.rows {
        for c in 0..n {
            aug.set(r, c, a.get(r, c));
        }
        aug.set(r, n, b[r]);
    }
    let ech = rref(f, &aug);
    if ech.pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![FieldElem::ZERO; n];
    for (r, &c) in ech.pivots.iter().enumerate() {
        x[c] = ech.matrix.get(r, n);
    }
    Some(x)
}

/// A linear subspace of `F_q^ambient`, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    /// Canonical form of the row space of `m`.
    pub fn from_matrix(f: &FieldSpec, m: &Matrix) -> Subspace {
        let ech = rref(f, m);
        Subspace { ambient: m.cols, basis: ech.matrix }
    }

    pub fn from_rows<R: AsRef<[FieldElem]>>(f: &FieldSpec, ambient: usize, rows: &[R]) -> Result<Subspace, LinalgError> {
        Ok(Subspace::from_matrix(f, &Matrix::from_rows(ambient, rows)?))
    }

    /// Wraps a matrix already known to be in reduced row echelon form.
    pub(crate) fn from_rref_unchecked(basis: Matrix) -> Subspace {
        Subspace { ambient: basis.cols, basis }
    }

    pub fn zero(ambient: usize) -> Subspace {
        Subspace { ambient, basis: Matrix::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Subspace {
        Subspace { ambient, basis: Matrix::identity(ambient) }
    }

    /// Span of standard basis vectors, 0-based indices.
    pub fn coordinate(f: &FieldSpec, ambient: usize, indices: &[usize]) -> Subspace {
        let rows: Vec<Vec<FieldElem>> = indices.iter().map(|&i| unit_vector(ambient, i)).collect();
        Subspace::from_rows(f, ambient, &rows).expect("unit vectors have the ambient length")
    }

    pub fn parse(f: &FieldSpec, text: &str, ambient: usize) -> Result<Subspace, LinalgError> {
        let m = parse_matrix(f, text)?;
        if m.cols != ambient {
            return Err(LinalgError::AmbientMismatch { left: m.cols, right: ambient });
        }
        Ok(Subspace::from_matrix(f, &m))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0 || self.dim() == self.ambient
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .row_iter()
            .map(|row| row.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero"))
            .collect()
    }

    pub fn contains(&self, f: &FieldSpec, v: &[FieldElem]) -> Result<bool, LinalgError> {
        if v.len() != self.ambient {
            return Err(LinalgError::AmbientMismatch { left: v.len(), right: self.ambient });
        }
        let mut w = v.to_vec();
        for row in self.basis.row_iter() {
            let pc = row.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            let factor = w[pc];
            if factor.is_zero() {
                continue;
            }
            for (wk, &rk) in w.iter_mut().zip(row) {
                *wk = f.sub(*wk, f.mul(factor, rk));
            }
        }
        Ok(w.iter().all(|x| x.is_zero()))
    }

    pub fn contains_subspace(&self, f: &FieldSpec, other: &Subspace) -> Result<bool, LinalgError> {
        for row in other.basis.row_iter() {
            if !self.contains(f, row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            Err(LinalgError::AmbientMismatch { left: self.ambient, right: other.ambient })
        } else {
            Ok(())
        }
    }

    pub fn sum(&self, f: &FieldSpec, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        Ok(Subspace::from_matrix(f, &self.basis.stack(&other.basis)?))
    }

    /// Intersection by Zassenhaus elimination of `[A|A]` over `[B|0]`.
    pub fn intersect(&self, f: &FieldSpec, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        let n = self.ambient;
        let mut block = Matrix::zeros(self.dim() + other.dim(), 2 * n);
        for (r, row) in self.basis.row_iter().enumerate() {
            for c in 0..n {
                block.set(r, c, row[c]);
                block.set(r, n + c, row[c]);
            }
        }
        for (r, row) in other.basis.row_iter().enumerate() {
            for c in 0..n {
                block.set(self.dim() + r, c, row[c]);
            }
        }
        let ech = rref(f, &block);
        let rows: Vec<Vec<FieldElem>> = ech
            .matrix
            .row_iter()
            .filter(|row| row[..n].iter().all(|x| x.is_zero()))
            .map(|row| row[n..].to_vec())
            .collect();
        Subspace::from_rows(f, n, &rows)
    }

    /// Image under right multiplication by `t`.
    pub fn transform(&self, f: &FieldSpec, t: &Matrix) -> Result<Subspace, LinalgError> {
        Ok(Subspace::from_matrix(f, &self.basis.mul(f, t)?))
    }

    /// Every vector of the subspace, in the order of coefficient tuples.
    pub fn vectors(&self, f: &FieldSpec) -> Vec<Vec<FieldElem>> {
        let q = f.order() as usize;
        let d = self.dim();
        let total = q.pow(d as u32);
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut v = vec![FieldElem::ZERO; self.ambient];
            for r in 0..d {
                let coef = FieldElem((idx % q) as u16);
                idx /= q;
                if coef.is_zero() {
                    continue;
                }
                for (x, &b) in v.iter_mut().zip(self.basis.row(r)) {
                    *x = f.add(*x, f.mul(coef, b));
                }
            }
            out.push(v);
        }
        out
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim() == 0 {
            return f.write_str("0");
        }
        self.basis.fmt(f)
    }
}

/// `{ v : M v^t = 0 }` as a subspace of `F_q^cols`.
pub fn kernel(f: &FieldSpec, m: &Matrix) -> Subspace {
    let ech = rref(f, m);
    let n = m.cols;
    let mut rows = Vec::new();
    for free in (0..n).filter(|c| !ech.pivots.contains(c)) {
        let mut v = vec![FieldElem::ZERO; n];
        v[free] = FieldElem::ONE;
        for (r, &pc) in ech.pivots.iter().enumerate() {
            v[pc] = f.neg(ech.matrix.get(r, free));
        }
        rows.push(v);
    }
    Subspace::from_rows(f, n, &rows).expect("kernel vectors have length cols")
}

pub fn unit_vector(n: usize, i: usize) -> Vec<FieldElem> {
    let mut v = vec![FieldElem::ZERO; n];
    v[i] = FieldElem::ONE;
    v
}

pub fn dot(f: &FieldSpec, a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
    a.iter().zip(b).fold(FieldElem::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// All vectors of `F_q^n` in code-lexicographic order (last coordinate fastest).
pub fn all_vectors(f: &FieldSpec, n: usize) -> Vec<Vec<FieldElem>> {
    let q = f.order() as usize;
    let total = q.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut v = vec![FieldElem::ZERO; n];
            for c in (0..n).rev() {
                v[c] = FieldElem((idx % q) as u16);
                idx /= q;
            }
            v
        })
        .collect()
}
