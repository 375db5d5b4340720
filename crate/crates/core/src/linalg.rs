//! Dense exact linear algebra: row reduction, kernels, images, and
//! echelonized subspaces with exact membership and coordinates.

use crate::error::{Error, Result};
use crate::field::{axpy, is_zero_vec, mod_inverse, Field, Scalar};

/// Dense row-major matrix over a single field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowReduction {
    pub rref: Matrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

impl Matrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field, rows, cols, data: field.zeros(rows * cols) }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows, checking shape and that every entry lies in `field`.
    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Dimension("ragged rows".into()));
            }
            for s in row {
                if !field.contains(&s) {
                    return Err(Error::FieldMismatch {
                        expected: field.to_string(),
                        found: s.field().to_string(),
                    });
                }
                data.push(s);
            }
        }
        Ok(Matrix { field, rows: nrows, cols, data })
    }

    pub fn from_i64_rows(field: Field, rows: &[&[i64]]) -> Matrix {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Matrix::from_rows(field, rows).expect("well-formed integer rows")
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<Scalar>]) -> Matrix {
        let mut m = Matrix::zero(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            debug_assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Scalar) {
        self.data[i * self.cols + j] = s;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix columns");
        let mut out = self.field.zeros(self.rows);
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !a.is_zero() {
                    *o = &*o + &(a * x);
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zero(self.field, self.rows, other.cols);
        for j in 0..other.cols {
            let col = self.apply(&other.column(j));
            for (i, x) in col.into_iter().enumerate() {
                out.set(i, j, x);
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Reduced row echelon form with leftmost pivoting.
    pub fn row_reduce(&self) -> RowReduction {
        match self.field {
            Field::Prime(p) => self.row_reduce_mod(p),
            Field::Rationals => self.row_reduce_generic(),
        }
    }

    fn row_reduce_generic(&self) -> RowReduction {
        let mut rows: Vec<Vec<Scalar>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(k) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
                continue;
            };
            rows.swap(r, k);
            let inv = rows[r][c].inverse().unwrap();
            for x in rows[r].iter_mut() {
                *x = &*x * &inv;
            }
            let pivot_row = rows[r].clone();
            for (k, row) in rows.iter_mut().enumerate() {
                if k != r && !row[c].is_zero() {
                    let f = -&row[c];
                    axpy(row, &f, &pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let rref = Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: rows.into_iter().flatten().collect(),
        };
        RowReduction { rref, rank: pivots.len(), pivot_cols: pivots }
    }

    fn row_reduce_mod(&self, p: u32) -> RowReduction {
        let p64 = p as u64;
        let mut rows: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|s| match s {
                        Scalar::Fp { value, .. } => *value as u64,
                        _ => unreachable!("prime-field matrix holds prime-field scalars"),
                    })
                    .collect()
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else {
                continue;
            };
            rows.swap(r, k);
            let inv = mod_inverse(rows[r][c], p64);
            for x in rows[r].iter_mut() {
                *x = *x * inv % p64;
            }
            let pivot_row = rows[r].clone();
            for (k, row) in rows.iter_mut().enumerate() {
                if k == r || row[c] == 0 {
                    continue;
                }
                let f = p64 - row[c];
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x = (*x + f * y) % p64;
                }
            }
            pivots.push(c);
            r += 1;
        }
        let data = rows
            .into_iter()
            .flatten()
            .map(|v| Scalar::Fp { value: v as u32, p })
            .collect();
        let rref = Matrix { field: self.field, rows: self.rows, cols: self.cols, data };
        RowReduction { rref, rank: pivots.len(), pivot_cols: pivots }
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().rank
    }

    /// Basis of the null space `{v : Mv = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let red = self.row_reduce();
        let free: Vec<usize> = (0..self.cols).filter(|c| !red.pivot_cols.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = self.field.zeros(self.cols);
                v[f] = self.field.one();
                for (r, &pc) in red.pivot_cols.iter().enumerate() {
                    v[pc] = -red.rref.get(r, f);
                }
                v
            })
            .collect()
    }

    /// Echelonized basis of the column space.
    pub fn image(&self) -> Subspace {
        let mut s = Subspace::new(self.field, self.rows);
        for j in 0..self.cols {
            s.insert(self.column(j));
        }
        s
    }

    /// Some `x` with `Mx = b`, if one exists.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        let mut aug = Matrix::zero(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let red = aug.row_reduce();
        if red.pivot_cols.last() == Some(&self.cols) {
            return None;
        }
        let mut x = self.field.zeros(self.cols);
        for (r, &pc) in red.pivot_cols.iter().enumerate() {
            x[pc] = red.rref.get(r, self.cols).clone();
        }
        Some(x)
    }
}

/// Tag attached to each vector of a [`Subspace`] basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Sub,
    Complement,
}

/// A subspace of `field^ambient`, kept as an echelon basis with distinct
/// pivots and pivot entries equal to one.
#[derive(Clone, Debug)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Vec<(usize, Vec<Scalar>, Part)>,
}

impl Subspace {
    pub fn new(field: Field, ambient: usize) -> Subspace {
        Subspace { field, ambient, basis: Vec::new() }
    }

    pub fn spanned_by(field: Field, ambient: usize, vectors: &[Vec<Scalar>]) -> Subspace {
        let mut s = Subspace::new(field, ambient);
        for v in vectors {
            s.insert(v.clone());
        }
        s
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> impl Iterator<Item = &Vec<Scalar>> {
        self.basis.iter().map(|(_, v, _)| v)
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|(p, _, _)| *p).collect()
    }

    /// Reduces `v` against the basis; returns the remainder and the
    /// coefficient of each basis vector.
    pub fn reduce(&self, v: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
        let mut rem = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.basis.len());
        for (p, b, _) in &self.basis {
            let c = rem[*p].clone();
            if !c.is_zero() {
                axpy(&mut rem, &-&c, b);
            }
            coeffs.push(c);
        }
        (rem, coeffs)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vec(&self.reduce(v).0)
    }

    /// Coordinates of `v` in the basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let (rem, c) = self.reduce(v);
        is_zero_vec(&rem).then_some(c)
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: Vec<Scalar>) -> bool {
        self.insert_tagged(v, Part::Sub)
    }

    fn insert_tagged(&mut self, v: Vec<Scalar>, part: Part) -> bool {
        assert_eq!(v.len(), self.ambient);
        let (rem, _) = self.reduce(&v);
        let Some(p) = rem.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = rem[p].inverse().unwrap();
        let rem: Vec<Scalar> = rem.iter().map(|x| x * &inv).collect();
        let at = self.basis.partition_point(|(q, _, _)| *q < p);
        self.basis.insert(at, (p, rem, part));
        true
    }
}

/// The quotient `span / sub`, with complement representatives and the
/// projection onto them.
#[derive(Clone, Debug)]
pub struct Quotient {
    combined: Subspace,
    sub_dim: usize,
}

impl Quotient {
    pub fn new(field: Field, ambient: usize, span: &[Vec<Scalar>], sub: &[Vec<Scalar>]) -> Result<Quotient> {
        let whole = Subspace::spanned_by(field, ambient, span);
        let mut combined = Subspace::new(field, ambient);
        for w in sub {
            if !whole.contains(w) {
                return Err(Error::NotContained);
            }
            combined.insert_tagged(w.clone(), Part::Sub);
        }
        let sub_dim = combined.dim();
        for v in whole.basis() {
            combined.insert_tagged(v.clone(), Part::Complement);
        }
        Ok(Quotient { combined, sub_dim })
    }

    pub fn dim(&self) -> usize {
        self.combined.dim() - self.sub_dim
    }

    /// Complement representatives, in echelon order.
    pub fn representatives(&self) -> Vec<Vec<Scalar>> {
        self.combined
            .basis
            .iter()
            .filter(|(_, _, t)| *t == Part::Complement)
            .map(|(_, v, _)| v.clone())
            .collect()
    }

    /// Coordinates of the class of `v` in terms of the representatives;
    /// `None` if `v` is not in the span.
    pub fn project(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let (rem, coeffs) = self.combined.reduce(v);
        if !is_zero_vec(&rem) {
            return None;
        }
        Some(
            coeffs
                .into_iter()
                .zip(&self.combined.basis)
                .filter(|(_, (_, _, t))| *t == Part::Complement)
                .map(|(c, _)| c)
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn proportional_rows() {
        let m = Matrix::from_i64_rows(q(), &[&[1, 2], &[2, 4]]);
        let r = m.row_reduce();
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivot_cols, vec![0]);
    }

    #[test]
    fn identity_rank() {
        let r = Matrix::identity(q(), 3).row_reduce();
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivot_cols, vec![0, 1, 2]);
    }

    #[test]
    fn char_two_kernel() {
        let f = Field::Prime(2);
        let m = Matrix::from_i64_rows(f, &[&[1, 1]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.kernel(), vec![vec![f.one(), f.one()]]);
    }

    #[test]
    fn mixed_fields_rejected() {
        let err = Matrix::from_rows(q(), vec![vec![q().one(), Field::Prime(3).one()]]);
        assert!(matches!(err, Err(Error::FieldMismatch { .. })));
    }

    #[test]
    fn quotient_dimension() {
        let f = q();
        let span: Vec<_> = (0..3).map(|i| f.unit_vector(3, i)).collect();
        let quot = Quotient::new(f, 3, &span, &[f.unit_vector(3, 1)]).unwrap();
        assert_eq!(quot.dim(), 2);
        assert_eq!(quot.project(&f.unit_vector(3, 1)).unwrap(), f.zeros(2));
    }

    #[test]
    fn kernel_of_zero_map_is_everything() {
        let m = Matrix::zero(q(), 2, 2);
        assert_eq!(m.kernel().len(), 2);
    }

    #[test]
    fn image_of_nilpotent() {
        let f = q();
        let m = Matrix::from_i64_rows(f, &[&[0, 1], &[0, 0]]);
        let img = m.image();
        assert_eq!(img.dim(), 1);
        assert!(img.contains(&f.unit_vector(2, 0)));
        assert!(!img.contains(&f.unit_vector(2, 1)));
    }

    #[test]
    fn quotient_rejects_non_subspace() {
        let f = q();
        let err = Quotient::new(f, 2, &[f.unit_vector(2, 0)], &[f.unit_vector(2, 1)]);
        assert!(matches!(err, Err(Error::NotContained)));
    }

    #[test]
    fn solve_finds_preimage() {
        let f = q();
        let m = Matrix::from_i64_rows(f, &[&[1, 1], &[0, 2]]);
        let b = vec![f.from_i64(3), f.from_i64(4)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.apply(&x), b);
        let sing = Matrix::from_i64_rows(f, &[&[1, 1], &[1, 1]]);
        assert!(sing.solve(&[f.one(), f.zero()]).is_none());
    }
}
