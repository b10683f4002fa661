//! Dense linear algebra over one finite field: small matrices and canonical
//! reduced-row-echelon subspace bases. These back both the arity slices of
//! clonoids and the invariant submodules of the monoid action.

use crate::error::{Error, Result};
use crate::ffield::FieldSpec;
use std::cmp::Ordering;

/// Row-major matrix with entries in one finite field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn new(field: FieldSpec, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::WrongLength {
                expected: rows * cols,
                got: data.len(),
            });
        }
        for &v in &data {
            field.element(v)?;
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        let data = vec![0; rows * cols];
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// The matrix whose entries are the base-q digits of `index`, entry (0,0)
    /// least significant. Indices `0..q^(rows*cols)` enumerate all matrices
    /// of the given shape exactly once.
    pub fn from_index(field: FieldSpec, rows: usize, cols: usize, index: u64) -> Self {
        let q = field.q();
        let mut data = vec![0u64; rows * cols];
        let mut idx = index;
        for d in data.iter_mut() {
            *d = idx % q;
            idx /= q;
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Number of matrices of the given shape, if it fits in u64.
    pub fn count(field: &FieldSpec, rows: usize, cols: usize) -> Option<u64> {
        u32::try_from(rows * cols)
            .ok()
            .and_then(|e| field.q().checked_pow(e))
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::ShapeMismatch("matrix fields differ".into()));
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.field.clone(), self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = 0;
                for t in 0..self.cols {
                    acc = self
                        .field
                        .add_raw(acc, self.field.mul_raw(self.get(r, t), other.get(t, c)));
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `A x`; `x.len()` must equal the column count.
    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = 0;
                for (c, &xc) in x.iter().enumerate() {
                    acc = self.field.add_raw(acc, self.field.mul_raw(self.get(r, c), xc));
                }
                acc
            })
            .collect()
    }

    /// Gauss-Jordan inverse; `None` if the matrix is singular or not square.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let f = &self.field;
        let mut a = self.clone();
        let mut inv = Matrix::identity(f.clone(), n);
        for col in 0..n {
            let pivot_row = (col..n).find(|&r| a.get(r, col) != 0)?;
            if pivot_row != col {
                for c in 0..n {
                    let (x, y) = (a.get(col, c), a.get(pivot_row, c));
                    a.set(col, c, y);
                    a.set(pivot_row, c, x);
                    let (x, y) = (inv.get(col, c), inv.get(pivot_row, c));
                    inv.set(col, c, y);
                    inv.set(pivot_row, c, x);
                }
            }
            let scale = f.inv_raw(a.get(col, col));
            for c in 0..n {
                a.set(col, c, f.mul_raw(a.get(col, c), scale));
                inv.set(col, c, f.mul_raw(inv.get(col, c), scale));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in 0..n {
                    let sub = f.mul_raw(factor, a.get(col, c));
                    a.set(r, c, f.sub_raw(a.get(r, c), sub));
                    let sub = f.mul_raw(factor, inv.get(col, c));
                    inv.set(r, c, f.sub_raw(inv.get(r, c), sub));
                }
            }
        }
        Some(inv)
    }
}

/// A subspace of F_q^d held as a reduced row-echelon basis with strictly
/// increasing pivot columns, unit pivots and zeroed pivot columns elsewhere.
/// The representation is unique per subspace, so equality of bases is
/// equality of subspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    field: FieldSpec,
    dim: usize,
    rows: Vec<Vec<u64>>,
}

impl SubspaceBasis {
    pub fn new(field: FieldSpec, dim: usize) -> Self {
        SubspaceBasis {
            field,
            dim,
            rows: Vec::new(),
        }
    }

    pub fn full(field: FieldSpec, dim: usize) -> Self {
        let mut basis = Self::new(field, dim);
        for i in 0..dim {
            let mut v = vec![0; dim];
            v[i] = 1;
            basis.insert(&v);
        }
        basis
    }

    pub fn spanned_by(field: FieldSpec, dim: usize, vectors: &[Vec<u64>]) -> Self {
        let mut basis = Self::new(field, dim);
        for v in vectors {
            basis.insert(v);
        }
        basis
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    fn pivot(row: &[u64]) -> Option<usize> {
        row.iter().position(|&v| v != 0)
    }

    /// Residue of `v` after elimination against the basis; zero iff `v` lies
    /// in the span.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        debug_assert_eq!(v.len(), self.dim);
        let f = &self.field;
        let mut res = v.to_vec();
        for row in &self.rows {
            let p = Self::pivot(row).unwrap();
            let c = res[p];
            if c != 0 {
                for (r, &b) in res.iter_mut().zip(row) {
                    *r = f.sub_raw(*r, f.mul_raw(c, b));
                }
            }
        }
        res
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// Adds `v` to the span, keeping the basis canonical. Returns true iff
    /// the rank grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let f = self.field.clone();
        let mut res = self.reduce(v);
        let Some(p) = Self::pivot(&res) else {
            return false;
        };
        let scale = f.inv_raw(res[p]);
        for r in res.iter_mut() {
            *r = f.mul_raw(*r, scale);
        }
        // Clear the new pivot column in all existing rows.
        for row in self.rows.iter_mut() {
            let c = row[p];
            if c != 0 {
                for (a, &b) in row.iter_mut().zip(&res) {
                    *a = f.sub_raw(*a, f.mul_raw(c, b));
                }
            }
        }
        let pos = self
            .rows
            .iter()
            .position(|row| Self::pivot(row).unwrap() > p)
            .unwrap_or(self.rows.len());
        self.rows.insert(pos, res);
        true
    }

    pub fn sum(&self, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for row in &other.rows {
            out.insert(row);
        }
        Ok(out)
    }

    /// Zassenhaus: echelonize rows [a|a] for a in self and [b|0] for b in
    /// other; rows with zero left half carry an intersection basis in their
    /// right half.
    pub fn intersection(&self, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        self.check_compatible(other)?;
        let d = self.dim;
        let f = &self.field;
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(self.rank() + other.rank());
        for a in &self.rows {
            let mut row = a.clone();
            row.extend_from_slice(a);
            rows.push(row);
        }
        for b in &other.rows {
            let mut row = b.clone();
            row.extend(std::iter::repeat(0).take(d));
            rows.push(row);
        }
        echelonize(f, &mut rows);
        let mut out = SubspaceBasis::new(f.clone(), d);
        for row in &rows {
            if row[..d].iter().all(|&x| x == 0) {
                out.insert(&row[d..]);
            }
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &SubspaceBasis) -> Result<()> {
        if self.field != other.field || self.dim != other.dim {
            return Err(Error::ShapeMismatch(
                "subspaces live in different ambient spaces".into(),
            ));
        }
        Ok(())
    }

    /// Total order used for deterministic lattice listings: by rank, then by
    /// the canonical rows lexicographically.
    pub fn canonical_cmp(&self, other: &SubspaceBasis) -> Ordering {
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.rows.cmp(&other.rows))
    }
}

/// In-place reduced row echelon form over `field`.
fn echelonize(field: &FieldSpec, rows: &mut Vec<Vec<u64>>) {
    if rows.is_empty() {
        return;
    }
    let width = rows[0].len();
    let mut next = 0;
    for col in 0..width {
        let Some(pr) = (next..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(next, pr);
        let scale = field.inv_raw(rows[next][col]);
        for x in rows[next].iter_mut() {
            *x = field.mul_raw(*x, scale);
        }
        for r in 0..rows.len() {
            if r == next || rows[r][col] == 0 {
                continue;
            }
            let factor = rows[r][col];
            for c in 0..width {
                let sub = field.mul_raw(factor, rows[next][c]);
                rows[r][c] = field.sub_raw(rows[r][c], sub);
            }
        }
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.retain(|row| row.iter().any(|&x| x != 0));
}

/// Decodes `code` into a vector of F_q^dim; coordinate 0 is the least
/// significant digit. Codes `0..q^dim` enumerate the whole space.
pub fn vector_of_code(field: &FieldSpec, dim: usize, code: u64) -> Vec<u64> {
    let q = field.q();
    let mut v = vec![0u64; dim];
    let mut c = code;
    for x in v.iter_mut() {
        *x = c % q;
        c /= q;
    }
    v
}

/// Every subspace of F_q^dim, found by breadth-first one-vector extensions
/// starting from the zero subspace. Errors out once more than `max_count`
/// distinct subspaces have been seen.
pub fn all_subspaces(field: &FieldSpec, dim: usize, max_count: usize) -> Result<Vec<SubspaceBasis>> {
    let total = u32::try_from(dim)
        .ok()
        .and_then(|d| field.q().checked_pow(d))
        .ok_or_else(|| Error::BudgetExceeded(format!("vector space GF({})^{dim} too large", field.q())))?;
    let mut seen = std::collections::BTreeMap::new();
    let mut list = vec![SubspaceBasis::new(field.clone(), dim)];
    seen.insert(encode_basis(&list[0]), ());
    let mut next = 0;
    while next < list.len() {
        let current = list[next].clone();
        next += 1;
        if current.rank() == dim {
            continue;
        }
        for code in 1..total {
            let v = vector_of_code(field, dim, code);
            if current.contains(&v) {
                continue;
            }
            let mut extended = current.clone();
            extended.insert(&v);
            if seen.insert(encode_basis(&extended), ()).is_none() {
                if list.len() >= max_count {
                    return Err(Error::BudgetExceeded(format!(
                        "more than {max_count} subspaces"
                    )));
                }
                list.push(extended);
            }
        }
    }
    list.sort_by(|a, b| a.canonical_cmp(b));
    Ok(list)
}

pub(crate) fn encode_basis(basis: &SubspaceBasis) -> Vec<u64> {
    let mut key = Vec::with_capacity(basis.rank() * basis.ambient_dim());
    for row in basis.rows() {
        key.extend_from_slice(row);
    }
    key
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> FieldSpec {
        match q {
            4 => FieldSpec::new(2, 2, None).unwrap(),
            _ => FieldSpec::prime(q).unwrap(),
        }
    }

    #[test]
    fn echelon_basis_is_order_independent() {
        let vs = [
            vec![1u64, 2, 0],
            vec![2, 1, 1],
            vec![0, 0, 2],
            vec![1, 2, 1],
        ];
        let field = f(3);
        let mut a = SubspaceBasis::new(field.clone(), 3);
        for v in &vs {
            a.insert(v);
        }
        let mut b = SubspaceBasis::new(field, 3);
        for v in vs.iter().rev() {
            b.insert(v);
        }
        assert_eq!(a, b);
        for v in &vs {
            assert!(a.contains(v));
        }
    }

    #[test]
    fn rank_and_membership() {
        let field = f(2);
        let mut basis = SubspaceBasis::new(field, 3);
        assert!(basis.insert(&[1, 1, 0]));
        assert!(basis.insert(&[0, 1, 1]));
        assert!(!basis.insert(&[1, 0, 1]));
        assert_eq!(basis.rank(), 2);
        assert!(basis.contains(&[1, 0, 1]));
        assert!(!basis.contains(&[1, 0, 0]));
    }

    #[test]
    fn sum_and_intersection() {
        let field = f(2);
        let u = SubspaceBasis::spanned_by(field.clone(), 3, &[vec![1, 0, 0], vec![0, 1, 0]]);
        let v = SubspaceBasis::spanned_by(field.clone(), 3, &[vec![0, 1, 0], vec![0, 0, 1]]);
        let sum = u.sum(&v).unwrap();
        assert_eq!(sum.rank(), 3);
        let meet = u.intersection(&v).unwrap();
        assert_eq!(meet.rank(), 1);
        assert!(meet.contains(&[0, 1, 0]));

        // Modular identity check on a GF(4) instance as well.
        let field = f(4);
        let u = SubspaceBasis::spanned_by(field.clone(), 2, &[vec![1, 2]]);
        let v = SubspaceBasis::spanned_by(field.clone(), 2, &[vec![1, 3]]);
        assert_eq!(u.intersection(&v).unwrap().rank(), 0);
        assert_eq!(u.sum(&v).unwrap().rank(), 2);
    }

    #[test]
    fn inverse_roundtrip() {
        let field = f(3);
        let a = Matrix::new(field.clone(), 2, 2, vec![1, 2, 1, 1]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(field.clone(), 2));
        let singular = Matrix::new(field, 2, 2, vec![1, 2, 2, 1]).unwrap();
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn matrix_enumeration_is_exhaustive() {
        let field = f(2);
        let count = Matrix::count(&field, 2, 2).unwrap();
        assert_eq!(count, 16);
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..count {
            seen.insert(format!("{:?}", Matrix::from_index(field.clone(), 2, 2, i)));
        }
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn subspace_counts_match_known_values() {
        // F_2^3 has 16 subspaces, F_3^2 has 6, F_2^4 has 67.
        assert_eq!(all_subspaces(&f(2), 3, 1 << 20).unwrap().len(), 16);
        assert_eq!(all_subspaces(&f(3), 2, 1 << 20).unwrap().len(), 6);
        assert_eq!(all_subspaces(&f(2), 4, 1 << 20).unwrap().len(), 67);
    }
}
