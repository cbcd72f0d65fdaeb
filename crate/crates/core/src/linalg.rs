//! Dense matrices over an arbitrary [`Ring`], with a division-free
//! characteristic polynomial.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ring::Ring;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// The submatrix on the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix<T> {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }
}

pub fn identity<R: Ring>(ring: &R, n: usize) -> Matrix<R::Elt> {
    let mut m = Matrix::filled(n, n, ring.zero());
    for i in 0..n {
        m.set(i, i, ring.one());
    }
    m
}

pub fn mat_mul<R: Ring>(ring: &R, a: &Matrix<R::Elt>, b: &Matrix<R::Elt>) -> Result<Matrix<R::Elt>> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch("inner dimensions differ".into()));
    }
    let mut out = Matrix::filled(a.rows, b.cols, ring.zero());
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if ring.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let y = b.get(k, j);
                if ring.is_zero(y) {
                    continue;
                }
                let t = ring.add(out.get(i, j), &ring.mul(x, y));
                out.set(i, j, t);
            }
        }
    }
    Ok(out)
}

/// Coefficients `[1, c_1, ..., c_n]` of `det(1 - A T)`, which coincide with
/// the coefficients of `det(tI - A)` listed from the leading one down.
/// Berkowitz's algorithm; no divisions, so it works over any commutative ring.
pub fn fredholm_coefficients<R: Ring>(ring: &R, a: &Matrix<R::Elt>) -> Result<Vec<R::Elt>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("matrix is not square".into()));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(vec![ring.one()]);
    }
    let mut poly = vec![ring.one(), ring.neg(a.get(0, 0))];
    for r in 1..n {
        // Leading block A_r is r x r; R = A[r][0..r], C = A[0..r][r].
        let mut toeplitz = Vec::with_capacity(r + 2);
        toeplitz.push(ring.one());
        toeplitz.push(ring.neg(a.get(r, r)));
        let mut col: Vec<R::Elt> = (0..r).map(|i| a.get(i, r).clone()).collect();
        for _ in 0..r {
            let mut dot = ring.zero();
            for (j, cj) in col.iter().enumerate() {
                let rj = a.get(r, j);
                if !ring.is_zero(rj) && !ring.is_zero(cj) {
                    dot = ring.add(&dot, &ring.mul(rj, cj));
                }
            }
            toeplitz.push(ring.neg(&dot));
            let mut next = vec![ring.zero(); r];
            for (i, slot) in next.iter_mut().enumerate() {
                let mut acc = ring.zero();
                for (j, cj) in col.iter().enumerate() {
                    let aij = a.get(i, j);
                    if !ring.is_zero(aij) && !ring.is_zero(cj) {
                        acc = ring.add(&acc, &ring.mul(aij, cj));
                    }
                }
                *slot = acc;
            }
            col = next;
        }
        let mut next = Vec::with_capacity(r + 2);
        for i in 0..=r + 1 {
            let mut acc = ring.zero();
            for j in 0..=i.min(r) {
                let t = &toeplitz[i - j];
                let c = &poly[j];
                if !ring.is_zero(t) && !ring.is_zero(c) {
                    acc = ring.add(&acc, &ring.mul(t, c));
                }
            }
            next.push(acc);
        }
        poly = next;
    }
    Ok(poly)
}

pub fn determinant<R: Ring>(ring: &R, a: &Matrix<R::Elt>) -> Result<R::Elt> {
    let coeffs = fredholm_coefficients(ring, a)?;
    let last = coeffs.last().unwrap().clone();
    Ok(if a.rows % 2 == 0 { last } else { ring.neg(&last) })
}

/// Leibniz expansion; exponential, for cross-checks on tiny matrices.
pub fn determinant_leibniz<R: Ring>(ring: &R, a: &Matrix<R::Elt>) -> R::Elt {
    let n = a.rows;
    let mut total = ring.zero();
    for_each_permutation(n, |perm, sign| {
        let mut term = ring.one();
        for (i, &j) in perm.iter().enumerate() {
            term = ring.mul(&term, a.get(i, j));
        }
        total = if sign { ring.add(&total, &term) } else { ring.sub(&total, &term) };
    });
    total
}

/// Calls `f(perm, even)` for every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize], bool)) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut even = true;
    f(&perm, even);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            even = !even;
            f(&perm, even);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Calls `f` on every k-subset of `0..n`, in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nt::{q, qi, Q};
    use crate::ring::Rationals;

    fn sum_principal_minors(a: &Matrix<Q>, k: usize) -> Q {
        let mut total = qi(0);
        for_each_subset(a.rows(), k, |s| {
            total += determinant_leibniz(&Rationals, &a.submatrix(s, s));
        });
        total
    }

    #[test]
    fn berkowitz_matches_principal_minors() {
        let a = Matrix::from_rows(vec![
            vec![q(1, 2), qi(3), qi(-1), qi(0)],
            vec![qi(2), q(-5, 3), qi(0), qi(7)],
            vec![qi(0), qi(1), qi(4), q(1, 7)],
            vec![qi(-2), qi(0), qi(1), qi(1)],
        ])
        .unwrap();
        let c = fredholm_coefficients(&Rationals, &a).unwrap();
        for (k, ck) in c.iter().enumerate() {
            let e = sum_principal_minors(&a, k);
            let expected = if k % 2 == 0 { e } else { -e };
            assert_eq!(*ck, expected, "degree {k}");
        }
        assert_eq!(determinant(&Rationals, &a).unwrap(), determinant_leibniz(&Rationals, &a));
    }

    #[test]
    fn subsets_and_permutations() {
        let mut count = 0;
        for_each_subset(5, 2, |_| count += 1);
        assert_eq!(count, 10);
        let mut count = 0;
        for_each_subset(3, 0, |s| {
            assert!(s.is_empty());
            count += 1
        });
        assert_eq!(count, 1);
        let mut perms = 0;
        let mut even = 0;
        for_each_permutation(4, |_, e| {
            perms += 1;
            even += usize::from(e);
        });
        assert_eq!((perms, even), (24, 12));
    }
}
