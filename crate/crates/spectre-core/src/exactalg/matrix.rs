//! Dense matrices over Q with exact linear algebra.

use crate::error::{Error, Result};
use crate::exactalg::rational::Rational;
use crate::exactalg::unipoly::UniPoly;
use num::{One, Zero};
use std::ops::{Index, IndexMut};

/// Dense matrix of rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Rational>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut m = Self::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &other[(i, j)])
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &other[(i, j)])
    }

    pub fn scale(&self, c: &Rational) -> QMatrix {
        QMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * c)
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "incompatible shapes");
        let mut m = QMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    m[(i, j)] += prod;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in 0..self.cols {
                    acc += &self[(i, j)] * &v[j];
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, k: usize) -> QMatrix {
        assert!(self.is_square());
        let mut acc = QMatrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn trace(&self) -> Rational {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)].clone()).sum()
    }

    /// In-place reduced row echelon form; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self[(row, col)].recip();
            for j in col..self.cols {
                let v = &self[(row, j)] * &inv;
                self[(row, j)] = v;
            }
            for r in 0..self.rows {
                if r != row && !self[(r, col)].is_zero() {
                    let factor = self[(r, col)].clone();
                    for j in col..self.cols {
                        let v = &self[(r, j)] - &factor * &self[(row, j)];
                        self[(r, j)] = v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Basis of the right null space (vectors v with self * v = 0).
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::new();
        for &fc in &free {
            let mut v = vec![Rational::zero(); self.cols];
            v[fc] = Rational::one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[(ri, fc)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve self * x = b; None when inconsistent. Free variables are set to 0.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(self.rows, b.len());
        let mut aug = QMatrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug[(ri, self.cols)].clone();
        }
        Some(x)
    }

    /// Exact inverse of a square matrix.
    pub fn inverse(&self) -> Result<QMatrix> {
        if !self.is_square() {
            return Err(Error::NonSquareMatrix {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = QMatrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::SingularMatrix);
        }
        Ok(QMatrix::from_fn(n, n, |i, j| aug[(i, j + n)].clone()))
    }

    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::NonSquareMatrix {
                rows: self.rows,
                cols: self.cols,
            });
        }
        // Gaussian elimination tracking the pivot product.
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != col {
                m.swap_rows(col, p);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det *= &pivot;
            let inv = pivot.recip();
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] * &inv;
                for j in col..n {
                    let v = &m[(r, j)] - &factor * &m[(col, j)];
                    m[(r, j)] = v;
                }
            }
        }
        Ok(det)
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }
}

/// Rank by exact Gaussian elimination.
pub fn mat_rank(m: &QMatrix) -> usize {
    let mut copy = m.clone();
    copy.rref().len()
}

/// Monic characteristic polynomial det(S*I - m) by the Faddeev-LeVerrier recurrence.
pub fn char_poly(m: &QMatrix) -> Result<UniPoly> {
    if !m.is_square() {
        return Err(Error::NonSquareMatrix {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    // c[n] = 1; M_1 = m; c_{n-k} = -tr(M_k)/k; M_{k+1} = m (M_k + c_{n-k} I).
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = m.clone();
    for k in 1..=n {
        let c = -mk.trace() / Rational::from_integer(k.into());
        coeffs[n - k] = c.clone();
        if k < n {
            let mut shifted = mk;
            for i in 0..n {
                shifted[(i, i)] += &c;
            }
            mk = m.mul(&shifted);
        }
    }
    Ok(UniPoly::new(coeffs))
}

/// Jordan block sizes of a nilpotent matrix, in decreasing order.
///
/// Number of blocks of size >= k is rank(m^{k-1}) - rank(m^k).
pub fn nilpotent_jordan_type(m: &QMatrix) -> Result<Vec<usize>> {
    if !m.is_square() {
        return Err(Error::NonSquareMatrix {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut ranks = vec![n];
    let mut power = m.clone();
    for _ in 0..n {
        ranks.push(mat_rank(&power));
        if ranks.last() == Some(&0) {
            break;
        }
        power = power.mul(m);
    }
    if ranks.last() != Some(&0) {
        return Err(Error::NotNilpotent);
    }
    let mut partition = Vec::new();
    for k in 1..ranks.len() {
        let at_least_k = ranks[k - 1] - ranks[k];
        let at_least_k1 = if k + 1 < ranks.len() {
            ranks[k] - ranks[k + 1]
        } else {
            0
        };
        for _ in 0..at_least_k.saturating_sub(at_least_k1) {
            partition.push(k);
        }
    }
    partition.sort_unstable_by(|a, b| b.cmp(a));
    debug_assert_eq!(partition.iter().sum::<usize>(), n);
    Ok(partition)
}

/// Canonical (reduced row echelon) basis of the span of the given vectors.
pub fn row_space_basis(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let mut m = QMatrix::from_rows(rows.to_vec());
    assert_eq!(m.cols, cols);
    let pivots = m.rref();
    (0..pivots.len())
        .map(|i| (0..cols).map(|j| m[(i, j)].clone()).collect())
        .collect()
}

/// Remainder of v after reduction by an RREF basis (zero iff v is in the span).
pub fn reduce_mod_rows(basis: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    let mut v = v.to_vec();
    for row in basis {
        let pivot = row
            .iter()
            .position(|c| !c.is_zero())
            .expect("RREF basis has no zero rows");
        if v[pivot].is_zero() {
            continue;
        }
        let factor = v[pivot].clone();
        for (vi, ri) in v.iter_mut().zip(row) {
            *vi = &*vi - &factor * ri;
        }
    }
    v
}

pub fn in_row_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    reduce_mod_rows(basis, v).iter().all(|c| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{rat, rat_int};
    use proptest::prelude::*;

    fn qm(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_examples() {
        assert_eq!(mat_rank(&QMatrix::identity(2)), 2);
        assert_eq!(mat_rank(&QMatrix::zero(3, 3)), 0);
        assert_eq!(mat_rank(&qm(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn char_poly_examples() {
        // diag(5/6, 7/6) -> (S - 5/6)(S - 7/6)
        let mut d = QMatrix::zero(2, 2);
        d[(0, 0)] = rat(5, 6);
        d[(1, 1)] = rat(7, 6);
        let p = char_poly(&d).unwrap();
        let expect = UniPoly::new(vec![rat(35, 36), rat(-2, 1), rat_int(1)]);
        assert_eq!(p, expect);

        // zero 2x2 -> S^2
        let p = char_poly(&QMatrix::zero(2, 2)).unwrap();
        assert_eq!(p, UniPoly::new(vec![rat_int(0), rat_int(0), rat_int(1)]));

        // [[0, -2/3], [-2/3, 0]] -> S^2 - 4/9
        let mut m = QMatrix::zero(2, 2);
        m[(0, 1)] = rat(-2, 3);
        m[(1, 0)] = rat(-2, 3);
        let p = char_poly(&m).unwrap();
        assert_eq!(p, UniPoly::new(vec![rat(-4, 9), rat_int(0), rat_int(1)]));

        assert!(char_poly(&QMatrix::zero(2, 3)).is_err());
    }

    #[test]
    fn jordan_type_examples() {
        assert_eq!(nilpotent_jordan_type(&QMatrix::zero(3, 3)).unwrap(), vec![1, 1, 1]);
        assert_eq!(nilpotent_jordan_type(&qm(&[&[0, 1], &[0, 0]])).unwrap(), vec![2]);
        // 4x4 with power ranks (2, 1, 0): one block of 3, one of 1.
        let m = qm(&[
            &[0, 1, 0, 0],
            &[0, 0, 1, 0],
            &[0, 0, 0, 0],
            &[0, 0, 0, 0],
        ]);
        // m has rank 2, m^2 rank 1, m^3 = 0... adjust: block sizes [3, 1]
        let m = {
            let mut m = m;
            m[(2, 2)] = rat_int(0);
            m
        };
        assert_eq!(mat_rank(&m.pow(1)), 2);
        assert_eq!(mat_rank(&m.pow(2)), 1);
        assert_eq!(mat_rank(&m.pow(3)), 0);
        assert_eq!(nilpotent_jordan_type(&m).unwrap(), vec![3, 1]);
        assert!(nilpotent_jordan_type(&QMatrix::identity(2)).is_err());
    }

    #[test]
    fn inverse_and_det() {
        let m = qm(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(2));
        assert_eq!(m.det().unwrap(), rat_int(1));
        assert!(qm(&[&[1, 2], &[2, 4]]).inverse().is_err());
    }

    #[test]
    fn null_space_and_solve() {
        let m = qm(&[&[1, 2], &[2, 4]]);
        let ns = m.null_space();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| x.is_zero()));
        let sol = m.solve(&[rat_int(3), rat_int(6)]).unwrap();
        assert_eq!(m.mul_vec(&sol), vec![rat_int(3), rat_int(6)]);
        assert!(m.solve(&[rat_int(1), rat_int(0)]).is_none());
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = QMatrix> {
        proptest::collection::vec(-4i64..=4, n * n).prop_map(move |vals| {
            QMatrix::from_fn(n, n, |i, j| rat_int(vals[i * n + j]))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        // Cayley-Hamilton: char_poly(m) evaluated at m is 0, exactly.
        #[test]
        fn cayley_hamilton(m in small_matrix(3)) {
            let p = char_poly(&m).unwrap();
            let mut acc = QMatrix::zero(3, 3);
            for k in (0..p.coeffs().len()).rev() {
                acc = acc.mul(&m);
                for i in 0..3 {
                    acc[(i, i)] += &p.coeffs()[k];
                }
            }
            prop_assert!(acc.is_zero());
        }

        #[test]
        fn det_vs_char_poly_constant(m in small_matrix(3)) {
            // det(m) = (-1)^n * charpoly(0)
            let p = char_poly(&m).unwrap();
            let c0 = p.coeffs()[0].clone();
            let det = m.det().unwrap();
            prop_assert_eq!(det, -c0);
        }
    }
}
