//! Square matrices over Q[theta] and exact unimodular inversion.

use crate::error::{Error, Result};
use crate::exactalg::matrix::QMatrix;
use crate::exactalg::rational::Rational;
use crate::exactalg::unipoly::{RatFun, UniPoly};
use num::One;

/// Polynomial in theta over Q.
pub type ThetaPoly = UniPoly;

/// Square matrix over Q[theta], row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaMatrix {
    pub size: usize,
    entries: Vec<ThetaPoly>,
}

impl ThetaMatrix {
    pub fn zero(size: usize) -> Self {
        ThetaMatrix {
            size,
            entries: vec![ThetaPoly::zero(); size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zero(size);
        for i in 0..size {
            m.set(i, i, ThetaPoly::one());
        }
        m
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> ThetaPoly) -> Self {
        let mut m = Self::zero(size);
        for i in 0..size {
            for j in 0..size {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// A0 + theta * A1 from constant matrices.
    pub fn from_pencil(a0: &QMatrix, a1: &QMatrix) -> Self {
        assert!(a0.is_square() && a1.is_square() && a0.rows == a1.rows);
        ThetaMatrix::from_fn(a0.rows, |i, j| {
            UniPoly::new(vec![a0[(i, j)].clone(), a1[(i, j)].clone()])
        })
    }

    pub fn get(&self, i: usize, j: usize) -> &ThetaPoly {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ThetaPoly) {
        self.entries[i * self.size + j] = v;
    }

    /// Largest theta-degree over all entries; -1 for the zero matrix.
    pub fn deg(&self) -> i64 {
        self.entries.iter().map(|p| p.deg()).max().unwrap_or(-1)
    }

    /// Constant matrix of theta^k coefficients.
    pub fn coeff_matrix(&self, k: usize) -> QMatrix {
        QMatrix::from_fn(self.size, self.size, |i, j| self.get(i, j).coeff(k))
    }

    pub fn add(&self, other: &ThetaMatrix) -> ThetaMatrix {
        assert_eq!(self.size, other.size);
        ThetaMatrix::from_fn(self.size, |i, j| self.get(i, j).add(other.get(i, j)))
    }

    pub fn sub(&self, other: &ThetaMatrix) -> ThetaMatrix {
        assert_eq!(self.size, other.size);
        ThetaMatrix::from_fn(self.size, |i, j| self.get(i, j).sub(other.get(i, j)))
    }

    pub fn mul(&self, other: &ThetaMatrix) -> ThetaMatrix {
        assert_eq!(self.size, other.size);
        let n = self.size;
        let mut m = ThetaMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = m.get(i, j).add(&a.mul(b));
                    m.set(i, j, cur);
                }
            }
        }
        m
    }

    /// Add c * I.
    pub fn add_scalar(&self, c: &Rational) -> ThetaMatrix {
        let mut m = self.clone();
        for i in 0..self.size {
            m.set(i, i, m.get(i, i).add(&UniPoly::constant(c.clone())));
        }
        m
    }

    /// Entrywise theta^2 d/dtheta.
    pub fn theta2_ddtheta(&self) -> ThetaMatrix {
        ThetaMatrix::from_fn(self.size, |i, j| {
            self.get(i, j)
                .derivative()
                .mul(&UniPoly::monomial(Rational::one(), 2))
        })
    }

    /// Exact determinant over Q[theta] (fraction-free via the fraction field).
    pub fn det(&self) -> ThetaPoly {
        let n = self.size;
        let mut m: Vec<RatFun> = self
            .entries
            .iter()
            .map(|p| RatFun::from_poly(p.clone()))
            .collect();
        let mut det = RatFun::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
                return ThetaPoly::zero();
            };
            if p != col {
                for j in 0..n {
                    m.swap(col * n + j, p * n + j);
                }
                det = det.neg();
            }
            let pivot = m[col * n + col].clone();
            det = det.mul(&pivot);
            let inv = pivot.recip();
            for r in col + 1..n {
                if m[r * n + col].is_zero() {
                    continue;
                }
                let factor = m[r * n + col].mul(&inv);
                for j in col..n {
                    let v = m[r * n + j].sub(&factor.mul(&m[col * n + j]));
                    m[r * n + j] = v;
                }
            }
        }
        debug_assert!(det.is_polynomial());
        let lead = det.den.leading();
        det.num.scale(&lead.recip())
    }

    /// Exact inverse of a unimodular matrix (det a nonzero constant).
    ///
    /// Errors with the offending determinant otherwise.
    pub fn inverse(&self) -> Result<ThetaMatrix> {
        let d = self.det();
        if d.is_zero() || !d.is_constant() {
            return Err(Error::NotUnimodular {
                det: d.render("theta"),
            });
        }
        let n = self.size;
        // Gauss-Jordan over Q(theta); the result clears to polynomials by unimodularity.
        let mut aug: Vec<RatFun> = Vec::with_capacity(n * 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.push(RatFun::from_poly(self.get(i, j).clone()));
            }
            for j in 0..n {
                aug.push(if i == j { RatFun::one() } else { RatFun::zero() });
            }
        }
        let w = 2 * n;
        for col in 0..n {
            let p = (col..n)
                .find(|&r| !aug[r * w + col].is_zero())
                .expect("unimodular matrix has full rank");
            if p != col {
                for j in 0..w {
                    aug.swap(col * w + j, p * w + j);
                }
            }
            let inv = aug[col * w + col].recip();
            for j in col..w {
                let v = aug[col * w + j].mul(&inv);
                aug[col * w + j] = v;
            }
            for r in 0..n {
                if r == col || aug[r * w + col].is_zero() {
                    continue;
                }
                let factor = aug[r * w + col].clone();
                for j in col..w {
                    let v = aug[r * w + j].sub(&factor.mul(&aug[col * w + j]));
                    aug[r * w + j] = v;
                }
            }
        }
        let mut out = ThetaMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                let e = &aug[i * w + n + j];
                if !e.is_polynomial() {
                    return Err(Error::Inconsistency(
                        "inverse of unimodular matrix not polynomial".into(),
                    ));
                }
                let den = e.den.leading();
                out.set(i, j, e.num.scale(&den.recip()));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{rat, rat_int};
    use proptest::prelude::*;

    fn theta() -> UniPoly {
        UniPoly::monomial(rat_int(1), 1)
    }

    #[test]
    fn inverse_examples() {
        // I + theta*E12 -> I - theta*E12
        let mut p = ThetaMatrix::identity(2);
        p.set(0, 1, theta());
        let inv = p.inverse().unwrap();
        let mut expect = ThetaMatrix::identity(2);
        expect.set(0, 1, theta().neg());
        assert_eq!(inv, expect);
        assert_eq!(p.mul(&inv), ThetaMatrix::identity(2));

        // diag(2, 3) -> diag(1/2, 1/3)
        let mut d = ThetaMatrix::zero(2);
        d.set(0, 0, UniPoly::constant(rat_int(2)));
        d.set(1, 1, UniPoly::constant(rat_int(3)));
        let inv = d.inverse().unwrap();
        assert_eq!(inv.get(0, 0), &UniPoly::constant(rat(1, 2)));
        assert_eq!(inv.get(1, 1), &UniPoly::constant(rat(1, 3)));

        // [[1, theta], [0, 1]] * [[1, 0], [theta, 1]]: inverse verified by product = I
        let mut a = ThetaMatrix::identity(2);
        a.set(0, 1, theta());
        let mut b = ThetaMatrix::identity(2);
        b.set(1, 0, theta());
        let prod = a.mul(&b);
        let inv = prod.inverse().unwrap();
        assert_eq!(prod.mul(&inv), ThetaMatrix::identity(2));
        assert_eq!(inv.mul(&prod), ThetaMatrix::identity(2));
    }

    #[test]
    fn non_unimodular_rejected() {
        let mut m = ThetaMatrix::identity(2);
        m.set(0, 0, theta());
        match m.inverse() {
            Err(crate::error::Error::NotUnimodular { .. }) => {}
            other => panic!("expected NotUnimodular, got {other:?}"),
        }
        let z = ThetaMatrix::zero(2);
        assert!(z.inverse().is_err());
    }

    // Random products of elementary theta-shears are unimodular.
    fn shear_product(n: usize) -> impl Strategy<Value = ThetaMatrix> {
        proptest::collection::vec((0..n, 0..n, -3i64..=3, 0usize..3), 1..6).prop_map(
            move |shears| {
                let mut acc = ThetaMatrix::identity(n);
                for (i, j, c, k) in shears {
                    if i == j || c == 0 {
                        continue;
                    }
                    let mut e = ThetaMatrix::identity(n);
                    e.set(i, j, UniPoly::monomial(rat_int(c), k));
                    acc = acc.mul(&e);
                }
                acc
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn shear_inverse_roundtrip(p in shear_product(3)) {
            let inv = p.inverse().unwrap();
            prop_assert_eq!(p.mul(&inv), ThetaMatrix::identity(3));
        }

        #[test]
        fn mul_associative(a in shear_product(2), b in shear_product(2), c in shear_product(2)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }
    }
}
