//! Laurent polynomial vectors in theta and finitely generated Q[tau]-lattices.
//!
//! Elements of G are written in the coordinates of the G_0 basis as vectors of
//! Laurent polynomials in theta (tau = 1/theta). A `TauLattice` is a full-rank
//! Q[tau]-submodule kept in canonical column Hermite form, which makes lattice
//! equality, membership and residue computations exact echelon arithmetic.

use crate::error::{Error, Result};
use crate::exactalg::matrix::QMatrix;
use crate::exactalg::rational::Rational;
use crate::exactalg::theta::ThetaMatrix;
use crate::exactalg::unipoly::UniPoly;
use num::{One, Zero};

/// Laurent polynomial in theta: `coeffs[k]` is the coefficient of theta^(ord+k).
/// Invariant: first and last coefficients nonzero (zero = empty coeffs, ord 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    ord: i64,
    coeffs: Vec<Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly {
            ord: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn normalize(ord: i64, mut coeffs: Vec<Rational>) -> Self {
        let mut start = 0;
        while start < coeffs.len() && coeffs[start].is_zero() {
            start += 1;
        }
        coeffs.drain(..start);
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            LaurentPoly::zero()
        } else {
            LaurentPoly {
                ord: ord + start as i64,
                coeffs,
            }
        }
    }

    pub fn constant(c: Rational) -> Self {
        LaurentPoly::normalize(0, vec![c])
    }

    /// c * theta^k.
    pub fn monomial(c: Rational, k: i64) -> Self {
        LaurentPoly::normalize(k, vec![c])
    }

    pub fn from_theta_poly(p: &UniPoly) -> Self {
        LaurentPoly::normalize(0, p.coeffs().to_vec())
    }

    /// p(tau) as a Laurent polynomial in theta (tau = theta^{-1}).
    pub fn from_tau_poly(p: &UniPoly) -> Self {
        let d = p.coeffs().len();
        if d == 0 {
            return LaurentPoly::zero();
        }
        let coeffs: Vec<Rational> = (0..d).map(|k| p.coeff(d - 1 - k)).collect();
        LaurentPoly::normalize(-(d as i64 - 1), coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest theta power with nonzero coefficient.
    pub fn min_ord(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.ord)
    }

    pub fn max_ord(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.ord + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, k: i64) -> Rational {
        if self.is_zero() || k < self.ord {
            return Rational::zero();
        }
        let idx = (k - self.ord) as usize;
        self.coeffs.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.ord.min(other.ord);
        let hi = self.max_ord().unwrap().max(other.max_ord().unwrap());
        let coeffs: Vec<Rational> = (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect();
        LaurentPoly::normalize(lo, coeffs)
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            ord: self.ord,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            ord: self.ord,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        LaurentPoly::normalize(self.ord + other.ord, coeffs)
    }

    /// Multiply by theta^k.
    pub fn shift(&self, k: i64) -> LaurentPoly {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            ord: self.ord + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// d/dtheta.
    pub fn theta_derivative(&self) -> LaurentPoly {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        let coeffs: Vec<Rational> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Rational::from_integer((self.ord + i as i64).into()))
            .collect();
        LaurentPoly::normalize(self.ord - 1, coeffs)
    }

    /// Polynomial in tau equal to tau^top * self; requires max_ord <= top.
    pub fn to_tau_poly(&self, top: i64) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        assert!(self.max_ord().unwrap() <= top, "entry sticks out above the shift");
        let deg = (top - self.ord) as usize;
        let mut coeffs = vec![Rational::zero(); deg + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            let theta_pow = self.ord + i as i64;
            coeffs[(top - theta_pow) as usize] = c.clone();
        }
        UniPoly::new(coeffs)
    }
}

/// Vector of Laurent polynomials (coordinates in the G_0 basis).
pub type LaurentVec = Vec<LaurentPoly>;

pub fn vec_zero(mu: usize) -> LaurentVec {
    vec![LaurentPoly::zero(); mu]
}

pub fn vec_is_zero(v: &LaurentVec) -> bool {
    v.iter().all(|e| e.is_zero())
}

pub fn vec_add(a: &LaurentVec, b: &LaurentVec) -> LaurentVec {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn vec_scale(a: &LaurentVec, c: &Rational) -> LaurentVec {
    a.iter().map(|x| x.scale(c)).collect()
}

pub fn vec_shift(a: &LaurentVec, k: i64) -> LaurentVec {
    a.iter().map(|x| x.shift(k)).collect()
}

pub fn vec_min_ord(v: &LaurentVec) -> Option<i64> {
    v.iter().filter_map(|e| e.min_ord()).min()
}

pub fn vec_max_ord(v: &LaurentVec) -> Option<i64> {
    v.iter().filter_map(|e| e.max_ord()).max()
}

/// Coordinate action of tau * d_tau on a vector, for the lattice pair whose
/// t-matrix has row i expanding t.g_i: tau d_tau v = -theta v' - theta^{-1} A^T v.
pub fn tau_del_tau(v: &LaurentVec, t_mat: &ThetaMatrix) -> LaurentVec {
    let mu = v.len();
    let mut out = vec_zero(mu);
    for i in 0..mu {
        // -theta * dv_i/dtheta
        out[i] = v[i].theta_derivative().shift(1).neg();
    }
    // -theta^{-1} * (A^T v)_i = -theta^{-1} * sum_j A[j][i] v_j
    for i in 0..mu {
        let mut acc = LaurentPoly::zero();
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let a = t_mat.get(j, i);
            if a.is_zero() {
                continue;
            }
            acc = acc.add(&LaurentPoly::from_theta_poly(a).mul(vj));
        }
        out[i] = out[i].sub(&acc.shift(-1));
    }
    out
}

/// Full-rank Q[tau]-lattice in canonical column Hermite form.
///
/// The lattice is theta^shift * (column span over Q[tau] of `cols`), where the
/// columns are polynomial vectors in tau. Canonical form: pivot entry in row r
/// lives in column r, is monic, columns are triangular with respect to pivot
/// rows, off-pivot entries in each pivot row are degree-reduced, and not every
/// entry is divisible by tau (shift minimality).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauLattice {
    pub mu: usize,
    pub shift: i64,
    cols: Vec<Vec<UniPoly>>,
}

impl TauLattice {
    /// Lattice spanned over Q[tau] by the given generators.
    pub fn from_generators(mu: usize, gens: &[LaurentVec]) -> Result<TauLattice> {
        assert!(gens.iter().all(|g| g.len() == mu));
        let nonzero: Vec<&LaurentVec> = gens.iter().filter(|g| !vec_is_zero(g)).collect();
        if mu == 0 {
            return Ok(TauLattice {
                mu,
                shift: 0,
                cols: Vec::new(),
            });
        }
        let top = nonzero
            .iter()
            .filter_map(|g| vec_max_ord(g))
            .max()
            .unwrap_or(0);
        let mut cols: Vec<Vec<UniPoly>> = nonzero
            .iter()
            .map(|g| g.iter().map(|e| e.to_tau_poly(top)).collect())
            .collect();
        hermite_reduce(mu, &mut cols)?;
        let mut lat = TauLattice {
            mu,
            shift: top,
            cols,
        };
        lat.normalize_shift();
        Ok(lat)
    }

    /// Standard lattice: Q[tau]-span of the G_0 basis vectors.
    pub fn standard(mu: usize) -> TauLattice {
        let gens: Vec<LaurentVec> = (0..mu)
            .map(|i| {
                let mut v = vec_zero(mu);
                v[i] = LaurentPoly::constant(Rational::one());
                v
            })
            .collect();
        TauLattice::from_generators(mu, &gens).expect("standard basis is free")
    }

    fn normalize_shift(&mut self) {
        if self.cols.is_empty() {
            return;
        }
        loop {
            let all_divisible = self
                .cols
                .iter()
                .flatten()
                .all(|p| p.is_zero() || p.coeff(0).is_zero());
            if !all_divisible {
                break;
            }
            for col in &mut self.cols {
                for p in col.iter_mut() {
                    if p.is_zero() {
                        continue;
                    }
                    *p = UniPoly::new(p.coeffs()[1..].to_vec());
                }
            }
            self.shift -= 1;
        }
    }

    /// Basis vectors as Laurent vectors.
    pub fn basis(&self) -> Vec<LaurentVec> {
        self.cols
            .iter()
            .map(|col| {
                col.iter()
                    .map(|p| {
                        // coefficient of tau^d contributes theta^(shift - d)
                        if p.is_zero() {
                            LaurentPoly::zero()
                        } else {
                            let d = p.coeffs().len();
                            let coeffs: Vec<Rational> =
                                (0..d).map(|k| p.coeff(d - 1 - k)).collect();
                            LaurentPoly::normalize(self.shift - (d as i64 - 1), coeffs)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Express v as a Q[tau]-combination of the basis; None when v is outside.
    pub fn solve_membership(&self, v: &LaurentVec) -> Option<Vec<UniPoly>> {
        if vec_is_zero(v) {
            return Some(vec![UniPoly::zero(); self.mu]);
        }
        if vec_max_ord(v).unwrap() > self.shift {
            return None;
        }
        let mut target: Vec<UniPoly> = v.iter().map(|e| e.to_tau_poly(self.shift)).collect();
        let mut coeffs = vec![UniPoly::zero(); self.mu];
        for r in 0..self.mu {
            let pivot = &self.cols[r][r];
            if target[r].is_zero() {
                continue;
            }
            let (q, rem) = target[r].div_rem(pivot);
            if !rem.is_zero() {
                return None;
            }
            for i in 0..self.mu {
                let delta = q.mul(&self.cols[r][i]);
                target[i] = target[i].sub(&delta);
            }
            coeffs[r] = q;
        }
        if target.iter().all(|p| p.is_zero()) {
            Some(coeffs)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &LaurentVec) -> bool {
        self.solve_membership(v).is_some()
    }

    /// Residue matrix of tau d_tau on lattice / tau lattice, in the basis
    /// classes: column i holds the coordinates of tau d_tau (w_i).
    ///
    /// None when the lattice is not logarithmic.
    pub fn residue(&self, t_mat: &ThetaMatrix) -> Option<QMatrix> {
        let basis = self.basis();
        let mut res = QMatrix::zero(self.mu, self.mu);
        for (i, w) in basis.iter().enumerate() {
            let u = tau_del_tau(w, t_mat);
            let coeffs = self.solve_membership(&u)?;
            for (j, c) in coeffs.iter().enumerate() {
                res[(j, i)] = c.coeff(0);
            }
        }
        Some(res)
    }

    /// The lattice theta^k * self (tau^{-k} self).
    pub fn shifted(&self, k: i64) -> TauLattice {
        let mut out = self.clone();
        out.shift += k;
        out
    }
}

/// In-place canonical column Hermite form over Q[tau]. Errors when the
/// columns do not have full rank mu.
fn hermite_reduce(mu: usize, cols: &mut Vec<Vec<UniPoly>>) -> Result<()> {
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; mu];
    let mut active: Vec<usize> = (0..cols.len()).collect();
    for r in 0..mu {
        loop {
            let mut nonzero: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&c| !cols[c][r].is_zero())
                .collect();
            if nonzero.is_empty() {
                break;
            }
            if nonzero.len() == 1 {
                let p = nonzero[0];
                pivot_of_row[r] = Some(p);
                active.retain(|&c| c != p);
                break;
            }
            // Reduce the larger-degree entries by the smallest.
            nonzero.sort_by_key(|&c| cols[c][r].deg());
            let base = nonzero[0];
            for &c in &nonzero[1..] {
                let (q, _) = cols[c][r].div_rem(&cols[base][r]);
                if q.is_zero() {
                    continue;
                }
                for i in 0..mu {
                    let delta = q.mul(&cols[base][i]);
                    cols[c][i] = cols[c][i].sub(&delta);
                }
            }
            // If no reduction changed anything (all same degree, quotients constant),
            // the loop still makes progress: remainders have strictly smaller degree
            // than the base, so base stays minimal and others shrink each pass.
        }
        if let Some(p) = pivot_of_row[r] {
            // Normalize monic.
            let lead = cols[p][r].leading();
            if !lead.is_one() {
                let inv = lead.recip();
                for i in 0..mu {
                    cols[p][i] = cols[p][i].scale(&inv);
                }
            }
        }
    }
    // Full rank: every row has a pivot.
    if pivot_of_row.iter().any(|p| p.is_none()) {
        return Err(Error::Inconsistency(
            "lattice generators do not have full rank".into(),
        ));
    }
    // Reduce off-pivot entries in each pivot row (canonical Hermite form),
    // processing rows bottom-up so earlier reductions stay valid.
    let order: Vec<usize> = pivot_of_row.iter().map(|p| p.unwrap()).collect();
    let mut result: Vec<Vec<UniPoly>> = order.iter().map(|&p| cols[p].clone()).collect();
    // result[r] is the pivot column for row r; triangular: result[r][r'] = 0 for r' < r.
    for r in 0..mu {
        for c in 0..mu {
            if c == r {
                continue;
            }
            if result[c][r].is_zero() {
                continue;
            }
            let (q, _) = result[c][r].div_rem(&result[r][r]);
            if q.is_zero() {
                continue;
            }
            for i in 0..mu {
                let delta = q.mul(&result[r][i]);
                result[c][i] = result[c][i].sub(&delta);
            }
        }
    }
    *cols = result;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{rat, rat_int};

    fn lp(ord: i64, coeffs: &[i64]) -> LaurentPoly {
        LaurentPoly::normalize(ord, coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn laurent_arith() {
        let a = lp(-1, &[1, 2]); // theta^{-1} + 2
        let b = lp(0, &[3]); // 3
        assert_eq!(a.add(&b), lp(-1, &[1, 5]));
        assert_eq!(a.mul(&b), lp(-1, &[3, 6]));
        assert_eq!(a.shift(2), lp(1, &[1, 2]));
        // d/dtheta (theta^{-1} + 2) = -theta^{-2}
        assert_eq!(a.theta_derivative(), lp(-2, &[-1]));
        assert_eq!(a.coeff(-1), rat_int(1));
        assert_eq!(a.coeff(5), rat_int(0));
    }

    #[test]
    fn tau_poly_roundtrip() {
        let p = UniPoly::new(vec![rat_int(1), rat_int(0), rat_int(2)]); // 1 + 2 tau^2
        let l = LaurentPoly::from_tau_poly(&p);
        assert_eq!(l, lp(-2, &[2, 0, 1]));
        assert_eq!(l.to_tau_poly(0), p);
    }

    #[test]
    fn standard_lattice_membership() {
        let lat = TauLattice::standard(2);
        // g_0 and tau^3 g_1 are in; theta g_0 is not.
        let mut v = vec_zero(2);
        v[0] = LaurentPoly::constant(rat_int(1));
        assert!(lat.contains(&v));
        let mut v = vec_zero(2);
        v[1] = LaurentPoly::monomial(rat_int(5), -3);
        assert!(lat.contains(&v));
        let mut v = vec_zero(2);
        v[0] = LaurentPoly::monomial(rat_int(1), 1);
        assert!(!lat.contains(&v));
    }

    #[test]
    fn hermite_canonical_equality() {
        // Same module from different generator presentations.
        let mut g1 = vec_zero(2);
        g1[0] = LaurentPoly::constant(rat_int(1));
        let mut g2 = vec_zero(2);
        g2[1] = LaurentPoly::constant(rat_int(1));
        let mut g3 = vec_zero(2);
        g3[0] = LaurentPoly::monomial(rat_int(2), -1); // 2 tau g_0
        g3[1] = LaurentPoly::constant(rat_int(7));
        let a = TauLattice::from_generators(2, &[g1.clone(), g2.clone()]).unwrap();
        let b = TauLattice::from_generators(2, &[g1.clone(), g2.clone(), g3]).unwrap();
        assert_eq!(a, b);

        // A genuinely different lattice.
        let mut h = vec_zero(2);
        h[1] = LaurentPoly::monomial(rat_int(1), 1); // theta g_1
        let c = TauLattice::from_generators(2, &[g1, h]).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn residue_of_diagonal_pair() {
        // t-matrix theta*diag(2/3, 4/3): residue of standard lattice is diag(-2/3, -4/3).
        let mut t = ThetaMatrix::zero(2);
        t.set(0, 0, UniPoly::monomial(rat(2, 3), 1));
        t.set(1, 1, UniPoly::monomial(rat(4, 3), 1));
        let lat = TauLattice::standard(2);
        let res = lat.residue(&t).unwrap();
        assert_eq!(res[(0, 0)], rat(-2, 3));
        assert_eq!(res[(1, 1)], rat(-4, 3));
        assert_eq!(res[(0, 1)], rat_int(0));
    }

    #[test]
    fn non_logarithmic_detected() {
        // t = theta^2 on rank 1: tau d_tau g = -theta g, not in Q[tau] g.
        let mut t = ThetaMatrix::zero(1);
        t.set(0, 0, UniPoly::monomial(rat_int(1), 2));
        let lat = TauLattice::standard(1);
        assert!(lat.residue(&t).is_none());
    }
}
