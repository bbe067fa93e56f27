//! Mellin-transform formulas evaluated exactly from a good basis: the
//! sigma-side tau matrix, the s-side t matrix, its determinant, and the
//! Aomoto determinant.

use crate::birkhoff::GoodBasisResult;
use crate::error::{Error, Result};
use crate::exactalg::matrix::char_poly;
use crate::exactalg::rational::{render_rational, Rational};
use crate::exactalg::unipoly::{RatFun, UniPoly};
use crate::lattice::SpectrumMultiset;
use num::{One, Signed, Zero};

/// Square matrix of rational functions in one variable over Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunctionMatrix {
    pub size: usize,
    entries: Vec<RatFun>,
}

impl RationalFunctionMatrix {
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> RatFun) -> Self {
        let mut entries = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                entries.push(f(i, j));
            }
        }
        RationalFunctionMatrix { size, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFun {
        &self.entries[i * self.size + j]
    }

    /// Exact determinant by Gaussian elimination over the fraction field.
    pub fn det(&self) -> RatFun {
        let n = self.size;
        if n == 0 {
            return RatFun::one();
        }
        let mut m = self.entries.clone();
        let mut det = RatFun::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
                return RatFun::zero();
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
                let f = m[r * n + col].mul(&inv);
                for j in col..n {
                    let v = m[r * n + j].sub(&f.mul(&m[col * n + j]));
                    m[r * n + j] = v;
                }
            }
        }
        det
    }

    pub fn render(&self, var: &str) -> Vec<Vec<String>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.get(i, j).render(var)).collect())
            .collect()
    }
}

/// det A_0 != 0: full irregularity at infinity (ir = mu).
pub fn irregularity_full(r: &GoodBasisResult) -> bool {
    !r.a0.det().expect("A0 is square").is_zero()
}

/// Dimension of the Mellin transform over C(s): mu minus the algebraic
/// multiplicity of the eigenvalue 0 of A_0.
pub fn mellin_dimension(r: &GoodBasisResult) -> usize {
    let mu = r.a0.rows;
    if mu == 0 {
        return 0;
    }
    let cp = char_poly(&r.a0).expect("A0 is square");
    let zero_mult = cp
        .coeffs()
        .iter()
        .position(|c| !c.is_zero())
        .unwrap_or(mu);
    mu - zero_mult
}

#[derive(Debug, Clone)]
pub struct MellinMatrices {
    /// Matrix of tau = theta^{-1} over C(sigma): -A_0^{-1} (A_1 + sigma I).
    pub tau_matrix: RationalFunctionMatrix,
    /// Matrix of t over C(s): s (A_1 + s I)^{-1} A_0.
    pub t_matrix: RationalFunctionMatrix,
}

/// The exact Mellin-side matrices. The tau matrix needs A_0 invertible
/// (otherwise the Mellin dimension drops below mu and the basis is not a
/// C(sigma)-basis); the t matrix always exists as a rational-function matrix.
pub fn mellin_matrices(r: &GoodBasisResult) -> Result<MellinMatrices> {
    let mu = r.a0.rows;
    let a0_inv = r.a0.inverse().map_err(|_| Error::SingularA0)?;
    let sigma = UniPoly::monomial(Rational::one(), 1);
    let tau_matrix = RationalFunctionMatrix::from_fn(mu, |i, j| {
        // -(A0^{-1} A1)[i][j] - sigma A0^{-1}[i][j]
        let mut constant = Rational::zero();
        for l in 0..mu {
            constant += &a0_inv[(i, l)] * &r.a1[(l, j)];
        }
        let mut p = UniPoly::constant(-constant);
        p = p.sub(&sigma.scale(&a0_inv[(i, j)]));
        RatFun::from_poly(p)
    });
    let t_matrix = t_matrix_mellin(r);
    Ok(MellinMatrices { tau_matrix, t_matrix })
}

/// s (A_1 + s I)^{-1} A_0 over C(s), computed by exact Gauss-Jordan inversion.
pub fn t_matrix_mellin(r: &GoodBasisResult) -> RationalFunctionMatrix {
    let mu = r.a0.rows;
    let s = UniPoly::monomial(Rational::one(), 1);
    // Invert A1 + s I over Q(s).
    let n = mu;
    let mut m: Vec<RatFun> = Vec::with_capacity(n * 2 * n);
    for i in 0..n {
        for j in 0..n {
            let mut p = UniPoly::constant(r.a1[(i, j)].clone());
            if i == j {
                p = p.add(&s);
            }
            m.push(RatFun::from_poly(p));
        }
        for j in 0..n {
            m.push(if i == j { RatFun::one() } else { RatFun::zero() });
        }
    }
    let w = 2 * n;
    for col in 0..n {
        let p = (col..n)
            .find(|&r| !m[r * w + col].is_zero())
            .expect("A1 + sI is generically invertible");
        if p != col {
            for j in 0..w {
                m.swap(col * w + j, p * w + j);
            }
        }
        let inv = m[col * w + col].recip();
        for j in col..w {
            let v = m[col * w + j].mul(&inv);
            m[col * w + j] = v;
        }
        for r2 in 0..n {
            if r2 == col || m[r2 * w + col].is_zero() {
                continue;
            }
            let f = m[r2 * w + col].clone();
            for j in col..w {
                let v = m[r2 * w + j].sub(&f.mul(&m[col * w + j]));
                m[r2 * w + j] = v;
            }
        }
    }
    RationalFunctionMatrix::from_fn(mu, |i, j| {
        let mut acc = RatFun::zero();
        for l in 0..mu {
            if r.a0[(l, j)].is_zero() {
                continue;
            }
            let a = RatFun::from_poly(UniPoly::constant(r.a0[(l, j)].clone()));
            acc = acc.add(&m[i * w + n + l].mul(&a));
        }
        acc.mul(&RatFun::from_poly(s.clone()))
    })
}

#[derive(Debug, Clone)]
pub struct DetTMellin {
    pub value: RatFun,
    pub factored: String,
}

/// det of the Mellin t-matrix by the closed formula
/// s^mu det A_0 / det(A_1 + s I); the poles (with multiplicity) are the
/// opposite spectrum exactly when det A_0 != 0.
pub fn det_t_mellin(r: &GoodBasisResult) -> DetTMellin {
    let mu = r.a0.rows;
    let det_a0 = r.a0.det().expect("A0 is square");
    if det_a0.is_zero() {
        return DetTMellin {
            value: RatFun::zero(),
            factored: "0".to_string(),
        };
    }
    // det(A_1 + s I) = char_poly(-A_1)(s).
    let neg_a1 = r.a1.scale(&-Rational::one());
    let den = char_poly(&neg_a1).expect("A1 is square");
    let num = UniPoly::monomial(det_a0.clone(), mu);
    let value = RatFun::new(num, den);

    let eigen = char_poly(&r.a1)
        .ok()
        .and_then(|cp| crate::exactalg::unipoly::rational_root_factor(&cp).ok());
    let factored = match eigen {
        Some((roots, rest)) if rest.is_constant() => {
            let mut denom_factors = Vec::new();
            for (beta, mult) in roots {
                denom_factors.push(render_linear_power("s", &beta, mult));
            }
            format!(
                "{}/({})",
                render_scaled_power(&det_a0, "s", mu),
                denom_factors.join("*")
            )
        }
        _ => format!("({})/({})", value.num.render("s"), value.den.render("s")),
    };
    DetTMellin { value, factored }
}

fn render_linear_power(var: &str, shift: &Rational, mult: usize) -> String {
    let base = if shift.is_zero() {
        var.to_string()
    } else if shift.is_negative() {
        format!("({var}-{})", render_rational(&shift.abs()))
    } else {
        format!("({var}+{})", render_rational(shift))
    };
    if mult > 1 {
        format!("{base}^{mult}")
    } else {
        base
    }
}

fn render_scaled_power(c: &Rational, var: &str, power: usize) -> String {
    let var_part = match power {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{power}"),
    };
    if c.is_one() && !var_part.is_empty() {
        var_part
    } else if var_part.is_empty() {
        format!("({})", render_rational(c))
    } else {
        format!("({})*{}", render_rational(c), var_part)
    }
}

#[derive(Debug, Clone)]
pub struct AomotoDeterminant {
    /// The constant c = det A_0 = product of critical values with multiplicity.
    pub c: Rational,
    pub value: RatFun,
    pub factored: String,
}

/// Determinant of the Aomoto complex in a good basis:
/// c (s+1)^mu / prod_beta (s + 1 + beta)^{nu_beta}, with c = det A_0.
///
/// Requires 0 not to be a critical value (det A_0 != 0).
pub fn aomoto_determinant(
    r: &GoodBasisResult,
    spectrum: &SpectrumMultiset,
) -> Result<AomotoDeterminant> {
    let mu = r.a0.rows;
    let c = r.a0.det().expect("A0 is square");
    if c.is_zero() {
        return Err(Error::ZeroCriticalValue);
    }
    let one = Rational::one();
    let num = UniPoly::x_plus(one.clone()).pow(mu).scale(&c);
    let mut den = UniPoly::one();
    let mut denom_factors = Vec::new();
    for (beta, &mult) in spectrum.iter() {
        let shift = beta + &one;
        den = den.mul(&UniPoly::x_plus(shift.clone()).pow(mult as usize));
        denom_factors.push(render_linear_power("s", &shift, mult as usize));
    }
    let value = RatFun::new(num, den);
    let num_str = if c.is_one() {
        render_linear_power("s", &one, mu)
    } else {
        format!(
            "({})*{}",
            render_rational(&c),
            render_linear_power("s", &one, mu)
        )
    };
    let factored = format!("{}/({})", num_str, denom_factors.join("*"));
    Ok(AomotoDeterminant { c, value, factored })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::birkhoff::good_basis;
    use crate::brieskorn::t_matrix;
    use crate::exactalg::rational::{rat, rat_int};
    use crate::poly::{parse, var_list};

    fn good(fs: &str) -> (crate::lattice::SpectrumMultiset, GoodBasisResult) {
        let f = parse(fs, &var_list(&["x", "y"])).unwrap();
        let lp = t_matrix(&f).unwrap();
        let (vf, gb) = good_basis(&lp).unwrap();
        (vf.spectrum, gb)
    }

    #[test]
    fn irregularity_examples() {
        let (_, gb) = good("1/3x^3 - x + 1/2y^2");
        assert!(irregularity_full(&gb)); // det = -4/9
        assert_eq!(gb.a0.det().unwrap(), rat(-4, 9));

        let (_, gb) = good("x^3 + y^3");
        assert!(!irregularity_full(&gb));

        let (_, gb) = good("x^2 + y^2 + 1");
        assert!(irregularity_full(&gb));
    }

    #[test]
    fn dimension_examples() {
        let (_, gb) = good("1/3x^3 - x + 1/2y^2");
        assert_eq!(mellin_dimension(&gb), 2);
        let (_, gb) = good("x^3 + y^3");
        assert_eq!(mellin_dimension(&gb), 0);
        let (_, gb) = good("x^2 + y^2 + 1");
        assert_eq!(mellin_dimension(&gb), 1);
    }

    #[test]
    fn dimension_iff_irregularity() {
        for f in ["x^3 + y^3", "1/3x^3 - x + 1/2y^2", "x^2 + y^2 + 1", "x^2 + y^3"] {
            let (_, gb) = good(f);
            assert_eq!(
                mellin_dimension(&gb) == gb.a0.rows,
                irregularity_full(&gb),
                "dimension/irregularity equivalence for {f}"
            );
        }
    }

    #[test]
    fn matrices_one_by_one() {
        // A0 = (1), A1 = (1): tau-matrix = -(sigma + 1), t-matrix = s/(1+s).
        let (_, gb) = good("x^2 + y^2 + 1");
        let mm = mellin_matrices(&gb).unwrap();
        let tau = mm.tau_matrix.get(0, 0);
        assert!(tau.is_polynomial());
        assert_eq!(tau.num, UniPoly::new(vec![rat_int(-1), rat_int(-1)]));
        let t = mm.t_matrix.get(0, 0);
        assert_eq!(t.num, UniPoly::monomial(rat_int(1), 1));
        assert_eq!(t.den, UniPoly::x_plus(rat_int(1)));
    }

    #[test]
    fn singular_a0_refused() {
        let (_, gb) = good("x^3 + y^3");
        assert!(matches!(mellin_matrices(&gb), Err(Error::SingularA0)));
        // t-matrix side is still defined and identically 0 here (A0 = 0).
        let t = t_matrix_mellin(&gb);
        for i in 0..4 {
            for j in 0..4 {
                assert!(t.get(i, j).is_zero());
            }
        }
    }

    #[test]
    fn det_t_examples() {
        // 1/3x^3 - x + 1/2y^2: s^2 (-4/9) / ((s+5/6)(s+7/6))
        let (_, gb) = good("1/3x^3 - x + 1/2y^2");
        let det = det_t_mellin(&gb);
        let expect = RatFun::new(
            UniPoly::monomial(rat(-4, 9), 2),
            UniPoly::x_plus(rat(5, 6)).mul(&UniPoly::x_plus(rat(7, 6))),
        );
        assert_eq!(det.value, expect);
        assert_eq!(det.factored, "(-4/9)*s^2/((s+5/6)*(s+7/6))");

        // x^2 + y^2 + 1: s/(s+1)
        let (_, gb) = good("x^2 + y^2 + 1");
        let det = det_t_mellin(&gb);
        assert_eq!(
            det.value,
            RatFun::new(UniPoly::monomial(rat_int(1), 1), UniPoly::x_plus(rat_int(1)))
        );
        assert_eq!(det.factored, "s/((s+1))");

        // A0 singular: identically 0.
        let (_, gb) = good("x^3 + y^3");
        assert!(det_t_mellin(&gb).value.is_zero());
    }

    #[test]
    fn det_consistency_two_routes() {
        // Formula vs cofactor expansion of the actual matrix, exactly.
        for f in ["1/3x^3 - x + 1/2y^2", "x^2 + y^2 + 1", "x^2 + y^3"] {
            let (_, gb) = good(f);
            let via_matrix = t_matrix_mellin(&gb).det();
            let via_formula = det_t_mellin(&gb).value;
            assert_eq!(via_matrix, via_formula, "det routes for {f}");
        }
    }

    #[test]
    fn aomoto_examples() {
        // c = -4/9; (-4/9)(s+1)^2 / ((s+11/6)(s+13/6))
        let (spec, gb) = good("1/3x^3 - x + 1/2y^2");
        let a = aomoto_determinant(&gb, &spec).unwrap();
        assert_eq!(a.c, rat(-4, 9));
        let expect = RatFun::new(
            UniPoly::x_plus(rat_int(1)).pow(2).scale(&rat(-4, 9)),
            UniPoly::x_plus(rat(11, 6)).mul(&UniPoly::x_plus(rat(13, 6))),
        );
        assert_eq!(a.value, expect);
        assert_eq!(a.factored, "(-4/9)*(s+1)^2/((s+11/6)*(s+13/6))");

        // x^2 + y^2 + 1: c = 1; (s+1)/(s+2)
        let (spec, gb) = good("x^2 + y^2 + 1");
        let a = aomoto_determinant(&gb, &spec).unwrap();
        assert_eq!(a.c, rat_int(1));
        assert_eq!(
            a.value,
            RatFun::new(UniPoly::x_plus(rat_int(1)), UniPoly::x_plus(rat_int(2)))
        );

        // x^3 + y^3: 0 is a critical value.
        let (spec, gb) = good("x^3 + y^3");
        assert!(matches!(
            aomoto_determinant(&gb, &spec),
            Err(Error::ZeroCriticalValue)
        ));
    }

    #[test]
    fn aomoto_constant_is_product_of_critical_values() {
        // c = det A0 = product of eigenvalues of A0 with multiplicity.
        let (spec, gb) = good("1/3x^3 - x + 1/2y^2");
        let a = aomoto_determinant(&gb, &spec).unwrap();
        let cp = char_poly(&gb.a0).unwrap();
        let mu = gb.a0.rows;
        let from_char = cp.coeff(0) * if mu % 2 == 1 { -rat_int(1) } else { rat_int(1) };
        assert_eq!(a.c, from_char);
        // Critical values of 1/3x^3 - x + 1/2y^2 are +-2/3: product -4/9.
        assert_eq!(a.c, rat(2, 3) * rat(-2, 3));
    }
}
