//! Univariate polynomials and rational functions over Q.

use crate::error::{Error, Result};
use crate::exactalg::rational::{render_rational, Rational};
use num::bigint::BigInt;
use num::{One, Signed, Zero};

/// Dense univariate polynomial; `coeffs[k]` is the coefficient of the k-th power.
/// Trailing zeros are always trimmed, so `deg` is well defined ( -1 for the zero polynomial).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        UniPoly::new(vec![c])
    }

    /// The monomial c * x^k.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        UniPoly::new(coeffs)
    }

    /// x + c (handy for linear factors).
    pub fn x_plus(c: Rational) -> Self {
        UniPoly::new(vec![c, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; -1 for the zero polynomial.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
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
        UniPoly::new(coeffs)
    }

    pub fn scale(&self, c: &Rational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, k: usize) -> UniPoly {
        let mut acc = UniPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division: self = q * d + r with deg r < deg d.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.clone();
        let mut q = UniPoly::zero();
        let dlead = d.leading();
        let ddeg = d.deg();
        while !r.is_zero() && r.deg() >= ddeg {
            let k = (r.deg() - ddeg) as usize;
            let c = r.leading() / dlead.clone();
            let term = UniPoly::monomial(c, k);
            q = q.add(&term);
            r = r.sub(&term.mul(d));
        }
        (q, r)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let lead = a.leading();
            a.scale(&lead.recip())
        }
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        UniPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * Rational::from_integer((k + 1).into()))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Squarefree part: self / gcd(self, self').
    pub fn squarefree_part(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let g = self.gcd(&self.derivative());
        let (q, r) = self.div_rem(&g);
        debug_assert!(r.is_zero());
        let lead = q.leading();
        q.scale(&lead.recip())
    }

    /// Render with an arbitrary variable name, highest power first.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let abs = c.abs();
            let body = if k == 0 {
                render_rational(&abs)
            } else {
                let power = if k == 1 {
                    var.to_string()
                } else {
                    format!("{var}^{k}")
                };
                if abs.is_one() {
                    power
                } else {
                    format!("{}*{}", render_rational(&abs), power)
                }
            };
            if parts.is_empty() {
                parts.push(if c.is_negative() {
                    format!("-{body}")
                } else {
                    body
                });
            } else {
                parts.push(format!("{} {}", if c.is_negative() { "-" } else { "+" }, body));
            }
        }
        parts.join(" ")
    }
}

/// Complete factorization into rational linear factors times a root-free remainder.
///
/// Returns (roots with multiplicities, remainder). The product of the linear
/// factors (x - root)^mult, the remainder and the leading coefficient
/// reassembles the input exactly. The remainder is reported, never dropped.
pub fn rational_root_factor(p: &UniPoly) -> Result<(Vec<(Rational, usize)>, UniPoly)> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let lead = p.leading();
    let mut rest = p.scale(&lead.recip());
    let mut roots: Vec<(Rational, usize)> = Vec::new();

    // Strip factors of x.
    let mut zero_mult = 0;
    while !rest.is_zero() && rest.coeff(0).is_zero() {
        rest = UniPoly::new(rest.coeffs()[1..].to_vec());
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Rational::zero(), zero_mult));
    }

    if !rest.is_constant() {
        // Scale to a primitive integer polynomial a_n x^n + ... + a_0, then
        // monicize with y = a_n x: q(y) = y^n + sum a_i a_n^{n-1-i} y^i.
        // Rational roots of the input are y/a_n with y an integer divisor of
        // q(0) = a_0 a_n^{n-1}, bounded by the Lagrange root bound of q.
        let mut denom_lcm = BigInt::one();
        for c in rest.coeffs() {
            denom_lcm = num::integer::lcm(denom_lcm, c.denom().clone());
        }
        let mut int_poly: Vec<BigInt> = rest
            .coeffs()
            .iter()
            .map(|c| c.numer() * (&denom_lcm / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for c in &int_poly {
            content = num::integer::gcd(content, c.clone());
        }
        if content > BigInt::one() {
            for c in &mut int_poly {
                *c /= &content;
            }
        }
        let n = int_poly.len() - 1;
        let leading = int_poly[n].clone();
        let monic: Vec<BigInt> = (0..=n)
            .map(|i| {
                if i == n {
                    BigInt::one()
                } else {
                    &int_poly[i] * num::pow::pow(leading.clone(), n - 1 - i)
                }
            })
            .collect();
        // Lagrange bound: |y| <= 2 max_i |q_{n-i}|^{1/i}.
        use num::integer::Roots;
        let mut bound = BigInt::one();
        for i in 1..=n {
            let a = monic[n - i].abs();
            if a.is_zero() {
                continue;
            }
            let root = a.nth_root(i as u32) + 1;
            bound = bound.max(root);
        }
        bound *= 2;
        let factors = crate::exactalg::rational::merge_factorizations(
            &crate::exactalg::rational::factorize(&monic[0]),
            &[],
        );
        let eval_monic = |y: &BigInt| -> BigInt {
            let mut acc = BigInt::zero();
            for c in monic.iter().rev() {
                acc = acc * y + c;
            }
            acc
        };
        for d in crate::exactalg::rational::divisors_up_to(&factors, &bound) {
            for y in [d.clone(), -d] {
                if !eval_monic(&y).is_zero() {
                    continue;
                }
                let cand = Rational::new(y, leading.clone());
                let mut mult = 0;
                while rest.eval(&cand).is_zero() {
                    let factor = UniPoly::x_plus(-cand.clone());
                    let (q, r) = rest.div_rem(&factor);
                    debug_assert!(r.is_zero());
                    rest = q;
                    mult += 1;
                }
                if mult > 0 {
                    roots.push((cand, mult));
                }
            }
        }
    }

    roots.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((roots, rest.scale(&lead)))
}

/// The n-th cyclotomic polynomial, by exact recursive division of x^n - 1.
pub fn cyclotomic(n: usize) -> UniPoly {
    assert!(n >= 1);
    let mut num = UniPoly::monomial(Rational::one(), n).sub(&UniPoly::one());
    for d in 1..n {
        if n % d == 0 {
            let (q, r) = num.div_rem(&cyclotomic(d));
            debug_assert!(r.is_zero());
            num = q;
        }
    }
    num
}

/// Rational function num/den over Q, kept reduced with monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFun {
    pub num: UniPoly,
    pub den: UniPoly,
}

impl RatFun {
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RatFun { num, den };
        r.reduce();
        r
    }

    pub fn zero() -> Self {
        RatFun {
            num: UniPoly::zero(),
            den: UniPoly::one(),
        }
    }

    pub fn one() -> Self {
        RatFun {
            num: UniPoly::one(),
            den: UniPoly::one(),
        }
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFun {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = UniPoly::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.deg() > 0 {
            self.num = self.num.div_rem(&g).0;
            self.den = self.den.div_rem(&g).0;
        }
        let lead = self.den.leading();
        if !lead.is_one() {
            let inv = lead.recip();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        RatFun::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        RatFun::new(
            self.num.mul(&other.den).sub(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        RatFun::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn recip(&self) -> RatFun {
        assert!(!self.is_zero(), "division by zero rational function");
        RatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    /// True when the denominator is a nonzero constant.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn render(&self, var: &str) -> String {
        if self.den.is_constant() {
            self.num.render(var)
        } else {
            format!("({})/({})", self.num.render(var), self.den.render(var))
        }
    }
}
