//! Sparse multivariate polynomials over Q with exponent-vector monomials.

use crate::error::{Error, Result};
use crate::exactalg::rational::{render_rational, Rational};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector; length equals the ambient variable count.
///
/// `Ord` is graded reverse lexicographic, the default order everywhere in
/// this crate (rendering, Groebner bases, standard monomial enumeration).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// other / self, assuming divisibility.
    pub fn div_into(&self, other: &Monomial) -> Monomial {
        Monomial(
            other
                .0
                .iter()
                .zip(&self.0)
                .map(|(b, a)| b - a)
                .collect(),
        )
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn is_coprime_with(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Graded reverse lexicographic comparison.
    pub fn grevlex(&self, other: &Monomial) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {
                for (a, b) in self.0.iter().zip(&other.0).rev() {
                    match a.cmp(b) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => {}
                    }
                }
                Ordering::Equal
            }
            o => o,
        }
    }

    /// Lexicographic comparison (first variable dominates).
    pub fn lex(&self, other: &Monomial) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.cmp(b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grevlex(other)
    }
}

/// Sparse polynomial: map from monomials to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    pub vars: Vec<String>,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &[String]) -> Self {
        MultiPoly {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[String], c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn one(vars: &[String]) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn monomial_term(vars: &[String], m: Monomial, c: Rational) -> Self {
        assert_eq!(m.0.len(), vars.len());
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var(vars: &[String], index: usize) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[index] = 1;
        Self::monomial_term(vars, Monomial(exps), Rational::one())
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() == 0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Exactly the stored monomials (nonzero coefficients), grevlex ascending.
    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Leading (grevlex-largest) term.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch);
        }
        Ok(())
    }

    pub fn insert_term(&mut self, m: Monomial, c: Rational) {
        assert_eq!(m.0.len(), self.nvars());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        let mut out = MultiPoly::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = &*v * c;
        }
        out
    }

    /// Multiply by c * m in one pass.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.vars);
        if c.is_zero() {
            return out;
        }
        for (mm, cc) in &self.terms {
            out.terms.insert(mm.mul(m), cc * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(&self.vars);
        for _ in 0..k {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Exact partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Result<MultiPoly> {
        if i >= self.nvars() {
            return Err(Error::IndexOutOfRange {
                index: i,
                nvars: self.nvars(),
            });
        }
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            if m.0[i] == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            let e = exps[i];
            exps[i] -= 1;
            out.insert_term(Monomial(exps), c * Rational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    /// Substitute 0 for every variable in `kill` (restriction to a coordinate subspace).
    pub fn restrict_to_zero(&self, kill: &[usize]) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            if kill.iter().all(|&i| m.0[i] == 0) {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Canonical text form; parses back to the same polynomial.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.total_degree() == 0 {
                factors.push(render_rational(&abs));
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    factors.push(self.vars[i].clone());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.vars[i], e));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Parse polynomial text over the given variables.
///
/// Grammar: terms separated by `+`/`-`; a term is an optional rational
/// coefficient (`3`, `1/2`) followed by variable powers (`x`, `x^3`),
/// juxtaposed or `*`-separated. `^` binds tighter than multiplication.
pub fn parse(text: &str, vars: &[String]) -> Result<MultiPoly> {
    Parser {
        chars: text.char_indices().collect(),
        pos: 0,
        vars,
        text,
    }
    .parse()
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    vars: &'a [String],
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        let pos = self
            .chars
            .get(self.pos)
            .map(|&(b, _)| b)
            .unwrap_or(self.text.len());
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn parse(mut self) -> Result<MultiPoly> {
        let mut acc = MultiPoly::zero(self.vars);
        self.skip_ws();
        if self.peek().is_none() {
            return Err(self.err("empty polynomial"));
        }
        let mut sign = Rational::one();
        if self.peek() == Some('-') {
            self.bump();
            sign = -sign;
        } else if self.peek() == Some('+') {
            self.bump();
        }
        loop {
            let term = self.parse_term()?;
            acc = acc.add(&term.scale(&sign)).expect("same ring");
            self.skip_ws();
            match self.peek() {
                None => break,
                Some('+') => {
                    self.bump();
                    sign = Rational::one();
                }
                Some('-') => {
                    self.bump();
                    sign = -Rational::one();
                }
                Some(_) => return Err(self.err("expected `+` or `-` between terms")),
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<MultiPoly> {
        let mut coeff = Rational::one();
        let mut exps = vec![0u32; self.vars.len()];
        let mut any = false;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    coeff *= self.parse_rational()?;
                    any = true;
                }
                Some(c) if c.is_alphabetic() || c == '_' => {
                    let (idx, e) = self.parse_var_power()?;
                    exps[idx] += e;
                    any = true;
                }
                Some('*') => {
                    self.bump();
                }
                _ => break,
            }
        }
        if !any {
            return Err(self.err("expected a term"));
        }
        Ok(MultiPoly::monomial_term(self.vars, Monomial(exps), coeff))
    }

    fn parse_uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        s.parse().map_err(|_| self.err("invalid number"))
    }

    fn parse_rational(&mut self) -> Result<Rational> {
        let num = self.parse_uint()?;
        self.skip_ws();
        if self.peek() == Some('/') {
            self.bump();
            self.skip_ws();
            let den = self.parse_uint()?;
            if den.is_zero() {
                return Err(self.err("zero denominator"));
            }
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::from_integer(num))
        }
    }

    fn parse_var_power(&mut self) -> Result<(usize, u32)> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            self.bump();
        }
        let name: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        let idx = self
            .vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
        self.skip_ws();
        let mut e = 1u32;
        if self.peek() == Some('^') {
            self.bump();
            self.skip_ws();
            let n = self.parse_uint()?;
            e = u32::try_from(&n).map_err(|_| self.err("exponent too large"))?;
        }
        Ok((idx, e))
    }
}

pub fn var_list(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
