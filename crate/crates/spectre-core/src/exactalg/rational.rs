//! Arbitrary-precision rational numbers.
//!
//! All arithmetic in this crate is exact. `Rational` is `num`'s big rational,
//! which keeps values reduced to lowest terms with a positive denominator.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Rational = BigRational;

/// `p/q` from machine integers.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a rational.
pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Floor of a rational as a machine integer.
pub fn floor_i64(r: &Rational) -> i64 {
    let f = r.floor();
    let (num, _) = f.into();
    i64::try_from(&num).expect("rational floor out of i64 range")
}

/// Fractional part in [0, 1).
pub fn frac_part(r: &Rational) -> Rational {
    r - r.floor()
}

/// Parse "p/q", "p" or "-p/q" into a rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidRational(text.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|_| bad())?;
        let den: BigInt = q.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Rational::new(num, den))
    } else {
        let num: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(num))
    }
}

/// Render as "p/q" ("p" when the denominator is 1).
pub fn render_rational(r: &Rational) -> String {
    r.to_string()
}

/// Prime factorization of a nonzero integer (absolute value): trial division
/// by small primes, then Miller-Rabin plus Pollard rho for large cofactors.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    if n <= BigInt::one() {
        return factors;
    }
    let push = |p: BigInt, factors: &mut Vec<(BigInt, u32)>| {
        if let Some(last) = factors.last_mut() {
            if last.0 == p {
                last.1 += 1;
                return;
            }
        }
        factors.push((p, 1));
    };
    for small in 2u64.. {
        if small > 100_000 {
            break;
        }
        let p = BigInt::from(small);
        if &p * &p > n {
            break;
        }
        while (&n % &p).is_zero() {
            n /= &p;
            push(p.clone(), &mut factors);
        }
    }
    if n > BigInt::one() {
        let mut stack = vec![n];
        let mut big: Vec<BigInt> = Vec::new();
        while let Some(m) = stack.pop() {
            if is_probable_prime(&m) {
                big.push(m);
            } else {
                let d = pollard_rho(&m);
                stack.push(&m / &d);
                stack.push(d);
            }
        }
        big.sort();
        for p in big {
            push(p, &mut factors);
        }
    }
    factors.sort();
    factors
}

fn is_probable_prime(n: &BigInt) -> bool {
    use num::Integer;
    if n < &BigInt::from(2) {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = BigInt::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    // Miller-Rabin with the deterministic base set for n < 3.3 * 10^24.
    let one = BigInt::one();
    let n_minus = n - &one;
    let s = n_minus.trailing_zeros().unwrap_or(0);
    let d = &n_minus >> s;
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == n_minus {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2), n);
            if x == n_minus {
                continue 'bases;
            }
        }
        return false;
    }
    let _ = <BigInt as Integer>::is_even(n);
    true
}

fn pollard_rho(n: &BigInt) -> BigInt {
    use num::Integer;
    if <BigInt as Integer>::is_even(n) {
        return BigInt::from(2);
    }
    let one = BigInt::one();
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut x = BigInt::from(2);
        let mut y = BigInt::from(2);
        let mut d = BigInt::one();
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            d = num::integer::gcd((&x - &y).abs(), n.clone());
        }
        if &d != n {
            return d;
        }
        c += 1;
    }
}

/// Positive divisors of a nonzero integer, in increasing order.
pub fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut divs = vec![BigInt::one()];
    for (p, e) in factorize(n) {
        let current = divs.clone();
        let mut power = BigInt::one();
        for _ in 0..e {
            power *= &p;
            for d in &current {
                divs.push(d * &power);
            }
        }
    }
    divs.sort();
    divs.dedup();
    divs
}

/// Positive divisors of the product of the given factorizations that do not
/// exceed `bound`, in increasing order. Keeps the enumeration small when the
/// full divisor set would be huge.
pub fn divisors_up_to(factors: &[(BigInt, u32)], bound: &BigInt) -> Vec<BigInt> {
    let mut divs: Vec<BigInt> = Vec::new();
    fn rec(
        factors: &[(BigInt, u32)],
        idx: usize,
        acc: BigInt,
        bound: &BigInt,
        out: &mut Vec<BigInt>,
    ) {
        if &acc > bound {
            return;
        }
        if idx == factors.len() {
            out.push(acc);
            return;
        }
        let (p, e) = &factors[idx];
        let mut cur = acc;
        for k in 0..=*e {
            rec(factors, idx + 1, cur.clone(), bound, out);
            if k < *e {
                cur *= p;
                if &cur > bound {
                    break;
                }
            }
        }
    }
    rec(factors, 0, BigInt::one(), bound, &mut divs);
    divs.sort();
    divs.dedup();
    divs
}

/// Merge two prime factorizations (multiplying the underlying integers).
pub fn merge_factorizations(
    a: &[(BigInt, u32)],
    b: &[(BigInt, u32)],
) -> Vec<(BigInt, u32)> {
    let mut out: std::collections::BTreeMap<BigInt, u32> = Default::default();
    for (p, e) in a.iter().chain(b) {
        *out.entry(p.clone()).or_insert(0) += e;
    }
    out.into_iter().collect()
}
