//! Exact rational arithmetic helpers: square-free decomposition, p-adic
//! valuations, square testing and Legendre symbols.
//!
//! All inputs are desk-scale; integer factorization is plain trial division.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, the coefficient domain over Q.
pub type Rational = num_rational::BigRational;

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse "p/q" or "n" into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    // tolerate unicode minus from typeset sources
    let s = s.replace('\u{2212}', "-");
    let mk = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::parse(format!("invalid integer: {t:?}")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(mk(&s)?)),
        Some((n, d)) => {
            let den = mk(d)?;
            if den.is_zero() {
                return Err(Error::parse("zero denominator"));
            }
            Ok(Rational::new(mk(n)?, den))
        }
    }
}

/// Format as "p/q", or plain "n" for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Trial-division factorization of a positive integer.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(n.is_positive(), "factorize expects a positive integer");
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0u32;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

/// Square-free part of a nonzero integer, with cofactor: n = s * t^2.
fn squarefree_part_int(n: &BigInt) -> (BigInt, BigInt) {
    let mut sf = BigInt::one();
    let mut t = BigInt::one();
    for (p, e) in factorize(&n.abs()) {
        if e % 2 == 1 {
            sf *= &p;
        }
        t *= p.pow(e / 2);
    }
    if n.sign() == Sign::Minus {
        sf = -sf;
    }
    (sf, t)
}

/// Decompose r = s * t^2 with s a signed square-free integer and t rational.
pub fn squarefree_decompose(r: &Rational) -> Result<(BigInt, Rational)> {
    if r.is_zero() {
        return Err(Error::domain("squarefree_decompose(0)"));
    }
    // r = n/d = (n*d)/d^2, so the square class is that of n*d.
    let nd = r.numer() * r.denom();
    let (s, t) = squarefree_part_int(&nd);
    let t = Rational::new(t, r.denom().clone());
    debug_assert_eq!(Rational::from_integer(s.clone()) * &t * &t, *r);
    Ok((s, t))
}

/// Signed square-free representative of the square class of r.
pub fn squarefree_part(r: &Rational) -> Result<BigInt> {
    Ok(squarefree_decompose(r)?.0)
}

/// p-adic valuation of a nonzero rational.
pub fn padic_valuation(r: &Rational, p: u64) -> Result<i64> {
    if r.is_zero() {
        return Err(Error::domain("padic_valuation(0)"));
    }
    let p = BigInt::from(p);
    let val = |mut n: BigInt| -> i64 {
        let mut v = 0;
        n = n.abs();
        while (&n % &p).is_zero() {
            n /= &p;
            v += 1;
        }
        v
    };
    Ok(val(r.numer().clone()) - val(r.denom().clone()))
}

/// Unit part u of r = p^v * u.
pub fn padic_unit_part(r: &Rational, p: u64) -> Result<Rational> {
    let v = padic_valuation(r, p)?;
    let pv = BigInt::from(p).pow(v.unsigned_abs() as u32);
    let pk = if v >= 0 {
        Rational::from_integer(pv)
    } else {
        Rational::new(BigInt::one(), pv)
    };
    Ok(r / pk)
}

/// Residue of a p-integral rational modulo m (denominator must be prime to m).
pub fn residue_mod(r: &Rational, m: &BigInt) -> Result<BigInt> {
    let num = r.numer().mod_floor(m);
    let den = r.denom().mod_floor(m);
    let inv = mod_inverse(&den, m)
        .ok_or_else(|| Error::domain(format!("denominator not invertible mod {m}")))?;
    Ok((num * inv).mod_floor(m))
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Legendre symbol (a|p) for odd prime p, via Euler's criterion.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    debug_assert!(p > 2 && is_prime(p), "legendre needs an odd prime");
    let p = BigInt::from(p);
    let a = a.mod_floor(&p);
    if a.is_zero() {
        return 0;
    }
    let e = (&p - 1u32) / 2u32;
    let r = a.modpow(&e, &p);
    if r.is_one() {
        1
    } else {
        -1
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// True iff r is the square of a rational.
pub fn is_square_in_q(r: &Rational) -> bool {
    if r.is_zero() {
        return true;
    }
    if r.is_negative() {
        return false;
    }
    is_square_int(r.numer()) && is_square_int(r.denom())
}

pub fn is_square_int(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.sqrt();
    &(&s * &s) == n
}

/// Exact integer square root of a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Result<BigInt> {
    let s = n.sqrt();
    if &(&s * &s) == n {
        Ok(s)
    } else {
        Err(Error::domain(format!("{n} is not a perfect square")))
    }
}
