//! Hilbert symbols, discriminant square classes and Hasse invariants of
//! diagonal forms over Q.
//!
//! The Hasse invariant here is the product over i < j of (a_i, a_j)_v.
//! The alternative i <= j convention exists in the literature; all values in
//! this crate use the strict product.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::Place;
use crate::rational::{
    factorize, legendre, padic_unit_part, padic_valuation, residue_mod, squarefree_part, Rational,
};

/// Square class of Q*/(Q*)^2, canonically a signed square-free integer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquareClass(BigInt);

impl SquareClass {
    pub fn of(r: &Rational) -> Result<SquareClass> {
        Ok(SquareClass(squarefree_part(r)?))
    }

    pub fn representative(&self) -> &BigInt {
        &self.0
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The epsilon character: (u-1)/2 mod 2 on 2-adic units.
fn eps2(u: &Rational) -> Result<u8> {
    let m = residue_mod(u, &BigInt::from(4))?;
    Ok(if m == BigInt::from(3) { 1 } else { 0 })
}

/// The omega character: (u^2-1)/8 mod 2 on 2-adic units.
fn omega2(u: &Rational) -> Result<u8> {
    let m = residue_mod(u, &BigInt::from(8))?;
    Ok(if m == BigInt::one() || m == BigInt::from(7) {
        0
    } else {
        1
    })
}

/// Hilbert symbol (a, b)_v over the completion of Q at v.
pub fn hilbert_symbol(a: &Rational, b: &Rational, place: Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::domain("hilbert_symbol with zero argument"));
    }
    match place {
        Place::Infinity => Ok(if a.is_negative() && b.is_negative() {
            -1
        } else {
            1
        }),
        Place::Finite(2) => {
            let alpha = padic_valuation(a, 2)? as u8 & 1;
            let beta = padic_valuation(b, 2)? as u8 & 1;
            let u = padic_unit_part(a, 2)?;
            let w = padic_unit_part(b, 2)?;
            let e = eps2(&u)? * eps2(&w)? + alpha * omega2(&w)? + beta * omega2(&u)?;
            Ok(if e % 2 == 0 { 1 } else { -1 })
        }
        Place::Finite(p) => {
            let alpha = padic_valuation(a, p)? as u8 & 1;
            let beta = padic_valuation(b, p)? as u8 & 1;
            let u = residue_mod(&padic_unit_part(a, p)?, &BigInt::from(p))?;
            let w = residue_mod(&padic_unit_part(b, p)?, &BigInt::from(p))?;
            let mut s = 1i32;
            if alpha & beta == 1 {
                s *= legendre(&BigInt::from(-1), p);
            }
            if beta == 1 {
                s *= legendre(&u, p);
            }
            if alpha == 1 {
                s *= legendre(&w, p);
            }
            Ok(s)
        }
    }
}

fn check_coeffs(coeffs: &[Rational]) -> Result<()> {
    if coeffs.is_empty() {
        return Err(Error::domain("empty coefficient list"));
    }
    if coeffs.iter().any(|c| c.is_zero()) {
        return Err(Error::domain("zero coefficient"));
    }
    Ok(())
}

/// Square class of the product of the diagonal coefficients.
pub fn discriminant_class(coeffs: &[Rational]) -> Result<SquareClass> {
    check_coeffs(coeffs)?;
    let prod = coeffs.iter().fold(Rational::one(), |acc, c| acc * c);
    SquareClass::of(&prod)
}

/// Hasse invariant: product over i < j of (a_i, a_j)_v.
pub fn hasse_invariant(coeffs: &[Rational], place: Place) -> Result<i32> {
    check_coeffs(coeffs)?;
    let mut s = 1;
    for i in 0..coeffs.len() {
        for j in i + 1..coeffs.len() {
            s *= hilbert_symbol(&coeffs[i], &coeffs[j], place)?;
        }
    }
    Ok(s)
}

/// A finite set of places outside of which all Hilbert symbols among the
/// coefficients are +1: infinity, 2, and the odd primes dividing some
/// coefficient's square-free part.
pub fn relevant_places(coeffs: &[Rational]) -> Result<BTreeSet<Place>> {
    check_coeffs(coeffs)?;
    let mut set = BTreeSet::new();
    set.insert(Place::Infinity);
    set.insert(Place::Finite(2));
    for c in coeffs {
        let sf = squarefree_part(c)?.abs();
        for (p, _) in factorize(&sf) {
            let p: u64 = p.to_string().parse().map_err(|_| {
                Error::domain("coefficient prime exceeds supported place size")
            })?;
            if p != 2 {
                set.insert(Place::Finite(p));
            }
        }
    }
    Ok(set)
}

/// Equivalence fingerprint of a form over Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantProfile {
    pub rank: usize,
    /// Signature (positive count, negative count) per real embedding.
    pub signatures: Vec<(usize, usize)>,
    pub disc: SquareClass,
    /// Hasse invariants over the relevant places; +1 elsewhere.
    pub hasse: BTreeMap<Place, i32>,
}

impl InvariantProfile {
    /// Profile of a diagonal form over Q.
    pub fn of_diagonal(coeffs: &[Rational]) -> Result<InvariantProfile> {
        check_coeffs(coeffs)?;
        let plus = coeffs.iter().filter(|c| c.is_positive()).count();
        let minus = coeffs.len() - plus;
        let disc = discriminant_class(coeffs)?;
        let mut hasse = BTreeMap::new();
        for place in relevant_places(coeffs)? {
            hasse.insert(place, hasse_invariant(coeffs, place)?);
        }
        let profile = InvariantProfile {
            rank: coeffs.len(),
            signatures: vec![(plus, minus)],
            disc,
            hasse,
        };
        // Hilbert reciprocity over all places; places outside the map are +1
        debug_assert_eq!(profile.hasse.values().product::<i32>(), 1);
        Ok(profile)
    }

    pub fn hasse_at(&self, place: Place) -> i32 {
        *self.hasse.get(&place).unwrap_or(&1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    fn rats(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(
            hilbert_symbol(&rat_int(21), &rat_int(-3), Place::Finite(3)).unwrap(),
            1
        );
        for place in [Place::Infinity, Place::Finite(2), Place::Finite(5)] {
            assert_eq!(hilbert_symbol(&rat_int(1), &rat_int(-30), place).unwrap(), 1);
        }
        assert_eq!(
            hilbert_symbol(&rat_int(-1), &rat_int(-1), Place::Infinity).unwrap(),
            -1
        );
        assert_eq!(
            hilbert_symbol(&rat_int(-1), &rat_int(-1), Place::Finite(2)).unwrap(),
            -1
        );
        assert!(hilbert_symbol(&rat_int(0), &rat_int(1), Place::Infinity).is_err());
    }

    #[test]
    fn hilbert_minus_one_minus_one_2adic_brute() {
        // x^2 + y^2 + z^2 ≡ 0 mod 16 has no solution with some coordinate odd
        let mut found = false;
        for x in 0..16u32 {
            for y in 0..16u32 {
                for z in 0..16u32 {
                    if (x * x + y * y + z * z) % 16 == 0 && (x | y | z) & 1 == 1 {
                        found = true;
                    }
                }
            }
        }
        assert!(!found);
    }

    #[test]
    fn disc_examples() {
        assert_eq!(
            *discriminant_class(&rats(&[1, 1, 1, -7])).unwrap().representative(),
            BigInt::from(-7)
        );
        assert_eq!(
            *discriminant_class(&rats(&[21, 1, 1, -3])).unwrap().representative(),
            BigInt::from(-7)
        );
        assert_eq!(
            *discriminant_class(&rats(&[1, 1, 1, 1, -1])).unwrap().representative(),
            BigInt::from(-1)
        );
        assert!(discriminant_class(&[]).is_err());
    }

    #[test]
    fn hasse_examples() {
        for place in [
            Place::Infinity,
            Place::Finite(2),
            Place::Finite(3),
            Place::Finite(7),
        ] {
            assert_eq!(hasse_invariant(&rats(&[1, 1, 1, -7]), place).unwrap(), 1);
            assert_eq!(hasse_invariant(&rats(&[21, 1, 1, -3]), place).unwrap(), 1);
        }
        assert_eq!(hasse_invariant(&rats(&[5]), Place::Finite(5)).unwrap(), 1);
    }

    #[test]
    fn relevant_place_examples() {
        let s = relevant_places(&rats(&[1, 1, 1, -7])).unwrap();
        let expect: BTreeSet<_> =
            [Place::Infinity, Place::Finite(2), Place::Finite(7)].into();
        assert_eq!(s, expect);
        let s = relevant_places(&rats(&[21, 1, 1, -3])).unwrap();
        let expect: BTreeSet<_> = [
            Place::Infinity,
            Place::Finite(2),
            Place::Finite(3),
            Place::Finite(7),
        ]
        .into();
        assert_eq!(s, expect);
    }
}
