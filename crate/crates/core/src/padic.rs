//! Places of Q and p-adic square predicates on rationals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{
    is_prime, legendre, padic_unit_part, padic_valuation, residue_mod, Rational,
};

/// A place of Q: the archimedean place or a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    /// Finite place p.
    Finite(u64),
    /// The real place.
    Infinity,
}

impl Place {
    pub fn finite(p: u64) -> Result<Place> {
        if is_prime(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::domain(format!("{p} is not prime")))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl std::str::FromStr for Place {
    type Err = Error;
    fn from_str(s: &str) -> Result<Place> {
        match s {
            "inf" | "infinity" | "oo" => Ok(Place::Infinity),
            _ => {
                let p: u64 = s
                    .parse()
                    .map_err(|_| Error::parse(format!("bad place: {s:?}")))?;
                Place::finite(p)
            }
        }
    }
}

/// True iff r is a square in the completion at `place`.
///
/// Finite p: the valuation must be even and the unit part a square unit
/// (quadratic residue mod p for odd p, congruent to 1 mod 8 for p = 2).
pub fn is_square_in_qp(r: &Rational, place: Place) -> Result<bool> {
    if r.is_zero() {
        return Err(Error::domain("is_square_in_qp(0)"));
    }
    match place {
        Place::Infinity => Ok(r.is_positive()),
        Place::Finite(p) => {
            if padic_valuation(r, p)? % 2 != 0 {
                return Ok(false);
            }
            let u = padic_unit_part(r, p)?;
            if p == 2 {
                let m = residue_mod(&u, &BigInt::from(8))?;
                Ok(m == BigInt::from(1))
            } else {
                let m = residue_mod(&u, &BigInt::from(p))?;
                Ok(legendre(&m, p) == 1)
            }
        }
    }
}
