//! Exact arithmetic in Q and quadratic extension towers of height at most 2.
//!
//! Supported fields: Q, real quadratic Q(sqrt(delta)) with delta a positive
//! square-free integer, the Gaussian field Q(i) (delta = -1), and one further
//! square root over Q(i) such as sqrt(2+i). Elements are stored as a + b*sqrt(delta)
//! with base-field coordinates, collapsed to the base whenever b = 0, so the
//! representation is canonical and structural equality is semantic equality.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{is_square_in_q, squarefree_part, Rational};

/// Descriptor of a supported coefficient field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldDescriptor {
    Q,
    /// Quadratic extension base(sqrt(delta)); delta is an element of the base.
    QuadExt {
        base: Box<FieldDescriptor>,
        delta: FieldElement,
    },
}

impl FieldDescriptor {
    /// Q(sqrt(delta)) for a square-free integer delta (use -1 for Q(i)).
    pub fn quadratic(delta: i64) -> Result<FieldDescriptor> {
        let d = BigInt::from(delta);
        if delta == 0 || delta == 1 {
            return Err(Error::domain("delta must not be a square"));
        }
        if delta != -1 && delta < 0 {
            return Err(Error::domain(
                "negative delta other than -1 (Gaussian) is unsupported",
            ));
        }
        if squarefree_part(&Rational::from_integer(d.clone()))? != d {
            return Err(Error::domain(format!("delta {delta} is not square-free")));
        }
        Ok(FieldDescriptor::QuadExt {
            base: Box::new(FieldDescriptor::Q),
            delta: FieldElement::from_int(delta),
        })
    }

    pub fn gaussian() -> FieldDescriptor {
        FieldDescriptor::quadratic(-1).unwrap()
    }

    /// Q(i)(sqrt(delta)) for delta in Q(i); the only supported height-2 tower.
    pub fn gaussian_tower(delta: FieldElement) -> Result<FieldDescriptor> {
        if delta.level() > 1 {
            return Err(Error::UnsupportedField("tower height > 2".into()));
        }
        if gaussian_is_square(&delta)? {
            return Err(Error::domain("delta is a square in Q(i)"));
        }
        Ok(FieldDescriptor::QuadExt {
            base: Box::new(FieldDescriptor::gaussian()),
            delta,
        })
    }

    pub fn height(&self) -> u8 {
        match self {
            FieldDescriptor::Q => 0,
            FieldDescriptor::QuadExt { base, .. } => base.height() + 1,
        }
    }

    /// Whether this is Q or a real quadratic field (has ordered real embeddings).
    pub fn is_real(&self) -> bool {
        match self {
            FieldDescriptor::Q => true,
            FieldDescriptor::QuadExt { base, delta } => {
                **base == FieldDescriptor::Q
                    && delta
                        .as_rational()
                        .map(|d| d.is_positive())
                        .unwrap_or(false)
            }
        }
    }
}

/// Is z = a+bi a square in Q(i)?
fn gaussian_is_square(z: &FieldElement) -> Result<bool> {
    let (a, b) = z.gaussian_parts()?;
    if b.is_zero() {
        // (x+yi)^2 rational means x*y = 0: either a = x^2 or a = -(y^2)
        return Ok(is_square_in_q(&a) || is_square_in_q(&(-a)));
    }
    // x^2 - y^2 = a, 2xy = b: t = x^2 satisfies t^2 - a t - b^2/4 = 0
    let disc = &a * &a + &b * &b;
    if !is_square_in_q(&disc) {
        return Ok(false);
    }
    let root = Rational::new(disc.numer().sqrt(), disc.denom().sqrt());
    let two = Rational::from_integer(BigInt::from(2));
    for t in [(&a + &root) / &two, (&a - &root) / &two] {
        if t.is_positive() && is_square_in_q(&t) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exact element of Q or of a quadratic extension tower.
#[derive(Clone, PartialEq, Eq)]
pub enum FieldElement {
    Rat(Rational),
    Ext {
        a: Box<FieldElement>,
        b: Box<FieldElement>,
        delta: Box<FieldElement>,
    },
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rat(r) => write!(f, "{r}"),
            FieldElement::Ext { a, b, delta } => {
                write!(f, "({a:?} + {b:?}*sqrt({delta:?}))")
            }
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FieldElement {
    pub fn from_rational(r: Rational) -> FieldElement {
        FieldElement::Rat(r)
    }

    pub fn from_int(n: i64) -> FieldElement {
        FieldElement::Rat(Rational::from_integer(BigInt::from(n)))
    }

    /// a + b*sqrt(delta), collapsed if b = 0.
    pub fn ext(a: FieldElement, b: FieldElement, delta: FieldElement) -> FieldElement {
        if b.is_zero() {
            a
        } else {
            FieldElement::Ext {
                a: Box::new(a),
                b: Box::new(b),
                delta: Box::new(delta),
            }
        }
    }

    /// sqrt(delta) as an element.
    pub fn sqrt_of(delta: FieldElement) -> FieldElement {
        FieldElement::ext(
            FieldElement::zero(),
            FieldElement::one(),
            delta,
        )
    }

    /// a + b*i.
    pub fn gaussian(a: Rational, b: Rational) -> FieldElement {
        FieldElement::ext(
            FieldElement::Rat(a),
            FieldElement::Rat(b),
            FieldElement::from_int(-1),
        )
    }

    pub fn as_rational(&self) -> Result<Rational> {
        match self {
            FieldElement::Rat(r) => Ok(r.clone()),
            _ => Err(Error::domain(format!("{self:?} is not rational"))),
        }
    }

    /// (re, im) for an element of Q(i); rationals count as purely real.
    pub fn gaussian_parts(&self) -> Result<(Rational, Rational)> {
        match self {
            FieldElement::Rat(r) => Ok((r.clone(), Rational::zero())),
            FieldElement::Ext { a, b, delta } => {
                if delta.as_rational()? != -Rational::one() {
                    return Err(Error::domain("not an element of Q(i)"));
                }
                Ok((a.as_rational()?, b.as_rational()?))
            }
        }
    }

    /// Tower height of the representation: 0 for Q, 1 for Q(sqrt(d)), 2 above Q(i).
    pub fn level(&self) -> u8 {
        match self {
            FieldElement::Rat(_) => 0,
            FieldElement::Ext { delta, .. } => delta.level() + 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rat(r) => r.is_zero(),
            // Ext is normalized: b != 0, hence nonzero in a genuine extension
            FieldElement::Ext { .. } => false,
        }
    }

    pub fn zero() -> FieldElement {
        FieldElement::Rat(Rational::zero())
    }

    pub fn one() -> FieldElement {
        FieldElement::Rat(Rational::one())
    }

    fn delta_of(&self) -> Option<&FieldElement> {
        match self {
            FieldElement::Rat(_) => None,
            FieldElement::Ext { delta, .. } => Some(delta),
        }
    }

    /// Conjugation of the top extension layer: negates the sqrt coordinate.
    pub fn conj(&self) -> FieldElement {
        match self {
            FieldElement::Rat(r) => FieldElement::Rat(r.clone()),
            FieldElement::Ext { a, b, delta } => FieldElement::Ext {
                a: a.clone(),
                b: Box::new(-(**b).clone()),
                delta: delta.clone(),
            },
        }
    }

    /// Field norm to the base of the top layer: a^2 - delta*b^2.
    pub fn norm_to_base(&self) -> FieldElement {
        match self {
            FieldElement::Rat(r) => FieldElement::Rat(r * r),
            FieldElement::Ext { a, b, delta } => {
                let a2 = (**a).clone() * (**a).clone();
                let b2 = (**b).clone() * (**b).clone();
                a2 - (**delta).clone() * b2
            }
        }
    }

    /// Multiplicative inverse; None for zero.
    pub fn inv(&self) -> Option<FieldElement> {
        match self {
            FieldElement::Rat(r) => {
                if r.is_zero() {
                    None
                } else {
                    Some(FieldElement::Rat(r.recip()))
                }
            }
            FieldElement::Ext { a, b, delta } => {
                let n = self.norm_to_base();
                let ninv = n.inv()?;
                let num = FieldElement::Ext {
                    a: a.clone(),
                    b: Box::new(-(**b).clone()),
                    delta: delta.clone(),
                };
                Some(num * ninv)
            }
        }
    }

    pub fn pow(&self, e: u32) -> FieldElement {
        let mut out = FieldElement::one();
        for _ in 0..e {
            out = out * self.clone();
        }
        out
    }

    fn binop(
        x: FieldElement,
        y: FieldElement,
        f: &dyn Fn(FieldElement, FieldElement) -> FieldElement,
        mul: bool,
    ) -> FieldElement {
        use FieldElement::*;
        match (x, y) {
            (Rat(p), Rat(q)) => {
                if mul {
                    Rat(p * q)
                } else {
                    Rat(f(Rat(p), Rat(q)).as_rational().unwrap())
                }
            }
            (x, y) => {
                // promote the lower element into the higher extension layer
                let (lx, ly) = (x.level(), y.level());
                if lx < ly {
                    let d = y.delta_of().unwrap().clone();
                    return FieldElement::binop(
                        Ext {
                            a: Box::new(x),
                            b: Box::new(FieldElement::zero()),
                            delta: Box::new(d),
                        },
                        y,
                        f,
                        mul,
                    );
                }
                if ly < lx {
                    let d = x.delta_of().unwrap().clone();
                    return FieldElement::binop(
                        x,
                        Ext {
                            a: Box::new(y),
                            b: Box::new(FieldElement::zero()),
                            delta: Box::new(d),
                        },
                        f,
                        mul,
                    );
                }
                let (Ext { a, b, delta }, Ext { a: c, b: d, delta: delta2 }) = (x, y) else {
                    unreachable!("equal positive levels are both extensions")
                };
                assert_eq!(delta, delta2, "mixed field towers");
                let (a, b, c, d) = (*a, *b, *c, *d);
                if mul {
                    let dl = (*delta).clone();
                    FieldElement::ext(
                        a.clone() * c.clone() + dl.clone() * (b.clone() * d.clone()),
                        a * d + b * c,
                        dl,
                    )
                } else {
                    FieldElement::ext(f(a, c), f(b, d), *delta)
                }
            }
        }
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement::binop(
            self,
            rhs,
            &|x, y| match (x, y) {
                (FieldElement::Rat(p), FieldElement::Rat(q)) => FieldElement::Rat(p + q),
                (x, y) => x + y,
            },
            false,
        )
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self + (-rhs)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Rat(r) => FieldElement::Rat(-r),
            FieldElement::Ext { a, b, delta } => FieldElement::Ext {
                a: Box::new(-*a),
                b: Box::new(-*b),
                delta,
            },
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        FieldElement::binop(self, rhs, &|_, _| unreachable!(), true)
    }
}

impl Div for FieldElement {
    type Output = FieldElement;
    fn div(self, rhs: FieldElement) -> FieldElement {
        self * rhs.inv().expect("division by zero field element")
    }
}

impl Zero for FieldElement {
    fn zero() -> Self {
        FieldElement::zero()
    }
    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
}

impl One for FieldElement {
    fn one() -> Self {
        FieldElement::one()
    }
}

/// Exact sign of a nonzero quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn of_rational(r: &Rational) -> Result<Sign> {
        if r.is_zero() {
            Err(Error::domain("sign of zero"))
        } else if r.is_positive() {
            Ok(Sign::Positive)
        } else {
            Ok(Sign::Negative)
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

/// Exact sign of a + b*sqrt(delta) for rationals a, b and rational delta > 0.
fn sign_real_quadratic(a: &Rational, b: &Rational, delta: &Rational) -> Result<Sign> {
    if b.is_zero() {
        return Sign::of_rational(a);
    }
    if a.is_zero() {
        return Sign::of_rational(b);
    }
    if a.is_positive() == b.is_positive() {
        return Sign::of_rational(a);
    }
    // opposite signs: |a| vs |b|sqrt(delta) decided by a^2 vs delta b^2
    let a2 = a * a;
    let db2 = delta * &(b * b);
    match a2.cmp(&db2) {
        std::cmp::Ordering::Greater => Sign::of_rational(a),
        std::cmp::Ordering::Less => Sign::of_rational(b),
        std::cmp::Ordering::Equal => Err(Error::domain("sign of zero")),
    }
}

/// Signs of a nonzero element of Q(sqrt(delta)), delta > 0, at the identity
/// and conjugate real embeddings. Rationals have the same sign at both.
pub fn embedding_signs(x: &FieldElement) -> Result<(Sign, Sign)> {
    match x {
        FieldElement::Rat(r) => {
            let s = Sign::of_rational(r)?;
            Ok((s, s))
        }
        FieldElement::Ext { a, b, delta } => {
            let d = delta.as_rational().map_err(|_| {
                Error::UnsupportedField("embedding signs need a height-1 real field".into())
            })?;
            if !d.is_positive() {
                return Err(Error::UnsupportedField(
                    "no real embedding order for imaginary delta".into(),
                ));
            }
            let (a, b) = (a.as_rational()?, b.as_rational()?);
            Ok((
                sign_real_quadratic(&a, &b, &d)?,
                sign_real_quadratic(&a, &(-b), &d)?,
            ))
        }
    }
}

/// Sign at the identity embedding (plain sign for rationals).
pub fn identity_sign(x: &FieldElement) -> Result<Sign> {
    Ok(embedding_signs(x)?.0)
}

/// Membership of x in the maximal order of Q(sqrt(delta)) (delta = -1 for Z[i]).
///
/// Height-2 towers are not supported.
pub fn is_algebraic_integer(x: &FieldElement, delta: i64) -> Result<bool> {
    if x.level() > 1 {
        return Err(Error::UnsupportedField(
            "integrality only for height-1 fields".into(),
        ));
    }
    let (a, b) = match x {
        FieldElement::Rat(r) => (r.clone(), Rational::zero()),
        FieldElement::Ext { a, b, delta: d } => {
            if d.as_rational()? != Rational::from_integer(BigInt::from(delta)) {
                return Err(Error::domain("element delta does not match descriptor"));
            }
            (a.as_rational()?, b.as_rational()?)
        }
    };
    let is_int = |r: &Rational| r.denom().is_one();
    if delta.rem_euclid(4) == 1 {
        // maximal order Z[(1+sqrt(delta))/2]
        let two = Rational::from_integer(BigInt::from(2));
        Ok(is_int(&(&a * &two)) && is_int(&(&b * &two)) && is_int(&(&a - &b)))
    } else {
        Ok(is_int(&a) && is_int(&b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn sqrt2() -> FieldElement {
        FieldElement::sqrt_of(FieldElement::from_int(2))
    }

    #[test]
    fn arithmetic_basics() {
        let x = FieldElement::from_int(3) + sqrt2();
        let y = x.clone() * x.clone();
        // (3+sqrt2)^2 = 11 + 6 sqrt2
        assert_eq!(
            y,
            FieldElement::ext(
                FieldElement::from_int(11),
                FieldElement::from_int(6),
                FieldElement::from_int(2)
            )
        );
        let inv = x.inv().unwrap();
        assert_eq!(x * inv, FieldElement::one());
    }

    #[test]
    fn collapse_to_base() {
        let s = sqrt2();
        assert_eq!(s.clone() * s, FieldElement::from_int(2));
    }

    #[test]
    fn height_two_tower() {
        // s with s^2 = 2+i
        let two_plus_i = FieldElement::gaussian(rat_int(2), rat_int(1));
        let s = FieldElement::sqrt_of(two_plus_i.clone());
        assert_eq!(s.level(), 2);
        assert_eq!(s.clone() * s.clone(), two_plus_i);
        let sinv = s.inv().unwrap();
        assert_eq!(s * sinv, FieldElement::one());
    }

    #[test]
    fn conj_multiplicative() {
        let x = FieldElement::from_int(3) + sqrt2();
        let y = FieldElement::from_int(-1) + FieldElement::from_int(2) * sqrt2();
        assert_eq!(
            (x.clone() * y.clone()).conj(),
            x.conj() * y.conj()
        );
    }

    #[test]
    fn embedding_sign_examples() {
        let s2 = sqrt2();
        assert_eq!(
            embedding_signs(&s2).unwrap(),
            (Sign::Positive, Sign::Negative)
        );
        let x = FieldElement::from_int(3) + s2.clone();
        assert_eq!(
            embedding_signs(&x).unwrap(),
            (Sign::Positive, Sign::Positive)
        );
        let y = FieldElement::one() - s2;
        assert_eq!(
            embedding_signs(&y).unwrap(),
            (Sign::Negative, Sign::Positive)
        );
        assert!(embedding_signs(&FieldElement::zero()).is_err());
    }

    #[test]
    fn algebraic_integers() {
        let golden = FieldElement::ext(
            FieldElement::Rat(rat(1, 2)),
            FieldElement::Rat(rat(1, 2)),
            FieldElement::from_int(5),
        );
        assert!(is_algebraic_integer(&golden, 5).unwrap());
        let half_silver = FieldElement::ext(
            FieldElement::Rat(rat(1, 2)),
            FieldElement::Rat(rat(1, 2)),
            FieldElement::from_int(2),
        );
        assert!(!is_algebraic_integer(&half_silver, 2).unwrap());
        let g = FieldElement::gaussian(rat_int(2), rat_int(1));
        assert!(is_algebraic_integer(&g, -1).unwrap());
        let s = FieldElement::sqrt_of(FieldElement::gaussian(rat_int(2), rat_int(1)));
        assert!(is_algebraic_integer(&s, -1).is_err());
    }

    #[test]
    fn gaussian_square_detection() {
        // (1+i)^2 = 2i
        let two_i = FieldElement::gaussian(rat_int(0), rat_int(2));
        assert!(gaussian_is_square(&two_i).unwrap());
        let two_plus_i = FieldElement::gaussian(rat_int(2), rat_int(1));
        assert!(!gaussian_is_square(&two_plus_i).unwrap());
        // -4 = (2i)^2
        assert!(gaussian_is_square(&FieldElement::from_int(-4)).unwrap());
        assert!(!gaussian_is_square(&FieldElement::from_int(-3)).unwrap());
    }

    #[test]
    fn descriptor_validation() {
        assert!(FieldDescriptor::quadratic(2).is_ok());
        assert!(FieldDescriptor::quadratic(4).is_err());
        assert!(FieldDescriptor::quadratic(12).is_err());
        assert!(FieldDescriptor::quadratic(-1).is_ok());
        assert!(FieldDescriptor::quadratic(-5).is_err());
        let t = FieldDescriptor::gaussian_tower(FieldElement::gaussian(rat_int(2), rat_int(1)));
        assert!(t.is_ok());
        assert_eq!(t.unwrap().height(), 2);
    }
}
