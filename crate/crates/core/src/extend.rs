//! Non-represented numbers of ternary anisotropic forms, extension of an
//! admissible form f of signature (n,1) to g of signature (n+1,1) with
//! O(f) < O(g), and the block isometry lift psi(M) = blockdiag(det M, M).

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::localinv::{discriminant_class, hasse_invariant, hilbert_symbol, relevant_places};
use crate::matrix::Matrix;
use crate::padic::{is_square_in_qp, Place};
use crate::quadform::{Embedding, QuadraticForm};
use crate::rational::{rat_int, squarefree_part, Rational};
use crate::tower::{FieldDescriptor, FieldElement};

/// Evidence that a ternary anisotropic form does not represent t: at the
/// obstruction place, t agrees with -d modulo squares and the form is
/// locally anisotropic there.
#[derive(Debug, Clone)]
pub struct NonRepCertificate {
    pub t: Rational,
    pub place: Place,
    /// t / (-d) is a square in the completion at `place`.
    pub matches_neg_disc: bool,
    /// (-1, -d) differs from the Hasse invariant at `place`.
    pub local_anisotropy: bool,
}

/// Finite places where a ternary form over Q is anisotropic.
pub fn obstruction_places(f: &QuadraticForm) -> Result<Vec<Place>> {
    let coeffs = f.rational_diagonal()?;
    if coeffs.len() != 3 {
        return Err(Error::Precondition("obstruction places need a ternary form".into()));
    }
    let d = Rational::from_integer(discriminant_class(&coeffs)?.representative().clone());
    let mut out = Vec::new();
    for place in relevant_places(&coeffs)? {
        if place == Place::Infinity {
            continue;
        }
        if hilbert_symbol(&rat_int(-1), &-d.clone(), place)? != hasse_invariant(&coeffs, place)? {
            out.push(place);
        }
    }
    Ok(out)
}

/// Smallest square-free integer of the requested sign (by absolute value)
/// that the ternary anisotropic indefinite form does not represent, with the
/// local certificate that proves it.
pub fn find_nonrepresented(f: &QuadraticForm, negative: bool) -> Result<(Rational, NonRepCertificate)> {
    let coeffs = f.rational_diagonal()?;
    if coeffs.len() != 3 {
        return Err(Error::Precondition("find_nonrepresented needs a ternary form".into()));
    }
    let plus = coeffs.iter().filter(|c| c.is_positive()).count();
    if plus == 0 || plus == 3 {
        return Err(Error::Precondition("form must be indefinite over the reals".into()));
    }
    if f.is_isotropic_global()? {
        return Err(Error::Precondition(
            "isotropic ternary forms represent every rational number".into(),
        ));
    }
    let places = obstruction_places(f)?;
    debug_assert!(!places.is_empty());
    let d = Rational::from_integer(discriminant_class(&coeffs)?.representative().clone());
    for abs in 1i64.. {
        let t = rat_int(if negative { -abs } else { abs });
        if squarefree_part(&t)? != *t.numer() {
            continue;
        }
        for &place in &places {
            // non-representation criterion: t = -d modulo squares of the completion
            if is_square_in_qp(&(&t / &-d.clone()), place)? {
                debug_assert!(!f.represents(&t)?);
                return Ok((
                    t.clone(),
                    NonRepCertificate {
                        t,
                        place,
                        matches_neg_disc: true,
                        local_anisotropy: true,
                    },
                ));
            }
        }
    }
    unreachable!("infinitely many non-represented numbers of either sign exist")
}

/// Which branch of the extension construction applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionCase {
    /// Real quadratic base field: g = y^2 + f.
    NumberField,
    /// Rank at least 4 over Q: g = y^2 + f, rank g >= 5 is isotropic.
    HighRank,
    /// Ternary isotropic over Q: q = 1.
    IsotropicTernary,
    /// Ternary anisotropic over Q: q chosen so f does not represent -q.
    AnisotropicTernary,
}

/// Output of extend_form: g = q*y^2 + f in the original coordinates, with the
/// exact congruence basechange and flags.
#[derive(Debug, Clone)]
pub struct ExtensionResult {
    pub g: QuadraticForm,
    /// Diagonal model diag(q, f0) after normalization.
    pub g0: QuadraticForm,
    pub q: FieldElement,
    /// (n+2)x(n+2) basechange: That^t * gram(g) * That = scale * gram(g0).
    pub that: Matrix<FieldElement>,
    pub scale: FieldElement,
    pub case: ExtensionCase,
    pub field_is_q: bool,
    pub input_isotropic: Option<bool>,
    pub output_isotropic: Option<bool>,
    pub obstruction: Option<NonRepCertificate>,
}

/// Extend an admissible form of signature (n,1) to an admissible form of
/// signature (n+1,1) containing it as the lower-right block, so that
/// O(f) < O(g) via the block embedding. An explicit q may be forced; it is
/// validated against the same branch conditions.
pub fn extend_form(f: &QuadraticForm, forced_q: Option<&Rational>) -> Result<ExtensionResult> {
    if !f.is_admissible()? {
        return Err(Error::Precondition("extend_form needs an admissible form".into()));
    }
    if f.descriptor() != &FieldDescriptor::Q {
        if let Some(q) = forced_q {
            if !q.is_positive() {
                return Err(Error::Precondition("forced q must be positive".into()));
            }
        }
        let q = forced_q
            .map(|q| FieldElement::from_rational(q.clone()))
            .unwrap_or_else(FieldElement::one);
        let norm = f.normalized_diagonal_real()?;
        return assemble(f, q, norm.coeffs, norm.basechange, norm.scale, ExtensionCase::NumberField, None);
    }

    let norm = f.normalized_diagonal_q()?;
    let rank = f.rank();
    let f0 = QuadraticForm::diagonal(FieldDescriptor::Q, &norm.coeffs)?;
    let input_isotropic = f0.is_isotropic_global()?;
    let (case, q, obstruction) = if rank >= 4 {
        (ExtensionCase::HighRank, rat_int(1), None)
    } else if input_isotropic {
        (ExtensionCase::IsotropicTernary, rat_int(1), None)
    } else {
        // q > 0 with -q non-represented: scan the negative side
        let (t, cert) = find_nonrepresented(&f0, true)?;
        (ExtensionCase::AnisotropicTernary, -t, Some(cert))
    };
    let (q, obstruction) = match forced_q {
        None => (q, obstruction),
        Some(forced) => {
            if !forced.is_positive() {
                return Err(Error::Precondition("forced q must be positive".into()));
            }
            if case == ExtensionCase::AnisotropicTernary {
                if f0.represents(&-forced.clone())? {
                    return Err(Error::Precondition(format!(
                        "forced q = {forced} is represented with sign flipped; g would be isotropic"
                    )));
                }
                let cert = certify_nonrepresented(&f0, &-forced.clone())?;
                (forced.clone(), Some(cert))
            } else {
                (forced.clone(), None)
            }
        }
    };
    let result = assemble(
        f,
        FieldElement::from_rational(q),
        norm.coeffs,
        norm.basechange,
        norm.scale,
        case,
        Some(input_isotropic),
    )?;
    Ok(ExtensionResult { obstruction, ..result })
}

/// Build the local certificate for a known non-represented value.
fn certify_nonrepresented(f: &QuadraticForm, t: &Rational) -> Result<NonRepCertificate> {
    let coeffs = f.rational_diagonal()?;
    let d = Rational::from_integer(discriminant_class(&coeffs)?.representative().clone());
    for place in obstruction_places(f)? {
        if is_square_in_qp(&(t / &-d.clone()), place)? {
            return Ok(NonRepCertificate {
                t: t.clone(),
                place,
                matches_neg_disc: true,
                local_anisotropy: true,
            });
        }
    }
    Err(Error::Internal(format!("no obstruction place certifies {t}")))
}

fn assemble(
    f: &QuadraticForm,
    q: FieldElement,
    coeffs: Vec<FieldElement>,
    basechange: Matrix<FieldElement>,
    scale: FieldElement,
    case: ExtensionCase,
    input_isotropic: Option<bool>,
) -> Result<ExtensionResult> {
    let field_is_q = f.descriptor() == &FieldDescriptor::Q;
    // g in the original coordinates: blockdiag(q * scale, gram(f))
    let g_gram = f.gram().bordered(q.clone() * scale.clone());
    let g = QuadraticForm::new(f.descriptor().clone(), g_gram)?;
    let mut g0_coeffs = vec![q.clone()];
    g0_coeffs.extend(coeffs);
    let g0 = QuadraticForm::diagonal(f.descriptor().clone(), &g0_coeffs)?;
    let that = basechange.bordered(FieldElement::one());
    debug_assert_eq!(
        g.gram().congruence(&that),
        g0.gram().scale(&scale)
    );
    let n = f.rank() - 1;
    debug_assert_eq!(g.signature(Embedding::Identity)?, (n + 1, 1));
    let output_isotropic = if field_is_q {
        Some(g0.is_isotropic_global()?)
    } else {
        None
    };
    Ok(ExtensionResult {
        g,
        g0,
        q,
        that,
        scale,
        case,
        field_is_q,
        input_isotropic,
        output_isotropic,
        obstruction: None,
    })
}

/// The lift psi(M) = blockdiag(det M, M): an isometry of f becomes a
/// determinant-one isometry of g = q*y^2 + f.
pub fn lift_isometry(
    f: &QuadraticForm,
    g: &QuadraticForm,
    m: &Matrix<FieldElement>,
) -> Result<Matrix<FieldElement>> {
    if !m.is_square() || m.rows() != f.rank() {
        return Err(Error::Dimension("isometry size mismatch".into()));
    }
    if g.rank() != f.rank() + 1 {
        return Err(Error::Dimension("g must extend f by one variable".into()));
    }
    if &f.gram().congruence(m) != f.gram() {
        return Err(Error::Precondition("matrix is not an isometry of f".into()));
    }
    let det = m.det();
    let lifted = prepend_block(&det, m);
    if &g.gram().congruence(&lifted) != g.gram() {
        return Err(Error::Precondition("g does not extend f as blockdiag(q*scale, f)".into()));
    }
    debug_assert!(lifted.det().is_one());
    Ok(lifted)
}

fn prepend_block(top: &FieldElement, m: &Matrix<FieldElement>) -> Matrix<FieldElement> {
    let n = m.rows();
    let mut out = Matrix::zero(n + 1, n + 1);
    out[(0, 0)] = top.clone();
    for i in 0..n {
        for j in 0..n {
            out[(i + 1, j + 1)] = m[(i, j)].clone();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::search;

    fn qdiag(v: &[i64]) -> QuadraticForm {
        QuadraticForm::diagonal_q(&v.iter().map(|&x| rat_int(x)).collect::<Vec<_>>()).unwrap()
    }

    fn brute_force_represents(coeffs: &[i64], t: i64, height: u64) -> bool {
        let mut all: Vec<i64> = coeffs.to_vec();
        all.push(-t);
        search::isotropy_witness_diag(&all, height, Some(coeffs.len())).is_some()
    }

    #[test]
    fn nonrepresented_negative() {
        let f = qdiag(&[1, 1, -3]);
        let (t, cert) = find_nonrepresented(&f, true).unwrap();
        assert!(t.is_negative());
        assert!(!f.represents(&t).unwrap());
        assert!(cert.matches_neg_disc && cert.local_anisotropy);
        let ti: i64 = t.to_integer().try_into().unwrap();
        assert!(!brute_force_represents(&[1, 1, -3], ti, 500));
        // -21 is another valid non-represented value
        assert!(!f.represents(&rat_int(-21)).unwrap());
        assert!(!brute_force_represents(&[1, 1, -3], -21, 500));
        // spec-listed alternative -6 likewise
        assert!(!f.represents(&rat_int(-6)).unwrap());
    }

    #[test]
    fn nonrepresented_positive() {
        let f = qdiag(&[1, 1, -3]);
        let (t, _) = find_nonrepresented(&f, false).unwrap();
        assert_eq!(t, rat_int(3));
        assert!(!f.represents(&t).unwrap());
        assert!(!brute_force_represents(&[1, 1, -3], 3, 200));
    }

    #[test]
    fn nonrepresented_preconditions() {
        // isotropic ternary
        assert!(find_nonrepresented(&qdiag(&[1, 1, -2]), true).is_err());
        // definite
        assert!(find_nonrepresented(&qdiag(&[1, 1, 3]), true).is_err());
        // wrong rank
        assert!(find_nonrepresented(&qdiag(&[1, -3]), true).is_err());
    }

    #[test]
    fn extend_isotropic_ternary() {
        let j2 = QuadraticForm::lorentz_jn(2);
        let r = extend_form(&j2, None).unwrap();
        assert_eq!(r.case, ExtensionCase::IsotropicTernary);
        assert_eq!(r.q.as_rational().unwrap(), rat_int(1));
        assert!(r.g.is_admissible().unwrap());
        assert_eq!(r.g.signature(Embedding::Identity).unwrap(), (3, 1));
        assert_eq!(r.input_isotropic, Some(true));
    }

    #[test]
    fn extend_anisotropic_ternary() {
        let f = qdiag(&[1, 1, -3]);
        let r = extend_form(&f, None).unwrap();
        assert_eq!(r.case, ExtensionCase::AnisotropicTernary);
        assert!(r.g.is_admissible().unwrap());
        assert_eq!(r.output_isotropic, Some(false));
        assert!(!r.g.is_isotropic_global().unwrap());
        // exact congruence identity
        assert_eq!(
            r.g.gram().congruence(&r.that),
            r.g0.gram().scale(&r.scale)
        );
        // q = 21 is another valid choice
        let r21 = extend_form(&f, Some(&rat_int(21))).unwrap();
        assert_eq!(r21.q.as_rational().unwrap(), rat_int(21));
        assert_eq!(r21.output_isotropic, Some(false));
        // the spec's minimal-policy alternative q = 6 validates as well
        let r6 = extend_form(&f, Some(&rat_int(6))).unwrap();
        assert_eq!(r6.output_isotropic, Some(false));
        // a represented -q is rejected: f represents -3 = f(0,0,1)
        assert!(extend_form(&f, Some(&rat_int(3))).is_err());
    }

    #[test]
    fn extend_high_rank_and_field() {
        let r = extend_form(&qdiag(&[1, 1, 1, 1, -1]), None).unwrap();
        assert_eq!(r.case, ExtensionCase::HighRank);
        assert_eq!(r.q.as_rational().unwrap(), rat_int(1));
        assert_eq!(r.output_isotropic, Some(true));

        let k = FieldDescriptor::quadratic(2).unwrap();
        let s2 = FieldElement::sqrt_of(FieldElement::from_int(2));
        let f = QuadraticForm::diagonal(k, &[FieldElement::one(), FieldElement::one(), -s2])
            .unwrap();
        let r = extend_form(&f, None).unwrap();
        assert_eq!(r.case, ExtensionCase::NumberField);
        assert!(r.g.is_admissible().unwrap());
        assert_eq!(r.output_isotropic, None);
        assert!(!r.field_is_q);
    }

    #[test]
    fn extend_rejects_inadmissible() {
        assert!(extend_form(&qdiag(&[1, -1, -1]), None).is_err());
    }

    #[test]
    fn lift_examples() {
        let j2 = QuadraticForm::lorentz_jn(2);
        let ext = extend_form(&j2, None).unwrap();
        let id = Matrix::identity(3);
        assert_eq!(lift_isometry(&j2, &ext.g, &id).unwrap(), Matrix::identity(4));

        let refl = Matrix::diagonal(&[
            -FieldElement::one(),
            FieldElement::one(),
            FieldElement::one(),
        ]);
        let lifted = lift_isometry(&j2, &ext.g, &refl).unwrap();
        let expect = Matrix::diagonal(&[
            -FieldElement::one(),
            -FieldElement::one(),
            FieldElement::one(),
            FieldElement::one(),
        ]);
        assert_eq!(lifted, expect);
        assert!(lifted.det().is_one());

        // non-isometry rejected
        let bad = Matrix::diagonal(&[
            FieldElement::from_int(2),
            FieldElement::one(),
            FieldElement::one(),
        ]);
        assert!(lift_isometry(&j2, &ext.g, &bad).is_err());
    }
}
