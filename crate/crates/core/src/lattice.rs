//! Group-element predicates for O(f)/SO+(f), the determinant twist, the
//! explicit PSL(2,Q(i)) -> SO+(f) map, congruence-subgroup constructions over
//! Z and Z[i], the tau-conjugation normalizer computations, and the squares
//! sampler for the subgroup generated by squares.

use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::quadform::QuadraticForm;
use crate::rational::{is_square_in_q, rat, rat_int, squarefree_part, Rational};
use crate::tower::{identity_sign, FieldDescriptor, FieldElement, Sign};

/// A square invertible matrix tagged with its coefficient field.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub matrix: Matrix<FieldElement>,
    pub domain: FieldDescriptor,
}

impl GroupElement {
    pub fn new(matrix: Matrix<FieldElement>, domain: FieldDescriptor) -> Result<GroupElement> {
        if !matrix.is_square() {
            return Err(Error::Dimension("group element must be square".into()));
        }
        if matrix.det().is_zero() {
            return Err(Error::Degenerate("group element must be invertible".into()));
        }
        Ok(GroupElement { matrix, domain })
    }
}

/// Exact verdict for X^t F X = F.
pub fn is_isometry(x: &Matrix<FieldElement>, f: &QuadraticForm) -> Result<bool> {
    if !x.is_square() || x.rows() != f.rank() {
        return Err(Error::Dimension("isometry candidate has wrong size".into()));
    }
    Ok(&f.gram().congruence(x) == f.gram())
}

/// Pinned timelike witness: the diagonalizing-basis vector of the (unique)
/// negative coefficient, expressed in the original coordinates.
pub fn sheet_witness(f: &QuadraticForm) -> Result<Vec<FieldElement>> {
    let diag = f.diagonalize()?;
    let idx = diag
        .coeffs
        .iter()
        .position(|c| matches!(identity_sign(c), Ok(Sign::Negative)))
        .ok_or_else(|| Error::Precondition("form has no timelike direction".into()))?;
    let v: Vec<FieldElement> = (0..f.rank()).map(|i| diag.basechange[(i, idx)].clone()).collect();
    debug_assert_eq!(identity_sign(&f.evaluate(&v))?, Sign::Negative);
    Ok(v)
}

/// True iff X maps the positive sheet of the hyperboloid to itself: two
/// timelike vectors lie in the same cone component iff their pairing under
/// the bilinear form is negative.
pub fn preserves_positive_sheet(x: &Matrix<FieldElement>, f: &QuadraticForm) -> Result<bool> {
    if !is_isometry(x, f)? {
        return Err(Error::Precondition("sheet test requires an isometry".into()));
    }
    let v = sheet_witness(f)?;
    let xv = x.mul_vec(&v);
    let pairing = f.bilinear(&v, &xv);
    Ok(identity_sign(&pairing)? == Sign::Negative)
}

/// The twist phi(X) = (det X) * X, defined for odd matrix size (n even);
/// restricts to the identity on SO+ and maps O+ into SO.
pub fn det_twist(x: &Matrix<FieldElement>, f: &QuadraticForm) -> Result<Matrix<FieldElement>> {
    if f.rank() % 2 == 0 {
        return Err(Error::Precondition(
            "det twist needs odd matrix size (even hyperbolic dimension)".into(),
        ));
    }
    if !preserves_positive_sheet(x, f)? {
        return Err(Error::Precondition("det twist expects an element of O+".into()));
    }
    let det = x.det();
    let twisted = x.scale(&det);
    debug_assert!(twisted.det().is_one());
    Ok(twisted)
}

/// Element of the Moebius group over Q(i) adjoined s with s^2 = 2 + i,
/// stored as a Gaussian 2x2 matrix divided by s^spow. Determinant of the
/// underlying fractional matrix is 1, so det(mat) = (2+i)^spow.
#[derive(Debug, Clone)]
pub struct MoebiusElement {
    mat: Matrix<FieldElement>,
    spow: u8,
}

fn two_plus_i() -> FieldElement {
    FieldElement::gaussian(rat_int(2), rat_int(1))
}

impl MoebiusElement {
    /// Element of SL(2, Q(i)) given by Gaussian entries with ad - bc = 1.
    pub fn from_gaussian(entries: [FieldElement; 4]) -> Result<MoebiusElement> {
        for e in &entries {
            e.gaussian_parts()?;
        }
        let [a, b, c, d] = entries;
        let mat = Matrix::from_rows(vec![vec![a, b], vec![c, d]])?;
        if !mat.det().is_one() {
            return Err(Error::Precondition("Moebius element must have determinant 1".into()));
        }
        Ok(MoebiusElement { mat, spow: 0 })
    }

    pub fn from_integers(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> Result<MoebiusElement> {
        let g = |(x, y): (i64, i64)| FieldElement::gaussian(rat_int(x), rat_int(y));
        MoebiusElement::from_gaussian([g(a), g(b), g(c), g(d)])
    }

    /// tau = [[0, 1/s], [-s, 0]] with s = sqrt(2+i).
    pub fn tau() -> MoebiusElement {
        let mat = Matrix::from_rows(vec![
            vec![FieldElement::zero(), FieldElement::one()],
            vec![-two_plus_i(), FieldElement::zero()],
        ])
        .unwrap();
        MoebiusElement { mat, spow: 1 }
    }

    /// True iff the element lies in PSL(2, Q(i)) (no residual sqrt(2+i)).
    pub fn in_gaussian(&self) -> bool {
        self.spow == 0
    }

    /// Gaussian entries (a, b, c, d); errors when the element genuinely
    /// involves sqrt(2+i).
    pub fn gaussian_entries(&self) -> Result<[FieldElement; 4]> {
        if !self.in_gaussian() {
            return Err(Error::Precondition("element lies outside PSL(2, Q(i))".into()));
        }
        Ok([
            self.mat[(0, 0)].clone(),
            self.mat[(0, 1)].clone(),
            self.mat[(1, 0)].clone(),
            self.mat[(1, 1)].clone(),
        ])
    }

    pub fn inverse(&self) -> MoebiusElement {
        // for 2x2: inverse of M/s^e with det 1 is adj(M)/s^e
        let adj = Matrix::from_rows(vec![
            vec![self.mat[(1, 1)].clone(), -self.mat[(0, 1)].clone()],
            vec![-self.mat[(1, 0)].clone(), self.mat[(0, 0)].clone()],
        ])
        .unwrap();
        MoebiusElement { mat: adj, spow: self.spow }
    }

    /// Projective equality: A ~ -A.
    pub fn projectively_equal(&self, other: &MoebiusElement) -> bool {
        self.spow == other.spow && (self.mat == other.mat || self.mat == other.mat.neg())
    }

    pub fn square(&self) -> MoebiusElement {
        self.clone() * self.clone()
    }
}

impl Mul for MoebiusElement {
    type Output = MoebiusElement;
    fn mul(self, rhs: MoebiusElement) -> MoebiusElement {
        let mut mat = self.mat.mul(&rhs.mat);
        let mut spow = self.spow + rhs.spow;
        if spow == 2 {
            let inv = two_plus_i().inv().unwrap();
            mat = mat.scale(&inv);
            spow = 0;
        }
        MoebiusElement { mat, spow }
    }
}

/// Gram matrix of f = x0*x1 + x2^2 + x3^2, the target form of the
/// PSL(2, Q(i)) -> SO+(f) isomorphism.
pub fn so13_form() -> QuadraticForm {
    let half = FieldElement::from_rational(rat(1, 2));
    let mut gram = Matrix::zero(4, 4);
    gram[(0, 1)] = half.clone();
    gram[(1, 0)] = half;
    gram[(2, 2)] = FieldElement::one();
    gram[(3, 3)] = FieldElement::one();
    QuadraticForm::new(FieldDescriptor::Q, gram).unwrap()
}

/// The explicit isomorphism PSL(2, Q(i)) -> SO+(f, Q) with f = x0*x1+x2^2+x3^2.
///
/// Built from a closed entry formula; the orientation (transpose of the raw
/// entry table below) is the unique one under which both Y^t F Y = F and the
/// homomorphism property hold. It is cross-checked in tests against the
/// Hermitian-matrix model of the action. Z[i] entries yield an integral image.
pub fn psl2_to_so13(m: &MoebiusElement) -> Result<Matrix<Rational>> {
    let [a, b, c, d] = m.gaussian_entries()?;
    let (a0, a1) = a.gaussian_parts()?;
    let (b0, b1) = b.gaussian_parts()?;
    let (c0, c1) = c.gaussian_parts()?;
    let (d0, d1) = d.gaussian_parts()?;
    let sq = |x: &Rational| x * x;
    let two = rat_int(2);
    let table = Matrix::from_rows(vec![
        vec![
            sq(&d0) + sq(&d1),
            -(sq(&b0) + sq(&b1)),
            &b0 * &d0 + &b1 * &d1,
            &b1 * &d0 - &b0 * &d1,
        ],
        vec![
            -(sq(&c0) + sq(&c1)),
            sq(&a0) + sq(&a1),
            -(&a0 * &c0 + &a1 * &c1),
            -(&a1 * &c0) + &a0 * &c1,
        ],
        vec![
            &two * (&c0 * &d0 + &c1 * &d1),
            -&two * (&a0 * &b0 + &a1 * &b1),
            &two * (&b0 * &c0 + &a1 * &d1) + rat_int(1),
            &two * (&b1 * &c0 - &a0 * &d1),
        ],
        vec![
            &two * (&c0 * &d1 - &c1 * &d0),
            &two * (&a1 * &b0 - &a0 * &b1),
            &two * (&b1 * &c0 - &a1 * &d0),
            &two * (&a0 * &d0 - &b0 * &c0) - rat_int(1),
        ],
    ])?;
    let y = table.transpose();
    let f = so13_form();
    let lifted = y.lift();
    debug_assert!(is_isometry(&lifted, &f)?);
    debug_assert!(lifted.det().is_one());
    debug_assert!(preserves_positive_sheet(&lifted, &f)?);
    Ok(y)
}

/// Gamma_0(n) membership over Z: integral entries, lower-left divisible by n.
pub fn gamma0_member_z(m: &Matrix<Rational>, n: &BigInt) -> Result<bool> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::Dimension("congruence test needs a 2x2 matrix".into()));
    }
    for e in m.entries() {
        if !e.is_integer() {
            return Err(Error::Precondition("entries must be integers".into()));
        }
    }
    Ok(m[(1, 0)].to_integer().is_multiple_of(n))
}

/// Gamma_0(pi) membership over Z[i]: integral Gaussian entries, lower-left
/// divisible by pi in Z[i].
pub fn gamma0_member_zi(m: &MoebiusElement, pi: &FieldElement) -> Result<bool> {
    let entries = m.gaussian_entries()?;
    for e in &entries {
        let (x, y) = e.gaussian_parts()?;
        if !x.is_integer() || !y.is_integer() {
            return Err(Error::Precondition("entries must lie in Z[i]".into()));
        }
    }
    gaussian_divides(pi, &entries[2])
}

/// Whether pi divides x in Z[i]: x * conj(pi) / N(pi) has integer parts.
fn gaussian_divides(pi: &FieldElement, x: &FieldElement) -> Result<bool> {
    if pi.is_zero() {
        return Err(Error::domain("division by zero in Z[i]"));
    }
    let quotient = x.clone() * pi.inv().unwrap();
    let (q0, q1) = quotient.gaussian_parts()?;
    Ok(q0.is_integer() && q1.is_integer())
}

/// tau_n gamma tau_n^{-1} for gamma in SL(2, Z), computed two ways: the
/// closed form [[d, -c/n], [-n b, a]] and direct exact arithmetic over
/// Q(sqrt n); the two must agree. `member` records whether the conjugate is
/// again integral, i.e. gamma was in Gamma_0(n).
#[derive(Debug, Clone)]
pub struct TauConjugate {
    pub matrix: Matrix<Rational>,
    pub member: bool,
}

pub fn tau_conjugate(gamma: &Matrix<Rational>, n: u64) -> Result<TauConjugate> {
    if gamma.rows() != 2 || gamma.cols() != 2 {
        return Err(Error::Dimension("tau conjugation needs a 2x2 matrix".into()));
    }
    if n < 2 || squarefree_part(&rat_int(n as i64))? != BigInt::from(n) {
        return Err(Error::domain("n must be a square-free integer > 1"));
    }
    for e in gamma.entries() {
        if !e.is_integer() {
            return Err(Error::Precondition("gamma must have integer entries".into()));
        }
    }
    if !(gamma.det() - Rational::one()).is_zero() {
        return Err(Error::Precondition("gamma must have determinant 1".into()));
    }
    let (a, b, c, d) = (
        gamma[(0, 0)].clone(),
        gamma[(0, 1)].clone(),
        gamma[(1, 0)].clone(),
        gamma[(1, 1)].clone(),
    );
    let nrat = rat_int(n as i64);
    let closed = Matrix::from_rows(vec![
        vec![d.clone(), -(&c / &nrat)],
        vec![-(&nrat * &b), a.clone()],
    ])?;

    // direct path over Q(sqrt n): tau = [[0, 1/sqrt n], [-sqrt n, 0]]
    let s = FieldElement::sqrt_of(FieldElement::from_int(n as i64));
    let tau = Matrix::from_rows(vec![
        vec![FieldElement::zero(), s.inv().unwrap()],
        vec![-s.clone(), FieldElement::zero()],
    ])?;
    let tau_inv = tau.inverse().ok_or_else(|| Error::Internal("tau is invertible".into()))?;
    let direct = tau.mul(&gamma.lift()).mul(&tau_inv).to_rational()?;
    if direct != closed {
        return Err(Error::Internal("tau conjugation paths disagree".into()));
    }
    let member = closed.entries().all(|e| e.is_integer());
    Ok(TauConjugate { matrix: closed, member })
}

/// The SL(3) obstruction: gamma_n x gamma_n^{-1} for x = I + P*E_{13} has
/// (2,3)-entry -P*sqrt(n), so the conjugate is integral iff P = 0.
pub struct Sl3Obstruction {
    pub conjugate: Matrix<FieldElement>,
    pub integral: bool,
    /// Coefficient of sqrt(n) in the (2,3)-entry.
    pub sqrt_coefficient: Rational,
}

pub fn sl3_obstruction(n: u64, p: i64) -> Result<Sl3Obstruction> {
    if n < 2 || squarefree_part(&rat_int(n as i64))? != BigInt::from(n) {
        return Err(Error::domain("n must be a square-free integer > 1"));
    }
    let s = FieldElement::sqrt_of(FieldElement::from_int(n as i64));
    let zero = FieldElement::zero;
    let one = FieldElement::one;
    let gamma = Matrix::from_rows(vec![
        vec![zero(), s.inv().unwrap(), zero()],
        vec![-s.clone(), zero(), zero()],
        vec![zero(), zero(), one()],
    ])?;
    let x = {
        let mut m = Matrix::identity(3);
        m[(0, 2)] = FieldElement::from_int(p);
        m
    };
    let gamma_inv = gamma.inverse().ok_or_else(|| Error::Internal("gamma is invertible".into()))?;
    let conjugate = gamma.mul(&x).mul(&gamma_inv);
    // (2,3)-entry is -P*sqrt(n): rational part zero, sqrt coefficient -P
    let expect = -s * FieldElement::from_int(p);
    debug_assert_eq!(conjugate[(1, 2)], expect);
    let integral = p == 0;
    Ok(Sl3Obstruction {
        conjugate,
        integral,
        sqrt_coefficient: rat_int(-p),
    })
}

/// One entry of the squares sample: the word (by generator indices), its
/// square, the image under the SO+(f) map, and the rationality verdict.
pub struct SquareSample {
    pub word: Vec<usize>,
    pub square: MoebiusElement,
    pub image: Matrix<Rational>,
    pub rational: bool,
}

/// Enumerate words of length <= l over the generators (length-lexicographic,
/// fixed generator order), square each, and map the squares into SO+(f).
/// Squares of words with odd total sqrt(2+i) parity collapse into Q(i), so
/// every image is rational; the verdict records this per element.
pub fn mod2_squares_sample(generators: &[MoebiusElement], l: usize) -> Result<Vec<SquareSample>> {
    if generators.is_empty() || l == 0 {
        return Err(Error::domain("need at least one generator and l >= 1"));
    }
    let mut words: Vec<(Vec<usize>, MoebiusElement)> = Vec::new();
    let mut frontier: Vec<(Vec<usize>, MoebiusElement)> = vec![(
        Vec::new(),
        MoebiusElement::from_integers((1, 0), (0, 0), (0, 0), (1, 0))?,
    )];
    for _ in 0..l {
        let mut next = Vec::new();
        for (w, m) in &frontier {
            for (gi, g) in generators.iter().enumerate() {
                let mut nw = w.clone();
                nw.push(gi);
                next.push((nw, m.clone() * g.clone()));
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let mut out: Vec<SquareSample> = Vec::new();
    for (word, m) in words {
        let square = m.square();
        if out
            .iter()
            .any(|s| s.square.projectively_equal(&square))
        {
            continue;
        }
        // squaring doubles the sqrt(2+i) parity, so every square is Gaussian
        // and its image under the map is a rational matrix
        let rational = square.in_gaussian();
        let image = psl2_to_so13(&square)?;
        out.push(SquareSample { word, square, image, rational });
    }
    Ok(out)
}

/// Certificate that the image of tau has irrational (1,2)-entry: the entry
/// squares to 1/N(pi), rational iff that is a rational square.
pub struct TauEntryCertificate {
    pub entry_squared: Rational,
    pub entry_rational: bool,
}

pub fn tau_entry_certificate(pi: &FieldElement) -> Result<TauEntryCertificate> {
    if pi.is_zero() {
        return Err(Error::domain("pi must be nonzero"));
    }
    let (x, y) = pi.gaussian_parts()?;
    let norm = &x * &x + &y * &y;
    let entry_squared = norm.recip();
    let entry_rational = is_square_in_q(&entry_squared);
    Ok(TauEntryCertificate { entry_squared, entry_rational })
}
