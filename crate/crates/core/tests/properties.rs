//! Randomized property suites for the local-global machinery: Hilbert
//! reciprocity, invariance under re-diagonalization, representation vs
//! extension isotropy, Meyer's theorem at desk scale, and equivalence
//! relation axioms. All randomness is seeded for reproducibility.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qfe_core::localinv::{hilbert_symbol, relevant_places};
use qfe_core::quadform::{Embedding, QuadraticForm};
use qfe_core::rational::{rat_int, Rational};
use qfe_core::tower::FieldElement;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let x = rng.gen_range(-bound..=bound);
        if x != 0 {
            return x;
        }
    }
}

fn qdiag(v: &[i64]) -> QuadraticForm {
    QuadraticForm::diagonal_q(&v.iter().map(|&x| rat_int(x)).collect::<Vec<_>>()).unwrap()
}

#[test]
fn hilbert_reciprocity_and_symbol_laws() {
    let mut r = rng(0xA11CE);
    for _ in 0..1000 {
        let a = rat_int(nonzero(&mut r, 200));
        let b = rat_int(nonzero(&mut r, 200));
        let places = relevant_places(&[a.clone(), b.clone()]).unwrap();
        // reciprocity: product over all places is +1 (symbols outside the
        // relevant set are +1)
        let product: i32 = places
            .iter()
            .map(|&p| hilbert_symbol(&a, &b, p).unwrap())
            .product();
        assert_eq!(product, 1, "reciprocity fails for ({a}, {b})");
        for &p in &places {
            // symmetry
            assert_eq!(
                hilbert_symbol(&a, &b, p).unwrap(),
                hilbert_symbol(&b, &a, p).unwrap()
            );
            // (a, -a) = 1
            assert_eq!(hilbert_symbol(&a, &-a.clone(), p).unwrap(), 1);
            // (a, 1-a) = 1 when defined
            let one_minus = Rational::one() - a.clone();
            if !one_minus.is_zero() {
                assert_eq!(hilbert_symbol(&a, &one_minus, p).unwrap(), 1);
            }
        }
    }
}

#[test]
fn hilbert_bimultiplicativity() {
    let mut r = rng(0xB0B);
    for _ in 0..300 {
        let a = rat_int(nonzero(&mut r, 60));
        let b = rat_int(nonzero(&mut r, 60));
        let c = rat_int(nonzero(&mut r, 60));
        let places = relevant_places(&[a.clone(), b.clone(), c.clone()]).unwrap();
        for &p in &places {
            let lhs = hilbert_symbol(&(&a * &b), &c, p).unwrap();
            let rhs = hilbert_symbol(&a, &c, p).unwrap() * hilbert_symbol(&b, &c, p).unwrap();
            assert_eq!(lhs, rhs, "bimultiplicativity fails at {p} for {a},{b},{c}");
        }
    }
}

#[test]
fn invariants_stable_under_rediagonalization() {
    let mut r = rng(0xD1A6);
    for _ in 0..200 {
        let rank = r.gen_range(2..=5usize);
        let coeffs: Vec<i64> = (0..rank).map(|_| nonzero(&mut r, 30)).collect();
        let f = qdiag(&coeffs);
        let profile = f.invariant_profile().unwrap();
        let sig = f.signature(Embedding::Identity).unwrap();
        // random basis permutation feeding the pivot order
        let mut order: Vec<usize> = (0..rank).collect();
        for i in (1..rank).rev() {
            order.swap(i, r.gen_range(0..=i));
        }
        let diag = f.diagonalize_with_order(&order).unwrap();
        let coeffs2: Vec<Rational> = diag
            .coeffs
            .iter()
            .map(|c| c.as_rational().unwrap())
            .collect();
        let f2 = QuadraticForm::diagonal_q(&coeffs2).unwrap();
        assert_eq!(f2.invariant_profile().unwrap(), profile);
        assert_eq!(f2.signature(Embedding::Identity).unwrap(), sig);
        // mixing in a shear basis change must not move the invariants either
        let mut shear = qfe_core::Matrix::<FieldElement>::identity(rank);
        shear[(0, rank - 1)] = FieldElement::from_int(r.gen_range(-3..=3));
        let mixed = QuadraticForm::new(
            f.descriptor().clone(),
            f.gram().congruence(&shear),
        )
        .unwrap();
        assert_eq!(mixed.invariant_profile().unwrap(), profile);
    }
}

#[test]
fn represents_iff_extension_isotropic() {
    let mut r = rng(0x5EED);
    for _ in 0..200 {
        let rank = if r.gen_bool(0.5) { 3 } else { 4 };
        let coeffs: Vec<i64> = (0..rank).map(|_| nonzero(&mut r, 30)).collect();
        let f = qdiag(&coeffs);
        let q = rat_int(nonzero(&mut r, 30));
        let mut ext = coeffs.clone();
        let qi: i64 = q.to_integer().try_into().unwrap();
        ext.push(-qi);
        let extended = qdiag(&ext);
        let via_ext = extended.is_isotropic_global().unwrap();
        assert_eq!(
            f.represents(&q).unwrap(),
            via_ext,
            "represents mismatch for {coeffs:?} q={q}"
        );
    }
}

#[test]
fn meyer_rank_five() {
    let mut r = rng(0x4EA);
    for _ in 0..100 {
        // force mixed signs
        let mut coeffs: Vec<i64> = (0..5).map(|_| nonzero(&mut r, 50)).collect();
        coeffs[0] = coeffs[0].abs();
        coeffs[1] = -coeffs[1].abs();
        let f = qdiag(&coeffs);
        assert!(f.is_isotropic_global().unwrap(), "Meyer fails for {coeffs:?}");
    }
}

#[test]
fn isotropic_small_forms_have_witnesses() {
    let mut r = rng(0x17E55);
    let mut found = 0;
    for _ in 0..60 {
        let rank = r.gen_range(2..=5usize);
        let coeffs: Vec<i64> = (0..rank).map(|_| nonzero(&mut r, 20)).collect();
        let f = qdiag(&coeffs);
        if !f.is_isotropic_global().unwrap() {
            continue;
        }
        let w = f.isotropy_witness(200).unwrap();
        let w = w.expect("isotropic form with small coefficients has a height-200 witness");
        let v: Vec<FieldElement> = w
            .iter()
            .map(|x| FieldElement::from_rational(Rational::from_integer(x.clone())))
            .collect();
        assert!(f.evaluate(&v).is_zero());
        assert!(w.iter().any(|x| !x.is_zero()));
        found += 1;
    }
    assert!(found >= 10, "sample produced too few isotropic forms: {found}");
}

#[test]
fn equivalence_is_an_equivalence_relation() {
    let mut r = rng(0xE0);
    let mut forms = Vec::new();
    for _ in 0..12 {
        let rank = r.gen_range(2..=4usize);
        let coeffs: Vec<i64> = (0..rank).map(|_| nonzero(&mut r, 15)).collect();
        forms.push(qdiag(&coeffs));
    }
    for f in &forms {
        assert!(f.equivalent_over_q(f).unwrap().0);
        // scaling by a square is an equivalence
        let scaled = QuadraticForm::new(
            f.descriptor().clone(),
            f.gram().scale(&FieldElement::from_int(4)),
        )
        .unwrap();
        assert!(f.equivalent_over_q(&scaled).unwrap().0);
    }
    for a in &forms {
        for b in &forms {
            let ab = a.equivalent_over_q(b).unwrap().0;
            let ba = b.equivalent_over_q(a).unwrap().0;
            assert_eq!(ab, ba);
            for c in &forms {
                if ab && b.equivalent_over_q(c).unwrap().0 {
                    assert!(a.equivalent_over_q(c).unwrap().0);
                }
            }
        }
    }
}

#[test]
fn field_arithmetic_axioms() {
    // seeded random elements of Q(sqrt 2) and the Gaussian tower
    let mut r = rng(0xF1E1D);
    let rand_elem = |r: &mut ChaCha8Rng| {
        let a = rat_int(r.gen_range(-9..=9));
        let b = rat_int(r.gen_range(-9..=9));
        FieldElement::ext(
            FieldElement::from_rational(a),
            FieldElement::from_rational(b),
            FieldElement::from_int(2),
        )
    };
    for _ in 0..200 {
        let x = rand_elem(&mut r);
        let y = rand_elem(&mut r);
        let z = rand_elem(&mut r);
        // ring axioms
        assert_eq!(x.clone() + y.clone(), y.clone() + x.clone());
        assert_eq!(
            (x.clone() + y.clone()) + z.clone(),
            x.clone() + (y.clone() + z.clone())
        );
        assert_eq!(
            (x.clone() * y.clone()) * z.clone(),
            x.clone() * (y.clone() * z.clone())
        );
        assert_eq!(
            x.clone() * (y.clone() + z.clone()),
            x.clone() * y.clone() + x.clone() * z.clone()
        );
        // multiplicative inverse
        if !x.is_zero() {
            assert!((x.clone() * x.inv().unwrap()).is_one());
        }
        // conjugation is a ring morphism and norm is multiplicative
        assert_eq!((x.clone() * y.clone()).conj(), x.conj() * y.conj());
        assert_eq!(
            (x.clone() * y.clone()).norm_to_base(),
            x.norm_to_base() * y.norm_to_base()
        );
    }
}

#[test]
fn embedding_signs_match_float_evaluation() {
    use qfe_core::tower::{embedding_signs, Sign};
    let mut r = rng(0x51615);
    for _ in 0..400 {
        let a: i64 = r.gen_range(-50..=50);
        let b: i64 = nonzero(&mut r, 50);
        let delta: i64 = *[2, 3, 5, 7, 11].iter().nth(r.gen_range(0..5)).unwrap();
        let x = FieldElement::ext(
            FieldElement::from_int(a),
            FieldElement::from_int(b),
            FieldElement::from_int(delta),
        );
        let (id, conj) = embedding_signs(&x).unwrap();
        let s = (delta as f64).sqrt();
        let id_f = a as f64 + b as f64 * s;
        let conj_f = a as f64 - b as f64 * s;
        // |a| and |b| are small enough that the float sign is reliable
        if id_f.abs() > 1e-6 {
            assert_eq!(id == Sign::Positive, id_f > 0.0, "{a}+{b}*sqrt({delta})");
        }
        if conj_f.abs() > 1e-6 {
            assert_eq!(conj == Sign::Positive, conj_f > 0.0);
        }
    }
}
