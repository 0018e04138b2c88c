use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use solvlog_core::free_lie::{lie_to_tensor, tensor_to_lie};
use solvlog_core::linalg;
use solvlog_core::logarithm::{bch_series, ln_aut, log_unipotent, LogOptions};
use solvlog_core::magnus::{total_johnson, transporter};
use solvlog_core::sample;
use solvlog_core::{
    ExactAut, ExactDerivation, ExactExpansion, ExactTensor, FreeGroupEndo, FreeGroupWord, GradedAut, Rational, Scalar,
    Wire,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_tensor(seed: u64, n: usize, k: usize, constant: i64) -> ExactTensor {
    let mut r = rng(seed);
    let mut t = ExactTensor::one(n, k).scale(&Rational::from_i64(constant));
    for m in 1..k {
        for w in solvlog_core::Word::all_of_length(n, m) {
            t.add_term(w, sample::rational(&mut r));
        }
    }
    t
}

fn random_endo(seed: u64, n: usize, len: usize) -> FreeGroupEndo {
    use rand::Rng;
    let mut r = rng(seed);
    let images = (0..n)
        .map(|_| {
            let letters: Vec<i32> = (0..r.gen_range(1..=len))
                .map(|_| {
                    let g = r.gen_range(1..=n as i32);
                    if r.gen_bool(0.5) { g } else { -g }
                })
                .collect();
            FreeGroupWord::new(letters).unwrap()
        })
        .collect();
    FreeGroupEndo::new(images).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tensor_exp_log_inverse(seed in any::<u64>(), n in 1usize..=3, k in 2usize..=4) {
        let x = random_tensor(seed, n, k, 0);
        prop_assert_eq!(x.exp().unwrap().log().unwrap(), x.clone());
        let y = random_tensor(seed ^ 1, n, k, 1);
        prop_assert_eq!(y.log().unwrap().exp().unwrap(), y.clone());
        let inv = y.inverse().unwrap();
        prop_assert_eq!(y.checked_mul(&inv).unwrap(), ExactTensor::one(n, k));
    }

    #[test]
    fn lie_elements_exponentiate_to_grouplikes(seed in any::<u64>(), n in 1usize..=3, k in 2usize..=5) {
        let mut r = rng(seed);
        let mut p = sample::lie_poly(&mut r, n, k, 1);
        for m in 2..k {
            p = p.checked_add(&sample::lie_poly(&mut r, n, k, m)).unwrap();
        }
        let t = lie_to_tensor(&p);
        prop_assert!(t.is_primitive(0.0));
        prop_assert_eq!(tensor_to_lie(&t).unwrap(), p);
        prop_assert!(t.exp().unwrap().is_grouplike(0.0));
    }

    #[test]
    fn group_axioms(seed in any::<u64>(), n in 1usize..=3, k in 2usize..=4) {
        let mut r = rng(seed);
        let (f, g, h) = (sample::aut(&mut r, n, k), sample::aut(&mut r, n, k), sample::aut(&mut r, n, k));
        let id = ExactAut::identity(n, k);
        prop_assert_eq!(f.compose(&id).unwrap(), f.clone());
        prop_assert_eq!(id.compose(&f).unwrap(), f.clone());
        prop_assert_eq!(f.compose(&f.inverse().unwrap()).unwrap(), id.clone());
        prop_assert_eq!(
            f.compose(&g).unwrap().compose(&h).unwrap(),
            f.compose(&g.compose(&h).unwrap()).unwrap()
        );
        // composition agrees with applying the two maps in turn
        let t = random_tensor(seed ^ 2, n, k, 1);
        prop_assert_eq!(f.compose(&g).unwrap().apply(&t).unwrap(), f.apply(&g.apply(&t).unwrap()).unwrap());
    }

    #[test]
    fn automorphisms_are_multiplicative(seed in any::<u64>(), n in 1usize..=2, k in 2usize..=5) {
        let f = sample::aut(&mut rng(seed), n, k);
        let (s, t) = (random_tensor(seed ^ 3, n, k, 2), random_tensor(seed ^ 4, n, k, 0));
        let lhs = f.apply(&s.checked_mul(&t).unwrap()).unwrap();
        let rhs = f.apply(&s).unwrap().checked_mul(&f.apply(&t).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivations_obey_leibniz(seed in any::<u64>(), n in 1usize..=2, k in 2usize..=5) {
        let d = sample::derivation(&mut rng(seed), n, k);
        let (s, t) = (random_tensor(seed ^ 5, n, k, 1), random_tensor(seed ^ 6, n, k, 0));
        let lhs = d.apply(&s.checked_mul(&t).unwrap()).unwrap();
        let rhs = d.apply(&s).unwrap().checked_mul(&t).unwrap()
            .checked_add(&s.checked_mul(&d.apply(&t).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(d.leibniz_defect().unwrap(), 0.0);
        // extension from generator images reproduces the derivation
        prop_assert_eq!(ExactDerivation::extend(&d.generator_images()).unwrap(), d);
    }

    #[test]
    fn bracket_of_derivations_is_the_commutator(seed in any::<u64>(), k in 2usize..=4) {
        let mut r = rng(seed);
        let (d, e) = (sample::derivation(&mut r, 2, k), sample::derivation(&mut r, 2, k));
        let t = random_tensor(seed ^ 7, 2, k, 0);
        let commutator = d.apply(&e.apply(&t).unwrap()).unwrap()
            .checked_sub(&e.apply(&d.apply(&t).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(d.bracket(&e).unwrap().apply(&t).unwrap(), commutator);
    }

    #[test]
    fn hopf_automorphisms_form_a_group(seed in any::<u64>(), n in 1usize..=3, k in 2usize..=4) {
        let mut r = rng(seed);
        let (f, g) = (sample::unipotent_hopf_aut(&mut r, n, k), sample::hopf_ia_aut(&mut r, n, k));
        prop_assert!(f.compose(&g).unwrap().is_hopf(0.0));
        prop_assert!(f.inverse().unwrap().is_hopf(0.0));
        // and they carry grouplikes to grouplikes
        let x = lie_to_tensor(&sample::lie_poly(&mut r, n, k, 1)).exp().unwrap();
        prop_assert!(f.apply(&x).unwrap().is_grouplike(0.0));
    }

    #[test]
    fn ia_part_is_unipotent_of_bounded_order(seed in any::<u64>(), n in 1usize..=2, k in 2usize..=5) {
        let f = sample::ia_aut(&mut rng(seed), n, k);
        let nil = linalg::identity::<Rational>(f.full_matrix().nrows()) - f.full_matrix();
        let mut power = nil.clone();
        for _ in 1..k - 1 {
            power = linalg::matmul(&power, &nil);
        }
        prop_assert!(linalg::is_zero(&power, 0.0));
    }

    #[test]
    fn ia_decomposition_and_conjugation(seed in any::<u64>(), n in 1usize..=3, k in 3usize..=4) {
        let mut r = rng(seed);
        let f = sample::aut(&mut r, n, k);
        let (ia, a) = f.ia_decompose();
        prop_assert!(ia.is_ia());
        prop_assert_eq!(ia.compose(&GradedAut::splitting(&a, k).unwrap()).unwrap(), f.clone());
        // conjugating an IA automorphism by a splitting stays IA
        let b = sample::invertible_matrix(&mut r, n);
        let s = GradedAut::splitting(&b, k).unwrap();
        let conj = s.compose(&ia).unwrap().compose(&s.inverse().unwrap()).unwrap();
        prop_assert!(conj.is_ia());
    }

    #[test]
    fn unipotent_log_round_trip(seed in any::<u64>(), n in 1usize..=3, k in 2usize..=4) {
        let mut r = rng(seed);
        let d = sample::ia_derivation(&mut r, n, k);
        let f = d.exp().unwrap();
        prop_assert_eq!(log_unipotent(&f).unwrap(), d);
        let g = sample::unipotent_hopf_aut(&mut r, n, k);
        let log = log_unipotent(&g).unwrap();
        prop_assert_eq!(log.exp().unwrap(), g.clone());
        prop_assert!(log.is_lie(0.0));
    }

    #[test]
    fn bch_matches_composition(seed in any::<u64>(), n in 1usize..=2, k in 2usize..=5) {
        let mut r = rng(seed);
        let (x, y) = (sample::ia_derivation(&mut r, n, k), sample::ia_derivation(&mut r, n, k));
        let z = bch_series(&x, &y, k.max(2)).unwrap();
        prop_assert!(z.certified);
        prop_assert_eq!(z.derivation.exp().unwrap(), x.exp().unwrap().compose(&y.exp().unwrap()).unwrap());
    }

    #[test]
    fn ln_aut_inverts_exp_numerically(seed in any::<u64>(), k in 2usize..=4) {
        let mut r = rng(seed);
        let f = sample::unipotent_hopf_aut(&mut r, 2, k).map_scalar(|c| c.to_complex());
        let report = ln_aut(&f, &LogOptions::default()).unwrap();
        prop_assert!(report.verified(), "residual {}", report.residual);
        let d = report.derivation.clone();
        prop_assert!(d.exp().unwrap().distance(&f).unwrap() < 1e-8);
        prop_assert_eq!(report.hopf_preserved, Some(true));
    }

    #[test]
    fn transporter_recovers_the_action(seed in any::<u64>(), k in 2usize..=4) {
        let theta = ExactExpansion::theta_exp(2, k).unwrap();
        let u = sample::unipotent_hopf_aut(&mut rng(seed), 2, k);
        let moved = theta.act(&u).unwrap();
        prop_assert!(moved.is_grouplike(0.0));
        prop_assert_eq!(transporter(&theta, &moved).unwrap(), u);
    }

    #[test]
    fn total_johnson_is_a_homomorphism(s1 in any::<u64>(), s2 in any::<u64>(), k in 2usize..=4) {
        let (f, g) = (random_endo(s1, 2, 4), random_endo(s2, 2, 4));
        prop_assume!(f.is_invertible_on_h() && g.is_invertible_on_h());
        let theta = ExactExpansion::theta_exp(2, k).unwrap();
        let tf = total_johnson(&theta, &f).unwrap();
        let tg = total_johnson(&theta, &g).unwrap();
        let tfg = total_johnson(&theta, &f.compose(&g).unwrap()).unwrap();
        prop_assert_eq!(tfg, tf.compose(&tg).unwrap());
        prop_assert!(tf.is_hopf(0.0));
    }

    #[test]
    fn magnus_evaluation_is_multiplicative(seed in any::<u64>(), k in 2usize..=5) {
        let theta = ExactExpansion::theta_exp(2, k).unwrap();
        let e = random_endo(seed, 2, 5);
        let (v, w) = (e.images()[0].clone(), e.images()[1].clone());
        let lhs = theta.evaluate(&v.mul(&w)).unwrap();
        let rhs = theta.evaluate(&v).unwrap().checked_mul(&theta.evaluate(&w).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(
            theta.evaluate(&v.inverse()).unwrap(),
            theta.evaluate(&v).unwrap().inverse().unwrap()
        );
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), n in 1usize..=3, k in 2usize..=4) {
        let mut r = rng(seed);
        let f = sample::aut(&mut r, n, k);
        prop_assert_eq!(ExactAut::from_json_str(&f.to_json_string()).unwrap(), f.clone());
        let d = sample::derivation(&mut r, n, k);
        prop_assert_eq!(ExactDerivation::from_json_str(&d.to_json_string()).unwrap(), d.clone());
        let t = random_tensor(seed, n, k, 1);
        prop_assert_eq!(ExactTensor::from_json_str(&t.to_json_string()).unwrap(), t.clone());
        let p = sample::lie_poly(&mut r, n, k, k - 1);
        prop_assert_eq!(solvlog_core::ExactLiePoly::from_json_str(&p.to_json_string()).unwrap(), p.clone());
        let fc = f.map_scalar(|c| c.to_complex());
        let back = solvlog_core::ComplexAut::from_json_str(&fc.to_json_string()).unwrap();
        prop_assert_eq!(back.distance(&fc).unwrap(), 0.0);
        let endo = random_endo(seed, n, 4);
        prop_assert_eq!(FreeGroupEndo::from_json(&endo.to_json()).unwrap(), endo);
    }
}
