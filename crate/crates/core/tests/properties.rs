mod common;

use cohist_core::{
    commutator_norm, decoherence_functional, inner_product, projector_from_vectors, HistoryFamily,
    Projector, StateVector, C64,
};
use common::random;
use proptest::prelude::*;
use rand::Rng;

fn unit_pair(seed: u64) -> (StateVector, StateVector) {
    let mut rng = random::rng(seed);
    let space = random::space(rng.random_range(1..=8));
    (
        random::unit_state(&space, &mut rng),
        random::unit_state(&space, &mut rng),
    )
}

proptest! {
    #[test]
    fn inner_product_is_conjugate_symmetric(seed in any::<u64>()) {
        let (u, v) = unit_pair(seed);
        let uv = inner_product(&u, &v).unwrap();
        let vu = inner_product(&v, &u).unwrap();
        prop_assert!((uv - vu.conj()).norm() <= 1e-12);
        prop_assert!(uv.norm() <= u.norm() * v.norm() + 1e-12);
    }

    #[test]
    fn spans_give_valid_projectors(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let n = rng.random_range(1..=8);
        let space = random::space(n);
        let k = rng.random_range(1..=n);
        let mut vs: Vec<StateVector> = (0..k).map(|_| random::unit_state(&space, &mut rng)).collect();
        // a dependent vector must not raise the rank
        vs.push(vs[0].scale(C64::new(0.0, -2.0)).add(&vs[k - 1]).unwrap());
        let p = projector_from_vectors(&vs).unwrap();
        prop_assert_eq!(p.rank(), k);
        let m = p.matrix();
        prop_assert!((m * m - m).norm() <= 1e-10);
        prop_assert!((m - m.adjoint()).norm() <= 1e-10);
        prop_assert!((p.trace() - k as f64).abs() <= 1e-8);
        prop_assert!(Projector::new(p.operator().clone()).is_ok());
    }

    #[test]
    fn projection_never_lengthens(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let n = rng.random_range(1..=8);
        let space = random::space(n);
        let basis: Vec<StateVector> = (0..rng.random_range(1..=n)).map(|_| random::unit_state(&space, &mut rng)).collect();
        let p = projector_from_vectors(&basis).unwrap();
        let v = random::unit_state(&space, &mut rng).scale(C64::new(rng.random_range(0.1..3.0), 0.0));
        prop_assert!(p.apply(&v).unwrap().norm() <= v.norm() + 1e-10);
    }

    #[test]
    fn commutator_is_symmetric_and_vanishes_on_shared_bases(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let n = rng.random_range(2..=8);
        let space = random::space(n);
        let u = random::unitary(n, &mut rng);
        let columns = |cols: std::ops::Range<usize>| -> Projector {
            let vs: Vec<StateVector> = cols
                .map(|c| StateVector::from_amplitudes(&space, u.column(c).into_owned()).unwrap())
                .collect();
            projector_from_vectors(&vs).unwrap()
        };
        let split = rng.random_range(1..n);
        let (p, q) = (columns(0..split), columns(split..n));
        prop_assert!(commutator_norm(&p, &q).unwrap() <= 1e-12);
        let r = projector_from_vectors(&[random::unit_state(&space, &mut rng)]).unwrap();
        let pr = commutator_norm(&p, &r).unwrap();
        let rp = commutator_norm(&r, &p).unwrap();
        prop_assert!((pr - rp).abs() <= 1e-12);
    }

    #[test]
    fn chain_vectors_match_one_at_a_time(seed in any::<u64>()) {
        let fam: HistoryFamily = random::generic_family(&mut random::rng(seed));
        for (b, chain) in fam.chain_vectors() {
            prop_assert!(fam.chain_vector(&b).unwrap().distance(&chain).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn weights_are_diagonal_of_the_functional(seed in any::<u64>()) {
        let fam = random::generic_family(&mut random::rng(seed));
        let d = decoherence_functional(&fam);
        prop_assert_eq!(d.len(), fam.branch_count());
        for (i, (_, chain)) in fam.chain_vectors().iter().enumerate() {
            prop_assert!((d.weights()[i] - chain.norm_squared()).abs() <= 1e-12);
        }
    }

    #[test]
    fn diagonal_families_are_consistent(seed in any::<u64>()) {
        let fam = random::consistent_family(&mut random::rng(seed));
        let v = cohist_core::check_consistency(&fam, 1e-10);
        prop_assert!(v.consistent, "max off-diagonal {}", v.max_offdiagonal);
    }

    #[test]
    fn compilation_is_deterministic(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let n = rng.random_range(1..=6);
        let space = random::space(n);
        let k = rng.random_range(0..=n);
        let spec = random::isometric_rules(&space, k, &mut rng);
        let a = cohist_core::compile_step(&space, &spec).unwrap();
        let b = cohist_core::compile_step(&space, &spec).unwrap();
        prop_assert_eq!(a.matrix(), b.matrix());
    }
}

/// Construction is deterministic, so one pass over the built-ins covers it.
#[test]
fn scenarios_round_trip_to_identical_analyses() {
    use cohist_core::report::{analyze, AnalysisOptions};
    for name in cohist_core::scenarios::BUILTINS {
        let built = cohist_core::scenarios::builtin(name).unwrap();
        let reloaded = cohist_core::Scenario::from_json(&built.to_json()).unwrap();
        assert_eq!(
            analyze(&built, AnalysisOptions::default()),
            analyze(&reloaded, AnalysisOptions::default()),
            "{name}"
        );
    }
}
