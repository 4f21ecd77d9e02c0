//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs as a plain binary (`harness = false`).

mod common;

use std::process::ExitCode;

use cohist_core::histories::Probabilities;
use cohist_core::scenarios::{build_fig1a, build_fig1b, build_interference, Scenario};
use cohist_core::{
    check_compatibility, check_consistency, decoherence_functional, spin_half_conjunction_check,
    superpose, Branch, Error, Event, HistoryFamily, StateVector, C64,
};
use common::oracle::{self, LocalProjector, H};
use common::random;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

const TOL: f64 = 1e-10;
const ZERO: f64 = 1e-12;
const CASES: u32 = 1000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn state(s: &Scenario, terms: &[(f64, &str)]) -> StateVector {
    superpose(
        terms.iter().map(|(a, l)| (C64::new(*a, 0.0), *l)),
        s.space(),
    )
    .unwrap()
}

fn family<'a>(s: &'a Scenario, name: &str) -> &'a HistoryFamily {
    s.family(name)
        .unwrap_or_else(|| panic!("scenario {} lacks {name}", s.name()))
}

fn probs(fam: &HistoryFamily) -> Result<Probabilities, String> {
    Probabilities::of(fam, TOL).map_err(|e| format!("{}: {e}", fam.name()))
}

fn branch(names: &[&str]) -> Branch {
    Branch::new(names.iter().copied())
}

/// Component of `chain` outside the ray of the unit vector `target`.
fn off_ray(chain: &StateVector, target: &StateVector) -> f64 {
    let overlap = target.inner(chain).unwrap();
    chain.add(&target.scale(-overlap)).unwrap().norm()
}

fn criterion_1() -> Outcome {
    let s = build_fig1b();
    let start = state(&s, &[(1.0, "a,E,F")]);
    let after = s.steps()[1]
        .apply(&s.steps()[0].apply(&start).unwrap())
        .unwrap();
    let d = after.distance(&state(&s, &[(1.0, "f,E,F")])).unwrap();
    ensure(d <= TOL, format!("‖U2U1|a,E,F⟩ − |f,E,F⟩‖ = {d:e}"))?;
    Ok(format!("‖U2U1|a,E,F⟩ − |f,E,F⟩‖ = {d:.1e}"))
}

fn criterion_2() -> Outcome {
    let s = build_fig1b();
    let fam = family(&s, "eq7");
    let v = check_consistency(fam, TOL);
    ensure(
        v.consistent,
        format!("eq7 inconsistent, max off-diagonal {:e}", v.max_offdiagonal),
    )?;
    let p = probs(fam)?;
    let f = p.of_branch(&branch(&["s", "f", "EF*"])).unwrap();
    let e = p.of_branch(&branch(&["s", "e", "E*F"])).unwrap();
    ensure((f - 1.0).abs() <= TOL, format!("Pr(F* branch) = {f}"))?;
    ensure(e <= ZERO, format!("Pr(E* branch) = {e:e}"))?;
    Ok(format!("eq7 consistent; Pr(F*) = {f}, Pr(E*) = {e:.1e}"))
}

/// Oracle description of the `fig1a` setup: slots photon, C, D.
fn fig1a_oracle_weights() -> std::collections::BTreeMap<Vec<String>, f64> {
    let steps = vec![
        oracle::first_splitter(),
        oracle::detection(vec![("c", 1, "C"), ("d", 2, "D")]),
    ];
    let c = LocalProjector::ray(&[0], &[(1.0, "c")]);
    let d = LocalProjector::ray(&[0], &[(1.0, "d")]);
    let cd = LocalProjector::ray(&[1, 2], &[(1.0, "C*,D")]);
    let dc = LocalProjector::ray(&[1, 2], &[(1.0, "C,D*")]);
    oracle::history_weights(
        &oracle::ket(&[(1.0, "a,C,D")]),
        &steps,
        &[vec![("c", &c), ("d", &d)], vec![("C*D", &cd), ("CD*", &dc)]],
    )
}

fn criterion_3() -> Outcome {
    let s = build_fig1a();
    let fam = family(&s, "eq5");
    let v = check_consistency(fam, TOL);
    ensure(
        v.consistent,
        format!("eq5 inconsistent, max off-diagonal {:e}", v.max_offdiagonal),
    )?;
    let p = probs(fam)?;
    let weights = fig1a_oracle_weights();
    let oracle_c: f64 = weights
        .iter()
        .filter(|(k, _)| k[1] == "C*D")
        .map(|(_, w)| w)
        .sum();
    let oracle_d: f64 = weights
        .iter()
        .filter(|(k, _)| k[1] == "CD*")
        .map(|(_, w)| w)
        .sum();
    let pc = p.event(&Event::new().at(2, "C*D"));
    let pd = p.event(&Event::new().at(2, "CD*"));
    for (name, engine, reference) in [("C*", pc, oracle_c), ("D*", pd, oracle_d)] {
        ensure(
            (engine - 0.5).abs() <= TOL,
            format!("Pr({name}) = {engine}"),
        )?;
        ensure(
            (engine - reference).abs() <= TOL,
            format!("Pr({name}) = {engine}, oracle {reference}"),
        )?;
    }
    let cond = p
        .conditional(&Event::new().at(2, "C*D"), &Event::new().at(1, "c"))
        .map_err(|e| e.to_string())?;
    ensure(
        (cond - 1.0).abs() <= TOL,
        format!("Pr(c at t1 | C*) = {cond}"),
    )?;
    Ok(format!(
        "eq5 consistent; Pr(C*) = {pc}, Pr(D*) = {pd} (oracle agrees); Pr(c | C*) = {cond}"
    ))
}

fn criterion_4() -> Outcome {
    let s = build_fig1b();
    let fam = family(&s, "eq8");
    let v = check_consistency(fam, TOL);
    ensure(
        v.consistent,
        format!("eq8 inconsistent, max off-diagonal {:e}", v.max_offdiagonal),
    )?;
    let p = probs(fam)?;

    let steps = vec![
        oracle::first_splitter(),
        oracle::second_splitter(),
        oracle::detection(vec![("e", 1, "E"), ("f", 2, "F")]),
    ];
    let c = LocalProjector::ray(&[0], &[(1.0, "c")]);
    let d = LocalProjector::ray(&[0], &[(1.0, "d")]);
    let u = LocalProjector::ray(&[0], &[(H, "e"), (H, "f")]);
    let vv = LocalProjector::ray(&[0], &[(-H, "e"), (H, "f")]);
    let big_u = LocalProjector::ray(&[1, 2], &[(H, "E*,F"), (H, "E,F*")]);
    let big_v = LocalProjector::ray(&[1, 2], &[(-H, "E*,F"), (H, "E,F*")]);
    let weights = oracle::history_weights(
        &oracle::ket(&[(1.0, "a,E,F")]),
        &steps,
        &[
            vec![("c", &c), ("d", &d)],
            vec![("u", &u), ("v", &vv)],
            vec![("U", &big_u), ("V", &big_v)],
        ],
    );

    let mut seen = Vec::new();
    for (names, target) in [
        (["c", "u", "U"], [(H, "∅,E*,F"), (H, "∅,E,F*")]),
        (["d", "v", "V"], [(-H, "∅,E*,F"), (H, "∅,E,F*")]),
    ] {
        let b = branch(&names);
        let engine = p.of_branch(&b).unwrap();
        let key: Vec<String> = names.iter().map(|n| n.to_string()).collect();
        let reference = weights[&key];
        ensure((engine - 0.5).abs() <= TOL, format!("Pr({b}) = {engine}"))?;
        ensure(
            (engine - reference).abs() <= TOL,
            format!("Pr({b}) = {engine}, oracle {reference}"),
        )?;
        let chain = fam.chain_vector(&b).unwrap();
        let miss = off_ray(&chain, &state(&s, &target));
        ensure(
            miss <= TOL,
            format!("{b} ends {miss:e} away from its pointer ray"),
        )?;
        seen.push(engine);
    }
    let others: f64 = p
        .rows()
        .iter()
        .filter(|(b, _)| b != &branch(&["c", "u", "U"]) && b != &branch(&["d", "v", "V"]))
        .map(|(_, w)| w)
        .sum();
    ensure(
        others <= ZERO,
        format!("remaining branches carry {others:e}"),
    )?;
    Ok(format!(
        "eq8 consistent; Pr(U) = {}, Pr(V) = {} (oracle agrees)",
        seen[0], seen[1]
    ))
}

fn criterion_5() -> Outcome {
    let s = build_fig1a();
    let fam = family(&s, "eq10");
    let p = probs(fam)?;
    let nonzero: Vec<_> = p.rows().iter().filter(|(_, w)| *w > ZERO).collect();
    ensure(
        nonzero.len() == 1,
        format!("{} nonzero branches", nonzero.len()),
    )?;
    let (b, w) = nonzero[0];
    ensure(*b == branch(&["s", "S"]), format!("nonzero branch is {b}"))?;
    ensure((w - 1.0).abs() <= TOL, format!("Pr({b}) = {w}"))?;
    let big_s = state(&s, &[(H, "∅,C*,D"), (H, "∅,C,D*")]);
    let chain = fam.chain_vector(b).unwrap();
    let d = chain.distance(&big_s).unwrap();
    ensure(d <= TOL, format!("chain vector is {d:e} from |S⟩"))?;
    Ok(format!(
        "single branch {b} with Pr = {w}, ending {d:.1e} from |S⟩"
    ))
}

fn criterion_6() -> Outcome {
    let a = build_fig1a();
    let b = build_fig1b();
    let v78 = check_compatibility(family(&b, "eq7"), family(&b, "eq8"), TOL)
        .map_err(|e| e.to_string())?;
    ensure(!v78.compatible, "eq7 and eq8 reported compatible")?;
    ensure(
        v78.has_witness(1, "s", "c"),
        format!("no t1 witness for eq7/eq8: {:?}", v78.witness_times()),
    )?;
    let v510 = check_compatibility(family(&a, "eq5"), family(&a, "eq10"), TOL)
        .map_err(|e| e.to_string())?;
    ensure(!v510.compatible, "eq5 and eq10 reported compatible")?;
    ensure(
        v510.has_witness(2, "C*D", "S"),
        format!("no t2 witness for eq5/eq10: {:?}", v510.witness_times()),
    )?;
    let w = v510.witnesses().iter().find(|w| w.time == 2).unwrap();
    Ok(format!(
        "eq7/eq8 witness at t1; eq5/eq10 witness at t2 ([{}, {}] = {:.3})",
        w.left, w.right, w.norm
    ))
}

fn criterion_7() -> Outcome {
    let s = build_fig1a();
    let p5 = probs(family(&s, "eq5"))?;
    let p12 = probs(family(&s, "eq12"))?;
    let mut msg = Vec::new();
    for name in ["C*D", "CD*"] {
        let e = Event::new().at(2, name);
        let (x, y) = (p5.event(&e), p12.event(&e));
        ensure(
            (x - y).abs() <= TOL,
            format!("Pr({name}): eq5 {x}, eq12 {y}"),
        )?;
        msg.push(format!("Pr({name}) {x} = {y}"));
    }
    Ok(msg.join("; "))
}

fn criterion_8() -> Outcome {
    let r = spin_half_conjunction_check();
    ensure(
        (r.commutator_spectral - 0.5).abs() <= TOL,
        format!("spectral norm {}", r.commutator_spectral),
    )?;
    ensure(
        r.product_idempotence_residual >= 0.2,
        format!("idempotence residual {}", r.product_idempotence_residual),
    )?;
    ensure(!r.product_is_projector, "product accepted as a projector")?;
    Ok(format!(
        "‖[Px, Pz]‖ = {:.12}; ‖(PxPz)² − PxPz‖ = {:.4}",
        r.commutator_spectral, r.product_idempotence_residual
    ))
}

fn runner() -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn property(name: &str, test: impl Fn(u64) -> Result<(), TestCaseError>) -> Result<String, String> {
    runner()
        .run(&any::<u64>(), test)
        .map_err(|e| match e {
            TestError::Fail(why, seed) => format!("{name}: {why} (seed {seed})"),
            TestError::Abort(why) => format!("{name}: aborted: {why}"),
        })?;
    Ok(name.to_string())
}

fn criterion_9() -> Outcome {
    let mut done = Vec::new();
    done.push(property("hermitian-psd", |seed| {
        let fam = random::generic_family(&mut random::rng(seed));
        let d = decoherence_functional(&fam);
        prop_assert!(
            d.hermiticity_residual() <= 1e-12,
            "hermiticity {}",
            d.hermiticity_residual()
        );
        prop_assert!(
            d.min_eigenvalue() >= -1e-12,
            "min eigenvalue {}",
            d.min_eigenvalue()
        );
        Ok(())
    })?);
    done.push(property("total-sum", |seed| {
        let fam = random::generic_family(&mut random::rng(seed));
        let total = decoherence_functional(&fam).total();
        prop_assert!((total - C64::new(1.0, 0.0)).norm() <= TOL, "total {total}");
        Ok(())
    })?);
    done.push(property("refusal", |seed| {
        let mut rng = random::rng(seed);
        let fam = if seed % 2 == 0 {
            random::generic_family(&mut rng)
        } else {
            random::consistent_family(&mut rng)
        };
        let verdict = check_consistency(&fam, TOL);
        match Probabilities::of(&fam, TOL) {
            Err(Error::InconsistentFamily { .. }) => prop_assert!(!verdict.consistent),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
            Ok(_) => prop_assert!(
                verdict.consistent,
                "probabilities for max off-diagonal {}",
                verdict.max_offdiagonal
            ),
        }
        Ok(())
    })?);
    done.push(property("unitarity", |seed| {
        use rand::Rng;
        let mut rng = random::rng(seed);
        let n = rng.random_range(1..=8);
        let k = rng.random_range(0..=n);
        let space = random::space(n);
        let spec = random::isometric_rules(&space, k, &mut rng);
        let step = cohist_core::compile_step(&space, &spec)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let m = step.matrix();
        let id = nalgebra::DMatrix::<C64>::identity(n, n);
        prop_assert!((m.adjoint() * m - &id).norm() <= TOL);
        prop_assert!((m * m.adjoint() - &id).norm() <= TOL);
        for rule in spec.rules() {
            let image = step
                .apply(&StateVector::basis(&space, &rule.source).unwrap())
                .unwrap();
            let target = superpose(rule.targets.iter().cloned(), &space).unwrap();
            prop_assert!(image.distance(&target).unwrap() <= TOL);
        }
        Ok(())
    })?);
    done.push(property("coarse-graining", |seed| {
        use rand::seq::SliceRandom;
        use rand::Rng;
        let mut rng = random::rng(seed);
        let fam = random::consistent_family(&mut rng);
        let fine = Probabilities::of(&fam, TOL).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let time = rng.random_range(1..=fam.len());
        let mut names: Vec<String> = fam
            .sample_space(time)
            .unwrap()
            .names()
            .map(str::to_string)
            .collect();
        names.shuffle(&mut rng);
        let take = rng.random_range(1..=names.len());
        let members: Vec<&str> = names[..take].iter().map(String::as_str).collect();
        let coarse = fam.coarse_grain(time, &members, "merged").unwrap();
        let coarse_p =
            Probabilities::of(&coarse, TOL).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for (b, w) in coarse_p.rows() {
            let expected: f64 = fine
                .rows()
                .iter()
                .filter(|(fb, _)| {
                    fb.choices()
                        .iter()
                        .zip(b.choices())
                        .enumerate()
                        .all(|(i, (f, c))| {
                            if i + 1 == time && c == "merged" {
                                members.contains(&f.as_str())
                            } else {
                                f == c
                            }
                        })
                })
                .map(|(_, fw)| fw)
                .sum();
            prop_assert!((w - expected).abs() <= TOL, "{b}: {w} vs {expected}");
        }
        Ok(())
    })?);
    Ok(format!(
        "{} properties × {CASES} cases: {}",
        done.len(),
        done.join(", ")
    ))
}

fn criterion_10() -> Outcome {
    let s = build_interference();
    let fam = family(&s, "arms");
    let v = check_consistency(fam, TOL);
    ensure(!v.consistent, "arm-basis family reported consistent")?;
    ensure(
        (v.max_offdiagonal - 0.25).abs() <= TOL,
        format!("max off-diagonal {}", v.max_offdiagonal),
    )?;
    match Probabilities::of(fam, TOL) {
        Err(Error::InconsistentFamily { .. }) => {}
        Err(e) => return Err(format!("unexpected error {e}")),
        Ok(_) => return Err("probabilities were assigned".into()),
    }
    Ok(format!(
        "inconsistent, max off-diagonal {}, probabilities refused",
        v.max_offdiagonal
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("interference identity", criterion_1),
        ("superposition family", criterion_2),
        ("arm family and retrodiction", criterion_3),
        ("pointer-superposition family", criterion_4),
        ("single cat branch", criterion_5),
        ("incompatibility witnesses", criterion_6),
        ("marginal agreement", criterion_7),
        ("spin-half conjunction", criterion_8),
        ("property suite", criterion_9),
        ("negative control", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = std::time::Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({secs:.2}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "{}/{} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
