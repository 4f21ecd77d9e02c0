//! Seeded random instances for the property suites.

use std::sync::Arc;

use cohist_core::dynamics::Rule;
use cohist_core::histories::FamilyBuilder;
use cohist_core::{
    BasisLabel, HilbertSpace, HistoryFamily, PartialUnitarySpec, Projector, StateVector,
    UnitaryStep, C64,
};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn space(n: usize) -> Arc<HilbertSpace> {
    HilbertSpace::from_labels((0..n).map(|i| format!("q{i}"))).unwrap()
}

fn complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let m = DMatrix::from_fn(n, n, |_, _| complex(rng));
    m.qr().q()
}

pub fn unit_state(space: &Arc<HilbertSpace>, rng: &mut ChaCha8Rng) -> StateVector {
    let v = DVector::from_fn(space.dim(), |_, _| complex(rng));
    let v = &v / C64::new(v.norm(), 0.0);
    StateVector::from_amplitudes(space, v).unwrap()
}

/// `k` rules whose targets are orthonormal: the first `k` columns of a
/// random unitary, attached to a random choice of sources.
pub fn isometric_rules(
    space: &Arc<HilbertSpace>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> PartialUnitarySpec {
    let n = space.dim();
    let u = unitary(n, rng);
    let mut sources: Vec<usize> = (0..n).collect();
    sources.shuffle(rng);
    let rules = sources[..k]
        .iter()
        .enumerate()
        .map(|(col, &src)| Rule {
            source: space.label(src).clone(),
            targets: (0..n)
                .map(|row| (u[(row, col)], space.label(row).clone()))
                .collect(),
        })
        .collect();
    PartialUnitarySpec::new("random isometry", rules).unwrap()
}

/// Every label mapped by a random unitary.
pub fn random_step(space: &Arc<HilbertSpace>, rng: &mut ChaCha8Rng) -> UnitaryStep {
    UnitaryStep::compile(space, &isometric_rules(space, space.dim(), rng)).unwrap()
}

fn label_ray(space: &Arc<HilbertSpace>, labels: &[usize]) -> Projector {
    let vs: Vec<StateVector> = labels
        .iter()
        .map(|&i| StateVector::basis(space, space.label(i).clone()).unwrap())
        .collect();
    Projector::from_vectors(&vs).unwrap()
}

/// Split `0..n` into random consecutive groups after shuffling; with
/// `drop_some` a random subset of groups is left out so completion has work.
fn groups(n: usize, drop_some: bool, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut out = Vec::new();
    let mut rest = &order[..];
    while !rest.is_empty() {
        let take = rng.random_range(1..=rest.len().min(3));
        out.push(rest[..take].to_vec());
        rest = &rest[take..];
    }
    if drop_some && out.len() > 1 && rng.random_bool(0.5) {
        out.truncate(rng.random_range(1..out.len()));
    }
    out
}

/// Sample space from a random orthonormal basis grouped into projectors.
fn generic_sample(space: &Arc<HilbertSpace>, rng: &mut ChaCha8Rng) -> Vec<(String, Projector)> {
    let n = space.dim();
    let u = unitary(n, rng);
    groups(n, true, rng)
        .into_iter()
        .enumerate()
        .map(|(g, cols)| {
            let vs: Vec<StateVector> = cols
                .iter()
                .map(|&c| StateVector::from_amplitudes(space, u.column(c).into_owned()).unwrap())
                .collect();
            (format!("p{g}"), Projector::from_vectors(&vs).unwrap())
        })
        .collect()
}

/// Random dynamics and random projective sample spaces; almost never
/// consistent once there are two or more times.
pub fn generic_family(rng: &mut ChaCha8Rng) -> HistoryFamily {
    let n = rng.random_range(2..=6);
    let t = rng.random_range(1..=3);
    let space = space(n);
    let steps: Vec<UnitaryStep> = (0..t).map(|_| random_step(&space, rng)).collect();
    let initial = unit_state(&space, rng);
    let mut b: FamilyBuilder = HistoryFamily::builder("generic", initial, steps);
    for time in 1..=t {
        if rng.random_bool(0.85) {
            b = b.sample(time, generic_sample(&space, rng));
        }
    }
    b.build().unwrap()
}

/// Permutation-with-phase dynamics and sample spaces diagonal in the label
/// basis. Each basis label follows a single path, so distinct histories end
/// on disjoint labels and the family is consistent by construction.
pub fn consistent_family(rng: &mut ChaCha8Rng) -> HistoryFamily {
    let n = rng.random_range(2..=6);
    let t = rng.random_range(1..=3);
    let space = space(n);
    let steps: Vec<UnitaryStep> = (0..t)
        .map(|_| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let rules = (0..n)
                .map(|i| {
                    let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
                    Rule {
                        source: space.label(i).clone(),
                        targets: vec![(phase, space.label(perm[i]).clone())],
                    }
                })
                .collect();
            UnitaryStep::compile(
                &space,
                &PartialUnitarySpec::new("permutation", rules).unwrap(),
            )
            .unwrap()
        })
        .collect();
    let initial = unit_state(&space, rng);
    let mut b = HistoryFamily::builder("diagonal", initial, steps);
    for time in 1..=t {
        let ps: Vec<(String, Projector)> = groups(n, true, rng)
            .into_iter()
            .enumerate()
            .map(|(g, labels)| (format!("p{g}"), label_ray(&space, &labels)))
            .collect();
        b = b.sample(time, ps);
    }
    b.build().unwrap()
}

pub fn label(space: &HilbertSpace, i: usize) -> BasisLabel {
    space.label(i).clone()
}
