//! Brute-force amplitude bookkeeping that shares no code with the engine.
//!
//! States are sparse maps from token tuples to amplitudes. Steps are plain
//! functions taking one basis tuple to a short list of weighted tuples,
//! written straight from the interferometer's physics. Histories are walked
//! depth first, and every path whose amplitude vanishes is pruned.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

pub type Tokens = Vec<String>;
pub type Ket = BTreeMap<Tokens, C64>;
pub type Step = Box<dyn Fn(&[String]) -> Vec<(C64, Tokens)>>;

pub const H: f64 = std::f64::consts::FRAC_1_SQRT_2;
const PRUNE: f64 = 1e-300;

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn tokens(label: &str) -> Tokens {
    label.split(',').map(str::to_string).collect()
}

pub fn ket(terms: &[(f64, &str)]) -> Ket {
    let mut k = Ket::new();
    for (amp, label) in terms {
        *k.entry(tokens(label)).or_default() += re(*amp);
    }
    k
}

pub fn norm_sqr(k: &Ket) -> f64 {
    k.values().map(|a| a.norm_sqr()).sum()
}

pub fn inner(a: &Ket, b: &Ket) -> C64 {
    a.iter()
        .filter_map(|(l, x)| b.get(l).map(|y| x.conj() * y))
        .sum()
}

pub fn evolve(k: &Ket, step: &Step) -> Ket {
    let mut out = Ket::new();
    for (label, amp) in k {
        for (coef, target) in step(label) {
            *out.entry(target).or_default() += amp * coef;
        }
    }
    out.retain(|_, a| a.norm() > PRUNE);
    out
}

fn replaced(label: &[String], pos: usize, token: &str) -> Tokens {
    let mut t = label.to_vec();
    t[pos] = token.to_string();
    t
}

/// `a ↦ (c + d)/√2` on the photon slot; everything else is left alone.
pub fn first_splitter() -> Step {
    Box::new(|l: &[String]| match l[0].as_str() {
        "a" => vec![(re(H), replaced(l, 0, "c")), (re(H), replaced(l, 0, "d"))],
        _ => vec![(re(1.0), l.to_vec())],
    })
}

/// `c ↦ (e + f)/√2`, `d ↦ (−e + f)/√2`.
pub fn second_splitter() -> Step {
    Box::new(|l: &[String]| match l[0].as_str() {
        "c" => vec![(re(H), replaced(l, 0, "e")), (re(H), replaced(l, 0, "f"))],
        "d" => vec![(re(-H), replaced(l, 0, "e")), (re(H), replaced(l, 0, "f"))],
        _ => vec![(re(1.0), l.to_vec())],
    })
}

/// Detectors given as `(mode, slot, ready token)`; a photon in `mode` meets a
/// ready detector and is absorbed, starring the detector token.
pub fn detection(detectors: Vec<(&'static str, usize, &'static str)>) -> Step {
    Box::new(move |l: &[String]| {
        for (mode, slot, ready) in &detectors {
            if l[0] == *mode && l[*slot] == *ready {
                let mut t = replaced(l, 0, "∅");
                t[*slot] = format!("{ready}*");
                return vec![(re(1.0), t)];
            }
        }
        vec![(re(1.0), l.to_vec())]
    })
}

/// Projector onto the span of orthonormal local vectors on `slots`, identity
/// on the rest.
pub struct LocalProjector {
    pub slots: Vec<usize>,
    pub vectors: Vec<Vec<(C64, Tokens)>>,
}

impl LocalProjector {
    pub fn ray(slots: &[usize], terms: &[(f64, &str)]) -> Self {
        Self {
            slots: slots.to_vec(),
            vectors: vec![terms.iter().map(|(a, l)| (re(*a), tokens(l))).collect()],
        }
    }

    pub fn apply(&self, k: &Ket) -> Ket {
        // group by the tokens outside the projector's slots
        let mut contexts: BTreeMap<Tokens, Vec<(&Tokens, C64)>> = BTreeMap::new();
        for (label, amp) in k {
            let ctx: Tokens = label
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    if self.slots.contains(&i) {
                        String::new()
                    } else {
                        t.clone()
                    }
                })
                .collect();
            contexts.entry(ctx).or_default().push((label, *amp));
        }
        let mut out = Ket::new();
        for (ctx, members) in contexts {
            let local = |label: &Tokens| -> Tokens {
                self.slots.iter().map(|&s| label[s].clone()).collect()
            };
            for v in &self.vectors {
                let overlap: C64 = members
                    .iter()
                    .map(|(label, amp)| {
                        let l = local(label);
                        v.iter()
                            .filter(|(_, t)| *t == l)
                            .map(|(c, _)| c.conj() * amp)
                            .sum::<C64>()
                    })
                    .sum();
                if overlap.norm() <= PRUNE {
                    continue;
                }
                for (c, t) in v {
                    let mut full = ctx.clone();
                    for (slot, token) in self.slots.iter().zip(t) {
                        full[*slot] = token.clone();
                    }
                    *out.entry(full).or_default() += c * overlap;
                }
            }
        }
        out.retain(|_, a| a.norm() > PRUNE);
        out
    }
}

/// Final (unnormalized) state of one history: the named projector at each time.
pub fn chain(initial: &Ket, steps: &[Step], projectors: &[&LocalProjector]) -> Ket {
    let mut state = initial.clone();
    for (step, p) in steps.iter().zip(projectors) {
        state = p.apply(&evolve(&state, step));
        if state.is_empty() {
            break;
        }
    }
    state
}

/// Weights of every history in the product of the given per-time
/// alternatives, found by depth-first path enumeration with pruning of
/// vanished prefixes. Only the listed alternatives are walked; the engine's
/// completion projectors are not.
pub fn history_weights(
    initial: &Ket,
    steps: &[Step],
    alternatives: &[Vec<(&str, &LocalProjector)>],
) -> BTreeMap<Vec<String>, f64> {
    fn walk(
        depth: usize,
        state: Ket,
        steps: &[Step],
        alternatives: &[Vec<(&str, &LocalProjector)>],
        prefix: &mut Vec<String>,
        out: &mut BTreeMap<Vec<String>, f64>,
    ) {
        if depth == steps.len() {
            out.insert(prefix.clone(), norm_sqr(&state));
            return;
        }
        let evolved = evolve(&state, &steps[depth]);
        for (name, p) in &alternatives[depth] {
            let next = p.apply(&evolved);
            prefix.push(name.to_string());
            if next.is_empty() {
                out.insert(prefix.clone(), 0.0);
            } else {
                walk(depth + 1, next, steps, alternatives, prefix, out);
            }
            prefix.pop();
        }
    }
    let mut out = BTreeMap::new();
    walk(
        0,
        initial.clone(),
        steps,
        alternatives,
        &mut Vec::new(),
        &mut out,
    );
    out
}
