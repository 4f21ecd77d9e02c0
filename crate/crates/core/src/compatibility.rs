//! Whether two families can be combined into one description.
//!
//! Two families on the same dynamics are compatible when every pair of
//! same-time projectors commutes and the family built from all nonzero
//! products is itself consistent.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::hilbert::{
    commutator_norm, commutator_spectral_norm, superpose, HilbertSpace, Projector, C64,
};
use crate::histories::{check_consistency, ConsistencyVerdict, HistoryFamily, SampleSpace};
use crate::{Error, Result};

/// Products with Frobenius norm at or below this are dropped from refinements.
const ZERO_PRODUCT: f64 = 1e-12;

/// A pair of same-time projectors that fails to commute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationWitness {
    pub time: usize,
    pub left: String,
    pub right: String,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Incompatibility {
    /// Every non-commuting pair, ordered by time.
    NonCommuting(Vec<CommutationWitness>),
    /// All projectors commute but the common refinement is inconsistent.
    InconsistentRefinement(ConsistencyVerdict),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompatibilityVerdict {
    pub compatible: bool,
    pub failure: Option<Incompatibility>,
}

impl CompatibilityVerdict {
    pub fn witnesses(&self) -> &[CommutationWitness] {
        match &self.failure {
            Some(Incompatibility::NonCommuting(w)) => w,
            _ => &[],
        }
    }

    /// Distinct times carrying a commutation witness.
    pub fn witness_times(&self) -> Vec<usize> {
        let mut times: Vec<usize> = self.witnesses().iter().map(|w| w.time).collect();
        times.dedup();
        times
    }

    pub fn has_witness(&self, time: usize, left: &str, right: &str) -> bool {
        self.witnesses()
            .iter()
            .any(|w| w.time == time && w.left == left && w.right == right)
    }
}

fn non_commuting(
    a: &HistoryFamily,
    b: &HistoryFamily,
    tol: f64,
) -> Result<Vec<CommutationWitness>> {
    let mut witnesses = Vec::new();
    for (sa, sb) in a.sample_spaces().iter().zip(b.sample_spaces()) {
        for (left, p) in sa.projectors() {
            for (right, q) in sb.projectors() {
                let norm = commutator_norm(p, q)?;
                if norm > tol {
                    witnesses.push(CommutationWitness {
                        time: sa.time(),
                        left: left.clone(),
                        right: right.clone(),
                        norm,
                    });
                }
            }
        }
    }
    Ok(witnesses)
}

pub fn check_compatibility(
    a: &HistoryFamily,
    b: &HistoryFamily,
    tol: f64,
) -> Result<CompatibilityVerdict> {
    a.same_dynamics(b, tol)?;
    let witnesses = non_commuting(a, b, tol)?;
    if !witnesses.is_empty() {
        return Ok(CompatibilityVerdict {
            compatible: false,
            failure: Some(Incompatibility::NonCommuting(witnesses)),
        });
    }
    let refinement = common_refinement(a, b, tol)?;
    let verdict = check_consistency(&refinement.family, tol);
    Ok(if verdict.consistent {
        CompatibilityVerdict {
            compatible: true,
            failure: None,
        }
    } else {
        CompatibilityVerdict {
            compatible: false,
            failure: Some(Incompatibility::InconsistentRefinement(verdict)),
        }
    })
}

/// Common refinement of two families together with the zero products that
/// were dropped from it.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub family: HistoryFamily,
    /// `(time, "i∧j")` for every product that vanished.
    pub dropped: Vec<(usize, String)>,
}

/// Family whose sample space at each time holds the nonzero products `P_i Q_j`,
/// named `i∧j`.
pub fn common_refinement(a: &HistoryFamily, b: &HistoryFamily, tol: f64) -> Result<Refinement> {
    a.same_dynamics(b, tol)?;
    let space = a.space();
    let mut dropped = Vec::new();
    let mut sample_spaces = Vec::with_capacity(a.len());
    for (sa, sb) in a.sample_spaces().iter().zip(b.sample_spaces()) {
        let time = sa.time();
        let mut products = Vec::new();
        for (left, p) in sa.projectors() {
            for (right, q) in sb.projectors() {
                let norm = commutator_norm(p, q)?;
                if norm > tol {
                    return Err(Error::NonCommuting {
                        time,
                        left: left.clone(),
                        right: right.clone(),
                        norm,
                    });
                }
                let name = format!("{left}∧{right}");
                let product = p.product(q)?;
                if product.frobenius_norm() <= ZERO_PRODUCT {
                    dropped.push((time, name));
                } else {
                    products.push((name, Projector::new(product)?));
                }
            }
        }
        sample_spaces.push(SampleSpace::new(time, space, products)?);
    }
    let family = HistoryFamily::new(
        format!("{}∧{}", a.name(), b.name()),
        a.initial().clone(),
        a.steps().to_vec(),
        sample_spaces,
    )?;
    Ok(Refinement { family, dropped })
}

/// Whether "P AND Q" has a projector of its own.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjunctionReport {
    pub commutator_frobenius: f64,
    pub commutator_spectral: f64,
    /// `‖(PQ)² − PQ‖_F`.
    pub product_idempotence_residual: f64,
    pub product_is_projector: bool,
}

pub fn conjunction_check(p: &Projector, q: &Projector) -> Result<ConjunctionReport> {
    let product = p.product(q)?;
    let m = product.matrix();
    let product_idempotence_residual = (m * m - m).norm();
    Ok(ConjunctionReport {
        commutator_frobenius: commutator_norm(p, q)?,
        commutator_spectral: commutator_spectral_norm(p, q)?,
        product_idempotence_residual,
        product_is_projector: Projector::new(product).is_ok(),
    })
}

/// The spin-half space `{z+, z−}` with the projectors onto `Sx = +1/2` and
/// `Sz = +1/2`, in that order.
pub fn spin_half_pair() -> (Arc<HilbertSpace>, Projector, Projector) {
    let space = HilbertSpace::from_labels(["z+", "z-"]).expect("two distinct labels");
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let x_up = superpose([(h, "z+"), (h, "z-")], &space).expect("labels exist");
    let z_up = superpose([(C64::new(1.0, 0.0), "z+")], &space).expect("labels exist");
    let px = Projector::ray(&x_up).expect("nonzero");
    let pz = Projector::ray(&z_up).expect("nonzero");
    (space, px, pz)
}

pub fn spin_half_conjunction_check() -> ConjunctionReport {
    let (_, px, pz) = spin_half_pair();
    conjunction_check(&px, &pz).expect("same space")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_half_conjunction_has_no_projector() {
        let report = spin_half_conjunction_check();
        // [P_z, P_x] = [[0, 1/2], [−1/2, 0]]: singular values 1/2, 1/2
        assert!((report.commutator_spectral - 0.5).abs() < 1e-12);
        assert!((report.commutator_frobenius - FRAC_1_SQRT_2).abs() < 1e-12);
        // (PQ)² = PQ/2 and ‖PQ‖ = 1/√2, so the residual is 1/(2√2)
        assert!((report.product_idempotence_residual - 0.5 * FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(report.product_idempotence_residual > 0.2);
        assert!(!report.product_is_projector);
    }

    #[test]
    fn projector_with_itself_is_its_own_conjunction() {
        let (_, px, _) = spin_half_pair();
        let report = conjunction_check(&px, &px).unwrap();
        assert!(report.commutator_spectral < 1e-15);
        assert!(report.product_idempotence_residual < 1e-12);
        assert!(report.product_is_projector);
    }

    #[test]
    fn spin_half_basis_resolves_identity() {
        let (space, _, pz) = spin_half_pair();
        let down = Projector::ray(&crate::StateVector::basis(&space, "z-").unwrap()).unwrap();
        let sum = pz.matrix() + down.matrix();
        assert!((sum - nalgebra::DMatrix::<C64>::identity(2, 2)).norm() < 1e-15);
    }
}
