use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::label::BasisLabel;
use super::operator::{spectral_norm, Operator};
use super::space::{ensure_same, HilbertSpace};
use super::state::StateVector;
use super::C64;
use crate::{Error, Result, DEFAULT_TOL, ROUNDING_TOL};

/// Orthogonal projector: Hermitian, idempotent, with integral trace.
#[derive(Clone, Debug)]
pub struct Projector {
    operator: Operator,
    rank: usize,
}

impl Projector {
    pub fn new(operator: Operator) -> Result<Self> {
        Self::with_tolerance(operator, DEFAULT_TOL, ROUNDING_TOL)
    }

    pub fn with_tolerance(operator: Operator, tol: f64, rank_tol: f64) -> Result<Self> {
        let m = operator.matrix();
        let idempotence = (m * m - m).norm();
        if idempotence > tol {
            return Err(Error::NotProjector(format!("‖P² − P‖ = {idempotence:.3e}")));
        }
        let hermiticity = operator.hermiticity_residual();
        if hermiticity > tol {
            return Err(Error::NotProjector(format!("‖P − P†‖ = {hermiticity:.3e}")));
        }
        let trace = operator.trace();
        let rank = trace.re.round();
        if (trace.re - rank).abs() > rank_tol || trace.im.abs() > rank_tol {
            return Err(Error::NotProjector(format!(
                "trace {trace} is not an integer"
            )));
        }
        Ok(Self {
            operator,
            rank: rank as usize,
        })
    }

    /// `Σ v v†` over vectors already known to be orthonormal.
    pub(crate) fn from_orthonormal(space: &Arc<HilbertSpace>, basis: &[DVector<C64>]) -> Self {
        let n = space.dim();
        let mut m = DMatrix::zeros(n, n);
        for v in basis {
            m += v * v.adjoint();
        }
        Self {
            operator: Operator::wrap(space.clone(), m),
            rank: basis.len(),
        }
    }

    /// Projector onto the span of `vs`; numerically dependent inputs are dropped.
    pub fn from_vectors(vs: &[StateVector]) -> Result<Self> {
        let first = vs.first().ok_or(Error::ZeroSpan)?;
        for v in vs {
            ensure_same(first.space(), v.space())?;
        }
        let raw: Vec<DVector<C64>> = vs.iter().map(|v| v.amplitudes().clone()).collect();
        let basis = orthonormalize(&raw, DEFAULT_TOL);
        if basis.is_empty() {
            return Err(Error::ZeroSpan);
        }
        Ok(Self::from_orthonormal(first.space(), &basis))
    }

    /// Rank-one projector onto the ray through `v`.
    pub fn ray(v: &StateVector) -> Result<Self> {
        Self::from_vectors(std::slice::from_ref(v))
    }

    pub fn identity(space: &Arc<HilbertSpace>) -> Self {
        Self {
            operator: Operator::identity(space),
            rank: space.dim(),
        }
    }

    /// `I − P`.
    pub fn complement(&self) -> Projector {
        let space = self.space();
        let n = space.dim();
        let m = DMatrix::identity(n, n) - self.matrix();
        Self {
            operator: Operator::wrap(space.clone(), m),
            rank: n - self.rank,
        }
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        self.operator.matrix()
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        self.operator.space()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn trace(&self) -> f64 {
        self.operator.trace().re
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.operator.apply(v)
    }

    /// The operator `self · other`, a projector only when the two commute.
    pub fn product(&self, other: &Projector) -> Result<Operator> {
        self.operator.compose(&other.operator)
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass. Vectors whose
/// residual norm drops below `tol` are discarded.
pub fn orthonormalize(vectors: &[DVector<C64>], tol: f64) -> Vec<DVector<C64>> {
    let mut basis: Vec<DVector<C64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&r);
                r.axpy(-overlap, b, C64::new(1.0, 0.0));
            }
        }
        let norm = r.norm();
        if norm >= tol {
            basis.push(r.unscale(norm));
        }
    }
    basis
}

pub fn projector_from_vectors(vs: &[StateVector]) -> Result<Projector> {
    Projector::from_vectors(vs)
}

fn commutator(p: &Projector, q: &Projector) -> Result<DMatrix<C64>> {
    ensure_same(p.space(), q.space())?;
    Ok(p.matrix() * q.matrix() - q.matrix() * p.matrix())
}

/// `‖PQ − QP‖_F`.
pub fn commutator_norm(p: &Projector, q: &Projector) -> Result<f64> {
    Ok(commutator(p, q)?.norm())
}

/// Largest singular value of `PQ − QP`.
pub fn commutator_spectral_norm(p: &Projector, q: &Projector) -> Result<f64> {
    Ok(spectral_norm(&commutator(p, q)?))
}

/// Embed vectors given on a subset of factors into the full space, tensoring
/// with every context of the remaining factors.
///
/// Each local label lists one token per entry of `factors`, in that order.
/// The returned list spans `span(local) ⊗ (everything else)`, so the
/// projector onto it acts as the identity on the other factors.
pub fn lift_vectors(
    space: &Arc<HilbertSpace>,
    factors: &[&str],
    local: &[Vec<(C64, BasisLabel)>],
) -> Result<Vec<StateVector>> {
    let positions = factors
        .iter()
        .map(|name| space.factor_position(name))
        .collect::<Result<Vec<_>>>()?;
    for vector in local {
        for (_, label) in vector {
            if label.arity() != positions.len() {
                return Err(Error::InvalidLabel(label.to_string()));
            }
            for (token, &pos) in label.parts().iter().zip(&positions) {
                if !space.factors()[pos].has_token(token) {
                    return Err(Error::UnknownLabel(label.to_string()));
                }
            }
        }
    }

    let mut contexts: Vec<&BasisLabel> = Vec::new();
    for label in space.labels() {
        let fresh = contexts.iter().all(|seen| {
            (0..label.arity())
                .filter(|pos| !positions.contains(pos))
                .any(|pos| seen.part(pos) != label.part(pos))
        });
        if fresh {
            contexts.push(label);
        }
    }

    let mut out = Vec::with_capacity(contexts.len() * local.len());
    for ctx in contexts {
        for vector in local {
            let mut amps = DVector::zeros(space.dim());
            for (coef, label) in vector {
                let replacements: Vec<(usize, &str)> = positions
                    .iter()
                    .copied()
                    .zip(label.parts().iter().map(String::as_str))
                    .collect();
                if let Some(i) = space.index_of(&ctx.with_parts(&replacements)) {
                    amps[i] += *coef;
                }
            }
            out.push(StateVector::wrap(space.clone(), amps));
        }
    }
    Ok(out)
}
