use std::sync::Arc;

use nalgebra::DMatrix;

use super::space::{ensure_same, HilbertSpace};
use super::state::StateVector;
use super::C64;
use crate::{Error, Result};

/// Dense square matrix acting on a labeled space.
#[derive(Clone, Debug)]
pub struct Operator {
    space: Arc<HilbertSpace>,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(space: &Arc<HilbertSpace>, matrix: DMatrix<C64>) -> Result<Self> {
        let n = space.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                found: if matrix.nrows() != n {
                    matrix.nrows()
                } else {
                    matrix.ncols()
                },
            });
        }
        Ok(Self {
            space: space.clone(),
            matrix,
        })
    }

    pub(crate) fn wrap(space: Arc<HilbertSpace>, matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim());
        Self { space, matrix }
    }

    pub fn identity(space: &Arc<HilbertSpace>) -> Self {
        let n = space.dim();
        Self::wrap(space.clone(), DMatrix::identity(n, n))
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        ensure_same(&self.space, v.space())?;
        Ok(StateVector::wrap(
            self.space.clone(),
            &self.matrix * v.amplitudes(),
        ))
    }

    /// `self · other`, i.e. `other` acts first.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        ensure_same(&self.space, &other.space)?;
        Ok(Self::wrap(self.space.clone(), &self.matrix * &other.matrix))
    }

    pub fn adjoint(&self) -> Operator {
        Self::wrap(self.space.clone(), self.matrix.adjoint())
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        ensure_same(&self.space, &other.space)?;
        Ok(Self::wrap(self.space.clone(), &self.matrix - &other.matrix))
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).norm()
    }

    /// `max(‖U†U − I‖_F, ‖UU† − I‖_F)`.
    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }

    /// Frobenius distance to another operator on the same space.
    pub fn distance(&self, other: &Operator) -> Result<f64> {
        Ok(self.sub(other)?.frobenius_norm())
    }
}

pub(crate) fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub(crate) fn unitarity_residual(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let left = (m.adjoint() * m - &id).norm();
    let right = (m * m.adjoint() - &id).norm();
    left.max(right)
}

pub fn apply(op: &Operator, v: &StateVector) -> Result<StateVector> {
    op.apply(v)
}
