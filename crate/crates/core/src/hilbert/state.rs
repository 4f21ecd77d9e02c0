use std::sync::Arc;

use nalgebra::DVector;

use super::label::IntoLabel;
use super::space::{ensure_same, HilbertSpace};
use super::C64;
use crate::{Error, Result, DEFAULT_TOL};

/// Complex amplitude vector over a labeled space.
///
/// `normalized` is recomputed on every construction: it is set iff the
/// Euclidean norm is within [`DEFAULT_TOL`] of one.
#[derive(Clone, Debug)]
pub struct StateVector {
    space: Arc<HilbertSpace>,
    amplitudes: DVector<C64>,
    normalized: bool,
}

impl StateVector {
    pub fn from_amplitudes(space: &Arc<HilbertSpace>, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::ShapeMismatch {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self::wrap(space.clone(), amplitudes))
    }

    pub(crate) fn wrap(space: Arc<HilbertSpace>, amplitudes: DVector<C64>) -> Self {
        let normalized = (amplitudes.norm() - 1.0).abs() <= DEFAULT_TOL;
        Self {
            space,
            amplitudes,
            normalized,
        }
    }

    pub fn zero(space: &Arc<HilbertSpace>) -> Self {
        Self::wrap(space.clone(), DVector::zeros(space.dim()))
    }

    pub fn basis(space: &Arc<HilbertSpace>, label: impl IntoLabel) -> Result<Self> {
        let mut amps = DVector::zeros(space.dim());
        amps[space.position(label)?] = C64::new(1.0, 0.0);
        Ok(Self::wrap(space.clone(), amps))
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn amplitude(&self, label: impl IntoLabel) -> Result<C64> {
        Ok(self.amplitudes[self.space.position(label)?])
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        ensure_same(&self.space, &other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn normalize(&self) -> Result<StateVector> {
        let norm = self.norm();
        if norm <= DEFAULT_TOL {
            return Err(Error::ZeroSpan);
        }
        Ok(Self::wrap(
            self.space.clone(),
            self.amplitudes.unscale(norm),
        ))
    }

    pub fn scale(&self, factor: C64) -> StateVector {
        Self::wrap(self.space.clone(), self.amplitudes.map(|a| a * factor))
    }

    pub fn add(&self, other: &StateVector) -> Result<StateVector> {
        ensure_same(&self.space, &other.space)?;
        Ok(Self::wrap(
            self.space.clone(),
            &self.amplitudes + &other.amplitudes,
        ))
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        ensure_same(&self.space, &other.space)?;
        Ok((&self.amplitudes - &other.amplitudes).norm())
    }
}

/// Linear combination of basis kets; repeated labels accumulate.
pub fn superpose<I, L>(terms: I, space: &Arc<HilbertSpace>) -> Result<StateVector>
where
    I: IntoIterator<Item = (C64, L)>,
    L: IntoLabel,
{
    let mut amps = DVector::zeros(space.dim());
    for (coef, label) in terms {
        amps[space.position(label)?] += coef;
    }
    Ok(StateVector::wrap(space.clone(), amps))
}

pub fn inner_product(u: &StateVector, v: &StateVector) -> Result<C64> {
    u.inner(v)
}
