use std::sync::Arc;

use nalgebra::DMatrix;

use crate::hilbert::{HilbertSpace, Operator, Projector, C64};
use crate::{Error, Result, DEFAULT_TOL};

/// Name given to the complement added by [`SampleSpace::complete`].
pub const REST: &str = "REST";
/// Name of the single projector in a trivial sample space.
pub const IDENTITY: &str = "I";

/// Mutually orthogonal named projectors at one time.
#[derive(Clone, Debug)]
pub struct SampleSpace {
    time: usize,
    space: Arc<HilbertSpace>,
    projectors: Vec<(String, Projector)>,
}

impl SampleSpace {
    pub fn new(
        time: usize,
        space: &Arc<HilbertSpace>,
        projectors: Vec<(String, Projector)>,
    ) -> Result<Self> {
        Self::with_tolerance(time, space, projectors, DEFAULT_TOL)
    }

    pub fn with_tolerance(
        time: usize,
        space: &Arc<HilbertSpace>,
        projectors: Vec<(String, Projector)>,
        tol: f64,
    ) -> Result<Self> {
        for (i, (name, p)) in projectors.iter().enumerate() {
            if !p.space().same_as(space) {
                return Err(Error::SpaceMismatch);
            }
            for (other, q) in &projectors[..i] {
                if other == name {
                    return Err(Error::DuplicateName(name.clone()));
                }
                let overlap = (p.matrix() * q.matrix()).norm();
                if overlap > tol {
                    return Err(Error::NotOrthogonal {
                        first: other.clone(),
                        second: name.clone(),
                        overlap,
                    });
                }
            }
        }
        Ok(Self {
            time,
            space: space.clone(),
            projectors,
        })
    }

    /// `{I}`: no information is recorded at this time.
    pub fn trivial(time: usize, space: &Arc<HilbertSpace>) -> Self {
        Self {
            time,
            space: space.clone(),
            projectors: vec![(IDENTITY.into(), Projector::identity(space))],
        }
    }

    /// Append `I − Σ P` as [`REST`] when that complement has rank ≥ 1.
    pub fn complete(mut self) -> Result<Self> {
        let n = self.space.dim();
        let rest = Operator::new(&self.space, DMatrix::identity(n, n) - self.sum())?;
        if rest.trace().re >= 0.5 {
            if self.get(REST).is_some() {
                return Err(Error::DuplicateName(REST.into()));
            }
            let rest = Projector::new(rest)?;
            self.projectors.push((REST.into(), rest));
        }
        Ok(self)
    }

    fn sum(&self) -> DMatrix<C64> {
        let n = self.space.dim();
        let mut total = DMatrix::zeros(n, n);
        for (_, p) in &self.projectors {
            total += p.matrix();
        }
        total
    }

    /// `‖Σ P − I‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let n = self.space.dim();
        (self.sum() - DMatrix::identity(n, n)).norm()
    }

    pub fn is_complete(&self) -> bool {
        self.completeness_residual() <= DEFAULT_TOL
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn projectors(&self) -> &[(String, Projector)] {
        &self.projectors
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.projectors.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&Projector> {
        self.projectors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.projectors.iter().position(|(n, _)| n == name)
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}

pub fn complete_sample_space(ss: SampleSpace, space: &Arc<HilbertSpace>) -> Result<SampleSpace> {
    if !ss.space.same_as(space) {
        return Err(Error::SpaceMismatch);
    }
    ss.complete()
}
