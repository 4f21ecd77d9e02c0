use serde::{Deserialize, Serialize};

use super::decoherence::{decoherence_functional, verdict};
use super::family::{Branch, HistoryFamily};
use crate::{Error, Result, DISPLAY_THRESHOLD};

/// A conjunction of constraints "at time t the history is in one of these
/// projectors".
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    constraints: Vec<(usize, Vec<String>)>,
}

impl Event {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn at(self, time: usize, name: impl Into<String>) -> Self {
        self.at_any(time, [name])
    }

    pub fn at_any<I, S>(mut self, time: usize, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.constraints
            .push((time, names.into_iter().map(Into::into).collect()));
        self
    }

    pub fn constraints(&self) -> &[(usize, Vec<String>)] {
        &self.constraints
    }

    pub fn matches(&self, branch: &Branch) -> bool {
        self.constraints
            .iter()
            .all(|(t, names)| branch.at(*t).is_some_and(|c| names.iter().any(|n| n == c)))
    }

    /// Every constrained time and name must exist in `fam`.
    pub fn validate(&self, fam: &HistoryFamily) -> Result<()> {
        for (t, names) in &self.constraints {
            let ss = fam.sample_space(*t).ok_or_else(|| {
                Error::BadBranch(format!("family `{}` has no time t{t}", fam.name()))
            })?;
            for n in names {
                if ss.get(n).is_none() {
                    return Err(Error::BadBranch(format!(
                        "no projector `{n}` at t{t} in `{}`",
                        fam.name()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Branch probabilities of a family that passed the consistency test.
#[derive(Clone, Debug)]
pub struct Probabilities {
    rows: Vec<(Branch, f64)>,
}

impl Probabilities {
    /// Refuses with [`Error::InconsistentFamily`] unless `fam` is consistent
    /// at `tol`.
    pub fn of(fam: &HistoryFamily, tol: f64) -> Result<Self> {
        let d = decoherence_functional(fam);
        let v = verdict(&d, tol);
        if !v.consistent {
            return Err(Error::InconsistentFamily {
                max_offdiagonal: v.max_offdiagonal,
                tolerance: tol,
            });
        }
        let rows = d.branches().iter().cloned().zip(d.weights()).collect();
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[(Branch, f64)] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<(Branch, f64)> {
        self.rows
    }

    pub fn of_branch(&self, branch: &Branch) -> Option<f64> {
        self.rows.iter().find(|(b, _)| b == branch).map(|(_, p)| *p)
    }

    pub fn event(&self, event: &Event) -> f64 {
        self.rows
            .iter()
            .filter(|(b, _)| event.matches(b))
            .map(|(_, p)| p)
            .sum()
    }

    /// `Pr(target | given)`.
    pub fn conditional(&self, given: &Event, target: &Event) -> Result<f64> {
        let marginal = self.event(given);
        if marginal <= DISPLAY_THRESHOLD {
            return Err(Error::ZeroConditioningEvent);
        }
        let joint: f64 = self
            .rows
            .iter()
            .filter(|(b, _)| given.matches(b) && target.matches(b))
            .map(|(_, p)| p)
            .sum();
        Ok(joint / marginal)
    }
}

pub fn branch_probabilities(fam: &HistoryFamily, tol: f64) -> Result<Vec<(Branch, f64)>> {
    Ok(Probabilities::of(fam, tol)?.into_rows())
}

pub fn event_probability(fam: &HistoryFamily, event: &Event, tol: f64) -> Result<f64> {
    event.validate(fam)?;
    Ok(Probabilities::of(fam, tol)?.event(event))
}

pub fn conditional_probability(
    fam: &HistoryFamily,
    given: &Event,
    target: &Event,
    tol: f64,
) -> Result<f64> {
    given.validate(fam)?;
    target.validate(fam)?;
    Probabilities::of(fam, tol)?.conditional(given, target)
}
