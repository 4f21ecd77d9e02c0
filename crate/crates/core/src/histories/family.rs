use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::sample_space::SampleSpace;
use crate::dynamics::UnitaryStep;
use crate::hilbert::{HilbertSpace, Operator, Projector, StateVector};
use crate::{Error, Result, DEFAULT_TOL};

/// One history: a projector name per sampled time.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Branch {
    choices: Vec<String>,
}

impl Branch {
    pub fn new<I, S>(choices: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            choices: choices.into_iter().map(Into::into).collect(),
        }
    }

    pub fn choices(&self) -> &[String] {
        &self.choices
    }

    /// Choice at time `t` (1-based).
    pub fn at(&self, time: usize) -> Option<&str> {
        time.checked_sub(1)
            .and_then(|i| self.choices.get(i))
            .map(String::as_str)
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.choices.join(" -> "))
    }
}

/// Initial state, unitary steps and one completed sample space per time.
#[derive(Clone, Debug)]
pub struct HistoryFamily {
    name: String,
    initial: StateVector,
    steps: Vec<UnitaryStep>,
    sample_spaces: Vec<SampleSpace>,
}

impl HistoryFamily {
    /// Every sample space is completed with a `REST` projector where needed.
    pub fn new(
        name: impl Into<String>,
        initial: StateVector,
        steps: Vec<UnitaryStep>,
        sample_spaces: Vec<SampleSpace>,
    ) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::MalformedFamily(
                "a family needs at least one time step".into(),
            ));
        }
        if steps.len() != sample_spaces.len() {
            return Err(Error::MalformedFamily(format!(
                "{} steps but {} sample spaces",
                steps.len(),
                sample_spaces.len()
            )));
        }
        let space = initial.space().clone();
        if !initial.is_normalized() {
            return Err(Error::NotNormalized(initial.norm()));
        }
        for step in &steps {
            if !step.space().same_as(&space) {
                return Err(Error::SpaceMismatch);
            }
        }
        let mut completed = Vec::with_capacity(sample_spaces.len());
        for (i, ss) in sample_spaces.into_iter().enumerate() {
            if ss.time() != i + 1 {
                return Err(Error::MalformedFamily(format!(
                    "sample space in slot {} is labelled t{}",
                    i + 1,
                    ss.time()
                )));
            }
            if !ss.space().same_as(&space) {
                return Err(Error::SpaceMismatch);
            }
            completed.push(ss.complete()?);
        }
        Ok(Self {
            name: name.into(),
            initial,
            steps,
            sample_spaces: completed,
        })
    }

    pub fn builder(
        name: impl Into<String>,
        initial: StateVector,
        steps: Vec<UnitaryStep>,
    ) -> FamilyBuilder {
        FamilyBuilder {
            name: name.into(),
            initial,
            steps,
            samples: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        self.initial.space()
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn steps(&self) -> &[UnitaryStep] {
        &self.steps
    }

    pub fn sample_spaces(&self) -> &[SampleSpace] {
        &self.sample_spaces
    }

    /// Sample space at time `t` (1-based).
    pub fn sample_space(&self, time: usize) -> Option<&SampleSpace> {
        time.checked_sub(1).and_then(|i| self.sample_spaces.get(i))
    }

    /// Number of sampled times.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn branch_count(&self) -> usize {
        self.sample_spaces.iter().map(SampleSpace::len).product()
    }

    /// Full Cartesian product of sample-space names, in listed order with the
    /// last time varying fastest.
    pub fn branches(&self) -> Vec<Branch> {
        let mut out: Vec<Vec<String>> = vec![Vec::new()];
        for ss in &self.sample_spaces {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    ss.names().map(move |name| {
                        let mut next = prefix.clone();
                        next.push(name.to_string());
                        next
                    })
                })
                .collect();
        }
        out.into_iter().map(|choices| Branch { choices }).collect()
    }

    fn resolve(&self, branch: &Branch) -> Result<Vec<&Projector>> {
        if branch.choices.len() != self.len() {
            return Err(Error::BadBranch(format!(
                "branch `{branch}` has {} choices, family `{}` samples {} times",
                branch.choices.len(),
                self.name,
                self.len()
            )));
        }
        branch
            .choices
            .iter()
            .zip(&self.sample_spaces)
            .map(|(name, ss)| {
                ss.get(name).ok_or_else(|| {
                    Error::BadBranch(format!("no projector `{name}` at t{}", ss.time()))
                })
            })
            .collect()
    }

    /// `P_T U_T ⋯ P_1 U_1 |Ψ⟩`, unnormalized.
    pub fn chain_vector(&self, branch: &Branch) -> Result<StateVector> {
        let projectors = self.resolve(branch)?;
        let mut state = self.initial.clone();
        for (step, p) in self.steps.iter().zip(projectors) {
            state = p.apply(&step.apply(&state)?)?;
        }
        Ok(state)
    }

    /// Chain vectors of every branch, in [`HistoryFamily::branches`] order.
    pub fn chain_vectors(&self) -> Vec<(Branch, StateVector)> {
        let mut out = Vec::with_capacity(self.branch_count());
        self.walk(
            0,
            self.initial.clone(),
            &mut Vec::new(),
            &mut |choices, state| {
                out.push((
                    Branch {
                        choices: choices.to_vec(),
                    },
                    state.clone(),
                ));
            },
        );
        out
    }

    /// Depth-first traversal sharing prefix propagation between branches.
    fn walk(
        &self,
        depth: usize,
        state: StateVector,
        prefix: &mut Vec<String>,
        visit: &mut dyn FnMut(&[String], &StateVector),
    ) {
        if depth == self.len() {
            visit(prefix, &state);
            return;
        }
        let evolved = self.steps[depth]
            .apply(&state)
            .expect("family shares one space");
        for (name, p) in self.sample_spaces[depth].projectors() {
            prefix.push(name.clone());
            let next = p.apply(&evolved).expect("family shares one space");
            self.walk(depth + 1, next, prefix, visit);
            prefix.pop();
        }
    }

    /// Largest amplitude any branch prefix feeds into a completed column of
    /// the step that follows it. Zero means no result depends on how the
    /// step compiler completed unspecified columns.
    pub fn completion_leakage(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut frontier = vec![self.initial.clone()];
        for (step, ss) in self.steps.iter().zip(&self.sample_spaces) {
            let mut next = Vec::with_capacity(frontier.len() * ss.len());
            for state in &frontier {
                worst = worst.max(
                    step.completion_leakage(state)
                        .expect("family shares one space"),
                );
                let evolved = step.apply(state).expect("family shares one space");
                for (_, p) in ss.projectors() {
                    let projected = p.apply(&evolved).expect("family shares one space");
                    if projected.norm() > 0.0 {
                        next.push(projected);
                    }
                }
            }
            frontier = next;
        }
        worst
    }

    /// Merge several projectors at one time into their sum.
    ///
    /// The merged projector takes the slot of the first listed member.
    pub fn coarse_grain(
        &self,
        time: usize,
        members: &[&str],
        merged: &str,
    ) -> Result<HistoryFamily> {
        let ss = self
            .sample_space(time)
            .ok_or_else(|| Error::BadBranch(format!("no sample space at t{time}")))?;
        if members.is_empty() {
            return Err(Error::BadBranch("nothing to coarse-grain".into()));
        }
        for m in members {
            if ss.get(m).is_none() {
                return Err(Error::BadBranch(format!("no projector `{m}` at t{time}")));
            }
        }
        let n = self.space().dim();
        let mut sum = DMatrix::zeros(n, n);
        for m in members {
            sum += ss.get(m).expect("checked").matrix();
        }
        let merged_projector = Projector::new(Operator::new(self.space(), sum)?)?;
        let mut projectors = Vec::new();
        let mut placed = false;
        for (name, p) in ss.projectors() {
            if members.contains(&name.as_str()) {
                if !placed {
                    projectors.push((merged.to_string(), merged_projector.clone()));
                    placed = true;
                }
            } else {
                projectors.push((name.clone(), p.clone()));
            }
        }
        let mut sample_spaces = self.sample_spaces.clone();
        sample_spaces[time - 1] = SampleSpace::new(time, self.space(), projectors)?;
        HistoryFamily::new(
            format!("{}/coarse", self.name),
            self.initial.clone(),
            self.steps.clone(),
            sample_spaces,
        )
    }

    /// Verify `other` has the same space, initial state and steps.
    pub fn same_dynamics(&self, other: &HistoryFamily, tol: f64) -> Result<()> {
        if !self.space().same_as(other.space()) {
            return Err(Error::SpaceMismatch);
        }
        if self.len() != other.len() {
            return Err(Error::GridMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        let drift = self.initial.distance(&other.initial)?;
        if drift > tol {
            return Err(Error::DynamicsMismatch(format!(
                "initial states differ by {drift:.3e}"
            )));
        }
        for (t, (a, b)) in self.steps.iter().zip(&other.steps).enumerate() {
            let drift = a.operator().distance(b.operator())?;
            if drift > tol {
                return Err(Error::DynamicsMismatch(format!(
                    "step {} differs by {drift:.3e}",
                    t + 1
                )));
            }
        }
        Ok(())
    }
}

pub fn chain_vector(fam: &HistoryFamily, branch: &Branch) -> Result<StateVector> {
    fam.chain_vector(branch)
}

/// Assembles a family from projectors at selected times; unsampled times get
/// the trivial sample space `{I}`.
pub struct FamilyBuilder {
    name: String,
    initial: StateVector,
    steps: Vec<UnitaryStep>,
    samples: BTreeMap<usize, Vec<(String, Projector)>>,
}

impl FamilyBuilder {
    pub fn sample<S: Into<String>>(mut self, time: usize, projectors: Vec<(S, Projector)>) -> Self {
        self.samples.insert(
            time,
            projectors.into_iter().map(|(n, p)| (n.into(), p)).collect(),
        );
        self
    }

    pub fn build(mut self) -> Result<HistoryFamily> {
        let space = self.initial.space().clone();
        let t_max = self.steps.len();
        if let Some((&t, _)) = self.samples.iter().find(|(&t, _)| t == 0 || t > t_max) {
            return Err(Error::MalformedFamily(format!(
                "sample time t{t} outside 1..={t_max}"
            )));
        }
        let sample_spaces = (1..=t_max)
            .map(|t| match self.samples.remove(&t) {
                Some(ps) => SampleSpace::with_tolerance(t, &space, ps, DEFAULT_TOL),
                None => Ok(SampleSpace::trivial(t, &space)),
            })
            .collect::<Result<Vec<_>>>()?;
        HistoryFamily::new(self.name, self.initial, self.steps, sample_spaces)
    }
}
