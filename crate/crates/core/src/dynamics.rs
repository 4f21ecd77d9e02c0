//! Compilation of partial, human-readable unitary specifications into full
//! unitary steps on a labeled space.
//!
//! A [`PartialUnitarySpec`] only says where some basis kets go. Columns for
//! every other label are filled first with identity columns, and where an
//! identity column would overlap the specified range, by Gram–Schmidt
//! completion seeded with basis kets in label order. Each compiled part keeps
//! an audit of which columns came from where, so callers can check that their
//! states never reach a completed column.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::hilbert::{BasisLabel, HilbertSpace, IntoLabel, Operator, StateVector, C64};
use crate::{Error, Result, DEFAULT_TOL};

/// Seeds whose residual falls below this are skipped during completion.
const SEED_CUTOFF: f64 = 1e-6;

/// One mapping `source ↦ Σ coef · target`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub source: BasisLabel,
    pub targets: Vec<(C64, BasisLabel)>,
}

/// The specified part of a unitary: a list of rules with distinct sources and
/// unit-norm targets.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialUnitarySpec {
    description: String,
    rules: Vec<Rule>,
}

impl PartialUnitarySpec {
    pub fn new(description: impl Into<String>, rules: Vec<Rule>) -> Result<Self> {
        let mut sources = HashSet::new();
        for rule in &rules {
            if !sources.insert(&rule.source) {
                return Err(Error::DuplicateSource(rule.source.to_string()));
            }
            let mut merged: BTreeMap<&BasisLabel, C64> = BTreeMap::new();
            for (coef, label) in &rule.targets {
                *merged.entry(label).or_default() += *coef;
            }
            let norm = merged.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > DEFAULT_TOL {
                return Err(Error::NonUnitTarget {
                    source_label: rule.source.to_string(),
                    norm,
                });
            }
        }
        Ok(Self {
            description: description.into(),
            rules,
        })
    }

    /// Convenience constructor from label-like values.
    pub fn from_terms<S, L>(
        description: impl Into<String>,
        rules: impl IntoIterator<Item = (S, Vec<(C64, L)>)>,
    ) -> Result<Self>
    where
        S: IntoLabel,
        L: IntoLabel,
    {
        let rules = rules
            .into_iter()
            .map(|(source, targets)| {
                Ok(Rule {
                    source: source.into_label()?,
                    targets: targets
                        .into_iter()
                        .map(|(coef, l)| Ok((coef, l.into_label()?)))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(description, rules)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Union of two rule sets; sources must stay distinct.
    pub fn merged(self, other: PartialUnitarySpec) -> Result<Self> {
        let description = format!("{}; {}", self.description, other.description);
        let mut rules = self.rules;
        rules.extend(other.rules);
        Self::new(description, rules)
    }
}

/// How columns outside the rule sources are filled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Completion {
    /// Identity where possible, Gram–Schmidt completion elsewhere.
    #[default]
    Orthonormal,
    /// Identity only; any collision with the specified range is an error.
    IdentityOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnOrigin {
    Rule,
    Identity,
    Completed,
}

/// A single compiled spec together with its column audit.
#[derive(Clone, Debug)]
pub struct CompiledPart {
    description: String,
    operator: Operator,
    origins: Vec<ColumnOrigin>,
}

impl CompiledPart {
    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn origins(&self) -> &[ColumnOrigin] {
        &self.origins
    }

    /// Column indices filled by orthonormal completion.
    pub fn completed(&self) -> impl Iterator<Item = usize> + '_ {
        self.origins
            .iter()
            .enumerate()
            .filter_map(|(i, o)| (*o == ColumnOrigin::Completed).then_some(i))
    }
}

/// Verified unitary for one time interval, possibly the product of several
/// compiled parts applied in order.
#[derive(Clone, Debug)]
pub struct UnitaryStep {
    operator: Operator,
    provenance: String,
    parts: Vec<CompiledPart>,
}

impl UnitaryStep {
    pub fn compile(space: &Arc<HilbertSpace>, spec: &PartialUnitarySpec) -> Result<Self> {
        Self::compile_with(space, spec, Completion::default(), DEFAULT_TOL)
    }

    pub fn compile_with(
        space: &Arc<HilbertSpace>,
        spec: &PartialUnitarySpec,
        completion: Completion,
        tol: f64,
    ) -> Result<Self> {
        let part = compile_part(space, spec, completion, tol)?;
        Ok(Self {
            operator: part.operator.clone(),
            provenance: part.description.clone(),
            parts: vec![part],
        })
    }

    /// Compile each spec and multiply them so that the first spec acts first.
    pub fn sequence(space: &Arc<HilbertSpace>, specs: &[PartialUnitarySpec]) -> Result<Self> {
        let mut step = UnitaryStep::identity(space);
        for spec in specs {
            let part = compile_part(space, spec, Completion::default(), DEFAULT_TOL)?;
            step.operator = part.operator.compose(&step.operator)?;
            step.parts.push(part);
        }
        step.provenance = step
            .parts
            .iter()
            .map(|p| p.description.as_str())
            .collect::<Vec<_>>()
            .join("; ");
        verify_unitary(step.operator.matrix(), 1e-9)?;
        Ok(step)
    }

    /// Replace the generated provenance with a human description.
    pub fn described(mut self, description: impl Into<String>) -> Self {
        self.provenance = description.into();
        self
    }

    pub fn identity(space: &Arc<HilbertSpace>) -> Self {
        Self {
            operator: Operator::identity(space),
            provenance: "identity".into(),
            parts: Vec::new(),
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

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn parts(&self) -> &[CompiledPart] {
        &self.parts
    }

    /// Labels whose columns were completed in any part.
    pub fn completed_labels(&self) -> Vec<&BasisLabel> {
        let space = self.space();
        let mut indices: Vec<usize> = self.parts.iter().flat_map(|p| p.completed()).collect();
        indices.sort_unstable();
        indices.dedup();
        indices.into_iter().map(|i| space.label(i)).collect()
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.operator.unitarity_residual()
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.operator.apply(v)
    }

    /// Largest amplitude `v` carries into a completed column, tracked part by
    /// part. Zero means the result of applying this step does not depend on
    /// the completion choice.
    pub fn completion_leakage(&self, v: &StateVector) -> Result<f64> {
        let mut state = v.clone();
        let mut worst: f64 = 0.0;
        for part in &self.parts {
            for j in part.completed() {
                worst = worst.max(state.amplitudes()[j].norm());
            }
            state = part.operator.apply(&state)?;
        }
        Ok(worst)
    }

    /// The step "`self` then `later`".
    pub fn then(&self, later: &UnitaryStep) -> Result<UnitaryStep> {
        let operator = later.operator.compose(&self.operator)?;
        let mut parts = self.parts.clone();
        parts.extend(later.parts.iter().cloned());
        Ok(Self {
            operator,
            provenance: format!("{}; {}", self.provenance, later.provenance),
            parts,
        })
    }
}

pub fn compile_step(space: &Arc<HilbertSpace>, spec: &PartialUnitarySpec) -> Result<UnitaryStep> {
    UnitaryStep::compile(space, spec)
}

fn compile_part(
    space: &Arc<HilbertSpace>,
    spec: &PartialUnitarySpec,
    completion: Completion,
    tol: f64,
) -> Result<CompiledPart> {
    let n = space.dim();
    let mut columns: Vec<Option<DVector<C64>>> = vec![None; n];
    let mut origins = vec![ColumnOrigin::Identity; n];
    let mut specified: Vec<DVector<C64>> = Vec::with_capacity(spec.rules.len());

    for rule in &spec.rules {
        let src = space.position(&rule.source)?;
        let mut col = DVector::zeros(n);
        for (coef, label) in &rule.targets {
            col[space.position(label)?] += *coef;
        }
        specified.push(col.clone());
        columns[src] = Some(col);
        origins[src] = ColumnOrigin::Rule;
    }

    let k = specified.len();
    if k > 0 {
        let v = DMatrix::from_columns(&specified);
        let residual = (v.adjoint() * &v - DMatrix::identity(k, k)).norm();
        if residual > tol {
            return Err(Error::NonIsometricRules { residual });
        }
    }

    let mut pending = Vec::new();
    for j in 0..n {
        if columns[j].is_some() {
            continue;
        }
        let collides = specified.iter().any(|col| col[j].norm() > tol);
        if collides {
            pending.push(j);
        } else {
            let mut e = DVector::zeros(n);
            e[j] = C64::new(1.0, 0.0);
            columns[j] = Some(e);
        }
    }

    if !pending.is_empty() {
        if completion == Completion::IdentityOnly {
            return Err(Error::ExtensionConflict(
                space.label(pending[0]).to_string(),
            ));
        }
        let mut basis: Vec<DVector<C64>> = columns.iter().flatten().cloned().collect();
        let mut slots = pending.iter().copied();
        let mut slot = slots.next();
        for seed in 0..n {
            let Some(target) = slot else { break };
            let mut r = DVector::zeros(n);
            r[seed] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for b in &basis {
                    let overlap = b.dotc(&r);
                    r.axpy(-overlap, b, C64::new(1.0, 0.0));
                }
            }
            let norm = r.norm();
            if norm > SEED_CUTOFF {
                let col = r.unscale(norm);
                basis.push(col.clone());
                columns[target] = Some(col);
                origins[target] = ColumnOrigin::Completed;
                slot = slots.next();
            }
        }
        if let Some(j) = slot {
            return Err(Error::ExtensionConflict(space.label(j).to_string()));
        }
    }

    let cols: Vec<DVector<C64>> = columns
        .into_iter()
        .map(|c| c.expect("all columns filled"))
        .collect();
    let matrix = DMatrix::from_columns(&cols);
    verify_unitary(&matrix, tol)?;
    Ok(CompiledPart {
        description: spec.description.clone(),
        operator: Operator::new(space, matrix)?,
        origins,
    })
}

fn verify_unitary(m: &DMatrix<C64>, tol: f64) -> Result<()> {
    let residual = crate::hilbert::unitarity_residual(m);
    if residual > tol {
        Err(Error::NotUnitary { residual })
    } else {
        Ok(())
    }
}

/// Phase convention of a 50/50 beamsplitter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SplitterConvention {
    /// `in1 ↦ (out1 + out2)/√2`, `in2 ↦ (−out1 + out2)/√2`.
    #[default]
    SignFlip,
    /// `in1 ↦ (out1 + i·out2)/√2`, `in2 ↦ (i·out1 + out2)/√2`.
    ImaginaryReflection,
}

type LocalRule<'a> = (Vec<&'a str>, Vec<(C64, Vec<&'a str>)>);

/// Tensor-extend rules on a few factors to every context of the others.
fn extend_local(
    space: &HilbertSpace,
    positions: &[usize],
    local: &[LocalRule<'_>],
    description: String,
) -> Result<PartialUnitarySpec> {
    let mut rules = Vec::new();
    for (source, targets) in local {
        let fixed: Vec<(usize, &str)> = positions
            .iter()
            .copied()
            .zip(source.iter().copied())
            .collect();
        for i in space.matching(&fixed) {
            let label = space.label(i);
            let mapped = targets
                .iter()
                .map(|(coef, tokens)| {
                    let repl: Vec<(usize, &str)> = positions
                        .iter()
                        .copied()
                        .zip(tokens.iter().copied())
                        .collect();
                    let target = label.with_parts(&repl);
                    space.position(&target)?;
                    Ok((*coef, target))
                })
                .collect::<Result<Vec<_>>>()?;
            rules.push(Rule {
                source: label.clone(),
                targets: mapped,
            });
        }
    }
    PartialUnitarySpec::new(description, rules)
}

fn require_token(space: &HilbertSpace, position: usize, token: &str) -> Result<()> {
    if space.factors()[position].has_token(token) {
        Ok(())
    } else {
        Err(Error::UnknownToken(token.to_string()))
    }
}

/// Rules for a 50/50 beamsplitter acting on the mode tokens of `factor`.
///
/// With a single input only that input's rule is produced, which is enough
/// for a splitter whose second port is never fed.
pub fn beamsplitter_spec(
    space: &HilbertSpace,
    factor: &str,
    inputs: (&str, Option<&str>),
    outputs: (&str, &str),
    convention: SplitterConvention,
) -> Result<PartialUnitarySpec> {
    let pos = space.factor_position(factor)?;
    let (in1, in2) = inputs;
    let (out1, out2) = outputs;
    for token in [Some(in1), in2, Some(out1), Some(out2)]
        .into_iter()
        .flatten()
    {
        require_token(space, pos, token)?;
    }
    if Some(in1) == in2 {
        return Err(Error::TokenCollision(format!("both inputs are `{in1}`")));
    }
    if out1 == out2 {
        return Err(Error::TokenCollision(format!("both outputs are `{out1}`")));
    }
    let h = FRAC_1_SQRT_2;
    let (first, second) = match convention {
        SplitterConvention::SignFlip => (
            vec![
                (C64::new(h, 0.0), vec![out1]),
                (C64::new(h, 0.0), vec![out2]),
            ],
            vec![
                (C64::new(-h, 0.0), vec![out1]),
                (C64::new(h, 0.0), vec![out2]),
            ],
        ),
        SplitterConvention::ImaginaryReflection => (
            vec![
                (C64::new(h, 0.0), vec![out1]),
                (C64::new(0.0, h), vec![out2]),
            ],
            vec![
                (C64::new(0.0, h), vec![out1]),
                (C64::new(h, 0.0), vec![out2]),
            ],
        ),
    };
    let mut local = vec![(vec![in1], first)];
    if let Some(in2) = in2 {
        local.push((vec![in2], second));
    }
    let description = match in2 {
        Some(in2) => format!("beamsplitter {in1},{in2} -> {out1},{out2}"),
        None => format!("beamsplitter {in1} -> {out1},{out2}"),
    };
    extend_local(space, &[pos], &local, description)
}

/// Rules for a detector that absorbs a photon in `mode` and flips from
/// ready to triggered, in every context of the remaining subsystems.
pub fn detector_spec(
    space: &HilbertSpace,
    photon_factor: &str,
    mode: &str,
    detector: &str,
    absorbed: &str,
) -> Result<PartialUnitarySpec> {
    let photon = space.factor_position(photon_factor)?;
    let det = space.factor_position(detector)?;
    if photon == det {
        return Err(Error::TokenCollision(format!(
            "detector `{detector}` is the photon factor"
        )));
    }
    let tokens = space.factors()[det]
        .detector_tokens()
        .ok_or_else(|| Error::UnknownToken(detector.to_string()))?;
    require_token(space, photon, mode)?;
    require_token(space, photon, absorbed)?;
    if mode == absorbed {
        return Err(Error::TokenCollision(format!(
            "mode `{mode}` is the absorbed token"
        )));
    }
    let local = vec![(
        vec![mode, tokens.ready.as_str()],
        vec![(
            C64::new(1.0, 0.0),
            vec![absorbed, tokens.triggered.as_str()],
        )],
    )];
    extend_local(
        space,
        &[photon, det],
        &local,
        format!("detector {detector} on {mode}"),
    )
}
