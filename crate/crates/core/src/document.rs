//! JSON scenario schema.
//!
//! A document lists the subsystems of a product space, the unitary steps as
//! rule lists or `beamsplitter` / `detector` shorthands, the initial state,
//! named projectors, history families and the checks to run. Complex numbers
//! are `[re, im]` pairs. Labels are rendered with `,` between subsystem
//! tokens, e.g. `"c,C,D"`.
//!
//! [`parse_document`] reports every violation it finds, not just the first.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::hilbert::{BasisLabel, Factor, HilbertSpace, C64};
use crate::histories::{IDENTITY, REST};
use crate::DEFAULT_TOL;

pub const SCHEMA_VERSION: u32 = 1;

/// Vectors whose norm is off by more than this are rejected rather than
/// renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-8;

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn is_default_tol(tol: &f64) -> bool {
    *tol == DEFAULT_TOL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ScenarioDocument {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub space: Vec<SubsystemDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<StepDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<Term>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub projectors: Vec<ProjectorDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<FamilyDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckDef>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SubsystemKind {
    #[default]
    Mode,
    /// Exactly two tokens: ready, then triggered.
    Detector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SubsystemDef {
    pub name: String,
    #[serde(default)]
    pub kind: SubsystemKind,
    pub tokens: Vec<String>,
}

/// One `amplitude · |label⟩` term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub label: String,
    pub amp: [f64; 2],
}

impl Term {
    pub fn new(label: impl Into<String>, re: f64, im: f64) -> Self {
        Self {
            label: label.into(),
            amp: [re, im],
        }
    }

    pub fn coefficient(&self) -> C64 {
        C64::new(self.amp[0], self.amp[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct StepDef {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Compiled separately and applied in order.
    pub parts: Vec<PartDef>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ConventionDef {
    #[default]
    SignFlip,
    ImaginaryReflection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "camelCase",
    rename_all_fields = "camelCase"
)]
pub enum PartDef {
    Rules {
        rules: Vec<RuleDef>,
    },
    Beamsplitter {
        factor: String,
        inputs: Vec<String>,
        outputs: Vec<String>,
        #[serde(default)]
        convention: ConventionDef,
    },
    Detector {
        factor: String,
        mode: String,
        detector: String,
        absorbed: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDef {
    pub source: String,
    pub targets: Vec<Term>,
}

/// Projector onto the span of `vectors`. With `factors` set, labels name one
/// token per listed factor and the projector is the identity elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProjectorDef {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<String>>,
    pub vectors: Vec<Vec<Term>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FamilyDef {
    pub name: String,
    pub samples: Vec<SampleDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SampleDef {
    pub time: usize,
    pub projectors: Vec<ProjectorDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ConstraintDef {
    pub time: usize,
    pub names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EventRef {
    pub family: String,
    pub event: Vec<ConstraintDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckDef {
    pub id: String,
    #[serde(flatten)]
    pub kind: CheckKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "check",
    rename_all = "camelCase",
    rename_all_fields = "camelCase"
)]
pub enum CheckKind {
    /// `‖U_k ⋯ U_1 |from⟩ − |to⟩‖ ≤ tol` with `k = through` (default: all steps).
    Evolution {
        from: Vec<Term>,
        to: Vec<Term>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        through: Option<usize>,
        #[serde(default = "default_tol", skip_serializing_if = "is_default_tol")]
        tol: f64,
    },
    Consistent {
        family: String,
        expected: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_offdiagonal: Option<f64>,
        #[serde(default = "default_tol", skip_serializing_if = "is_default_tol")]
        tol: f64,
    },
    Probability {
        family: String,
        event: Vec<ConstraintDef>,
        expected: f64,
        #[serde(default = "default_tol", skip_serializing_if = "is_default_tol")]
        tol: f64,
    },
    Conditional {
        family: String,
        given: Vec<ConstraintDef>,
        target: Vec<ConstraintDef>,
        expected: f64,
        #[serde(default = "default_tol", skip_serializing_if = "is_default_tol")]
        tol: f64,
    },
    /// Probabilities must be refused for this family.
    Refused {
        family: String,
    },
    NonzeroBranches {
        family: String,
        expected: usize,
    },
    /// The branch's chain vector is proportional to `state`.
    ChainState {
        family: String,
        branch: Vec<String>,
        state: Vec<Term>,
        #[serde(default = "default_tol", skip_serializing_if = "is_default_tol")]
        tol: f64,
    },
    Compatible {
        left: String,
        right: String,
        expected: bool,
        /// Times that must carry a commutation witness.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        witness_times: Vec<usize>,
    },
    /// The same event has the same probability in two families.
    Agreement {
        left: EventRef,
        right: EventRef,
        #[serde(default = "default_tol", skip_serializing_if = "is_default_tol")]
        tol: f64,
    },
    Conjunction {
        left: String,
        right: String,
        commutator_spectral: f64,
        product_is_projector: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_idempotence_residual: Option<f64>,
        #[serde(default = "default_tol", skip_serializing_if = "is_default_tol")]
        tol: f64,
    },
    /// Named projectors sum to the identity.
    Resolution {
        projectors: Vec<String>,
        #[serde(default = "default_tol", skip_serializing_if = "is_default_tol")]
        tol: f64,
    },
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Evolution { .. } => "evolution",
            CheckKind::Consistent { .. } => "consistent",
            CheckKind::Probability { .. } => "probability",
            CheckKind::Conditional { .. } => "conditional",
            CheckKind::Refused { .. } => "refused",
            CheckKind::NonzeroBranches { .. } => "nonzeroBranches",
            CheckKind::ChainState { .. } => "chainState",
            CheckKind::Compatible { .. } => "compatible",
            CheckKind::Agreement { .. } => "agreement",
            CheckKind::Conjunction { .. } => "conjunction",
            CheckKind::Resolution { .. } => "resolution",
        }
    }
}

/// One problem found in a document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// JSON-pointer-like location such as `families[0].samples[1]`.
    pub path: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ if self.path.is_empty() => f.write_str(&self.message),
            _ => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseError {
    pub fn single(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            diagnostics: vec![Diagnostic {
                path: path.into(),
                line: None,
                column: None,
                message: message.into(),
            }],
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid scenario document ({} problem",
            self.diagnostics.len()
        )?;
        if self.diagnostics.len() != 1 {
            f.write_str("s")?;
        }
        f.write_str(")")?;
        for d in &self.diagnostics {
            write!(f, "\n  {d}")?;
        }
        Ok(())
    }
}

/// A validated document with the vectors that were renormalized on load.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedDocument {
    pub document: ScenarioDocument,
    pub renormalized: Vec<String>,
}

pub fn parse_document(text: &str) -> Result<ParsedDocument, ParseError> {
    let document: ScenarioDocument = serde_json::from_str(text).map_err(|e| ParseError {
        diagnostics: vec![Diagnostic {
            path: String::new(),
            line: Some(e.line()),
            column: Some(e.column()),
            message: e.to_string(),
        }],
    })?;
    let renormalized = validate(&document)?;
    Ok(ParsedDocument {
        document,
        renormalized,
    })
}

impl ScenarioDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// Product space described by `space`.
    pub fn build_space(&self) -> crate::Result<Arc<HilbertSpace>> {
        let factors = self
            .space
            .iter()
            .map(|s| match s.kind {
                SubsystemKind::Mode => Factor::new(&s.name, s.tokens.iter().cloned()),
                SubsystemKind::Detector if s.tokens.len() == 2 => {
                    Factor::detector(&s.name, &s.tokens[0], &s.tokens[1])
                }
                SubsystemKind::Detector => Err(crate::Error::TokenCollision(format!(
                    "detector `{}` needs exactly two tokens",
                    s.name
                ))),
            })
            .collect::<crate::Result<Vec<_>>>()?;
        HilbertSpace::tensor(factors)
    }
}

/// Collects diagnostics while walking a document.
struct Validator<'a> {
    doc: &'a ScenarioDocument,
    space: Option<Arc<HilbertSpace>>,
    problems: Vec<Diagnostic>,
    renormalized: Vec<String>,
}

impl<'a> Validator<'a> {
    fn report(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.problems.push(Diagnostic {
            path: path.into(),
            line: None,
            column: None,
            message: message.into(),
        });
    }

    fn amp(&mut self, path: &str, term: &Term) {
        if !term.amp.iter().all(|x| x.is_finite()) {
            self.report(path, "amplitude is not a finite number");
        }
    }

    /// Full labels, with optional unit-norm requirement.
    fn state(&mut self, path: &str, terms: &[Term], unit: bool) {
        if terms.is_empty() {
            self.report(path, "empty vector");
            return;
        }
        let mut labels = Vec::new();
        for (i, term) in terms.iter().enumerate() {
            let p = format!("{path}[{i}]");
            self.amp(&p, term);
            match term.label.parse::<BasisLabel>() {
                Ok(label) => {
                    if let Some(space) = &self.space {
                        if space.index_of(&label).is_none() {
                            self.report(&p, format!("undefined label `{}`", term.label));
                        }
                    }
                    labels.push(label);
                }
                Err(_) => self.report(&p, format!("malformed label `{}`", term.label)),
            }
        }
        if unit {
            // repeated labels add up before the norm is taken
            let mut merged: Vec<(BasisLabel, C64)> = Vec::new();
            for (label, term) in labels.into_iter().zip(terms) {
                match merged.iter_mut().find(|(l, _)| *l == label) {
                    Some((_, amp)) => *amp += term.coefficient(),
                    None => merged.push((label, term.coefficient())),
                }
            }
            let norm = merged.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
            let off = (norm - 1.0).abs();
            if !norm.is_finite() || off > RENORMALIZE_TOL {
                self.report(
                    path,
                    format!("vector norm {norm} is not within {RENORMALIZE_TOL:e} of 1"),
                );
            } else if off > DEFAULT_TOL {
                self.renormalized
                    .push(format!("{path}: norm {norm} renormalized to 1"));
            }
        }
    }

    fn factor(&self, name: &str) -> Option<&'a SubsystemDef> {
        self.doc.space.iter().find(|s| s.name == name)
    }

    fn token(&mut self, path: &str, factor: &str, token: &str) {
        match self.factor(factor) {
            Some(def) if def.tokens.iter().any(|t| t == token) => {}
            Some(_) => self.report(path, format!("subsystem `{factor}` has no token `{token}`")),
            None => {}
        }
    }

    fn known_factor(&mut self, path: &str, factor: &str) -> bool {
        if self.factor(factor).is_some() {
            true
        } else {
            self.report(path, format!("undefined subsystem `{factor}`"));
            false
        }
    }

    fn projector(&mut self, path: &str, def: &ProjectorDef) {
        if def.name.is_empty() {
            self.report(format!("{path}.name"), "empty projector name");
        }
        if def.vectors.is_empty() {
            self.report(
                format!("{path}.vectors"),
                "projector needs at least one vector",
            );
        }
        match &def.factors {
            None => {
                for (i, v) in def.vectors.iter().enumerate() {
                    self.state(&format!("{path}.vectors[{i}]"), v, false);
                }
            }
            Some(factors) => {
                let mut ok = !factors.is_empty();
                if !ok {
                    self.report(format!("{path}.factors"), "empty factor list");
                }
                for f in factors {
                    ok &= self.known_factor(&format!("{path}.factors"), f);
                }
                for (i, v) in def.vectors.iter().enumerate() {
                    let vp = format!("{path}.vectors[{i}]");
                    if v.is_empty() {
                        self.report(&vp, "empty vector");
                    }
                    for (j, term) in v.iter().enumerate() {
                        let tp = format!("{vp}[{j}]");
                        self.amp(&tp, term);
                        match term.label.parse::<BasisLabel>() {
                            Ok(label) if label.arity() == factors.len() => {
                                if ok {
                                    for (token, f) in label.parts().iter().zip(factors) {
                                        self.token(&tp, f, token);
                                    }
                                }
                            }
                            Ok(_) => self.report(
                                &tp,
                                format!("label `{}` needs one token per listed factor", term.label),
                            ),
                            Err(_) => self.report(&tp, format!("malformed label `{}`", term.label)),
                        }
                    }
                }
            }
        }
        let all_zero = def
            .vectors
            .iter()
            .all(|v| v.iter().all(|t| t.amp == [0.0, 0.0]));
        if !def.vectors.is_empty() && all_zero {
            self.report(path, "all vectors are zero");
        }
    }

    fn event(&mut self, path: &str, family: &str, constraints: &[ConstraintDef]) {
        let Some(fam) = self.doc.families.iter().find(|f| f.name == family) else {
            self.report(path, format!("undefined family `{family}`"));
            return;
        };
        for (i, c) in constraints.iter().enumerate() {
            let cp = format!("{path}[{i}]");
            if c.time == 0 || c.time > self.doc.steps.len() {
                self.report(
                    &cp,
                    format!("time t{} outside 1..={}", c.time, self.doc.steps.len()),
                );
                continue;
            }
            let sample = fam.samples.iter().find(|s| s.time == c.time);
            for name in &c.names {
                let known = match sample {
                    Some(s) => name == REST || s.projectors.iter().any(|p| &p.name == name),
                    None => name == IDENTITY,
                };
                if !known {
                    self.report(
                        &cp,
                        format!("family `{family}` has no projector `{name}` at t{}", c.time),
                    );
                }
            }
        }
    }

    fn family_exists(&mut self, path: &str, name: &str) {
        if !self.doc.families.iter().any(|f| f.name == name) {
            self.report(path, format!("undefined family `{name}`"));
        }
    }

    fn named_projector(&mut self, path: &str, name: &str) {
        if !self.doc.projectors.iter().any(|p| p.name == name) {
            self.report(path, format!("undefined projector `{name}`"));
        }
    }

    fn run(mut self) -> Result<Vec<String>, ParseError> {
        let doc = self.doc;
        if doc.schema_version != SCHEMA_VERSION {
            self.report(
                "schemaVersion",
                format!(
                    "unsupported schema version {} (expected {SCHEMA_VERSION})",
                    doc.schema_version
                ),
            );
        }
        if doc.space.is_empty() {
            self.report("space", "at least one subsystem is required");
        }
        let before = self.problems.len();
        let mut names = HashSet::new();
        for (i, s) in doc.space.iter().enumerate() {
            let p = format!("space[{i}]");
            if !names.insert(&s.name) {
                self.report(&p, format!("subsystem `{}` declared twice", s.name));
            }
            if s.kind == SubsystemKind::Detector && s.tokens.len() != 2 {
                self.report(&p, "a detector has exactly two tokens: ready, triggered");
            }
        }
        if self.problems.len() == before && !doc.space.is_empty() {
            match doc.build_space() {
                Ok(space) => self.space = Some(space),
                Err(e) => self.report("space", e.to_string()),
            }
        }

        for (i, step) in doc.steps.iter().enumerate() {
            if step.parts.is_empty() {
                self.report(
                    format!("steps[{i}].parts"),
                    "a step needs at least one part",
                );
            }
            for (j, part) in step.parts.iter().enumerate() {
                let p = format!("steps[{i}].parts[{j}]");
                match part {
                    PartDef::Rules { rules } => {
                        let mut sources = HashSet::new();
                        for (k, rule) in rules.iter().enumerate() {
                            let rp = format!("{p}.rules[{k}]");
                            self.state(
                                &format!("{rp}.source"),
                                &[Term::new(&rule.source, 1.0, 0.0)],
                                false,
                            );
                            if !sources.insert(&rule.source) {
                                self.report(&rp, format!("source `{}` repeated", rule.source));
                            }
                            self.state(&format!("{rp}.targets"), &rule.targets, true);
                        }
                    }
                    PartDef::Beamsplitter {
                        factor,
                        inputs,
                        outputs,
                        ..
                    } => {
                        if !(1..=2).contains(&inputs.len()) {
                            self.report(format!("{p}.inputs"), "one or two input modes expected");
                        }
                        if outputs.len() != 2 {
                            self.report(
                                format!("{p}.outputs"),
                                "exactly two output modes expected",
                            );
                        }
                        if self.known_factor(&format!("{p}.factor"), factor) {
                            for t in inputs.iter().chain(outputs) {
                                self.token(&p, factor, t);
                            }
                        }
                    }
                    PartDef::Detector {
                        factor,
                        mode,
                        detector,
                        absorbed,
                    } => {
                        if self.known_factor(&format!("{p}.factor"), factor) {
                            self.token(&format!("{p}.mode"), factor, mode);
                            self.token(&format!("{p}.absorbed"), factor, absorbed);
                        }
                        match self.factor(detector) {
                            Some(d) if d.kind == SubsystemKind::Detector => {}
                            Some(_) => self.report(
                                format!("{p}.detector"),
                                format!("`{detector}` is not a detector"),
                            ),
                            None => self.report(
                                format!("{p}.detector"),
                                format!("undefined subsystem `{detector}`"),
                            ),
                        }
                    }
                }
            }
        }

        match &doc.initial {
            Some(terms) => self.state("initial", terms, true),
            None if !doc.families.is_empty() => {
                self.report("initial", "families need an initial state")
            }
            None => {}
        }

        let mut pnames = HashSet::new();
        for (i, p) in doc.projectors.iter().enumerate() {
            let path = format!("projectors[{i}]");
            if !pnames.insert(&p.name) {
                self.report(&path, format!("projector `{}` defined twice", p.name));
            }
            self.projector(&path, p);
        }

        let mut fnames = HashSet::new();
        for (i, fam) in doc.families.iter().enumerate() {
            let fp = format!("families[{i}]");
            if !fnames.insert(&fam.name) {
                self.report(&fp, format!("family `{}` defined twice", fam.name));
            }
            if doc.steps.is_empty() {
                self.report(&fp, "families need at least one step");
            }
            let mut times = HashSet::new();
            for (j, sample) in fam.samples.iter().enumerate() {
                let sp = format!("{fp}.samples[{j}]");
                if sample.time == 0 || sample.time > doc.steps.len() {
                    self.report(
                        &sp,
                        format!("time t{} outside 1..={}", sample.time, doc.steps.len()),
                    );
                }
                if !times.insert(sample.time) {
                    self.report(&sp, format!("time t{} sampled twice", sample.time));
                }
                let mut seen = HashSet::new();
                for (k, p) in sample.projectors.iter().enumerate() {
                    let pp = format!("{sp}.projectors[{k}]");
                    if p.name == REST {
                        self.report(
                            &pp,
                            format!("`{REST}` is reserved for the completion projector"),
                        );
                    }
                    if !seen.insert(&p.name) {
                        self.report(&pp, format!("projector `{}` repeated", p.name));
                    }
                    self.projector(&pp, p);
                }
            }
        }

        let mut ids = HashSet::new();
        for (i, check) in doc.checks.iter().enumerate() {
            let cp = format!("checks[{i}]");
            if !ids.insert(&check.id) {
                self.report(&cp, format!("check id `{}` repeated", check.id));
            }
            match &check.kind {
                CheckKind::Evolution {
                    from, to, through, ..
                } => {
                    self.state(&format!("{cp}.from"), from, true);
                    self.state(&format!("{cp}.to"), to, true);
                    if through.is_some_and(|k| k > doc.steps.len()) {
                        self.report(format!("{cp}.through"), "more steps than the scenario has");
                    }
                }
                CheckKind::Consistent { family, .. }
                | CheckKind::Refused { family }
                | CheckKind::NonzeroBranches { family, .. } => self.family_exists(&cp, family),
                CheckKind::Probability { family, event, .. } => {
                    self.event(&format!("{cp}.event"), family, event)
                }
                CheckKind::Conditional {
                    family,
                    given,
                    target,
                    ..
                } => {
                    self.event(&format!("{cp}.given"), family, given);
                    self.event(&format!("{cp}.target"), family, target);
                }
                CheckKind::ChainState {
                    family,
                    branch,
                    state,
                    ..
                } => {
                    let constraints: Vec<ConstraintDef> = branch
                        .iter()
                        .enumerate()
                        .map(|(t, n)| ConstraintDef {
                            time: t + 1,
                            names: vec![n.clone()],
                        })
                        .collect();
                    if branch.len() != doc.steps.len() {
                        self.report(format!("{cp}.branch"), "branch needs one choice per step");
                    }
                    self.event(&format!("{cp}.branch"), family, &constraints);
                    self.state(&format!("{cp}.state"), state, true);
                }
                CheckKind::Compatible { left, right, .. } => {
                    self.family_exists(&cp, left);
                    self.family_exists(&cp, right);
                }
                CheckKind::Agreement { left, right, .. } => {
                    self.event(&format!("{cp}.left"), &left.family, &left.event);
                    self.event(&format!("{cp}.right"), &right.family, &right.event);
                }
                CheckKind::Conjunction { left, right, .. } => {
                    self.named_projector(&cp, left);
                    self.named_projector(&cp, right);
                }
                CheckKind::Resolution { projectors, .. } => {
                    for p in projectors {
                        self.named_projector(&cp, p);
                    }
                }
            }
        }

        if self.problems.is_empty() {
            Ok(self.renormalized)
        } else {
            Err(ParseError {
                diagnostics: self.problems,
            })
        }
    }
}

/// Check a deserialized document; returns the renormalization notes.
pub fn validate(doc: &ScenarioDocument) -> Result<Vec<String>, ParseError> {
    Validator {
        doc,
        space: None,
        problems: Vec::new(),
        renormalized: Vec::new(),
    }
    .run()
}
