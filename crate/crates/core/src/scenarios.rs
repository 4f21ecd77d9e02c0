//! Built-in interferometer and spin-half scenarios, and the loader that turns
//! a [`ScenarioDocument`] into spaces, steps and families.
//!
//! Every built-in is written as a document first and then loaded, so the
//! built-ins and user files go through exactly the same code path.
//!
//! `fig1a` keeps the detectors `C`, `D` in the arms; `fig1b` removes them
//! and relies on `E`, `F` behind the second beamsplitter. The `-full` variants
//! carry all four detectors on a 96-dimensional space. Mirror phases are taken
//! to be zero, which is what makes every photon entering at `a` leave at `f`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::compatibility::{check_compatibility, conjunction_check};
use crate::document::{
    validate, CheckDef, CheckKind, ConstraintDef, ConventionDef, Diagnostic, EventRef, FamilyDef,
    ParseError, PartDef, ProjectorDef, SampleDef, ScenarioDocument, StepDef, SubsystemDef,
    SubsystemKind, Term, SCHEMA_VERSION,
};
use crate::dynamics::{
    beamsplitter_spec, detector_spec, PartialUnitarySpec, Rule, SplitterConvention, UnitaryStep,
};
use crate::hilbert::{
    lift_vectors, superpose, BasisLabel, HilbertSpace, Projector, StateVector, C64,
};
use crate::histories::{check_consistency, Event, HistoryFamily, Probabilities};
use crate::report::CheckOutcome;
use crate::{Error, Result, DISPLAY_THRESHOLD};

/// Names accepted by [`builtin`].
pub const BUILTINS: &[&str] = &[
    "fig1a",
    "fig1b",
    "fig1a-full",
    "fig1b-full",
    "interference",
    "spin",
];

/// Photon token for "absorbed by a detector".
pub const ABSORBED: &str = "∅";

const PHOTON: &str = "photon";
const MODES: [&str; 6] = ["a", "c", "d", "e", "f", ABSORBED];

/// A loaded scenario: the document it came from plus everything built from it.
#[derive(Clone, Debug)]
pub struct Scenario {
    document: ScenarioDocument,
    space: Arc<HilbertSpace>,
    steps: Vec<UnitaryStep>,
    initial: Option<StateVector>,
    projectors: IndexMap<String, Projector>,
    families: IndexMap<String, HistoryFamily>,
    notes: Vec<String>,
}

fn diagnostic(path: impl Into<String>, err: impl ToString) -> Diagnostic {
    Diagnostic {
        path: path.into(),
        line: None,
        column: None,
        message: err.to_string(),
    }
}

fn state_from_terms(space: &Arc<HilbertSpace>, terms: &[Term]) -> Result<StateVector> {
    let parsed = terms
        .iter()
        .map(|t| Ok((t.coefficient(), t.label.parse::<BasisLabel>()?)))
        .collect::<Result<Vec<_>>>()?;
    superpose(parsed, space)
}

/// Unit vector from terms already checked to be within the renormalization band.
fn unit_state(space: &Arc<HilbertSpace>, terms: &[Term]) -> Result<StateVector> {
    state_from_terms(space, terms)?.normalize()
}

fn build_projector(space: &Arc<HilbertSpace>, def: &ProjectorDef) -> Result<Projector> {
    let vectors = match &def.factors {
        None => def
            .vectors
            .iter()
            .map(|v| state_from_terms(space, v))
            .collect::<Result<Vec<_>>>()?,
        Some(factors) => {
            let names: Vec<&str> = factors.iter().map(String::as_str).collect();
            let local = def
                .vectors
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|t| Ok((t.coefficient(), t.label.parse::<BasisLabel>()?)))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            lift_vectors(space, &names, &local)?
        }
    };
    Projector::from_vectors(&vectors)
}

fn build_part(space: &Arc<HilbertSpace>, part: &PartDef) -> Result<PartialUnitarySpec> {
    match part {
        PartDef::Rules { rules } => {
            let compiled = rules
                .iter()
                .map(|r| {
                    let target = unit_state(space, &r.targets)?;
                    let targets = space
                        .labels()
                        .iter()
                        .zip(target.amplitudes().iter())
                        .filter(|(_, a)| a.norm() > 0.0)
                        .map(|(l, a)| (*a, l.clone()))
                        .collect();
                    Ok(Rule {
                        source: r.source.parse()?,
                        targets,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            PartialUnitarySpec::new("rules", compiled)
        }
        PartDef::Beamsplitter {
            factor,
            inputs,
            outputs,
            convention,
        } => {
            let convention = match convention {
                ConventionDef::SignFlip => SplitterConvention::SignFlip,
                ConventionDef::ImaginaryReflection => SplitterConvention::ImaginaryReflection,
            };
            beamsplitter_spec(
                space,
                factor,
                (&inputs[0], inputs.get(1).map(String::as_str)),
                (&outputs[0], &outputs[1]),
                convention,
            )
        }
        PartDef::Detector {
            factor,
            mode,
            detector,
            absorbed,
        } => detector_spec(space, factor, mode, detector, absorbed),
    }
}

fn event_of(constraints: &[ConstraintDef]) -> Event {
    constraints.iter().fold(Event::new(), |e, c| {
        e.at_any(c.time, c.names.iter().cloned())
    })
}

impl Scenario {
    /// Validate and build. Build failures (non-isometric rules, overlapping
    /// projectors and the like) are reported as diagnostics too.
    pub fn from_document(document: ScenarioDocument) -> std::result::Result<Self, ParseError> {
        let notes = validate(&document)?;
        let space = document.build_space().map_err(|e| ParseError {
            diagnostics: vec![diagnostic("space", e)],
        })?;
        let mut problems = Vec::new();

        let mut steps = Vec::with_capacity(document.steps.len());
        for (i, step) in document.steps.iter().enumerate() {
            let specs = step
                .parts
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    build_part(&space, p)
                        .map_err(|e| diagnostic(format!("steps[{i}].parts[{j}]"), e))
                })
                .collect::<std::result::Result<Vec<_>, _>>();
            match specs.and_then(|specs| {
                UnitaryStep::sequence(&space, &specs)
                    .map_err(|e| diagnostic(format!("steps[{i}]"), e))
            }) {
                Ok(compiled) if step.description.is_empty() => steps.push(compiled),
                Ok(compiled) => steps.push(compiled.described(&step.description)),
                Err(d) => problems.push(d),
            }
        }

        let initial = match &document.initial {
            Some(terms) => match unit_state(&space, terms) {
                Ok(s) => Some(s),
                Err(e) => {
                    problems.push(diagnostic("initial", e));
                    None
                }
            },
            None => None,
        };

        let mut projectors = IndexMap::new();
        for (i, def) in document.projectors.iter().enumerate() {
            match build_projector(&space, def) {
                Ok(p) => {
                    projectors.insert(def.name.clone(), p);
                }
                Err(e) => problems.push(diagnostic(format!("projectors[{i}]"), e)),
            }
        }

        let mut families = IndexMap::new();
        if problems.is_empty() {
            if let Some(initial) = &initial {
                for (i, def) in document.families.iter().enumerate() {
                    let path = format!("families[{i}]");
                    let mut builder =
                        HistoryFamily::builder(&def.name, initial.clone(), steps.clone());
                    let mut ok = true;
                    for (j, sample) in def.samples.iter().enumerate() {
                        let mut ps = Vec::with_capacity(sample.projectors.len());
                        for (k, p) in sample.projectors.iter().enumerate() {
                            match build_projector(&space, p) {
                                Ok(built) => ps.push((p.name.clone(), built)),
                                Err(e) => {
                                    ok = false;
                                    problems.push(diagnostic(
                                        format!("{path}.samples[{j}].projectors[{k}]"),
                                        e,
                                    ));
                                }
                            }
                        }
                        builder = builder.sample(sample.time, ps);
                    }
                    if !ok {
                        continue;
                    }
                    match builder.build() {
                        Ok(f) => {
                            families.insert(def.name.clone(), f);
                        }
                        Err(e) => problems.push(diagnostic(path, e)),
                    }
                }
            }
        }

        if !problems.is_empty() {
            return Err(ParseError {
                diagnostics: problems,
            });
        }
        Ok(Self {
            document,
            space,
            steps,
            initial,
            projectors,
            families,
            notes,
        })
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, ParseError> {
        let parsed = crate::document::parse_document(text)?;
        Self::from_document(parsed.document)
    }

    pub fn to_json(&self) -> String {
        self.document.to_json()
    }

    pub fn name(&self) -> &str {
        &self.document.name
    }

    pub fn document(&self) -> &ScenarioDocument {
        &self.document
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn steps(&self) -> &[UnitaryStep] {
        &self.steps
    }

    pub fn initial(&self) -> Option<&StateVector> {
        self.initial.as_ref()
    }

    pub fn projectors(&self) -> &IndexMap<String, Projector> {
        &self.projectors
    }

    pub fn projector(&self, name: &str) -> Option<&Projector> {
        self.projectors.get(name)
    }

    pub fn families(&self) -> &IndexMap<String, HistoryFamily> {
        &self.families
    }

    pub fn family(&self, name: &str) -> Option<&HistoryFamily> {
        self.families.get(name)
    }

    /// Renormalization notes recorded while loading.
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// `U_k ⋯ U_1 |v⟩` for the first `k` steps.
    pub fn evolve(&self, v: &StateVector, k: usize) -> Result<StateVector> {
        self.steps[..k.min(self.steps.len())]
            .iter()
            .try_fold(v.clone(), |s, step| step.apply(&s))
    }

    /// Run every check in the document. `tol` is the consistency tolerance
    /// used for verdicts and for refusing probabilities; each check carries
    /// its own comparison tolerance.
    pub fn evaluate_checks(&self, tol: f64) -> Vec<CheckOutcome> {
        self.document
            .checks
            .iter()
            .map(|c| self.evaluate(c, tol))
            .collect()
    }

    fn fam(&self, name: &str) -> Result<&HistoryFamily> {
        self.family(name)
            .ok_or_else(|| Error::MalformedFamily(format!("no family `{name}`")))
    }

    fn proj(&self, name: &str) -> Result<&Projector> {
        self.projector(name)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    fn evaluate(&self, check: &CheckDef, tol: f64) -> CheckOutcome {
        let outcome = CheckOutcome::new(&check.id, check.kind.name());
        match self.run_check(&check.kind, tol) {
            Ok(Measured {
                passed,
                observed,
                expected,
                detail,
            }) => CheckOutcome {
                passed,
                observed,
                expected,
                detail,
                ..outcome
            },
            Err(e) => CheckOutcome {
                passed: false,
                detail: format!("error: {e}"),
                ..outcome
            },
        }
    }

    fn run_check(&self, kind: &CheckKind, ctol: f64) -> Result<Measured> {
        Ok(match kind {
            CheckKind::Evolution {
                from,
                to,
                through,
                tol,
            } => {
                let k = through.unwrap_or(self.steps.len());
                let start = unit_state(&self.space, from)?;
                let goal = unit_state(&self.space, to)?;
                let distance = self.evolve(&start, k)?.distance(&goal)?;
                Measured::new(
                    distance <= *tol,
                    fmt_num(distance),
                    format!("<= {}", fmt_num(*tol)),
                )
                .detail(format!("distance after {k} step(s)"))
            }
            CheckKind::Consistent {
                family,
                expected,
                max_offdiagonal,
                tol,
            } => {
                let verdict = check_consistency(self.fam(family)?, ctol);
                let value_ok =
                    max_offdiagonal.is_none_or(|m| (verdict.max_offdiagonal - m).abs() <= *tol);
                let mut expected_text = if *expected {
                    "consistent"
                } else {
                    "inconsistent"
                }
                .to_string();
                if let Some(m) = max_offdiagonal {
                    expected_text.push_str(&format!(", max off-diagonal {}", fmt_num(*m)));
                }
                let observed = format!(
                    "{}, max off-diagonal {}",
                    if verdict.consistent {
                        "consistent"
                    } else {
                        "inconsistent"
                    },
                    fmt_num(verdict.max_offdiagonal)
                );
                let detail = verdict
                    .worst_pair
                    .as_ref()
                    .map(|(a, b)| format!("worst pair ({a}) / ({b})"))
                    .unwrap_or_default();
                Measured::new(
                    verdict.consistent == *expected && value_ok,
                    observed,
                    expected_text,
                )
                .detail(detail)
            }
            CheckKind::Probability {
                family,
                event,
                expected,
                tol,
            } => {
                let p = Probabilities::of(self.fam(family)?, ctol)?.event(&event_of(event));
                Measured::new((p - expected).abs() <= *tol, fmt_num(p), fmt_num(*expected))
            }
            CheckKind::Conditional {
                family,
                given,
                target,
                expected,
                tol,
            } => {
                let p = Probabilities::of(self.fam(family)?, ctol)?
                    .conditional(&event_of(given), &event_of(target))?;
                Measured::new((p - expected).abs() <= *tol, fmt_num(p), fmt_num(*expected))
            }
            CheckKind::Refused { family } => match Probabilities::of(self.fam(family)?, ctol) {
                Err(e @ Error::InconsistentFamily { .. }) => {
                    Measured::new(true, "refused".into(), "refused".into()).detail(e.to_string())
                }
                Err(e) => return Err(e),
                Ok(_) => Measured::new(false, "assigned".into(), "refused".into()),
            },
            CheckKind::NonzeroBranches { family, expected } => {
                let probs = Probabilities::of(self.fam(family)?, ctol)?;
                let nonzero: Vec<String> = probs
                    .rows()
                    .iter()
                    .filter(|(_, p)| *p > DISPLAY_THRESHOLD)
                    .map(|(b, _)| b.to_string())
                    .collect();
                Measured::new(
                    nonzero.len() == *expected,
                    nonzero.len().to_string(),
                    expected.to_string(),
                )
                .detail(nonzero.join("; "))
            }
            CheckKind::ChainState {
                family,
                branch,
                state,
                tol,
            } => {
                let fam = self.fam(family)?;
                let chain =
                    fam.chain_vector(&crate::histories::Branch::new(branch.iter().cloned()))?;
                let target = unit_state(&self.space, state)?;
                let overlap = target.inner(&chain)?;
                let residual = chain.add(&target.scale(-overlap))?.norm();
                let weight = chain.norm_squared();
                Measured::new(
                    residual <= *tol && weight > DISPLAY_THRESHOLD,
                    format!("residual {}, weight {}", fmt_num(residual), fmt_num(weight)),
                    format!("residual <= {}", fmt_num(*tol)),
                )
                .detail("chain vector against the target ray".into())
            }
            CheckKind::Compatible {
                left,
                right,
                expected,
                witness_times,
            } => {
                let verdict = check_compatibility(self.fam(left)?, self.fam(right)?, ctol)?;
                let times = verdict.witness_times();
                let times_ok = witness_times.iter().all(|t| times.contains(t));
                let observed = if verdict.compatible {
                    "compatible".to_string()
                } else {
                    format!("incompatible, witnesses at {}", fmt_times(&times))
                };
                let mut expected_text = if *expected {
                    "compatible"
                } else {
                    "incompatible"
                }
                .to_string();
                if !witness_times.is_empty() {
                    expected_text.push_str(&format!(", witnesses at {}", fmt_times(witness_times)));
                }
                let detail = verdict
                    .witnesses()
                    .iter()
                    .map(|w| format!("t{} {}/{} {}", w.time, w.left, w.right, fmt_num(w.norm)))
                    .collect::<Vec<_>>()
                    .join("; ");
                Measured::new(
                    verdict.compatible == *expected && times_ok,
                    observed,
                    expected_text,
                )
                .detail(detail)
            }
            CheckKind::Agreement { left, right, tol } => {
                let side = |r: &EventRef| -> Result<f64> {
                    Ok(Probabilities::of(self.fam(&r.family)?, ctol)?.event(&event_of(&r.event)))
                };
                let (l, r) = (side(left)?, side(right)?);
                Measured::new(
                    (l - r).abs() <= *tol,
                    format!("{} vs {}", fmt_num(l), fmt_num(r)),
                    format!("|difference| <= {}", fmt_num(*tol)),
                )
                .detail(format!("{} / {}", left.family, right.family))
            }
            CheckKind::Conjunction {
                left,
                right,
                commutator_spectral,
                product_is_projector,
                min_idempotence_residual,
                tol,
            } => {
                let report = conjunction_check(self.proj(left)?, self.proj(right)?)?;
                let passed = (report.commutator_spectral - commutator_spectral).abs() <= *tol
                    && report.product_is_projector == *product_is_projector
                    && min_idempotence_residual
                        .is_none_or(|m| report.product_idempotence_residual >= m);
                let mut expected = format!(
                    "commutator {}, product {}a projector",
                    fmt_num(*commutator_spectral),
                    if *product_is_projector { "" } else { "not " }
                );
                if let Some(m) = min_idempotence_residual {
                    expected.push_str(&format!(", idempotence residual >= {}", fmt_num(*m)));
                }
                Measured::new(
                    passed,
                    format!(
                        "commutator {}, product {}a projector, idempotence residual {}",
                        fmt_num(report.commutator_spectral),
                        if report.product_is_projector {
                            ""
                        } else {
                            "not "
                        },
                        fmt_num(report.product_idempotence_residual)
                    ),
                    expected,
                )
            }
            CheckKind::Resolution { projectors, tol } => {
                let n = self.space.dim();
                let mut sum = nalgebra::DMatrix::<C64>::zeros(n, n);
                for name in projectors {
                    sum += self.proj(name)?.matrix();
                }
                let residual = (sum - nalgebra::DMatrix::<C64>::identity(n, n)).norm();
                Measured::new(
                    residual <= *tol,
                    fmt_num(residual),
                    format!("<= {}", fmt_num(*tol)),
                )
                .detail(format!("‖Σ P − I‖ over {}", projectors.join(", ")))
            }
        })
    }
}

struct Measured {
    passed: bool,
    observed: String,
    expected: String,
    detail: String,
}

impl Measured {
    fn new(passed: bool, observed: String, expected: String) -> Self {
        Self {
            passed,
            observed,
            expected,
            detail: String::new(),
        }
    }

    fn detail(mut self, detail: String) -> Self {
        self.detail = detail;
        self
    }
}

/// Short rendering that keeps tiny residuals readable.
pub(crate) fn fmt_num(x: f64) -> String {
    if x == 0.0 || (1e-4..1e6).contains(&x.abs()) {
        let s = format!("{x:.12}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.to_string()
        }
    } else {
        format!("{x:.3e}")
    }
}

fn fmt_times(times: &[usize]) -> String {
    times
        .iter()
        .map(|t| format!("t{t}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn builtin_document(name: &str) -> Option<ScenarioDocument> {
    Some(match name {
        "fig1a" => fig1a_document(false),
        "fig1b" => fig1b_document(false),
        "fig1a-full" => fig1a_document(true),
        "fig1b-full" => fig1b_document(true),
        "interference" => interference_document(),
        "spin" => spin_document(),
        _ => return None,
    })
}

pub fn builtin(name: &str) -> Option<Scenario> {
    builtin_document(name)
        .map(|d| Scenario::from_document(d).expect("built-in scenarios are valid"))
}

pub fn build_fig1a() -> Scenario {
    builtin("fig1a").expect("known")
}

pub fn build_fig1b() -> Scenario {
    builtin("fig1b").expect("known")
}

pub fn build_spin_half() -> Scenario {
    builtin("spin").expect("known")
}

/// Detector-free interferometer: the arm-basis family that cannot be
/// assigned probabilities.
pub fn build_interference() -> Scenario {
    builtin("interference").expect("known")
}

// ---- document construction -------------------------------------------------

const H: f64 = FRAC_1_SQRT_2;

fn t(label: impl Into<String>, re: f64) -> Term {
    Term::new(label, re, 0.0)
}

/// Basis label of the joint photon ⊗ detectors space, with the detectors
/// named in `triggered` starred.
struct Layout {
    detectors: Vec<&'static str>,
}

impl Layout {
    fn ket(&self, photon: &str, triggered: &[&str]) -> String {
        let mut parts = vec![photon.to_string()];
        for d in &self.detectors {
            parts.push(if triggered.contains(d) {
                format!("{d}*")
            } else {
                d.to_string()
            });
        }
        parts.join(",")
    }

    fn space(&self) -> Vec<SubsystemDef> {
        let mut space = vec![SubsystemDef {
            name: PHOTON.into(),
            kind: SubsystemKind::Mode,
            tokens: MODES.iter().map(|s| s.to_string()).collect(),
        }];
        for d in &self.detectors {
            space.push(SubsystemDef {
                name: d.to_string(),
                kind: SubsystemKind::Detector,
                tokens: vec![d.to_string(), format!("{d}*")],
            });
        }
        space
    }
}

/// Projector acting on the photon only.
fn photon_projector(name: &str, terms: Vec<Term>) -> ProjectorDef {
    ProjectorDef {
        name: name.into(),
        factors: Some(vec![PHOTON.into()]),
        vectors: vec![terms],
    }
}

/// Projector acting on a pair of detectors only.
fn pointer_projector(name: &str, pair: [&str; 2], terms: Vec<Term>) -> ProjectorDef {
    ProjectorDef {
        name: name.into(),
        factors: Some(pair.iter().map(|s| s.to_string()).collect()),
        vectors: vec![terms],
    }
}

fn pointer(d1: &str, d2: &str, first: bool) -> String {
    if first {
        format!("{d1}*,{d2}")
    } else {
        format!("{d1},{d2}*")
    }
}

fn sample(time: usize, projectors: Vec<ProjectorDef>) -> SampleDef {
    SampleDef { time, projectors }
}

fn at(time: usize, name: &str) -> ConstraintDef {
    ConstraintDef {
        time,
        names: vec![name.into()],
    }
}

fn check(id: &str, kind: CheckKind) -> CheckDef {
    CheckDef {
        id: id.into(),
        kind,
    }
}

fn probability(family: &str, event: Vec<ConstraintDef>, expected: f64) -> CheckKind {
    CheckKind::Probability {
        family: family.into(),
        event,
        expected,
        tol: crate::DEFAULT_TOL,
    }
}

fn consistent(family: &str) -> CheckKind {
    CheckKind::Consistent {
        family: family.into(),
        expected: true,
        max_offdiagonal: None,
        tol: crate::DEFAULT_TOL,
    }
}

fn first_splitter() -> StepDef {
    StepDef {
        description: "first beamsplitter".into(),
        parts: vec![PartDef::Beamsplitter {
            factor: PHOTON.into(),
            inputs: vec!["a".into()],
            outputs: vec!["c".into(), "d".into()],
            convention: ConventionDef::SignFlip,
        }],
    }
}

fn second_splitter() -> StepDef {
    StepDef {
        description: "second beamsplitter".into(),
        parts: vec![PartDef::Beamsplitter {
            factor: PHOTON.into(),
            inputs: vec!["c".into(), "d".into()],
            outputs: vec!["e".into(), "f".into()],
            convention: ConventionDef::SignFlip,
        }],
    }
}

fn detection(pairs: [(&str, &str); 2]) -> StepDef {
    StepDef {
        description: format!("detection at {} and {}", pairs[0].1, pairs[1].1),
        parts: pairs
            .iter()
            .map(|(mode, det)| PartDef::Detector {
                factor: PHOTON.into(),
                mode: mode.to_string(),
                detector: det.to_string(),
                absorbed: ABSORBED.into(),
            })
            .collect(),
    }
}

fn arm(name: &str) -> ProjectorDef {
    photon_projector(name, vec![t(name, 1.0)])
}

fn superposed_arms() -> ProjectorDef {
    photon_projector("s", vec![t("c", H), t("d", H)])
}

fn fig1a_document(full: bool) -> ScenarioDocument {
    let layout = Layout {
        detectors: if full {
            vec!["C", "D", "E", "F"]
        } else {
            vec!["C", "D"]
        },
    };
    let cd = ["C", "D"];
    let c_fired = || pointer_projector("C*D", cd, vec![t(pointer("C", "D", true), 1.0)]);
    let d_fired = || pointer_projector("CD*", cd, vec![t(pointer("C", "D", false), 1.0)]);
    let cat = pointer_projector(
        "S",
        cd,
        vec![
            t(pointer("C", "D", true), H),
            t(pointer("C", "D", false), H),
        ],
    );
    let cat_state = vec![
        t(layout.ket(ABSORBED, &["C"]), H),
        t(layout.ket(ABSORBED, &["D"]), H),
    ];

    let families = vec![
        FamilyDef {
            name: "eq5".into(),
            samples: vec![
                sample(1, vec![arm("c"), arm("d")]),
                sample(2, vec![c_fired(), d_fired()]),
            ],
        },
        FamilyDef {
            name: "eq10".into(),
            samples: vec![sample(1, vec![superposed_arms()]), sample(2, vec![cat])],
        },
        FamilyDef {
            name: "eq12".into(),
            samples: vec![
                sample(1, vec![superposed_arms()]),
                sample(2, vec![c_fired(), d_fired()]),
            ],
        },
    ];

    let agreement = |id: &str, pointer_name: &str| {
        check(
            id,
            CheckKind::Agreement {
                left: EventRef {
                    family: "eq5".into(),
                    event: vec![at(2, pointer_name)],
                },
                right: EventRef {
                    family: "eq12".into(),
                    event: vec![at(2, pointer_name)],
                },
                tol: crate::DEFAULT_TOL,
            },
        )
    };

    let checks = vec![
        check(
            "detection-yields-cat",
            CheckKind::Evolution {
                from: vec![t(layout.ket("a", &[]), 1.0)],
                to: cat_state.clone(),
                through: None,
                tol: crate::DEFAULT_TOL,
            },
        ),
        check("eq5-consistent", consistent("eq5")),
        check("eq5-pr-C", probability("eq5", vec![at(2, "C*D")], 0.5)),
        check("eq5-pr-D", probability("eq5", vec![at(2, "CD*")], 0.5)),
        check(
            "eq5-retrodiction",
            CheckKind::Conditional {
                family: "eq5".into(),
                given: vec![at(2, "C*D")],
                target: vec![at(1, "c")],
                expected: 1.0,
                tol: crate::DEFAULT_TOL,
            },
        ),
        check("eq10-consistent", consistent("eq10")),
        check(
            "eq10-single-branch",
            CheckKind::NonzeroBranches {
                family: "eq10".into(),
                expected: 1,
            },
        ),
        check(
            "eq10-pr-S",
            probability("eq10", vec![at(1, "s"), at(2, "S")], 1.0),
        ),
        check(
            "eq10-ends-in-S",
            CheckKind::ChainState {
                family: "eq10".into(),
                branch: vec!["s".into(), "S".into()],
                state: cat_state,
                tol: crate::DEFAULT_TOL,
            },
        ),
        check("eq12-consistent", consistent("eq12")),
        check(
            "eq5-vs-eq10",
            CheckKind::Compatible {
                left: "eq5".into(),
                right: "eq10".into(),
                expected: false,
                witness_times: vec![2],
            },
        ),
        check(
            "eq5-vs-eq12",
            CheckKind::Compatible {
                left: "eq5".into(),
                right: "eq12".into(),
                expected: false,
                witness_times: vec![1],
            },
        ),
        agreement("agreement-C", "C*D"),
        agreement("agreement-D", "CD*"),
    ];

    ScenarioDocument {
        schema_version: SCHEMA_VERSION,
        name: if full { "fig1a-full" } else { "fig1a" }.into(),
        description: if full {
            "Detectors C and D in the arms, with E and F also present behind the unused second splitter port".into()
        } else {
            "Detectors C and D in the arms of the interferometer".into()
        },
        space: layout.space(),
        steps: vec![first_splitter(), detection([("c", "C"), ("d", "D")])],
        initial: Some(vec![t(layout.ket("a", &[]), 1.0)]),
        projectors: Vec::new(),
        families,
        checks,
    }
}

fn fig1b_document(full: bool) -> ScenarioDocument {
    let layout = Layout {
        detectors: if full {
            vec!["C", "D", "E", "F"]
        } else {
            vec!["E", "F"]
        },
    };
    let ef = ["E", "F"];
    let e_fired = pointer_projector("E*F", ef, vec![t(pointer("E", "F", true), 1.0)]);
    let f_fired = pointer_projector("EF*", ef, vec![t(pointer("E", "F", false), 1.0)]);
    let u = photon_projector("u", vec![t("e", H), t("f", H)]);
    let v = photon_projector("v", vec![t("e", -H), t("f", H)]);
    let big_u = pointer_projector(
        "U",
        ef,
        vec![
            t(pointer("E", "F", true), H),
            t(pointer("E", "F", false), H),
        ],
    );
    let big_v = pointer_projector(
        "V",
        ef,
        vec![
            t(pointer("E", "F", true), -H),
            t(pointer("E", "F", false), H),
        ],
    );

    let families = vec![
        FamilyDef {
            name: "eq7".into(),
            samples: vec![
                sample(1, vec![superposed_arms()]),
                sample(2, vec![arm("e"), arm("f")]),
                sample(3, vec![e_fired, f_fired]),
            ],
        },
        FamilyDef {
            name: "eq8".into(),
            samples: vec![
                sample(1, vec![arm("c"), arm("d")]),
                sample(2, vec![u, v]),
                sample(3, vec![big_u, big_v]),
            ],
        },
    ];

    let cat = |sign: f64| {
        vec![
            t(layout.ket(ABSORBED, &["E"]), sign * H),
            t(layout.ket(ABSORBED, &["F"]), H),
        ]
    };
    let branch_pr = |family: &str, names: [&str; 3], expected: f64| {
        let event = names
            .iter()
            .enumerate()
            .map(|(i, n)| at(i + 1, n))
            .collect();
        match probability(family, event, expected) {
            CheckKind::Probability {
                family,
                event,
                expected,
                ..
            } if expected == 0.0 => CheckKind::Probability {
                family,
                event,
                expected,
                tol: DISPLAY_THRESHOLD,
            },
            other => other,
        }
    };

    let checks = vec![
        check(
            "interference-identity",
            CheckKind::Evolution {
                from: vec![t(layout.ket("a", &[]), 1.0)],
                to: vec![t(layout.ket("f", &[]), 1.0)],
                through: Some(2),
                tol: crate::DEFAULT_TOL,
            },
        ),
        check(
            "photon-reaches-F",
            CheckKind::Evolution {
                from: vec![t(layout.ket("a", &[]), 1.0)],
                to: vec![t(layout.ket(ABSORBED, &["F"]), 1.0)],
                through: None,
                tol: crate::DEFAULT_TOL,
            },
        ),
        check("eq7-consistent", consistent("eq7")),
        check("eq7-pr-F", probability("eq7", vec![at(3, "EF*")], 1.0)),
        check("eq7-F-branch", branch_pr("eq7", ["s", "f", "EF*"], 1.0)),
        check("eq7-E-branch", branch_pr("eq7", ["s", "e", "E*F"], 0.0)),
        check("eq8-consistent", consistent("eq8")),
        check("eq8-pr-U", probability("eq8", vec![at(3, "U")], 0.5)),
        check("eq8-pr-V", probability("eq8", vec![at(3, "V")], 0.5)),
        check("eq8-U-branch", branch_pr("eq8", ["c", "u", "U"], 0.5)),
        check("eq8-V-branch", branch_pr("eq8", ["d", "v", "V"], 0.5)),
        check(
            "eq8-ends-in-U",
            CheckKind::ChainState {
                family: "eq8".into(),
                branch: vec!["c".into(), "u".into(), "U".into()],
                state: cat(1.0),
                tol: crate::DEFAULT_TOL,
            },
        ),
        check(
            "eq8-ends-in-V",
            CheckKind::ChainState {
                family: "eq8".into(),
                branch: vec!["d".into(), "v".into(), "V".into()],
                state: cat(-1.0),
                tol: crate::DEFAULT_TOL,
            },
        ),
        check(
            "eq7-vs-eq8",
            CheckKind::Compatible {
                left: "eq7".into(),
                right: "eq8".into(),
                expected: false,
                witness_times: vec![1],
            },
        ),
    ];

    ScenarioDocument {
        schema_version: SCHEMA_VERSION,
        name: if full { "fig1b-full" } else { "fig1b" }.into(),
        description: if full {
            "C and D removed from the arms (kept in the space, never coupled); E and F behind the second splitter".into()
        } else {
            "C and D removed at the last moment; E and F behind the second splitter".into()
        },
        space: layout.space(),
        steps: vec![
            first_splitter(),
            second_splitter(),
            detection([("e", "E"), ("f", "F")]),
        ],
        initial: Some(vec![t(layout.ket("a", &[]), 1.0)]),
        projectors: Vec::new(),
        families,
        checks,
    }
}

fn interference_document() -> ScenarioDocument {
    let ray = |name: &str| ProjectorDef {
        name: name.into(),
        factors: None,
        vectors: vec![vec![t(name, 1.0)]],
    };
    ScenarioDocument {
        schema_version: SCHEMA_VERSION,
        name: "interference".into(),
        description:
            "Both splitters, no detectors: the arm basis interferes and gets no probabilities"
                .into(),
        space: vec![SubsystemDef {
            name: PHOTON.into(),
            kind: SubsystemKind::Mode,
            tokens: ["a", "c", "d", "e", "f"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }],
        steps: vec![first_splitter(), second_splitter()],
        initial: Some(vec![t("a", 1.0)]),
        projectors: Vec::new(),
        families: vec![FamilyDef {
            name: "arms".into(),
            samples: vec![
                sample(1, vec![ray("c"), ray("d")]),
                sample(2, vec![ray("e"), ray("f")]),
            ],
        }],
        checks: vec![
            check(
                "interference-identity",
                CheckKind::Evolution {
                    from: vec![t("a", 1.0)],
                    to: vec![t("f", 1.0)],
                    through: None,
                    tol: crate::DEFAULT_TOL,
                },
            ),
            check(
                "arms-inconsistent",
                CheckKind::Consistent {
                    family: "arms".into(),
                    expected: false,
                    max_offdiagonal: Some(0.25),
                    tol: crate::DEFAULT_TOL,
                },
            ),
            check(
                "arms-refused",
                CheckKind::Refused {
                    family: "arms".into(),
                },
            ),
        ],
    }
}

fn spin_document() -> ScenarioDocument {
    let ray = |name: &str, terms: Vec<Term>| ProjectorDef {
        name: name.into(),
        factors: None,
        vectors: vec![terms],
    };
    ScenarioDocument {
        schema_version: SCHEMA_VERSION,
        name: "spin".into(),
        description: "Spin half: Sx = +1/2 and Sz = +1/2 have no joint projector".into(),
        space: vec![SubsystemDef {
            name: "spin".into(),
            kind: SubsystemKind::Mode,
            tokens: vec!["z+".into(), "z-".into()],
        }],
        steps: Vec::new(),
        initial: None,
        projectors: vec![
            ray("Sx+", vec![t("z+", H), t("z-", H)]),
            ray("Sx-", vec![t("z+", -H), t("z-", H)]),
            ray("Sz+", vec![t("z+", 1.0)]),
            ray("Sz-", vec![t("z-", 1.0)]),
        ],
        families: Vec::new(),
        checks: vec![
            check(
                "Sx-and-Sz",
                CheckKind::Conjunction {
                    left: "Sx+".into(),
                    right: "Sz+".into(),
                    commutator_spectral: 0.5,
                    product_is_projector: false,
                    min_idempotence_residual: Some(0.2),
                    tol: crate::DEFAULT_TOL,
                },
            ),
            check(
                "Sz-resolution",
                CheckKind::Resolution {
                    projectors: vec!["Sz+".into(), "Sz-".into()],
                    tol: crate::DEFAULT_TOL,
                },
            ),
            check(
                "Sx-resolution",
                CheckKind::Resolution {
                    projectors: vec!["Sx+".into(), "Sx-".into()],
                    tol: crate::DEFAULT_TOL,
                },
            ),
        ],
    }
}
