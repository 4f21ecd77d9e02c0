//! Analysis of a loaded scenario into a serializable report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::compatibility::{check_compatibility, CommutationWitness, Incompatibility};
use crate::document::CheckKind;
use crate::histories::{check_consistency, Event, Probabilities};
use crate::scenarios::{fmt_num, Scenario};
use crate::{DEFAULT_TOL, DISPLAY_THRESHOLD};

/// Result of one document check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckOutcome {
    pub id: String,
    pub kind: String,
    pub passed: bool,
    pub observed: String,
    pub expected: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(id: impl Into<String>, kind: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: kind.into(),
            passed: false,
            observed: String::new(),
            expected: String::new(),
            detail: String::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepSummary {
    pub description: String,
    pub unitarity_residual: f64,
    /// Columns the compiler had to complete beyond the rules and identity.
    pub completed_columns: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BranchRow {
    pub branch: Vec<String>,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionalRow {
    pub check: String,
    pub given: Event,
    pub target: Event,
    pub probability: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilyReport {
    pub name: String,
    pub consistent: bool,
    pub max_offdiagonal: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_pair: Option<[String; 2]>,
    pub branch_count: usize,
    /// `None` when the family is inconsistent and probabilities are refused.
    pub branches: Option<Vec<BranchRow>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditionals: Vec<ConditionalRow>,
    /// Largest amplitude any branch sends into a completed column.
    pub completion_leakage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PairReport {
    pub left: String,
    pub right: String,
    pub compatible: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<CommutationWitness>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisReport {
    pub scenario: String,
    pub dimension: usize,
    pub tolerance: f64,
    pub steps: Vec<StepSummary>,
    pub families: Vec<FamilyReport>,
    pub pairs: Vec<PairReport>,
    pub checks: Vec<CheckOutcome>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub all_passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisOptions {
    pub tol: f64,
    /// Keep branches with probability at or below the display threshold.
    pub show_zero_branches: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            show_zero_branches: false,
        }
    }
}

pub fn analyze(scenario: &Scenario, options: AnalysisOptions) -> AnalysisReport {
    let tol = options.tol;
    let steps = scenario
        .steps()
        .iter()
        .map(|s| StepSummary {
            description: s.provenance().to_string(),
            unitarity_residual: s.unitarity_residual(),
            completed_columns: s.completed_labels().len(),
        })
        .collect();

    let families = scenario
        .families()
        .values()
        .map(|fam| {
            let verdict = check_consistency(fam, tol);
            let probs = Probabilities::of(fam, tol).ok();
            let branches = probs.as_ref().map(|p| {
                p.rows()
                    .iter()
                    .filter(|(_, pr)| options.show_zero_branches || *pr > DISPLAY_THRESHOLD)
                    .map(|(b, pr)| BranchRow {
                        branch: b.choices().to_vec(),
                        probability: *pr,
                    })
                    .collect()
            });
            let conditionals = scenario
                .document()
                .checks
                .iter()
                .filter_map(|c| match &c.kind {
                    CheckKind::Conditional {
                        family,
                        given,
                        target,
                        ..
                    } if family == fam.name() => {
                        let given = to_event(given);
                        let target = to_event(target);
                        let probability = probs
                            .as_ref()
                            .and_then(|p| p.conditional(&given, &target).ok());
                        Some(ConditionalRow {
                            check: c.id.clone(),
                            given,
                            target,
                            probability,
                        })
                    }
                    _ => None,
                })
                .collect();
            FamilyReport {
                name: fam.name().to_string(),
                consistent: verdict.consistent,
                max_offdiagonal: verdict.max_offdiagonal,
                worst_pair: verdict
                    .worst_pair
                    .map(|(a, b)| [a.to_string(), b.to_string()]),
                branch_count: fam.branch_count(),
                branches,
                conditionals,
                completion_leakage: fam.completion_leakage(),
            }
        })
        .collect();

    let fams: Vec<_> = scenario.families().values().collect();
    let mut pairs = Vec::new();
    for (i, a) in fams.iter().enumerate() {
        for b in &fams[i + 1..] {
            let report = match check_compatibility(a, b, tol) {
                Ok(v) => PairReport {
                    left: a.name().into(),
                    right: b.name().into(),
                    compatible: v.compatible,
                    witnesses: v.witnesses().to_vec(),
                    detail: match &v.failure {
                        Some(Incompatibility::InconsistentRefinement(r)) => {
                            format!(
                                "common refinement inconsistent, max off-diagonal {}",
                                fmt_num(r.max_offdiagonal)
                            )
                        }
                        _ => String::new(),
                    },
                },
                Err(e) => PairReport {
                    left: a.name().into(),
                    right: b.name().into(),
                    compatible: false,
                    witnesses: Vec::new(),
                    detail: e.to_string(),
                },
            };
            pairs.push(report);
        }
    }

    let checks = scenario.evaluate_checks(tol);
    let all_passed = checks.iter().all(|c| c.passed);
    AnalysisReport {
        scenario: scenario.name().to_string(),
        dimension: scenario.space().dim(),
        tolerance: tol,
        steps,
        families,
        pairs,
        checks,
        notes: scenario.notes().to_vec(),
        all_passed,
    }
}

fn to_event(constraints: &[crate::document::ConstraintDef]) -> Event {
    constraints.iter().fold(Event::new(), |e, c| {
        e.at_any(c.time, c.names.iter().cloned())
    })
}

fn describe_event(e: &Event) -> String {
    e.constraints()
        .iter()
        .map(|(t, names)| format!("t{t} ∈ {{{}}}", names.join(", ")))
        .collect::<Vec<_>>()
        .join(" and ")
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "scenario {} (dimension {}, tolerance {:e})",
            self.scenario, self.dimension, self.tolerance
        );
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        if !self.steps.is_empty() {
            let _ = writeln!(out, "\nsteps");
            for (i, s) in self.steps.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  U{}: {} (unitarity residual {}, {} completed column(s))",
                    i + 1,
                    s.description,
                    fmt_num(s.unitarity_residual),
                    s.completed_columns
                );
            }
        }
        for fam in &self.families {
            let _ = writeln!(
                out,
                "\nfamily {}: {} (max off-diagonal {}, {} branches)",
                fam.name,
                if fam.consistent {
                    "consistent"
                } else {
                    "INCONSISTENT"
                },
                fmt_num(fam.max_offdiagonal),
                fam.branch_count
            );
            if let Some([a, b]) = &fam.worst_pair {
                if !fam.consistent {
                    let _ = writeln!(out, "  worst pair: ({a}) / ({b})");
                }
            }
            match &fam.branches {
                Some(rows) => {
                    for row in rows {
                        let _ = writeln!(
                            out,
                            "  {:<14} {}",
                            fmt_num(row.probability),
                            row.branch.join(" -> ")
                        );
                    }
                }
                None => {
                    let _ = writeln!(out, "  probabilities refused");
                }
            }
            for c in &fam.conditionals {
                let value = c
                    .probability
                    .map(fmt_num)
                    .unwrap_or_else(|| "undefined".into());
                let _ = writeln!(
                    out,
                    "  Pr({} | {}) = {value}",
                    describe_event(&c.target),
                    describe_event(&c.given)
                );
            }
            if fam.completion_leakage > 0.0 {
                let _ = writeln!(
                    out,
                    "  warning: completion leakage {}",
                    fmt_num(fam.completion_leakage)
                );
            }
        }
        if !self.pairs.is_empty() {
            let _ = writeln!(out, "\ncompatibility");
            for p in &self.pairs {
                let _ = writeln!(
                    out,
                    "  {} / {}: {}",
                    p.left,
                    p.right,
                    if p.compatible {
                        "compatible"
                    } else {
                        "incompatible"
                    }
                );
                for w in &p.witnesses {
                    let _ = writeln!(
                        out,
                        "    t{}: [{}, {}] = {}",
                        w.time,
                        w.left,
                        w.right,
                        fmt_num(w.norm)
                    );
                }
                if !p.detail.is_empty() {
                    let _ = writeln!(out, "    {}", p.detail);
                }
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "\nchecks");
            for c in &self.checks {
                let _ = writeln!(
                    out,
                    "  {} {} [{}]: observed {}, expected {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.id,
                    c.kind,
                    c.observed,
                    c.expected
                );
                if !c.passed && !c.detail.is_empty() {
                    let _ = writeln!(out, "       {}", c.detail);
                }
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "\n{passed}/{} checks passed", self.checks.len());
        out
    }
}
