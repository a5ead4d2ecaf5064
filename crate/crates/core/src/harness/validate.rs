//! Residual-level validation of manifest documents.
//!
//! Unlike the validating constructors, which stop at the first violation,
//! this walks every operator in a document and reports each invariant with
//! its measured residual.

use serde::Serialize;
use serde_json::Value;

use super::manifest::{ClassManifest, EnvironmentManifest};
use super::HarnessError;
use crate::quantum::json::{OperatorJson, PovmJson};
use crate::quantum::{eig_hermitian, ComplexMatrix, HermitianOperator};
use crate::tolerance;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub subject: String,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn measured(name: &'static str, subject: String, residual: f64, tol: f64) -> Self {
        Self {
            name,
            subject,
            residual: Some(residual),
            tolerance: Some(tol),
            passed: residual.is_finite() && residual <= tol,
            detail: None,
        }
    }

    fn outcome(name: &'static str, subject: String, result: crate::Result<()>) -> Self {
        Self {
            name,
            subject,
            residual: None,
            tolerance: None,
            passed: result.is_ok(),
            detail: result.err().map(|e| e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub kind: &'static str,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One line per check: `PASS|FAIL name subject residual=.. tol=..`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} manifest\n", self.kind);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {:<13} {}", c.name, c.subject));
            if let (Some(r), Some(t)) = (c.residual, c.tolerance) {
                out.push_str(&format!(" residual={r:.3e} tol={t:.0e}"));
            }
            if let Some(d) = &c.detail {
                out.push_str(&format!(" ({d})"));
            }
            out.push('\n');
        }
        out.push_str(if self.passed() {
            "all checks passed\n"
        } else {
            "validation failed\n"
        });
        out
    }
}

/// Validates a manifest. The kind is inferred from its keys: `predictors`
/// (concept class), `states` (environment), `elements` (POVM) or `re`
/// (density operator).
pub fn validate_document(text: &str) -> Result<ValidationReport, HarnessError> {
    let value: Value = serde_json::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
    let parse = |e: serde_json::Error| HarnessError::Parse(e.to_string());
    let obj = value
        .as_object()
        .ok_or_else(|| HarnessError::Parse("manifest must be a JSON object".into()))?;
    if obj.contains_key("predictors") {
        let m: ClassManifest = serde_json::from_value(value).map_err(parse)?;
        Ok(class_report(&m))
    } else if obj.contains_key("states") {
        let m: EnvironmentManifest = serde_json::from_value(value).map_err(parse)?;
        Ok(environment_report(&m))
    } else if obj.contains_key("elements") {
        let m: PovmJson = serde_json::from_value(value).map_err(parse)?;
        let mut checks = Vec::new();
        povm_checks("povm", &m.elements, &mut checks);
        checks.push(Check::outcome("structure", "povm".into(), m.to_povm().map(drop)));
        Ok(ValidationReport { kind: "povm", checks })
    } else if obj.contains_key("re") {
        let m: OperatorJson = serde_json::from_value(value).map_err(parse)?;
        let mut checks = Vec::new();
        state_checks("state", &m, &mut checks);
        Ok(ValidationReport { kind: "state", checks })
    } else {
        Err(HarnessError::Parse(
            "unrecognized manifest: expected predictors, states, elements or re".into(),
        ))
    }
}

fn class_report(m: &ClassManifest) -> ValidationReport {
    let mut checks = Vec::new();
    for p in &m.predictors {
        let subject = format!("predictor {}", p.id);
        povm_checks(&subject, &p.elements, &mut checks);
        for (y, e) in p.elements.iter().enumerate() {
            if let Ok(mat) = e.to_matrix() {
                let r = projectivity_residual(&mat);
                checks.push(Check::measured(
                    "projectivity",
                    format!("{subject} element {y}"),
                    r,
                    tolerance::PROJECTIVE,
                ));
            }
        }
    }
    checks.push(Check::outcome("structure", "class".into(), m.to_class().map(drop)));
    checks.push(Check::outcome("loss", "class".into(), m.loss().map(drop)));
    ValidationReport { kind: "class", checks }
}

fn environment_report(m: &EnvironmentManifest) -> ValidationReport {
    let mut checks = Vec::new();
    for (x, s) in m.states.iter().enumerate() {
        let name = m.features.get(x).cloned().unwrap_or_else(|| x.to_string());
        state_checks(&format!("state {name}"), s, &mut checks);
    }
    let flat: Vec<f64> = m.dist.iter().flatten().copied().collect();
    let min = flat.iter().copied().fold(f64::INFINITY, f64::min);
    checks.push(Check::measured("nonnegativity", "dist".into(), (-min).max(0.0), 0.0));
    let total: f64 = flat.iter().sum();
    checks.push(Check::measured(
        "normalization",
        "dist".into(),
        (total - 1.0).abs(),
        tolerance::PROBABILITY,
    ));
    checks.push(Check::outcome("structure", "environment".into(), m.to_env().map(drop)));
    ValidationReport {
        kind: "environment",
        checks,
    }
}

fn povm_checks(subject: &str, elements: &[OperatorJson], checks: &mut Vec<Check>) {
    let mut parsed = Vec::new();
    for (y, e) in elements.iter().enumerate() {
        let name = format!("{subject} element {y}");
        match e.to_matrix() {
            Ok(mat) => {
                operator_checks(&name, &mat, checks);
                parsed.push(mat);
            }
            Err(err) => checks.push(Check::outcome("shape", name, Err(err))),
        }
    }
    if parsed.len() == elements.len() && !parsed.is_empty() {
        checks.push(Check::measured(
            "completeness",
            subject.to_string(),
            completeness_residual(&parsed),
            tolerance::COMPLETENESS,
        ));
    }
}

fn state_checks(subject: &str, op: &OperatorJson, checks: &mut Vec<Check>) {
    match op.to_matrix() {
        Ok(mat) => {
            operator_checks(subject, &mat, checks);
            checks.push(Check::measured(
                "trace",
                subject.to_string(),
                (mat.trace().re - 1.0).abs(),
                tolerance::TRACE,
            ));
        }
        Err(err) => checks.push(Check::outcome("shape", subject.to_string(), Err(err))),
    }
}

/// Hermiticity and positivity of one operator.
fn operator_checks(subject: &str, mat: &ComplexMatrix, checks: &mut Vec<Check>) {
    checks.push(Check::measured(
        "hermiticity",
        subject.to_string(),
        HermitianOperator::hermiticity_residual(mat),
        tolerance::HERMITIAN,
    ));
    let herm = (mat + &mat.adjoint()).scale(0.5);
    let psd = HermitianOperator::new(herm).and_then(|h| eig_hermitian(&h));
    match psd {
        Ok(eig) => checks.push(Check::measured(
            "psd",
            subject.to_string(),
            (-eig.values[0]).max(0.0),
            tolerance::PSD,
        )),
        Err(err) => checks.push(Check::outcome("psd", subject.to_string(), Err(err))),
    }
}

fn completeness_residual(elements: &[ComplexMatrix]) -> f64 {
    let d = elements[0].rows();
    if elements.iter().any(|e| e.rows() != d) {
        return f64::INFINITY;
    }
    let sum = elements.iter().fold(ComplexMatrix::zeros(d, d), |acc, e| &acc + e);
    (&sum - &ComplexMatrix::identity(d)).max_abs()
}

fn projectivity_residual(m: &ComplexMatrix) -> f64 {
    let sq = m * m;
    (&sq - m).frobenius() / m.frobenius().max(1.0)
}
