//! Shared report pieces: sign conventions, defaults header and pass/fail summaries.

use serde::{Deserialize, Serialize};

use crate::harmonic::SolverOptions;
use crate::identities::INEQUALITY_SLACK;
use crate::search::SolveOptions;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignConvention {
    pub quantity: String,
    pub definition: String,
    pub unit_sphere_value: String,
}

/// Curvature and normal conventions used throughout.
pub fn sign_conventions() -> Vec<SignConvention> {
    [
        (
            "ν",
            "outer unit normal of Ω, pointing into the exterior region",
            "x/|x|",
        ),
        (
            "𝓗",
            "normalized mean curvature, mean of principal curvatures w.r.t. ν, 𝓗(∂B_R) = -1/R",
            "-1",
        ),
        ("H", "mean curvature H = -(N-1)𝓗, H(∂B_R) = (N-1)/R", "N-1"),
        (
            "∂_ν u",
            "normal derivative of the capacitary potential along ν",
            "-(N-2), -1 for N = 2",
        ),
        (
            "|Å|²",
            "squared norm of the trace-free second fundamental form",
            "0",
        ),
        (
            "residual",
            "∂_ν u - Γ𝓗 - (Γ - (N-2)), with Γ - 1 in place of Γ - (N-2) for N = 2",
            "0",
        ),
    ]
    .into_iter()
    .map(|(q, d, v)| SignConvention {
        quantity: q.into(),
        definition: d.into(),
        unit_sphere_value: v.into(),
    })
    .collect()
}

/// Defaults of every numerical option, recorded in each report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Defaults {
    pub solver: SolverOptions,
    pub search: SolveOptions,
    pub inequality_slack: f64,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            solver: SolverOptions::default(),
            search: SolveOptions::default(),
            inequality_slack: INEQUALITY_SLACK,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub defaults: Defaults,
    pub options: serde_json::Value,
    pub sign_conventions: Vec<SignConvention>,
}

impl ReportHeader {
    pub fn new(command: &str, defaults: Defaults, options: serde_json::Value) -> Self {
        ReportHeader {
            tool: "capshape".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            defaults,
            options,
            sign_conventions: sign_conventions(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

impl Summary {
    pub fn record(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// A complete JSON report: header, command-specific payload and the assertion summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub header: ReportHeader,
    pub results: T,
    pub summary: Summary,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trips() {
        let mut s = Summary::default();
        s.record(true);
        s.record(false);
        let r = Report {
            header: ReportHeader::new("test", Defaults::default(), serde_json::json!({"x": 1})),
            results: vec![1.0, 2.5],
            summary: s,
        };
        let text = serde_json::to_string(&r).unwrap();
        let back: Report<Vec<f64>> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(!back.summary.all_passed());
        assert_eq!(back.header.sign_conventions.len(), 6);
    }
}
