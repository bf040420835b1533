//! Tabular output shared by the scenarios and the verify suites: named
//! numeric columns, free-text row notes, graded verdicts, and fitted
//! constants. Fits never feed a verdict; they are reported and nothing else.

use serde::Serialize;

/// One grid point. `values` lines up with the report's columns; `note` tags
/// the row family or carries a skip reason.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub values: Vec<f64>,
    pub note: String,
}

/// A single graded check. Hard verdicts come from exact computation and gate
/// the exit status; soft ones summarise sampled or asymptotic trends.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub check: String,
    pub context: String,
    pub passed: bool,
    /// slack of the inequality, positive when it holds with room
    pub margin: f64,
    pub hard: bool,
}

/// A fitted constant, labelled so it can never be mistaken for a verdict.
#[derive(Clone, Debug, Serialize)]
pub struct Fit {
    pub name: String,
    pub value: f64,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub verdicts: Vec<Verdict>,
    pub fits: Vec<Fit>,
}

/// Relative slack applied to every graded inequality.
pub(crate) const CHECK_TOL: f64 = 1e-9;

/// Grades `lhs <= rhs` up to a relative slack of `CHECK_TOL`.
pub(crate) fn verdict_le(hard: bool, check: &str, context: &str, lhs: f64, rhs: f64) -> Verdict {
    let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    Verdict {
        check: check.to_string(),
        context: context.to_string(),
        passed: lhs <= rhs + CHECK_TOL * scale,
        margin: rhs - lhs,
        hard,
    }
}

/// Grades a bare condition, carrying `margin` through for the table.
pub(crate) fn verdict_flag(
    hard: bool,
    check: &str,
    context: &str,
    passed: bool,
    margin: f64,
) -> Verdict {
    Verdict {
        check: check.to_string(),
        context: context.to_string(),
        passed,
        margin,
        hard,
    }
}

impl Report {
    pub fn new(scenario: &str, columns: &[&str]) -> Self {
        Self {
            scenario: scenario.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            verdicts: Vec::new(),
            fits: Vec::new(),
        }
    }

    pub fn push_row(&mut self, values: Vec<f64>, note: &str) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(Row {
            values,
            note: note.to_string(),
        });
    }

    pub fn check_le(&mut self, hard: bool, check: &str, context: &str, lhs: f64, rhs: f64) {
        self.verdicts.push(verdict_le(hard, check, context, lhs, rhs));
    }

    pub fn check_flag(&mut self, hard: bool, check: &str, context: &str, passed: bool, margin: f64) {
        self.verdicts
            .push(verdict_flag(hard, check, context, passed, margin));
    }

    pub fn push_fit(&mut self, name: String, value: f64, note: &str) {
        self.fits.push(Fit {
            name,
            value,
            note: note.to_string(),
        });
    }

    pub fn hard_passed(&self) -> bool {
        self.verdicts.iter().filter(|v| v.hard).all(|v| v.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// Header plus one line per row; the trailing column carries the note.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push_str(",note\n");
        for row in &self.rows {
            let vals: Vec<String> = row.values.iter().map(|v| v.to_string()).collect();
            out.push_str(&vals.join(","));
            out.push(',');
            out.push_str(&row.note);
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// One line per distinct check, aggregated over its contexts, worst
    /// margin first among failures.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut order: Vec<&str> = Vec::new();
        for v in &self.verdicts {
            if !order.contains(&v.check.as_str()) {
                order.push(&v.check);
            }
        }
        order
            .iter()
            .map(|check| {
                let of_check: Vec<&Verdict> = self
                    .verdicts
                    .iter()
                    .filter(|v| v.check == *check)
                    .collect();
                let hard = of_check[0].hard;
                let failures: Vec<&&Verdict> = of_check.iter().filter(|v| !v.passed).collect();
                let kind = if hard { "hard" } else { "soft" };
                if failures.is_empty() {
                    let worst = of_check
                        .iter()
                        .map(|v| v.margin)
                        .fold(f64::INFINITY, f64::min);
                    format!(
                        "[PASS] {} ({}, {} points, min margin {:.3e})",
                        check,
                        kind,
                        of_check.len(),
                        worst
                    )
                } else {
                    let worst = failures
                        .iter()
                        .min_by(|a, b| a.margin.total_cmp(&b.margin))
                        .unwrap();
                    format!(
                        "[FAIL] {} ({}, {} of {} points failed, worst at {}: margin {:.3e})",
                        check,
                        kind,
                        failures.len(),
                        of_check.len(),
                        worst.context,
                        worst.margin
                    )
                }
            })
            .collect()
    }
}
