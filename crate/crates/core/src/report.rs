//! Machine-readable task reports and their plain-text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA: &str = "equiform-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub config: String,
    pub setup: SetupSummary,
    pub tasks: Vec<TaskReport>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetupSummary {
    pub dimension: usize,
    pub horizontal: Vec<usize>,
    pub gauge: Vec<usize>,
    pub fiber_dim: usize,
    pub convention: String,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub name: String,
    pub kind: String,
    pub pass: bool,
    #[serde(default)]
    pub notes: Vec<String>,
    pub result: TaskResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TaskResult {
    Dictionary(DictionaryRecord),
    DimTable(DimTableRecord),
    DTable { rows: Vec<DRow> },
    Verify { items: Vec<VerifyItem> },
    Express(ExpressRecord),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorRecord {
    pub label: String,
    pub p: usize,
    pub q: usize,
    pub phase: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub p: usize,
    pub q: usize,
    pub count: usize,
    pub origin_span: usize,
    pub origin_target: usize,
    pub generic_span: usize,
    pub generic_target: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DictionaryRecord {
    pub syllables: Vec<String>,
    pub generic_point: Vec<String>,
    pub generators: Vec<GeneratorRecord>,
    /// Generators of positive degree.
    pub positive: usize,
    pub cells: Vec<CellRecord>,
    pub origin_total: usize,
    pub generic_total: usize,
    /// Candidates rejected as dependent at the origin and at the generic point.
    pub rejected: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimTableRecord {
    pub stabilizer_dims: [usize; 2],
    pub generic_point: Vec<String>,
    /// Labels of the rows (horizontal degrees) and columns (vertical degrees).
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub origin: Vec<Vec<usize>>,
    pub generic: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DRow {
    pub source: String,
    pub degree: usize,
    pub image: String,
    pub residual: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyItem {
    pub expr: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpressRecord {
    pub expr: String,
    pub result: String,
    pub residual: bool,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<ReportDocument> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let s = &self.setup;
        let _ = writeln!(out, "config {}", self.config);
        let _ = writeln!(
            out,
            "algebra of dimension {}, horizontal {:?}, gauge {:?}, fiber dimension {}, {} index convention",
            s.dimension, s.horizontal, s.gauge, s.fiber_dim, s.convention
        );
        for w in &s.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        for t in &self.tasks {
            let _ = writeln!(out);
            let _ = writeln!(out, "[{}] {} ({})", verdict(t.pass), t.name, t.kind);
            render_result(&mut out, &t.result);
            for n in &t.notes {
                let _ = writeln!(out, "  note: {n}");
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "overall: {}", verdict(self.pass));
        out
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn table(out: &mut String, title: &str, rows: &[String], cols: &[String], data: &[Vec<usize>]) {
    let w = rows.iter().chain(cols).map(|s| s.len()).max().unwrap_or(1).max(3);
    let _ = writeln!(out, "  {title}");
    let _ = write!(out, "  {:>w$} |", "p\\q");
    for c in cols {
        let _ = write!(out, " {c:>w$}");
    }
    let _ = writeln!(out);
    for (r, row) in rows.iter().zip(data) {
        let _ = write!(out, "  {r:>w$} |");
        for v in row {
            let _ = write!(out, " {v:>w$}");
        }
        let _ = writeln!(out);
    }
}

fn render_result(out: &mut String, r: &TaskResult) {
    match r {
        TaskResult::Dictionary(d) => {
            let _ = writeln!(
                out,
                "  {} syllables, {} generators of positive degree, generic point ({})",
                d.syllables.len(),
                d.positive,
                d.generic_point.join(", ")
            );
            for c in &d.cells {
                let names: Vec<&str> = d
                    .generators
                    .iter()
                    .filter(|g| g.p == c.p && g.q == c.q)
                    .map(|g| g.label.as_str())
                    .collect();
                if names.is_empty() && c.origin_target == 0 && c.generic_target == 0 {
                    continue;
                }
                let _ = writeln!(
                    out,
                    "  {},{}  {:>2}  origin {}/{}  generic {}/{}  {}  {}",
                    c.p,
                    c.q,
                    c.count,
                    c.origin_span,
                    c.origin_target,
                    c.generic_span,
                    c.generic_target,
                    verdict(c.pass),
                    names.join(", ")
                );
            }
            let _ = writeln!(
                out,
                "  totals: origin {}, generic {}; rejected {} at the origin, {} at the generic point",
                d.origin_total, d.generic_total, d.rejected[0], d.rejected[1]
            );
        }
        TaskResult::DimTable(t) => {
            let _ = writeln!(
                out,
                "  stabilizer dimensions: {} at the origin, {} at ({})",
                t.stabilizer_dims[0],
                t.stabilizer_dims[1],
                t.generic_point.join(", ")
            );
            table(out, "origin", &t.row_labels, &t.col_labels, &t.origin);
            table(out, "generic point", &t.row_labels, &t.col_labels, &t.generic);
        }
        TaskResult::DTable { rows } => {
            let w = rows.iter().map(|r| r.source.len()).max().unwrap_or(0);
            for r in rows {
                let _ = writeln!(out, "  {:<w$} -> {}", r.source, r.image);
            }
        }
        TaskResult::Verify { items } => {
            for i in items {
                let _ = writeln!(out, "  {} {}: {}", verdict(i.pass), i.expr, i.detail);
            }
        }
        TaskResult::Express(e) => {
            let _ = writeln!(out, "  {} = {}", e.expr, e.result);
        }
    }
}
