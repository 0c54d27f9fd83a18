//! Batch reports: one item per top-level form, serialized with a fixed field
//! order.

use std::fmt::Write as _;

use serde::Serialize;

use crate::phase::LawReport;

pub const SCHEMA_VERSION: &str = "stc-report/1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// A semantic verdict failed.
    Fail,
    /// The input could not be read or parsed.
    #[default]
    Error,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    Stc,
    Calf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub col: Option<usize>,
}

impl Diagnostic {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            code: code.into(),
            message: message.into(),
            line: None,
            col: None,
        }
    }

    pub fn at(mut self, line: usize, col: usize) -> Self {
        self.line = Some(line);
        self.col = Some(col);
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Item {
    pub file: String,
    pub index: usize,
    pub line: usize,
    pub col: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub language: Option<Language>,
    pub source: String,
    pub status: Status,
    #[serde(rename = "type", skip_serializing_if = "Option::is_none")]
    pub ty: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nbe_tag: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tracking_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_cost: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_tag: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_witness_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beh_witness_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Timings {
    pub total_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: Tool,
    pub command: &'static str,
    pub inputs: Vec<String>,
    pub ok: bool,
    pub exit_code: u8,
    pub summary: Summary,
    pub items: Vec<Item>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub laws: Option<LawReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Diagnostic>,
    pub timings: Timings,
}

impl Report {
    pub fn new(command: &'static str, inputs: Vec<String>) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            tool: Tool {
                name: "stc",
                version: env!("CARGO_PKG_VERSION"),
            },
            command,
            inputs,
            ok: true,
            exit_code: 0,
            summary: Summary::default(),
            items: Vec::new(),
            laws: None,
            error: None,
            timings: Timings { total_ms: 0 },
        }
    }

    /// Recomputes the summary and exit code from the items, the law report
    /// and any top-level error.
    pub fn finish(&mut self) {
        let mut s = Summary {
            total: self.items.len(),
            ..Summary::default()
        };
        let mut worst = Status::Pass;
        for item in &self.items {
            match item.status {
                Status::Pass => s.passed += 1,
                Status::Fail => s.failed += 1,
                Status::Error => s.errors += 1,
            }
            worst = worst.max(item.status);
        }
        if let Some(laws) = &self.laws {
            if !laws.ok() {
                worst = worst.max(Status::Fail);
            }
        }
        if self.error.is_some() {
            worst = Status::Error;
        }
        self.summary = s;
        self.exit_code = worst.exit_code();
        self.ok = worst == Status::Pass;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error[{}]: {}", e.code, e.message);
        }
        for item in &self.items {
            let status = match item.status {
                Status::Pass => "ok",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            let _ = write!(out, "{}:{}:{}: {status}", item.file, item.line, item.col);
            if let Some(ty) = &item.ty {
                let _ = write!(out, " : {ty}");
            }
            if let Some(tag) = item.tag {
                let _ = write!(out, " => {tag}");
            }
            if let Some(cost) = item.cost {
                let _ = write!(out, " cost={cost}");
            }
            if let Some(ok) = item.tracking_ok {
                let _ = write!(out, " tracking={}", if ok { "ok" } else { "broken" });
            }
            if let Some(n) = item.witness_steps {
                let _ = write!(out, " witness={n} steps");
            }
            if let Some(e) = &item.error {
                let _ = write!(out, "\n  {}: {}", e.code, e.message);
            }
            out.push('\n');
            for line in item.trace.iter().flatten() {
                let _ = writeln!(out, "    {line}");
            }
        }
        if let Some(laws) = &self.laws {
            for r in &laws.rules {
                let verdict = match &r.verdict {
                    crate::phase::Verdict::Pass { checked } => format!("pass ({checked} instances)"),
                    crate::phase::Verdict::Vacuous { reason, .. } => format!("vacuous: {reason}"),
                    crate::phase::Verdict::Fail { counterexample } => format!("FAIL: {counterexample}"),
                };
                let _ = writeln!(out, "{:<28} {verdict}", r.rule);
            }
        }
        let s = &self.summary;
        if let Some(laws) = &self.laws {
            let failed = laws.failures().count();
            let _ = writeln!(
                out,
                "laws: {} rules over {} objects of size <= {}, {} failed",
                laws.rules.len(),
                laws.objects,
                laws.size,
                failed
            );
        } else if self.error.is_none() || s.total > 0 {
            let _ = writeln!(
                out,
                "{}: {} items, {} passed, {} failed, {} errors",
                self.command, s.total, s.passed, s.failed, s.errors
            );
        }
        out
    }
}
