//! Run reports and their text, JSON and CSV renderings.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

/// One row of a pass/fail ledger.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub instance: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    pub fn new(suite: &str, name: &str, instance: &str, ok: bool, detail: impl Into<String>) -> Self {
        Check {
            suite: suite.into(),
            name: name.into(),
            instance: instance.into(),
            status: Status::from_bool(ok),
            detail: detail.into(),
        }
    }

    pub fn skip(suite: &str, name: &str, instance: &str, detail: impl Into<String>) -> Self {
        Check {
            status: Status::Skip,
            ..Check::new(suite, name, instance, true, detail)
        }
    }
}

/// Header and rows for `--csv` and the text table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn ledger(checks: &[Check]) -> Self {
        Table {
            header: vec!["suite", "check", "instance", "status", "detail"],
            rows: checks
                .iter()
                .map(|c| {
                    vec![
                        c.suite.clone(),
                        c.name.clone(),
                        c.instance.clone(),
                        c.status.as_str().to_string(),
                        c.detail.clone(),
                    ]
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub seed: u64,
    pub version: &'static str,
    pub passed: bool,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u128>,
    #[serde(skip)]
    pub summary: Vec<(String, String)>,
    #[serde(skip)]
    pub table: Table,
}

impl RunReport {
    pub fn new(command: &str, seed: u64) -> Self {
        RunReport {
            schema: SCHEMA,
            command: command.into(),
            group: None,
            field: None,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            passed: true,
            results: Value::Null,
            duration_ms: None,
            summary: Vec::new(),
            table: Table::default(),
        }
    }

    pub fn line(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.table.header).expect("in-memory write");
        for r in &self.table.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.command);
        for part in [&self.group, &self.field].into_iter().flatten() {
            out.push(' ');
            out.push_str(part);
        }
        out.push('\n');
        let width = self.summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.summary {
            out.push_str(&format!("  {k:<width$}  {v}\n"));
        }
        if !self.table.rows.is_empty() {
            let cols = self.table.header.len();
            let mut widths: Vec<usize> = self.table.header.iter().map(|h| h.len()).collect();
            for r in &self.table.rows {
                for (i, c) in r.iter().enumerate().take(cols) {
                    widths[i] = widths[i].max(c.len());
                }
            }
            let fmt_row = |cells: Vec<&str>| {
                let mut s = String::from(" ");
                for (i, c) in cells.iter().enumerate() {
                    if i + 1 == cells.len() {
                        s.push_str(&format!(" {c}"));
                    } else {
                        s.push_str(&format!(" {c:<w$}", w = widths[i]));
                    }
                }
                s.push('\n');
                s
            };
            out.push_str(&fmt_row(self.table.header.clone()));
            for r in &self.table.rows {
                out.push_str(&fmt_row(r.iter().map(String::as_str).collect()));
            }
        }
        if let Some(ms) = self.duration_ms {
            out.push_str(&format!("  time  {ms} ms\n"));
        }
        out.push_str(if self.passed { "PASS\n" } else { "FAIL\n" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_has_schema_and_skips_duration() {
        let r = RunReport::new("build", 0);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert!(v.get("duration_ms").is_none());
    }

    #[test]
    fn csv_quotes_commas() {
        let mut r = RunReport::new("verify", 0);
        r.table = Table {
            header: vec!["a", "b"],
            rows: vec![vec!["x,y".into(), "z".into()]],
        };
        assert_eq!(r.to_csv(), "a,b\n\"x,y\",z\n");
    }

    #[test]
    fn text_ends_with_verdict() {
        let mut r = RunReport::new("verify", 0);
        r.passed = false;
        assert!(r.to_text().ends_with("FAIL\n"));
    }
}
