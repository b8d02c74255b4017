//! Run reports: a structured JSON form for machines and a stable TSV form
//! for diffing.
//!
//! The tabular rendering deliberately omits the timestamp, so two runs of
//! the same config and seed produce byte-identical output. Numbers are
//! printed with Rust's shortest round-trip formatting in both forms.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One pass/fail unit within a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    /// Stable identifier, unique within the report.
    pub id: String,
    pub pass: bool,
    /// The deviations feeding the case's bound, when any.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub etas: Vec<f64>,
    /// The quantity the case computed.
    pub measured: f64,
    /// The value it was compared against.
    pub bound: f64,
    /// Free-form context (formula, exact values, parameters).
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// A complete suite run, tied to its config by hash and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    /// Report format version; this build writes version 1.
    pub format_version: u32,
    pub suite: String,
    /// Seconds since the Unix epoch at record creation.
    pub timestamp_unix: u64,
    /// Hash of the canonical config (see [`crate::config::config_hash`]).
    pub config_sha256: String,
    pub seed: u64,
    /// Sorted by id.
    pub cases: Vec<CaseResult>,
    pub summary: Summary,
}

impl ReportRecord {
    pub fn new(suite: &str, config_sha256: String, seed: u64, mut cases: Vec<CaseResult>) -> Self {
        cases.sort_by(|a, b| a.id.cmp(&b.id));
        let passed = cases.iter().filter(|c| c.pass).count();
        let summary = Summary {
            total: cases.len(),
            passed,
            failed: cases.len() - passed,
        };
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ReportRecord {
            format_version: 1,
            suite: suite.to_string(),
            timestamp_unix,
            config_sha256,
            seed,
            cases,
            summary,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }
}

/// Output rendering for a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// Pretty-printed JSON of the full record.
    Structured,
    /// Tab-separated table, timestamp omitted (byte-stable across reruns).
    Tabular,
}

pub fn render(record: &ReportRecord, format: ReportFormat) -> String {
    match format {
        ReportFormat::Structured => render_structured(record),
        ReportFormat::Tabular => render_tabular(record),
    }
}

pub fn render_structured(record: &ReportRecord) -> String {
    let mut s = serde_json::to_string_pretty(record).expect("report serialization cannot fail");
    s.push('\n');
    s
}

pub fn render_tabular(record: &ReportRecord) -> String {
    let mut out = String::new();
    out.push_str(&format!("# format_version\t{}\n", record.format_version));
    out.push_str(&format!("# suite\t{}\n", record.suite));
    out.push_str(&format!("# config_sha256\t{}\n", record.config_sha256));
    out.push_str(&format!("# seed\t{}\n", record.seed));
    out.push_str("id\tpass\tmeasured\tbound\tetas\tdetail\n");
    for case in &record.cases {
        let etas = case
            .etas
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(";");
        // Keep the table one-line-per-case regardless of detail content.
        let detail = case.detail.replace(['\t', '\n'], " ");
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            case.id, case.pass, case.measured, case.bound, etas, detail
        ));
    }
    out.push_str(&format!(
        "# summary\ttotal={} passed={} failed={}\n",
        record.summary.total, record.summary.passed, record.summary.failed
    ));
    out
}

/// Parses the structured (JSON) rendering back into a record.
pub fn parse_structured(text: &str) -> Result<ReportRecord> {
    serde_json::from_str(text).map_err(|e| Error::ReportFile(e.to_string()))
}

/// Writes rendered report text atomically (temp file + rename).
pub fn write_report(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, content.as_bytes())?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_cases() -> Vec<CaseResult> {
        vec![
            CaseResult {
                id: "b/second".into(),
                pass: true,
                etas: vec![0.125, 0.25],
                measured: 0.9,
                bound: 0.5,
                detail: "formula".into(),
            },
            CaseResult {
                id: "a/first".into(),
                pass: false,
                etas: vec![],
                measured: 0.1,
                bound: 0.5,
                detail: String::new(),
            },
        ]
    }

    #[test]
    fn cases_are_sorted_and_summarized() {
        let r = ReportRecord::new("closeness_audit", "ab".repeat(32), 7, sample_cases());
        assert_eq!(r.cases[0].id, "a/first");
        assert_eq!(r.cases[1].id, "b/second");
        assert_eq!(r.summary.total, 2);
        assert_eq!(r.summary.passed, 1);
        assert_eq!(r.summary.failed, 1);
        assert!(!r.all_pass());
    }

    #[test]
    fn structured_round_trips() {
        let r = ReportRecord::new("theorem_s3", "cd".repeat(32), 9, sample_cases());
        let text = render_structured(&r);
        let back = parse_structured(&text).unwrap();
        assert_eq!(back, r);
        assert!(parse_structured("{ not json").is_err());
    }

    #[test]
    fn tabular_is_timestamp_free_and_stable() {
        let a = ReportRecord::new("closeness_audit", "ef".repeat(32), 3, sample_cases());
        let mut b = a.clone();
        b.timestamp_unix = a.timestamp_unix + 1000;
        assert_eq!(render_tabular(&a), render_tabular(&b));
        let text = render_tabular(&a);
        assert!(text.contains("a/first\tfalse\t0.1\t0.5\t\t\n"), "{text}");
        assert!(text.contains("0.125;0.25"), "{text}");
        assert!(text.ends_with("# summary\ttotal=2 passed=1 failed=1\n"));
    }

    #[test]
    fn detail_text_cannot_break_the_table() {
        let mut cases = sample_cases();
        cases[0].detail = "line one\nline\ttwo".into();
        let r = ReportRecord::new("s", "00".repeat(32), 1, cases);
        let text = render_tabular(&r);
        let lines: Vec<&str> = text.lines().collect();
        // 4 header comments + 1 column header + 2 cases + 1 summary.
        assert_eq!(lines.len(), 8);
        assert!(text.contains("line one line two"));
    }

    #[test]
    fn atomic_write_lands_the_full_content() {
        let dir = std::env::temp_dir().join(format!("report-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("report.json");
        let r = ReportRecord::new("demo", "11".repeat(32), 2, sample_cases());
        let text = render_structured(&r);
        write_report(&path, &text).unwrap();
        let back = std::fs::read_to_string(&path).unwrap();
        assert_eq!(back, text);
        assert!(!path.with_extension("tmp").exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
