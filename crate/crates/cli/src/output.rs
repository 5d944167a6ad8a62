//! Report files. Every file is written to a temporary sibling and renamed into
//! place, so an interrupted run never leaves a partial report behind.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use mnl_core::verifier::report::REPORT_VERSION;
use mnl_core::verifier::{Verdict, VerificationReport};
use serde::Serialize;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Serialize)]
pub struct FamilyVerdict {
    pub family: String,
    pub verdict: Verdict,
    pub c_emp: f64,
}

/// JSON document written by `verify` and `sweep`. The timestamp lives here and
/// nowhere else, so the reports themselves stay reproducible.
#[derive(Serialize)]
pub struct Envelope<'a> {
    pub report_version: u32,
    pub generated_at: u64,
    pub command: &'a str,
    pub verdict: Verdict,
    pub families: Vec<FamilyVerdict>,
    pub reports: &'a [VerificationReport],
}

impl<'a> Envelope<'a> {
    pub fn new(command: &'a str, reports: &'a [VerificationReport]) -> Self {
        let generated_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let families = reports
            .iter()
            .map(|r| FamilyVerdict {
                family: r.family.clone(),
                verdict: r.verdict,
                c_emp: r.c_emp,
            })
            .collect();
        Self {
            report_version: REPORT_VERSION,
            generated_at,
            command,
            verdict: Verdict::from_bool(reports.iter().all(|r| r.verdict.passed())),
            families,
            reports,
        }
    }
}

/// One report keeps its own CSV layout; several are stacked with a leading `family` column.
pub fn combined_csv(reports: &[VerificationReport]) -> String {
    if let [single] = reports {
        return single.to_csv();
    }
    let mut out = String::new();
    for (i, report) in reports.iter().enumerate() {
        let csv = report.to_csv();
        let mut lines = csv.lines();
        let header = lines.next().unwrap_or_default();
        if i == 0 {
            out.push_str("family,");
            out.push_str(header);
            out.push('\n');
        }
        for line in lines {
            out.push_str(&report.family);
            out.push(',');
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}
