//! Text renderings of study results: the CSV table, the JSON report and
//! two-column log-log data files.

use std::fmt::Write as _;

use serde::Serialize;

use crate::harness::{ConvergenceTable, StudySpec};

pub const CSV_HEADER: &str = "dt,err_hr,err_hq,err_l2,wallclock_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorNorm {
    Hr,
    Hq,
    L2,
}

impl ErrorNorm {
    pub fn file_stem(self) -> &'static str {
        match self {
            ErrorNorm::Hr => "hr",
            ErrorNorm::Hq => "hq",
            ErrorNorm::L2 => "l2",
        }
    }
}

/// One line per row in `Δt` order. With `record_wallclock` off the last
/// column is written as 0 so repeated runs produce identical bytes.
pub fn csv(table: &ConvergenceTable, record_wallclock: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &table.rows {
        let wall = if record_wallclock {
            row.wallclock_s
        } else {
            0.0
        };
        writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e}",
            row.dt, row.err_hr, row.err_hq, row.err_l2, wall
        )
        .expect("writing to a String");
    }
    out
}

/// `Δt error` pairs for plotting, one per row.
pub fn loglog_data(table: &ConvergenceTable, norm: ErrorNorm) -> String {
    let mut out = String::new();
    for row in &table.rows {
        let err = match norm {
            ErrorNorm::Hr => row.err_hr,
            ErrorNorm::Hq => row.err_hq,
            ErrorNorm::L2 => row.err_l2,
        };
        writeln!(out, "{:e} {:e}", row.dt, err).expect("writing to a String");
    }
    out
}

#[derive(Serialize)]
struct JsonReport<'a> {
    study: &'a StudySpec,
    ref_dt: f64,
    wallclock_recorded: bool,
    #[serde(flatten)]
    table: &'a ConvergenceTable,
}

pub fn json(spec: &StudySpec, table: &ConvergenceTable, record_wallclock: bool) -> String {
    let stripped;
    let table = if record_wallclock {
        table
    } else {
        stripped = table.without_wallclock();
        &stripped
    };
    let report = JsonReport {
        study: spec,
        ref_dt: spec.effective_ref_dt(),
        wallclock_recorded: record_wallclock,
        table,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report is serializable");
    text.push('\n');
    text
}
