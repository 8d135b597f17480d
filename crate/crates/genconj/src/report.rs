//! CSV output for envelope scans.
//!
//! All floats are written with `{:.16e}` so reruns of the same configuration
//! produce byte-identical files.

use std::fmt::Write as _;

/// One scan row: a single `y` grid point of a scenario.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub scenario: String,
    pub y: Vec<f64>,
    pub envelope: f64,
    pub prox: Vec<f64>,
    pub n_minimizers: usize,
    pub boundary_hit: bool,
    /// Flattened row-major gradient / Hessian / Jacobian check errors;
    /// NaN when the check was not requested or not applicable.
    pub gradient_err: f64,
    pub hessian_err: f64,
    pub jacobian_err: f64,
    /// Empty on success, otherwise the error message for this row.
    pub error: String,
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Scan CSV: fixed header, one row per grid point, vectors joined with ';'.
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(
        "scenario,y,envelope,prox,n_minimizers,boundary_hit,gradient_err,hessian_err,jacobian_err,error\n",
    );
    for r in rows {
        let join = |v: &[f64]| v.iter().map(|t| fmt_f64(*t)).collect::<Vec<_>>().join(";");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            csv_escape(&r.scenario),
            join(&r.y),
            fmt_f64(r.envelope),
            join(&r.prox),
            r.n_minimizers,
            r.boundary_hit,
            fmt_f64(r.gradient_err),
            fmt_f64(r.hessian_err),
            fmt_f64(r.jacobian_err),
            csv_escape(&r.error),
        );
    }
    out
}

/// Per-scenario summary CSV.
#[derive(Debug, Clone)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub rows: usize,
    pub failures: usize,
    pub worst_gradient_err: f64,
    pub worst_hessian_err: f64,
    pub worst_jacobian_err: f64,
}

pub fn summary_csv(rows: &[ScenarioSummary]) -> String {
    let mut out = String::from(
        "scenario,rows,failures,worst_gradient_err,worst_hessian_err,worst_jacobian_err\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_escape(&r.scenario),
            r.rows,
            r.failures,
            fmt_f64(r.worst_gradient_err),
            fmt_f64(r.worst_hessian_err),
            fmt_f64(r.worst_jacobian_err),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_are_stable() {
        let row = ScanRow {
            scenario: "s".into(),
            y: vec![0.5, -1.0],
            envelope: -0.25,
            prox: vec![0.25],
            n_minimizers: 1,
            boundary_hit: false,
            gradient_err: f64::NAN,
            hessian_err: 1e-9,
            jacobian_err: f64::NAN,
            error: String::new(),
        };
        let a = scan_csv(std::slice::from_ref(&row));
        let b = scan_csv(std::slice::from_ref(&row));
        assert_eq!(a, b);
        assert!(a.starts_with("scenario,y,"));
        assert!(a.contains("5.0000000000000000e-1;-1.0000000000000000e0"));
        assert!(a.contains(",nan,"));
    }

    #[test]
    fn escapes_commas_and_quotes() {
        assert_eq!(csv_escape("a,b"), "\"a,b\"");
        assert_eq!(csv_escape("a\"b"), "\"a\"\"b\"");
        assert_eq!(csv_escape("plain"), "plain");
    }
}
