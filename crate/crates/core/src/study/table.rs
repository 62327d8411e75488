use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::cases::ManufacturedCase;
use super::pipeline::{solve_case, SolveOptions};
use crate::error::{Error, Result};

/// One refinement level of a convergence study. Rates are empty on the
/// first row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub n: usize,
    pub dof: usize,
    pub err_r: f64,
    pub rate_r: Option<f64>,
    pub err_u: f64,
    pub rate_u: Option<f64>,
    pub err_p: f64,
    pub rate_p: Option<f64>,
    pub err_curl_u: f64,
    pub err_grad_p: f64,
    pub gmres_iters: usize,
    pub seconds: f64,
}

/// Observed order between two levels: `log(e_c / e_f) / log(n_f / n_c)`,
/// which is `log2(e_c / e_f)` under uniform refinement.
pub fn rate(e_coarse: f64, e_fine: f64, n_coarse: usize, n_fine: usize) -> Option<f64> {
    if e_coarse > 0.0 && e_fine > 0.0 && n_fine > n_coarse {
        Some((e_coarse / e_fine).ln() / (n_fine as f64 / n_coarse as f64).ln())
    } else {
        None
    }
}

/// Runs the full pipeline once per level, sequentially.
pub fn run_study(case: &ManufacturedCase, levels: &[usize], opts: &SolveOptions) -> Result<Vec<StudyRow>> {
    if levels.is_empty() {
        return Err(Error::InvalidParameter("at least one level is required".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("levels must be strictly ascending".into()));
    }
    let mut rows: Vec<StudyRow> = Vec::with_capacity(levels.len());
    for &n in levels {
        let out = solve_case(case, n, opts).map_err(|e| Error::Level { level: n, source: Box::new(e) })?;
        let e = out.errors;
        let prev = rows.last();
        let r = |f: fn(&StudyRow) -> f64, fine: f64| prev.and_then(|p| rate(f(p), fine, p.n, n));
        rows.push(StudyRow {
            n,
            dof: out.dof,
            err_r: e.r,
            rate_r: r(|p| p.err_r, e.r),
            err_u: e.u,
            rate_u: r(|p| p.err_u, e.u),
            err_p: e.p,
            rate_p: r(|p| p.err_p, e.p),
            err_curl_u: e.curl_u,
            err_grad_p: e.grad_p,
            gmres_iters: out.report.iterations,
            seconds: out.seconds,
        });
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[StudyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn fmt_rate(r: Option<f64>) -> String {
    r.map(|v| format!("{v:.2}")).unwrap_or_default()
}

/// Markdown table in the layout of the published convergence tables.
pub fn to_markdown(rows: &[StudyRow], relative: bool) -> String {
    let (rn, un) = if relative { ("‖r−r_h‖/‖r‖", "‖u−u_h‖/‖u‖") } else { ("‖r−r_h‖", "‖u−u_h‖") };
    let mut s = String::new();
    let _ = writeln!(s, "| 1/h | {rn} | rate | {un} | rate | ‖p−p_h‖ | rate | DOF | GMRES its |");
    let _ = writeln!(s, "|---|---|---|---|---|---|---|---|---|");
    for r in rows {
        let _ = writeln!(
            s,
            "| {} | {:.2E} | {} | {:.2E} | {} | {:.2E} | {} | {} | {} |",
            r.n,
            r.err_r,
            fmt_rate(r.rate_r),
            r.err_u,
            fmt_rate(r.rate_u),
            r.err_p,
            fmt_rate(r.rate_p),
            r.dof,
            r.gmres_iters
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::study::cases::case_smooth;

    #[test]
    fn rate_examples() {
        assert!((rate(4.0, 1.0, 2, 4).unwrap() - 2.0).abs() < 1e-15);
        assert!((rate(8.0, 1.0, 2, 8).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(rate(0.0, 1.0, 2, 4), None);
    }

    #[test]
    fn single_level_has_empty_rates_and_csv_schema() {
        let rows = run_study(&case_smooth(), &[1], &SolveOptions::default()).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].rate_u.is_none() && rows[0].rate_r.is_none() && rows[0].rate_p.is_none());
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,dof,err_r,rate_r,err_u,rate_u,err_p,rate_p,err_curl_u,err_grad_p,gmres_iters,seconds"
        );
        let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(cells[3], "");
        assert!(to_markdown(&rows, true).contains("‖u−u_h‖/‖u‖"));
    }

    #[test]
    fn rejects_bad_levels() {
        assert!(run_study(&case_smooth(), &[], &SolveOptions::default()).is_err());
        assert!(run_study(&case_smooth(), &[4, 2], &SolveOptions::default()).is_err());
        let bad = SolveOptions { k: 9, ..SolveOptions::default() };
        match run_study(&case_smooth(), &[1], &bad) {
            Err(Error::Level { level: 1, source }) => assert_eq!(source.kind(), "unsupported-degree"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
