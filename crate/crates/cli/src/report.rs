//! Report rendering: an aligned text table, a per-fold CSV and an ε-sweep CSV.
//!
//! In the text table each non-reference cell is marked `•` when the reference
//! method is significantly better on that row (paired t-test at 0.05) and `◦`
//! when it is significantly worse. Unmarked cells are ties.

use std::fmt::Write as _;

use mgpll_core::eval::{ExperimentReport, MethodScores, Metric, Verdict};

use crate::error::{CliError, Result};

pub const REPORT_CSV_HEADER: [&str; 5] = ["dataset", "metric", "method", "fold", "score"];
pub const SWEEP_CSV_HEADER: [&str; 5] = ["dataset", "epsilon", "method", "mean", "std"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Text => Ok(render_text(report)),
        ReportFormat::Csv => render_csv(report),
    }
}

fn marker(v: Verdict) -> &'static str {
    match v {
        Verdict::Win => " •",
        Verdict::Loss => " ◦",
        Verdict::Tie => "",
    }
}

fn pad(out: &mut String, cells: &[String], widths: &[usize]) {
    for (i, (c, w)) in cells.iter().zip(widths).enumerate() {
        if i > 0 {
            out.push_str("  ");
        }
        out.push_str(c);
        if i + 1 < cells.len() {
            out.extend(std::iter::repeat_n(' ', w - c.chars().count()));
        }
    }
    out.push('\n');
}

pub fn render_text(report: &ExperimentReport) -> String {
    let mut out = String::new();
    for (k, v) in &report.metadata {
        writeln!(out, "# {k}: {v}").unwrap();
    }
    let methods = report.methods();
    let mut table: Vec<Vec<String>> = Vec::new();
    let mut head = vec!["dataset".to_string(), "metric".to_string()];
    head.extend(methods.iter().cloned());
    table.push(head);
    let mut t_lines = Vec::new();
    for (dataset, metric) in report.groups() {
        let mut row = vec![dataset.clone(), metric.name()];
        for m in &methods {
            let cell = match report.find(&dataset, metric, m) {
                None => "-".to_string(),
                Some(r) => {
                    let mut c = format!("{:.4}±{:.4}", r.mean(), r.std());
                    if let Some(t) = report.comparison(r) {
                        c.push_str(marker(t.verdict));
                        let ts =
                            t.t.map(|v| format!("{v:.4}"))
                                .unwrap_or_else(|| "undefined".into());
                        t_lines.push(format!(
                            "{dataset} {} vs {m}: t = {ts}, df = {}, critical = {}, {}",
                            metric.name(),
                            t.df,
                            t.critical,
                            t.verdict.name()
                        ));
                    }
                    c
                }
            };
            row.push(cell);
        }
        table.push(row);
    }
    if let Some(reference) = &report.reference {
        let mut row = vec![format!("{reference} w/t/l"), String::new()];
        for m in &methods {
            if m == reference {
                row.push("-".into());
            } else {
                let t = report.tally(m);
                row.push(format!("{}/{}/{}", t.win, t.tie, t.loss));
            }
        }
        table.push(row);
    }
    let cols = table[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|j| {
            table
                .iter()
                .map(|r| r[j].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    for r in &table {
        pad(&mut out, r, &widths);
    }
    if !t_lines.is_empty() {
        out.push('\n');
        for l in t_lines {
            out.push_str(&l);
            out.push('\n');
        }
    }
    out
}

pub fn render_csv(report: &ExperimentReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_CSV_HEADER)?;
    for r in &report.rows {
        for (fold, s) in r.scores.iter().enumerate() {
            w.write_record([
                r.dataset.clone(),
                r.metric.name(),
                r.method.clone(),
                fold.to_string(),
                s.to_string(),
            ])?;
        }
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Config(format!("csv flush: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn check_header(r: &mut csv::Reader<&[u8]>, expected: &[&str], src: &str) -> Result<()> {
    let got: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if got != expected {
        return Err(CliError::parse(
            src,
            1,
            format!(
                "expected header {}, got {}",
                expected.join(","),
                got.join(",")
            ),
        ));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(s: &str, src: &str, line: usize, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| CliError::parse(src, line, format!("bad {what} {s:?}")))
}

/// Rebuilds the rows of a per-fold CSV. Folds must appear in order.
pub fn parse_report_csv(text: &str, src: &str) -> Result<Vec<MethodScores>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    check_header(&mut r, &REPORT_CSV_HEADER, src)?;
    let mut rows: Vec<MethodScores> = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let metric = Metric::parse(&rec[1])
            .ok_or_else(|| CliError::parse(src, line, format!("unknown metric {:?}", &rec[1])))?;
        let fold: usize = field(&rec[3], src, line, "fold")?;
        let score: f64 = field(&rec[4], src, line, "score")?;
        let existing = rows
            .iter_mut()
            .find(|m| m.dataset == rec[0] && m.metric == metric && m.method == rec[2]);
        let row = match existing {
            Some(row) => row,
            None => {
                rows.push(MethodScores {
                    dataset: rec[0].to_string(),
                    metric,
                    method: rec[2].to_string(),
                    scores: Vec::new(),
                });
                rows.last_mut().unwrap()
            }
        };
        if fold != row.scores.len() {
            return Err(CliError::parse(
                src,
                line,
                format!("fold {fold} out of order"),
            ));
        }
        row.scores.push(score);
    }
    Ok(rows)
}

/// Mean and standard deviation of one method at one noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub dataset: String,
    pub epsilon: f64,
    pub method: String,
    pub mean: f64,
    pub std: f64,
}

pub fn render_sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.dataset.clone(),
            r.epsilon.to_string(),
            r.method.clone(),
            r.mean.to_string(),
            r.std.to_string(),
        ])?;
    }
    finish(w)
}

pub fn parse_sweep_csv(text: &str, src: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    check_header(&mut r, &SWEEP_CSV_HEADER, src)?;
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        out.push(SweepRow {
            dataset: rec[0].to_string(),
            epsilon: field(&rec[1], src, line, "epsilon")?,
            method: rec[2].to_string(),
            mean: field(&rec[3], src, line, "mean")?,
            std: field(&rec[4], src, line, "std")?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(method: &str, scores: &[f64]) -> MethodScores {
        MethodScores {
            dataset: "d".into(),
            metric: Metric::Accuracy,
            method: method.into(),
            scores: scores.to_vec(),
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let csv = render_csv(&ExperimentReport::default()).unwrap();
        assert_eq!(csv, "dataset,metric,method,fold,score\n");
        assert!(parse_report_csv(&csv, "r").unwrap().is_empty());
        assert_eq!(
            render_sweep_csv(&[]).unwrap(),
            "dataset,epsilon,method,mean,std\n"
        );
    }

    #[test]
    fn markers_follow_verdicts() {
        let mut rep = ExperimentReport::new("a");
        rep.push(row("a", &[0.9, 0.91, 0.92, 0.9])).unwrap();
        rep.push(row("b", &[0.5, 0.52, 0.49, 0.5])).unwrap();
        rep.push(row("c", &[0.9, 0.91, 0.92, 0.9])).unwrap();
        rep.push(row("e", &[0.99, 0.99, 0.995, 0.999])).unwrap();
        let text = render_text(&rep);
        let line = text.lines().find(|l| l.starts_with("d ")).unwrap();
        assert_eq!(line.matches('•').count(), 1);
        assert_eq!(line.matches('◦').count(), 1);
        assert!(line.contains("0.5025±0.0126 •"));
        assert!(text.contains("a w/t/l"));
        assert!(text.contains("1/0/0"));
    }
}
