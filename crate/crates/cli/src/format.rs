//! Dataset files.
//!
//! Both formats are UTF-8 text with `\n` line endings. Lines starting with
//! `#` are comments, except two recognized metadata comments that may appear
//! before the header:
//!
//! ```text
//! # name: lost
//! # classes: 25,27,31
//! ```
//!
//! The first other line is the header `n d L`. Each of the next `n` lines is
//! one instance:
//!
//! ```text
//! PlCsv:     f_1,...,f_d | c_1,...,c_m | t
//! PlSparse:  j:f_j j:f_j ... | c_1,...,c_m | t
//! ```
//!
//! `c_*` are the 0-based candidate class indices and `t` the optional 0-based
//! true label (all rows have one or none do). PlSparse feature indices are
//! 0-based; absent entries are 0. Numbers always use `.` as the decimal
//! separator. Written floats use the shortest representation that reads back
//! to the same bits.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use mgpll_core::numkit::Matrix;
use mgpll_core::pldata::PlDataset;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    PlCsv,
    PlSparse,
}

impl DatasetFormat {
    /// `.plsparse` files are sparse; everything else is PlCsv.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("plsparse") => DatasetFormat::PlSparse,
            _ => DatasetFormat::PlCsv,
        }
    }
}

impl FromStr for DatasetFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plcsv" => Ok(DatasetFormat::PlCsv),
            "plsparse" => Ok(DatasetFormat::PlSparse),
            other => Err(CliError::Config(format!(
                "unknown dataset format {other:?}"
            ))),
        }
    }
}

fn parse_f64(src: &str, line: usize, tok: &str) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| CliError::parse(src, line, format!("not a number: {:?}", tok.trim())))?;
    if !v.is_finite() {
        return Err(CliError::parse(
            src,
            line,
            format!("non-finite feature {:?}", tok.trim()),
        ));
    }
    Ok(v)
}

fn parse_index(src: &str, line: usize, tok: &str, bound: usize, what: &str) -> Result<usize> {
    let i: usize = tok
        .trim()
        .parse()
        .map_err(|_| CliError::parse(src, line, format!("bad {what} {:?}", tok.trim())))?;
    if i >= bound {
        return Err(CliError::parse(
            src,
            line,
            format!("{what} {i} out of range (must be < {bound})"),
        ));
    }
    Ok(i)
}

/// Parses dataset text. `src` names the input in error messages and is the
/// dataset name unless a `# name:` comment overrides it.
pub fn parse_dataset(text: &str, format: DatasetFormat, src: &str) -> Result<PlDataset> {
    parse_named(text, format, src, src)
}

fn parse_named(
    text: &str,
    format: DatasetFormat,
    src: &str,
    default_name: &str,
) -> Result<PlDataset> {
    let mut name = default_name.to_string();
    let mut class_names: Option<Vec<String>> = None;
    let mut header: Option<(usize, usize, usize)> = None;
    let mut features = Vec::new();
    let mut candidates = Vec::new();
    let mut truths: Vec<Option<usize>> = Vec::new();
    let mut first_truth_line = 0;

    for (k, raw) in text.split('\n').enumerate() {
        let line = k + 1;
        let l = raw.strip_suffix('\r').unwrap_or(raw);
        if l.trim().is_empty() {
            continue;
        }
        if let Some(c) = l.trim_start().strip_prefix('#') {
            if header.is_none() {
                let c = c.trim();
                if let Some(v) = c.strip_prefix("name:") {
                    name = v.trim().to_string();
                } else if let Some(v) = c.strip_prefix("classes:") {
                    class_names = Some(v.split(',').map(|s| s.trim().to_string()).collect());
                }
            }
            continue;
        }
        let Some((n, d, nl)) = header else {
            let nums: Vec<&str> = l.split_whitespace().collect();
            let parsed: Option<Vec<usize>> = nums.iter().map(|t| t.parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[n, d, nl]) if d > 0 && nl > 0 => header = Some((n, d, nl)),
                _ => {
                    return Err(CliError::parse(
                        src,
                        line,
                        format!("malformed header {l:?}: expected `n d L` with d, L >= 1"),
                    ))
                }
            }
            continue;
        };
        if truths.len() == n {
            return Err(CliError::parse(
                src,
                line,
                format!("more than the {n} instances the header declares"),
            ));
        }

        let fields: Vec<&str> = l.split('|').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(CliError::parse(
                src,
                line,
                "expected `features | candidates` or `features | candidates | true label`",
            ));
        }
        let start = features.len();
        match format {
            DatasetFormat::PlCsv => {
                let toks: Vec<&str> = fields[0].split(',').collect();
                if toks.len() != d || fields[0].trim().is_empty() {
                    return Err(CliError::parse(
                        src,
                        line,
                        format!(
                            "expected {d} features, found {}",
                            if fields[0].trim().is_empty() {
                                0
                            } else {
                                toks.len()
                            }
                        ),
                    ));
                }
                for t in toks {
                    features.push(parse_f64(src, line, t)?);
                }
            }
            DatasetFormat::PlSparse => {
                features.resize(start + d, 0.0);
                let mut seen = vec![false; d];
                for pair in fields[0].split_whitespace() {
                    let (j, v) = pair.split_once(':').ok_or_else(|| {
                        CliError::parse(src, line, format!("expected idx:val, got {pair:?}"))
                    })?;
                    let j = parse_index(src, line, j, d, "feature index")?;
                    if seen[j] {
                        return Err(CliError::parse(
                            src,
                            line,
                            format!("feature index {j} repeated"),
                        ));
                    }
                    seen[j] = true;
                    features[start + j] = parse_f64(src, line, v)?;
                }
            }
        }

        let mut row = vec![0.0; nl];
        let cand = fields[1].trim();
        if cand.is_empty() {
            return Err(CliError::parse(src, line, "empty candidate set"));
        }
        for t in cand.split(',') {
            row[parse_index(src, line, t, nl, "candidate label")?] = 1.0;
        }
        let truth = match fields.get(2).map(|s| s.trim()) {
            Some(t) if !t.is_empty() => {
                let t = parse_index(src, line, t, nl, "true label")?;
                if row[t] != 1.0 {
                    return Err(CliError::parse(
                        src,
                        line,
                        format!("true label {t} is not a candidate"),
                    ));
                }
                Some(t)
            }
            _ => None,
        };
        if truths.is_empty() {
            first_truth_line = line;
        } else if truths[0].is_some() != truth.is_some() {
            return Err(CliError::parse(
                src,
                line,
                format!(
                    "true label {} here but {} on line {first_truth_line}",
                    if truth.is_some() { "present" } else { "absent" },
                    if truth.is_some() { "absent" } else { "present" }
                ),
            ));
        }
        candidates.extend(row);
        truths.push(truth);
    }

    let last_line = text.split('\n').count();
    let Some((n, d, nl)) = header else {
        return Err(CliError::parse(src, last_line, "missing header `n d L`"));
    };
    if truths.len() != n {
        return Err(CliError::parse(
            src,
            last_line,
            format!("header declares {n} instances, found {}", truths.len()),
        ));
    }
    if n == 0 {
        return Err(CliError::parse(src, last_line, "dataset has no instances"));
    }
    if let Some(names) = &class_names {
        if names.len() != nl {
            return Err(CliError::parse(
                src,
                1,
                format!(
                    "classes comment lists {} names, header says L = {nl}",
                    names.len()
                ),
            ));
        }
    }
    let true_labels: Option<Vec<usize>> = truths.into_iter().collect();
    Ok(PlDataset::new(
        name,
        Matrix::from_vec(n, d, features)?,
        Matrix::from_vec(n, nl, candidates)?,
        true_labels,
        class_names,
    )?)
}

pub fn read_dataset(path: &Path, format: DatasetFormat) -> Result<PlDataset> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset");
    parse_named(&text, format, &path.display().to_string(), stem)
}

pub fn render_dataset(ds: &PlDataset, format: DatasetFormat) -> String {
    let mut out = String::new();
    writeln!(out, "# name: {}", ds.name()).unwrap();
    writeln!(out, "# classes: {}", ds.class_names().join(",")).unwrap();
    writeln!(out, "{} {} {}", ds.len(), ds.dim(), ds.num_classes()).unwrap();
    for i in 0..ds.len() {
        let row = ds.features().row(i);
        match format {
            DatasetFormat::PlCsv => {
                for (j, v) in row.iter().enumerate() {
                    if j > 0 {
                        out.push(',');
                    }
                    write!(out, "{v}").unwrap();
                }
            }
            DatasetFormat::PlSparse => {
                let mut first = true;
                for (j, v) in row.iter().enumerate() {
                    // -0.0 is kept so the round trip stays bit-exact
                    if v.to_bits() != 0 {
                        if !first {
                            out.push(' ');
                        }
                        write!(out, "{j}:{v}").unwrap();
                        first = false;
                    }
                }
            }
        }
        out.push_str(" | ");
        let cands: Vec<String> = ds.candidate_set(i).iter().map(|c| c.to_string()).collect();
        out.push_str(&cands.join(","));
        if let Some(t) = ds.true_labels() {
            write!(out, " | {}", t[i]).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_dataset(path: &Path, ds: &PlDataset, format: DatasetFormat) -> Result<()> {
    std::fs::write(path, render_dataset(ds, format))
        .map_err(|e| CliError::io(path.display().to_string(), e))
}
