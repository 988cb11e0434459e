//! CSV, JSON and SVG formats.
//!
//! Matrices and vectors are plain comma-separated numbers with an optional
//! header row. Scenario files carry a header, a period label in the first
//! column, an optional `credit_index` column, an optional `z` column with
//! economy states, and macro variables in the remaining columns. Numbers
//! are written in shortest round-trip form, so emitted files re-parse to
//! identical values.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::macro_link::{CreditIndexSeries, MacroScenario};
use crate::propagation::{OriginationVector, PathPoint, Portfolio, ProjectionPath};
use crate::transition::{RowSums, TransitionMatrix};

pub const PATH_FIXED_COLUMNS: [&str; 4] = ["period", "z", "avg_pd", "default_flow"];

fn read_records(text: &str) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push(rec.iter().map(str::to_owned).collect());
    }
    Ok(out)
}

fn parse_cell(s: &str, line: usize, col: usize) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::NonNumeric {
            line,
            col,
            value: s.to_owned(),
        })
}

fn is_numeric(s: &str) -> bool {
    s.parse::<f64>().is_ok()
}

/// Numeric table with an optional header row (a first row in which no cell is a number).
fn parse_numeric_table(text: &str) -> Result<Vec<Vec<f64>>> {
    let records = read_records(text)?;
    let skip = match records.first() {
        Some(first) if !first.iter().any(|c| is_numeric(c)) => 1,
        _ => 0,
    };
    let width = records.get(skip).map_or(0, Vec::len);
    records
        .iter()
        .enumerate()
        .skip(skip)
        .map(|(i, rec)| {
            let line = i + 1;
            if rec.len() != width {
                return Err(Error::Ragged {
                    line,
                    expected: width,
                    found: rec.len(),
                });
            }
            rec.iter()
                .enumerate()
                .map(|(j, c)| parse_cell(c, line, j + 1))
                .collect()
        })
        .collect()
}

pub fn parse_matrix_csv(text: &str, tol: f64, policy: RowSums) -> Result<TransitionMatrix> {
    let rows = parse_numeric_table(text)?;
    if rows.is_empty() {
        return Err(Error::Csv("empty matrix file".into()));
    }
    TransitionMatrix::validate(&Matrix::from_rows(&rows)?, tol, policy)
}

/// A single row or a single column of numbers.
pub fn parse_numbers(text: &str) -> Result<Vec<f64>> {
    let rows = parse_numeric_table(text)?;
    match rows.as_slice() {
        [] => Err(Error::Csv("empty vector file".into())),
        [row] => Ok(row.clone()),
        many if many.iter().all(|r| r.len() == 1) => Ok(many.iter().map(|r| r[0]).collect()),
        _ => Err(Error::Csv(
            "expected one row or one column of numbers".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorKind {
    Portfolio,
    Origination,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedVector {
    Portfolio(Portfolio),
    Origination(OriginationVector),
}

pub fn parse_vector_csv(text: &str, kind: VectorKind) -> Result<ParsedVector> {
    let v = parse_numbers(text)?;
    Ok(match kind {
        VectorKind::Portfolio => ParsedVector::Portfolio(Portfolio::new(v)?),
        VectorKind::Origination => ParsedVector::Origination(OriginationVector::new(v)?),
    })
}

pub fn parse_portfolio_csv(text: &str) -> Result<Portfolio> {
    Portfolio::new(parse_numbers(text)?)
}

pub fn parse_origination_csv(text: &str) -> Result<OriginationVector> {
    OriginationVector::new(parse_numbers(text)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedScenario {
    pub labels: Vec<String>,
    pub credit_index: Option<CreditIndexSeries>,
    pub macro_scenario: Option<MacroScenario>,
    /// Economy states given directly in a `z` column.
    pub z: Option<Vec<f64>>,
}

pub fn parse_scenario_csv(text: &str) -> Result<ParsedScenario> {
    let records = read_records(text)?;
    let header = records
        .first()
        .ok_or_else(|| Error::Csv("empty scenario file".into()))?;
    if header.len() < 2 || header[1..].iter().any(|c| is_numeric(c)) {
        return Err(Error::Csv("missing header row".into()));
    }
    let width = header.len();
    let mut labels = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); width - 1];
    for (i, rec) in records.iter().enumerate().skip(1) {
        let line = i + 1;
        if rec.len() != width {
            return Err(Error::Ragged {
                line,
                expected: width,
                found: rec.len(),
            });
        }
        labels.push(rec[0].clone());
        for (j, cell) in rec.iter().enumerate().skip(1) {
            columns[j - 1].push(parse_cell(cell, line, j + 1)?);
        }
    }
    let name = |j: usize| header[j + 1].to_ascii_lowercase();
    let mut credit_index = None;
    let mut z = None;
    let mut macro_names = Vec::new();
    let mut macro_cols = Vec::new();
    for (j, col) in columns.into_iter().enumerate() {
        match name(j).as_str() {
            "credit_index" => credit_index = Some(CreditIndexSeries::new(labels.clone(), col)?),
            "z" => z = Some(col),
            _ => {
                macro_names.push(header[j + 1].clone());
                macro_cols.push(col);
            }
        }
    }
    let macro_scenario = if macro_names.is_empty() {
        None
    } else {
        let rows = (0..labels.len())
            .map(|t| macro_cols.iter().map(|c| c[t]).collect())
            .collect();
        Some(MacroScenario::new(labels.clone(), macro_names, rows)?)
    };
    Ok(ParsedScenario {
        labels,
        credit_index,
        macro_scenario,
        z,
    })
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".to_owned()
    } else {
        format!("{v}")
    }
}

pub fn fmt_pct(v: f64) -> String {
    format!("{:.3}%", 100.0 * v)
}

pub fn emit_path_csv(path: &ProjectionPath) -> String {
    let n = path.grades();
    let mut out = PATH_FIXED_COLUMNS.join(",");
    for i in 1..=n {
        let _ = write!(out, ",w_{i}");
    }
    out.push('\n');
    for p in &path.points {
        let _ = write!(
            out,
            "{},{},{},{}",
            p.period,
            fmt_num(p.z),
            fmt_num(p.avg_pd),
            fmt_num(p.default_flow)
        );
        for w in &p.weights {
            out.push(',');
            out.push_str(&fmt_num(*w));
        }
        out.push('\n');
    }
    out
}

pub fn parse_path_csv(text: &str) -> Result<ProjectionPath> {
    let records = read_records(text)?;
    let header = records
        .first()
        .ok_or_else(|| Error::Csv("empty path file".into()))?;
    if header.len() < 5
        || header[..4]
            .iter()
            .zip(PATH_FIXED_COLUMNS)
            .any(|(a, b)| a != b)
    {
        return Err(Error::Csv(format!(
            "path header must start with {}",
            PATH_FIXED_COLUMNS.join(",")
        )));
    }
    let width = header.len();
    let mut points = Vec::with_capacity(records.len() - 1);
    for (i, rec) in records.iter().enumerate().skip(1) {
        let line = i + 1;
        if rec.len() != width {
            return Err(Error::Ragged {
                line,
                expected: width,
                found: rec.len(),
            });
        }
        let period = rec[0].parse::<usize>().map_err(|_| Error::NonNumeric {
            line,
            col: 1,
            value: rec[0].clone(),
        })?;
        let nums: Vec<f64> = rec[1..]
            .iter()
            .enumerate()
            .map(|(j, c)| parse_cell(c, line, j + 2))
            .collect::<Result<_>>()?;
        points.push(PathPoint {
            period,
            z: nums[0],
            avg_pd: nums[1],
            default_flow: nums[2],
            weights: nums[3..].to_vec(),
        });
    }
    if points.is_empty() {
        return Err(Error::PathTooShort(0));
    }
    Ok(ProjectionPath { points })
}

pub fn emit_matrix_csv(t: &TransitionMatrix) -> String {
    let mut out = String::new();
    for i in 0..t.n() {
        let row: Vec<String> = t.row(i).iter().map(|v| fmt_num(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Line chart of average PD against period, with the extremes marked.
pub fn emit_svg_chart(path: &ProjectionPath, title: &str) -> String {
    const W: f64 = 800.0;
    const H: f64 = 450.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 30.0;
    const TOP: f64 = 50.0;
    const BOTTOM: f64 = 60.0;

    let pds = path.avg_pds();
    let periods: Vec<f64> = path.points.iter().map(|p| p.period as f64).collect();
    let (mut lo, mut hi) = pds
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    if !lo.is_finite() {
        lo = 0.0;
        hi = 0.0;
    }
    let pad = if hi > lo {
        0.08 * (hi - lo)
    } else {
        (0.05 * hi.abs()).max(1e-4)
    };
    let (y0, y1) = (lo - pad, hi + pad);
    let x_first = periods.first().copied().unwrap_or(0.0);
    let x_last = periods.last().copied().unwrap_or(1.0);
    let x_span = if x_last > x_first {
        x_last - x_first
    } else {
        1.0
    };
    let px = |t: f64| LEFT + (t - x_first) / x_span * (W - LEFT - RIGHT);
    let py = |v: f64| TOP + (y1 - v) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        W / 2.0,
        xml_escape(title)
    );
    // axes
    let (ax0, ax1, ay0, ay1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(
        s,
        r#"<line x1="{ax0}" y1="{ay1}" x2="{ax1}" y2="{ay1}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{ax0}" y1="{ay0}" x2="{ax0}" y2="{ay1}" stroke="black"/>"#
    );
    for k in 0..=5 {
        let v = y0 + (y1 - y0) * k as f64 / 5.0;
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{y:.2}" x2="{ax1}" y2="{y:.2}" stroke="#e0e0e0"/>"##,
            ax0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            ax0 - 6.0,
            y + 4.0,
            fmt_pct(v)
        );
    }
    let step = ((x_span / 10.0).ceil()).max(1.0);
    let mut t = x_first;
    while t <= x_last + 1e-9 {
        let x = px(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{ay1}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
            ay1 + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            ay1 + 20.0,
            t
        );
        t += step;
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">Period</text>"#,
        (ax0 + ax1) / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">Average PD</text>"#,
        (ay0 + ay1) / 2.0,
        (ay0 + ay1) / 2.0
    );
    let pts: Vec<String> = periods
        .iter()
        .zip(&pds)
        .map(|(&t, &v)| format!("{:.2},{:.2}", px(t), py(v)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="2" points="{}"/>"##,
        pts.join(" ")
    );

    if !pds.is_empty() {
        let (min_i, max_i) = pds.iter().enumerate().fold((0, 0), |(mi, ma), (i, &v)| {
            (
                if v < pds[mi] { i } else { mi },
                if v > pds[ma] { i } else { ma },
            )
        });
        for (label, i, dy, colour) in [
            ("max", max_i, -10.0, "#b22222"),
            ("min", min_i, 18.0, "#2e7d32"),
        ] {
            let (x, y) = (px(periods[i]), py(pds[i]));
            let anchor = if x > W - 160.0 { "end" } else { "start" };
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{colour}"/>"#
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="{anchor}" fill="{colour}">{label} {} (t={})</text>"#,
                x + if anchor == "end" { -6.0 } else { 6.0 },
                y + dy,
                fmt_pct(pds[i]),
                path.points[i].period
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::project_zero_stress;
    use crate::sample;
    use crate::transition::DEFAULT_ROW_TOL;

    #[test]
    fn minimal_matrix() {
        let t = parse_matrix_csv("1,0\n0,1", DEFAULT_ROW_TOL, RowSums::Renormalize).unwrap();
        assert_eq!(t.n(), 2);
    }

    #[test]
    fn row_sum_error_names_row() {
        let err =
            parse_matrix_csv("0.5,0.4\n0,1", DEFAULT_ROW_TOL, RowSums::Renormalize).unwrap_err();
        assert!(matches!(err, Error::RowSum { row: 1, .. }), "{err:?}");
    }

    #[test]
    fn header_and_errors() {
        let t = parse_matrix_csv("a,b\n0.9,0.1\n0,1\n", 1e-9, RowSums::Renormalize).unwrap();
        assert_eq!(t.get(0, 1), 0.1);
        assert!(matches!(
            parse_matrix_csv("0.9,0.1\n0,x", 1e-9, RowSums::Renormalize),
            Err(Error::NonNumeric {
                line: 2,
                col: 2,
                ..
            })
        ));
        assert!(matches!(
            parse_matrix_csv("0.9,0.1\n0,0,1", 1e-9, RowSums::Renormalize),
            Err(Error::Ragged { line: 2, .. })
        ));
    }

    #[test]
    fn agency_matrix_file() {
        let text = include_str!("../data/agency_matrix.csv");
        let t = parse_matrix_csv(text, DEFAULT_ROW_TOL, RowSums::Preserve).unwrap();
        assert_eq!(t, sample::agency_matrix());
        for i in 0..8 {
            assert!((t.row(i).iter().sum::<f64>() - 1.0).abs() <= 1e-4 + 1e-12);
        }
    }

    #[test]
    fn vectors() {
        let o = parse_vector_csv("0,0.20,0.30,0.30,0.20,0,0,0", VectorKind::Origination).unwrap();
        assert!(matches!(o, ParsedVector::Origination(_)));
        let p = parse_vector_csv("0.70,0,0,0,0,0.25,0.05,0", VectorKind::Portfolio).unwrap();
        assert!(matches!(p, ParsedVector::Portfolio(_)));
        let bad = parse_vector_csv("0,0.2,0.3,0.2,0.1,0,0,0.2", VectorKind::Origination);
        assert!(matches!(bad, Err(Error::OriginationIntoDefault(_))));
        let col = parse_numbers("w\n0.5\n0.5\n0\n").unwrap();
        assert_eq!(col, vec![0.5, 0.5, 0.0]);
        assert!(parse_portfolio_csv("0.5,0.4,0").is_err());
    }

    #[test]
    fn scenario_columns() {
        let s = parse_scenario_csv("period,credit_index\n2001,0.01\n2002,0.02\n").unwrap();
        assert!(s.credit_index.is_some() && s.macro_scenario.is_none());
        let s = parse_scenario_csv(
            "period,credit_index,gdp,unemp\n2001,0.01,1.5,5\n2002,0.02,-0.5,6\n",
        )
        .unwrap();
        assert_eq!(s.macro_scenario.as_ref().unwrap().k(), 2);
        assert_eq!(s.labels, vec!["2001", "2002"]);
        let s = parse_scenario_csv("period,credit_index\n2001,1.0\n2002,0.02\n").unwrap();
        let err = crate::macro_link::estimate_p_rho(s.credit_index.as_ref().unwrap()).unwrap_err();
        assert!(matches!(err, Error::BoundaryValue { .. }));
        assert!(parse_scenario_csv("2001,0.01\n2002,0.02\n").is_err());
        assert!(matches!(
            parse_scenario_csv("period,gdp\n2001,abc\n"),
            Err(Error::NonNumeric {
                line: 2,
                col: 2,
                ..
            })
        ));
    }

    #[test]
    fn path_csv_shape_and_round_trip() {
        let t = sample::agency_matrix();
        let o = sample::agency_origination();
        let path = project_zero_stress(&sample::portfolio_mid_grades(), &t, &o, 50).unwrap();
        let text = emit_path_csv(&path);
        // header, initial state, 50 periods
        assert_eq!(text.lines().count(), 52);
        assert!(text.starts_with("period,z,avg_pd,default_flow,w_1,w_2,"));
        assert_eq!(parse_path_csv(&text).unwrap(), path);
        assert_eq!(emit_path_csv(&path), text);
    }

    #[test]
    fn svg_single_period() {
        let t = sample::agency_matrix();
        let o = sample::agency_origination();
        let path = project_zero_stress(&sample::portfolio_seasoned(), &t, &o, 1).unwrap();
        let svg = emit_svg_chart(&path, "one <period>");
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("one &lt;period&gt;"));
    }
}
