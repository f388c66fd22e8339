//! CSV datasets.
//!
//! Maps start with a `# cqedlab-map-v1` line, optionally followed by
//! `# x_axis=flux|power`, then `x,freq_hz,s21_db` rows in x-major order.
//! Traces, decays, branch splittings and linewidth series are plain
//! two-column CSVs with a fixed header. Floats are written with Rust's
//! shortest round-trip formatting, so output is lossless and byte-stable.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fit::{BranchData, LinewidthSeries, Ridge};
use crate::synth::{DecayTrace, MapAxis, SpectroMap, SpectroTrace};
use crate::units::Frequency;

pub const MAP_SCHEMA: &str = "cqedlab-map-v1";

/// Parsed numeric table: header names, column-major values and the file
/// line of every row.
struct Table {
    header: Vec<String>,
    columns: Vec<Vec<f64>>,
    lines: Vec<u64>,
}

fn parse_table(text: &str) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    if header.iter().all(String::is_empty) {
        return Err(Error::Parse {
            line: 1,
            msg: "missing header row".into(),
        });
    }
    let mut columns = vec![Vec::new(); header.len()];
    let mut lines = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        for (i, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("column '{}': '{field}' is not a number", header[i]),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    msg: format!("column '{}': non-finite value", header[i]),
                });
            }
            columns[i].push(v);
        }
        lines.push(line);
    }
    Ok(Table { header, columns, lines })
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    let msg = match e.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("expected {expected_len} fields, found {len}")
        }
        _ => e.to_string(),
    };
    Error::Parse { line, msg }
}

fn expect_header(table: &Table, expected: &[&str]) -> Result<()> {
    if table.header != expected {
        return Err(Error::Parse {
            line: table.lines.first().map_or(1, |l| l - 1).max(1),
            msg: format!("expected header '{}', found '{}'", expected.join(","), table.header.join(",")),
        });
    }
    Ok(())
}

fn two_columns(text: &str, expected: &[&str; 2]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut t = parse_table(text)?;
    expect_header(&t, expected)?;
    if t.lines.is_empty() {
        return Err(Error::Parse {
            line: 2,
            msg: "no data rows".into(),
        });
    }
    let b = t.columns.pop().unwrap();
    let a = t.columns.pop().unwrap();
    Ok((a, b))
}

fn write_two_columns(header: &str, a: &[f64], b: &[f64]) -> String {
    let mut out = format!("{header}\n");
    for (x, y) in a.iter().zip(b) {
        writeln!(out, "{x},{y}").unwrap();
    }
    out
}

pub fn write_map(map: &SpectroMap) -> String {
    let kind = match map.x_kind {
        MapAxis::Flux => "flux",
        MapAxis::Power => "power",
    };
    let mut out = format!("# {MAP_SCHEMA}\n# x_axis={kind}\nx,freq_hz,s21_db\n");
    for (x, col) in map.x_axis.iter().zip(&map.values) {
        for (f, v) in map.y_axis.iter().zip(col) {
            writeln!(out, "{x},{f},{v}").unwrap();
        }
    }
    out
}

pub fn read_map(text: &str) -> Result<SpectroMap> {
    let mut lines = text.lines();
    let first = lines.next().unwrap_or("").trim();
    if first != format!("# {MAP_SCHEMA}") {
        return Err(Error::Schema {
            expected: MAP_SCHEMA.into(),
            found: first.trim_start_matches('#').trim().to_string(),
        });
    }
    let mut x_kind = MapAxis::Flux;
    if let Some(second) = lines.next() {
        if let Some(kind) = second.trim().strip_prefix("# x_axis=") {
            x_kind = match kind.trim() {
                "flux" => MapAxis::Flux,
                "power" => MapAxis::Power,
                other => {
                    return Err(Error::Parse {
                        line: 2,
                        msg: format!("unknown x_axis '{other}'"),
                    })
                }
            };
        }
    }
    let t = parse_table(text)?;
    expect_header(&t, &["x", "freq_hz", "s21_db"])?;
    if t.lines.is_empty() {
        return Err(Error::Parse {
            line: 4,
            msg: "no data rows".into(),
        });
    }

    let (xs, fs, vs) = (&t.columns[0], &t.columns[1], &t.columns[2]);
    let mut x_axis: Vec<f64> = Vec::new();
    let mut values: Vec<Vec<f64>> = Vec::new();
    let mut y_axis: Vec<f64> = Vec::new();
    for i in 0..xs.len() {
        if x_axis.last() != Some(&xs[i]) {
            if let Some(prev) = values.last() {
                if prev.len() != y_axis.len() {
                    return Err(Error::Parse {
                        line: t.lines[i],
                        msg: format!("previous column has {} of {} frequencies", prev.len(), y_axis.len()),
                    });
                }
            }
            x_axis.push(xs[i]);
            values.push(Vec::new());
        }
        let col = values.last_mut().unwrap();
        let k = col.len();
        if x_axis.len() == 1 {
            y_axis.push(fs[i]);
        } else if k >= y_axis.len() || y_axis[k] != fs[i] {
            return Err(Error::Parse {
                line: t.lines[i],
                msg: "frequency grid differs from the first column".into(),
            });
        }
        col.push(vs[i]);
    }
    if values.last().unwrap().len() != y_axis.len() {
        return Err(Error::Parse {
            line: *t.lines.last().unwrap(),
            msg: format!(
                "last column has {} of {} frequencies (truncated file?)",
                values.last().unwrap().len(),
                y_axis.len()
            ),
        });
    }
    SpectroMap::new(x_kind, x_axis, y_axis, values)
}

pub fn write_trace(trace: &SpectroTrace) -> String {
    write_two_columns("freq_hz,s21_db", &trace.axis, &trace.values)
}

pub fn read_trace(text: &str) -> Result<SpectroTrace> {
    let (f, v) = two_columns(text, &["freq_hz", "s21_db"])?;
    SpectroTrace::new(f, v)
}

pub fn write_decay(trace: &DecayTrace) -> String {
    write_two_columns("delay_s,amplitude", &trace.delays, &trace.amplitudes)
}

pub fn read_decay(text: &str) -> Result<DecayTrace> {
    let (t, a) = two_columns(text, &["delay_s", "amplitude"])?;
    DecayTrace::new(t, a)
}

pub fn write_branches(data: &BranchData) -> String {
    let fq: Vec<f64> = data.points.iter().map(|p| p.0.as_hz()).collect();
    let d: Vec<f64> = data.points.iter().map(|p| p.1.as_hz()).collect();
    write_two_columns("fq_hz,delta_hz", &fq, &d)
}

pub fn read_branches(text: &str) -> Result<BranchData> {
    let (fq, d) = two_columns(text, &["fq_hz", "delta_hz"])?;
    BranchData::new(fq.into_iter().zip(d).map(|(a, b)| (Frequency::hz(a), Frequency::hz(b))).collect())
}

/// What the abscissa of a linewidth series is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinewidthAxis {
    Phi,
    PowerDbm,
}

impl LinewidthAxis {
    fn column(self) -> &'static str {
        match self {
            LinewidthAxis::Phi => "phi",
            LinewidthAxis::PowerDbm => "power_dbm",
        }
    }
}

pub fn write_linewidths(axis: LinewidthAxis, series: &LinewidthSeries) -> String {
    let x: Vec<f64> = series.points.iter().map(|p| p.0).collect();
    let w: Vec<f64> = series.points.iter().map(|p| p.1.as_hz()).collect();
    write_two_columns(&format!("{},fwhm_hz", axis.column()), &x, &w)
}

pub fn read_linewidths(text: &str, axis: LinewidthAxis) -> Result<LinewidthSeries> {
    let (x, w) = two_columns(text, &[axis.column(), "fwhm_hz"])?;
    LinewidthSeries::new(x.into_iter().zip(w).map(|(x, w)| (x, Frequency::hz(w))).collect())
}

pub fn write_ridge(ridge: &Ridge) -> String {
    let x: Vec<f64> = ridge.points.iter().map(|p| p.0).collect();
    let f: Vec<f64> = ridge.points.iter().map(|p| p.1).collect();
    write_two_columns("x,fr_hz", &x, &f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_map() -> SpectroMap {
        SpectroMap::new(
            MapAxis::Power,
            vec![-50.0, -40.5],
            vec![6.0e9, 6.0001e9, 6.0002e9],
            vec![vec![-0.1, -20.000000000000004, -0.3], vec![0.0, -1.5, -2.25]],
        )
        .unwrap()
    }

    #[test]
    fn map_round_trip_is_lossless() {
        let map = small_map();
        let text = write_map(&map);
        assert!(text.starts_with("# cqedlab-map-v1\n# x_axis=power\nx,freq_hz,s21_db\n-50,6000000000,-0.1\n"));
        assert_eq!(read_map(&text).unwrap(), map);
        assert_eq!(write_map(&read_map(&text).unwrap()), text);
    }

    #[test]
    fn truncated_map_is_rejected() {
        let text = write_map(&small_map());
        let cut: String = text.lines().take(7).map(|l| format!("{l}\n")).collect();
        assert!(matches!(read_map(&cut), Err(Error::Parse { line: 7, .. })));
        let half_row = &text[..text.len() - 7];
        assert!(matches!(read_map(half_row), Err(Error::Parse { .. })));
    }

    #[test]
    fn wrong_schema_line() {
        assert!(matches!(read_map("x,freq_hz,s21_db\n1,2,3\n"), Err(Error::Schema { .. })));
    }

    #[test]
    fn bad_number_reports_line() {
        let text = "delay_s,amplitude\n0,1\n1e-9,0.9\n2e-9,abc\n";
        match read_decay(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("abc"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(read_decay("delay_s,amplitude\n0,1\n1,2,3\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn header_is_checked() {
        assert!(matches!(read_trace("f,s\n1,2\n"), Err(Error::Parse { .. })));
        assert!(read_trace("freq_hz,s21_db\n").is_err());
    }

    #[test]
    fn small_files_round_trip() {
        let d = DecayTrace::new(vec![0.0, 1e-9], vec![1.0, 0.5]).unwrap();
        assert_eq!(read_decay(&write_decay(&d)).unwrap(), d);
        let b = BranchData::new(vec![(Frequency::ghz(6.0), Frequency::mhz(201.0))]).unwrap();
        assert_eq!(read_branches(&write_branches(&b)).unwrap(), b);
        let s = LinewidthSeries::new(vec![(0.01, Frequency::mhz(70.0))]).unwrap();
        assert_eq!(read_linewidths(&write_linewidths(LinewidthAxis::Phi, &s), LinewidthAxis::Phi).unwrap(), s);
        assert!(read_linewidths(&write_linewidths(LinewidthAxis::Phi, &s), LinewidthAxis::PowerDbm).is_err());
    }
}
