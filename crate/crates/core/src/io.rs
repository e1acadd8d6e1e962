//! CSV reading and writing of functional samples.
//!
//! Layout: a header row `t,<t_1>,...,<t_p>` followed by one row per curve,
//! `<label>,<v_1>,...,<v_p>`. Numbers are written with 17 significant digits
//! so that a write/read cycle reproduces every value bit for bit.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::sample::{Curve, FunctionalSample};

/// Formats a value with 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_cell(cell: &str, row: usize, column: usize) -> Result<f64> {
    let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
        row,
        column,
        message: format!("cannot parse {:?} as a number", cell.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            column,
            message: format!("value {:?} is not finite", cell.trim()),
        });
    }
    Ok(v)
}

fn csv_error(e: csv::Error) -> Error {
    let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            row,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Reads a sample. Rows and columns in error messages are 1-based; the header
/// is row 1.
pub fn load_sample_csv<R: Read>(source: R) -> Result<FunctionalSample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r.map_err(csv_error)?,
        None => {
            return Err(Error::Parse {
                row: 1,
                column: 1,
                message: "missing header row".into(),
            })
        }
    };
    if header.len() < 3 {
        return Err(Error::Parse {
            row: 1,
            column: header.len(),
            message: "header needs a leading cell and at least 2 time points".into(),
        });
    }
    let mut points = Vec::with_capacity(header.len() - 1);
    for (j, cell) in header.iter().enumerate().skip(1) {
        let t = parse_cell(cell, 1, j + 1)?;
        if let Some(&prev) = points.last() {
            if t <= prev {
                return Err(Error::Parse {
                    row: 1,
                    column: j + 1,
                    message: format!("time {t} does not increase on {prev}"),
                });
            }
        }
        points.push(t);
    }
    let p = points.len();
    let grid = Arc::new(Grid::new(points)?);

    let mut curves = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in records.enumerate() {
        let row = i + 2;
        let record = record.map_err(csv_error)?;
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        if record.len() != p + 1 {
            return Err(Error::Parse {
                row,
                column: record.len(),
                message: format!("ragged row: {} values under a {p}-point header", record.len() - 1),
            });
        }
        let values = record
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, cell)| parse_cell(cell, row, j + 1))
            .collect::<Result<Vec<_>>>()?;
        labels.push(record[0].to_string());
        curves.push(Curve::from_values_unchecked(values));
    }
    if curves.is_empty() {
        return Err(Error::Parse {
            row: 2,
            column: 1,
            message: "no curve rows".into(),
        });
    }
    FunctionalSample::with_labels(grid, curves, labels)
}

pub fn save_sample_csv<W: Write>(sample: &FunctionalSample, sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    let mut header = vec!["t".to_string()];
    header.extend(sample.grid().points().iter().map(|&t| format_value(t)));
    writer.write_record(&header).map_err(csv_error)?;
    for (curve, label) in sample.curves().iter().zip(sample.labels()) {
        let mut row = vec![label.clone()];
        row.extend(curve.values().iter().map(|&v| format_value(v)));
        writer.write_record(&row).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes `(index, value)` rows under a header, for depth vectors, ranks and
/// similar per-curve outputs.
pub fn save_indexed_csv<W: Write>(header: [&str; 2], values: &[f64], sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    writer.write_record(header).map_err(csv_error)?;
    for (i, &v) in values.iter().enumerate() {
        writer
            .write_record([i.to_string(), format_value(v)])
            .map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_single_constant_curve() {
        let s = load_sample_csv("t,0,0.5,1\na,1,1,1\n".as_bytes()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.grid().points(), &[0.0, 0.5, 1.0]);
        assert_eq!(s.curve(0).values(), &[1.0, 1.0, 1.0]);
        assert_eq!(s.labels(), &["a".to_string()]);
    }

    #[test]
    fn two_identical_rows() {
        let s = load_sample_csv("t,0,0.5,1\na,1,2,3\nb,1,2,3\n".as_bytes()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.curve(0), s.curve(1));
    }

    #[test]
    fn ragged_row_reports_row_two() {
        let err = load_sample_csv("t,0,0.5,1\na,1,1\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { row, .. } => assert_eq!(row, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bad_number_reports_coordinates() {
        let err = load_sample_csv("t,0,0.5,1\na,1,1,1\nb,1,x,1\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { row, column, .. } => assert_eq!((row, column), (3, 3)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn non_increasing_header() {
        let err = load_sample_csv("t,0,1,1\na,1,1,1\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { row, column, .. } => assert_eq!((row, column), (1, 4)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn writes_header_and_rows_with_empty_label() {
        let s = load_sample_csv("t,0,1\n,0.1,2\n".as_bytes()).unwrap();
        let mut out = Vec::new();
        save_sample_csv(&s, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("t,"));
        assert!(lines[1].starts_with(','), "{}", lines[1]);
        assert!(!text.contains('\r'));
        assert_eq!(load_sample_csv(text.as_bytes()).unwrap(), s);
    }

    #[test]
    fn labels_with_commas_survive() {
        let s = load_sample_csv("t,0,1\n\"x,y\",1,2\n".as_bytes()).unwrap();
        let mut out = Vec::new();
        save_sample_csv(&s, &mut out).unwrap();
        assert_eq!(load_sample_csv(out.as_slice()).unwrap().labels()[0], "x,y");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn csv_round_trip_is_identity(
                rows in proptest::collection::vec(
                    proptest::collection::vec(-1e300f64..1e300, 4), 1..6),
                labels in proptest::collection::vec("[a-z ,\"]{0,6}", 6),
            ) {
                let grid = Arc::new(Grid::new(vec![0.0, 0.1, 0.7, 1.3]).unwrap());
                let n = rows.len();
                let curves = rows.into_iter().map(|r| Curve::new(r).unwrap()).collect();
                let s = FunctionalSample::with_labels(grid, curves, labels[..n].to_vec()).unwrap();
                let mut out = Vec::new();
                save_sample_csv(&s, &mut out).unwrap();
                let back = load_sample_csv(out.as_slice()).unwrap();
                prop_assert_eq!(back, s);
            }
        }
    }
}
