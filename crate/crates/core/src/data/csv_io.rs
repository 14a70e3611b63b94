use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Observation, ObservationTable};
use crate::error::{Error, Result};

/// Column names for CSV ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub x: String,
    pub y: String,
    /// Covariate column; read when present in the header.
    pub w: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            x: "x".into(),
            y: "y".into(),
            w: "w".into(),
        }
    }
}

pub fn ingest_csv<P: AsRef<Path>>(path: P, schema: &CsvSchema) -> Result<ObservationTable> {
    read_csv(File::open(path)?, schema)
}

/// Parses `x,y[,w]` rows. Row numbers in errors count data rows from 1.
pub fn read_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<ObservationTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let x_col = find(&schema.x)
        .ok_or_else(|| Error::Schema(format!("missing required column `{}`", schema.x)))?;
    let y_col = find(&schema.y)
        .ok_or_else(|| Error::Schema(format!("missing required column `{}`", schema.y)))?;
    let w_col = find(&schema.w);

    let mut rows = Vec::new();
    let mut row = 0;
    for record in rdr.records() {
        let record = record?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        row += 1;
        let cell = |col: usize, name: &str| -> Result<&str> {
            record.get(col).ok_or_else(|| Error::Parse {
                row,
                column: name.to_string(),
                value: String::new(),
            })
        };
        let parse_int = |col: usize, name: &str| -> Result<i64> {
            let raw = cell(col, name)?;
            raw.parse().map_err(|_| Error::Parse {
                row,
                column: name.to_string(),
                value: raw.to_string(),
            })
        };
        let x = parse_int(x_col, &schema.x)?;
        let raw_y = cell(y_col, &schema.y)?;
        let y: f64 = raw_y.parse().map_err(|_| Error::Parse {
            row,
            column: schema.y.clone(),
            value: raw_y.to_string(),
        })?;
        if !y.is_finite() {
            return Err(Error::Validation(format!("row {row}: outcome {raw_y} is not finite")));
        }
        let w = match w_col {
            Some(col) => Some(parse_int(col, &schema.w)?),
            None => None,
        };
        rows.push(Observation { x, y, w });
    }
    ObservationTable::new(rows)
}

/// Writes the table in the ingestion format, `w` included when present.
pub fn write_csv<W: Write>(table: &ObservationTable, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    if table.has_covariate() {
        wtr.write_record(["x", "y", "w"])?;
    } else {
        wtr.write_record(["x", "y"])?;
    }
    for r in table.rows() {
        match r.w {
            Some(w) => wtr.write_record([r.x.to_string(), r.y.to_string(), w.to_string()])?,
            None => wtr.write_record([r.x.to_string(), r.y.to_string()])?,
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ObservationTable> {
        read_csv(text.as_bytes(), &CsvSchema::default())
    }

    #[test]
    fn two_rows() {
        let t = parse("x,y\n0,1.5\n1,2.0").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.arms().iter().copied().collect::<Vec<_>>(), vec![0, 1]);
        assert!(!t.has_covariate());
        assert_eq!(t.rows()[0].y, 1.5);
    }

    #[test]
    fn covariate_column() {
        let t = parse("x,y,w\n1,5.0,0").unwrap();
        assert!(t.has_covariate());
        assert_eq!(t.rows()[0].w, Some(0));
    }

    #[test]
    fn bad_number_names_the_row() {
        let err = parse("x,y\n0,abc").unwrap_err();
        match err {
            Error::Parse { row, column, value } => {
                assert_eq!(row, 1);
                assert_eq!(column, "y");
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(format!("{}", parse("x,y\n0,1\n1.5,2").unwrap_err()).contains("row 2"));
    }

    #[test]
    fn missing_column_and_non_finite() {
        assert!(matches!(parse("x,z\n0,1"), Err(Error::Schema(_))));
        assert!(matches!(parse("x,y\n0,inf"), Err(Error::Validation(_))));
        assert!(matches!(parse("x,y\n0,NaN"), Err(Error::Validation(_))));
    }

    #[test]
    fn whitespace_rows_are_skipped_and_order_kept() {
        let t = parse("x, y\n1, 3.0\n   \n0 ,-2\n").unwrap();
        let ys: Vec<f64> = t.rows().iter().map(|r| r.y).collect();
        assert_eq!(ys, vec![3.0, -2.0]);
    }

    #[test]
    fn write_then_read() {
        let t = parse("x,y,w\n1,0.1,3\n-1,2.5e-7,4\n").unwrap();
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        assert_eq!(parse(std::str::from_utf8(&buf).unwrap()).unwrap(), t);
    }
}
