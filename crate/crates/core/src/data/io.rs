use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use csv::{ReaderBuilder, Trim, WriterBuilder};
use nalgebra::{DMatrix, DVector};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};

/// Which column of the file holds the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetColumn {
    Last,
    Index(usize),
    Name(String),
}

impl FromStr for TargetColumn {
    type Err = std::convert::Infallible;

    /// `last`, a zero-based index, or a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "last" => TargetColumn::Last,
            _ => match s.parse::<usize>() {
                Ok(i) => TargetColumn::Index(i),
                Err(_) => TargetColumn::Name(s.to_string()),
            },
        })
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

fn remap_label(v: f64, line: u64) -> Result<f64> {
    match v {
        1.0 => Ok(1.0),
        0.0 | -1.0 => Ok(-1.0),
        _ => Err(Error::BadLabel { line, value: v }),
    }
}

/// Reads a dataset from a CSV file. See [`read_csv`].
pub fn load_csv(path: impl AsRef<Path>, has_header: bool, target: &TargetColumn, task: Task) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    read_csv(file, has_header, target, task)
}

/// Parses comma-separated numeric rows. Cells are whitespace-trimmed; blank
/// lines are skipped. Classification labels `0`/`1` become `-1`/`+1`.
pub fn read_csv(reader: impl Read, has_header: bool, target: &TargetColumn, task: Task) -> Result<Dataset> {
    let mut rdr = ReaderBuilder::new().has_headers(has_header).flexible(true).trim(Trim::All).from_reader(reader);
    let names: Option<Vec<String>> = if has_header {
        Some(rdr.headers().map_err(csv_error)?.iter().map(str::to_string).collect())
    } else {
        None
    };

    let mut width: Option<usize> = names.as_ref().map(Vec::len);
    let mut cells: Vec<f64> = Vec::new();
    let mut lines: Vec<u64> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow { line, expected, found: record.len() });
        }
        for (column, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::NonNumeric { line, column: column + 1, cell: cell.to_string() })?;
            cells.push(v);
        }
        lines.push(line);
    }
    let width = width.unwrap_or(0);
    let n = lines.len();
    if n == 0 || width < 2 {
        return Err(Error::Csv(format!("need at least one row and two columns, found {n} rows and {width} columns")));
    }

    let target = match target {
        TargetColumn::Last => width - 1,
        TargetColumn::Index(i) if *i < width => *i,
        TargetColumn::Index(i) => return Err(Error::Csv(format!("target column {i} out of range for {width} columns"))),
        TargetColumn::Name(name) => names
            .as_ref()
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(|| Error::Csv(format!("no column named `{name}`")))?,
    };

    let mut y = DVector::zeros(n);
    for i in 0..n {
        let v = cells[i * width + target];
        y[i] = match task {
            Task::Regression => v,
            Task::BinaryClassification => remap_label(v, lines[i])?,
        };
    }
    let x = DMatrix::from_fn(n, width - 1, |i, j| cells[i * width + if j < target { j } else { j + 1 }]);
    Dataset::new(x, y, task)
}

/// Writes features `x1..xp` followed by the target column `y`.
pub fn write_csv(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut w = WriterBuilder::new().from_writer(file);
    let mut header: Vec<String> = (1..=data.p()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header).map_err(csv_error)?;
    for i in 0..data.n() {
        let mut row: Vec<String> = data.row(i).iter().map(|v| format!("{v:?}")).collect();
        row.push(format!("{:?}", data.y()[i]));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str, header: bool, task: Task) -> Result<Dataset> {
        read_csv(s.as_bytes(), header, &TargetColumn::Last, task)
    }

    #[test]
    fn last_column_is_target() {
        let d = read("1,2,3\n4,5,6\n7,8,9\n", false, Task::Regression).unwrap();
        assert_eq!((d.n(), d.p()), (3, 2));
        assert_eq!(d.y().as_slice(), &[3.0, 6.0, 9.0]);
        assert_eq!(d.row(2), &[7.0, 8.0]);
    }

    #[test]
    fn named_and_indexed_targets() {
        let s = "a, b ,c\n1,2,3\n4,5,6\n";
        let d = read_csv(s.as_bytes(), true, &TargetColumn::Name("b".into()), Task::Regression).unwrap();
        assert_eq!(d.y().as_slice(), &[2.0, 5.0]);
        assert_eq!(d.row(1), &[4.0, 6.0]);
        let d = read_csv(s.as_bytes(), true, &TargetColumn::Index(0), Task::Regression).unwrap();
        assert_eq!(d.y().as_slice(), &[1.0, 4.0]);
        assert!(read_csv(s.as_bytes(), true, &TargetColumn::Name("z".into()), Task::Regression).is_err());
    }

    #[test]
    fn binary_labels_are_remapped() {
        let d = read("0.5,0\n1.5,1\n2.5,-1\n", false, Task::BinaryClassification).unwrap();
        assert_eq!(d.y().as_slice(), &[-1.0, 1.0, -1.0]);
        assert!(matches!(read("1,2\n", false, Task::BinaryClassification), Err(Error::BadLabel { line: 1, .. })));
    }

    #[test]
    fn diagnostics_name_the_line() {
        match read("x,y\n1,2\n3\n", true, Task::Regression) {
            Err(Error::RaggedRow { line: 3, expected: 2, found: 1 }) => {}
            other => panic!("{other:?}"),
        }
        match read("1,2\n3,abc\n", false, Task::Regression) {
            Err(Error::NonNumeric { line: 2, column: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn whitespace_is_tolerated() {
        let d = read("  1 ,\t2\n\n3,  4  \n", false, Task::Regression).unwrap();
        assert_eq!(d.y().as_slice(), &[2.0, 4.0]);
    }
}
