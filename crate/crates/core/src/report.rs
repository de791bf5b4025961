//! Plain tables written as RFC-4180 CSV with 17 significant digits.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Formats a real with 17 significant digits (round-trip exact).
pub fn fmt_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        // csv readers and serde both understand these spellings
        format!("{v}")
    }
}

/// A CSV-ready table of already formatted cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        let file = std::fs::File::create(dir.join(format!("{}.csv", self.name)))?;
        self.write(std::io::BufWriter::new(file))
    }
}

/// Shorthand for building rows: `row![int, real, …]`.
#[macro_export]
macro_rules! row {
    ($($cell:expr),* $(,)?) => {
        vec![$($crate::report::Cell::from($cell).0),*]
    };
}

/// A formatted cell; reals get 17 significant digits.
pub struct Cell(pub String);

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell(fmt_real(v))
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell(v.to_string())
            }
        }
    )*};
}
int_cell!(i32, i64, u32, u64, usize, bool);

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0] {
            let s = fmt_real(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_real(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn table_writes_csv() {
        let mut t = Table::new("t", &["j", "value", "note"]);
        t.push(crate::row![1usize, 0.5, "a,b"]);
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "j,value,note\n1,5.0000000000000000e-1,\"a,b\"\n"
        );
    }
}
