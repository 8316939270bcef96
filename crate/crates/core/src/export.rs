//! Deterministic CSV output: LF line endings, `.` decimal separator, mandatory
//! header, floats with 17 significant digits.

use std::io::{self, Write};

/// Scientific notation with 17 significant digits; round-trips any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvWriter<W: Write> {
    inner: W,
    columns: usize,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut inner: W, header: &[&str]) -> io::Result<Self> {
        inner.write_all(header.join(",").as_bytes())?;
        inner.write_all(b"\n")?;
        Ok(Self {
            inner,
            columns: header.len(),
        })
    }

    pub fn row(&mut self, fields: &[String]) -> io::Result<()> {
        debug_assert_eq!(fields.len(), self.columns);
        self.inner.write_all(fields.join(",").as_bytes())?;
        self.inner.write_all(b"\n")
    }

    pub fn numeric_row(&mut self, values: &[f64]) -> io::Result<()> {
        let fields: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
        self.row(&fields)
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}
