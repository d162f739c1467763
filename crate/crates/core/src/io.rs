//! Plain CSV output shared by the report types.

use std::io::{self, Write};

/// Formats a float with 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Tabular data that can be written as CSV.
pub trait CsvTable {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;

    /// Writes an optional `# comment` line, the header and the rows.
    fn write_csv<W: Write>(&self, out: &mut W, comment: Option<&str>) -> io::Result<()> {
        if let Some(c) = comment {
            for line in c.lines() {
                writeln!(out, "# {line}")?;
            }
        }
        writeln!(out, "{}", self.header().join(","))?;
        for row in self.rows() {
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    fn to_csv_string(&self, comment: Option<&str>) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, comment).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_float(2.5), "2.50000000000e0");
        assert_eq!(fmt_float(-1.0 / 3.0), "-3.33333333333e-1");
        assert_eq!(fmt_float(0.0), "0.00000000000e0");
    }
}
