//! Tabulated-function input and bit-stable CSV/JSON output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// Fixed numeric format: 17 significant digits in scientific notation.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Read a two-column `x,value` CSV. A non-numeric first line is taken as a
/// header. Errors carry the offending file and row.
pub fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = cols.iter().map(|c| c.parse::<f64>().ok()).collect();
        match (cols.len(), parsed) {
            (2, Some(v)) => {
                xs.push(v[0]);
                ys.push(v[1]);
            }
            _ if i == 0 => continue,
            _ => {
                return Err(format!(
                    "{} row {}: expected two numeric columns `x,value`, got `{line}`",
                    path.display(),
                    i + 1
                ))
            }
        }
    }
    if let Some(i) = xs.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(format!("{}: x is not strictly increasing at data row {}", path.display(), i + 2));
    }
    Ok((xs, ys))
}

/// Files written during one run, in creation order.
#[derive(Debug, Default)]
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<String>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn record(&mut self, name: &str) {
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
    }

    /// Write a numeric CSV with a header row; `\n` line endings, no quoting.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> io::Result<()> {
        let mut out = io::BufWriter::new(fs::File::create(self.dir.join(name))?);
        out.write_all(header.join(",").as_bytes())?;
        out.write_all(b"\n")?;
        for row in rows {
            let line: Vec<String> = row.into_iter().map(fmt_num).collect();
            out.write_all(line.join(",").as_bytes())?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        self.record(name);
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &serde_json::Value) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        text.push('\n');
        fs::write(self.dir.join(name), text)?;
        self.record(name);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(-2.0), "-2.0000000000000000e0");
        let v = 0.123456789012345678_f64;
        assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn table_header_is_optional() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        fs::write(&p, "x,value\n0,1\n1,2\n").unwrap();
        assert_eq!(read_table(&p).unwrap(), (vec![0.0, 1.0], vec![1.0, 2.0]));
        fs::write(&p, "0,1\n1,2\n").unwrap();
        assert_eq!(read_table(&p).unwrap().0.len(), 2);
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        fs::write(&p, "x,value\n0,1\n1,oops\n").unwrap();
        assert!(read_table(&p).unwrap_err().contains("row 3"));
        fs::write(&p, "0,1\n0,2\n").unwrap();
        assert!(read_table(&p).unwrap_err().contains("strictly increasing"));
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::new(&dir.path().join("sub")).unwrap();
        a.csv("t.csv", &["x", "v"], vec![vec![1.0, 0.5]]).unwrap();
        let text = fs::read_to_string(dir.path().join("sub/t.csv")).unwrap();
        assert_eq!(text, "x,v\n1.0000000000000000e0,5.0000000000000000e-1\n");
        assert_eq!(a.written(), ["t.csv"]);
    }
}
