//! CSV writers. Columns are fixed: packets `x,re,im,abs2`, spectra
//! `lambda,value`, decay profiles `t,norm2`. Numbers use the shortest
//! round-trip form, so output is byte-identical across runs.

use crate::error::CliError;
use lpscatter::Complex64;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Destination directory; `None` means nothing is written.
#[derive(Debug, Clone)]
pub struct Sink {
    pub dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    fn write(&self, name: &str, body: String) -> Result<Option<PathBuf>, CliError> {
        let Some(dir) = &self.dir else {
            return Ok(None);
        };
        let io = |p: &Path, e: std::io::Error| CliError::Output {
            path: p.to_path_buf(),
            message: e.to_string(),
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| io(&path, e))?;
        Ok(Some(path))
    }

    pub fn packet(&self, name: &str, rows: impl IntoIterator<Item = (f64, Complex64)>) -> Result<Option<PathBuf>, CliError> {
        let mut s = String::from("x,re,im,abs2\n");
        for (x, z) in rows {
            let _ = writeln!(s, "{x:?},{:?},{:?},{:?}", z.re, z.im, z.norm_sqr());
        }
        self.write(name, s)
    }

    pub fn spectrum(&self, name: &str, rows: impl IntoIterator<Item = (f64, f64)>) -> Result<Option<PathBuf>, CliError> {
        self.pairs(name, "lambda,value", rows)
    }

    pub fn decay(&self, name: &str, rows: impl IntoIterator<Item = (f64, f64)>) -> Result<Option<PathBuf>, CliError> {
        self.pairs(name, "t,norm2", rows)
    }

    fn pairs(&self, name: &str, header: &str, rows: impl IntoIterator<Item = (f64, f64)>) -> Result<Option<PathBuf>, CliError> {
        let mut s = format!("{header}\n");
        for (a, b) in rows {
            let _ = writeln!(s, "{a:?},{b:?}");
        }
        self.write(name, s)
    }

    pub fn text(&self, name: &str, body: String) -> Result<Option<PathBuf>, CliError> {
        self.write(name, body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_and_number_format() {
        let tmp = tempfile::tempdir().unwrap();
        let sink = Sink::new(Some(tmp.path().to_path_buf()));
        let p = sink.spectrum("s.csv", [(0.0, 3.0), (0.5, 0.1)]).unwrap().unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "lambda,value\n0.0,3.0\n0.5,0.1\n");
        let p = sink.packet("p.csv", [(1.0, Complex64::new(0.0, -2.0))]).unwrap().unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "x,re,im,abs2\n1.0,0.0,-2.0,4.0\n");
        assert!(Sink::new(None).decay("d.csv", [(0.0, 1.0)]).unwrap().is_none());
    }
}
