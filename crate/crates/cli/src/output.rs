//! CSV emission. Floats are written with 17 significant digits so they read
//! back bit-exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use jcfeedback::FeedbackParams;

use crate::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn params_line(params: &FeedbackParams, extra: &[(&str, String)]) -> String {
    let mut line = format!("# params: {params}");
    for (k, v) in extra {
        line.push_str(&format!(" {k}={v}"));
    }
    line
}

pub struct Sink {
    path: Option<PathBuf>,
    inner: Box<dyn Write>,
}

impl Sink {
    /// File at `path`, or standard output.
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => {
                let file = File::create(p).map_err(|e| CliError::Io { path: p.to_path_buf(), source: e })?;
                Ok(Self { path: Some(p.to_path_buf()), inner: Box::new(BufWriter::new(file)) })
            }
            None => Ok(Self { path: None, inner: Box::new(BufWriter::new(io::stdout().lock())) }),
        }
    }

    pub fn is_stdout(&self) -> bool {
        self.path.is_none()
    }

    fn err(&self, e: io::Error) -> CliError {
        CliError::Io { path: self.path.clone().unwrap_or_else(|| PathBuf::from("<stdout>")), source: e }
    }

    pub fn line(&mut self, text: &str) -> Result<(), CliError> {
        writeln!(self.inner, "{text}").map_err(|e| self.err(e))
    }

    pub fn row(&mut self, values: &[f64]) -> Result<(), CliError> {
        let text = values.iter().map(|&v| num(v)).collect::<Vec<_>>().join(",");
        self.line(&text)
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush().map_err(|e| self.err(e))
    }
}
