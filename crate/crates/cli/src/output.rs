use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::ValueEnum;
use polydist::exactnum::rational::fmt_rational;
use polydist::exactnum::RingElem;
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Sink {
    path: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    pub fn new(path: Option<PathBuf>, format: Format) -> Sink {
        Sink { path, format }
    }

    pub fn write(&self, text: &str) -> Result<(), CliError> {
        match &self.path {
            Some(p) => {
                std::fs::write(p, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::Config(format!("cannot write to standard output: {e}")))
            }
        }
    }

    /// The CSV table, or `json` when the JSON format was asked for.
    pub fn emit<T: Serialize>(&self, csv: impl FnOnce() -> String, json: &T) -> Result<(), CliError> {
        match self.format {
            Format::Csv => self.write(&csv()),
            Format::Json => self.write(&to_json(json)?),
        }
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// `x` with 15 significant digits.
pub fn sig15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let digits = (14 - mag).max(0) as usize;
        format!("{x:.digits$}")
    } else {
        format!("{x:.14e}")
    }
}

/// Lower and upper ends of the real value at embedding 0.
pub fn bounds(e: &RingElem) -> (f64, f64) {
    e.embed(0, 64).re.to_f64_pair()
}

pub fn coords(e: &RingElem) -> Vec<String> {
    e.coords().iter().map(fmt_rational).collect()
}

pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table {
            text: format!("{}\n", header.join(",")),
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: impl IntoIterator<Item = S>) {
        let cells: Vec<String> = cells.into_iter().map(|c| c.as_ref().to_string()).collect();
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn finish(self) -> String {
        self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig15(1.0), "1.00000000000000");
        assert_eq!(sig15(std::f64::consts::SQRT_2), "1.41421356237310");
        assert_eq!(sig15(2414.213562373095), "2414.21356237310");
        assert_eq!(sig15(-0.125), "-0.125000000000000");
        assert_eq!(sig15(1.5e20), "1.50000000000000e20");
    }
}
