//! Plain-text model files.
//!
//! ```text
//! RBM-MODEL v1
//! n_visible 3
//! n_hidden 2
//! weights
//! <n_visible rows of n_hidden values>
//! visible_bias
//! <n_visible values>
//! hidden_bias
//! <n_hidden values>
//! ```
//!
//! Values are written in scientific notation with 17 significant digits, so
//! every `f64` reads back exactly.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};

use super::RbmParams;
use crate::error::{Error, Result};

pub const MODEL_HEADER: &str = "RBM-MODEL v1";

fn write_row<W: Write>(out: &mut W, values: impl Iterator<Item = f64>) -> std::io::Result<()> {
    let line: Vec<String> = values.map(|x| format!("{x:.16e}")).collect();
    writeln!(out, "{}", line.join(" "))
}

pub fn write_model<W: Write>(params: &RbmParams, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{MODEL_HEADER}")?;
    writeln!(out, "n_visible {}", params.n_visible())?;
    writeln!(out, "n_hidden {}", params.n_hidden())?;
    writeln!(out, "weights")?;
    for row in params.weights().rows() {
        write_row(out, row.iter().copied())?;
    }
    writeln!(out, "visible_bias")?;
    write_row(out, params.visible_bias().iter().copied())?;
    writeln!(out, "hidden_bias")?;
    write_row(out, params.hidden_bias().iter().copied())
}

pub fn save_model(params: &RbmParams, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_model(params, &mut buf).expect("writing to memory");
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self, expecting: &str) -> Result<String> {
        self.line += 1;
        match self.inner.next() {
            Some(Ok(s)) => Ok(s.trim().to_string()),
            Some(Err(e)) => Err(Error::ModelFormat(format!("line {}: {e}", self.line))),
            None => Err(Error::ModelFormat(format!(
                "unexpected end of file, expected {expecting}"
            ))),
        }
    }

    fn keyword(&mut self, key: &str) -> Result<()> {
        let got = self.next(key)?;
        if got != key {
            return Err(Error::ModelFormat(format!(
                "line {}: expected `{key}`, found `{got}`",
                self.line
            )));
        }
        Ok(())
    }

    fn count(&mut self, key: &str) -> Result<usize> {
        let got = self.next(key)?;
        let value = got
            .strip_prefix(key)
            .map(str::trim)
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n > 0);
        value.ok_or_else(|| {
            Error::ModelFormat(format!(
                "line {}: expected `{key} <positive integer>`, found `{got}`",
                self.line
            ))
        })
    }

    fn reals(&mut self, what: &str, expected: usize) -> Result<Vec<f64>> {
        let got = self.next(what)?;
        let values = got
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::ModelFormat(format!("line {}: bad number `{tok}`", self.line)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != expected {
            return Err(Error::ModelFormat(format!(
                "line {}: expected {expected} values for {what}, found {}",
                self.line,
                values.len()
            )));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::ModelFormat(format!("line {}: non-finite value", self.line)));
        }
        Ok(values)
    }
}

pub fn read_model<R: Read>(input: R) -> Result<RbmParams> {
    let mut lines = Lines {
        inner: BufReader::new(input).lines(),
        line: 0,
    };
    lines.keyword(MODEL_HEADER)?;
    let n = lines.count("n_visible")?;
    let m = lines.count("n_hidden")?;
    lines.keyword("weights")?;
    let mut weights = Vec::with_capacity(n * m);
    for _ in 0..n {
        weights.extend(lines.reals("weight row", m)?);
    }
    lines.keyword("visible_bias")?;
    let b = lines.reals("visible bias", n)?;
    lines.keyword("hidden_bias")?;
    let c = lines.reals("hidden bias", m)?;
    let weights = Array2::from_shape_vec((n, m), weights).expect("row count checked");
    RbmParams::from_parts(weights, Array1::from(b), Array1::from(c))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<RbmParams> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_model(file)
}
