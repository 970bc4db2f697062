//! JSON-lines coefficient files.
//!
//! The first line is a header `{label, weight, level, sigma, M, error_bound}`;
//! every further line is `{"m": int, "re": ..., "im": ..., "err": ...}`.
//! Exact integer coefficients are written as decimal strings in `re`.

use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::series::CoeffSeries;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CoeffHeader {
    pub label: String,
    pub weight: i64,
    pub level: u64,
    pub sigma: f64,
    #[serde(rename = "M")]
    pub m_max: usize,
    /// Largest per-coefficient error.
    pub error_bound: f64,
}

#[derive(Serialize, Deserialize)]
struct CoeffLine {
    m: usize,
    re: Value,
    im: Value,
    #[serde(default, skip_serializing_if = "is_zero")]
    err: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn invalid(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Invalid(format!("coefficient file line {line}: {msg}"))
}

pub fn write_coeffs<W: Write>(f: &CoeffSeries<f64>, mut out: W) -> Result<()> {
    let header = CoeffHeader {
        label: f.label.clone(),
        weight: f.weight,
        level: f.level,
        sigma: f.sigma,
        m_max: f.max_index(),
        error_bound: f.errors.iter().copied().fold(0.0, f64::max),
    };
    let io = |e: std::io::Error| Error::Invalid(e.to_string());
    writeln!(out, "{}", serde_json::to_string(&header).expect("plain data")).map_err(io)?;
    for m in 0..=f.max_index() {
        let (re, im) = match &f.exact {
            Some(ex) => (Value::String(ex[m].to_string()), Value::from(0)),
            None => (Value::from(f.coeffs[m].re), Value::from(f.coeffs[m].im)),
        };
        let line = CoeffLine { m, re, im, err: f.errors[m] };
        writeln!(out, "{}", serde_json::to_string(&line).expect("plain data")).map_err(io)?;
    }
    Ok(())
}

enum Parsed {
    Int(BigInt),
    Float(f64),
}

fn parse_number(v: &Value, line: usize) -> Result<Parsed> {
    match v {
        Value::String(s) => s
            .parse::<BigInt>()
            .map(Parsed::Int)
            .or_else(|_| s.parse::<f64>().map(Parsed::Float))
            .map_err(|_| invalid(line, format!("unparseable number {s:?}"))),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Parsed::Int(BigInt::from(i))),
            None => n
                .as_f64()
                .map(Parsed::Float)
                .ok_or_else(|| invalid(line, "number out of range")),
        },
        other => Err(invalid(line, format!("expected a number, got {other}"))),
    }
}

pub fn read_coeffs<R: BufRead>(input: R) -> Result<CoeffSeries<f64>> {
    let mut lines = input.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| invalid(1, "empty file"))?;
    let first = first.map_err(|e| invalid(1, e))?;
    let header: CoeffHeader = serde_json::from_str(&first).map_err(|e| invalid(1, e))?;
    let n = header.m_max + 1;
    let mut ints: Vec<Option<BigInt>> = vec![None; n];
    let mut coeffs = vec![Complex::new(0.0, 0.0); n];
    let mut errors = vec![0.0; n];
    let mut seen = vec![false; n];
    let mut all_int = true;
    for (i, text) in lines {
        let lineno = i + 1;
        let text = text.map_err(|e| invalid(lineno, e))?;
        if text.trim().is_empty() {
            continue;
        }
        let line: CoeffLine = serde_json::from_str(&text).map_err(|e| invalid(lineno, e))?;
        if line.m >= n {
            return Err(invalid(lineno, format!("index {} exceeds M = {}", line.m, header.m_max)));
        }
        let re = parse_number(&line.re, lineno)?;
        let im = parse_number(&line.im, lineno)?;
        let im_f = match &im {
            Parsed::Int(x) => x.to_string().parse::<f64>().unwrap_or(f64::NAN),
            Parsed::Float(x) => *x,
        };
        let re_f = match &re {
            Parsed::Int(x) => x.to_string().parse::<f64>().unwrap_or(f64::NAN),
            Parsed::Float(x) => *x,
        };
        match (&re, im_f == 0.0, line.err == 0.0) {
            (Parsed::Int(x), true, true) => ints[line.m] = Some(x.clone()),
            _ => all_int = false,
        }
        coeffs[line.m] = Complex::new(re_f, im_f);
        errors[line.m] = line.err;
        seen[line.m] = true;
    }
    if let Some(m) = seen.iter().position(|s| !s) {
        return Err(invalid(0, format!("coefficient a_{m} is missing")));
    }
    if all_int {
        let ints = ints.into_iter().map(|x| x.expect("all integral")).collect();
        return Ok(CoeffSeries::from_exact(
            &header.label,
            header.weight,
            header.level,
            header.sigma,
            ints,
        ));
    }
    Ok(CoeffSeries::from_complex(
        &header.label,
        header.weight,
        header.level,
        header.sigma,
        coeffs,
        errors,
    ))
}

pub fn save_coeffs(f: &CoeffSeries<f64>, path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path)
        .map_err(|e| Error::Invalid(format!("cannot create {}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    write_coeffs(f, &mut w)?;
    w.flush().map_err(|e| Error::Invalid(e.to_string()))
}

pub fn load_coeffs(path: &std::path::Path) -> Result<CoeffSeries<f64>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Invalid(format!("cannot open {}: {e}", path.display())))?;
    read_coeffs(std::io::BufReader::new(file))
}
