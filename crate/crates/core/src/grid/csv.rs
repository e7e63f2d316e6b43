//! Plain-text CSV for fields.
//!
//! ```text
//! # R=2.1 N=32 kind=nodal
//! -16,-16,0.0,0.0
//! ...
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so write -> read ->
//! write reproduces the bytes exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::{GridSpec, Index, NodalField, SpectralField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Nodal,
    Spectral,
}

impl FieldKind {
    fn as_str(self) -> &'static str {
        match self {
            FieldKind::Nodal => "nodal",
            FieldKind::Spectral => "spectral",
        }
    }
}

/// Parses `key=value` tokens from a `# ...` header line.
pub(crate) fn parse_header(line: &str, what: &'static str) -> Result<BTreeMap<String, String>> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::parse(what, format!("expected a '#' header, got {line:?}")))?;
    body.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::parse(what, format!("bad header token {tok:?}")))
        })
        .collect()
}

pub(crate) fn header_value<'a>(
    map: &'a BTreeMap<String, String>,
    key: &str,
    what: &'static str,
) -> Result<&'a str> {
    map.get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::parse(what, format!("missing header key {key:?}")))
}

pub(crate) fn parse_num<T: std::str::FromStr>(s: &str, what: &'static str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::parse(what, format!("bad number {s:?}")))
}

pub(crate) fn write_rows(out: &mut String, grid: &GridSpec, values: &[Complex64]) {
    for (j, v) in grid.indices().zip(values) {
        let _ = writeln!(out, "{},{},{:?},{:?}", j.0, j.1, v.re, v.im);
    }
}

/// Reads exactly `N^2` rows in storage order.
pub(crate) fn read_rows<'a>(
    lines: impl Iterator<Item = &'a str>,
    grid: &GridSpec,
    what: &'static str,
) -> Result<Vec<Complex64>> {
    let mut values = Vec::with_capacity(grid.len());
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let pos = values.len();
        if pos >= grid.len() {
            return Err(Error::parse(what, "more rows than N^2"));
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(Error::parse(what, format!("expected 4 columns, got {line:?}")));
        }
        let j: Index = (parse_num(cols[0], what)?, parse_num(cols[1], what)?);
        if j != grid.index_at(pos) {
            return Err(Error::parse(
                what,
                format!("row {pos} has index {j:?}, expected {:?}", grid.index_at(pos)),
            ));
        }
        values.push(Complex64::new(parse_num(cols[2], what)?, parse_num(cols[3], what)?));
    }
    if values.len() != grid.len() {
        return Err(Error::parse(what, format!("expected {} rows, got {}", grid.len(), values.len())));
    }
    Ok(values)
}

fn to_csv(kind: FieldKind, grid: &GridSpec, values: &[Complex64]) -> String {
    let mut out = format!("# R={:?} N={} kind={}\n", grid.r(), grid.n(), kind.as_str());
    write_rows(&mut out, grid, values);
    out
}

fn from_csv(text: &str, kind: FieldKind) -> Result<(GridSpec, Vec<Complex64>)> {
    const WHAT: &str = "field csv";
    let mut lines = text.lines();
    let header = parse_header(lines.next().unwrap_or(""), WHAT)?;
    let found = header_value(&header, "kind", WHAT)?;
    if found != kind.as_str() {
        return Err(Error::parse(WHAT, format!("expected kind={}, got kind={found}", kind.as_str())));
    }
    let grid = GridSpec::new(
        parse_num(header_value(&header, "R", WHAT)?, WHAT)?,
        parse_num(header_value(&header, "N", WHAT)?, WHAT)?,
    )?;
    let values = read_rows(lines, &grid, WHAT)?;
    Ok((grid, values))
}

impl NodalField {
    pub fn to_csv(&self) -> String {
        to_csv(FieldKind::Nodal, &self.grid, &self.values)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (grid, values) = from_csv(text, FieldKind::Nodal)?;
        NodalField::new(grid, values)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(std::fs::write(path, self.to_csv())?)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

impl SpectralField {
    pub fn to_csv(&self) -> String {
        to_csv(FieldKind::Spectral, &self.grid, &self.coeffs)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (grid, coeffs) = from_csv(text, FieldKind::Spectral)?;
        SpectralField::new(grid, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let g = GridSpec::new(2.1, 4).unwrap();
        let f = NodalField::from_fn(g, |x| Complex64::new(x[0], -x[1] / 3.0));
        let text = f.to_csv();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# R=2.1 N=4 kind=nodal"));
        assert_eq!(lines.next(), Some("-2,-2,-2.1,0.7000000000000001"));
        assert_eq!(NodalField::from_csv(&text).unwrap(), f);
    }

    #[test]
    fn rejects_wrong_kind_and_short_files() {
        let g = GridSpec::new(1.0, 4).unwrap();
        let text = NodalField::zeros(g).to_csv();
        assert!(SpectralField::from_csv(&text).is_err());
        let short: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(NodalField::from_csv(&short).is_err());
        let swapped = text.replacen("-2,-2,", "-2,-1,", 1);
        assert!(NodalField::from_csv(&swapped).is_err());
    }
}
