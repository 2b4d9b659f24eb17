//! Coefficient files, file naming and the bundled reference tables.
//!
//! Names follow `qQQQdDaAAkK`: `QQQ` is `q` zero-padded to three digits,
//! `D` the exponent of `delta = 10^-D` (0 for `delta = 0`), `AA = 100 alpha`.
//! 1-URA files use `qqXY` with `q0 = 100 X`, `q1 = 100 Y`.

mod manifest;
mod tab;

pub use manifest::{
    decode_stem, failed_cases, parse_manifest, reference_lookup, reference_lookup_stem, reference_table, RefDatum,
    RefValue,
};
pub use tab::{emit_tab, emit_txt, parse_tab, TabEntry, TabFile, TAB_DIGITS};

use std::fmt;

use thiserror::Error;

use crate::remez::TargetParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("line {line}: {reason}")]
    MalformedBlock { line: usize, reason: String },
    #[error("manifest line {line} is malformed")]
    MalformedManifest { line: usize },
    #[error("no {table_id} entry for {stem}")]
    NotInManifest { table_id: String, stem: String },
    #[error("cannot encode {0} in a file name")]
    UnencodableParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FileKind {
    /// Real partial fractions of a BURA.
    BuraTab,
    /// The same with imaginary parts.
    BuraComplex,
    /// Error and extreme points of a BURA.
    BuraExtrema,
    ZeroUra,
    OneUra {
        q0: f64,
        q1: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataFileName {
    pub folder: &'static str,
    pub stem: String,
    pub ext: &'static str,
}

impl DataFileName {
    /// `folder/stem.ext`.
    pub fn path(&self) -> String {
        format!("{}/{}", self.folder, self)
    }
}

impl fmt::Display for DataFileName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.stem, self.ext)
    }
}

fn near_int(v: f64) -> Option<i64> {
    let r = v.round();
    ((v - r).abs() <= 1e-9 * r.abs().max(1.0)).then_some(r as i64)
}

pub(crate) fn q_code(q: f64) -> Result<String, DataError> {
    match near_int(q) {
        Some(n) if (0..=999).contains(&n) => Ok(format!("{n:03}")),
        _ => Err(DataError::UnencodableParams(format!("q = {q}"))),
    }
}

pub(crate) fn delta_code(delta: f64) -> Result<String, DataError> {
    if delta == 0.0 {
        return Ok("0".into());
    }
    match near_int(-delta.log10()) {
        Some(d) if (1..=9).contains(&d) => Ok(d.to_string()),
        _ => Err(DataError::UnencodableParams(format!("delta = {delta}"))),
    }
}

pub(crate) fn alpha_code(alpha: f64) -> Result<String, DataError> {
    match near_int(alpha * 100.0) {
        Some(a) if (1..=99).contains(&a) => Ok(format!("{a:02}")),
        _ => Err(DataError::UnencodableParams(format!("alpha = {alpha}"))),
    }
}

fn hundreds(q: f64) -> Result<i64, DataError> {
    match near_int(q / 100.0) {
        Some(n) if (0..=9).contains(&n) && near_int(q) == Some(100 * n) => Ok(n),
        _ => Err(DataError::UnencodableParams(format!("1-URA q = {q}"))),
    }
}

/// File name for a parameter set. For a 1-URA the `q` of `params` is
/// ignored in favour of the `(q0, q1)` pair.
pub fn encode_filename(params: &TargetParams, kind: FileKind) -> Result<DataFileName, DataError> {
    let tail = format!("d{}a{}k{}", delta_code(params.delta.to_f64())?, alpha_code(params.alpha.to_f64())?, params.k);
    let plain = || -> Result<String, DataError> { Ok(format!("q{}{tail}", q_code(params.q.to_f64())?)) };
    let (folder, stem, ext) = match kind {
        FileKind::BuraTab => ("BURA-dcmp", plain()?, "tab"),
        FileKind::BuraComplex => ("BURA-dcmp/add", plain()?, "txt"),
        FileKind::BuraExtrema => ("BURA-tabl", plain()?, "txt"),
        FileKind::ZeroUra => ("0URA-dcmp", plain()?, "tab"),
        FileKind::OneUra { q0, q1 } => ("1URA-dcmp", format!("qq{}{}{tail}", hundreds(q0)?, hundreds(q1)?), "tab"),
    };
    Ok(DataFileName { folder, stem, ext })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xnum::Precision;

    fn p(q: f64, d: f64, a: f64, k: usize) -> TargetParams {
        TargetParams::new(q, d, a, k, Precision::default()).unwrap()
    }

    #[test]
    fn codes() {
        assert_eq!(encode_filename(&p(1.0, 1e-7, 0.75, 4), FileKind::BuraTab).unwrap().to_string(), "q001d7a75k4.tab");
        assert_eq!(
            encode_filename(&p(0.0, 0.0, 0.5, 3), FileKind::BuraComplex).unwrap().path(),
            "BURA-dcmp/add/q000d0a50k3.txt"
        );
        assert_eq!(encode_filename(&p(37.0, 1e-3, 0.3, 3), FileKind::BuraTab).unwrap().stem, "q037d3a30k3");
    }

    #[test]
    fn one_ura_pairs() {
        let base = p(0.0, 0.0, 0.25, 3);
        for (q0, q1, code) in
            [(0.0, 200.0, "qq02"), (100.0, 100.0, "qq11"), (0.0, 400.0, "qq04"), (200.0, 200.0, "qq22")]
        {
            let name = encode_filename(&base, FileKind::OneUra { q0, q1 }).unwrap();
            assert_eq!(name.stem, format!("{code}d0a25k3"));
        }
        assert!(encode_filename(&base, FileKind::OneUra { q0: 150.0, q1: 0.0 }).is_err());
    }

    #[test]
    fn unencodable() {
        assert!(encode_filename(&p(0.5, 0.0, 0.25, 3), FileKind::BuraTab).is_err());
        assert!(encode_filename(&p(0.0, 2e-6, 0.25, 3), FileKind::BuraTab).is_err());
        assert!(encode_filename(&p(0.0, 0.0, 0.333, 3), FileKind::BuraTab).is_err());
    }
}
