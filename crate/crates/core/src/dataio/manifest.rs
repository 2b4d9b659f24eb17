use std::collections::hash_map::{Entry, HashMap};
use std::sync::OnceLock;

use crate::remez::TargetParams;
use crate::xnum::{ExtReal, Precision};

use super::{alpha_code, delta_code, q_code, DataError};

const MANIFEST: &str = include_str!("../../data/reference_manifest.txt");

/// One tabulated number.
#[derive(Debug, Clone, PartialEq)]
pub struct RefValue {
    /// Row `j` of the table (position in the extreme set, pole or
    /// coefficient index).
    pub index: usize,
    /// The value as printed; `---` for a missing entry.
    pub text: String,
    /// Significant digits; 0 for a missing entry.
    pub sig: u32,
}

impl RefValue {
    pub fn is_missing(&self) -> bool {
        self.sig == 0
    }

    pub fn to_f64(&self) -> Option<f64> {
        if self.is_missing() {
            None
        } else {
            self.text.parse().ok()
        }
    }

    pub fn to_ext(&self, prec: Precision) -> Option<ExtReal> {
        if self.is_missing() {
            None
        } else {
            ExtReal::parse(&self.text, prec).ok()
        }
    }

    /// `|computed - ref| <= 0.5 * 10^(1 - sig) * |ref|`.
    pub fn matches(&self, computed: &ExtReal) -> bool {
        self.matches_digits(computed, self.sig)
    }

    /// Same test with a caller-chosen digit count.
    pub fn matches_digits(&self, computed: &ExtReal, sig: u32) -> bool {
        let Some(r) = self.to_ext(computed.precision()) else {
            return false;
        };
        let tol = r.abs() * ExtReal::exp10(1 - sig as i32, computed.precision()) * 0.5;
        (computed - &r).abs() <= tol
    }
}

/// All values of one table column for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct RefDatum {
    pub table_id: String,
    /// File-name stem of the parameter set, e.g. `q000d0a25k3`.
    pub stem: String,
    /// Caption line of the table the values come from.
    pub source: String,
    pub values: Vec<RefValue>,
}

impl RefDatum {
    pub fn get(&self, index: usize) -> Option<&RefValue> {
        self.values.iter().find(|v| v.index == index)
    }

    pub fn is_missing(&self) -> bool {
        self.values.iter().all(RefValue::is_missing)
    }
}

fn manifest() -> &'static [RefDatum] {
    static DATA: OnceLock<Vec<RefDatum>> = OnceLock::new();
    DATA.get_or_init(|| parse_manifest(MANIFEST).expect("bundled manifest is well formed"))
}

/// Parses `table_id|qQQQ|dD|aAA|kK|index|value|sig` lines, grouping the
/// lines of one table and parameter set. A `#` line sets the source caption
/// for the lines that follow.
pub fn parse_manifest(text: &str) -> Result<Vec<RefDatum>, DataError> {
    let mut out: Vec<RefDatum> = Vec::new();
    let mut slot: HashMap<(String, String), usize> = HashMap::new();
    let mut source = String::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            source = c.trim().to_string();
            continue;
        }
        let bad = || DataError::MalformedManifest { line: no + 1 };
        let f: Vec<&str> = line.split('|').collect();
        if f.len() != 8 {
            return Err(bad());
        }
        let stem = format!("{}{}{}{}", f[1], f[2], f[3], f[4]);
        let value = RefValue {
            index: f[5].parse().map_err(|_| bad())?,
            text: f[6].to_string(),
            sig: f[7].parse().map_err(|_| bad())?,
        };
        match slot.entry((f[0].to_string(), stem.clone())) {
            Entry::Occupied(e) => out[*e.get()].values.push(value),
            Entry::Vacant(e) => {
                e.insert(out.len());
                out.push(RefDatum { table_id: f[0].to_string(), stem, source: source.clone(), values: vec![value] });
            }
        }
    }
    Ok(out)
}

/// Looks up a datum by table id and file-name stem (`q000d0a25k3`,
/// `qq22d0a50k3`).
pub fn reference_lookup_stem(table_id: &str, stem: &str) -> Result<&'static RefDatum, DataError> {
    manifest()
        .iter()
        .find(|d| d.table_id == table_id && d.stem == stem)
        .ok_or_else(|| DataError::NotInManifest { table_id: table_id.to_string(), stem: stem.to_string() })
}

pub fn reference_lookup(table_id: &str, params: &TargetParams) -> Result<&'static RefDatum, DataError> {
    let stem = param_stem(params)?;
    reference_lookup_stem(table_id, &stem)
}

pub(super) fn param_stem(params: &TargetParams) -> Result<String, DataError> {
    Ok(format!(
        "q{}d{}a{}k{}",
        q_code(params.q.to_f64())?,
        delta_code(params.delta.to_f64())?,
        alpha_code(params.alpha.to_f64())?,
        params.k
    ))
}

/// Every datum of one table.
pub fn reference_table(table_id: &str) -> Vec<&'static RefDatum> {
    manifest().iter().filter(|d| d.table_id == table_id).collect()
}

/// Stems of the error-table cells without a value.
pub fn failed_cases() -> Vec<&'static str> {
    reference_table("error_table").into_iter().filter(|d| d.is_missing()).map(|d| d.stem.as_str()).collect()
}

/// Reads a stem such as `q100d8a25k6` back into `(q, delta, alpha, k)`.
pub fn decode_stem(stem: &str) -> Option<(f64, f64, f64, usize)> {
    let rest = stem.strip_prefix('q')?;
    let (q, rest) = rest.split_once('d')?;
    let (d, rest) = rest.split_once('a')?;
    let (a, k) = rest.split_once('k')?;
    let d: i32 = d.parse().ok()?;
    let delta = if d == 0 { 0.0 } else { 10f64.powi(-d) };
    Some((q.parse().ok()?, delta, a.parse::<f64>().ok()? / 100.0, k.parse().ok()?))
}
