use crate::rational::PartialFractions;
use crate::xnum::{ExtReal, Precision};

use super::DataError;

/// Significant digits written per value: one before the point, 25 after.
pub const TAB_DIGITS: usize = 26;

/// One `U0(j)` or `E(j)` line; `im` is present in the complex `.txt` form.
#[derive(Debug, Clone, PartialEq)]
pub struct TabEntry {
    pub index: usize,
    pub re: ExtReal,
    pub im: Option<ExtReal>,
}

/// Contents of a coefficient file
/// `r(x) = sum_{j=0}^{m-k} C(j) x^j + sum_{j=1}^{k} E(j) / (x - U0(j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabFile {
    pub c_block: Vec<(usize, ExtReal)>,
    pub u0_block: Vec<TabEntry>,
    pub e_block: Vec<TabEntry>,
}

impl TabFile {
    /// `C(0) = c0`, `U0(j) = d_j`, `E(j) = c_j` in the order of `pf`.
    pub fn from_partial_fractions(pf: &PartialFractions) -> Self {
        let entry = |(i, v): (usize, &ExtReal)| TabEntry { index: i + 1, re: v.clone(), im: None };
        TabFile {
            c_block: vec![(0, pf.c0.clone())],
            u0_block: pf.terms.iter().map(|(_, d)| d).enumerate().map(entry).collect(),
            e_block: pf.terms.iter().map(|(c, _)| c).enumerate().map(entry).collect(),
        }
    }

    /// Real parts as partial fractions. Only `C(0)` of the polynomial part
    /// is used, which is all a type `(k, k)` function has.
    pub fn to_partial_fractions(&self) -> PartialFractions {
        let c0 = self.c_block.first().map(|(_, v)| v.clone()).unwrap_or_else(|| {
            let prec = self.u0_block.first().map(|e| e.re.precision()).unwrap_or_default();
            ExtReal::zero(prec)
        });
        let terms = self.e_block.iter().zip(&self.u0_block).map(|(e, u)| (e.re.clone(), u.re.clone())).collect();
        PartialFractions::new(c0, terms)
    }

    pub fn k(&self) -> usize {
        self.u0_block.len()
    }

    pub fn has_imaginary_parts(&self) -> bool {
        self.u0_block.iter().chain(&self.e_block).any(|e| e.im.is_some())
    }
}

fn signed(v: &ExtReal) -> String {
    let s = v.to_sci_string(TAB_DIGITS);
    match s.strip_prefix('-') {
        Some(_) => s,
        None => format!(" {s}"),
    }
}

/// Real form: `Re{U0(j)}` and `Re{E(j)}` headers, one value per line,
/// commas after every value and a period after the last one.
pub fn emit_tab(tab: &TabFile) -> String {
    let k = tab.k();
    let mut lines = Vec::new();
    lines.push(format!("{:>5} C(j), j=0,M-K ", tab.c_block.len().saturating_sub(1)));
    for (j, v) in &tab.c_block {
        lines.push(format!("{j:>5}, {},", signed(v)));
    }
    lines.push(format!("{k:>5} Re{{U0(j)}}, j=1,K "));
    for e in &tab.u0_block {
        lines.push(format!("{:>5}, {},", e.index, signed(&e.re)));
    }
    lines.push(format!("{k:>5} Re{{E(j)}}, j=1,K "));
    for e in &tab.e_block {
        lines.push(format!("{:>5}, {},", e.index, signed(&e.re)));
    }
    let mut text = lines.join("\n");
    if text.ends_with(',') {
        text.pop();
        text.push('.');
    }
    text.push('\n');
    text
}

/// Complex form: real and imaginary part per line, missing imaginary parts
/// written as zero.
pub fn emit_txt(tab: &TabFile) -> String {
    let k = tab.k();
    let mut out = String::new();
    let pair = |e: &TabEntry| {
        let im = e.im.clone().unwrap_or_else(|| ExtReal::zero(e.re.precision()));
        format!("{:>5}, {}, {}\n", e.index, signed(&e.re), signed(&im))
    };
    out.push_str(&format!("{:>5} C(j), j=0,M-K \n", tab.c_block.len().saturating_sub(1)));
    for (j, v) in &tab.c_block {
        out.push_str(&format!("{j:>5}, {},\n", signed(v)));
    }
    out.push_str(&format!("{k:>5} U0(j), j=1,K \n"));
    tab.u0_block.iter().for_each(|e| out.push_str(&pair(e)));
    out.push_str(&format!("{k:>5} E(j), j=1,K \n"));
    tab.e_block.iter().for_each(|e| out.push_str(&pair(e)));
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Block {
    C,
    U0,
    E,
}

fn header(line: &str) -> Option<(Block, usize)> {
    let block = if line.contains("C(j)") {
        Block::C
    } else if line.contains("U0(j)") {
        Block::U0
    } else if line.contains("E(j)") {
        Block::E
    } else {
        return None;
    };
    let count = line.split_whitespace().next()?.parse().ok()?;
    Some((block, count))
}

/// Parses both the real `.tab` and the complex `.txt` form. Lines made of
/// dots only are skipped; exponents may be written `E+0000` or `E0`.
pub fn parse_tab(text: &str, prec: Precision) -> Result<TabFile, DataError> {
    let bad = |line: usize, reason: &str| DataError::MalformedBlock { line, reason: reason.to_string() };
    let mut tab = TabFile { c_block: Vec::new(), u0_block: Vec::new(), e_block: Vec::new() };
    let mut current: Option<(Block, usize, usize)> = None;
    let mut seen = Vec::new();
    let mut last = 0;
    for (no, raw) in text.lines().enumerate() {
        let no = no + 1;
        last = no;
        let line = raw.trim();
        if line.is_empty() || line.chars().all(|c| c == '.') {
            continue;
        }
        if let Some((block, count)) = header(line) {
            if seen.contains(&block) {
                return Err(bad(no, "repeated block"));
            }
            if let Some((_, want, got)) = current {
                if want != got {
                    return Err(bad(no, "block ended early"));
                }
            }
            seen.push(block);
            let want = if block == Block::C { count + 1 } else { count };
            current = Some((block, want, 0));
            continue;
        }
        let Some((block, want, got)) = current.as_mut() else {
            return Err(bad(no, "value before any block header"));
        };
        if *got == *want {
            return Err(bad(no, "more values than the block header announces"));
        }
        let body = line.strip_suffix(['.', ',']).unwrap_or(line);
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(bad(no, "expected index and one or two values"));
        }
        let index: usize = fields[0].parse().map_err(|_| bad(no, "index is not an integer"))?;
        let value = |s: &str| ExtReal::parse(s, prec).map_err(|_| bad(no, "unreadable number"));
        let re = value(fields[1])?;
        let im = fields.get(2).map(|s| value(s)).transpose()?;
        let expected = if *block == Block::C { *got } else { *got + 1 };
        if index != expected {
            return Err(bad(no, "indices out of order"));
        }
        match block {
            Block::C => {
                if im.is_some() {
                    return Err(bad(no, "imaginary part in the C block"));
                }
                tab.c_block.push((index, re));
            }
            Block::U0 => tab.u0_block.push(TabEntry { index, re, im }),
            Block::E => tab.e_block.push(TabEntry { index, re, im }),
        }
        *got += 1;
    }
    if let Some((_, want, got)) = current {
        if want != got {
            return Err(bad(last + 1, "block ended early"));
        }
    }
    for block in [Block::C, Block::U0, Block::E] {
        if !seen.contains(&block) {
            return Err(bad(last + 1, "missing block"));
        }
    }
    if tab.u0_block.len() != tab.e_block.len() {
        return Err(bad(last + 1, "U0 and E blocks differ in length"));
    }
    Ok(tab)
}
