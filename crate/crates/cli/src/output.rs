use std::fs;
use std::path::Path;

use bura::dataio::{emit_tab, DataFileName, TabEntry, TabFile, TAB_DIGITS};
use bura::xnum::ExtReal;
use serde::Serialize;

use crate::CliError;

pub fn sci(v: &ExtReal) -> String {
    v.to_sci_string(TAB_DIGITS)
}

/// Field-for-field copy of a [`TabFile`].
#[derive(Serialize)]
pub struct TabJson {
    pub c: Vec<(usize, String)>,
    pub u0: Vec<(usize, String, Option<String>)>,
    pub e: Vec<(usize, String, Option<String>)>,
}

impl From<&TabFile> for TabJson {
    fn from(t: &TabFile) -> Self {
        let entry = |e: &TabEntry| (e.index, sci(&e.re), e.im.as_ref().map(sci));
        TabJson {
            c: t.c_block.iter().map(|(j, v)| (*j, sci(v))).collect(),
            u0: t.u0_block.iter().map(entry).collect(),
            e: t.e_block.iter().map(entry).collect(),
        }
    }
}

pub fn json_line<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("plain data serializes"));
}

/// Writes `tab` under `dir/name` and returns the path written.
pub fn write_tab(dir: &Path, name: &DataFileName, tab: &TabFile) -> Result<String, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name.to_string());
    fs::write(&path, emit_tab(tab))?;
    Ok(path.display().to_string())
}

pub fn print_tab_summary(tab: &TabFile) {
    println!("c0   = {}", sci(&tab.c_block[0].1));
    for (u, e) in tab.u0_block.iter().zip(&tab.e_block) {
        println!("d{:<3} = {}   c{:<3} = {}", u.index, sci(&u.re), e.index, sci(&e.re));
    }
}
