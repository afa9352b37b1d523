//! Mesh files: a JSON object `{"family", "params", "nodes"}` or CSV `i,x,h`.
//! Floats are written with 17 significant digits.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{Mesh1D, MeshSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshFile {
    pub family: String,
    #[serde(default)]
    pub params: serde_json::Value,
    pub nodes: Mesh1D,
}

impl MeshFile {
    pub fn new(spec: &MeshSpec, mesh: Mesh1D) -> Self {
        let params = serde_json::to_value(spec).unwrap_or(serde_json::Value::Null);
        Self { family: spec.label(), params, nodes: mesh }
    }

    /// Mesh spec recorded in `params`, when it parses as one.
    pub fn spec(&self) -> Option<MeshSpec> {
        serde_json::from_value(self.params.clone()).ok()
    }
}

/// Formats a float with 17 significant digits; non-finite values become `null`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

/// JSON formatter that writes every float with 17 significant digits.
#[derive(Debug, Default, Clone, Copy)]
pub struct Sig17Formatter;

impl serde_json::ser::Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as compact JSON with 17-digit floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17Formatter);
    value.serialize(&mut ser).map_err(|e| Error::Config(format!("JSON encoding failed: {e}")))?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn mesh_to_json(spec: &MeshSpec, mesh: &Mesh1D) -> Result<String> {
    to_json(&MeshFile::new(spec, mesh.clone()))
}

pub fn mesh_from_json(text: &str) -> Result<MeshFile> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("bad mesh JSON: {e}")))
}

/// `i,x,h` rows; `h` is empty on the first row.
pub fn mesh_to_csv(mesh: &Mesh1D) -> String {
    let mut out = String::from("i,x,h\n");
    for (i, x) in mesh.nodes().iter().enumerate() {
        let h = if i == 0 { String::new() } else { fmt_f64(mesh.step(i)) };
        out.push_str(&format!("{i},{},{h}\n", fmt_f64(*x)));
    }
    out
}

pub fn mesh_from_csv(text: &str) -> Result<Mesh1D> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == "i,x,h" => {}
        other => return Err(Error::Config(format!("expected CSV header `i,x,h`, got {other:?}"))),
    }
    let nodes = lines
        .enumerate()
        .map(|(row, line)| {
            line.split(',')
                .nth(1)
                .and_then(|x| x.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Config(format!("bad mesh CSV row {}: `{line}`", row + 1)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Mesh1D::new(nodes)
}

/// Reads JSON or CSV, deciding by the first non-blank character.
pub fn mesh_from_str(text: &str) -> Result<Mesh1D> {
    if text.trim_start().starts_with('{') {
        Ok(mesh_from_json(text)?.nodes)
    } else {
        mesh_from_csv(text)
    }
}
