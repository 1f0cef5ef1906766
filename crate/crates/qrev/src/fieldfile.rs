//! Binary field files.
//!
//! Layout, all little-endian: the magic `QRF1`, `u32` dimension, one `u32`
//! mode count per axis, then the `f64` coefficients in eigenvalue order. A
//! JSON sidecar `<file>.hdr` names the basis so the file can be read back.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use qrev_core::{Basis, BasisSpec, DomainKind, SpectralField};

use crate::error::CliError;

pub const MAGIC: &[u8; 4] = b"QRF1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub format: String,
    pub domain: String,
    pub lengths: Vec<f64>,
    pub modes_per_axis: usize,
    pub quadrature_points: usize,
    pub coefficients: usize,
    pub ordering: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl FieldHeader {
    pub fn for_basis(basis: &Basis) -> Self {
        let spec = basis.spec();
        FieldHeader {
            format: "QRF1".into(),
            domain: spec.kind.name().into(),
            lengths: spec.lengths.clone(),
            modes_per_axis: spec.modes_per_axis,
            quadrature_points: spec.quadrature_points,
            coefficients: basis.len(),
            ordering: "eigenvalue".into(),
            t: None,
            eps: None,
            seed: None,
        }
    }

    pub fn basis(&self, path: &Path) -> Result<Arc<Basis>, CliError> {
        let kind = DomainKind::from_name(&self.domain)
            .ok_or_else(|| CliError::format(path, format!("unknown domain `{}`", self.domain)))?;
        let spec = BasisSpec::new(kind, self.lengths.clone(), self.modes_per_axis)
            .with_quadrature(self.quadrature_points);
        Ok(Basis::build(spec)?)
    }
}

pub fn header_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".hdr");
    PathBuf::from(s)
}

pub fn encode(field: &SpectralField) -> Vec<u8> {
    let spec = field.basis().spec();
    let dim = spec.dim();
    let mut out = Vec::with_capacity(8 + 4 * dim + 8 * field.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    for _ in 0..dim {
        out.extend_from_slice(&(spec.modes_per_axis as u32).to_le_bytes());
    }
    for c in field.coeffs() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

/// Parse the binary part against a known basis.
pub fn decode(bytes: &[u8], basis: &Arc<Basis>, path: &Path) -> Result<SpectralField, CliError> {
    let bad = |r: &str| CliError::format(path, r);
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(bad("missing QRF1 magic"));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let dim = word(4) as usize;
    if dim != basis.dim() {
        return Err(bad(&format!(
            "dimension {dim}, header says {}",
            basis.dim()
        )));
    }
    let start = 8 + 4 * dim;
    if bytes.len() < start {
        return Err(bad("truncated mode counts"));
    }
    for axis in 0..dim {
        let m = word(8 + 4 * axis) as usize;
        if m != basis.spec().modes_per_axis {
            return Err(bad(&format!(
                "axis {axis} has {m} modes, header says {}",
                basis.spec().modes_per_axis
            )));
        }
    }
    let body = &bytes[start..];
    if body.len() != 8 * basis.len() {
        return Err(bad(&format!(
            "expected {} coefficients, found {} bytes",
            basis.len(),
            body.len()
        )));
    }
    let coeffs = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    SpectralField::from_coeffs(basis, coeffs).map_err(|e| bad(&e.to_string()))
}

pub fn write(path: &Path, field: &SpectralField, header: &FieldHeader) -> Result<(), CliError> {
    fs::write(path, encode(field)).map_err(|e| CliError::io(path, e))?;
    let hdr = header_path(path);
    let mut text = serde_json::to_string_pretty(header).expect("header serializes");
    text.push('\n');
    fs::write(&hdr, text).map_err(|e| CliError::io(&hdr, e))
}

pub fn read(path: &Path) -> Result<(SpectralField, FieldHeader), CliError> {
    let hdr = header_path(path);
    let text = fs::read_to_string(&hdr).map_err(|e| CliError::io(&hdr, e))?;
    let header: FieldHeader = serde_json::from_str(&text)
        .map_err(|e| CliError::format(&hdr, format!("line {}: {e}", e.line())))?;
    let basis = header.basis(path)?;
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok((decode(&bytes, &basis, path)?, header))
}
