//! Job file schema. Every payload rejects unknown keys.

use std::collections::BTreeMap;

use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub command: Option<String>,
    #[serde(default = "default_field")]
    pub field: String,
    #[serde(default)]
    pub vars: Vec<String>,
}

fn default_field() -> String {
    "Q".into()
}

pub const HEADER_KEYS: &[&str] = &["command", "field", "vars"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModifyJob {
    pub relation: Option<String>,
    pub f: String,
    pub center: Vec<String>,
    #[serde(default)]
    pub certification: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrictTransformJob {
    pub g: String,
    /// Variables of the source of the blowdown.
    pub target_vars: Vec<String>,
    /// Image of each job variable, written in `target_vars`.
    pub images: Vec<String>,
    pub exceptional: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftJob {
    pub relation: Option<String>,
    pub f: Option<String>,
    #[serde(default)]
    pub center: Vec<String>,
    pub derivation: Option<Vec<String>>,
    /// `μ = (x, γ₁y + x·g₁, γ₂z + x·g₂)` to lift through `(x, y, xz)`.
    pub automorphism: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowJob {
    pub derivation: Vec<String>,
    pub time: Option<String>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitivityJob {
    pub p: String,
    pub sources: Vec<Vec<String>>,
    pub targets: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectifyJob {
    /// `n1` (default), `pair` or `smoothness`.
    pub mode: Option<String>,
    pub p: Option<String>,
    pub f: Option<String>,
    pub g: String,
    pub f1: Option<String>,
    pub n: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountJob {
    #[serde(default)]
    pub equations: Vec<String>,
    /// Count `u·v = p` instead and compare with the fibration formula.
    pub p: Option<String>,
    pub q: Option<u32>,
    pub witness_budget: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryJob {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, i64>,
    #[serde(default)]
    pub polys: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyJob {
    /// `transitivity` or `rectify`.
    pub kind: String,
    pub p: String,
    pub g: Option<String>,
    #[serde(default)]
    pub sources: Vec<Vec<String>>,
    #[serde(default)]
    pub targets: Vec<Vec<String>>,
    pub word: Option<String>,
    /// Read the word from this file, relative to the job file.
    pub word_file: Option<String>,
}
