//! The GeometrySpec input document.
//!
//! Expressions are strings in the symcore grammar. Tables are nested arrays in
//! row-major order; each field documents its index order.

use std::collections::BTreeMap;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::InputError;

pub const SPEC_VERSION: u32 = 1;

/// Rows of expressions: `[row][column]`.
pub type Table = Vec<Vec<String>>;
/// Three-index table: `[first][second][third]`.
pub type Table3 = Vec<Vec<Vec<String>>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    /// Must be 1.
    pub spec_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Default seed; `--seed` overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub chart: ChartSpec,
    /// Algebroid given by its tables. Referenced as `algebroid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebroid: Option<AlgebroidSpec>,
    /// Model algebra of an action algebroid; requires `action_fields`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie_algebra: Option<LieAlgebraSpec>,
    /// Fundamental vector fields `[a][i]`, one per basis element. Referenced as `action`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_fields: Option<Table>,
    /// Poisson bivector `[i][j]`. Its cotangent algebroid is referenced as `poisson`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poisson: Option<Table>,
    /// Riemannian metric `[i][j]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Table>,
    /// Skew endomorphism fields `[k][s][l]` spanning the isotropy; requires `metric`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_frame: Option<Table3>,
    /// Vector fields `[k][i]` expected to be Killing; requires `metric`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub killing_fields: Option<Table>,
    /// Involutive frame `[a][i]` of a regular foliation. Referenced as `foliation`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub foliation_frame: Option<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<ParallelismSpec>,
    /// Connections by name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub connections: BTreeMap<String, ConnectionSpec>,
    /// Pipelines run by `check` when `--pipeline` is not given.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub run: Vec<Pipeline>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub coords: Vec<String>,
    /// Closed sample interval `[lo, hi]` per coordinate, as exact rationals (`"1/2"`, `"-1"`, `"0.25"`).
    pub bounds: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidSpec {
    /// `[i][a]`: component `i` of the anchor of `e_a`.
    pub anchor: Table,
    /// `[a][b][c]`: component `c` of `[e_a, e_b]`.
    pub structure: Table3,
}

/// Exactly one of `named` and `structure`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct LieAlgebraSpec {
    /// `so3`, `aff1`, `sl2` or `abelian` (dimension taken from context).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub named: Option<String>,
    /// `[a][b][c]`: component `c` of `[e_a, e_b]`, rational constants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<Table3>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ParallelismSpec {
    pub model: LieAlgebraSpec,
    /// `[a][i]`: component `i` of the `a`-th coframe form.
    pub omega: Table,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    /// One of `algebroid`, `action`, `poisson`, `foliation`, `tangent`.
    pub on: String,
    /// `[i][a][b]`: `nabla_{d_i} e_a = gamma[i][a][b] e_b`.
    pub gamma: Table3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Cartan,
    TheoremA,
    Transitive,
    Riemann,
    Poisson,
    Geometry,
}

impl Pipeline {
    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::Cartan => "cartan",
            Pipeline::TheoremA => "theorem-a",
            Pipeline::Transitive => "transitive",
            Pipeline::Riemann => "riemann",
            Pipeline::Poisson => "poisson",
            Pipeline::Geometry => "geometry",
        }
    }
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Parse a document, reporting schema violations with JSON-pointer paths.
pub fn parse_document(text: &str) -> Result<GeometrySpec, InputError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: GeometrySpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let p = pointer(e.path());
        let msg = e.inner().to_string();
        // serde_json appends its own " at line L column C"; keep it, it is useful
        InputError::new(if p.is_empty() { "/".to_string() } else { p }, msg)
    })?;
    if spec.spec_version != SPEC_VERSION {
        return Err(InputError::new("/spec_version", format!("unsupported version {}, expected {}", spec.spec_version, SPEC_VERSION)));
    }
    Ok(spec)
}

pub fn to_json(spec: &GeometrySpec) -> String {
    serde_json::to_string_pretty(spec).expect("document serializes")
}

/// JSON schema of the document format.
pub fn schema() -> String {
    let schema = schemars::schema_for!(GeometrySpec);
    serde_json::to_string_pretty(&schema).expect("schema serializes") + "\n"
}
