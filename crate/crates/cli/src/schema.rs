//! JSON document layout. Product inputs are listed in written order `a_k, ..., a_1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseDoc>,
    pub category: CategoryDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deformation: Option<DeformationDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub twisted: Vec<TwistedDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub uncurving: Vec<ObjectVectorDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseDoc {
    pub vars: usize,
    pub truncation: u32,
    #[serde(default)]
    pub relations: Vec<Vec<u32>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradingDoc {
    #[default]
    Z,
    Z2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    #[serde(default)]
    pub grading: GradingDoc,
    pub objects: Vec<String>,
    pub homs: Vec<HomDoc>,
    /// Object name to the basis name of its identity.
    #[serde(default)]
    pub identities: BTreeMap<String, String>,
    pub products: Vec<ProductDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity_bound: Option<usize>,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDoc {
    pub source: String,
    pub target: String,
    pub basis: Vec<BasisDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDoc {
    pub name: String,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductDoc {
    pub arity: usize,
    pub inputs: Vec<String>,
    pub output: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coeff: CoeffDoc,
    pub name: String,
}

/// A rational such as `"3/2"`, or a polynomial in the base variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffDoc {
    Rational(String),
    Polynomial(Vec<MonomialDoc>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialDoc {
    pub coeff: String,
    pub exponents: Vec<u32>,
}

/// Added to the category's products; `curvature` holds `μ⁰`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationDoc {
    #[serde(default)]
    pub products_q: Vec<ProductDoc>,
    #[serde(default)]
    pub curvature: Vec<ObjectVectorDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity_bound: Option<usize>,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectVectorDoc {
    pub object: String,
    pub output: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistedDoc {
    pub name: String,
    pub summands: Vec<SummandDoc>,
    #[serde(default)]
    pub delta: Vec<EntryDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummandDoc {
    pub object: String,
    pub shift: i64,
}

/// Matrix entry from summand `from` to summand `to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub from: usize,
    pub to: usize,
    pub output: Vec<TermDoc>,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}
