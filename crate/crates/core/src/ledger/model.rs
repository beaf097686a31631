//! On-disk ledger format.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{FieldFlags, Tristate};
use crate::diophantine::SolutionConstraints;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerDocument {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
    #[serde(default)]
    pub nodes: Vec<NodeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: String,
    pub kind: String,
    #[serde(default = "empty_args")]
    pub args: serde_json::Value,
    #[serde(default)]
    pub children: Vec<String>,
    #[serde(default)]
    pub declared: Option<BTreeMap<String, u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decimal: Option<String>,
    pub citation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paper_prints: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn empty_args() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoArgs {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankArgs {
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankDegreeArgs {
    pub n: u64,
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoughArgs {
    pub n: u64,
    pub d: u64,
    #[serde(default)]
    pub primes: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeArgs {
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pgl2Args {
    pub d: u64,
    /// Flag assignments to maximize over; absent means the degree default.
    #[serde(default)]
    pub cases: Option<Vec<FieldFlags>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleArgs {
    pub numerator: u64,
    pub denominator: u64,
}

/// One prime's contribution in a case analysis.
///
/// Odd p maximizes over the standard equation. For p = 2, m₂ is bounded
/// through `m2_from_e` and `xi4`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationCaseArgs {
    pub p: u64,
    pub n: u64,
    pub d: u64,
    #[serde(default)]
    pub constraints: Option<SolutionConstraints>,
    #[serde(default)]
    pub m2_from_e: Option<u64>,
    #[serde(default)]
    pub xi4: Option<Tristate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "args")]
pub enum NodeKind {
    Constant(NoArgs),
    Minkowski(RankArgs),
    SchurRough(RoughArgs),
    SerreQ(RankArgs),
    SerreDeg(RankDegreeArgs),
    Pgl2(Pgl2Args),
    Gl2(DegreeArgs),
    Product(NoArgs),
    Max(NoArgs),
    ScaledProduct(ScaleArgs),
    AppendixProp(RankDegreeArgs),
    EquationCase(EquationCaseArgs),
}

impl NodeKind {
    pub fn parse(kind: &str, args: &serde_json::Value) -> Result<Self, String> {
        let args = if args.is_null() {
            empty_args()
        } else {
            args.clone()
        };
        let tagged = serde_json::json!({ "kind": kind, "args": args });
        serde_json::from_value(tagged).map_err(|e| e.to_string())
    }

    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::Constant(_) => "Constant",
            NodeKind::Minkowski(_) => "Minkowski",
            NodeKind::SchurRough(_) => "SchurRough",
            NodeKind::SerreQ(_) => "SerreQ",
            NodeKind::SerreDeg(_) => "SerreDeg",
            NodeKind::Pgl2(_) => "Pgl2",
            NodeKind::Gl2(_) => "Gl2",
            NodeKind::Product(_) => "Product",
            NodeKind::Max(_) => "Max",
            NodeKind::ScaledProduct(_) => "ScaledProduct",
            NodeKind::AppendixProp(_) => "AppendixProp",
            NodeKind::EquationCase(_) => "EquationCase",
        }
    }

    /// Whether the node combines children rather than computing a leaf.
    pub fn takes_children(&self) -> bool {
        matches!(
            self,
            NodeKind::Product(_)
                | NodeKind::Max(_)
                | NodeKind::ScaledProduct(_)
                | NodeKind::AppendixProp(_)
        )
    }
}
