//! A DAG of bound computations, loaded from JSON and checked against the
//! values it declares.

mod eval;
pub mod model;

use std::collections::HashMap;

use thiserror::Error;

use crate::exactnum::FactoredInteger;
pub use eval::{Status, VerificationReport, VerificationRow};
pub use model::{LedgerDocument, NodeKind, NodeRecord, SCHEMA_VERSION};

/// The ledger shipped with the crate.
pub const PAPER_LEDGER: &str = include_str!("../../data/ledger.json");

/// Nodes whose declared value is known to disagree with the computation.
pub const WHITELIST: [&str; 2] = ["lemma-degree-4-input", "gq-mfs-typo-note"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("cycle through node {0}")]
    Cycle(String),
    #[error("node {node} names missing child {child}")]
    DanglingChild { node: String, child: String },
    #[error("node {id}: bad declared value: {reason}")]
    BadDeclaredValue { id: String, reason: String },
    #[error("node {0}: scaled product is not an integer")]
    ScaleNotExact(String),
    #[error("no node named {0}")]
    UnknownNode(String),
    #[error("ledger has no root")]
    NoRoot,
    #[error("node {id}: {source}")]
    Compute {
        id: String,
        source: crate::error::Error,
    },
}

pub type LedgerResult<T> = std::result::Result<T, LedgerError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub children: Vec<String>,
    pub declared: Option<FactoredInteger>,
    pub citation: String,
    pub paper_prints: Option<FactoredInteger>,
    pub note: Option<String>,
}

/// A validated ledger. Immutable once built.
#[derive(Debug, Clone)]
pub struct Ledger {
    doc: LedgerDocument,
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
}

fn schema(msg: impl Into<String>) -> LedgerError {
    LedgerError::Schema(msg.into())
}

fn parse_value(id: &str, text: &str) -> LedgerResult<FactoredInteger> {
    text.parse()
        .map_err(|e: crate::Error| LedgerError::BadDeclaredValue {
            id: id.to_string(),
            reason: e.to_string(),
        })
}

impl Ledger {
    pub fn shipped() -> Self {
        Self::from_json(PAPER_LEDGER).expect("shipped ledger is valid")
    }

    pub fn from_json(text: &str) -> LedgerResult<Self> {
        let doc: LedgerDocument = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: LedgerDocument) -> LedgerResult<Self> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        let mut index = HashMap::new();
        let mut nodes = Vec::with_capacity(doc.nodes.len());
        for (i, rec) in doc.nodes.iter().enumerate() {
            if index.insert(rec.id.clone(), i).is_some() {
                return Err(schema(format!("duplicate node id {}", rec.id)));
            }
            nodes.push(Self::build_node(rec)?);
        }
        for node in &nodes {
            for child in &node.children {
                if !index.contains_key(child) {
                    return Err(LedgerError::DanglingChild {
                        node: node.id.clone(),
                        child: child.clone(),
                    });
                }
            }
        }
        if let Some(root) = &doc.root {
            if !index.contains_key(root) {
                return Err(schema(format!("root {root} is not a node")));
            }
        }
        let ledger = Ledger { doc, nodes, index };
        ledger.check_acyclic()?;
        Ok(ledger)
    }

    fn build_node(rec: &NodeRecord) -> LedgerResult<Node> {
        let id = rec.id.as_str();
        let kind =
            NodeKind::parse(&rec.kind, &rec.args).map_err(|e| schema(format!("node {id}: {e}")))?;
        let declared = match &rec.declared {
            Some(map) => Some(FactoredInteger::from_string_map(map).map_err(|e| {
                LedgerError::BadDeclaredValue {
                    id: id.to_string(),
                    reason: e.to_string(),
                }
            })?),
            None => None,
        };
        if let Some(dec) = &rec.decimal {
            let Some(value) = &declared else {
                return Err(schema(format!("node {id}: decimal given without declared")));
            };
            if parse_value(id, dec)? != *value {
                return Err(LedgerError::BadDeclaredValue {
                    id: id.to_string(),
                    reason: format!("decimal {dec} disagrees with factorization {value}"),
                });
            }
        }
        let paper_prints = rec
            .paper_prints
            .as_deref()
            .map(|s| parse_value(id, s))
            .transpose()?;
        match &kind {
            NodeKind::Constant(_) if declared.is_none() => {
                return Err(schema(format!("constant {id} needs a declared value")));
            }
            NodeKind::AppendixProp(a) if rec.children.len() as u64 != a.d => {
                return Err(schema(format!(
                    "node {id}: AppendixProp with d = {} needs {} children, has {}",
                    a.d,
                    a.d,
                    rec.children.len()
                )));
            }
            NodeKind::ScaledProduct(s) if s.numerator == 0 || s.denominator == 0 => {
                return Err(schema(format!("node {id}: scale must be positive")));
            }
            k if k.takes_children() && rec.children.is_empty() => {
                return Err(schema(format!("node {id}: {} needs children", k.name())));
            }
            k if !k.takes_children() && !rec.children.is_empty() => {
                return Err(schema(format!("node {id}: {} takes no children", k.name())));
            }
            _ => {}
        }
        Ok(Node {
            id: id.to_string(),
            kind,
            children: rec.children.clone(),
            declared,
            citation: rec.citation.clone(),
            paper_prints,
            note: rec.note.clone(),
        })
    }

    fn check_acyclic(&self) -> LedgerResult<()> {
        // 0 = unseen, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.nodes.len()];
        for start in 0..self.nodes.len() {
            if state[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            state[start] = 1;
            while let Some((i, next)) = stack.pop() {
                if let Some(child) = self.nodes[i].children.get(next) {
                    stack.push((i, next + 1));
                    let j = self.index[child];
                    match state[j] {
                        0 => {
                            state[j] = 1;
                            stack.push((j, 0));
                        }
                        1 => return Err(LedgerError::Cycle(child.clone())),
                        _ => {}
                    }
                } else {
                    state[i] = 2;
                }
            }
        }
        Ok(())
    }

    pub fn document(&self) -> &LedgerDocument {
        &self.doc
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.doc).expect("document serializes")
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> LedgerResult<&Node> {
        self.index
            .get(id)
            .map(|&i| &self.nodes[i])
            .ok_or_else(|| LedgerError::UnknownNode(id.to_string()))
    }

    pub fn root(&self) -> Option<&str> {
        self.doc.root.as_deref()
    }

    /// Replaces a node by a constant. `None` removes it from every parent
    /// `Max`, which models an upper bound of zero.
    pub fn with_override(&self, id: &str, value: Option<&FactoredInteger>) -> LedgerResult<Self> {
        self.node(id)?;
        let mut doc = self.doc.clone();
        match value {
            Some(v) => {
                let rec = doc
                    .nodes
                    .iter_mut()
                    .find(|r| r.id == id)
                    .expect("node exists");
                rec.kind = "Constant".into();
                rec.args = serde_json::json!({});
                rec.children.clear();
                rec.declared = Some(v.to_string_map());
                rec.decimal = None;
                rec.paper_prints = None;
                rec.note = Some("overridden".into());
            }
            None => {
                if doc.root.as_deref() == Some(id) {
                    return Err(schema("cannot prune the root"));
                }
                for rec in &mut doc.nodes {
                    if rec.children.iter().any(|c| c == id) {
                        if rec.kind != "Max" {
                            return Err(schema(format!(
                                "cannot prune {id}: parent {} is a {}",
                                rec.id, rec.kind
                            )));
                        }
                        rec.children.retain(|c| c != id);
                    }
                }
                doc.nodes.retain(|r| r.id != id);
            }
        }
        Self::from_document(doc)
    }
}
