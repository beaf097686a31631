use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::model::{EquationCaseArgs, NodeKind};
use super::{Ledger, LedgerError, LedgerResult, Node};
use crate::bounds::{
    gl2_max_order, minkowski_bound, pgl2_default_max, pgl2_max_over_cases, rough_bound,
    rough_bound_over, schur_exponent, serre_bound, serre_degree_bound,
};
use crate::cyclotomic::{m2_upper_from_ep, Conductor, CycloInvariants, Tristate};
use crate::diophantine::max_schur_exponent;
use crate::error::{domain, Error, Result};
use crate::exactnum::{FactoredInteger, Prime};

fn exponent_u32(e: u64) -> Result<u32> {
    u32::try_from(e).map_err(|_| domain("exponent overflow"))
}

fn equation_case(args: &EquationCaseArgs) -> Result<FactoredInteger> {
    let p = Prime::new(args.p)?;
    let e = if p.is_two() {
        let ep = args
            .m2_from_e
            .ok_or_else(|| domain("p = 2 case needs m2_from_e"))?;
        let branches: &[bool] = match args.xi4.unwrap_or(Tristate::No) {
            Tristate::Yes => &[true],
            Tristate::No => &[false],
            Tristate::Unknown => &[true, false],
        };
        branches
            .iter()
            .filter_map(|&xi4| {
                let m = m2_upper_from_ep(ep, xi4);
                // m₂ < 2 is impossible, so that branch contributes nothing.
                (m >= 2).then(|| {
                    let inv = CycloInvariants {
                        p: 2,
                        t: if xi4 { 1 } else { 2 },
                        m,
                        e: ep,
                        xi4,
                    };
                    schur_exponent(args.n, &inv)
                })
            })
            .max()
            .unwrap_or(0)
    } else {
        let c = args.constraints.clone().unwrap_or_default();
        max_schur_exponent(p, args.n, args.d, &c)?
    };
    Ok(FactoredInteger::prime_power(p, exponent_u32(e)?))
}

fn leaf_value(kind: &NodeKind) -> Result<FactoredInteger> {
    match kind {
        NodeKind::Minkowski(a) => Ok(minkowski_bound(a.n)),
        NodeKind::SchurRough(a) => match &a.primes {
            None => Ok(rough_bound(a.n, a.d)),
            Some(list) => {
                let primes = list
                    .iter()
                    .map(|&p| Prime::new(p))
                    .collect::<Result<Vec<_>>>()?;
                Ok(rough_bound_over(a.n, a.d, &primes))
            }
        },
        NodeKind::SerreQ(a) => serre_bound(a.n, Conductor::rationals()),
        NodeKind::SerreDeg(a) => serre_degree_bound(a.n, a.d),
        NodeKind::Pgl2(a) => {
            let max = match &a.cases {
                Some(cases) => pgl2_max_over_cases(a.d, cases)?,
                None => pgl2_default_max(a.d)?,
            };
            FactoredInteger::from_u64(max)
        }
        NodeKind::Gl2(a) => gl2_max_order(a.d),
        NodeKind::EquationCase(a) => equation_case(a),
        _ => Err(Error::InternalInconsistency(format!(
            "{} is not a leaf",
            kind.name()
        ))),
    }
}

impl Ledger {
    /// Value of one node. Shared subtrees are computed once per call.
    pub fn eval(&self, id: &str) -> LedgerResult<FactoredInteger> {
        let mut memo = HashMap::new();
        self.eval_memo(id, &mut memo)
    }

    /// Values of every node, keyed by id.
    pub fn eval_all(&self) -> LedgerResult<HashMap<String, FactoredInteger>> {
        let mut memo = HashMap::new();
        for node in &self.nodes {
            self.eval_memo(&node.id, &mut memo)?;
        }
        Ok(memo)
    }

    fn eval_memo(
        &self,
        id: &str,
        memo: &mut HashMap<String, FactoredInteger>,
    ) -> LedgerResult<FactoredInteger> {
        if let Some(v) = memo.get(id) {
            return Ok(v.clone());
        }
        let node = self.node(id)?;
        let compute = |e: Error| LedgerError::Compute {
            id: id.to_string(),
            source: e,
        };
        let mut kids = Vec::with_capacity(node.children.len());
        for c in &node.children {
            kids.push(self.eval_memo(c, memo)?);
        }
        let product = || {
            kids.iter()
                .fold(FactoredInteger::one(), |acc, k| acc.mul(k))
        };
        let value = match &node.kind {
            NodeKind::Constant(_) => node.declared.clone().expect("checked at load"),
            NodeKind::Product(_) => product(),
            NodeKind::Max(_) | NodeKind::AppendixProp(_) => {
                kids.iter().max().cloned().expect("checked at load")
            }
            NodeKind::ScaledProduct(s) => {
                let num = FactoredInteger::from_u64(s.numerator).map_err(compute)?;
                let den = FactoredInteger::from_u64(s.denominator).map_err(compute)?;
                product()
                    .mul(&num)
                    .div_exact(&den)
                    .map_err(|_| LedgerError::ScaleNotExact(id.to_string()))?
            }
            leaf => leaf_value(leaf).map_err(compute)?,
        };
        memo.insert(id.to_string(), value.clone());
        Ok(value)
    }

    pub fn final_bound(&self) -> LedgerResult<FactoredInteger> {
        self.eval(self.root().ok_or(LedgerError::NoRoot)?)
    }

    /// Compares every declared value with its computation.
    pub fn verify(&self) -> LedgerResult<VerificationReport> {
        let values = self.eval_all()?;
        let rows = self
            .nodes
            .iter()
            .filter_map(|node| {
                let declared = node.declared.clone()?;
                let computed = values[&node.id].clone();
                let status = if matches!(node.kind, NodeKind::Constant(_)) {
                    Status::Unchecked
                } else if computed == declared {
                    Status::Match
                } else {
                    Status::Mismatch
                };
                Some(VerificationRow {
                    id: node.id.clone(),
                    status,
                    declared_decimal: declared.to_decimal(false),
                    computed_decimal: computed.to_decimal(false),
                    declared,
                    computed,
                    paper_prints: node.paper_prints.clone(),
                    note: node.note.clone(),
                })
            })
            .collect();
        Ok(VerificationReport { rows })
    }

    /// Indented derivation tree below `id`, children in document order.
    /// A subtree that was already printed is referenced instead of repeated.
    pub fn explain(&self, id: &str) -> LedgerResult<String> {
        let values = {
            let mut memo = HashMap::new();
            self.eval_memo(id, &mut memo)?;
            memo
        };
        let mut out = String::new();
        let mut seen = HashSet::new();
        self.explain_into(id, 0, &values, &mut seen, &mut out)?;
        Ok(out)
    }

    fn explain_into(
        &self,
        id: &str,
        depth: usize,
        values: &HashMap<String, FactoredInteger>,
        seen: &mut HashSet<String>,
        out: &mut String,
    ) -> LedgerResult<()> {
        let node = self.node(id)?;
        let v = &values[id];
        let pad = "  ".repeat(depth);
        let _ = write!(
            out,
            "{pad}{} [{}] {} = {}",
            node.id,
            describe(node),
            v,
            v.to_decimal(true)
        );
        if let Some(d) = &node.declared {
            if d != v {
                let _ = write!(out, " (declared {})", d.to_decimal(true));
            }
        }
        if !seen.insert(id.to_string()) && !node.children.is_empty() {
            out.push_str(" (expanded above)\n");
            return Ok(());
        }
        let _ = writeln!(out, " | {}", node.citation);
        for c in &node.children {
            self.explain_into(c, depth + 1, values, seen, out)?;
        }
        Ok(())
    }
}

fn describe(node: &Node) -> String {
    match &node.kind {
        NodeKind::Minkowski(a) | NodeKind::SerreQ(a) => format!("{} n={}", node.kind.name(), a.n),
        NodeKind::SchurRough(a) => match &a.primes {
            Some(ps) => format!("SchurRough n={} d={} p∈{ps:?}", a.n, a.d),
            None => format!("SchurRough n={} d={}", a.n, a.d),
        },
        NodeKind::SerreDeg(a) | NodeKind::AppendixProp(a) => {
            format!("{} n={} d={}", node.kind.name(), a.n, a.d)
        }
        NodeKind::Pgl2(a) => format!("Pgl2 d={}", a.d),
        NodeKind::Gl2(a) => format!("Gl2 d={}", a.d),
        NodeKind::ScaledProduct(s) => format!("ScaledProduct {}/{}", s.numerator, s.denominator),
        NodeKind::EquationCase(a) => format!("EquationCase p={} n={} d={}", a.p, a.n, a.d),
        k => k.name().to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Match,
    Mismatch,
    Unchecked,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationRow {
    pub id: String,
    pub status: Status,
    pub declared: FactoredInteger,
    pub computed: FactoredInteger,
    pub declared_decimal: String,
    pub computed_decimal: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paper_prints: Option<FactoredInteger>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub rows: Vec<VerificationRow>,
}

impl VerificationReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &VerificationRow> {
        self.rows.iter().filter(|r| r.status == Status::Mismatch)
    }

    /// Mismatches that are not on the whitelist.
    pub fn unexpected<'a>(
        &'a self,
        whitelist: &'a [&str],
    ) -> impl Iterator<Item = &'a VerificationRow> {
        self.mismatches()
            .filter(move |r| !whitelist.contains(&r.id.as_str()))
    }

    pub fn count(&self, status: Status) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }
}
