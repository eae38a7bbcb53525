use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::pwl::PwlFunction;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Subadditive,
    Symmetric,
    Minimal,
    TwoSlopeFacet,
    Valid,
    Structure,
    RecursiveDecomposition,
    Convergence,
    Density,
    NonPiecewiseLinear,
    FacetEvidence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `data = [u, v]`, `lhs = f(u) + f(v)`, `rhs = f(u + v)`.
    SubadditivityPair,
    /// `data = [a, (fpoint - a) mod 1]`, `lhs = f(a) + f(fpoint - a)`, `rhs = 1`.
    SymmetryPoint,
    /// `data` = the distinct slopes, `lhs` = their count, `rhs` = expected count.
    SlopeCount,
    /// `data = [x]`, `lhs = f(x)`, `rhs` = the bound or expected value.
    ValuePoint,
    /// `data = [left, right]` of a piece, `lhs` observed, `rhs` expected.
    PieceMismatch,
    /// `data = [x]`, `lhs` = direct value, `rhs` = value via the recursion.
    DecompositionPoint,
    /// `data = [left, right]` of a segment; `lhs`/`rhs` depend on the check.
    Segment,
    /// Tight additivity relation: `data = [u, v]`, `lhs = f(u) + f(v)`, `rhs = f(u + v)`.
    Additivity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub data: Vec<Rational>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl Witness {
    pub fn subadditivity(f: &PwlFunction, u: Rational, v: Rational) -> Self {
        let lhs = f.eval(&u) + f.eval(&v);
        let rhs = f.eval(&(&u + &v));
        Witness {
            kind: WitnessKind::SubadditivityPair,
            data: vec![u, v],
            lhs,
            rhs,
        }
    }

    /// Recomputes `lhs`/`rhs` on `f` from `data`; `None` when the kind
    /// does not refer to a single function evaluation pattern.
    pub fn recompute(&self, f: &PwlFunction) -> Option<(Rational, Rational)> {
        match self.kind {
            WitnessKind::SubadditivityPair | WitnessKind::Additivity => {
                let (u, v) = (&self.data[0], &self.data[1]);
                Some((f.eval(u) + f.eval(v), f.eval(&(u + v))))
            }
            WitnessKind::SymmetryPoint => {
                let (a, b) = (&self.data[0], &self.data[1]);
                Some((f.eval(a) + f.eval(b), Rational::one()))
            }
            WitnessKind::ValuePoint => Some((f.eval(&self.data[0]), self.rhs.clone())),
            _ => None,
        }
    }

    /// True when recomputation on `f` reproduces both stored sides exactly.
    pub fn reproduces_on(&self, f: &PwlFunction) -> bool {
        match self.recompute(f) {
            Some((l, r)) => l == self.lhs && r == self.rhs,
            None => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub property: Property,
    pub holds: bool,
    pub summary: BTreeMap<String, Rational>,
    /// Exact number of witnesses found; `witnesses` holds at most the cap.
    pub witness_total: u64,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<VerificationReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(property: Property) -> Self {
        VerificationReport {
            property,
            holds: true,
            summary: BTreeMap::new(),
            witness_total: 0,
            witnesses: Vec::new(),
            components: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn stat(&mut self, name: &str, value: impl Into<Rational>) {
        self.summary.insert(name.to_string(), value.into());
    }

    pub fn count(&mut self, name: &str, value: usize) {
        self.stat(name, Rational::from_integer(value as i64));
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.summary.get(name)
    }

    /// Records a failed check with its witness, respecting `cap`.
    pub fn fail(&mut self, witness: Witness, cap: usize) {
        self.holds = false;
        self.witness_total += 1;
        if self.witnesses.len() < cap {
            self.witnesses.push(witness);
        }
    }

    /// Records a witness of a relation that holds (tight relation,
    /// evidence item) without changing the verdict.
    pub fn record(&mut self, witness: Witness, cap: usize) {
        self.witness_total += 1;
        if self.witnesses.len() < cap {
            self.witnesses.push(witness);
        }
    }

    pub fn component(&self, property: Property) -> Option<&VerificationReport> {
        self.components.iter().find(|c| c.property == property)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}
