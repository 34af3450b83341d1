//! Finite abstraction algebras, valuations and evaluation.
//!
//! Only standard models are represented: the valuation space is always the
//! space of all valuations into the algebra.

mod check;
mod eval;

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::terms::{Name, Signature, VarKey};

pub use check::{
    check_model, check_rule_valid, degenerate_model, enumerate_operations,
    standard_two_element_model, ModelReport, RuleStatus, Validity, DEFAULT_CAP,
};
pub use eval::{eval_template, eval_term, rule_true, subst_valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("carrier must not be empty")]
    EmptyCarrier,
    #[error("carrier element `{0}` is listed twice")]
    DuplicateElement(Name),
    #[error("element index {0} is outside the carrier")]
    ElementOutOfRange(u32),
    #[error("no interpretation for abstraction `{0}`")]
    InterpMissing(Name),
    #[error("interpretation of `{name}` does not fit its shape: {reason}")]
    InterpShape { name: Name, reason: String },
    #[error("interpretation given for `{0}`, which is not in the signature")]
    UnknownAbstraction(Name),
    #[error("variable `{0}` is updated twice")]
    DuplicateName(Name),
    #[error("table for {key} has arity {found}")]
    TableArity { key: VarKey, found: usize },
    #[error("operation table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("enumeration of {count} assignments exceeds the cap of {cap}")]
    EnumerationTooLarge { count: String, cap: u64 },
    #[error("model signature does not contain the logic's signature")]
    SignatureMismatch,
    #[error("term uses abstraction `{0}` unknown to the model")]
    UnknownInTerm(Name),
}

/// Element of a finite carrier, by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

/// A total `k`-ary operation on a carrier of size `c`, stored as its `c^k`
/// results with the first argument most significant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpTable {
    arity: usize,
    carrier: usize,
    entries: Vec<u32>,
}

impl OpTable {
    pub fn new(
        carrier: usize,
        arity: usize,
        entries: Vec<Elem>,
    ) -> Result<OpTable, SemanticsError> {
        let expected = carrier.pow(arity as u32);
        if entries.len() != expected {
            return Err(SemanticsError::TableSize {
                expected,
                found: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|e| e.0 as usize >= carrier) {
            return Err(SemanticsError::ElementOutOfRange(bad.0));
        }
        Ok(OpTable {
            arity,
            carrier,
            entries: entries.into_iter().map(|e| e.0).collect(),
        })
    }

    pub fn constant(carrier: usize, arity: usize, value: Elem) -> OpTable {
        OpTable {
            arity,
            carrier,
            entries: vec![value.0; carrier.pow(arity as u32)],
        }
    }

    /// The `index`-th table in enumeration order.
    pub(crate) fn nth(carrier: usize, arity: usize, mut index: u64) -> OpTable {
        let len = carrier.pow(arity as u32);
        let mut entries = vec![0u32; len];
        for slot in entries.iter_mut().rev() {
            *slot = (index % carrier as u64) as u32;
            index /= carrier as u64;
        }
        OpTable {
            arity,
            carrier,
            entries,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn entries(&self) -> impl ExactSizeIterator<Item = Elem> + '_ {
        self.entries.iter().map(|&e| Elem(e))
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.entries
    }

    pub fn apply(&self, args: &[Elem]) -> Elem {
        assert_eq!(args.len(), self.arity, "operation applied at wrong arity");
        let idx = args
            .iter()
            .fold(0usize, |acc, a| acc * self.carrier + a.0 as usize);
        Elem(self.entries[idx])
    }

    pub fn is_constant(&self, value: Elem) -> bool {
        self.entries.iter().all(|&e| e == value.0)
    }

    /// Argument tuple for row `row`, first argument most significant.
    pub fn row_args(&self, row: usize) -> Vec<Elem> {
        let mut out = vec![Elem(0); self.arity];
        let mut r = row;
        for slot in out.iter_mut().rev() {
            *slot = Elem((r % self.carrier) as u32);
            r /= self.carrier;
        }
        out
    }
}

/// How an abstraction is interpreted as an operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorInterp {
    /// Ignores its arguments.
    Constant(Elem),
    /// An operation lifted to an operator whose arguments are all values.
    Pointwise(OpTable),
    /// Returns `truth` iff its single argument is constantly `truth`.
    ForallLike { truth: Elem, falsity: Elem },
    /// Listed results keyed by the concatenated entries of the argument
    /// tables; anything unlisted maps to `default`.
    Explicit {
        rows: BTreeMap<Vec<u32>, Elem>,
        default: Elem,
    },
}

impl OperatorInterp {
    fn check(&self, name: &Name, op_shape: &[usize], carrier: usize) -> Result<(), SemanticsError> {
        let bad = |reason: String| SemanticsError::InterpShape {
            name: name.clone(),
            reason,
        };
        let in_range = |e: Elem| {
            if (e.0 as usize) < carrier {
                Ok(())
            } else {
                Err(SemanticsError::ElementOutOfRange(e.0))
            }
        };
        match self {
            OperatorInterp::Constant(e) => in_range(*e),
            OperatorInterp::Pointwise(table) => {
                if op_shape.iter().any(|&k| k != 0) {
                    return Err(bad("pointwise tables need value arguments".into()));
                }
                if table.arity != op_shape.len() || table.carrier != carrier {
                    return Err(bad(format!(
                        "table has arity {}, operator has {} arguments",
                        table.arity,
                        op_shape.len()
                    )));
                }
                Ok(())
            }
            OperatorInterp::ForallLike { truth, falsity } => {
                if op_shape.len() != 1 {
                    return Err(bad("forall-like operators take one argument".into()));
                }
                in_range(*truth)?;
                in_range(*falsity)
            }
            OperatorInterp::Explicit { rows, default } => {
                in_range(*default)?;
                let key_len: usize = op_shape.iter().map(|&k| carrier.pow(k as u32)).sum();
                for (key, value) in rows {
                    if key.len() != key_len {
                        return Err(bad(format!(
                            "row key has {} entries, expected {key_len}",
                            key.len()
                        )));
                    }
                    if let Some(&e) = key.iter().find(|&&e| e as usize >= carrier) {
                        return Err(SemanticsError::ElementOutOfRange(e));
                    }
                    in_range(*value)?;
                }
                Ok(())
            }
        }
    }

    /// `args` holds the concatenated entries of the argument operations.
    pub(crate) fn apply(&self, args: &[u32]) -> u32 {
        match self {
            OperatorInterp::Constant(e) => e.0,
            OperatorInterp::Pointwise(table) => {
                let idx = args
                    .iter()
                    .fold(0usize, |acc, &a| acc * table.carrier + a as usize);
                table.entries[idx]
            }
            OperatorInterp::ForallLike { truth, falsity } => {
                if args.iter().all(|&e| e == truth.0) {
                    truth.0
                } else {
                    falsity.0
                }
            }
            OperatorInterp::Explicit { rows, default } => rows.get(args).unwrap_or(default).0,
        }
    }
}

/// A carrier with an interpretation for every abstraction of a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    carrier: Vec<Name>,
    signature: Signature,
    interps: BTreeMap<Name, OperatorInterp>,
}

impl FiniteAlgebra {
    pub fn new(
        carrier: Vec<Name>,
        signature: Signature,
        interps: BTreeMap<Name, OperatorInterp>,
    ) -> Result<FiniteAlgebra, SemanticsError> {
        if carrier.is_empty() {
            return Err(SemanticsError::EmptyCarrier);
        }
        for (i, e) in carrier.iter().enumerate() {
            if carrier[..i].contains(e) {
                return Err(SemanticsError::DuplicateElement(e.clone()));
            }
        }
        if let Some(extra) = interps.keys().find(|n| !signature.contains(n)) {
            return Err(SemanticsError::UnknownAbstraction(extra.clone()));
        }
        for (name, shape) in signature.iter() {
            let interp = interps
                .get(name)
                .ok_or_else(|| SemanticsError::InterpMissing(name.clone()))?;
            interp.check(name, &shape.operator_shape(), carrier.len())?;
        }
        Ok(FiniteAlgebra {
            carrier,
            signature,
            interps,
        })
    }

    pub fn carrier(&self) -> &[Name] {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.carrier.len()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn interp(&self, name: &str) -> Option<&OperatorInterp> {
        self.interps.get(name)
    }

    pub fn interps(&self) -> impl Iterator<Item = (&Name, &OperatorInterp)> {
        self.interps.iter()
    }

    pub fn element(&self, name: &str) -> Option<Elem> {
        self.carrier
            .iter()
            .position(|e| &**e == name)
            .map(|i| Elem(i as u32))
    }

    pub fn element_name(&self, e: Elem) -> &Name {
        &self.carrier[e.0 as usize]
    }
}

/// An algebra with a designated truth value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    algebra: FiniteAlgebra,
    truth: Elem,
}

impl Model {
    pub fn new(algebra: FiniteAlgebra, truth: Elem) -> Result<Model, SemanticsError> {
        if truth.0 as usize >= algebra.size() {
            return Err(SemanticsError::ElementOutOfRange(truth.0));
        }
        Ok(Model { algebra, truth })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn truth(&self) -> Elem {
        self.truth
    }

    pub fn size(&self) -> usize {
        self.algebra.size()
    }

    pub fn is_degenerate(&self) -> bool {
        self.algebra.size() == 1
    }

    /// A valuation sending everything to the first carrier element.
    pub fn valuation(&self) -> Valuation {
        Valuation::new(self.size())
    }
}

/// A total valuation: explicit tables for finitely many variables, the
/// constant operation yielding the first carrier element for all others.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    carrier: usize,
    overrides: BTreeMap<VarKey, OpTable>,
}

impl Valuation {
    pub fn new(carrier: usize) -> Valuation {
        Valuation {
            carrier,
            overrides: BTreeMap::new(),
        }
    }

    pub fn lookup(&self, key: &VarKey) -> Cow<'_, OpTable> {
        match self.overrides.get(key) {
            Some(t) => Cow::Borrowed(t),
            None => Cow::Owned(OpTable::constant(self.carrier, key.arity, Elem(0))),
        }
    }

    pub fn set(&mut self, key: VarKey, table: OpTable) -> Result<(), SemanticsError> {
        if table.arity != key.arity || table.carrier != self.carrier {
            return Err(SemanticsError::TableArity {
                found: table.arity,
                key,
            });
        }
        self.overrides.insert(key, table);
        Ok(())
    }

    pub fn with_value(mut self, name: &str, value: Elem) -> Valuation {
        self.overrides.insert(
            VarKey::new(name, 0),
            OpTable::constant(self.carrier, 0, value),
        );
        self
    }

    /// `ν[x_1 := u_1, ..., x_k := u_k]`: only `(x_i, 0)` changes.
    pub fn update(&self, updates: &[(Name, Elem)]) -> Result<Valuation, SemanticsError> {
        let mut out = self.clone();
        for (i, (name, value)) in updates.iter().enumerate() {
            if updates[..i].iter().any(|(n, _)| n == name) {
                return Err(SemanticsError::DuplicateName(name.clone()));
            }
            out.overrides.insert(
                VarKey::new(name.clone(), 0),
                OpTable::constant(self.carrier, 0, *value),
            );
        }
        Ok(out)
    }

    pub fn overrides(&self) -> impl Iterator<Item = (&VarKey, &OpTable)> {
        self.overrides.iter()
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    /// Renders the explicit part of the valuation using element names.
    pub fn display<'a>(&'a self, algebra: &'a FiniteAlgebra) -> ValuationDisplay<'a> {
        ValuationDisplay {
            valuation: self,
            algebra,
        }
    }
}

pub struct ValuationDisplay<'a> {
    valuation: &'a Valuation,
    algebra: &'a FiniteAlgebra,
}

impl fmt::Display for ValuationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |e: Elem| self.algebra.element_name(e);
        let mut first = true;
        for (key, table) in &self.valuation.overrides {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            if key.arity == 0 {
                write!(f, "{} = {}", key.name, name(table.apply(&[])))?;
            } else {
                write!(f, "{}/{} = [", key.name, key.arity)?;
                for (i, e) in table.entries().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{}", name(e))?;
                }
                f.write_str("]")?;
            }
        }
        Ok(())
    }
}
