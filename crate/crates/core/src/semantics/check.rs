//! Brute-force validity over all valuations of a finite model.

use std::collections::BTreeMap;

use super::eval::{Code, Compiler, Machine};
use super::{Elem, FiniteAlgebra, Model, OpTable, OperatorInterp, SemanticsError, Valuation};
use crate::kernel::Logic;
use crate::terms::{Name, Rule, Signature};
use crate::theories::le_signature;

/// Default bound on the number of valuations enumerated per rule.
pub const DEFAULT_CAP: u64 = 1 << 20;

/// Number of `k`-ary operations on `c` elements, `c^(c^k)`, if it fits.
fn operation_count(c: usize, k: usize) -> Option<u128> {
    let rows = (c as u128).checked_pow(u32::try_from(k).ok()?)?;
    (c as u128).checked_pow(u32::try_from(rows).ok()?)
}

fn too_large(count: Option<u128>, cap: u64) -> SemanticsError {
    SemanticsError::EnumerationTooLarge {
        count: count.map_or_else(|| "more than 2^128".to_string(), |n| n.to_string()),
        cap,
    }
}

/// All `k`-ary operation tables on a carrier of size `c`, in enumeration
/// order (lexicographic in the table entries).
pub fn enumerate_operations(c: usize, k: usize, cap: u64) -> Result<Vec<OpTable>, SemanticsError> {
    assert!(c >= 1, "carrier must be non-empty");
    let count = operation_count(c, k);
    match count {
        Some(n) if n <= cap as u128 => Ok((0..n as u64).map(|i| OpTable::nth(c, k, i)).collect()),
        _ => Err(too_large(count, cap)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    /// True under every one of `valuations` assignments to the free variables.
    Valid { valuations: u64 },
    /// The first failing assignment in enumeration order.
    Invalid { counterexample: Valuation },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid { .. })
    }
}

struct CompiledRule {
    conclusion: Code,
    premises: Vec<(usize, Code)>,
}

/// Checks `r` against every assignment of operation tables to its free
/// variables. Other variables cannot affect the outcome.
pub fn check_rule_valid(model: &Model, r: &Rule, cap: u64) -> Result<Validity, SemanticsError> {
    let keys: Vec<_> = r.free_variables().into_iter().collect();
    let c = model.size();
    let mut count: Option<u128> = Some(1);
    for k in &keys {
        count = count.and_then(|n| n.checked_mul(operation_count(c, k.arity)?));
    }
    let total = match count {
        Some(n) if n <= cap as u128 => n as u64,
        _ => return Err(too_large(count, cap)),
    };

    let mut compiler = Compiler::with_slots(model, keys.iter().cloned());
    let compiled = CompiledRule {
        conclusion: compiler.compile(&r.conclusion().to_canonical().0)?,
        premises: r
            .premises()
            .iter()
            .map(|p| Ok((p.template().arity(), compiler.compile(&p.canonical().body)?)))
            .collect::<Result<_, SemanticsError>>()?,
    };
    debug_assert_eq!(compiler.slots.len(), keys.len());

    let radices: Vec<u64> = keys
        .iter()
        .map(|k| operation_count(c, k.arity).expect("bounded by cap") as u64)
        .collect();
    let mut digits = vec![0u64; keys.len()];
    let mut tables: Vec<OpTable> = keys.iter().map(|k| OpTable::nth(c, k.arity, 0)).collect();
    let truth = model.truth().0;
    let mut env = Vec::new();

    for _ in 0..total {
        let refs: Vec<&OpTable> = tables.iter().collect();
        let machine = Machine {
            carrier: c,
            ops: &compiler.ops,
            tables: &refs,
        };
        let holds = machine.eval(&compiled.conclusion, &mut env) == truth
            || compiled
                .premises
                .iter()
                .any(|(k, body)| !machine.constantly(*k, body, truth, &mut env));
        if !holds {
            let mut counterexample = Valuation::new(c);
            for (k, t) in keys.iter().zip(tables) {
                counterexample.set(k.clone(), t)?;
            }
            return Ok(Validity::Invalid { counterexample });
        }
        // odometer, last variable fastest
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                tables[pos] = OpTable::nth(c, keys[pos].arity, digits[pos]);
                break;
            }
            digits[pos] = 0;
            tables[pos] = OpTable::nth(c, keys[pos].arity, 0);
        }
    }
    Ok(Validity::Valid { valuations: total })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleStatus {
    pub name: Name,
    pub validity: Validity,
}

/// Outcome of checking every inference rule of a logic in one model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelReport {
    pub rules: Vec<RuleStatus>,
}

impl ModelReport {
    pub fn valid_count(&self) -> usize {
        self.rules.iter().filter(|r| r.validity.is_valid()).count()
    }

    pub fn all_valid(&self) -> bool {
        self.valid_count() == self.rules.len()
    }
}

/// Checks whether `model` (with all valuations) is a model of `logic`.
pub fn check_model(model: &Model, logic: &Logic, cap: u64) -> Result<ModelReport, SemanticsError> {
    if !logic
        .signature()
        .is_subsignature_of(model.algebra().signature())
    {
        return Err(SemanticsError::SignatureMismatch);
    }
    let rules = logic
        .rules()
        .iter()
        .map(|(name, rule)| {
            Ok(RuleStatus {
                name: name.clone(),
                validity: check_rule_valid(model, rule, cap)?,
            })
        })
        .collect::<Result<_, SemanticsError>>()?;
    Ok(ModelReport { rules })
}

/// One-element model: every operator returns the only element, which is truth.
pub fn degenerate_model(sig: &Signature) -> Model {
    let interps = sig
        .iter()
        .map(|(n, _)| (n.clone(), OperatorInterp::Constant(Elem(0))))
        .collect();
    let algebra = FiniteAlgebra::new(vec!["T".into()], sig.clone(), interps)
        .expect("constant interpretations fit every shape");
    Model::new(algebra, Elem(0)).expect("single element is truth")
}

/// Carrier `{T, F}` with the usual readings of `T`, `=>`, `==` and `forall`.
pub fn standard_two_element_model() -> Model {
    let t = Elem(0);
    let f = Elem(1);
    let implies = OpTable::new(2, 2, vec![t, f, t, t]).expect("2x2 table");
    let equals = OpTable::new(2, 2, vec![t, f, f, t]).expect("2x2 table");
    let mut interps = BTreeMap::new();
    interps.insert(Name::from("T"), OperatorInterp::Constant(t));
    interps.insert(Name::from("=>"), OperatorInterp::Pointwise(implies));
    interps.insert(Name::from("=="), OperatorInterp::Pointwise(equals));
    interps.insert(
        Name::from("forall"),
        OperatorInterp::ForallLike {
            truth: t,
            falsity: f,
        },
    );
    let algebra = FiniteAlgebra::new(vec!["T".into(), "F".into()], le_signature(), interps)
        .expect("interpretations fit the signature");
    Model::new(algebra, t).expect("T is in the carrier")
}
