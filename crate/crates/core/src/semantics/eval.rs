//! Evaluation of terms, templates and rules.
//!
//! Terms are compiled from their nameless form into a small program whose
//! variables are resolved to slots and whose abstractions are resolved to
//! operator interpretations. Bound variables live on an environment stack,
//! which is exactly the updated valuation `ν[x := u]` for arity-0 binders.

use std::collections::HashMap;

use super::{Elem, Model, OpTable, OperatorInterp, SemanticsError, Valuation};
use crate::subst::Substitution;
use crate::terms::{Nameless, Rule, Template, Term, VarKey};

pub(crate) enum Code {
    Bound(usize),
    Slot(usize, Vec<Code>),
    Op(usize, Vec<(usize, Code)>),
}

/// Resolves free variables to slots and abstractions to interpretations.
pub(crate) struct Compiler<'m> {
    model: &'m Model,
    pub(crate) slots: Vec<VarKey>,
    slot_index: HashMap<VarKey, usize>,
    pub(crate) ops: Vec<&'m OperatorInterp>,
    op_index: HashMap<&'m str, usize>,
}

impl<'m> Compiler<'m> {
    pub(crate) fn new(model: &'m Model) -> Self {
        Compiler {
            model,
            slots: Vec::new(),
            slot_index: HashMap::new(),
            ops: Vec::new(),
            op_index: HashMap::new(),
        }
    }

    /// Pre-registers slots so that their order is fixed by the caller.
    pub(crate) fn with_slots(model: &'m Model, keys: impl IntoIterator<Item = VarKey>) -> Self {
        let mut c = Compiler::new(model);
        for k in keys {
            c.slot(k);
        }
        c
    }

    fn slot(&mut self, key: VarKey) -> usize {
        if let Some(&i) = self.slot_index.get(&key) {
            return i;
        }
        let i = self.slots.len();
        self.slots.push(key.clone());
        self.slot_index.insert(key, i);
        i
    }

    pub(crate) fn compile(&mut self, n: &Nameless) -> Result<Code, SemanticsError> {
        Ok(match n {
            Nameless::Bound(i) => Code::Bound(*i as usize),
            Nameless::Var(x, args) => {
                let args = args
                    .iter()
                    .map(|a| self.compile(a))
                    .collect::<Result<Vec<_>, _>>()?;
                Code::Slot(self.slot(VarKey::new(x.clone(), args.len())), args)
            }
            Nameless::Abs {
                name, shape, args, ..
            } => {
                let algebra = self.model.algebra();
                match algebra.signature().shape(name) {
                    Some(s) if **s == **shape => {}
                    _ => return Err(SemanticsError::UnknownInTerm(name.clone())),
                }
                let op = match self.op_index.get(&**name) {
                    Some(&i) => i,
                    None => {
                        let (key, interp) = algebra
                            .interps
                            .get_key_value(name)
                            .ok_or_else(|| SemanticsError::InterpMissing(name.clone()))?;
                        self.ops.push(interp);
                        self.op_index.insert(key, self.ops.len() - 1);
                        self.ops.len() - 1
                    }
                };
                let args = args
                    .iter()
                    .enumerate()
                    .map(|(i, a)| Ok((shape.binds(i).len(), self.compile(a)?)))
                    .collect::<Result<Vec<_>, SemanticsError>>()?;
                Code::Op(op, args)
            }
        })
    }
}

/// Evaluates compiled code against slot tables.
pub(crate) struct Machine<'a> {
    pub(crate) carrier: usize,
    pub(crate) ops: &'a [&'a OperatorInterp],
    pub(crate) tables: &'a [&'a OpTable],
}

impl Machine<'_> {
    pub(crate) fn eval(&self, code: &Code, env: &mut Vec<u32>) -> u32 {
        match code {
            Code::Bound(i) => env[env.len() - 1 - i],
            Code::Slot(s, args) => {
                let table = self.tables[*s];
                let mut idx = 0usize;
                for a in args {
                    idx = idx * self.carrier + self.eval(a, env) as usize;
                }
                table.raw()[idx]
            }
            Code::Op(op, args) => {
                let mut buf = Vec::new();
                for (k, body) in args {
                    self.tabulate(*k, body, env, &mut buf);
                }
                self.ops[*op].apply(&buf)
            }
        }
    }

    /// Appends the `c^k` values of `body` with `k` fresh binders pushed on
    /// the environment, first binder most significant.
    pub(crate) fn tabulate(&self, k: usize, body: &Code, env: &mut Vec<u32>, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(self.eval(body, env));
            return;
        }
        let mark = env.len();
        env.resize(mark + k, 0);
        loop {
            out.push(self.eval(body, env));
            // odometer over the k pushed values, last binder fastest
            let mut pos = mark + k;
            loop {
                if pos == mark {
                    env.truncate(mark);
                    return;
                }
                pos -= 1;
                env[pos] += 1;
                if (env[pos] as usize) < self.carrier {
                    break;
                }
                env[pos] = 0;
            }
        }
    }

    /// Whether `body` under `k` binders evaluates to `value` everywhere.
    pub(crate) fn constantly(&self, k: usize, body: &Code, value: u32, env: &mut Vec<u32>) -> bool {
        let mark = env.len();
        env.resize(mark + k, 0);
        loop {
            if self.eval(body, env) != value {
                env.truncate(mark);
                return false;
            }
            let mut pos = mark + k;
            loop {
                if pos == mark {
                    env.truncate(mark);
                    return true;
                }
                pos -= 1;
                env[pos] += 1;
                if (env[pos] as usize) < self.carrier {
                    break;
                }
                env[pos] = 0;
            }
        }
    }
}

fn lookup_tables(val: &Valuation, slots: &[VarKey]) -> Vec<OpTable> {
    slots.iter().map(|k| val.lookup(k).into_owned()).collect()
}

/// `⟦t⟧_ν` in `model`.
pub fn eval_term(model: &Model, val: &Valuation, t: &Term) -> Result<Elem, SemanticsError> {
    let mut compiler = Compiler::new(model);
    let code = compiler.compile(&t.to_canonical().0)?;
    let owned = lookup_tables(val, &compiler.slots);
    let tables: Vec<&OpTable> = owned.iter().collect();
    let machine = Machine {
        carrier: model.size(),
        ops: &compiler.ops,
        tables: &tables,
    };
    Ok(Elem(machine.eval(&code, &mut Vec::new())))
}

/// The `n`-ary operation `(u_1, ..., u_n) ↦ ⟦t⟧_{ν[x_1 := u_1, ..., x_n := u_n]}`.
pub fn eval_template(
    model: &Model,
    val: &Valuation,
    t: &Template,
) -> Result<OpTable, SemanticsError> {
    let canonical = t.to_canonical();
    let mut compiler = Compiler::new(model);
    let code = compiler.compile(&canonical.body)?;
    let owned = lookup_tables(val, &compiler.slots);
    let tables: Vec<&OpTable> = owned.iter().collect();
    let machine = Machine {
        carrier: model.size(),
        ops: &compiler.ops,
        tables: &tables,
    };
    let mut entries = Vec::new();
    machine.tabulate(t.arity(), &code, &mut Vec::new(), &mut entries);
    Ok(OpTable {
        arity: t.arity(),
        carrier: model.size(),
        entries,
    })
}

/// `ν_σ`: the domain of `σ` is reassigned to the values of its templates.
pub fn subst_valuation(
    model: &Model,
    val: &Valuation,
    sigma: &Substitution,
) -> Result<Valuation, SemanticsError> {
    let mut out = val.clone();
    for (key, template) in sigma.iter() {
        out.set(key.clone(), eval_template(model, val, template)?)?;
    }
    Ok(out)
}

/// A rule is true for `ν` if its conclusion is true or some premise is not
/// constantly true.
pub fn rule_true(model: &Model, val: &Valuation, r: &Rule) -> Result<bool, SemanticsError> {
    let truth = model.truth();
    if eval_term(model, val, r.conclusion())? == truth {
        return Ok(true);
    }
    for p in r.premises() {
        if !eval_template(model, val, p.template())?.is_constant(truth) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{degenerate_model, standard_two_element_model};
    use crate::terms::{Name, Premise};
    use crate::theories::le_signature;

    const T: Elem = Elem(0);
    const F: Elem = Elem(1);

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn two_element_values() {
        let m = standard_two_element_model();
        let s = le_signature();
        let imp = |a: Term, b: Term| s.op("=>", vec![a, b]).unwrap();
        let nu = m.valuation().with_value("A", F).with_value("B", T);
        let t = imp(v("A"), imp(v("B"), v("A")));
        assert_eq!(eval_term(&m, &nu, &t).unwrap(), T);

        let all_x = s.bind("forall", "x", v("x")).unwrap();
        assert_eq!(eval_term(&m, &nu, &all_x).unwrap(), F);

        let tt = s.constant("T").unwrap();
        let f_enc = all_x.clone();
        assert_eq!(eval_term(&m, &nu, &imp(tt.clone(), f_enc)).unwrap(), F);
        let eq = s.op("==", vec![all_x.clone(), all_x]).unwrap();
        assert_eq!(eval_term(&m, &nu, &eq).unwrap(), T);
    }

    #[test]
    fn degenerate_everything_true() {
        let s = le_signature();
        let m = degenerate_model(&s);
        let t = s
            .bind("forall", "x", s.op("=>", vec![v("x"), v("y")]).unwrap())
            .unwrap();
        assert_eq!(eval_term(&m, &m.valuation(), &t).unwrap(), m.truth());
    }

    #[test]
    fn templates_tabulate() {
        let m = standard_two_element_model();
        let s = le_signature();
        let nu = m.valuation();
        let id = Template::new(vec!["x".into()], v("x")).unwrap();
        assert_eq!(eval_template(&m, &nu, &id).unwrap().raw(), &[0, 1]);
        let tt = Template::new(vec!["x".into()], s.constant("T").unwrap()).unwrap();
        assert!(eval_template(&m, &nu, &tt).unwrap().is_constant(T));
        // T on the diagonal, by enumeration of the four pairs
        let eq = Template::new(
            vec!["x".into(), "y".into()],
            s.op("==", vec![v("x"), v("y")]).unwrap(),
        )
        .unwrap();
        assert_eq!(eval_template(&m, &nu, &eq).unwrap().raw(), &[0, 1, 1, 0]);
    }

    #[test]
    fn substituted_valuations() {
        let m = standard_two_element_model();
        let s = le_signature();
        let nu = m.valuation().with_value("x", F);
        assert_eq!(subst_valuation(&m, &nu, &Substitution::new()).unwrap(), nu);
        let all_x = s.bind("forall", "x", v("x")).unwrap();
        let sigma = Substitution::new().with_term("x", s.constant("T").unwrap());
        let out = subst_valuation(&m, &nu, &sigma).unwrap();
        assert_eq!(out.lookup(&VarKey::new("x", 0)).apply(&[]), T);
        let sigma = Substitution::new().with_term("y", all_x);
        let out = subst_valuation(&m, &nu, &sigma).unwrap();
        assert_eq!(out.lookup(&VarKey::new("y", 0)).apply(&[]), F);
    }

    #[test]
    fn rule_truth() {
        let m = standard_two_element_model();
        let s = le_signature();
        let truth1 = Rule::axiom(s.constant("T").unwrap());
        assert!(rule_true(&m, &m.valuation(), &truth1).unwrap());

        let imp = s.op("=>", vec![v("A"), v("B")]).unwrap();
        let mp = Rule::new(vec![Premise::term(imp), Premise::term(v("A"))], v("B"));
        let nu = m.valuation().with_value("A", T).with_value("B", F);
        assert!(rule_true(&m, &nu, &mp).unwrap());

        let bare = Rule::axiom(v("x"));
        assert!(!rule_true(&m, &m.valuation().with_value("x", F), &bare).unwrap());
    }

    #[test]
    fn unknown_abstraction_in_term() {
        let m = standard_two_element_model();
        let other = crate::terms::Signature::new()
            .with("S", crate::terms::Shape::operation(1))
            .unwrap();
        let t = other.op("S", vec![v("x")]).unwrap();
        assert_eq!(
            eval_term(&m, &m.valuation(), &t),
            Err(SemanticsError::UnknownInTerm(Name::from("S")))
        );
    }
}
