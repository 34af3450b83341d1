//! Random terms, substitutions, models and valuations for property tests.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::semantics::{Elem, FiniteAlgebra, Model, OpTable, OperatorInterp, Valuation};
use crate::subst::Substitution;
use crate::terms::{Name, Shape, Signature, Template, Term, VarKey};
use crate::theories::le_signature;

/// `L_E` plus abstractions with less common shapes: a unary operation `f`,
/// a value `c`, `sum` of shape `[{1}, {}]`, `pair` of shape `[{1}, {2}]`
/// and `lam2` of shape `[{1, 2}]`.
pub fn test_signature() -> Signature {
    let mut sig = le_signature();
    let extra: [(&str, Vec<Vec<i64>>); 5] = [
        ("f", vec![vec![]]),
        ("c", vec![]),
        ("sum", vec![vec![1], vec![]]),
        ("pair", vec![vec![1], vec![2]]),
        ("lam2", vec![vec![1, 2]]),
    ];
    for (name, deps) in extra {
        sig.add(name, Shape::new(deps).expect("valid shape"))
            .expect("fresh name");
    }
    sig
}

/// Generates terms over a signature and a fixed pool of variable names.
#[derive(Debug, Clone)]
pub struct TermGen {
    pub sig: Signature,
    pub max_depth: usize,
    /// Free variables: name and arity.
    pub free: Vec<VarKey>,
    /// Names used for binders; overlapping `free` on purpose.
    pub binder_names: Vec<Name>,
}

impl TermGen {
    pub fn new(sig: Signature, max_depth: usize) -> TermGen {
        let free = [("x", 0), ("y", 0), ("z", 0), ("P", 1), ("Q", 1), ("R", 2)]
            .into_iter()
            .map(|(n, a)| VarKey::new(n, a))
            .collect();
        let binder_names = ["x", "y", "u", "v"].into_iter().map(Name::from).collect();
        TermGen {
            sig,
            max_depth,
            free,
            binder_names,
        }
    }

    pub fn term<R: Rng>(&self, rng: &mut R) -> Term {
        self.term_in(rng, self.max_depth, &[])
    }

    fn leaf<R: Rng>(&self, rng: &mut R, bound: &[Name]) -> Term {
        let constants: Vec<&Name> = self
            .sig
            .iter()
            .filter(|(_, s)| s.arity() == 0)
            .map(|(n, _)| n)
            .collect();
        let free_values: Vec<&VarKey> = self.free.iter().filter(|k| k.arity == 0).collect();
        match rng.random_range(0..4) {
            0 if !bound.is_empty() => Term::var(bound.choose(rng).expect("non-empty").clone()),
            1 if !constants.is_empty() => self
                .sig
                .constant(constants.choose(rng).expect("non-empty"))
                .expect("value abstraction"),
            _ => match free_values.choose(rng) {
                Some(k) => Term::var(k.name.clone()),
                None => Term::var(self.binder_names[0].clone()),
            },
        }
    }

    /// A term whose free arity-0 variables may include `bound`.
    pub fn term_in<R: Rng>(&self, rng: &mut R, depth: usize, bound: &[Name]) -> Term {
        if depth == 0 || rng.random_bool(0.25) {
            return self.leaf(rng, bound);
        }
        let ops: Vec<&VarKey> = self.free.iter().filter(|k| k.arity > 0).collect();
        if !ops.is_empty() && rng.random_bool(0.3) {
            let k = ops.choose(rng).expect("non-empty");
            let args = (0..k.arity)
                .map(|_| self.term_in(rng, depth - 1, bound))
                .collect();
            return Term::app(k.name.clone(), args);
        }
        let proper: Vec<(&Name, &Shape)> = self.sig.iter().filter(|(_, s)| s.arity() > 0).collect();
        let Some((name, shape)) = proper.choose(rng) else {
            return self.leaf(rng, bound);
        };
        let mut pool = self.binder_names.clone();
        let mut binders = Vec::new();
        for _ in 0..shape.valence() {
            let i = rng.random_range(0..pool.len());
            binders.push(pool.swap_remove(i));
        }
        let args = (0..shape.arity())
            .map(|i| {
                let mut scope = bound.to_vec();
                scope.extend(shape.binds(i).iter().map(|&q| binders[q - 1].clone()));
                self.term_in(rng, depth - 1, &scope)
            })
            .collect();
        self.sig
            .apply(name, binders, args)
            .expect("generated to fit the shape")
    }

    /// A template `[x_1 ... x_n. t]` whose body may mention its binders.
    pub fn template<R: Rng>(&self, rng: &mut R, arity: usize, depth: usize) -> Template {
        let mut pool = self.binder_names.clone();
        let mut binders = Vec::new();
        for _ in 0..arity {
            let i = rng.random_range(0..pool.len());
            binders.push(pool.swap_remove(i));
        }
        let body = self.term_in(rng, depth, &binders);
        Template::new(binders, body).expect("distinct binders")
    }

    /// A substitution on a random subset of the free-variable pool.
    pub fn substitution<R: Rng>(&self, rng: &mut R, depth: usize) -> Substitution {
        let mut sigma = Substitution::new();
        for k in &self.free {
            if rng.random_bool(0.5) {
                let t = self.template(rng, k.arity, depth);
                sigma.insert(k.clone(), t).expect("arity matches");
            }
        }
        sigma
    }
}

/// A uniformly random operation table.
pub fn random_table<R: Rng>(rng: &mut R, carrier: usize, arity: usize) -> OpTable {
    let n = carrier.pow(arity as u32);
    let entries = (0..n)
        .map(|_| Elem(rng.random_range(0..carrier as u32)))
        .collect();
    OpTable::new(carrier, arity, entries).expect("sized to fit")
}

/// A model of `sig` on `carrier` elements with random operators. Every
/// operator is a random function of the tables of its arguments.
pub fn random_model<R: Rng>(rng: &mut R, sig: &Signature, carrier: usize) -> Model {
    let c = carrier;
    let mut interps = BTreeMap::new();
    for (name, shape) in sig.iter() {
        let op_shape = shape.operator_shape();
        let interp = if op_shape.iter().all(|&k| k == 0) {
            OperatorInterp::Pointwise(random_table(rng, c, op_shape.len()))
        } else {
            let key_len: usize = op_shape.iter().map(|&k| c.pow(k as u32)).sum();
            let rows: BTreeMap<Vec<u32>, Elem> = (0..c.pow(key_len as u32))
                .map(|mut i| {
                    let mut key = vec![0u32; key_len];
                    for slot in key.iter_mut().rev() {
                        *slot = (i % c) as u32;
                        i /= c;
                    }
                    (key, Elem(rng.random_range(0..c as u32)))
                })
                .collect();
            OperatorInterp::Explicit {
                rows,
                default: Elem(0),
            }
        };
        interps.insert(name.clone(), interp);
    }
    let names = (0..c).map(|i| Name::from(format!("e{i}"))).collect();
    let algebra = FiniteAlgebra::new(names, sig.clone(), interps).expect("fits the signature");
    let truth = Elem(rng.random_range(0..c as u32));
    Model::new(algebra, truth).expect("truth in carrier")
}

/// Random tables for every key in `keys`.
pub fn random_valuation<'a, R: Rng>(
    rng: &mut R,
    carrier: usize,
    keys: impl IntoIterator<Item = &'a VarKey>,
) -> Valuation {
    let mut val = Valuation::new(carrier);
    for k in keys {
        val.set(k.clone(), random_table(rng, carrier, k.arity))
            .expect("sized to fit");
    }
    val
}

/// Every name occurring in `t`, free or bound.
pub fn all_names(t: &Term, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x, args) => {
            out.insert(x.clone());
            args.iter().for_each(|a| all_names(a, out));
        }
        Term::Abs(app) => {
            out.extend(app.binders().iter().cloned());
            app.args().iter().for_each(|a| all_names(a, out));
        }
    }
}

/// Renames every binder of `t` to a name that occurs nowhere in `t`.
/// The result is α-equivalent to `t`.
pub fn rename_binders<R: Rng>(rng: &mut R, t: &Term, sig: &Signature) -> Term {
    let mut taken = BTreeSet::new();
    all_names(t, &mut taken);
    let mut counter = rng.random_range(0..1000u32);
    let mut fresh = move || loop {
        counter += 1;
        let n: Name = format!("w{counter}").into();
        if !taken.contains(&n) {
            taken.insert(n.clone());
            return n;
        }
    };
    rename(t, sig, &BTreeMap::new(), &mut fresh)
}

fn rename(
    t: &Term,
    sig: &Signature,
    env: &BTreeMap<Name, Name>,
    fresh: &mut dyn FnMut() -> Name,
) -> Term {
    match t {
        Term::Var(x, args) => {
            let name = if args.is_empty() {
                env.get(x).cloned().unwrap_or_else(|| x.clone())
            } else {
                x.clone()
            };
            let args = args.iter().map(|a| rename(a, sig, env, fresh)).collect();
            Term::app(name, args)
        }
        Term::Abs(app) => {
            let new: Vec<Name> = app.binders().iter().map(|_| fresh()).collect();
            let args = app
                .args()
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let mut inner = env.clone();
                    for &q in app.shape().binds(i) {
                        inner.insert(app.binders()[q - 1].clone(), new[q - 1].clone());
                    }
                    rename(a, sig, &inner, fresh)
                })
                .collect();
            sig.apply(app.name(), new, args)
                .expect("same shape as the original")
        }
    }
}

/// Evaluates `t` directly on its named form, without compilation. Used to
/// cross-check [`crate::semantics::eval_term`].
pub fn naive_eval(model: &Model, val: &Valuation, t: &Term) -> Elem {
    naive(model, val, t, &BTreeMap::new())
}

fn naive(model: &Model, val: &Valuation, t: &Term, env: &BTreeMap<Name, Elem>) -> Elem {
    match t {
        Term::Var(x, args) if args.is_empty() => env
            .get(x)
            .copied()
            .unwrap_or_else(|| val.lookup(&VarKey::new(x.clone(), 0)).apply(&[])),
        Term::Var(x, args) => {
            let vals: Vec<Elem> = args.iter().map(|a| naive(model, val, a, env)).collect();
            val.lookup(&VarKey::new(x.clone(), args.len())).apply(&vals)
        }
        Term::Abs(app) => {
            let c = model.size();
            let mut key: Vec<u32> = Vec::new();
            let mut values: Vec<Elem> = Vec::new();
            for (i, arg) in app.args().iter().enumerate() {
                let bound = app.shape().binds(i);
                let rows = c.pow(bound.len() as u32);
                for row in 0..rows {
                    let mut inner = env.clone();
                    let mut r = row;
                    for &q in bound.iter().rev() {
                        inner.insert(app.binders()[q - 1].clone(), Elem((r % c) as u32));
                        r /= c;
                    }
                    let v = naive(model, val, arg, &inner);
                    key.push(v.0);
                    values.push(v);
                }
            }
            match model
                .algebra()
                .interp(app.name())
                .expect("model covers the term")
            {
                OperatorInterp::Constant(e) => *e,
                OperatorInterp::Pointwise(table) => table.apply(&values),
                OperatorInterp::ForallLike { truth, falsity } => {
                    if values.iter().all(|v| v == truth) {
                        *truth
                    } else {
                        *falsity
                    }
                }
                OperatorInterp::Explicit { rows, default } => {
                    rows.get(&key).copied().unwrap_or(*default)
                }
            }
        }
    }
}

/// α-equivalence decided on named terms by pairing binders, independent of
/// the nameless representation.
pub fn alpha_eq_named(s: &Term, t: &Term) -> bool {
    named_eq(s, t, &[])
}

/// `scope` lists binder pairs, innermost last.
fn named_eq(s: &Term, t: &Term, scope: &[(Name, Name)]) -> bool {
    match (s, t) {
        (Term::Var(x, xs), Term::Var(y, ys)) if xs.is_empty() && ys.is_empty() => {
            let bx = scope.iter().rposition(|(a, _)| a == x);
            let by = scope.iter().rposition(|(_, b)| b == y);
            match (bx, by) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::Var(x, xs), Term::Var(y, ys)) => {
            x == y && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| named_eq(a, b, scope))
        }
        (Term::Abs(a), Term::Abs(b)) => {
            a.name() == b.name()
                && a.shape() == b.shape()
                && a.args()
                    .iter()
                    .zip(b.args())
                    .enumerate()
                    .all(|(i, (l, r))| {
                        let mut inner = scope.to_vec();
                        for &q in a.shape().binds(i) {
                            inner.push((a.binders()[q - 1].clone(), b.binders()[q - 1].clone()));
                        }
                        named_eq(l, r, &inner)
                    })
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generated_terms_fit_the_signature() {
        let sig = test_signature();
        let g = TermGen::new(sig.clone(), 4);
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..500 {
            let t = g.term(&mut rng);
            sig.check_term(&t).unwrap();
            let r = rename_binders(&mut rng, &t, &sig);
            assert!(r.alpha_eq(&t));
        }
    }

    #[test]
    fn random_models_are_complete() {
        let sig = test_signature();
        let mut rng = StdRng::seed_from_u64(2);
        for c in 1..=2 {
            let m = random_model(&mut rng, &sig, c);
            assert_eq!(m.size(), c);
        }
    }
}
