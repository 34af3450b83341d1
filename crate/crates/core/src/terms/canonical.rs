//! Nameless (de Bruijn) representation of terms and templates.
//!
//! Bound arity-0 occurrences become indices counted from the innermost
//! binder. Inside argument `i` of an abstraction application the binders
//! `x_q1, ..., x_qk` (for `p_i = {q1 < ... < qk}`) are pushed in that order,
//! so `x_qk` has index 0. Free occurrences keep their names.
//!
//! Binder names survive as [`BinderHint`]s. Hints never take part in
//! equality, ordering, hashing or the byte encoding; they only steer the
//! choice of names when converting back.

use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::{AbsApp, Name, Shape, Template, Term};

/// Preferred name of a binder. Compares equal to every other hint.
#[derive(Debug, Clone)]
pub struct BinderHint(pub Name);

impl PartialEq for BinderHint {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for BinderHint {}

impl Hash for BinderHint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Nameless {
    Bound(u32),
    Var(Name, Vec<Nameless>),
    Abs {
        name: Name,
        shape: Arc<Shape>,
        hints: Vec<BinderHint>,
        args: Vec<Nameless>,
    },
}

/// Canonical form of a term; equal iff the terms are α-equivalent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalTerm(pub Nameless);

/// Canonical form of a template `[x_1 ... x_n. t]`; the binders are
/// indices `n-1, ..., 0` at the top of the body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalTemplate {
    pub hints: Vec<BinderHint>,
    pub body: Nameless,
}

impl CanonicalTerm {
    pub fn from_term(t: &Term) -> Self {
        CanonicalTerm(to_nameless(t, &mut Vec::new()))
    }

    /// Converts back to a named term, picking binder names that avoid capture.
    pub fn to_term(&self) -> Term {
        from_nameless(&self.0, &mut Vec::new())
    }

    pub fn encode(&self, out: &mut Vec<u8>) {
        encode(&self.0, out);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode(&mut out);
        out
    }
}

impl CanonicalTemplate {
    pub fn from_template(t: &Template) -> Self {
        let mut ctx = t.binders.clone();
        CanonicalTemplate {
            hints: t.binders.iter().cloned().map(BinderHint).collect(),
            body: to_nameless(&t.body, &mut ctx),
        }
    }

    pub fn arity(&self) -> usize {
        self.hints.len()
    }

    pub fn to_template(&self) -> Template {
        self.to_template_avoiding(&BTreeSet::new())
    }

    /// Converts back to a named template whose binders avoid `avoid` as
    /// well as every name the body refers to.
    pub fn to_template_avoiding(&self, avoid: &BTreeSet<Name>) -> Template {
        let mut taken = avoid.clone();
        escaping_names(&self.body, self.arity(), &[], &mut taken);
        let mut binders: Vec<Name> = Vec::with_capacity(self.arity());
        for hint in &self.hints {
            let name = fresh_name(&hint.0, |c| taken.contains(c) || binders.contains(c));
            binders.push(name);
        }
        let mut ctx = binders.clone();
        let body = from_nameless(&self.body, &mut ctx);
        Template { binders, body }
    }

    pub fn encode(&self, out: &mut Vec<u8>) {
        put_len(out, self.arity());
        encode(&self.body, out);
    }

    /// Binder positions ordered by their first occurrence in a left-to-right
    /// traversal of the body. Binders that never occur keep their relative
    /// order at the end.
    pub fn first_occurrence_order(&self) -> Vec<usize> {
        fn go(n: &Nameless, depth: usize, arity: usize, out: &mut Vec<usize>) {
            match n {
                Nameless::Bound(i) => {
                    let i = *i as usize;
                    if i >= depth {
                        let b = arity - 1 - (i - depth);
                        if !out.contains(&b) {
                            out.push(b);
                        }
                    }
                }
                Nameless::Var(_, args) => args.iter().for_each(|a| go(a, depth, arity, out)),
                Nameless::Abs { shape, args, .. } => {
                    for (i, a) in args.iter().enumerate() {
                        go(a, depth + shape.binds(i).len(), arity, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(&self.body, 0, self.arity(), &mut out);
        for b in 0..self.arity() {
            if !out.contains(&b) {
                out.push(b);
            }
        }
        out
    }
}

fn to_nameless(t: &Term, ctx: &mut Vec<Name>) -> Nameless {
    match t {
        Term::Var(x, args) if args.is_empty() => match ctx.iter().rposition(|n| n == x) {
            Some(pos) => Nameless::Bound((ctx.len() - 1 - pos) as u32),
            None => Nameless::Var(x.clone(), Vec::new()),
        },
        Term::Var(x, args) => Nameless::Var(
            x.clone(),
            args.iter().map(|a| to_nameless(a, ctx)).collect(),
        ),
        Term::Abs(app) => {
            let args = app
                .args
                .iter()
                .enumerate()
                .map(|(i, arg)| {
                    let mark = ctx.len();
                    ctx.extend(app.bound_in(i).cloned());
                    let out = to_nameless(arg, ctx);
                    ctx.truncate(mark);
                    out
                })
                .collect();
            Nameless::Abs {
                name: app.name.clone(),
                shape: app.shape.clone(),
                hints: app.binders.iter().cloned().map(BinderHint).collect(),
                args,
            }
        }
    }
}

fn from_nameless(n: &Nameless, ctx: &mut Vec<Name>) -> Term {
    match n {
        Nameless::Bound(i) => Term::Var(ctx[ctx.len() - 1 - *i as usize].clone(), Vec::new()),
        Nameless::Var(x, args) => Term::Var(
            x.clone(),
            args.iter().map(|a| from_nameless(a, ctx)).collect(),
        ),
        Nameless::Abs {
            name,
            shape,
            hints,
            args,
        } => {
            let mut avoid = vec![BTreeSet::new(); shape.valence()];
            for (i, arg) in args.iter().enumerate() {
                let mut names = BTreeSet::new();
                escaping_names(arg, shape.binds(i).len(), ctx, &mut names);
                for &q in shape.binds(i) {
                    avoid[q - 1].extend(names.iter().cloned());
                }
            }
            let mut binders: Vec<Name> = Vec::with_capacity(shape.valence());
            for (j, hint) in hints.iter().enumerate() {
                let name = fresh_name(&hint.0, |c| avoid[j].contains(c) || binders.contains(c));
                binders.push(name);
            }
            let args = args
                .iter()
                .enumerate()
                .map(|(i, arg)| {
                    let mark = ctx.len();
                    ctx.extend(shape.binds(i).iter().map(|&q| binders[q - 1].clone()));
                    let out = from_nameless(arg, ctx);
                    ctx.truncate(mark);
                    out
                })
                .collect();
            Term::Abs(AbsApp {
                name: name.clone(),
                shape: shape.clone(),
                binders,
                args,
            })
        }
    }
}

/// Names an arity-0 occurrence inside `n` may resolve to: free variables and
/// binders of the surrounding context `ctx` (innermost last) referenced from
/// below the `depth` binders local to `n`.
fn escaping_names(n: &Nameless, depth: usize, ctx: &[Name], out: &mut BTreeSet<Name>) {
    match n {
        Nameless::Bound(i) => {
            let i = *i as usize;
            if i >= depth {
                out.insert(ctx[ctx.len() - 1 - (i - depth)].clone());
            }
        }
        Nameless::Var(x, args) => {
            if args.is_empty() {
                out.insert(x.clone());
            }
            args.iter().for_each(|a| escaping_names(a, depth, ctx, out));
        }
        Nameless::Abs { shape, args, .. } => {
            for (i, a) in args.iter().enumerate() {
                escaping_names(a, depth + shape.binds(i).len(), ctx, out);
            }
        }
    }
}

/// `hint` if it is free, otherwise its trailing-digit-stripped base followed
/// by the smallest positive suffix that is free.
pub(crate) fn fresh_name(hint: &Name, taken: impl Fn(&Name) -> bool) -> Name {
    if !taken(hint) {
        return hint.clone();
    }
    let stripped = hint.trim_end_matches(|c: char| c.is_ascii_digit());
    let base = if stripped.is_empty() {
        &**hint
    } else {
        stripped
    };
    (1u64..)
        .map(|k| Name::from(format!("{base}{k}")))
        .find(|c| !taken(c))
        .expect("unbounded suffix search")
}

/// Simultaneously replaces free variables by templates. `lookup` returns the
/// template for a variable at a given arity; template bodies are inserted as
/// they are and instantiated at the (already substituted) arguments.
pub(crate) fn substitute<'a>(
    n: &Nameless,
    lookup: &dyn Fn(&Name, usize) -> Option<CanonicalTemplateRef<'a>>,
) -> Nameless {
    match n {
        Nameless::Bound(i) => Nameless::Bound(*i),
        Nameless::Var(x, args) => {
            let args: Vec<Nameless> = args.iter().map(|a| substitute(a, lookup)).collect();
            match lookup(x, args.len()) {
                Some(tpl) => instantiate(tpl.body, &args, 0),
                None => Nameless::Var(x.clone(), args),
            }
        }
        Nameless::Abs {
            name,
            shape,
            hints,
            args,
        } => Nameless::Abs {
            name: name.clone(),
            shape: shape.clone(),
            hints: hints.clone(),
            args: args.iter().map(|a| substitute(a, lookup)).collect(),
        },
    }
}

/// Borrowed view of a template used during substitution.
#[derive(Clone, Copy)]
pub(crate) struct CanonicalTemplateRef<'a> {
    pub body: &'a Nameless,
}

/// Replaces the template binders of `body` (seen from under `local` inner
/// binders) by `args`. Binder `x_j` of an `n`-ary template has index
/// `n - j` at the top of its body, so index `i` maps to `args[n - 1 - i]`.
fn instantiate(body: &Nameless, args: &[Nameless], local: usize) -> Nameless {
    match body {
        Nameless::Bound(i) => {
            let i = *i as usize;
            if i < local {
                Nameless::Bound(i as u32)
            } else {
                let j = i - local;
                shift(&args[args.len() - 1 - j], local as u32, 0)
            }
        }
        Nameless::Var(x, bargs) => Nameless::Var(
            x.clone(),
            bargs.iter().map(|a| instantiate(a, args, local)).collect(),
        ),
        Nameless::Abs {
            name,
            shape,
            hints,
            args: bargs,
        } => Nameless::Abs {
            name: name.clone(),
            shape: shape.clone(),
            hints: hints.clone(),
            args: bargs
                .iter()
                .enumerate()
                .map(|(i, a)| instantiate(a, args, local + shape.binds(i).len()))
                .collect(),
        },
    }
}

fn shift(n: &Nameless, by: u32, cutoff: u32) -> Nameless {
    if by == 0 {
        return n.clone();
    }
    match n {
        Nameless::Bound(i) if *i >= cutoff => Nameless::Bound(i + by),
        Nameless::Bound(i) => Nameless::Bound(*i),
        Nameless::Var(x, args) => Nameless::Var(
            x.clone(),
            args.iter().map(|a| shift(a, by, cutoff)).collect(),
        ),
        Nameless::Abs {
            name,
            shape,
            hints,
            args,
        } => Nameless::Abs {
            name: name.clone(),
            shape: shape.clone(),
            hints: hints.clone(),
            args: args
                .iter()
                .enumerate()
                .map(|(i, a)| shift(a, by, cutoff + shape.binds(i).len() as u32))
                .collect(),
        },
    }
}

const TAG_BOUND: u8 = 0;
const TAG_VAR: u8 = 1;
const TAG_ABS: u8 = 2;

fn encode(n: &Nameless, out: &mut Vec<u8>) {
    match n {
        Nameless::Bound(i) => {
            out.push(TAG_BOUND);
            put_len(out, *i as usize);
        }
        Nameless::Var(x, args) => {
            out.push(TAG_VAR);
            put_str(out, x);
            put_len(out, args.len());
            args.iter().for_each(|a| encode(a, out));
        }
        Nameless::Abs {
            name, shape, args, ..
        } => {
            out.push(TAG_ABS);
            put_str(out, name);
            put_len(out, shape.valence());
            put_len(out, args.len());
            for (i, a) in args.iter().enumerate() {
                let slots = shape.binds(i);
                put_len(out, slots.len());
                for &q in slots {
                    put_len(out, q);
                }
                encode(a, out);
            }
        }
    }
}

pub(crate) fn put_len(out: &mut Vec<u8>, mut n: usize) {
    loop {
        let byte = (n & 0x7f) as u8;
        n >>= 7;
        if n == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

pub(crate) fn put_bytes(out: &mut Vec<u8>, bytes: &[u8]) {
    put_len(out, bytes.len());
    out.extend_from_slice(bytes);
}

pub(crate) fn put_str(out: &mut Vec<u8>, s: &str) {
    put_bytes(out, s.as_bytes());
}
