//! Signatures, terms, templates and rules.
//!
//! Abstraction applications can only be built through [`Signature::apply`],
//! which checks binder and argument counts against the abstraction's shape.
//! Every [`AbsApp`] carries its shape so that binding structure is known
//! without consulting a signature.

pub(crate) mod canonical;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use canonical::{BinderHint, CanonicalTemplate, CanonicalTerm, Nameless};

/// Identifier used for variables and abstractions.
pub type Name = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("shape index {0} is not positive")]
    NonPositiveIndex(i64),
    #[error("shape does not cover binder slot {0}")]
    CoverageGap(usize),
    #[error("shape declares valence {valence} but its dependency sets are empty")]
    EmptyUnionMismatch { valence: usize },
    #[error("shape index {index} exceeds valence {valence}")]
    ExcessIndex { index: usize, valence: usize },
    #[error("unknown abstraction `{0}`")]
    UnknownAbstraction(Name),
    #[error("abstraction `{0}` is already declared")]
    DuplicateAbstraction(Name),
    #[error("abstraction `{name}` expects {expected} {what}, found {found}")]
    ArityMismatch {
        name: Name,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("abstraction `{0}` is used with a shape that differs from the signature")]
    ShapeMismatch(Name),
    #[error("binder `{0}` occurs twice")]
    DuplicateBinder(Name),
    #[error("premise binder `{0}` does not occur free in the body")]
    UnusedBinder(Name),
}

/// A variable together with the arity it is used at.
///
/// `x` at arity 0 and `x` at arity 1 are different variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarKey {
    pub name: Name,
    pub arity: usize,
}

impl VarKey {
    pub fn new(name: impl Into<Name>, arity: usize) -> Self {
        VarKey {
            name: name.into(),
            arity,
        }
    }
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// Binder dependency sets `[p_1, ..., p_n]` of an abstraction.
///
/// Argument `i` binds the binder slots listed in `p_i`, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    deps: Vec<Vec<usize>>,
    valence: usize,
}

impl Shape {
    /// Validates a shape, taking the valence to be the largest index used.
    pub fn new(deps: Vec<Vec<i64>>) -> Result<Shape, TermError> {
        let valence = deps.iter().flatten().copied().max().unwrap_or(0).max(0) as usize;
        Shape::with_valence(deps, valence)
    }

    /// Validates a shape against an explicitly declared valence.
    pub fn with_valence(deps: Vec<Vec<i64>>, valence: usize) -> Result<Shape, TermError> {
        let mut sets = Vec::with_capacity(deps.len());
        let mut covered = BTreeSet::new();
        for dep in deps {
            let mut set = BTreeSet::new();
            for idx in dep {
                if idx <= 0 {
                    return Err(TermError::NonPositiveIndex(idx));
                }
                let idx = idx as usize;
                if idx > valence {
                    return Err(TermError::ExcessIndex {
                        index: idx,
                        valence,
                    });
                }
                set.insert(idx);
                covered.insert(idx);
            }
            sets.push(set.into_iter().collect::<Vec<_>>());
        }
        if valence > 0 && covered.is_empty() {
            return Err(TermError::EmptyUnionMismatch { valence });
        }
        if let Some(gap) = (1..=valence).find(|j| !covered.contains(j)) {
            return Err(TermError::CoverageGap(gap));
        }
        Ok(Shape {
            deps: sets,
            valence,
        })
    }

    /// Shape of a value: no arguments, no binders.
    pub fn value() -> Shape {
        Shape {
            deps: Vec::new(),
            valence: 0,
        }
    }

    /// Shape `[{}, ..., {}]` of an `n`-ary operation.
    pub fn operation(n: usize) -> Shape {
        Shape {
            deps: vec![Vec::new(); n],
            valence: 0,
        }
    }

    /// Shape `[{1}]` of a quantifier-like abstraction.
    pub fn binder() -> Shape {
        Shape {
            deps: vec![vec![1]],
            valence: 1,
        }
    }

    pub fn arity(&self) -> usize {
        self.deps.len()
    }

    pub fn valence(&self) -> usize {
        self.valence
    }

    pub fn deps(&self) -> &[Vec<usize>] {
        &self.deps
    }

    /// Binder slots (1-based) bound by argument `i`.
    pub fn binds(&self, i: usize) -> &[usize] {
        &self.deps[i]
    }

    /// Operator shape `[|p_1|, ..., |p_n|]`.
    pub fn operator_shape(&self) -> Vec<usize> {
        self.deps.iter().map(Vec::len).collect()
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, dep) in self.deps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("{")?;
            for (j, idx) in dep.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{idx}")?;
            }
            f.write_str("}")?;
        }
        f.write_str("]")
    }
}

/// A set of abstraction names with their shapes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    abstractions: BTreeMap<Name, Arc<Shape>>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn add(&mut self, name: impl Into<Name>, shape: Shape) -> Result<(), TermError> {
        let name = name.into();
        if self.abstractions.contains_key(&name) {
            return Err(TermError::DuplicateAbstraction(name));
        }
        self.abstractions.insert(name, Arc::new(shape));
        Ok(())
    }

    pub fn with(mut self, name: &str, shape: Shape) -> Result<Self, TermError> {
        self.add(name, shape)?;
        Ok(self)
    }

    pub fn shape(&self, name: &str) -> Option<&Arc<Shape>> {
        self.abstractions.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.abstractions.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.abstractions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abstractions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Shape)> {
        self.abstractions.iter().map(|(n, s)| (n, s.as_ref()))
    }

    /// True if every abstraction of `self` appears in `other` with the same shape.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.abstractions
            .iter()
            .all(|(n, s)| other.abstractions.get(n).is_some_and(|t| t == s))
    }

    /// Builds the abstraction application `(a x_1 ... x_m. t_1 ... t_n)`.
    pub fn apply(
        &self,
        name: &str,
        binders: Vec<Name>,
        args: Vec<Term>,
    ) -> Result<Term, TermError> {
        let (name, shape) = self
            .abstractions
            .get_key_value(name)
            .ok_or_else(|| TermError::UnknownAbstraction(name.into()))?;
        if binders.len() != shape.valence() {
            return Err(TermError::ArityMismatch {
                name: name.clone(),
                what: "binders",
                expected: shape.valence(),
                found: binders.len(),
            });
        }
        if args.len() != shape.arity() {
            return Err(TermError::ArityMismatch {
                name: name.clone(),
                what: "arguments",
                expected: shape.arity(),
                found: args.len(),
            });
        }
        check_distinct(&binders)?;
        Ok(Term::Abs(AbsApp {
            name: name.clone(),
            shape: shape.clone(),
            binders,
            args,
        }))
    }

    /// Value abstraction applied to nothing, e.g. `T`.
    pub fn constant(&self, name: &str) -> Result<Term, TermError> {
        self.apply(name, Vec::new(), Vec::new())
    }

    /// Operation abstraction (valence 0) applied to arguments.
    pub fn op(&self, name: &str, args: Vec<Term>) -> Result<Term, TermError> {
        self.apply(name, Vec::new(), args)
    }

    /// Quantifier-like abstraction `(a x. body)`.
    pub fn bind(&self, name: &str, binder: &str, body: Term) -> Result<Term, TermError> {
        self.apply(name, vec![binder.into()], vec![body])
    }

    /// Checks that every abstraction used in `t` belongs to this signature
    /// with the same shape.
    pub fn check_term(&self, t: &Term) -> Result<(), TermError> {
        match t {
            Term::Var(_, args) => args.iter().try_for_each(|a| self.check_term(a)),
            Term::Abs(app) => {
                match self.abstractions.get(&app.name) {
                    None => return Err(TermError::UnknownAbstraction(app.name.clone())),
                    Some(shape) if **shape != *app.shape => {
                        return Err(TermError::ShapeMismatch(app.name.clone()))
                    }
                    Some(_) => {}
                }
                app.args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    pub fn check_template(&self, t: &Template) -> Result<(), TermError> {
        self.check_term(&t.body)
    }

    pub fn check_rule(&self, r: &Rule) -> Result<(), TermError> {
        for p in r.premises() {
            self.check_template(p.template())?;
        }
        self.check_term(r.conclusion())
    }

    /// Union of two signatures; shared names must agree on shape.
    pub fn merge(&self, other: &Signature) -> Result<Signature, TermError> {
        let mut out = self.clone();
        for (name, shape) in &other.abstractions {
            match out.abstractions.get(name) {
                Some(s) if s != shape => return Err(TermError::ShapeMismatch(name.clone())),
                Some(_) => {}
                None => {
                    out.abstractions.insert(name.clone(), shape.clone());
                }
            }
        }
        Ok(out)
    }

    /// Stable byte encoding used for logic digests.
    pub fn encode(&self, out: &mut Vec<u8>) {
        canonical::put_len(out, self.abstractions.len());
        for (name, shape) in &self.abstractions {
            canonical::put_str(out, name);
            canonical::put_len(out, shape.valence());
            canonical::put_len(out, shape.arity());
            for dep in shape.deps() {
                canonical::put_len(out, dep.len());
                for &idx in dep {
                    canonical::put_len(out, idx);
                }
            }
        }
    }
}

fn check_distinct(binders: &[Name]) -> Result<(), TermError> {
    let mut seen = BTreeSet::new();
    for b in binders {
        if !seen.insert(b) {
            return Err(TermError::DuplicateBinder(b.clone()));
        }
    }
    Ok(())
}

/// A term: variable application `x[t_1, ..., t_n]` or abstraction application.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name, Vec<Term>),
    Abs(AbsApp),
}

/// `(a x_1 ... x_m. t_1 ... t_n)`, validated against the shape of `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbsApp {
    name: Name,
    shape: Arc<Shape>,
    binders: Vec<Name>,
    args: Vec<Term>,
}

impl AbsApp {
    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn shape(&self) -> &Arc<Shape> {
        &self.shape
    }

    pub fn binders(&self) -> &[Name] {
        &self.binders
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    /// Names bound in argument `i`.
    pub fn bound_in(&self, i: usize) -> impl Iterator<Item = &Name> {
        self.shape.binds(i).iter().map(|&q| &self.binders[q - 1])
    }
}

impl Term {
    pub fn var(name: impl Into<Name>) -> Term {
        Term::Var(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<Name>, args: Vec<Term>) -> Term {
        Term::Var(name.into(), args)
    }

    /// Free variables, keyed by name and arity.
    pub fn free_variables(&self) -> BTreeSet<VarKey> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    /// Whether `name` occurs free with arity 0.
    pub fn has_free_value(&self, name: &str) -> bool {
        self.free_variables().contains(&VarKey::new(name, 0))
    }

    /// Abstraction names used, with multiplicity.
    pub fn abstraction_counts(&self) -> BTreeMap<Name, usize> {
        fn go(t: &Term, out: &mut BTreeMap<Name, usize>) {
            match t {
                Term::Var(_, args) => args.iter().for_each(|a| go(a, out)),
                Term::Abs(app) => {
                    *out.entry(app.name.clone()).or_default() += 1;
                    app.args.iter().for_each(|a| go(a, out));
                }
            }
        }
        let mut out = BTreeMap::new();
        go(self, &mut out);
        out
    }

    pub fn to_canonical(&self) -> CanonicalTerm {
        CanonicalTerm::from_term(self)
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.to_canonical() == other.to_canonical()
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Abs(app) => 1 + app.args.iter().map(Term::size).sum::<usize>(),
        }
    }
}

fn collect_free(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<VarKey>) {
    match t {
        Term::Var(x, args) => {
            if !(args.is_empty() && bound.contains(x)) {
                out.insert(VarKey::new(x.clone(), args.len()));
            }
            for a in args {
                collect_free(a, bound, out);
            }
        }
        Term::Abs(app) => {
            for (i, arg) in app.args.iter().enumerate() {
                let mark = bound.len();
                bound.extend(app.bound_in(i).cloned());
                collect_free(arg, bound, out);
                bound.truncate(mark);
            }
        }
    }
}

/// `[x_1 ... x_n. body]`; binders bind arity-0 occurrences in the body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Template {
    binders: Vec<Name>,
    body: Term,
}

impl Template {
    pub fn new(binders: Vec<Name>, body: Term) -> Result<Template, TermError> {
        check_distinct(&binders)?;
        Ok(Template { binders, body })
    }

    /// A 0-ary template is its body.
    pub fn term(body: Term) -> Template {
        Template {
            binders: Vec::new(),
            body,
        }
    }

    pub fn binders(&self) -> &[Name] {
        &self.binders
    }

    pub fn body(&self) -> &Term {
        &self.body
    }

    pub fn arity(&self) -> usize {
        self.binders.len()
    }

    pub fn free_variables(&self) -> BTreeSet<VarKey> {
        let mut out = BTreeSet::new();
        let mut bound = self.binders.clone();
        collect_free(&self.body, &mut bound, &mut out);
        out
    }

    pub fn to_canonical(&self) -> CanonicalTemplate {
        CanonicalTemplate::from_template(self)
    }

    pub fn alpha_eq(&self, other: &Template) -> bool {
        self.to_canonical() == other.to_canonical()
    }
}

/// A template whose binders all occur free in its body; binder order is
/// irrelevant and normalised to first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Premise {
    template: Template,
    canonical: CanonicalTemplate,
    key: Vec<u8>,
}

impl Premise {
    pub fn new(template: Template) -> Result<Premise, TermError> {
        let body_free = template.body.free_variables();
        if let Some(b) = template
            .binders
            .iter()
            .find(|b| !body_free.contains(&VarKey::new((*b).clone(), 0)))
        {
            return Err(TermError::UnusedBinder(b.clone()));
        }
        let order = template.to_canonical().first_occurrence_order();
        let binders = order.iter().map(|&i| template.binders[i].clone()).collect();
        let template = Template {
            binders,
            body: template.body,
        };
        let canonical = template.to_canonical();
        let mut key = Vec::new();
        canonical.encode(&mut key);
        Ok(Premise {
            template,
            canonical,
            key,
        })
    }

    /// Premise without binders.
    pub fn term(body: Term) -> Premise {
        Premise::new(Template::term(body)).expect("0-ary premise has no binders")
    }

    /// Builds a premise after dropping binders that do not occur in the body.
    pub fn pruned(template: Template) -> Premise {
        let free = template.body.free_variables();
        let binders = template
            .binders
            .into_iter()
            .filter(|b| free.contains(&VarKey::new(b.clone(), 0)))
            .collect();
        Premise::new(Template {
            binders,
            body: template.body,
        })
        .expect("unused binders were removed")
    }

    pub fn template(&self) -> &Template {
        &self.template
    }

    pub fn canonical(&self) -> &CanonicalTemplate {
        &self.canonical
    }

    pub fn key(&self) -> &[u8] {
        &self.key
    }
}

/// A rule `(P, c)`: a finite set of premisses and a conclusion.
///
/// Premisses are sorted by canonical encoding and deduplicated, which makes
/// the rule's encoding stable under α-renaming and premise reordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    premises: Vec<Premise>,
    conclusion: Term,
    key: Vec<u8>,
}

impl Rule {
    pub fn new(premises: Vec<Premise>, conclusion: Term) -> Rule {
        let mut premises = premises;
        premises.sort_by(|a, b| a.key.cmp(&b.key));
        premises.dedup_by(|a, b| a.key == b.key);
        let mut key = Vec::new();
        canonical::put_len(&mut key, premises.len());
        for p in &premises {
            canonical::put_bytes(&mut key, &p.key);
        }
        conclusion.to_canonical().encode(&mut key);
        Rule {
            premises,
            conclusion,
            key,
        }
    }

    pub fn axiom(conclusion: Term) -> Rule {
        Rule::new(Vec::new(), conclusion)
    }

    pub fn premises(&self) -> &[Premise] {
        &self.premises
    }

    pub fn conclusion(&self) -> &Term {
        &self.conclusion
    }

    pub fn is_axiom(&self) -> bool {
        self.premises.is_empty()
    }

    /// Canonical byte encoding; equal iff the rules are α-equivalent.
    pub fn key(&self) -> &[u8] {
        &self.key
    }

    pub fn alpha_eq(&self, other: &Rule) -> bool {
        self.key == other.key
    }

    pub fn free_variables(&self) -> BTreeSet<VarKey> {
        let mut out = self.conclusion.free_variables();
        for p in &self.premises {
            out.extend(p.template.free_variables());
        }
        out
    }

    /// Position of the premise α-equivalent to `template`, if any.
    pub fn premise_index(&self, template: &Template) -> Option<usize> {
        let wanted = Premise::new(template.clone()).ok()?;
        self.premises.iter().position(|p| p.key == wanted.key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn le_sig() -> Signature {
        Signature::new()
            .with("T", Shape::value())
            .unwrap()
            .with("=>", Shape::operation(2))
            .unwrap()
            .with("==", Shape::operation(2))
            .unwrap()
            .with("forall", Shape::binder())
            .unwrap()
    }

    fn x() -> Term {
        Term::var("x")
    }

    #[test]
    fn shape_validation() {
        let s = Shape::new(vec![vec![1], vec![2]]).unwrap();
        assert_eq!((s.arity(), s.valence()), (2, 2));
        let v = Shape::new(vec![]).unwrap();
        assert_eq!((v.arity(), v.valence()), (0, 0));
        assert_eq!(
            Shape::new(vec![vec![1], vec![3]]),
            Err(TermError::CoverageGap(2))
        );
        assert_eq!(
            Shape::new(vec![vec![0]]),
            Err(TermError::NonPositiveIndex(0))
        );
        assert_eq!(
            Shape::with_valence(vec![vec![], vec![]], 1),
            Err(TermError::EmptyUnionMismatch { valence: 1 })
        );
        assert_eq!(
            Shape::with_valence(vec![vec![2]], 1),
            Err(TermError::ExcessIndex {
                index: 2,
                valence: 1
            })
        );
        let op = Shape::new(vec![vec![], vec![]]).unwrap();
        assert_eq!((op.arity(), op.valence()), (2, 0));
        assert_eq!(op, Shape::operation(2));
        assert_eq!(Shape::new(vec![vec![1, 1]]).unwrap(), Shape::binder());
    }

    #[test]
    fn free_variables_track_arity() {
        let t = Term::app("x", vec![x()]);
        let fv = t.free_variables();
        assert_eq!(
            fv.into_iter().collect::<Vec<_>>(),
            vec![VarKey::new("x", 0), VarKey::new("x", 1)]
        );

        let sig = le_sig();
        let closed = sig.bind("forall", "x", x()).unwrap();
        assert!(closed.free_variables().is_empty());

        let t = sig.bind("forall", "x", Term::app("y", vec![x()])).unwrap();
        assert_eq!(
            t.free_variables().into_iter().collect::<Vec<_>>(),
            vec![VarKey::new("y", 1)]
        );

        // x bound by forall only covers arity-0 occurrences
        let t = sig.bind("forall", "x", Term::app("x", vec![x()])).unwrap();
        assert_eq!(
            t.free_variables().into_iter().collect::<Vec<_>>(),
            vec![VarKey::new("x", 1)]
        );
    }

    #[test]
    fn apply_checks_shape() {
        let sig = le_sig();
        assert!(matches!(
            sig.apply("forall", vec!["x".into(), "y".into()], vec![x()]),
            Err(TermError::ArityMismatch {
                what: "binders",
                ..
            })
        ));
        assert!(matches!(
            sig.op("=>", vec![x()]),
            Err(TermError::ArityMismatch {
                what: "arguments",
                ..
            })
        ));
        assert_eq!(
            sig.constant("F"),
            Err(TermError::UnknownAbstraction("F".into()))
        );
        let shape = Shape::new(vec![vec![1], vec![2]]).unwrap();
        let sig2 = Signature::new().with("pair", shape).unwrap();
        assert_eq!(
            sig2.apply("pair", vec!["a".into(), "a".into()], vec![x(), x()]),
            Err(TermError::DuplicateBinder("a".into()))
        );
    }

    #[test]
    fn check_term_against_other_signature() {
        let sig = le_sig();
        let t = sig.op("=>", vec![x(), x()]).unwrap();
        assert!(sig.check_term(&t).is_ok());
        let other = Signature::new().with("=>", Shape::operation(3)).unwrap();
        assert_eq!(
            other.check_term(&t),
            Err(TermError::ShapeMismatch("=>".into()))
        );
        assert_eq!(
            Signature::new().check_term(&t),
            Err(TermError::UnknownAbstraction("=>".into()))
        );
    }

    #[test]
    fn premise_canonical_order() {
        let sig = le_sig();
        let body = sig.op("==", vec![x(), Term::var("y")]).unwrap();
        let p = Premise::new(Template::new(vec!["y".into(), "x".into()], body.clone()).unwrap())
            .unwrap();
        let names: Vec<&str> = p.template().binders().iter().map(|n| &**n).collect();
        assert_eq!(names, ["x", "y"]);

        let unused = Template::new(vec!["x".into()], sig.constant("T").unwrap()).unwrap();
        assert_eq!(
            Premise::new(unused),
            Err(TermError::UnusedBinder("x".into()))
        );

        let pp = Template::new(vec!["x".into()], Term::app("P", vec![x()])).unwrap();
        let prem = Premise::new(pp.clone()).unwrap();
        assert_eq!(prem.template(), &pp);
    }

    #[test]
    fn rule_alpha_equivalence() {
        let sig = le_sig();
        let imp = |a: Term, b: Term| sig.op("=>", vec![a, b]).unwrap();
        let mp = |a: &str, b: &str| {
            Rule::new(
                vec![
                    Premise::term(imp(Term::var(a), Term::var(b))),
                    Premise::term(Term::var(a)),
                ],
                Term::var(b),
            )
        };
        assert!(mp("A", "B").alpha_eq(&mp("A", "B")));
        // free metavariables are not binders; renaming them changes the rule
        assert!(!mp("A", "B").alpha_eq(&mp("X", "Y")));
        let swapped = Rule::new(
            vec![
                Premise::term(Term::var("A")),
                Premise::term(imp(Term::var("A"), Term::var("B"))),
            ],
            Term::var("B"),
        );
        assert!(mp("A", "B").alpha_eq(&swapped));

        let ui = |b: &str, c: &str| {
            Rule::new(
                vec![Premise::new(
                    Template::new(vec![b.into()], Term::app("P", vec![Term::var(b)])).unwrap(),
                )
                .unwrap()],
                sig.bind("forall", c, Term::app("P", vec![Term::var(c)]))
                    .unwrap(),
            )
        };
        assert!(ui("x", "x").alpha_eq(&ui("y", "z")));
        assert!(!mp("A", "B").alpha_eq(&ui("x", "x")));

        // duplicate premisses collapse
        let dup = Rule::new(vec![Premise::term(x()), Premise::term(x())], Term::var("y"));
        assert_eq!(dup.premises().len(), 1);
    }
}
