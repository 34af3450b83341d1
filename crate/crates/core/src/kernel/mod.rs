//! The trusted kernel.
//!
//! A [`Theorem`] can only be obtained from a [`Logic`] through
//! [`Logic::truism`], [`Logic::subst`] and [`Logic::infer`] (or by replaying
//! a [`Proof`]). Every theorem is sealed with the digest of the logic that
//! produced it, and the kernel refuses to combine theorems across logics.

mod proof;
mod script;

use std::collections::BTreeSet;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::subst::Substitution;
use crate::terms::{
    canonical, CanonicalTemplate, CanonicalTerm, Name, Nameless, Premise, Rule, Signature,
    Template, Term, TermError, VarKey,
};

pub use proof::{check_proof, Proof};
pub use script::{Script, ScriptError, Step, StepKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("no inference rule named `{0}`")]
    UnknownRule(Name),
    #[error("inference rule `{0}` is declared twice")]
    DuplicateRuleName(Name),
    #[error("rule `{name}` is malformed: {reason}")]
    MalformedRule { name: Name, reason: TermError },
    #[error("rule `{rule}` uses unknown abstraction `{abstraction}`")]
    UnknownAbstraction { rule: Name, abstraction: Name },
    #[error("abstraction `{0}` already belongs to the base logic")]
    NameClash(Name),
    #[error("rule `{0}` has premisses; an axiomatic extension may only add axioms")]
    NotAnAxiom(Name),
    #[error("theorem belongs to a different logic")]
    LogicMismatch,
    #[error("substitution is not well-formed over the logic's signature: {0}")]
    SignatureMismatch(TermError),
    #[error("premise index {index} out of range for a rule with {count} premisses")]
    BadIndex { index: usize, count: usize },
    #[error("conclusion of the minor theorem does not match the selected premise")]
    PremiseMismatch,
    #[error("declared rule does not match the derived rule")]
    TargetMismatch {
        expected: Box<Rule>,
        computed: Box<Rule>,
    },
    #[error("logic does not contain the rules of deduction logic with equality")]
    NotAnExtension,
    #[error("theorem is not `forall x. x`")]
    NotForallXX,
}

/// Digest identifying a logic: its signature and named inference rules.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LogicId([u8; 32]);

impl fmt::Debug for LogicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogicId({self})")
    }
}

impl fmt::Display for LogicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0[..8] {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// A signature with named inference rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Logic {
    signature: Signature,
    rules: Vec<(Name, Rule)>,
    id: LogicId,
}

impl Logic {
    pub fn new(signature: Signature, rules: Vec<(Name, Rule)>) -> Result<Logic, KernelError> {
        for (i, (name, rule)) in rules.iter().enumerate() {
            if rules[..i].iter().any(|(n, _)| n == name) {
                return Err(KernelError::DuplicateRuleName(name.clone()));
            }
            signature.check_rule(rule).map_err(|e| match e {
                TermError::UnknownAbstraction(a) => KernelError::UnknownAbstraction {
                    rule: name.clone(),
                    abstraction: a,
                },
                reason => KernelError::MalformedRule {
                    name: name.clone(),
                    reason,
                },
            })?;
        }
        let mut bytes = Vec::new();
        signature.encode(&mut bytes);
        canonical::put_len(&mut bytes, rules.len());
        for (name, rule) in &rules {
            canonical::put_str(&mut bytes, name);
            canonical::put_bytes(&mut bytes, rule.key());
        }
        let id = LogicId(Sha256::digest(&bytes).into());
        Ok(Logic {
            signature,
            rules,
            id,
        })
    }

    /// Adds abstractions and premise-free rules to `base`.
    pub fn axiomatic_extension(
        base: &Logic,
        additions: &Signature,
        axioms: Vec<(Name, Rule)>,
    ) -> Result<Logic, KernelError> {
        if let Some((name, _)) = additions.iter().find(|(n, _)| base.signature.contains(n)) {
            return Err(KernelError::NameClash(name.clone()));
        }
        if let Some((name, _)) = axioms.iter().find(|(_, r)| !r.is_axiom()) {
            return Err(KernelError::NotAnAxiom(name.clone()));
        }
        let signature = base
            .signature
            .merge(additions)
            .expect("disjoint signatures merge");
        let mut rules = base.rules.clone();
        rules.extend(axioms);
        Logic::new(signature, rules)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[(Name, Rule)] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules
            .iter()
            .find(|(n, _)| &**n == name)
            .map(|(_, r)| r)
    }

    pub fn id(&self) -> LogicId {
        self.id
    }

    /// Whether `self` has every abstraction of `base` with the same shape,
    /// an α-equivalent copy of every rule of `base`, and only axioms besides.
    pub fn is_axiomatic_extension_of(&self, base: &Logic) -> bool {
        if !base.signature.is_subsignature_of(&self.signature) {
            return false;
        }
        let has = |r: &Rule| self.rules.iter().any(|(_, s)| s.alpha_eq(r));
        if !base.rules.iter().all(|(_, r)| has(r)) {
            return false;
        }
        self.rules
            .iter()
            .all(|(_, r)| r.is_axiom() || base.rules.iter().any(|(_, b)| b.alpha_eq(r)))
    }

    fn seal(&self, rule: Rule) -> Theorem {
        Theorem {
            rule,
            logic: self.id,
        }
    }

    fn owns(&self, thm: &Theorem) -> Result<(), KernelError> {
        if thm.logic == self.id {
            Ok(())
        } else {
            Err(KernelError::LogicMismatch)
        }
    }

    /// `True(r)` for the inference rule named `name`.
    pub fn truism(&self, name: &str) -> Result<Theorem, KernelError> {
        self.rule(name)
            .map(|r| self.seal(r.clone()))
            .ok_or_else(|| KernelError::UnknownRule(name.into()))
    }

    /// `Subst(σ/r, p_r, σ)`.
    pub fn subst(&self, thm: &Theorem, sigma: &Substitution) -> Result<Theorem, KernelError> {
        self.owns(thm)?;
        for (_, template) in sigma.iter() {
            self.signature
                .check_template(template)
                .map_err(KernelError::SignatureMismatch)?;
        }
        Ok(self.seal(sigma.apply_to_rule(&thm.rule)))
    }

    /// Discharges premise `index` of `major` with `minor`.
    ///
    /// The selected premise `[x_1 ... x_k. h]` may be renamed: its binders
    /// are matched against free variables of the minor conclusion. Premisses
    /// of `minor` receive those matched variables that occur free in them as
    /// additional leading binders.
    pub fn infer(
        &self,
        major: &Theorem,
        index: usize,
        minor: &Theorem,
    ) -> Result<Theorem, KernelError> {
        self.owns(major)?;
        self.owns(minor)?;
        let premises = major.rule.premises();
        let selected = premises.get(index).ok_or(KernelError::BadIndex {
            index,
            count: premises.len(),
        })?;
        let frame = match_frame(selected, &minor.rule.conclusion().to_canonical())
            .ok_or(KernelError::PremiseMismatch)?;

        let avoid: BTreeSet<Name> = frame.iter().cloned().collect();
        let mut out: Vec<Premise> = Vec::new();
        for g in minor.rule.premises() {
            let renamed = g.canonical().to_template_avoiding(&avoid);
            let free = renamed.body().free_variables();
            let mut binders: Vec<Name> = frame
                .iter()
                .filter(|x| free.contains(&VarKey::new((*x).clone(), 0)))
                .cloned()
                .collect();
            binders.extend(renamed.binders().iter().cloned());
            let extended = Template::new(binders, renamed.body().clone())
                .expect("frame names differ from the renamed binders");
            out.push(Premise::new(extended).expect("every binder occurs in the body"));
        }
        out.extend(
            premises
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != index)
                .map(|(_, p)| p.clone()),
        );
        Ok(self.seal(Rule::new(out, major.rule.conclusion().clone())))
    }

    /// From `⊢ ∀x. x` derives `⊢ t`, using Universal₁ and Modus Ponens.
    pub fn explosion(&self, forall_x_x: &Theorem, t: &Term) -> Result<Theorem, KernelError> {
        self.owns(forall_x_x)?;
        let le = crate::theories::logic_e();
        let find = |name: &str| -> Result<&Name, KernelError> {
            let wanted = le.rule(name).expect("rule of L_E");
            self.rules
                .iter()
                .find(|(_, r)| r.alpha_eq(wanted))
                .map(|(n, _)| n)
                .ok_or(KernelError::NotAnExtension)
        };
        let universal1 = find("Universal1")?;
        let modus_ponens = find("ModusPonens")?;
        let all_x = self
            .signature
            .bind("forall", "x", Term::var("x"))
            .map_err(|_| KernelError::NotAnExtension)?;
        if !forall_x_x.rule.alpha_eq(&Rule::axiom(all_x.clone())) {
            return Err(KernelError::NotForallXX);
        }

        // (∀x. x) ⇒ x
        let u1 = self.truism(universal1)?;
        let a = u1
            .rule
            .conclusion()
            .free_variables()
            .into_iter()
            .find(|k| k.arity == 1)
            .expect("Universal1 has one predicate variable");
        let id = Template::new(vec!["x".into()], Term::var("x")).expect("single binder");
        let mut sigma = Substitution::new();
        sigma.insert(a, id).expect("identity template has arity 1");
        let step = self.subst(&u1, &sigma)?;
        let (ante, cons) =
            split_implication(step.rule.conclusion()).expect("Universal1 concludes an implication");

        // Modus Ponens instance ({(∀x. x) ⇒ x, ∀x. x}, x)
        let mp = self.truism(modus_ponens)?;
        let (mp_a, mp_b) = modus_ponens_vars(&mp.rule).ok_or(KernelError::NotAnExtension)?;
        let inst = self.subst(
            &mp,
            &Substitution::new()
                .with_term(&mp_a, ante.clone())
                .with_term(&mp_b, cons.clone()),
        )?;
        let imp_index = inst
            .rule
            .premise_index(&Template::term(step.rule.conclusion().clone()))
            .expect("instance has the implication premise");
        let half = self.infer(&inst, imp_index, &step)?;
        let ante_index = half
            .rule
            .premise_index(&Template::term(ante))
            .expect("instance has the antecedent premise");
        let bare = self.infer(&half, ante_index, forall_x_x)?;

        // ⊢ x, then x := t
        let x = match bare.rule.conclusion() {
            Term::Var(x, args) if args.is_empty() => x.clone(),
            _ => unreachable!("explosion derives a bare variable"),
        };
        self.subst(&bare, &Substitution::new().with_term(&x, t.clone()))
    }
}

/// `(a ⇒ b)` split into `a` and `b`.
pub fn split_implication(t: &Term) -> Option<(Term, Term)> {
    match t {
        Term::Abs(app) if &**app.name() == "=>" && app.args().len() == 2 => {
            Some((app.args()[0].clone(), app.args()[1].clone()))
        }
        _ => None,
    }
}

/// Names of `A` and `B` in a rule of the form `({A ⇒ B, A}, B)`.
pub(crate) fn modus_ponens_vars(rule: &Rule) -> Option<(Name, Name)> {
    let b = match rule.conclusion() {
        Term::Var(b, args) if args.is_empty() => b.clone(),
        _ => return None,
    };
    rule.premises().iter().find_map(|p| {
        let (a, b2) = split_implication(p.template().body())?;
        match (a, b2) {
            (Term::Var(a, xs), Term::Var(b2, ys)) if xs.is_empty() && ys.is_empty() && b2 == b => {
                Some((a, b.clone()))
            }
            _ => None,
        }
    })
}

/// Finds names `y_1, ..., y_k` such that renaming the binders of `premise`
/// to them makes its body α-equivalent to `conclusion`. The names must be
/// distinct and must not occur free (at arity 0) in the premise.
fn match_frame(premise: &Premise, conclusion: &CanonicalTerm) -> Option<Vec<Name>> {
    let canonical: &CanonicalTemplate = premise.canonical();
    let k = canonical.arity();
    let mut frame: Vec<Option<Name>> = vec![None; k];
    if !match_nameless(&canonical.body, &conclusion.0, 0, k, &mut frame) {
        return None;
    }
    let frame: Vec<Name> = frame.into_iter().collect::<Option<_>>()?;
    let distinct: BTreeSet<&Name> = frame.iter().collect();
    if distinct.len() != frame.len() {
        return None;
    }
    let free = premise.template().free_variables();
    if frame
        .iter()
        .any(|y| free.contains(&VarKey::new(y.clone(), 0)))
    {
        return None;
    }
    // order the frame like the premise's binders
    Some(frame)
}

fn match_nameless(
    pattern: &Nameless,
    target: &Nameless,
    depth: usize,
    arity: usize,
    frame: &mut [Option<Name>],
) -> bool {
    match (pattern, target) {
        (Nameless::Bound(i), _) if (*i as usize) >= depth => {
            let b = arity - 1 - (*i as usize - depth);
            match target {
                Nameless::Var(y, args) if args.is_empty() => match &frame[b] {
                    Some(prev) => prev == y,
                    None => {
                        frame[b] = Some(y.clone());
                        true
                    }
                },
                _ => false,
            }
        }
        (Nameless::Bound(i), Nameless::Bound(j)) => i == j,
        (Nameless::Var(x, xs), Nameless::Var(y, ys)) => {
            x == y
                && xs.len() == ys.len()
                && xs
                    .iter()
                    .zip(ys)
                    .all(|(a, b)| match_nameless(a, b, depth, arity, frame))
        }
        (
            Nameless::Abs {
                name: a,
                shape: sa,
                args: xs,
                ..
            },
            Nameless::Abs {
                name: b,
                shape: sb,
                args: ys,
                ..
            },
        ) => {
            a == b
                && sa == sb
                && xs.iter().zip(ys).enumerate().all(|(i, (x, y))| {
                    match_nameless(x, y, depth + sa.binds(i).len(), arity, frame)
                })
        }
        _ => false,
    }
}

/// A rule certified by the kernel, sealed to the logic that proved it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem {
    rule: Rule,
    logic: LogicId,
}

impl Theorem {
    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn logic(&self) -> LogicId {
        self.logic
    }
}
