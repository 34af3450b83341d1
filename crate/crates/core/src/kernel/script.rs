use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::{KernelError, Logic, Proof, Theorem};
use crate::subst::Substitution;
use crate::terms::{Name, Rule};

/// One line of a proof script.
#[derive(Debug, Clone)]
pub enum StepKind {
    Rule(Name),
    Subst {
        of: Name,
        sigma: Substitution,
    },
    /// `premise` is 0-based.
    Infer {
        major: Name,
        premise: usize,
        minor: Name,
    },
}

#[derive(Debug, Clone)]
pub struct Step {
    pub name: Name,
    pub kind: StepKind,
    pub expect: Option<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("unknown theorem `{0}`")]
    UnknownTheoremName(Name),
    #[error("theorem `{0}` is defined twice")]
    DuplicateTheoremName(Name),
    #[error("step `{step}`: {error}")]
    Kernel { step: Name, error: KernelError },
}

/// A sequence of named proof steps, each referring to earlier ones.
#[derive(Debug, Clone, Default)]
pub struct Script {
    pub steps: Vec<Step>,
}

impl Script {
    /// Checks that every name is defined once and before it is used.
    pub fn check_names(&self) -> Result<(), (usize, ScriptError)> {
        let mut seen: BTreeMap<&Name, ()> = BTreeMap::new();
        for (i, s) in self.steps.iter().enumerate() {
            let refs: Vec<&Name> = match &s.kind {
                StepKind::Rule(_) => vec![],
                StepKind::Subst { of, .. } => vec![of],
                StepKind::Infer { major, minor, .. } => vec![major, minor],
            };
            if let Some(missing) = refs.into_iter().find(|n| !seen.contains_key(n)) {
                return Err((i, ScriptError::UnknownTheoremName(missing.clone())));
            }
            if seen.insert(&s.name, ()).is_some() {
                return Err((i, ScriptError::DuplicateTheoremName(s.name.clone())));
            }
        }
        Ok(())
    }

    /// Replays every step through the kernel, in order.
    pub fn replay(&self, logic: &Logic) -> Result<Vec<(Name, Theorem)>, (usize, ScriptError)> {
        self.check_names()?;
        let mut done: Vec<(Name, Theorem)> = Vec::with_capacity(self.steps.len());
        let lookup = |done: &[(Name, Theorem)], n: &Name| -> Theorem {
            done.iter()
                .rev()
                .find(|(m, _)| m == n)
                .map(|(_, t)| t.clone())
                .expect("names checked")
        };
        for (i, s) in self.steps.iter().enumerate() {
            let kernel = |error| {
                (
                    i,
                    ScriptError::Kernel {
                        step: s.name.clone(),
                        error,
                    },
                )
            };
            let thm = match &s.kind {
                StepKind::Rule(r) => logic.truism(r),
                StepKind::Subst { of, sigma } => logic.subst(&lookup(&done, of), sigma),
                StepKind::Infer {
                    major,
                    premise,
                    minor,
                } => logic.infer(&lookup(&done, major), *premise, &lookup(&done, minor)),
            }
            .map_err(kernel)?;
            if let Some(expected) = &s.expect {
                if !expected.alpha_eq(thm.rule()) {
                    return Err(kernel(KernelError::TargetMismatch {
                        expected: Box::new(expected.clone()),
                        computed: Box::new(thm.rule().clone()),
                    }));
                }
            }
            done.push((s.name.clone(), thm));
        }
        Ok(done)
    }

    /// The proof tree of every step, keyed by step name.
    pub fn proofs(&self) -> Result<BTreeMap<Name, Proof>, (usize, ScriptError)> {
        self.check_names()?;
        let mut out: BTreeMap<Name, Arc<Proof>> = BTreeMap::new();
        for s in &self.steps {
            let target = s.expect.clone();
            let p = match &s.kind {
                StepKind::Rule(r) => Proof::Truism {
                    rule: r.clone(),
                    target,
                },
                StepKind::Subst { of, sigma } => Proof::Subst {
                    sub: out[of].clone(),
                    sigma: sigma.clone(),
                    target,
                },
                StepKind::Infer {
                    major,
                    premise,
                    minor,
                } => Proof::Infer {
                    major: out[major].clone(),
                    premise: *premise,
                    minor: out[minor].clone(),
                    target,
                },
            };
            out.insert(s.name.clone(), Arc::new(p));
        }
        Ok(out
            .into_iter()
            .map(|(n, p)| (n, Arc::unwrap_or_clone(p)))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check_proof;
    use crate::terms::Term;
    use crate::theories::{le_signature, logic_e};

    fn step(name: &str, kind: StepKind) -> Step {
        Step {
            name: name.into(),
            kind,
            expect: None,
        }
    }

    #[test]
    fn replay_and_trees_agree() {
        let le = logic_e();
        let t = le_signature().constant("T").unwrap();
        let script = Script {
            steps: vec![
                step("e1", StepKind::Rule("Equality1".into())),
                Step {
                    name: "tt".into(),
                    kind: StepKind::Subst {
                        of: "e1".into(),
                        sigma: Substitution::new().with_term("x", t.clone()),
                    },
                    expect: Some(Rule::axiom(
                        le_signature().op("==", vec![t.clone(), t]).unwrap(),
                    )),
                },
            ],
        };
        let done = script.replay(&le).unwrap();
        let proofs = script.proofs().unwrap();
        assert_eq!(
            check_proof(&le, &proofs["tt"]).unwrap().rule(),
            done[1].1.rule()
        );
    }

    #[test]
    fn name_errors() {
        let le = logic_e();
        let script = Script {
            steps: vec![step(
                "a",
                StepKind::Subst {
                    of: "nope".into(),
                    sigma: Substitution::new(),
                },
            )],
        };
        assert_eq!(
            script.replay(&le).unwrap_err(),
            (0, ScriptError::UnknownTheoremName("nope".into()))
        );
        let script = Script {
            steps: vec![
                step("a", StepKind::Rule("Truth1".into())),
                step("a", StepKind::Rule("Truth1".into())),
            ],
        };
        assert_eq!(
            script.replay(&le).unwrap_err(),
            (1, ScriptError::DuplicateTheoremName("a".into()))
        );
        let script = Script {
            steps: vec![Step {
                name: "a".into(),
                kind: StepKind::Rule("Truth1".into()),
                expect: Some(Rule::axiom(Term::var("x"))),
            }],
        };
        assert!(matches!(
            script.replay(&le).unwrap_err().1,
            ScriptError::Kernel {
                error: KernelError::TargetMismatch { .. },
                ..
            }
        ));
    }
}
