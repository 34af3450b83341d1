use std::sync::Arc;

use super::{KernelError, Logic, Theorem};
use crate::subst::Substitution;
use crate::terms::{Name, Rule};

/// A proof tree. Each node may declare the rule it is meant to establish;
/// [`check_proof`] verifies the declaration up to α-equivalence.
#[derive(Debug, Clone)]
pub enum Proof {
    Truism {
        rule: Name,
        target: Option<Rule>,
    },
    Subst {
        sub: Arc<Proof>,
        sigma: Substitution,
        target: Option<Rule>,
    },
    /// `premise` is a 0-based index into the major theorem's premisses.
    Infer {
        major: Arc<Proof>,
        premise: usize,
        minor: Arc<Proof>,
        target: Option<Rule>,
    },
}

impl Proof {
    pub fn target(&self) -> Option<&Rule> {
        match self {
            Proof::Truism { target, .. }
            | Proof::Subst { target, .. }
            | Proof::Infer { target, .. } => target.as_ref(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Proof::Truism { .. } => 1,
            Proof::Subst { sub, .. } => 1 + sub.size(),
            Proof::Infer { major, minor, .. } => 1 + major.size() + minor.size(),
        }
    }
}

/// Replays `proof` through the kernel.
pub fn check_proof(logic: &Logic, proof: &Proof) -> Result<Theorem, KernelError> {
    let thm = match proof {
        Proof::Truism { rule, .. } => logic.truism(rule)?,
        Proof::Subst { sub, sigma, .. } => logic.subst(&check_proof(logic, sub)?, sigma)?,
        Proof::Infer {
            major,
            premise,
            minor,
            ..
        } => {
            let major = check_proof(logic, major)?;
            let minor = check_proof(logic, minor)?;
            logic.infer(&major, *premise, &minor)?
        }
    };
    match proof.target() {
        Some(expected) if !expected.alpha_eq(thm.rule()) => Err(KernelError::TargetMismatch {
            expected: Box::new(expected.clone()),
            computed: Box::new(thm.rule().clone()),
        }),
        _ => Ok(thm),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{Premise, Term};
    use crate::theories::{le_signature, logic_e};

    #[test]
    fn replay_with_targets() {
        let le = logic_e();
        let sig = le_signature();
        let t = sig.constant("T").unwrap();
        let truth2 = Arc::new(Proof::Truism {
            rule: "Truth2".into(),
            target: None,
        });
        let inst = Proof::Subst {
            sub: truth2,
            sigma: Substitution::new().with_term("A", t.clone()),
            target: Some(Rule::axiom(
                sig.op(
                    "=>",
                    vec![t.clone(), sig.op("==", vec![t.clone(), t.clone()]).unwrap()],
                )
                .unwrap(),
            )),
        };
        assert!(check_proof(&le, &inst).is_ok());
        assert_eq!(inst.size(), 2);

        let wrong = Proof::Truism {
            rule: "Truth1".into(),
            target: Some(Rule::axiom(Term::var("x"))),
        };
        assert!(matches!(
            check_proof(&le, &wrong),
            Err(KernelError::TargetMismatch { .. })
        ));
    }

    #[test]
    fn modus_ponens_with_truth() {
        // T, T ⇒ (T == T) ⊢ T == T
        let le = logic_e();
        let sig = le_signature();
        let t = sig.constant("T").unwrap();
        let tt = sig.op("==", vec![t.clone(), t.clone()]).unwrap();
        let mp = Arc::new(Proof::Subst {
            sub: Arc::new(Proof::Truism {
                rule: "ModusPonens".into(),
                target: None,
            }),
            sigma: Substitution::new()
                .with_term("A", t.clone())
                .with_term("B", tt.clone()),
            target: None,
        });
        let imp_premise = Premise::term(sig.op("=>", vec![t.clone(), tt.clone()]).unwrap());
        let mp_thm = check_proof(&le, &mp).unwrap();
        let i = mp_thm
            .rule()
            .premises()
            .iter()
            .position(|p| p.key() == imp_premise.key())
            .unwrap();
        let step = Arc::new(Proof::Infer {
            major: mp,
            premise: i,
            minor: Arc::new(Proof::Subst {
                sub: Arc::new(Proof::Truism {
                    rule: "Truth2".into(),
                    target: None,
                }),
                sigma: Substitution::new().with_term("A", t.clone()),
                target: None,
            }),
            target: None,
        });
        let done = Proof::Infer {
            major: step,
            premise: 0,
            minor: Arc::new(Proof::Truism {
                rule: "Truth1".into(),
                target: None,
            }),
            target: Some(Rule::axiom(tt)),
        };
        assert!(check_proof(&le, &done).unwrap().rule().is_axiom());
    }
}
