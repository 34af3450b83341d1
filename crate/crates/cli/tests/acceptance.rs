//! Acceptance suite: one PASS/FAIL line per criterion.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use abslogic::gen::{
    alpha_eq_named, naive_eval, random_model, random_valuation, rename_binders, test_signature,
    TermGen,
};
use abslogic::kernel::{check_proof, Logic, Theorem};
use abslogic::semantics::{
    check_model, check_rule_valid, degenerate_model, eval_term, standard_two_element_model, Elem,
    Model, OpTable, Validity, Valuation, DEFAULT_CAP,
};
use abslogic::subst::Substitution;
use abslogic::syntax::{
    parse_model, parse_proof_script, parse_rule, parse_template, parse_term, parse_theory,
    print_model, print_proof_script, print_term, print_theory,
};
use abslogic::terms::{Rule, Term, VarKey};
use abslogic::theories::{
    derived_proofs_e, expected_rule, inconsistent_logic_demo, le_signature, logic_e, logic_peano,
    two_element_le_interpretations, two_element_models_of,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn library() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../library")
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure!(elapsed < limit, "took {elapsed:?}, limit {limit:?}");
    Ok(())
}

/// Every operation table on `c` elements of the given arity, built from
/// base-`c` digits independently of the library's enumerator.
fn all_tables(c: usize, arity: usize) -> Vec<OpTable> {
    let rows = c.pow(arity as u32);
    let count = c.pow(rows as u32);
    (0..count)
        .map(|mut n| {
            let mut entries = vec![Elem(0); rows];
            for e in entries.iter_mut().rev() {
                *e = Elem((n % c) as u32);
                n /= c;
            }
            OpTable::new(c, arity, entries).unwrap()
        })
        .collect()
}

fn all_valuations(c: usize, keys: &[VarKey]) -> Vec<Valuation> {
    let mut out = vec![Valuation::new(c)];
    for k in keys {
        let tables = all_tables(c, k.arity);
        out = out
            .into_iter()
            .flat_map(|v| {
                tables.iter().map(move |t| {
                    let mut v = v.clone();
                    v.set(k.clone(), t.clone()).unwrap();
                    v
                })
            })
            .collect();
    }
    out
}

/// Validity by direct recursion on named terms: a premise holds when its
/// body is true for every assignment to its binders.
fn oracle_valid(m: &Model, r: &Rule) -> bool {
    let c = m.size();
    let keys: Vec<VarKey> = r.free_variables().into_iter().collect();
    all_valuations(c, &keys).iter().all(|val| {
        naive_eval(m, val, r.conclusion()) == m.truth()
            || r.premises().iter().any(|p| {
                let tpl = p.template();
                let binders: Vec<VarKey> = tpl
                    .binders()
                    .iter()
                    .map(|b| VarKey::new(b.clone(), 0))
                    .collect();
                !all_valuations(c, &binders).iter().all(|inner| {
                    let mut v = val.clone();
                    for (k, t) in inner.overrides() {
                        v.set(k.clone(), t.clone()).unwrap();
                    }
                    naive_eval(m, &v, tpl.body()) == m.truth()
                })
            })
    })
}

fn criterion_1() -> Outcome {
    let text = fs::read_to_string(library().join("theories/le.th")).unwrap();
    let model_text = fs::read_to_string(library().join("models/bool2.model")).unwrap();
    let start = Instant::now();
    let logic = parse_theory("le.th", &text).map_err(|e| e.to_string())?;
    let model = parse_model("bool2.model", &model_text).map_err(|e| e.to_string())?;
    let report = check_model(&model, &logic, DEFAULT_CAP).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(report.rules.len() == 10, "{} rules", report.rules.len());
    ensure!(
        report.all_valid(),
        "{}/10 rules valid",
        report.valid_count()
    );
    for status in &report.rules {
        let rule = logic.rule(&status.name).unwrap();
        let expected: u64 = rule
            .free_variables()
            .iter()
            .map(|k| 2u64.pow(2u32.pow(k.arity as u32)))
            .product();
        ensure!(
            status.validity
                == Validity::Valid {
                    valuations: expected
                },
            "{}: {:?}, expected {expected} valuations",
            status.name,
            status.validity
        );
        ensure!(oracle_valid(&model, rule), "oracle rejects {}", status.name);
    }
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("10/10 rules valid in {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let mut notes = Vec::new();
    for logic in [logic_e(), logic_peano()] {
        let m = degenerate_model(logic.signature());
        let report = check_model(&m, &logic, DEFAULT_CAP).map_err(|e| e.to_string())?;
        ensure!(
            report.all_valid(),
            "{}/{}",
            report.valid_count(),
            report.rules.len()
        );
        for (name, rule) in logic.rules() {
            ensure!(oracle_valid(&m, rule), "oracle rejects {name}");
        }
        notes.push(format!("{}/{}", report.valid_count(), report.rules.len()));
    }
    Ok(format!(
        "L_E {} and L_Peano {} rules valid",
        notes[0], notes[1]
    ))
}

fn replay_shipped_proofs(logic: &Logic) -> Result<Vec<(String, Vec<Theorem>)>, String> {
    let mut out = Vec::new();
    for name in [
        "imp_refl",
        "truth_eq",
        "forall_true",
        "eq_sym",
        "eq_trans",
        "congruence1",
        "congruence2",
    ] {
        let rel = format!("proofs/{name}.proof");
        let text = fs::read_to_string(library().join(&rel)).map_err(|e| format!("{rel}: {e}"))?;
        let parsed = parse_proof_script(logic, &rel, &text).map_err(|e| e.to_string())?;
        let thms = parsed.replay(logic).map_err(|e| e.to_string())?;
        let (last, thm) = thms.last().unwrap();
        ensure!(&**last == name, "{rel} ends with {last}");
        let expected = expected_rule(logic, name).unwrap();
        ensure!(
            thm.rule().alpha_eq(&expected),
            "{name} concludes the wrong rule"
        );
        out.push((name.to_string(), thms.into_iter().map(|(_, t)| t).collect()));
    }
    Ok(out)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let logic = logic_e();
    let replayed = replay_shipped_proofs(&logic)?;
    let bundle = derived_proofs_e();
    for (name, proof) in &bundle.proofs {
        let thm = check_proof(&bundle.logic, proof).map_err(|e| e.to_string())?;
        ensure!(
            thm.rule().alpha_eq(&expected_rule(&logic, name).unwrap()),
            "built-in proof of {name}"
        );
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "{} scripts replayed in {elapsed:?}",
        replayed.len()
    ))
}

fn criterion_4() -> Outcome {
    let logic = logic_e();
    let replayed = replay_shipped_proofs(&logic)?;
    let two = standard_two_element_model();
    let one = degenerate_model(logic.signature());
    let mut checked = 0;
    for (name, thms) in &replayed {
        for thm in thms {
            for m in [&two, &one] {
                match check_rule_valid(m, thm.rule(), DEFAULT_CAP).map_err(|e| e.to_string())? {
                    Validity::Valid { .. } => {}
                    Validity::Invalid { counterexample } => {
                        return Err(format!(
                            "{name}: counterexample {}",
                            counterexample.display(m.algebra())
                        ))
                    }
                }
                ensure!(oracle_valid(m, thm.rule()), "{name}: oracle disagrees");
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} (theorem, model) pairs, 0 counterexamples"
    ))
}

fn criterion_5() -> Outcome {
    let sig = test_signature();
    let g = TermGen::new(sig.clone(), 4);
    let mut keys = g.free.clone();
    keys.extend(g.binder_names.iter().map(|n| VarKey::new(n.clone(), 0)));
    let mut rng = StdRng::seed_from_u64(5);
    let cases = 10_000;
    let models: Vec<Model> = (0..200)
        .map(|i| random_model(&mut rng, &sig, 1 + i % 2))
        .collect();
    for i in 0..cases {
        let m = &models[rng.random_range(0..models.len())];
        let val = random_valuation(&mut rng, m.size(), &keys);
        let t = g.term(&mut rng);
        let sigma = g.substitution(&mut rng, 2);
        let shifted =
            abslogic::semantics::subst_valuation(m, &val, &sigma).map_err(|e| e.to_string())?;
        let applied = sigma.apply_to_term(&t);
        let lhs = naive_eval(m, &shifted, &t);
        let rhs = naive_eval(m, &val, &applied);
        ensure!(lhs == rhs, "case {i}: {}", print_term(&t));
        ensure!(
            eval_term(m, &shifted, &t).map_err(|e| e.to_string())? == lhs
                && eval_term(m, &val, &applied).map_err(|e| e.to_string())? == rhs,
            "case {i}: compiled evaluator disagrees"
        );
    }
    Ok(format!("{cases} cases"))
}

fn criterion_6() -> Outcome {
    let sig = le_signature();
    let pairs = [
        ("forall x. x", "forall y. y", true),
        ("forall x. x", "forall x. y", false),
        ("forall x. forall y. x", "forall y. forall x. y", true),
        ("forall x. forall y. x", "forall x. forall y. y", false),
    ];
    for (a, b, expected) in pairs {
        let (s, t) = (parse_term(&sig, a).unwrap(), parse_term(&sig, b).unwrap());
        ensure!(s.alpha_eq(&t) == expected, "{a} ~ {b}");
        ensure!(
            alpha_eq_named(&s, &t) == expected,
            "named oracle on {a} ~ {b}"
        );
    }
    let xx = Term::app("x", vec![Term::var("x")]);
    ensure!(xx.alpha_eq(&xx.clone()), "x[x] ~ x[x]");
    let tpl = |s: &str| parse_template(&sig, s).unwrap();
    ensure!(
        tpl("[x. x == x]").alpha_eq(&tpl("[y. y == y]")),
        "[x. x == x]"
    );
    ensure!(
        !tpl("[x. x == y]").alpha_eq(&tpl("[y. y == y]")),
        "[x. x == y]"
    );
    ensure!(tpl("[x y. x]").alpha_eq(&tpl("[y x. y]")), "[x y. x]");
    let ui = parse_rule(&sig, "premise [x. P[x]] |- forall x. P[x]").unwrap();
    let ui2 = parse_rule(&sig, "premise [y. P[y]] |- forall z. P[z]").unwrap();
    ensure!(ui.alpha_eq(&ui2), "Universal Introduction renamed");
    let mp = logic_e().rule("ModusPonens").unwrap().clone();
    ensure!(!ui.alpha_eq(&mp), "MP vs UI");
    // free metavariables are not binders: renaming them gives an instance, not an α-variant
    let renamed = parse_rule(&sig, "premise X ; premise X => Y |- Y").unwrap();
    ensure!(!renamed.alpha_eq(&mp), "MP vs MP with A, B renamed");
    let swapped = parse_rule(&sig, "premise A => B ; premise A |- B").unwrap();
    ensure!(swapped.alpha_eq(&mp), "MP with premisses swapped");

    let tsig = test_signature();
    let g = TermGen::new(tsig.clone(), 4);
    let mut keys = g.free.clone();
    keys.extend(g.binder_names.iter().map(|n| VarKey::new(n.clone(), 0)));
    let mut rng = StdRng::seed_from_u64(6);
    let models: Vec<Model> = (0..200)
        .map(|i| random_model(&mut rng, &tsig, 1 + i % 2))
        .collect();
    let cases = 10_000;
    let mut negatives = 0;
    for i in 0..cases {
        let s = g.term(&mut rng);
        let renamed = rename_binders(&mut rng, &s, &tsig);
        let same = s.to_canonical().to_bytes() == renamed.to_canonical().to_bytes();
        ensure!(
            same && s.alpha_eq(&renamed),
            "case {i}: renaming changed {}",
            print_term(&s)
        );
        let m = &models[rng.random_range(0..models.len())];
        let val = random_valuation(&mut rng, m.size(), &keys);
        ensure!(
            naive_eval(m, &val, &s) == naive_eval(m, &val, &renamed),
            "case {i}: renamed term evaluates differently"
        );
        let other = g.term(&mut rng);
        let named = alpha_eq_named(&s, &other);
        ensure!(s.alpha_eq(&other) == named, "case {i}: random pair");
        ensure!(
            (s.to_canonical().to_bytes() == other.to_canonical().to_bytes()) == named,
            "case {i}: canonical bytes vs named oracle"
        );
        negatives += usize::from(!named);
    }
    Ok(format!(
        "{cases} renamings, {negatives} non-equivalent random pairs"
    ))
}

fn criterion_7() -> Outcome {
    let (logic, x) = inconsistent_logic_demo();
    ensure!(
        x.rule().alpha_eq(&Rule::axiom(Term::var("x"))),
        "explosion did not yield x"
    );
    let sig = logic.signature().clone();
    let bottom = logic.truism("Bottom").map_err(|e| e.to_string())?;
    for text in [
        "T",
        "x == y",
        "forall z. z",
        "A => B",
        "P[T] == (forall y. y)",
    ] {
        let t = parse_term(&sig, text).map_err(|e| e.to_string())?;
        let direct = logic.explosion(&bottom, &t).map_err(|e| e.to_string())?;
        ensure!(
            direct.rule().alpha_eq(&Rule::axiom(t.clone())),
            "explosion to {text}"
        );
        let via_x = logic
            .subst(&x, &Substitution::new().with_term("x", t.clone()))
            .map_err(|e| e.to_string())?;
        ensure!(
            via_x.rule().alpha_eq(&Rule::axiom(t)),
            "x instantiated to {text}"
        );
    }
    let start = Instant::now();
    let candidates = two_element_le_interpretations().count();
    ensure!(candidates == 8192, "{candidates} candidate interpretations");
    let models = two_element_models_of(&logic, DEFAULT_CAP).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(
        models.is_empty(),
        "{} two-element models found",
        models.len()
    );
    within(elapsed, Duration::from_secs(10))?;
    // the same search is not vacuous for L_E itself
    let standard = standard_two_element_model();
    ensure!(
        check_model(&standard, &logic_e(), DEFAULT_CAP)
            .map_err(|e| e.to_string())?
            .all_valid(),
        "standard model rejected"
    );
    Ok(format!(
        "5 terms derived; 0 of {candidates} candidates are models ({elapsed:?})"
    ))
}

fn criterion_8() -> Outcome {
    let m = standard_two_element_model();
    let r = Rule::axiom(Term::var("x"));
    match check_rule_valid(&m, &r, DEFAULT_CAP).map_err(|e| e.to_string())? {
        Validity::Invalid { counterexample } => {
            let f = m.algebra().element("F").unwrap();
            let x = counterexample.lookup(&VarKey::new("x", 0)).apply(&[]);
            ensure!(
                x == f,
                "counterexample assigns {}",
                m.algebra().element_name(x)
            );
            ensure!(!oracle_valid(&m, &r), "oracle finds ({{}}, x) valid");
            Ok(format!(
                "counterexample {}",
                counterexample.display(m.algebra())
            ))
        }
        v => Err(format!("({{}}, x) reported {v:?}")),
    }
}

/// Canonical encoding of `forall x1. x`, fixed when the format was frozen.
const CAPTURE_GOLDEN: &str = include_str!("fixtures/capture.hex");

fn criterion_9() -> Outcome {
    let sig = le_signature();
    let t = parse_term(&sig, "forall x. y").unwrap();
    let sigma = Substitution::new().with_term("y", Term::var("x"));
    let out = sigma.apply_to_term(&t);
    let expected = parse_term(&sig, "forall x1. x").unwrap();
    ensure!(out.alpha_eq(&expected), "got {}", print_term(&out));
    ensure!(
        out.free_variables().contains(&VarKey::new("x", 0)),
        "x is not free in {}",
        print_term(&out)
    );
    let hex = |t: &Term| -> String {
        t.to_canonical()
            .to_bytes()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    };
    let again = hex(&sigma.apply_to_term(&t));
    ensure!(hex(&out) == again, "encoding differs between runs");
    ensure!(
        hex(&out) == CAPTURE_GOLDEN.trim(),
        "encoding {} differs from golden",
        hex(&out)
    );
    Ok(format!("{} ; canonical {}", print_term(&out), hex(&out)))
}

fn criterion_10() -> Outcome {
    let mut count = 0;
    let le = logic_e();
    for dir in ["theories", "models", "proofs"] {
        let mut entries: Vec<PathBuf> = fs::read_dir(library().join(dir))
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for path in entries {
            let shown = path.display().to_string();
            let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
            let reprinted = match dir {
                "theories" => {
                    print_theory(&parse_theory(&shown, &text).map_err(|e| e.to_string())?)
                }
                "models" => print_model(&parse_model(&shown, &text).map_err(|e| e.to_string())?),
                _ => {
                    let parsed =
                        parse_proof_script(&le, &shown, &text).map_err(|e| e.to_string())?;
                    parsed.replay(&le).map_err(|e| e.to_string())?;
                    print_proof_script(&parsed.script)
                }
            };
            ensure!(reprinted == text, "{shown} does not re-print identically");
            count += 1;
        }
    }
    Ok(format!("{count} files"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("L_E two-element model validation", criterion_1),
        ("degenerate models", criterion_2),
        ("derived-theorem suite", criterion_3),
        ("soundness cross-check", criterion_4),
        ("substitution lemma", criterion_5),
        ("alpha-equivalence and canonical forms", criterion_6),
        ("explosion and inconsistency", criterion_7),
        ("consistency witness for L_E", criterion_8),
        ("capture avoidance", criterion_9),
        ("round trip of shipped files", criterion_10),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {title}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {title}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
