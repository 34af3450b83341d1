use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abslogic::kernel::{Logic, Theorem};
use abslogic::semantics::{
    check_model, check_rule_valid, eval_term, Elem, FiniteAlgebra, Model, OpTable, SemanticsError,
    Validity, Valuation, DEFAULT_CAP,
};
use abslogic::syntax::{
    parse_model, parse_proof_script, parse_term, parse_theory, print_model, print_proof_script,
    print_rule, print_rule_numbered, print_theory, Span, SyntaxError,
};
use abslogic::terms::{Name, Rule};
use abslogic::theories::le_signature;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "abslogic",
    version,
    about = "Proof checker and model checker for abstraction logic"
)]
struct Cli {
    /// Print numbered premisses and counterexample tables
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a proof script against a theory
    Check { theory: PathBuf, script: PathBuf },
    /// Check every rule of a theory in a finite model
    ModelCheck {
        theory: PathBuf,
        model: PathBuf,
        /// Maximum number of valuations enumerated per rule
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Evaluate a term in a model
    Eval {
        model: PathBuf,
        term: String,
        /// Assign a carrier element to a value variable, e.g. `x=F`
        #[arg(long = "set", value_name = "VAR=ELEM")]
        set: Vec<String>,
    },
    /// Decide alpha-equivalence of two terms
    Alpha {
        t1: String,
        t2: String,
        /// Theory whose signature is used for parsing (default: L_E)
        #[arg(long)]
        theory: Option<PathBuf>,
    },
    /// Replay proof scripts, then validate every theorem in every model of a directory
    Oracle {
        theory: PathBuf,
        #[arg(required = true)]
        scripts: Vec<PathBuf>,
        #[arg(long)]
        models: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Print the rules of a theory with numbered premisses
    Rules { theory: PathBuf },
    /// Re-print a theory, model or proof script in canonical form
    Fmt {
        file: PathBuf,
        /// Theory for proof scripts
        #[arg(long)]
        theory: Option<PathBuf>,
    },
}

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

macro_rules! say_raw {
    ($($arg:tt)*) => {{
        let _ = write!(std::io::stdout(), $($arg)*);
    }};
}

/// A failure reported as one or more `ERROR` lines.
struct Failure(Vec<String>);

impl From<SyntaxError> for Failure {
    fn from(e: SyntaxError) -> Self {
        Failure(vec![e.to_string()])
    }
}

type Outcome = Result<(), Failure>;

fn error_line(code: &'static str, file: &Path, line: usize, message: impl Into<String>) -> String {
    let span = Span::point(&file.display().to_string().into(), line, 1);
    SyntaxError::new(code, span, message).to_string()
}

fn semantics_code(e: &SemanticsError) -> &'static str {
    match e {
        SemanticsError::EmptyCarrier => "EmptyCarrier",
        SemanticsError::DuplicateElement(_) => "DuplicateElement",
        SemanticsError::ElementOutOfRange(_) => "ElementOutOfRange",
        SemanticsError::InterpMissing(_) => "InterpMissing",
        SemanticsError::InterpShape { .. } => "InterpShape",
        SemanticsError::UnknownAbstraction(_) => "UnknownAbstraction",
        SemanticsError::DuplicateName(_) => "DuplicateName",
        SemanticsError::TableArity { .. } => "TableArity",
        SemanticsError::TableSize { .. } => "TableSize",
        SemanticsError::EnumerationTooLarge { .. } => "EnumerationTooLarge",
        SemanticsError::SignatureMismatch => "SignatureMismatch",
        SemanticsError::UnknownInTerm(_) => "UnknownInTerm",
    }
}

fn semantic_failure(file: &Path, line: usize, e: &SemanticsError) -> Failure {
    Failure(vec![error_line(
        semantics_code(e),
        file,
        line,
        e.to_string(),
    )])
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure(vec![error_line("IoError", path, 1, e.to_string())]))
}

fn load_theory(path: &Path) -> Result<(Logic, String), Failure> {
    let text = read(path)?;
    let logic = parse_theory(&path.display().to_string(), &text)?;
    Ok((logic, text))
}

fn load_model(path: &Path) -> Result<Model, Failure> {
    let text = read(path)?;
    Ok(parse_model(&path.display().to_string(), &text)?)
}

/// Line of the `rule <name>:` declaration in a theory file.
fn rule_line(text: &str, name: &str) -> usize {
    let head = format!("rule {name}:");
    text.lines()
        .position(|l| l.trim_start().starts_with(&head))
        .map_or(1, |i| i + 1)
}

fn show_valuation(val: &Valuation, algebra: &FiniteAlgebra) -> String {
    let text = val.display(algebra).to_string();
    if text.is_empty() {
        "the empty valuation".to_string()
    } else {
        text
    }
}

/// A counterexample valuation, one table per variable.
fn valuation_tables(val: &Valuation, algebra: &FiniteAlgebra) -> String {
    let name = |e: Elem| algebra.element_name(e).to_string();
    let mut out = String::new();
    for (key, table) in val.overrides() {
        if key.arity == 0 {
            let _ = writeln!(out, "    {} = {}", key.name, name(table.apply(&[])));
            continue;
        }
        let _ = writeln!(out, "    {}/{}:", key.name, key.arity);
        write_table(&mut out, table, &name);
    }
    out
}

fn write_table(out: &mut String, table: &OpTable, name: &dyn Fn(Elem) -> String) {
    for (row, value) in table.entries().enumerate() {
        let args: Vec<String> = table.row_args(row).into_iter().map(name).collect();
        let _ = writeln!(out, "      {} -> {}", args.join(" "), name(value));
    }
}

fn cmd_check(theory: &Path, script: &Path, verbose: bool) -> Outcome {
    let (logic, _) = load_theory(theory)?;
    let text = read(script)?;
    let parsed = parse_proof_script(&logic, &script.display().to_string(), &text)?;
    let theorems = parsed.replay(&logic)?;
    for (name, thm) in &theorems {
        if verbose {
            say!("{name}:\n{}", print_rule_numbered(thm.rule()).trim_end());
        } else {
            say!("{name}: {}", print_rule(thm.rule()));
        }
    }
    say!("{} theorems checked", theorems.len());
    Ok(())
}

fn cmd_model_check(theory: &Path, model_path: &Path, cap: u64, verbose: bool) -> Outcome {
    let (logic, text) = load_theory(theory)?;
    let model = load_model(model_path)?;
    let report =
        check_model(&model, &logic, cap).map_err(|e| semantic_failure(model_path, 1, &e))?;
    let mut errors = Vec::new();
    for status in &report.rules {
        match &status.validity {
            Validity::Valid { valuations } => {
                let plural = if *valuations == 1 { "" } else { "s" };
                say!("valid   {} ({valuations} valuation{plural})", status.name)
            }
            Validity::Invalid { counterexample } => {
                say!(
                    "INVALID {} at {}",
                    status.name,
                    show_valuation(counterexample, model.algebra())
                );
                if verbose {
                    say_raw!("{}", valuation_tables(counterexample, model.algebra()));
                }
                errors.push(error_line(
                    "InvalidRule",
                    theory,
                    rule_line(&text, &status.name),
                    format!("rule `{}` fails in {}", status.name, model_path.display()),
                ));
            }
        }
    }
    say!(
        "{}/{} rules valid",
        report.valid_count(),
        report.rules.len()
    );
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Failure(errors))
    }
}

fn cmd_eval(model_path: &Path, term: &str, set: &[String]) -> Outcome {
    let model = load_model(model_path)?;
    let t = parse_term(model.algebra().signature(), term)?;
    let mut updates: Vec<(Name, Elem)> = Vec::new();
    for s in set {
        let Some((var, elem)) = s.split_once('=') else {
            return Err(Failure(vec![error_line(
                "UsageError",
                Path::new("<set>"),
                1,
                format!("expected VAR=ELEM, found `{s}`"),
            )]));
        };
        let Some(e) = model.algebra().element(elem.trim()) else {
            return Err(Failure(vec![error_line(
                "UnknownElement",
                model_path,
                1,
                format!("`{}` is not a carrier element", elem.trim()),
            )]));
        };
        updates.push((var.trim().into(), e));
    }
    let val = model
        .valuation()
        .update(&updates)
        .map_err(|e| semantic_failure(model_path, 1, &e))?;
    let value = eval_term(&model, &val, &t).map_err(|e| semantic_failure(model_path, 1, &e))?;
    say!("{}", model.algebra().element_name(value));
    Ok(())
}

fn cmd_alpha(t1: &str, t2: &str, theory: Option<&Path>, verbose: bool) -> Outcome {
    let sig = match theory {
        Some(path) => load_theory(path)?.0.signature().clone(),
        None => le_signature(),
    };
    let a = parse_term(&sig, t1)?;
    let b = parse_term(&sig, t2)?;
    if verbose {
        say!("{}", hex(&a.to_canonical().to_bytes()));
        say!("{}", hex(&b.to_canonical().to_bytes()));
    }
    if a.alpha_eq(&b) {
        say!("alpha-equivalent");
        Ok(())
    } else {
        say!("not alpha-equivalent");
        Err(Failure(Vec::new()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

struct ModelResult {
    path: PathBuf,
    outcome: Result<Option<Vec<Option<Validity>>>, SemanticsError>,
}

fn cmd_oracle(
    theory: &Path,
    scripts: &[PathBuf],
    models_dir: &Path,
    cap: u64,
    verbose: bool,
) -> Outcome {
    let (logic, _) = load_theory(theory)?;
    let mut theorems: Vec<(Span, Name, Theorem)> = Vec::new();
    for script in scripts {
        let text = read(script)?;
        let parsed = parse_proof_script(&logic, &script.display().to_string(), &text)?;
        let replayed = parsed.replay(&logic)?;
        for ((name, thm), span) in replayed.into_iter().zip(parsed.spans.iter().cloned()) {
            theorems.push((span, name, thm));
        }
    }
    say!("{} theorems replayed", theorems.len());

    let mut model_paths: Vec<PathBuf> = fs::read_dir(models_dir)
        .map_err(|e| Failure(vec![error_line("IoError", models_dir, 1, e.to_string())]))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "model"))
        .collect();
    model_paths.sort();
    let mut models = Vec::new();
    for p in &model_paths {
        models.push(load_model(p)?);
    }

    let rules: Vec<&Rule> = theorems.iter().map(|t| t.2.rule()).collect();
    let results: Vec<ModelResult> = std::thread::scope(|s| {
        let handles: Vec<_> = model_paths
            .iter()
            .zip(&models)
            .map(|(path, model)| {
                let rules = &rules;
                let logic = &logic;
                s.spawn(move || ModelResult {
                    path: path.clone(),
                    outcome: check_all(model, logic, rules, cap),
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("oracle worker panicked"))
            .collect()
    });

    let mut errors = Vec::new();
    for (result, model) in results.iter().zip(&models) {
        let shown = result.path.display();
        let verdicts = match &result.outcome {
            Err(e) => return Err(semantic_failure(&result.path, 1, e)),
            Ok(None) => {
                say!("{shown}: skipped (signature does not cover the theory)");
                continue;
            }
            Ok(Some(v)) => v,
        };
        let mut valid = 0;
        let mut skipped = 0;
        for ((span, name, _), verdict) in theorems.iter().zip(verdicts) {
            match verdict {
                Some(Validity::Valid { .. }) => valid += 1,
                None => skipped += 1,
                Some(Validity::Invalid { counterexample }) => {
                    errors.push(
                        SyntaxError::new(
                            "Counterexample",
                            span.clone(),
                            format!(
                                "theorem `{name}` fails in {shown} at {}",
                                show_valuation(counterexample, model.algebra())
                            ),
                        )
                        .to_string(),
                    );
                    if verbose {
                        say_raw!("{}", valuation_tables(counterexample, model.algebra()));
                    }
                }
            }
        }
        let mut line = format!("{shown}: {valid}/{} theorems valid", theorems.len());
        if skipped > 0 {
            let _ = write!(line, " ({skipped} beyond the enumeration cap)");
        }
        say!("{line}");
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Failure(errors))
    }
}

/// `None` when the model does not interpret the logic's signature;
/// per rule `None` when enumeration exceeds the cap.
fn check_all(
    model: &Model,
    logic: &Logic,
    rules: &[&Rule],
    cap: u64,
) -> Result<Option<Vec<Option<Validity>>>, SemanticsError> {
    if !logic
        .signature()
        .is_subsignature_of(model.algebra().signature())
    {
        return Ok(None);
    }
    rules
        .iter()
        .map(|r| match check_rule_valid(model, r, cap) {
            Ok(v) => Ok(Some(v)),
            Err(SemanticsError::EnumerationTooLarge { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn cmd_rules(theory: &Path) -> Outcome {
    let (logic, _) = load_theory(theory)?;
    for (name, rule) in logic.rules() {
        say!("{name}:\n{}", print_rule_numbered(rule).trim_end());
    }
    Ok(())
}

fn cmd_fmt(file: &Path, theory: Option<&Path>) -> Outcome {
    let text = read(file)?;
    let shown = file.display().to_string();
    let out = match file.extension().and_then(|e| e.to_str()) {
        Some("th") => print_theory(&parse_theory(&shown, &text)?),
        Some("model") => print_model(&parse_model(&shown, &text)?),
        Some("proof") => {
            let Some(theory) = theory else {
                return Err(Failure(vec![error_line(
                    "UsageError",
                    file,
                    1,
                    "proof scripts need --theory",
                )]));
            };
            let (logic, _) = load_theory(theory)?;
            print_proof_script(&parse_proof_script(&logic, &shown, &text)?.script)
        }
        _ => {
            return Err(Failure(vec![error_line(
                "UsageError",
                file,
                1,
                "expected a .th, .model or .proof file",
            )]))
        }
    };
    say_raw!("{out}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let v = cli.verbose;
    let outcome = match &cli.command {
        Command::Check { theory, script } => cmd_check(theory, script, v),
        Command::ModelCheck { theory, model, cap } => cmd_model_check(theory, model, *cap, v),
        Command::Eval { model, term, set } => cmd_eval(model, term, set),
        Command::Alpha { t1, t2, theory } => cmd_alpha(t1, t2, theory.as_deref(), v),
        Command::Oracle {
            theory,
            scripts,
            models,
            cap,
        } => cmd_oracle(theory, scripts, models, *cap, v),
        Command::Rules { theory } => cmd_rules(theory),
        Command::Fmt { file, theory } => cmd_fmt(file, theory.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(lines)) => {
            for l in lines {
                eprintln!("{l}");
            }
            ExitCode::FAILURE
        }
    }
}
