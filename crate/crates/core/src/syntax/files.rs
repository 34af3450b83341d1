use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use super::lexer::{lex, Tok, Token};
use super::term::{print_template, print_term, Parser};
use super::{kernel_error_code, Span, SyntaxError};
use crate::kernel::{KernelError, Logic, Script, ScriptError, Step, StepKind, Theorem};
use crate::semantics::{Elem, FiniteAlgebra, Model, OpTable, OperatorInterp, SemanticsError};
use crate::subst::Substitution;
use crate::terms::{Name, Premise, Rule, Shape, Signature, Template, VarKey};

/// Non-empty lines of `text`, lexed, with the span just past each line.
fn lines(file: &Arc<str>, text: &str) -> Result<Vec<(Vec<Token>, Span, bool)>, SyntaxError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let toks = lex(file, line, i + 1)?;
        if toks.is_empty() {
            continue;
        }
        let indented = line.starts_with(char::is_whitespace);
        let end = Span::point(file, i + 1, line.chars().count() + 1);
        out.push((toks, end, indented));
    }
    Ok(out)
}

fn abstraction_name(p: &mut Parser) -> Result<(Name, Span), SyntaxError> {
    let span = p.span();
    let name = match p.peek() {
        Some(Tok::Ident(s)) => s.clone(),
        Some(Tok::Implies) => "=>".into(),
        Some(Tok::Equals) => "==".into(),
        _ => return Err(p.unexpected("an abstraction name")),
    };
    p.next();
    Ok((name.into(), span))
}

fn number(p: &mut Parser, what: &str) -> Result<(usize, Span), SyntaxError> {
    let (s, span) = p.ident(what)?;
    s.parse::<usize>()
        .map(|n| (n, span.clone()))
        .map_err(|_| SyntaxError::syntax(span, format!("expected {what}, found `{s}`")))
}

/// `[{1, 2}, {}]`
fn shape(p: &mut Parser) -> Result<Shape, SyntaxError> {
    let span = p.span();
    p.expect(&Tok::LBrack)?;
    let mut deps: Vec<Vec<i64>> = Vec::new();
    if !p.eat(&Tok::RBrack) {
        loop {
            p.expect(&Tok::LBrace)?;
            let mut set = Vec::new();
            if !p.eat(&Tok::RBrace) {
                loop {
                    let (n, _) = number(p, "a binder index")?;
                    set.push(n as i64);
                    if p.eat(&Tok::RBrace) {
                        break;
                    }
                    p.expect(&Tok::Comma)?;
                }
            }
            deps.push(set);
            if p.eat(&Tok::RBrack) {
                break;
            }
            p.expect(&Tok::Comma)?;
        }
    }
    Shape::new(deps).map_err(|e| SyntaxError::term(span, &e))
}

/// `abstraction <name> shape [...]`, after the keyword.
fn abstraction_line(p: &mut Parser, sig: &mut Signature) -> Result<(), SyntaxError> {
    let (name, span) = abstraction_name(p)?;
    p.keyword("shape")?;
    let s = shape(p)?;
    p.finish()?;
    sig.add(name, s).map_err(|e| SyntaxError::term(span, &e))
}

fn print_abstractions(sig: &Signature, out: &mut String) {
    for (name, shape) in sig.iter() {
        let _ = writeln!(out, "abstraction {name} shape {shape}");
    }
}

/// Parses a theory file: `abstraction` lines and `rule <name>: ...` lines.
pub fn parse_theory(file: &str, text: &str) -> Result<Logic, SyntaxError> {
    let file: Arc<str> = file.into();
    let mut sig = Signature::new();
    let mut rules: Vec<(Name, Rule)> = Vec::new();
    for (toks, end, _) in lines(&file, text)? {
        let empty = Signature::new();
        let mut p = Parser::new(&toks, &empty, end.clone());
        let (kw, span) = p.ident("`abstraction` or `rule`")?;
        match kw.as_str() {
            "abstraction" => abstraction_line(&mut p, &mut sig)?,
            "rule" => {
                let mut p = Parser::new(&toks[1..], &sig, end);
                let (name, name_span) = p.ident("a rule name")?;
                p.expect(&Tok::Colon)?;
                let rule = p.rule()?;
                p.finish()?;
                if rules.iter().any(|(n, _)| **n == *name) {
                    return Err(SyntaxError::new(
                        "DuplicateRuleName",
                        name_span,
                        format!("inference rule `{name}` is declared twice"),
                    ));
                }
                rules.push((name.into(), rule));
            }
            _ => {
                return Err(SyntaxError::syntax(
                    span,
                    format!("expected `abstraction` or `rule`, found `{kw}`"),
                ))
            }
        }
    }
    Logic::new(sig, rules).map_err(|e| {
        SyntaxError::new(
            kernel_error_code(&e),
            Span::point(&file, 1, 1),
            e.to_string(),
        )
    })
}

/// `premise p ; premise q |- c`
pub fn print_rule(r: &Rule) -> String {
    let mut out = String::new();
    for (i, p) in r.premises().iter().enumerate() {
        if i > 0 {
            out.push_str(" ; ");
        }
        out.push_str("premise ");
        out.push_str(&print_premise(p));
    }
    if !r.premises().is_empty() {
        out.push(' ');
    }
    out.push_str("|- ");
    out.push_str(&print_term(r.conclusion()));
    out
}

fn print_premise(p: &Premise) -> String {
    let t = p.template();
    if t.arity() == 0 {
        print_term(t.body())
    } else {
        print_template(t)
    }
}

/// A rule over several lines, with premisses numbered from 1 as `infer`
/// expects them.
pub fn print_rule_numbered(r: &Rule) -> String {
    let mut out = String::new();
    for (i, p) in r.premises().iter().enumerate() {
        let _ = writeln!(out, "  {}. {}", i + 1, print_premise(p));
    }
    let _ = write!(out, "  |- {}", print_term(r.conclusion()));
    out
}

pub fn print_theory(logic: &Logic) -> String {
    let mut out = String::new();
    print_abstractions(logic.signature(), &mut out);
    out.push('\n');
    for (name, rule) in logic.rules() {
        let _ = writeln!(out, "rule {name}: {}", print_rule(rule));
    }
    out
}

struct OpDecl {
    name: Name,
    span: Span,
    kind: OpKind,
}

enum OpKind {
    Interp(OperatorInterp),
    Table {
        rows: Vec<(Vec<u32>, Elem, Span)>,
        default: Option<Elem>,
    },
}

fn element(p: &mut Parser, carrier: &[Name]) -> Result<Elem, SyntaxError> {
    let (e, span) = p.ident("a carrier element")?;
    carrier
        .iter()
        .position(|c| **c == *e)
        .map(|i| Elem(i as u32))
        .ok_or_else(|| {
            SyntaxError::new(
                "ModelError",
                span,
                format!("`{e}` is not an element of the carrier"),
            )
        })
}

fn model_error(span: Span, e: &SemanticsError) -> SyntaxError {
    SyntaxError::new("ModelError", span, e.to_string())
}

/// Parses a model file: `abstraction` lines, `carrier`, `truth`, and one
/// `op` declaration per abstraction.
pub fn parse_model(file: &str, text: &str) -> Result<Model, SyntaxError> {
    let file: Arc<str> = file.into();
    let mut sig = Signature::new();
    let mut carrier: Option<(Vec<Name>, Span)> = None;
    let mut truth: Option<(Elem, Span)> = None;
    let mut ops: Vec<OpDecl> = Vec::new();
    let empty = Signature::new();
    for (toks, end, indented) in lines(&file, text)? {
        let mut p = Parser::new(&toks, &empty, end);
        let line_span = p.span();
        let need_carrier = |span: &Span| {
            carrier.as_ref().map(|(c, _)| c.clone()).ok_or_else(|| {
                SyntaxError::syntax(span.clone(), "`carrier` must come before this line")
            })
        };
        if indented {
            let elems = need_carrier(&line_span)?;
            let Some(OpDecl {
                kind: OpKind::Table { rows, default },
                name,
                ..
            }) = ops.last_mut()
            else {
                return Err(SyntaxError::syntax(line_span, "table row outside a table"));
            };
            let shape = sig.shape(name).expect("checked at `op`").operator_shape();
            if matches!(p.peek(), Some(Tok::Ident(s)) if s == "default") {
                p.next();
                if default.is_some() {
                    return Err(SyntaxError::syntax(line_span, "table has two defaults"));
                }
                *default = Some(element(&mut p, &elems)?);
                p.finish()?;
                continue;
            }
            let c = elems.len();
            let mut key = Vec::new();
            for &k in &shape {
                if k == 0 {
                    key.push(element(&mut p, &elems)?.0);
                } else {
                    let span = p.span();
                    p.expect(&Tok::LBrack)?;
                    let mut entries = Vec::new();
                    while !p.eat(&Tok::RBrack) {
                        entries.push(element(&mut p, &elems)?.0);
                    }
                    let expected = c.pow(k as u32);
                    if entries.len() != expected {
                        return Err(model_error(
                            span,
                            &SemanticsError::TableSize {
                                expected,
                                found: entries.len(),
                            },
                        ));
                    }
                    key.extend(entries);
                }
            }
            p.expect(&Tok::MapsTo)?;
            let result = element(&mut p, &elems)?;
            p.finish()?;
            if rows.iter().any(|(k, _, _)| *k == key) {
                return Err(SyntaxError::new(
                    "ModelError",
                    line_span,
                    "row is listed twice",
                ));
            }
            rows.push((key, result, line_span));
            continue;
        }
        let (kw, kw_span) = p.ident("a model directive")?;
        match kw.as_str() {
            "abstraction" => abstraction_line(&mut p, &mut sig)?,
            "carrier" => {
                if carrier.is_some() {
                    return Err(SyntaxError::syntax(kw_span, "carrier is declared twice"));
                }
                let mut elems: Vec<Name> = Vec::new();
                while !p.at_end() {
                    let (e, span) = p.ident("a carrier element")?;
                    if elems.iter().any(|x| **x == *e) {
                        return Err(model_error(
                            span,
                            &SemanticsError::DuplicateElement(e.into()),
                        ));
                    }
                    elems.push(e.into());
                }
                if elems.is_empty() {
                    return Err(model_error(kw_span, &SemanticsError::EmptyCarrier));
                }
                carrier = Some((elems, kw_span));
            }
            "truth" => {
                let elems = need_carrier(&kw_span)?;
                if truth.is_some() {
                    return Err(SyntaxError::syntax(kw_span, "truth is declared twice"));
                }
                truth = Some((element(&mut p, &elems)?, kw_span));
                p.finish()?;
            }
            "op" => {
                let elems = need_carrier(&kw_span)?;
                let (name, span) = abstraction_name(&mut p)?;
                if !sig.contains(&name) {
                    return Err(SyntaxError::new(
                        "UnknownAbstraction",
                        span,
                        format!("unknown abstraction `{name}`"),
                    ));
                }
                if ops.iter().any(|o| o.name == name) {
                    return Err(SyntaxError::syntax(
                        span,
                        format!("`{name}` is interpreted twice"),
                    ));
                }
                let (how, how_span) = p.ident("`builtin` or `table`")?;
                let kind = match how.as_str() {
                    "builtin" => {
                        let (b, b_span) = p.ident("`const` or `forall_like`")?;
                        match b.as_str() {
                            "const" => {
                                OpKind::Interp(OperatorInterp::Constant(element(&mut p, &elems)?))
                            }
                            "forall_like" => {
                                let t = element(&mut p, &elems)?;
                                let f = element(&mut p, &elems)?;
                                OpKind::Interp(OperatorInterp::ForallLike {
                                    truth: t,
                                    falsity: f,
                                })
                            }
                            _ => {
                                return Err(SyntaxError::syntax(
                                    b_span,
                                    format!("unknown builtin `{b}`"),
                                ))
                            }
                        }
                    }
                    "table" => {
                        p.expect(&Tok::Colon)?;
                        OpKind::Table {
                            rows: Vec::new(),
                            default: None,
                        }
                    }
                    _ => {
                        return Err(SyntaxError::syntax(
                            how_span,
                            format!("expected `builtin` or `table`, found `{how}`"),
                        ))
                    }
                };
                p.finish()?;
                ops.push(OpDecl { name, span, kind });
            }
            _ => {
                return Err(SyntaxError::syntax(
                    kw_span,
                    format!("unknown directive `{kw}`"),
                ))
            }
        }
    }

    let file_start = Span::point(&file, 1, 1);
    let (elems, _) =
        carrier.ok_or_else(|| SyntaxError::syntax(file_start.clone(), "missing `carrier`"))?;
    let (truth, _) =
        truth.ok_or_else(|| SyntaxError::syntax(file_start.clone(), "missing `truth`"))?;
    let c = elems.len();
    let mut interps = BTreeMap::new();
    let mut spans = BTreeMap::new();
    for op in ops {
        let shape = sig.shape(&op.name).expect("checked").operator_shape();
        let interp = match op.kind {
            OpKind::Interp(i) => i,
            OpKind::Table { rows, default } => {
                let values_only = shape.iter().all(|&k| k == 0);
                match default {
                    None if values_only => {
                        let n = c.pow(shape.len() as u32);
                        if rows.len() != n {
                            return Err(SyntaxError::new(
                                "ModelError",
                                op.span,
                                format!(
                                    "table lists {} of {n} rows and has no default",
                                    rows.len()
                                ),
                            ));
                        }
                        let mut entries = vec![Elem(0); n];
                        for (key, r, _) in rows {
                            let idx = key.iter().fold(0usize, |acc, &e| acc * c + e as usize);
                            entries[idx] = r;
                        }
                        OperatorInterp::Pointwise(
                            OpTable::new(c, shape.len(), entries)
                                .map_err(|e| model_error(op.span.clone(), &e))?,
                        )
                    }
                    None => {
                        return Err(SyntaxError::new(
                            "ModelError",
                            op.span,
                            "tables over operation arguments need a `default`",
                        ))
                    }
                    Some(default) => OperatorInterp::Explicit {
                        rows: rows.into_iter().map(|(k, r, _)| (k, r)).collect(),
                        default,
                    },
                }
            }
        };
        spans.insert(op.name.clone(), op.span);
        interps.insert(op.name, interp);
    }
    let algebra = FiniteAlgebra::new(elems, sig, interps).map_err(|e| {
        let span = match &e {
            SemanticsError::InterpShape { name, .. } => spans.get(name).cloned(),
            _ => None,
        };
        model_error(span.unwrap_or_else(|| file_start.clone()), &e)
    })?;
    Model::new(algebra, truth).map_err(|e| model_error(file_start, &e))
}

pub fn print_model(model: &Model) -> String {
    let algebra = model.algebra();
    let name = |e: Elem| algebra.element_name(e).to_string();
    let mut out = String::new();
    print_abstractions(algebra.signature(), &mut out);
    out.push('\n');
    let _ = writeln!(out, "carrier {}", algebra.carrier().join(" "));
    let _ = writeln!(out, "truth {}", name(model.truth()));
    let c = algebra.size();
    for (op, shape) in algebra.signature().iter() {
        let op_shape = shape.operator_shape();
        match algebra.interp(op).expect("complete algebra") {
            OperatorInterp::Constant(e) => {
                let _ = writeln!(out, "op {op} builtin const {}", name(*e));
            }
            OperatorInterp::ForallLike { truth, falsity } => {
                let _ = writeln!(
                    out,
                    "op {op} builtin forall_like {} {}",
                    name(*truth),
                    name(*falsity)
                );
            }
            OperatorInterp::Pointwise(table) => {
                let _ = writeln!(out, "op {op} table:");
                for (row, r) in table.entries().enumerate() {
                    let args: Vec<String> = table.row_args(row).into_iter().map(name).collect();
                    let _ = writeln!(out, "  {} -> {}", args.join(" "), name(r));
                }
            }
            OperatorInterp::Explicit { rows, default } => {
                let _ = writeln!(out, "op {op} table:");
                for (key, r) in rows {
                    let mut parts = Vec::new();
                    let mut rest = &key[..];
                    for &k in &op_shape {
                        if k == 0 {
                            parts.push(name(Elem(rest[0])));
                            rest = &rest[1..];
                        } else {
                            let n = c.pow(k as u32);
                            let entries: Vec<String> =
                                rest[..n].iter().map(|&e| name(Elem(e))).collect();
                            parts.push(format!("[{}]", entries.join(" ")));
                            rest = &rest[n..];
                        }
                    }
                    let _ = writeln!(out, "  {} -> {}", parts.join(" "), name(*r));
                }
                let _ = writeln!(out, "  default {}", name(*default));
            }
        }
    }
    out
}

/// A proof script with the source position of each step.
#[derive(Debug, Clone)]
pub struct ParsedScript {
    pub script: Script,
    pub spans: Vec<Span>,
}

impl ParsedScript {
    /// Replays the script, reporting kernel failures at the failing step.
    pub fn replay(&self, logic: &Logic) -> Result<Vec<(Name, Theorem)>, SyntaxError> {
        self.script.replay(logic).map_err(|(i, e)| {
            let span = self.spans[i].clone();
            match e {
                ScriptError::UnknownTheoremName(n) => SyntaxError::new(
                    "UnknownTheoremName",
                    span,
                    format!("unknown theorem `{n}`"),
                ),
                ScriptError::DuplicateTheoremName(n) => SyntaxError::new(
                    "DuplicateTheoremName",
                    span,
                    format!("theorem `{n}` is defined twice"),
                ),
                ScriptError::Kernel { step, error } => {
                    let message = match &error {
                        KernelError::TargetMismatch { expected, computed } => format!(
                            "step `{step}`: expected `{}` but derived `{}`",
                            print_rule(expected),
                            print_rule(computed)
                        ),
                        KernelError::BadIndex { index, count } => format!(
                            "step `{step}`: premise {} out of range for a rule with {count} premisses",
                            index + 1
                        ),
                        e => format!("step `{step}`: {e}"),
                    };
                    SyntaxError::new(kernel_error_code(&error), span, message)
                }
            }
        })
    }
}

fn substitution(p: &mut Parser) -> Result<Substitution, SyntaxError> {
    p.expect(&Tok::LBrace)?;
    let mut sigma = Substitution::new();
    let mut seen = BTreeSet::new();
    if p.eat(&Tok::RBrace) {
        return Ok(sigma);
    }
    loop {
        let span = p.span();
        let x = p.binder()?;
        let arity = if p.eat(&Tok::Slash) {
            Some(number(p, "an arity")?.0)
        } else {
            None
        };
        p.expect(&Tok::Assign)?;
        let template = if p.peek() == Some(&Tok::LBrack) {
            p.template()?
        } else {
            Template::term(p.expr()?)
        };
        let key = VarKey::new(x, arity.unwrap_or(template.arity()));
        if !seen.insert(key.clone()) {
            return Err(SyntaxError::syntax(
                span,
                format!("{key} is substituted twice"),
            ));
        }
        sigma
            .insert(key, template)
            .map_err(|e| SyntaxError::new("ArityError", span.clone(), e.to_string()))?;
        if p.eat(&Tok::RBrace) {
            return Ok(sigma);
        }
        p.expect(&Tok::Semi)?;
    }
}

/// Parses a proof script against `logic`.
pub fn parse_proof_script(
    logic: &Logic,
    file: &str,
    text: &str,
) -> Result<ParsedScript, SyntaxError> {
    let file: Arc<str> = file.into();
    let sig = logic.signature();
    let mut steps: Vec<Step> = Vec::new();
    let mut spans: Vec<Span> = Vec::new();
    let mut defined: BTreeSet<String> = BTreeSet::new();
    for (toks, end, _) in lines(&file, text)? {
        let mut p = Parser::new(&toks, sig, end);
        let (kw, kw_span) = p.ident("`thm` or `expect`")?;
        match kw.as_str() {
            "expect" => {
                p.expect(&Tok::Colon)?;
                let rule = p.rule()?;
                p.finish()?;
                let Some(last) = steps.last_mut() else {
                    return Err(SyntaxError::syntax(kw_span, "`expect` before any `thm`"));
                };
                if last.expect.is_some() {
                    return Err(SyntaxError::syntax(kw_span, "step already has an `expect`"));
                }
                last.expect = Some(rule);
            }
            "thm" => {
                let (name, name_span) = p.ident("a theorem name")?;
                if defined.contains(&name) {
                    return Err(SyntaxError::new(
                        "DuplicateTheoremName",
                        name_span,
                        format!("theorem `{name}` is defined twice"),
                    ));
                }
                p.expect(&Tok::Assign)?;
                let reference = |p: &mut Parser| -> Result<Name, SyntaxError> {
                    let (n, span) = p.ident("a theorem name")?;
                    if defined.contains(&n) {
                        Ok(n.into())
                    } else {
                        Err(SyntaxError::new(
                            "UnknownTheoremName",
                            span,
                            format!("unknown theorem `{n}`"),
                        ))
                    }
                };
                let (how, how_span) = p.ident("`rule`, `subst` or `infer`")?;
                let kind = match how.as_str() {
                    "rule" => StepKind::Rule(p.ident("a rule name")?.0.into()),
                    "subst" => {
                        let of = reference(&mut p)?;
                        let sigma = substitution(&mut p)?;
                        StepKind::Subst { of, sigma }
                    }
                    "infer" => {
                        let major = reference(&mut p)?;
                        p.expect(&Tok::Hash)?;
                        let (i, i_span) = number(&mut p, "a premise number")?;
                        if i == 0 {
                            return Err(SyntaxError::syntax(
                                i_span,
                                "premisses are numbered from 1",
                            ));
                        }
                        let minor = reference(&mut p)?;
                        StepKind::Infer {
                            major,
                            premise: i - 1,
                            minor,
                        }
                    }
                    _ => {
                        return Err(SyntaxError::syntax(
                            how_span,
                            format!("expected `rule`, `subst` or `infer`, found `{how}`"),
                        ))
                    }
                };
                p.finish()?;
                defined.insert(name.clone());
                steps.push(Step {
                    name: name.into(),
                    kind,
                    expect: None,
                });
                spans.push(kw_span);
            }
            _ => {
                return Err(SyntaxError::syntax(
                    kw_span,
                    format!("expected `thm` or `expect`, found `{kw}`"),
                ))
            }
        }
    }
    Ok(ParsedScript {
        script: Script { steps },
        spans,
    })
}

/// `{ x := t ; P/1 := [z. t] }`
pub fn print_substitution(sigma: &Substitution) -> String {
    if sigma.is_empty() {
        return "{ }".into();
    }
    let entries: Vec<String> = sigma
        .iter()
        .map(|(k, t)| {
            if k.arity == 0 {
                format!("{} := {}", k.name, print_term(t.body()))
            } else {
                format!("{k} := {}", print_template(t))
            }
        })
        .collect();
    format!("{{ {} }}", entries.join(" ; "))
}

pub fn print_proof_script(script: &Script) -> String {
    let mut out = String::new();
    for s in &script.steps {
        let _ = match &s.kind {
            StepKind::Rule(r) => writeln!(out, "thm {} := rule {r}", s.name),
            StepKind::Subst { of, sigma } => {
                writeln!(
                    out,
                    "thm {} := subst {of} {}",
                    s.name,
                    print_substitution(sigma)
                )
            }
            StepKind::Infer {
                major,
                premise,
                minor,
            } => writeln!(
                out,
                "thm {} := infer {major} # {} {minor}",
                s.name,
                premise + 1
            ),
        };
        if let Some(r) = &s.expect {
            let _ = writeln!(out, "expect: {}", print_rule(r));
        }
    }
    out
}
