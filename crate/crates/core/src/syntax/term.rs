use std::sync::Arc;

use super::lexer::{lex, Tok, Token};
use super::{Span, SyntaxError};
use crate::terms::{Name, Premise, Rule, Shape, Signature, Template, Term, TermError};

/// Whether `a x_1 ... x_m. t` may be written without parentheses.
pub(crate) fn binder_sugar(shape: &Shape) -> bool {
    shape.arity() == 1 && shape.valence() >= 1 && shape.binds(0).len() == shape.valence()
}

fn is_infix(name: &str, shape: &Shape) -> bool {
    (name == "=>" || name == "==") && shape.arity() == 2 && shape.valence() == 0
}

pub(crate) struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    sig: &'a Signature,
    eof: Span,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(toks: &'a [Token], sig: &'a Signature, eof: Span) -> Self {
        Parser {
            toks,
            pos: 0,
            sig,
            eof,
        }
    }

    pub(crate) fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    pub(crate) fn span(&self) -> Span {
        self.toks
            .get(self.pos)
            .map_or_else(|| self.eof.clone(), |t| t.span.clone())
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => SyntaxError::syntax(self.span(), format!("expected {wanted}, found {t}")),
            None => {
                SyntaxError::syntax(self.span(), format!("expected {wanted}, found end of line"))
            }
        }
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<(), SyntaxError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    pub(crate) fn ident(&mut self, what: &str) -> Result<(String, Span), SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let span = self.span();
                self.pos += 1;
                Ok((s.clone(), span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub(crate) fn keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    pub(crate) fn finish(&self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    fn abstraction_at(&self, k: usize) -> Option<(Name, &'a Arc<Shape>)> {
        let name = match self.peek_at(k)? {
            Tok::Ident(s) => s.as_str(),
            Tok::Implies => "=>",
            Tok::Equals => "==",
            _ => return None,
        };
        self.sig.shape(name).map(|s| (Name::from(name), s))
    }

    fn build(
        &self,
        span: &Span,
        name: &str,
        binders: Vec<Name>,
        args: Vec<Term>,
    ) -> Result<Term, SyntaxError> {
        self.sig
            .apply(name, binders, args)
            .map_err(|e| SyntaxError::term(span.clone(), &e))
    }

    pub(crate) fn binder(&mut self) -> Result<Name, SyntaxError> {
        let span = self.span();
        let (x, _) = self.ident("a binder name")?;
        if self.sig.contains(&x) {
            return Err(SyntaxError::syntax(
                span,
                format!("abstraction `{x}` cannot be used as a variable"),
            ));
        }
        Ok(x.into())
    }

    pub(crate) fn binders_until_dot(&mut self) -> Result<Vec<Name>, SyntaxError> {
        let mut out = Vec::new();
        while !self.eat(&Tok::Dot) {
            if !matches!(self.peek(), Some(Tok::Ident(_))) {
                return Err(self.unexpected("a binder name or `.`"));
            }
            out.push(self.binder()?);
        }
        Ok(out)
    }

    pub(crate) fn expr(&mut self) -> Result<Term, SyntaxError> {
        let left = self.eqn()?;
        if self.peek() == Some(&Tok::Implies) {
            let span = self.span();
            self.pos += 1;
            let right = self.expr()?;
            return self.build(&span, "=>", Vec::new(), vec![left, right]);
        }
        Ok(left)
    }

    fn eqn(&mut self) -> Result<Term, SyntaxError> {
        let left = self.unary()?;
        if self.peek() == Some(&Tok::Equals) {
            let span = self.span();
            self.pos += 1;
            let right = self.unary()?;
            if self.peek() == Some(&Tok::Equals) {
                return Err(SyntaxError::syntax(
                    self.span(),
                    "`==` does not associate; add parentheses",
                ));
            }
            return self.build(&span, "==", Vec::new(), vec![left, right]);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Term, SyntaxError> {
        if let (Some(Tok::Ident(_)), Some((name, shape))) = (self.peek(), self.abstraction_at(0)) {
            if binder_sugar(shape) {
                let span = self.span();
                self.pos += 1;
                let binders = self.binders_until_dot()?;
                let body = self.expr()?;
                return self.build(&span, &name, binders, vec![body]);
            }
        }
        self.atom()
    }

    fn general_form_ahead(&self) -> bool {
        if self.abstraction_at(1).is_none() {
            return false;
        }
        let mut k = 2;
        loop {
            match self.peek_at(k) {
                Some(Tok::Dot) => return true,
                Some(Tok::Ident(_)) => k += 1,
                _ => return false,
            }
        }
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        let span = self.span();
        match self.peek() {
            Some(Tok::LParen) if self.general_form_ahead() => {
                self.pos += 1;
                let (name, shape) = self.abstraction_at(0).expect("checked ahead");
                self.pos += 1;
                let binders = self.binders_until_dot()?;
                let mut args = Vec::new();
                if shape.arity() == 1 {
                    args.push(self.expr()?);
                } else {
                    while self.peek() != Some(&Tok::RParen) && !self.at_end() {
                        args.push(self.operand()?);
                    }
                }
                self.expect(&Tok::RParen)?;
                self.build(&span, &name, binders, args)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Ident(x)) => {
                if let Some(shape) = self.sig.shape(x) {
                    if shape.arity() == 0 && shape.valence() == 0 {
                        self.pos += 1;
                        if self.peek() == Some(&Tok::LBrack) {
                            return Err(SyntaxError::syntax(
                                self.span(),
                                format!("`{x}` is an abstraction, not a variable"),
                            ));
                        }
                        return self.build(&span, x, Vec::new(), Vec::new());
                    }
                    let hint = if binder_sugar(shape) {
                        format!("binder form `{x} ...` must be parenthesized here")
                    } else {
                        format!(
                            "abstraction `{x}` with shape {shape} is applied as ({x} ... . ...)"
                        )
                    };
                    let e = TermError::ArityMismatch {
                        name: x.as_str().into(),
                        what: "arguments",
                        expected: shape.arity(),
                        found: 0,
                    };
                    return Err(SyntaxError::new(
                        super::term_error_code(&e),
                        span,
                        format!("{e}; {hint}"),
                    ));
                }
                self.pos += 1;
                let mut args = Vec::new();
                if self.eat(&Tok::LBrack) {
                    loop {
                        args.push(self.expr()?);
                        if self.eat(&Tok::RBrack) {
                            break;
                        }
                        self.expect(&Tok::Comma)?;
                    }
                }
                Ok(Term::app(x.as_str(), args))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    /// A term that can stand next to another without separators.
    fn operand(&mut self) -> Result<Term, SyntaxError> {
        self.atom()
    }

    /// `[x_1 ... x_n. t]`
    pub(crate) fn template(&mut self) -> Result<Template, SyntaxError> {
        let span = self.span();
        self.expect(&Tok::LBrack)?;
        let binders = self.binders_until_dot()?;
        let body = self.expr()?;
        self.expect(&Tok::RBrack)?;
        Template::new(binders, body).map_err(|e| SyntaxError::term(span, &e))
    }

    /// `premise p ; ... |- c` or `|- c`.
    pub(crate) fn rule(&mut self) -> Result<Rule, SyntaxError> {
        let mut premises = Vec::new();
        if self.peek() != Some(&Tok::Turnstile) {
            loop {
                self.keyword("premise")?;
                let span = self.span();
                let p = if self.peek() == Some(&Tok::LBrack) {
                    let t = self.template()?;
                    Premise::new(t).map_err(|e| SyntaxError::term(span, &e))?
                } else {
                    Premise::term(self.expr()?)
                };
                premises.push(p);
                if !self.eat(&Tok::Semi) {
                    break;
                }
            }
        }
        self.expect(&Tok::Turnstile)?;
        let conclusion = self.expr()?;
        Ok(Rule::new(premises, conclusion))
    }
}

fn with_parser<T>(
    sig: &Signature,
    text: &str,
    f: impl FnOnce(&mut Parser) -> Result<T, SyntaxError>,
) -> Result<T, SyntaxError> {
    let file: Arc<str> = "<input>".into();
    let toks = lex(&file, text, 1)?;
    let lines = text.lines().count().max(1);
    let last = text.lines().last().map_or(0, |l| l.chars().count());
    let mut p = Parser::new(&toks, sig, Span::point(&file, lines, last + 1));
    let out = f(&mut p)?;
    p.finish()?;
    Ok(out)
}

pub fn parse_term(sig: &Signature, text: &str) -> Result<Term, SyntaxError> {
    with_parser(sig, text, |p| p.expr())
}

/// `[x_1 ... x_n. t]`
pub fn parse_template(sig: &Signature, text: &str) -> Result<Template, SyntaxError> {
    with_parser(sig, text, |p| p.template())
}

/// `premise p ; ... |- c`
pub fn parse_rule(sig: &Signature, text: &str) -> Result<Rule, SyntaxError> {
    with_parser(sig, text, |p| p.rule())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// Extends to the end of the enclosing construct.
    Open,
    /// Left of `=>`.
    ImpLeft,
    /// Operand of `==` or of a general form.
    Closed,
}

fn write_term(t: &Term, ctx: Ctx, out: &mut String) {
    match t {
        Term::Var(x, args) => {
            out.push_str(x);
            if !args.is_empty() {
                out.push('[');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_term(a, Ctx::Open, out);
                }
                out.push(']');
            }
        }
        Term::Abs(app) => {
            let name = app.name();
            let shape = app.shape();
            let args = app.args();
            let wrap = |needs: bool, out: &mut String, body: &dyn Fn(&mut String)| {
                if needs {
                    out.push('(');
                }
                body(out);
                if needs {
                    out.push(')');
                }
            };
            if is_infix(name, shape) {
                let imp = &**name == "=>";
                let needs = if imp {
                    ctx != Ctx::Open
                } else {
                    ctx == Ctx::Closed
                };
                wrap(needs, out, &|out| {
                    write_term(&args[0], if imp { Ctx::ImpLeft } else { Ctx::Closed }, out);
                    out.push_str(if imp { " => " } else { " == " });
                    write_term(&args[1], if imp { Ctx::Open } else { Ctx::Closed }, out);
                });
            } else if shape.arity() == 0 && shape.valence() == 0 {
                out.push_str(name);
            } else if binder_sugar(shape) {
                wrap(ctx != Ctx::Open, out, &|out| {
                    out.push_str(name);
                    for b in app.binders() {
                        out.push(' ');
                        out.push_str(b);
                    }
                    out.push_str(". ");
                    write_term(&args[0], Ctx::Open, out);
                });
            } else {
                out.push('(');
                out.push_str(name);
                for b in app.binders() {
                    out.push(' ');
                    out.push_str(b);
                }
                out.push('.');
                let inner = if args.len() == 1 {
                    Ctx::Open
                } else {
                    Ctx::Closed
                };
                for a in args {
                    out.push(' ');
                    write_term(a, inner, out);
                }
                out.push(')');
            }
        }
    }
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, Ctx::Open, &mut out);
    out
}

/// `[x_1 ... x_n. t]`
pub fn print_template(t: &Template) -> String {
    let mut out = String::from("[");
    for (i, b) in t.binders().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(b);
    }
    out.push_str(". ");
    write_term(t.body(), Ctx::Open, &mut out);
    out.push(']');
    out
}
