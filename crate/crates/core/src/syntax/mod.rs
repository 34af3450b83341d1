//! Concrete syntax: terms, theory files, model files and proof scripts.
//!
//! All formats are line-oriented. `--` starts a comment that runs to the end
//! of the line. The printers emit one canonical text per value, and parsing
//! that text yields the value back.

mod files;
mod lexer;
mod term;

use std::fmt;
use std::sync::Arc;

use crate::kernel::KernelError;
use crate::terms::TermError;

pub use files::{
    parse_model, parse_proof_script, parse_theory, print_model, print_proof_script, print_rule,
    print_rule_numbered, print_substitution, print_theory, ParsedScript,
};
pub use lexer::{lex, Tok, Token};
pub use term::{parse_rule, parse_template, parse_term, print_template, print_term};

/// A position range in a source file; lines and columns start at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub file: Arc<str>,
    pub line: usize,
    pub col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl Span {
    pub fn point(file: &Arc<str>, line: usize, col: usize) -> Span {
        Span {
            file: file.clone(),
            line,
            col,
            end_line: line,
            end_col: col,
        }
    }

    pub fn to(&self, end: &Span) -> Span {
        Span {
            end_line: end.end_line,
            end_col: end.end_col,
            ..self.clone()
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

/// An error located in a source file. Displays as
/// `ERROR <code> <file>:<line>:<col> <message>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub code: &'static str,
    pub span: Span,
    pub message: String,
}

impl SyntaxError {
    pub fn new(code: &'static str, span: Span, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            code,
            span,
            message: message.into(),
        }
    }

    pub fn syntax(span: Span, message: impl Into<String>) -> SyntaxError {
        SyntaxError::new("SyntaxError", span, message)
    }

    pub fn term(span: Span, e: &TermError) -> SyntaxError {
        SyntaxError::new(term_error_code(e), span, e.to_string())
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let message = self.message.replace('\n', " ");
        write!(f, "ERROR {} {} {}", self.code, self.span, message)
    }
}

impl std::error::Error for SyntaxError {}

pub fn term_error_code(e: &TermError) -> &'static str {
    match e {
        TermError::ArityMismatch { .. } | TermError::ShapeMismatch(_) => "ArityError",
        TermError::UnknownAbstraction(_) => "UnknownAbstraction",
        TermError::DuplicateAbstraction(_) => "DuplicateAbstraction",
        TermError::DuplicateBinder(_) => "DuplicateBinder",
        TermError::UnusedBinder(_) => "UnusedBinder",
        TermError::NonPositiveIndex(_)
        | TermError::CoverageGap(_)
        | TermError::EmptyUnionMismatch { .. }
        | TermError::ExcessIndex { .. } => "ShapeError",
    }
}

pub fn kernel_error_code(e: &KernelError) -> &'static str {
    match e {
        KernelError::UnknownRule(_) => "UnknownRule",
        KernelError::DuplicateRuleName(_) => "DuplicateRuleName",
        KernelError::MalformedRule { .. } => "MalformedRule",
        KernelError::UnknownAbstraction { .. } => "UnknownAbstraction",
        KernelError::NameClash(_) => "NameClash",
        KernelError::NotAnAxiom(_) => "NotAnAxiom",
        KernelError::LogicMismatch => "LogicMismatch",
        KernelError::SignatureMismatch(_) => "SignatureMismatch",
        KernelError::BadIndex { .. } => "BadIndex",
        KernelError::PremiseMismatch => "PremiseMismatch",
        KernelError::TargetMismatch { .. } => "TargetMismatch",
        KernelError::NotAnExtension => "NotAnExtension",
        KernelError::NotForallXX => "NotForallXX",
    }
}
