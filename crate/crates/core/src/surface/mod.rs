//! Concrete syntax: s-expressions with named variables, lowered to and
//! printed from the de Bruijn kernels.

pub mod calf;
pub mod sexp;
pub mod stc;

use serde::Serialize;
use thiserror::Error;

use sexp::{Pos, Sexp, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerErrorKind {
    /// Malformed form: wrong keyword, arity or binder.
    Syntax,
    /// A well-formed name with no binding in scope.
    Unbound,
    /// A value where a computation is expected, or the reverse.
    Sort,
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{}:{}: {message}", span.start.line, span.start.col)]
pub struct LowerError {
    pub kind: LowerErrorKind,
    pub message: String,
    pub span: Span,
}

impl LowerError {
    pub(crate) fn syntax(at: &Sexp, message: impl Into<String>) -> Self {
        LowerError {
            kind: LowerErrorKind::Syntax,
            message: message.into(),
            span: at.span,
        }
    }

    pub fn pos(&self) -> Pos {
        self.span.start
    }
}

pub(crate) fn is_identifier(s: &str, keywords: &[&str]) -> bool {
    let mut chars = s.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    (first.is_ascii_alphabetic() || first == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || "_'-?!".contains(c))
        && !keywords.contains(&s)
}

/// Picks a name based on `base` that is not in `scope`.
pub(crate) fn fresh_name(base: &str, scope: &[String]) -> String {
    if !scope.iter().any(|n| n == base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|c| !scope.iter().any(|n| n == c))
        .expect("unbounded supply of names")
}

/// Prints a variable by de Bruijn index, falling back to `#i` when the name
/// is missing or shadowed.
pub(crate) fn var_name(i: usize, scope: &[String]) -> String {
    let n = scope.len();
    if i < n {
        let name = &scope[n - 1 - i];
        let shadowed = scope[n - i..].iter().any(|m| m == name);
        if !shadowed {
            return name.clone();
        }
    }
    format!("#{i}")
}

pub(crate) fn resolve(name: &str, scope: &[String]) -> Option<usize> {
    scope.iter().rev().position(|n| n == name)
}
