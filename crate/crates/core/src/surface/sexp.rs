//! S-expression reader and canonical printer.
//!
//! The reader is iterative and bounds nesting depth and list length, so
//! arbitrary input cannot exhaust the stack.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub const MAX_DEPTH: usize = 256;
pub const MAX_LIST_LEN: usize = 4096;

/// 1-based line and column (in characters).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SexpKind {
    Atom(String),
    List(Vec<Sexp>),
}

/// Equality ignores spans.
#[derive(Clone, Debug, Eq)]
pub struct Sexp {
    pub kind: SexpKind,
    pub span: Span,
}

impl PartialEq for Sexp {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp {
            kind: SexpKind::Atom(s.into()),
            span: Span::default(),
        }
    }

    pub fn list(items: Vec<Sexp>) -> Sexp {
        Sexp {
            kind: SexpKind::List(items),
            span: Span::default(),
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match &self.kind {
            SexpKind::Atom(a) => Some(a),
            SexpKind::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match &self.kind {
            SexpKind::List(l) => Some(l),
            SexpKind::Atom(_) => None,
        }
    }

    fn write(&self, out: &mut String) {
        let mut stack: Vec<(&[Sexp], usize)> = Vec::new();
        let mut cur = self;
        loop {
            match &cur.kind {
                SexpKind::Atom(a) => out.push_str(a),
                SexpKind::List(items) => {
                    out.push('(');
                    stack.push((items, 0));
                }
            }
            loop {
                let Some((items, i)) = stack.last_mut() else {
                    return;
                };
                if *i < items.len() {
                    if *i > 0 {
                        out.push(' ');
                    }
                    cur = &items[*i];
                    *i += 1;
                    break;
                }
                out.push(')');
                stack.pop();
            }
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s);
        f.write_str(&s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Form(Sexp),
    /// Text after the `;`.
    Comment(String),
    Blank,
}

/// A source file: top-level forms interleaved with comment and blank lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub items: Vec<Item>,
}

impl Document {
    pub fn forms(&self) -> impl Iterator<Item = &Sexp> {
        self.items.iter().filter_map(|i| match i {
            Item::Form(s) => Some(s),
            _ => None,
        })
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            match item {
                Item::Form(s) => writeln!(f, "{s}")?,
                Item::Comment(c) => writeln!(f, ";{c}")?,
                Item::Blank => writeln!(f)?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub message: String,
    pub line: u32,
    pub col: u32,
}

impl ParseError {
    fn at(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            message: message.into(),
            line: pos.line,
            col: pos.col,
        }
    }
}

fn is_delim(c: char) -> bool {
    c.is_whitespace() || c == '(' || c == ')' || c == ';'
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    /// Position of the last consumed character.
    fn last(&self) -> Pos {
        Pos {
            line: self.pos.line,
            col: self.pos.col.saturating_sub(1).max(1),
        }
    }
}

pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        pos: Pos { line: 1, col: 1 },
    };
    let mut items = Vec::new();
    // Open lists: start position and children so far.
    let mut stack: Vec<(Pos, Vec<Sexp>)> = Vec::new();
    let mut line_has_content = false;
    while let Some(c) = cur.peek() {
        let start = cur.pos;
        match c {
            '\n' => {
                cur.bump();
                if stack.is_empty() && !line_has_content {
                    items.push(Item::Blank);
                }
                line_has_content = false;
            }
            c if c.is_whitespace() => {
                cur.bump();
            }
            ';' => {
                cur.bump();
                let mut body = String::new();
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    body.push(c);
                    cur.bump();
                }
                if stack.is_empty() {
                    items.push(Item::Comment(body));
                }
                line_has_content = true;
            }
            '(' => {
                cur.bump();
                line_has_content = true;
                if stack.len() >= MAX_DEPTH {
                    return Err(ParseError::at(start, format!("nesting deeper than {MAX_DEPTH}")));
                }
                stack.push((start, Vec::new()));
            }
            ')' => {
                cur.bump();
                line_has_content = true;
                let Some((open, children)) = stack.pop() else {
                    return Err(ParseError::at(start, "unexpected `)`"));
                };
                let node = Sexp {
                    kind: SexpKind::List(children),
                    span: Span {
                        start: open,
                        end: cur.last(),
                    },
                };
                push_node(&mut stack, &mut items, node)?;
            }
            c if c.is_control() => {
                return Err(ParseError::at(start, format!("unexpected character {c:?}")));
            }
            _ => {
                line_has_content = true;
                let mut atom = String::new();
                while let Some(c) = cur.peek() {
                    if is_delim(c) {
                        break;
                    }
                    if c.is_control() {
                        return Err(ParseError::at(cur.pos, format!("unexpected character {c:?}")));
                    }
                    atom.push(c);
                    cur.bump();
                }
                let node = Sexp {
                    kind: SexpKind::Atom(atom),
                    span: Span { start, end: cur.last() },
                };
                push_node(&mut stack, &mut items, node)?;
            }
        }
    }
    if let Some((open, _)) = stack.last() {
        return Err(ParseError::at(*open, "unclosed `(`"));
    }
    Ok(Document { items })
}

fn push_node(stack: &mut [(Pos, Vec<Sexp>)], items: &mut Vec<Item>, node: Sexp) -> Result<(), ParseError> {
    match stack.last_mut() {
        Some((open, children)) => {
            if children.len() >= MAX_LIST_LEN {
                return Err(ParseError::at(*open, format!("list longer than {MAX_LIST_LEN}")));
            }
            children.push(node);
        }
        None => items.push(Item::Form(node)),
    }
    Ok(())
}

/// Parses exactly one form, ignoring comments and whitespace.
pub fn parse_one(text: &str) -> Result<Sexp, ParseError> {
    let doc = parse_document(text)?;
    let mut forms = doc.forms();
    let first = forms
        .next()
        .cloned()
        .ok_or_else(|| ParseError::at(Pos { line: 1, col: 1 }, "expected a form"))?;
    if let Some(extra) = forms.next() {
        return Err(ParseError::at(extra.span.start, "expected a single form"));
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_and_lists() {
        let s = parse_one("(app (lam x x) false)").unwrap();
        assert_eq!(s.to_string(), "(app (lam x x) false)");
        let l = s.as_list().unwrap();
        assert_eq!(l[0].as_atom(), Some("app"));
        assert_eq!(l[1].span.start, Pos { line: 1, col: 6 });
        assert_eq!(l[1].span.end, Pos { line: 1, col: 14 });
        assert_eq!(s.span.end, Pos { line: 1, col: 21 });
    }

    #[test]
    fn errors_have_positions() {
        let e = parse_one("(app\n  x").unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
        let e = parse_one("true\n  )").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert!(parse_one("").is_err());
        assert!(parse_one("a b").is_err());
        assert!(parse_one("a\u{0}").is_err());
    }

    #[test]
    fn depth_and_width_are_bounded() {
        let deep = "(".repeat(MAX_DEPTH + 1) + &")".repeat(MAX_DEPTH + 1);
        assert!(parse_one(&deep).is_err());
        let ok = "(".repeat(MAX_DEPTH) + &")".repeat(MAX_DEPTH);
        assert!(parse_one(&ok).is_ok());
        let wide = format!("({})", "a ".repeat(MAX_LIST_LEN + 1));
        assert!(parse_one(&wide).is_err());
    }

    #[test]
    fn documents_round_trip() {
        let text = "; header\n\n(the bool true)\n;; note\nfalse\n";
        let doc = parse_document(text).unwrap();
        assert_eq!(doc.items.len(), 5);
        assert_eq!(doc.to_string(), text);
        assert_eq!(doc.forms().count(), 2);
    }

    #[test]
    fn multiline_forms_print_on_one_line() {
        let doc = parse_document("(app f\n   x)\n").unwrap();
        assert_eq!(doc.to_string(), "(app f x)\n");
    }
}
