//! Surface syntax of the CBPV fragment.
//!
//! ```text
//! value ::= x | true | false | (thunk comp)
//! comp  ::= (ret value) | (bind comp (x comp)) | (step comp) | (force value)
//!         | (lam x comp) | (app comp value+) | (if value comp comp)
//! vtype ::= bool | (U ctype)
//! ctype ::= (F vtype) | (-> vtype ctype)
//! ```
//!
//! A top-level `(the X m)` checks `m` against `X`; any other top-level term
//! is checked against `(F bool)`.

use super::sexp::{Sexp, SexpKind, Span};
use super::{fresh_name, is_identifier, resolve, var_name, LowerError, LowerErrorKind};
use crate::calf::syntax::{CType, CbpvTerm, CbpvType, Comp, VType, Val};

pub const KEYWORDS: &[&str] = &[
    "ret", "bind", "step", "force", "thunk", "lam", "app", "if", "the", "true", "false", "bool", "U", "F", "->",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub term: CbpvTerm,
    pub ty: CbpvType,
    pub span: Span,
}

pub fn lower_entry(s: &Sexp) -> Result<Entry, LowerError> {
    if let Some([head, ty, t]) = s.as_list() {
        if head.as_atom() == Some("the") {
            return Ok(Entry {
                ty: lower_type(ty)?,
                term: lower_term(t, &mut Vec::new())?,
                span: s.span,
            });
        }
    }
    Ok(Entry {
        term: lower_term(s, &mut Vec::new())?,
        ty: CbpvType::Comp(CType::f_bool()),
        span: s.span,
    })
}

fn sort_error(s: &Sexp, expected: &str) -> LowerError {
    LowerError {
        kind: LowerErrorKind::Sort,
        message: format!("expected a {expected}, found `{s}`"),
        span: s.span,
    }
}

fn binder(s: &Sexp) -> Result<String, LowerError> {
    match s.as_atom() {
        Some(x) if is_identifier(x, KEYWORDS) => Ok(x.to_string()),
        _ => Err(LowerError::syntax(s, format!("expected a variable name, found `{s}`"))),
    }
}

fn under<T>(scope: &mut Vec<String>, x: String, f: impl FnOnce(&mut Vec<String>) -> T) -> T {
    scope.push(x);
    let r = f(scope);
    scope.pop();
    r
}

/// Lowers a term of either sort.
pub fn lower_term(s: &Sexp, scope: &mut Vec<String>) -> Result<CbpvTerm, LowerError> {
    if is_value_form(s) {
        lower_val(s, scope).map(CbpvTerm::Val)
    } else {
        lower_comp(s, scope).map(CbpvTerm::Comp)
    }
}

fn is_value_form(s: &Sexp) -> bool {
    match &s.kind {
        SexpKind::Atom(_) => true,
        SexpKind::List(items) => items.first().and_then(Sexp::as_atom) == Some("thunk"),
    }
}

pub fn lower_val(s: &Sexp, scope: &mut Vec<String>) -> Result<Val, LowerError> {
    match &s.kind {
        SexpKind::Atom(a) => match a.as_str() {
            "true" => Ok(Val::True),
            "false" => Ok(Val::False),
            x if is_identifier(x, KEYWORDS) => resolve(x, scope).map(Val::Var).ok_or_else(|| LowerError {
                kind: LowerErrorKind::Unbound,
                message: format!("unbound variable `{x}`"),
                span: s.span,
            }),
            _ => Err(LowerError::syntax(s, format!("unexpected atom `{a}`"))),
        },
        SexpKind::List(items) => match items.as_slice() {
            [head, m] if head.as_atom() == Some("thunk") => Ok(Val::thunk(lower_comp(m, scope)?)),
            [head, ..] if head.as_atom() == Some("thunk") => Err(LowerError::syntax(s, "`thunk` takes 1 argument")),
            [head, ..] if head.as_atom().is_some_and(|h| COMP_FORMS.contains(&h)) => Err(sort_error(s, "value")),
            _ => Err(LowerError::syntax(s, format!("unknown form `{s}`"))),
        },
    }
}

const COMP_FORMS: &[&str] = &["ret", "bind", "step", "force", "lam", "app", "if"];

pub fn lower_comp(s: &Sexp, scope: &mut Vec<String>) -> Result<Comp, LowerError> {
    let items = match &s.kind {
        SexpKind::Atom(a) if a == "true" || a == "false" || is_identifier(a, KEYWORDS) => {
            return Err(sort_error(s, "computation"))
        }
        SexpKind::Atom(a) => return Err(LowerError::syntax(s, format!("unexpected atom `{a}`"))),
        SexpKind::List(items) => items,
    };
    let Some((head, args)) = items.split_first() else {
        return Err(LowerError::syntax(s, "empty form"));
    };
    let kw = head.as_atom().unwrap_or("");
    let arity = |n: usize| -> Result<(), LowerError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(LowerError::syntax(
                s,
                format!("`{kw}` takes {n} arguments, found {}", args.len()),
            ))
        }
    };
    match kw {
        "ret" => {
            arity(1)?;
            Ok(Comp::ret(lower_val(&args[0], scope)?))
        }
        "bind" => {
            arity(2)?;
            let m = lower_comp(&args[0], scope)?;
            let Some([x, n]) = args[1].as_list() else {
                return Err(LowerError::syntax(&args[1], "expected a continuation `(x comp)`"));
            };
            let x = binder(x)?;
            let n = under(scope, x, |sc| lower_comp(n, sc))?;
            Ok(Comp::bind(m, n))
        }
        "step" => {
            arity(1)?;
            Ok(Comp::step(lower_comp(&args[0], scope)?))
        }
        "force" => {
            arity(1)?;
            Ok(Comp::force(lower_val(&args[0], scope)?))
        }
        "lam" => {
            arity(2)?;
            let x = binder(&args[0])?;
            Ok(Comp::lam(under(scope, x, |sc| lower_comp(&args[1], sc))?))
        }
        "app" => {
            if args.len() < 2 {
                return Err(LowerError::syntax(
                    s,
                    "`app` takes a computation and at least one argument",
                ));
            }
            let m = lower_comp(&args[0], scope)?;
            args[1..]
                .iter()
                .try_fold(m, |m, v| Ok(Comp::app(m, lower_val(v, scope)?)))
        }
        "if" => {
            arity(3)?;
            Ok(Comp::if_(
                lower_val(&args[0], scope)?,
                lower_comp(&args[1], scope)?,
                lower_comp(&args[2], scope)?,
            ))
        }
        "thunk" => Err(sort_error(s, "computation")),
        _ => Err(LowerError::syntax(head, format!("unknown form `{head}`"))),
    }
}

pub fn lower_type(s: &Sexp) -> Result<CbpvType, LowerError> {
    match s.as_list() {
        Some([head, ..]) if matches!(head.as_atom(), Some("F") | Some("->")) => lower_ctype(s).map(CbpvType::Comp),
        _ => lower_vtype(s).map(CbpvType::Val),
    }
}

pub fn lower_vtype(s: &Sexp) -> Result<VType, LowerError> {
    match &s.kind {
        SexpKind::Atom(a) if a == "bool" => Ok(VType::Bool),
        SexpKind::List(items) => match items.as_slice() {
            [head, x] if head.as_atom() == Some("U") => Ok(VType::u(lower_ctype(x)?)),
            _ => Err(LowerError::syntax(s, format!("expected a value type, found `{s}`"))),
        },
        _ => Err(LowerError::syntax(s, format!("expected a value type, found `{s}`"))),
    }
}

pub fn lower_ctype(s: &Sexp) -> Result<CType, LowerError> {
    match s.as_list() {
        Some([head, a]) if head.as_atom() == Some("F") => Ok(CType::f(lower_vtype(a)?)),
        Some([head, a, x]) if head.as_atom() == Some("->") => Ok(CType::arrow(lower_vtype(a)?, lower_ctype(x)?)),
        _ => Err(LowerError::syntax(
            s,
            format!("expected a computation type, found `{s}`"),
        )),
    }
}

pub fn val_to_sexp(v: &Val, scope: &mut Vec<String>) -> Sexp {
    match v {
        Val::Var(i) => Sexp::atom(var_name(*i, scope)),
        Val::True => Sexp::atom("true"),
        Val::False => Sexp::atom("false"),
        Val::Thunk(m) => Sexp::list(vec![Sexp::atom("thunk"), comp_to_sexp(m, scope)]),
    }
}

pub fn comp_to_sexp(m: &Comp, scope: &mut Vec<String>) -> Sexp {
    match m {
        Comp::Ret(v) => Sexp::list(vec![Sexp::atom("ret"), val_to_sexp(v, scope)]),
        Comp::Step(m) => Sexp::list(vec![Sexp::atom("step"), comp_to_sexp(m, scope)]),
        Comp::Force(v) => Sexp::list(vec![Sexp::atom("force"), val_to_sexp(v, scope)]),
        Comp::Bind(m, n) => {
            let first = comp_to_sexp(m, scope);
            let x = fresh_name("x", scope);
            let rest = under(scope, x.clone(), |sc| comp_to_sexp(n, sc));
            Sexp::list(vec![Sexp::atom("bind"), first, Sexp::list(vec![Sexp::atom(x), rest])])
        }
        Comp::Lam(body) => {
            let x = fresh_name("x", scope);
            let b = under(scope, x.clone(), |sc| comp_to_sexp(body, sc));
            Sexp::list(vec![Sexp::atom("lam"), Sexp::atom(x), b])
        }
        Comp::App(..) => {
            let mut spine = Vec::new();
            let mut head = m;
            while let Comp::App(f, v) = head {
                spine.push(&**v);
                head = f;
            }
            let mut items = vec![Sexp::atom("app"), comp_to_sexp(head, scope)];
            items.extend(spine.into_iter().rev().map(|v| val_to_sexp(v, scope)));
            Sexp::list(items)
        }
        Comp::If(v, m, n) => Sexp::list(vec![
            Sexp::atom("if"),
            val_to_sexp(v, scope),
            comp_to_sexp(m, scope),
            comp_to_sexp(n, scope),
        ]),
    }
}

pub fn vtype_to_sexp(t: &VType) -> Sexp {
    match t {
        VType::Bool => Sexp::atom("bool"),
        VType::U(x) => Sexp::list(vec![Sexp::atom("U"), ctype_to_sexp(x)]),
    }
}

pub fn ctype_to_sexp(t: &CType) -> Sexp {
    match t {
        CType::F(a) => Sexp::list(vec![Sexp::atom("F"), vtype_to_sexp(a)]),
        CType::Arrow(a, x) => Sexp::list(vec![Sexp::atom("->"), vtype_to_sexp(a), ctype_to_sexp(x)]),
    }
}

pub fn print_comp(m: &Comp) -> String {
    comp_to_sexp(m, &mut Vec::new()).to_string()
}

pub fn print_val(v: &Val) -> String {
    val_to_sexp(v, &mut Vec::new()).to_string()
}

pub fn print_vtype(t: &VType) -> String {
    vtype_to_sexp(t).to_string()
}

pub fn print_ctype(t: &CType) -> String {
    ctype_to_sexp(t).to_string()
}

pub fn entry_to_sexp(m: &Comp, ty: &CType) -> Sexp {
    if *ty == CType::f_bool() {
        comp_to_sexp(m, &mut Vec::new())
    } else {
        Sexp::list(vec![
            Sexp::atom("the"),
            ctype_to_sexp(ty),
            comp_to_sexp(m, &mut Vec::new()),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::super::sexp::parse_one;
    use super::*;

    fn comp(s: &str) -> Result<Comp, LowerError> {
        lower_comp(&parse_one(s).unwrap(), &mut Vec::new())
    }

    #[test]
    fn lowering_examples() {
        assert_eq!(comp("(ret true)").unwrap(), Comp::ret(Val::True));
        assert_eq!(
            comp("(bind (step (ret true)) (x (step (ret x))))").unwrap(),
            Comp::bind(Comp::step(Comp::ret(Val::True)), Comp::step(Comp::ret(Val::Var(0))))
        );
        assert_eq!(
            comp("(app (lam x (lam y (ret x))) true false)").unwrap(),
            Comp::app(
                Comp::app(Comp::lam(Comp::lam(Comp::ret(Val::Var(1)))), Val::True),
                Val::False
            )
        );
        assert_eq!(
            comp("(force (thunk (ret false)))").unwrap(),
            Comp::force(Val::thunk(Comp::ret(Val::False)))
        );
    }

    #[test]
    fn sorts_are_enforced() {
        assert_eq!(comp("true").unwrap_err().kind, LowerErrorKind::Sort);
        assert_eq!(comp("(ret (ret true))").unwrap_err().kind, LowerErrorKind::Sort);
        assert_eq!(comp("(thunk (ret true))").unwrap_err().kind, LowerErrorKind::Sort);
        assert_eq!(comp("(ret y)").unwrap_err().kind, LowerErrorKind::Unbound);
        assert_eq!(comp("(bind (ret true) x)").unwrap_err().kind, LowerErrorKind::Syntax);
        let e = lower_entry(&parse_one("true").unwrap()).unwrap();
        assert_eq!(e.term, CbpvTerm::Val(Val::True));
    }

    #[test]
    fn types() {
        let t = lower_type(&parse_one("(-> (U (F bool)) (F bool))").unwrap()).unwrap();
        assert_eq!(
            t,
            CbpvType::Comp(CType::arrow(VType::u(CType::f_bool()), CType::f_bool()))
        );
        assert_eq!(
            print_ctype(&CType::arrow(VType::Bool, CType::f_bool())),
            "(-> bool (F bool))"
        );
        assert!(lower_type(&parse_one("(F (F bool))").unwrap()).is_err());
    }

    #[test]
    fn print_then_lower_is_identity() {
        let m = Comp::bind(
            Comp::step(Comp::ret(Val::thunk(Comp::lam(Comp::ret(Val::Var(0)))))),
            Comp::app(Comp::force(Val::Var(0)), Val::True),
        );
        let text = print_comp(&m);
        assert_eq!(
            text,
            "(bind (step (ret (thunk (lam x (ret x))))) (x (app (force x) true)))"
        );
        assert_eq!(comp(&text).unwrap(), m);
    }
}
