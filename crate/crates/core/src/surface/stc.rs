//! Surface syntax of the object theory.
//!
//! ```text
//! term ::= x | true | false | bool | tp | u0 | u1
//!        | (lam x term) | (app term term+) | (pi (x term) term) | (-> term term)
//!        | (if (x term) term term term) | (tm term) | (the term term)
//! ```
//!
//! A top-level `(the A t)` asks for `t` to be checked against `A`; any other
//! top-level term is checked against `bool`.

use super::sexp::{Sexp, SexpKind, Span};
use super::{fresh_name, is_identifier, resolve, var_name, LowerError, LowerErrorKind};
use crate::syntax::{occurs_free, shift, Term};

pub const KEYWORDS: &[&str] = &[
    "lam", "app", "pi", "->", "if", "tm", "the", "true", "false", "bool", "tp", "u0", "u1",
];

/// One top-level checking request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub term: Term,
    pub ty: Term,
    pub span: Span,
}

pub fn lower_entry(s: &Sexp) -> Result<Entry, LowerError> {
    if let Some([head, ty, t]) = s.as_list() {
        if head.as_atom() == Some("the") {
            let mut scope = Vec::new();
            return Ok(Entry {
                ty: lower(ty, &mut scope)?,
                term: lower(t, &mut scope)?,
                span: s.span,
            });
        }
    }
    Ok(Entry {
        term: lower(s, &mut Vec::new())?,
        ty: Term::Bool,
        span: s.span,
    })
}

/// Lowers a closed term.
pub fn lower_closed(s: &Sexp) -> Result<Term, LowerError> {
    lower(s, &mut Vec::new())
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

/// Lowers `s` under named variables `scope` (innermost last).
pub fn lower(s: &Sexp, scope: &mut Vec<String>) -> Result<Term, LowerError> {
    let items = match &s.kind {
        SexpKind::Atom(a) => {
            return match a.as_str() {
                "true" => Ok(Term::True),
                "false" => Ok(Term::False),
                "bool" => Ok(Term::Bool),
                "tp" => Ok(Term::Tp),
                "u0" => Ok(Term::U0),
                "u1" => Ok(Term::U1),
                x if is_identifier(x, KEYWORDS) => match resolve(x, scope) {
                    Some(i) => Ok(Term::Var(i)),
                    None => Err(LowerError {
                        kind: LowerErrorKind::Unbound,
                        message: format!("unbound variable `{x}`"),
                        span: s.span,
                    }),
                },
                _ => Err(LowerError::syntax(s, format!("unexpected atom `{a}`"))),
            }
        }
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
        "lam" => {
            arity(2)?;
            let x = binder(&args[0])?;
            Ok(Term::lam(under(scope, x, |sc| lower(&args[1], sc))?))
        }
        "app" => {
            if args.len() < 2 {
                return Err(LowerError::syntax(
                    s,
                    "`app` takes a function and at least one argument",
                ));
            }
            let f = lower(&args[0], scope)?;
            args[1..].iter().try_fold(f, |f, a| Ok(Term::app(f, lower(a, scope)?)))
        }
        "pi" => {
            arity(2)?;
            let (x, dom) = binding(&args[0], scope)?;
            let cod = under(scope, x, |sc| lower(&args[1], sc))?;
            Ok(Term::pi(dom, cod))
        }
        "->" => {
            arity(2)?;
            Ok(Term::arrow(lower(&args[0], scope)?, lower(&args[1], scope)?))
        }
        "if" => {
            arity(4)?;
            let Some([x, motive]) = args[0].as_list() else {
                return Err(LowerError::syntax(&args[0], "expected a motive `(x type)`"));
            };
            let x = binder(x)?;
            let motive = under(scope, x, |sc| lower(motive, sc))?;
            Ok(Term::if_(
                motive,
                lower(&args[1], scope)?,
                lower(&args[2], scope)?,
                lower(&args[3], scope)?,
            ))
        }
        "tm" => {
            arity(1)?;
            Ok(Term::tm(lower(&args[0], scope)?))
        }
        "the" => {
            arity(2)?;
            Ok(Term::annot(lower(&args[0], scope)?, lower(&args[1], scope)?))
        }
        _ => Err(LowerError::syntax(head, format!("unknown form `{head}`"))),
    }
}

fn binding(s: &Sexp, scope: &mut Vec<String>) -> Result<(String, Term), LowerError> {
    match s.as_list() {
        Some([x, ty]) => Ok((binder(x)?, lower(ty, scope)?)),
        _ => Err(LowerError::syntax(s, "expected a binding `(x type)`")),
    }
}

fn mentions_innermost(t: &Term) -> bool {
    occurs_free(t, 0)
}

/// Surface form of `t` with free variables named by `scope`.
pub fn to_sexp(t: &Term, scope: &mut Vec<String>) -> Sexp {
    match t {
        Term::Var(i) => Sexp::atom(var_name(*i, scope)),
        Term::Tp => Sexp::atom("tp"),
        Term::U0 => Sexp::atom("u0"),
        Term::U1 => Sexp::atom("u1"),
        Term::Bool => Sexp::atom("bool"),
        Term::True => Sexp::atom("true"),
        Term::False => Sexp::atom("false"),
        Term::Tm(x) => Sexp::list(vec![Sexp::atom("tm"), to_sexp(x, scope)]),
        Term::Lam(b) => {
            let x = fresh_name("x", scope);
            let body = under(scope, x.clone(), |sc| to_sexp(b, sc));
            Sexp::list(vec![Sexp::atom("lam"), Sexp::atom(x), body])
        }
        Term::App(..) => {
            let mut spine = Vec::new();
            let mut head = t;
            while let Term::App(f, arg) = head {
                spine.push(&**arg);
                head = f;
            }
            let mut items = vec![Sexp::atom("app"), to_sexp(head, scope)];
            items.extend(spine.into_iter().rev().map(|arg| to_sexp(arg, scope)));
            Sexp::list(items)
        }
        Term::Pi(dom, cod) if !mentions_innermost(cod) => Sexp::list(vec![
            Sexp::atom("->"),
            to_sexp(dom, scope),
            to_sexp(&shift(cod, 0, -1), scope),
        ]),
        Term::Pi(dom, cod) => {
            let d = to_sexp(dom, scope);
            let x = fresh_name("x", scope);
            let c = under(scope, x.clone(), |sc| to_sexp(cod, sc));
            Sexp::list(vec![Sexp::atom("pi"), Sexp::list(vec![Sexp::atom(x), d]), c])
        }
        Term::If {
            motive,
            scrutinee,
            tbranch,
            fbranch,
        } if **scrutinee == Term::True && tbranch == fbranch && !mentions_innermost(motive) => Sexp::list(vec![
            Sexp::atom("the"),
            to_sexp(&shift(motive, 0, -1), scope),
            to_sexp(tbranch, scope),
        ]),
        Term::If {
            motive,
            scrutinee,
            tbranch,
            fbranch,
        } => {
            let x = fresh_name("b", scope);
            let m = under(scope, x.clone(), |sc| to_sexp(motive, sc));
            Sexp::list(vec![
                Sexp::atom("if"),
                Sexp::list(vec![Sexp::atom(x), m]),
                to_sexp(scrutinee, scope),
                to_sexp(tbranch, scope),
                to_sexp(fbranch, scope),
            ])
        }
    }
}

pub fn print_term(t: &Term, scope: &[String]) -> String {
    to_sexp(t, &mut scope.to_vec()).to_string()
}

pub fn entry_to_sexp(term: &Term, ty: &Term) -> Sexp {
    if *ty == Term::Bool {
        to_sexp(term, &mut Vec::new())
    } else {
        Sexp::list(vec![
            Sexp::atom("the"),
            to_sexp(ty, &mut Vec::new()),
            to_sexp(term, &mut Vec::new()),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::super::sexp::parse_one;
    use super::*;
    use Term::*;

    fn read(s: &str) -> Result<Term, LowerError> {
        lower_closed(&parse_one(s).unwrap())
    }

    #[test]
    fn lowering_examples() {
        assert_eq!(read("true").unwrap(), True);
        assert_eq!(
            read("(app (lam x x) false)").unwrap(),
            Term::app(Term::lam(Var(0)), False)
        );
        assert_eq!(
            read("(if (b bool) true false true)").unwrap(),
            Term::if_(Bool, True, False, True)
        );
        assert_eq!(
            read("(lam f (lam x (app f x x)))").unwrap(),
            Term::lam(Term::lam(Term::app(Term::app(Var(1), Var(0)), Var(0))))
        );
        assert_eq!(read("(pi (x bool) bool)").unwrap(), Term::pi(Bool, Bool));
        assert_eq!(read("(-> bool tp)").unwrap(), Term::arrow(Bool, Tp));
        assert_eq!(read("(the bool true)").unwrap(), Term::annot(Bool, True));
    }

    #[test]
    fn lowering_errors() {
        assert_eq!(read("y").unwrap_err().kind, LowerErrorKind::Unbound);
        for bad in [
            "(lam true x)",
            "(app f)",
            "(pi x bool)",
            "(frob)",
            "()",
            "(if bool true true true)",
            "42",
        ] {
            let e = read(bad).unwrap_err();
            assert_eq!(e.kind, LowerErrorKind::Syntax, "{bad}");
        }
    }

    #[test]
    fn printing_examples() {
        let id = Term::lam(Var(0));
        assert_eq!(print_term(&Term::app(id.clone(), False), &[]), "(app (lam x x) false)");
        assert_eq!(print_term(&Term::pi(Bool, Bool), &[]), "(-> bool bool)");
        assert_eq!(
            print_term(&Term::pi(U0, Term::arrow(Var(0), Var(0))), &[]),
            "(pi (x u0) (-> x x))"
        );
        assert_eq!(print_term(&Term::annot(Bool, True), &[]), "(the bool true)");
        assert_eq!(
            print_term(&Term::lam(Term::lam(Term::app(Var(1), Var(0)))), &["x".into()]),
            "(lam x1 (lam x2 (app x1 x2)))"
        );
        assert_eq!(print_term(&Var(0), &["x".into(), "x".into()]), "x");
        assert_eq!(print_term(&Var(1), &["x".into(), "x".into()]), "#1");
    }

    #[test]
    fn print_then_lower_is_identity() {
        let samples = [
            Term::lam(Term::lam(Term::app(Term::app(Var(1), Var(0)), Var(0)))),
            Term::if_(
                Term::if_(Tp, Var(0), Bool, Term::arrow(Bool, Bool)),
                True,
                False,
                Term::lam(Var(0)),
            ),
            Term::pi(U0, Term::pi(Var(0), Term::tm(Var(1)))),
            Term::annot(Term::arrow(Bool, Bool), Term::lam(Var(0))),
        ];
        for t in samples {
            let text = print_term(&t, &[]);
            assert_eq!(read(&text).unwrap(), t, "{text}");
        }
    }

    #[test]
    fn entries() {
        let e = lower_entry(&parse_one("(the (-> bool bool) (lam x x))").unwrap()).unwrap();
        assert_eq!(e.ty, Term::arrow(Bool, Bool));
        assert_eq!(e.term, Term::lam(Var(0)));
        let e = lower_entry(&parse_one("false").unwrap()).unwrap();
        assert_eq!(e.ty, Bool);
        assert_eq!(entry_to_sexp(&e.term, &e.ty).to_string(), "false");
    }
}
