//! Bidirectional type checking.
//!
//! Universes are Russell-style and cumulative: `tp : u0 : u1`, and a type in
//! a lower universe may be used where a higher one is expected. Every type
//! comparison goes through the conversion checker and is recorded.

use std::cell::RefCell;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::nbe::{EvalError, Nbe, Universe, Value};
use crate::surface::stc::print_term;
use crate::syntax::{alpha_eq, check_scope, shift, subst, Context, Term};

/// The universe a type lives in; `Large` types (those mentioning `u1`) live
/// in none.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sort {
    In(Universe),
    Large,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("variable index {index} is unbound in a context of length {depth}")]
    UnboundVariable { index: usize, depth: usize },
    #[error("term is not closed")]
    NotClosed,
    #[error("head of application has type {ty:?}, not a function type")]
    NotAFunction { fun: Term, ty: Term },
    #[error("a function was checked against the non-function type {expected:?}")]
    NotAFunctionType { expected: Term },
    #[error("if-motive is not a type family over bool: {reason}")]
    MotiveMismatch { motive: Term, reason: Box<TypeErrorKind> },
    #[error("cannot infer a type for {term:?}; annotate it")]
    CannotInfer { term: Term },
    #[error("{term:?} is not a type")]
    NotAType { term: Term, found: Term },
    #[error("{term:?} has no type")]
    NoUniverse { term: Term },
    #[error("type mismatch: expected {expected:?}, found {found:?}")]
    TypeMismatch {
        term: Term,
        expected: Term,
        found: Term,
        expected_normal: Term,
        found_normal: Term,
    },
    #[error("{0}")]
    Eval(EvalError),
}

impl TypeErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            TypeErrorKind::UnboundVariable { .. } => "unbound_variable",
            TypeErrorKind::NotClosed => "not_closed",
            TypeErrorKind::NotAFunction { .. } => "not_a_function",
            TypeErrorKind::NotAFunctionType { .. } => "not_a_function_type",
            TypeErrorKind::MotiveMismatch { .. } => "motive_mismatch",
            TypeErrorKind::CannotInfer { .. } => "cannot_infer",
            TypeErrorKind::NotAType { .. } => "not_a_type",
            TypeErrorKind::NoUniverse { .. } => "no_universe",
            TypeErrorKind::TypeMismatch { .. } => "type_mismatch",
            TypeErrorKind::Eval(_) => "evaluation",
        }
    }

    fn render(&self, scope: &[String]) -> String {
        let p = |t: &Term| print_term(t, scope);
        match self {
            TypeErrorKind::NotAFunction { fun, ty } => {
                format!("{} has type {}, which is not a function type", p(fun), p(ty))
            }
            TypeErrorKind::NotAFunctionType { expected } => {
                format!("a function cannot have type {}", p(expected))
            }
            TypeErrorKind::MotiveMismatch { motive, reason } => {
                let mut inner = scope.to_vec();
                inner.push("_".into());
                format!(
                    "motive {} is not a type family over bool: {}",
                    print_term(motive, &inner),
                    reason.render(&inner)
                )
            }
            TypeErrorKind::CannotInfer { term } => {
                format!("cannot infer a type for {}; annotate it with `the`", p(term))
            }
            TypeErrorKind::NotAType { term, found } => {
                format!("{} is not a type (it has type {})", p(term), p(found))
            }
            TypeErrorKind::NoUniverse { term } => format!("{} has no type", p(term)),
            TypeErrorKind::TypeMismatch {
                term,
                expected,
                found,
                expected_normal,
                found_normal,
            } => format!(
                "{} has type {} but {} was expected (normal forms {} and {})",
                p(term),
                p(found),
                p(expected),
                p(found_normal),
                p(expected_normal)
            ),
            other => other.to_string(),
        }
    }
}

/// A type error together with the names in scope where it arose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub kind: Box<TypeErrorKind>,
    pub scope: Vec<String>,
}

impl TypeError {
    fn new(ctx: &Context, kind: TypeErrorKind) -> Self {
        TypeError {
            kind: Box::new(kind),
            scope: ctx.names().map(str::to_string).collect(),
        }
    }

    pub fn code(&self) -> &'static str {
        self.kind.code()
    }

    fn cannot_infer(&self) -> bool {
        matches!(*self.kind, TypeErrorKind::CannotInfer { .. })
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.kind.render(&self.scope))
    }
}

impl std::error::Error for TypeError {}

/// The judgment `context ⊢ term : ty`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedTerm {
    pub term: Term,
    pub ty: Term,
    pub context: Context,
}

impl TypedTerm {
    /// Re-runs the checker on the judgment.
    pub fn replay(&self, checker: &Checker) -> Result<TypedTerm, TypeError> {
        checker.check(&self.context, &self.term, &self.ty)
    }
}

/// A type comparison performed while checking.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConversionRecord {
    #[serde(skip)]
    pub context: Context,
    #[serde(skip)]
    pub found: Term,
    #[serde(skip)]
    pub expected: Term,
    /// Whether the comparison used universe cumulativity.
    pub cumulative: bool,
}

impl ConversionRecord {
    /// Re-decides the comparison from scratch.
    pub fn replay(&self, nbe: &Nbe) -> Result<bool, EvalError> {
        let types: Vec<Term> = self.context.entries().iter().map(|(_, t)| t.clone()).collect();
        let vals = nbe.eval_telescope(&types)?;
        let env = crate::nbe::Env::identity(vals.len());
        let f = nbe.readback_type(&vals, &nbe.eval(&env, &self.found)?)?;
        let e = nbe.readback_type(&vals, &nbe.eval(&env, &self.expected)?)?;
        Ok(if self.cumulative {
            subtype(&f, &e)
        } else {
            alpha_eq(&f, &e)
        })
    }
}

/// Cumulative comparison of normal-form types.
pub fn subtype(found: &Term, expected: &Term) -> bool {
    fn level(t: &Term) -> Option<u8> {
        match t {
            Term::Tp => Some(0),
            Term::U0 => Some(1),
            Term::U1 => Some(2),
            _ => None,
        }
    }
    if alpha_eq(found, expected) {
        return true;
    }
    match (found, expected) {
        (Term::Pi(a1, b1), Term::Pi(a2, b2)) => alpha_eq(a1, a2) && subtype(b1, b2),
        _ => matches!((level(found), level(expected)), (Some(l1), Some(l2)) if l1 <= l2),
    }
}

pub struct Checker {
    nbe: Nbe,
    records: RefCell<Vec<ConversionRecord>>,
}

impl Default for Checker {
    fn default() -> Self {
        Checker::new(Nbe::default())
    }
}

/// Extends `ctx` with a name that does not shadow any name in scope, so
/// diagnostics can print every variable.
fn bind(ctx: &Context, base: &str, ty: Term) -> Context {
    let names: Vec<String> = ctx.names().map(str::to_string).collect();
    ctx.extended(crate::surface::fresh_name(base, &names), ty)
}

fn types_of(ctx: &Context) -> Vec<Term> {
    ctx.entries().iter().map(|(_, t)| t.clone()).collect()
}

impl Checker {
    pub fn new(nbe: Nbe) -> Self {
        Checker {
            nbe,
            records: RefCell::new(Vec::new()),
        }
    }

    pub fn nbe(&self) -> &Nbe {
        &self.nbe
    }

    /// Conversions recorded since the last call.
    pub fn take_records(&self) -> Vec<ConversionRecord> {
        std::mem::take(&mut *self.records.borrow_mut())
    }

    fn eval_err(&self, ctx: &Context, e: EvalError) -> TypeError {
        TypeError::new(ctx, TypeErrorKind::Eval(e))
    }

    /// β-normal η-long form of a type.
    pub fn normalize_type(&self, ctx: &Context, ty: &Term) -> Result<Term, TypeError> {
        let run = || -> Result<Term, EvalError> {
            let vals = self.nbe.eval_telescope(&types_of(ctx))?;
            let env = crate::nbe::Env::identity(vals.len());
            let v = self.nbe.eval(&env, ty)?;
            self.nbe.readback_type(&vals, &v)
        };
        run().map_err(|e| self.eval_err(ctx, e))
    }

    fn whnf_type(&self, ctx: &Context, ty: &Term) -> Result<Value, TypeError> {
        let env = crate::nbe::Env::identity(ctx.len());
        self.nbe.eval(&env, ty).map_err(|e| self.eval_err(ctx, e))
    }

    pub fn check_context(&self, ctx: &Context) -> Result<(), TypeError> {
        let mut prefix = Context::empty();
        for (name, ty) in ctx.entries() {
            self.check_type(&prefix, ty)?;
            prefix.push(name.clone(), ty.clone());
        }
        Ok(())
    }

    /// Checks that `ty` is a type and returns the universe it lives in.
    pub fn check_type(&self, ctx: &Context, ty: &Term) -> Result<Sort, TypeError> {
        self.scope(ctx, ty)?;
        self.sort_of(ctx, ty)
    }

    fn scope(&self, ctx: &Context, t: &Term) -> Result<(), TypeError> {
        check_scope(t, ctx.len()).map_err(|e| {
            TypeError::new(
                ctx,
                TypeErrorKind::UnboundVariable {
                    index: e.index,
                    depth: e.depth,
                },
            )
        })
    }

    fn sort_of(&self, ctx: &Context, ty: &Term) -> Result<Sort, TypeError> {
        match ty {
            Term::U1 => Ok(Sort::Large),
            Term::U0 => Ok(Sort::In(Universe::U1)),
            Term::Tp => Ok(Sort::In(Universe::U0)),
            Term::Pi(a, b) => {
                let sa = self.sort_of(ctx, a)?;
                let sb = self.sort_of(&bind(ctx, "x", (**a).clone()), b)?;
                Ok(sa.max(sb))
            }
            Term::Tm(a) => {
                self.check_inner(ctx, a, &Term::Tp)?;
                Ok(Sort::In(Universe::Tp))
            }
            _ => {
                let found = self.infer_inner(ctx, ty)?;
                match self.whnf_type(ctx, &found)? {
                    Value::Univ(u) => Ok(Sort::In(u)),
                    _ => Err(TypeError::new(
                        ctx,
                        TypeErrorKind::NotAType {
                            term: ty.clone(),
                            found,
                        },
                    )),
                }
            }
        }
    }

    pub fn infer(&self, ctx: &Context, t: &Term) -> Result<Term, TypeError> {
        self.scope(ctx, t)?;
        self.infer_inner(ctx, t)
    }

    fn infer_inner(&self, ctx: &Context, t: &Term) -> Result<Term, TypeError> {
        match t {
            Term::Var(i) => ctx.lookup(*i).map(|(_, ty)| ty).ok_or_else(|| {
                TypeError::new(
                    ctx,
                    TypeErrorKind::UnboundVariable {
                        index: *i,
                        depth: ctx.len(),
                    },
                )
            }),
            Term::Tp => Ok(Term::U0),
            Term::U0 => Ok(Term::U1),
            Term::U1 => Err(TypeError::new(ctx, TypeErrorKind::NoUniverse { term: t.clone() })),
            Term::Bool => Ok(Term::Tp),
            Term::True | Term::False => Ok(Term::Bool),
            Term::Tm(a) => {
                self.check_inner(ctx, a, &Term::Tp)?;
                Ok(Term::Tp)
            }
            Term::Pi(..) => match self.sort_of(ctx, t)? {
                Sort::In(u) => Ok(u.to_term()),
                Sort::Large => Err(TypeError::new(ctx, TypeErrorKind::NoUniverse { term: t.clone() })),
            },
            Term::Lam(_) => Err(TypeError::new(ctx, TypeErrorKind::CannotInfer { term: t.clone() })),
            Term::App(f, a) => {
                let fty = self.infer_inner(ctx, f)?;
                let (dom, cod) = self.expect_pi(ctx, &fty).map_err(|_| {
                    TypeError::new(
                        ctx,
                        TypeErrorKind::NotAFunction {
                            fun: (**f).clone(),
                            ty: fty.clone(),
                        },
                    )
                })?;
                self.check_inner(ctx, a, &dom)?;
                Ok(subst(&cod, 0, a))
            }
            Term::If {
                motive,
                scrutinee,
                tbranch,
                fbranch,
            } => {
                self.check_inner(ctx, scrutinee, &Term::Bool)?;
                let inner = bind(ctx, "b", Term::Bool);
                self.sort_of(&inner, motive).map_err(|e| {
                    TypeError::new(
                        ctx,
                        TypeErrorKind::MotiveMismatch {
                            motive: (**motive).clone(),
                            reason: e.kind,
                        },
                    )
                })?;
                self.check_inner(ctx, tbranch, &subst(motive, 0, &Term::True))?;
                self.check_inner(ctx, fbranch, &subst(motive, 0, &Term::False))?;
                Ok(subst(motive, 0, scrutinee))
            }
        }
    }

    /// Normal-form domain and codomain of a function type.
    fn expect_pi(&self, ctx: &Context, ty: &Term) -> Result<(Term, Term), TypeError> {
        match self.normalize_type(ctx, ty)? {
            Term::Pi(a, b) => Ok(((*a).clone(), (*b).clone())),
            other => Err(TypeError::new(ctx, TypeErrorKind::NotAFunctionType { expected: other })),
        }
    }

    pub fn check(&self, ctx: &Context, t: &Term, at: &Term) -> Result<TypedTerm, TypeError> {
        self.check_context(ctx)?;
        self.check_type(ctx, at)?;
        self.scope(ctx, t)?;
        self.check_inner(ctx, t, at)?;
        Ok(TypedTerm {
            term: t.clone(),
            ty: at.clone(),
            context: ctx.clone(),
        })
    }

    fn check_inner(&self, ctx: &Context, t: &Term, at: &Term) -> Result<(), TypeError> {
        match t {
            Term::Lam(body) => {
                let (dom, cod) = self.expect_pi(ctx, at)?;
                self.check_inner(&bind(ctx, "x", dom), body, &cod)
            }
            Term::App(f, a) => match self.infer_inner(ctx, f) {
                Err(e) if e.cannot_infer() => {
                    let aty = self.infer_inner(ctx, a)?;
                    // A literal redex takes its codomain from the body.
                    if let Term::Lam(body) = &**f {
                        match self.infer_inner(&bind(ctx, "x", aty.clone()), body) {
                            Ok(cod) => return self.subsume(ctx, t, &subst(&cod, 0, a), at),
                            Err(e) if e.cannot_infer() => {}
                            Err(e) => return Err(e),
                        }
                    }
                    let fty = Term::pi(aty, shift(at, 0, 1));
                    self.check_inner(ctx, f, &fty)
                }
                _ => {
                    let found = self.infer_inner(ctx, t)?;
                    self.subsume(ctx, t, &found, at)
                }
            },
            _ => {
                let found = self.infer_inner(ctx, t)?;
                self.subsume(ctx, t, &found, at)
            }
        }
    }

    fn subsume(&self, ctx: &Context, t: &Term, found: &Term, expected: &Term) -> Result<(), TypeError> {
        let found_normal = self.normalize_type(ctx, found)?;
        let expected_normal = self.normalize_type(ctx, expected)?;
        let same = alpha_eq(&found_normal, &expected_normal);
        if same || subtype(&found_normal, &expected_normal) {
            self.records.borrow_mut().push(ConversionRecord {
                context: ctx.clone(),
                found: found.clone(),
                expected: expected.clone(),
                cumulative: !same,
            });
            Ok(())
        } else {
            Err(TypeError::new(
                ctx,
                TypeErrorKind::TypeMismatch {
                    term: t.clone(),
                    expected: expected.clone(),
                    found: found.clone(),
                    expected_normal,
                    found_normal,
                },
            ))
        }
    }

    /// The normal function type at which the head of `App(f, a)` is checked
    /// when the application is checked against `at`, mirroring the
    /// application rules above.
    pub fn head_type(&self, ctx: &Context, f: &Term, a: &Term, at: &Term) -> Result<Term, TypeError> {
        let fty = match self.infer_inner(ctx, f) {
            Ok(fty) => fty,
            Err(e) if e.cannot_infer() => {
                let aty = self.infer_inner(ctx, a)?;
                let redex_cod = match f {
                    Term::Lam(body) => match self.infer_inner(&bind(ctx, "x", aty.clone()), body) {
                        Ok(cod) => Some(cod),
                        Err(e) if e.cannot_infer() => None,
                        Err(e) => return Err(e),
                    },
                    _ => None,
                };
                Term::pi(aty, redex_cod.unwrap_or_else(|| shift(at, 0, 1)))
            }
            Err(e) => return Err(e),
        };
        let normal = self.normalize_type(ctx, &fty)?;
        match normal {
            Term::Pi(..) => Ok(normal),
            _ => Err(TypeError::new(
                ctx,
                TypeErrorKind::NotAFunction {
                    fun: f.clone(),
                    ty: fty,
                },
            )),
        }
    }

    /// Admission gate for canonicity: `t` is closed and has type `bool`.
    pub fn check_closed_bool(&self, t: &Term) -> Result<TypedTerm, TypeError> {
        if !t.is_closed() {
            return Err(TypeError::new(&Context::empty(), TypeErrorKind::NotClosed));
        }
        self.check(&Context::empty(), t, &Term::Bool)
    }

    /// Decides `t1 ≡ t2 : at`, after checking that both sides have type `at`.
    pub fn convertible(&self, ctx: &Context, at: &Term, t1: &Term, t2: &Term) -> Result<bool, TypeError> {
        self.check(ctx, t1, at)?;
        self.check(ctx, t2, at)?;
        self.nbe
            .conv(&types_of(ctx), at, t1, t2)
            .map_err(|e| self.eval_err(ctx, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Term::*;

    fn ck() -> Checker {
        Checker::default()
    }

    fn bb() -> Term {
        Term::arrow(Bool, Bool)
    }

    fn kind(r: Result<impl fmt::Debug, TypeError>) -> TypeErrorKind {
        *r.unwrap_err().kind
    }

    #[test]
    fn infer_literals() {
        let c = ck();
        let e = Context::empty();
        assert_eq!(c.infer(&e, &True).unwrap(), Bool);
        assert_eq!(c.infer(&e, &Bool).unwrap(), Tp);
        assert_eq!(c.infer(&e, &Tp).unwrap(), U0);
        assert_eq!(c.infer(&e, &U0).unwrap(), U1);
        assert!(matches!(kind(c.infer(&e, &U1)), TypeErrorKind::NoUniverse { .. }));
        assert_eq!(c.infer(&e, &bb()).unwrap(), Tp);
        assert_eq!(c.infer(&e, &Term::arrow(Bool, Tp)).unwrap(), U0);
    }

    #[test]
    fn unannotated_lam_cannot_be_inferred() {
        let t = Term::app(Term::lam(Var(0)), True);
        // The head alone is uninferable; in check mode the argument's type
        // is used instead.
        assert!(matches!(
            kind(ck().infer(&Context::empty(), &Term::lam(Var(0)))),
            TypeErrorKind::CannotInfer { .. }
        ));
        assert!(matches!(
            kind(ck().infer(&Context::empty(), &t)),
            TypeErrorKind::CannotInfer { .. }
        ));
        assert!(ck().check(&Context::empty(), &t, &Bool).is_ok());
    }

    #[test]
    fn large_elimination_infers_the_selected_type() {
        // b : bool ⊢ if (_. tp) b bool (bool → bool) : tp
        let ctx = Context::empty().extended("b", Bool);
        let big = Term::if_(Tp, Var(0), Bool, bb());
        assert_eq!(ck().infer(&ctx, &big).unwrap(), Tp);
        // A term whose type is the large elimination at `true` is a bool.
        let motive = Term::if_(Tp, Var(0), Bool, bb());
        let t = Term::if_(motive.clone(), True, False, Term::lam(Var(0)));
        let ty = ck().infer(&Context::empty(), &t).unwrap();
        assert_eq!(ty, subst(&motive, 0, &True));
        assert!(ck().convertible(&Context::empty(), &Tp, &ty, &Bool).unwrap());
    }

    #[test]
    fn check_examples() {
        let e = Context::empty();
        assert!(ck().check(&e, &Term::lam(Var(0)), &bb()).is_ok());
        assert!(matches!(
            kind(ck().check(&e, &True, &bb())),
            TypeErrorKind::TypeMismatch { .. }
        ));
        // Branch types computed by the first if-β rule.
        let x = Term::if_(Tp, True, Bool, bb());
        let t = Term::if_(Term::if_(Tp, Var(0), Bool, bb()), True, True, Term::lam(Var(0)));
        assert!(ck().check(&e, &t, &x).is_ok());
        assert!(ck().check(&e, &t, &Bool).is_ok());
    }

    #[test]
    fn errors_by_kind() {
        let e = Context::empty();
        assert!(matches!(
            kind(ck().check(&e, &Term::app(True, False), &Bool)),
            TypeErrorKind::NotAFunction { .. }
        ));
        assert!(matches!(
            kind(ck().check(&e, &Var(0), &Bool)),
            TypeErrorKind::UnboundVariable { .. }
        ));
        assert!(matches!(
            kind(ck().infer(&e, &Term::if_(True, True, True, True))),
            TypeErrorKind::MotiveMismatch { .. }
        ));
        assert!(matches!(
            kind(ck().check(&e, &Term::lam(Var(0)), &Bool)),
            TypeErrorKind::NotAFunctionType { .. }
        ));
    }

    #[test]
    fn closed_bool_gate() {
        let c = ck();
        assert!(c.check_closed_bool(&True).is_ok());
        assert_eq!(kind(c.check_closed_bool(&Var(0))), TypeErrorKind::NotClosed);
        let t = Term::app(Term::lam(Var(0)), False);
        let typed = c.check_closed_bool(&t).unwrap();
        assert!(typed.replay(&c).is_ok());
    }

    #[test]
    fn cumulativity() {
        let e = Context::empty();
        assert!(ck().check(&e, &Bool, &U0).is_ok());
        assert!(ck().check(&e, &Tp, &U1).is_ok());
        assert!(ck().check(&e, &U0, &U0).is_err());
        assert!(ck().check(&e, &Term::lam(Bool), &Term::arrow(Bool, U0)).is_ok());
    }

    #[test]
    fn conversions_replay() {
        let c = ck();
        let motive = Term::if_(Tp, Var(0), Bool, bb());
        let t = Term::if_(motive, False, True, Term::lam(Var(0)));
        c.check(&Context::empty(), &t, &bb()).unwrap();
        let records = c.take_records();
        assert!(!records.is_empty());
        for r in &records {
            assert!(r.replay(c.nbe()).unwrap(), "{r:?}");
        }
    }

    #[test]
    fn convertible_rejects_ill_typed_input() {
        let c = ck();
        let e = Context::empty();
        assert!(c.convertible(&e, &Bool, &Term::app(True, True), &True).is_err());
        let ctx = Context::empty().extended("f", bb());
        assert!(c
            .convertible(&ctx, &bb(), &Term::lam(Term::app(Var(1), Var(0))), &Var(0))
            .unwrap());
        assert!(c
            .convertible(&e, &Bool, &Term::app(Term::lam(Var(0)), False), &False)
            .unwrap());
    }

    #[test]
    fn signature_equations_are_well_typed() {
        let c = ck();
        for eq in crate::syntax::EquationTable::signature().iter() {
            c.check_context(&eq.context).unwrap();
            c.check(&eq.context, &eq.lhs, &eq.at).unwrap();
            c.check(&eq.context, &eq.rhs, &eq.at).unwrap();
            assert!(
                c.convertible(&eq.context, &eq.at, &eq.lhs, &eq.rhs).unwrap(),
                "{:?}",
                eq.name
            );
        }
    }
}
