//! Bidirectional checking for the CBPV fragment.

use thiserror::Error;

use super::syntax::{CType, CbpvTerm, CbpvType, Comp, VType, Val};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CbpvError {
    #[error("variable index {index} is unbound in a context of length {depth}")]
    UnboundVariable { index: usize, depth: usize },
    #[error("expected a {expected}, found a {found}")]
    SortMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: String },
    #[error("cannot infer a type; annotate it")]
    CannotInfer,
    #[error("applied computation has type {found}, not a function type")]
    NotAFunction { found: String },
    #[error("forced value has type {found}, not a thunk type")]
    NotAThunk { found: String },
    #[error("bound computation has type {found}, not a returner type")]
    NotAReturner { found: String },
}

impl CbpvError {
    pub fn code(&self) -> &'static str {
        match self {
            CbpvError::UnboundVariable { .. } => "unbound_variable",
            CbpvError::SortMismatch { .. } => "sort_mismatch",
            CbpvError::TypeMismatch { .. } => "type_mismatch",
            CbpvError::CannotInfer => "cannot_infer",
            CbpvError::NotAFunction { .. } => "not_a_function",
            CbpvError::NotAThunk { .. } => "not_a_thunk",
            CbpvError::NotAReturner { .. } => "not_a_returner",
        }
    }
}

fn vshow(a: &VType) -> String {
    crate::surface::calf::print_vtype(a)
}

fn cshow(x: &CType) -> String {
    crate::surface::calf::print_ctype(x)
}

/// Typing context; the last entry is index 0.
pub type CbpvContext = Vec<VType>;

/// A checked closed-or-open judgment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CbpvTyped {
    pub context: CbpvContext,
    pub term: CbpvTerm,
    pub ty: CbpvType,
}

pub fn cbpv_check(ctx: &CbpvContext, t: &CbpvTerm, at: &CbpvType) -> Result<CbpvTyped, CbpvError> {
    match (t, at) {
        (CbpvTerm::Val(v), CbpvType::Val(a)) => check_val(ctx, v, a)?,
        (CbpvTerm::Comp(m), CbpvType::Comp(x)) => check_comp(ctx, m, x)?,
        (CbpvTerm::Val(_), CbpvType::Comp(_)) => {
            return Err(CbpvError::SortMismatch {
                expected: "computation",
                found: "value",
            })
        }
        (CbpvTerm::Comp(_), CbpvType::Val(_)) => {
            return Err(CbpvError::SortMismatch {
                expected: "value",
                found: "computation",
            })
        }
    }
    Ok(CbpvTyped {
        context: ctx.clone(),
        term: t.clone(),
        ty: at.clone(),
    })
}

fn lookup(ctx: &CbpvContext, i: usize) -> Result<VType, CbpvError> {
    ctx.len()
        .checked_sub(i + 1)
        .map(|l| ctx[l].clone())
        .ok_or(CbpvError::UnboundVariable {
            index: i,
            depth: ctx.len(),
        })
}

fn mismatch_v(expected: &VType, found: &VType) -> CbpvError {
    CbpvError::TypeMismatch {
        expected: vshow(expected),
        found: vshow(found),
    }
}

fn mismatch_c(expected: &CType, found: &CType) -> CbpvError {
    CbpvError::TypeMismatch {
        expected: cshow(expected),
        found: cshow(found),
    }
}

pub fn infer_val(ctx: &CbpvContext, v: &Val) -> Result<VType, CbpvError> {
    match v {
        Val::Var(i) => lookup(ctx, *i),
        Val::True | Val::False => Ok(VType::Bool),
        Val::Thunk(m) => Ok(VType::u(infer_comp(ctx, m)?)),
    }
}

pub fn check_val(ctx: &CbpvContext, v: &Val, a: &VType) -> Result<(), CbpvError> {
    match (v, a) {
        (Val::Thunk(m), VType::U(x)) => check_comp(ctx, m, x),
        (Val::Thunk(_), VType::Bool) => Err(CbpvError::TypeMismatch {
            expected: vshow(a),
            found: "a thunk".into(),
        }),
        _ => {
            let found = infer_val(ctx, v)?;
            if &found == a {
                Ok(())
            } else {
                Err(mismatch_v(a, &found))
            }
        }
    }
}

pub fn infer_comp(ctx: &CbpvContext, m: &Comp) -> Result<CType, CbpvError> {
    match m {
        Comp::Ret(v) => Ok(CType::f(infer_val(ctx, v)?)),
        Comp::Bind(m, n) => {
            let a = returner(ctx, m)?;
            let mut inner = ctx.clone();
            inner.push(a);
            infer_comp(&inner, n)
        }
        Comp::Step(m) => infer_comp(ctx, m),
        Comp::Force(v) => match infer_val(ctx, v)? {
            VType::U(x) => Ok((*x).clone()),
            other => Err(CbpvError::NotAThunk { found: vshow(&other) }),
        },
        Comp::Lam(_) => Err(CbpvError::CannotInfer),
        Comp::App(f, v) => match infer_comp(ctx, f)? {
            CType::Arrow(a, x) => {
                check_val(ctx, v, &a)?;
                Ok((*x).clone())
            }
            other => Err(CbpvError::NotAFunction { found: cshow(&other) }),
        },
        Comp::If(v, m, n) => {
            check_val(ctx, v, &VType::Bool)?;
            let x = infer_comp(ctx, m)?;
            check_comp(ctx, n, &x)?;
            Ok(x)
        }
    }
}

fn returner(ctx: &CbpvContext, m: &Comp) -> Result<VType, CbpvError> {
    match infer_comp(ctx, m)? {
        CType::F(a) => Ok((*a).clone()),
        other => Err(CbpvError::NotAReturner { found: cshow(&other) }),
    }
}

pub fn check_comp(ctx: &CbpvContext, m: &Comp, x: &CType) -> Result<(), CbpvError> {
    match m {
        Comp::Ret(v) => match x {
            CType::F(a) => check_val(ctx, v, a),
            _ => Err(CbpvError::TypeMismatch {
                expected: cshow(x),
                found: "a returned value".into(),
            }),
        },
        Comp::Lam(body) => match x {
            CType::Arrow(a, y) => {
                let mut inner = ctx.clone();
                inner.push((**a).clone());
                check_comp(&inner, body, y)
            }
            _ => Err(CbpvError::TypeMismatch {
                expected: cshow(x),
                found: "a function".into(),
            }),
        },
        Comp::Bind(m, n) => {
            let a = returner(ctx, m)?;
            let mut inner = ctx.clone();
            inner.push(a);
            check_comp(&inner, n, x)
        }
        Comp::Step(m) => check_comp(ctx, m, x),
        Comp::If(v, m, n) => {
            check_val(ctx, v, &VType::Bool)?;
            check_comp(ctx, m, x)?;
            check_comp(ctx, n, x)
        }
        Comp::App(f, v) => match infer_comp(ctx, f) {
            Err(CbpvError::CannotInfer) => {
                let a = infer_val(ctx, v)?;
                check_comp(ctx, f, &CType::arrow(a, x.clone()))
            }
            Err(e) => Err(e),
            Ok(CType::Arrow(a, y)) => {
                check_val(ctx, v, &a)?;
                if *y == *x {
                    Ok(())
                } else {
                    Err(mismatch_c(x, &y))
                }
            }
            Ok(other) => Err(CbpvError::NotAFunction { found: cshow(&other) }),
        },
        Comp::Force(_) => {
            let found = infer_comp(ctx, m)?;
            if &found == x {
                Ok(())
            } else {
                Err(mismatch_c(x, &found))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(m: Comp) -> CbpvTerm {
        CbpvTerm::Comp(m)
    }

    fn fbool() -> CbpvType {
        CbpvType::Comp(CType::f_bool())
    }

    #[test]
    fn check_examples() {
        let e = CbpvContext::new();
        assert!(cbpv_check(&e, &comp(Comp::ret(Val::True)), &fbool()).is_ok());
        assert_eq!(
            cbpv_check(&e, &CbpvTerm::Val(Val::True), &fbool()).unwrap_err(),
            CbpvError::SortMismatch {
                expected: "computation",
                found: "value"
            }
        );
        let m = Comp::bind(Comp::step(Comp::ret(Val::True)), Comp::ret(Val::Var(0)));
        let typed = cbpv_check(&e, &comp(m), &fbool()).unwrap();
        assert!(cbpv_check(&typed.context, &typed.term, &typed.ty).is_ok());
    }

    #[test]
    fn application_in_check_mode_uses_the_argument() {
        let e = CbpvContext::new();
        let m = Comp::app(Comp::lam(Comp::ret(Val::Var(0))), Val::False);
        assert!(cbpv_check(&e, &comp(m.clone()), &fbool()).is_ok());
        assert_eq!(infer_comp(&e, &m), Err(CbpvError::CannotInfer));
    }

    #[test]
    fn errors() {
        let e = CbpvContext::new();
        assert!(matches!(
            check_comp(&e, &Comp::force(Val::True), &CType::f_bool()),
            Err(CbpvError::NotAThunk { .. })
        ));
        assert!(matches!(
            check_comp(&e, &Comp::ret(Val::Var(0)), &CType::f_bool()),
            Err(CbpvError::UnboundVariable { .. })
        ));
        let fun = vec![VType::u(CType::arrow(VType::Bool, CType::f_bool()))];
        assert!(matches!(
            check_comp(
                &fun,
                &Comp::bind(Comp::force(Val::Var(0)), Comp::ret(Val::True)),
                &CType::f_bool()
            ),
            Err(CbpvError::NotAReturner { .. })
        ));
        assert!(matches!(
            check_comp(&e, &Comp::ret(Val::thunk(Comp::ret(Val::True))), &CType::f_bool()),
            Err(CbpvError::TypeMismatch { .. })
        ));
    }
}
