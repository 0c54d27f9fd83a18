//! Judgmental equality by normalization by evaluation.
//!
//! Evaluation is untyped; readback is typed and η-expands at `Pi` types, so
//! two terms are convertible exactly when their η-long β-normal forms are
//! α-equal.

use std::cell::{Cell, RefCell};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{alpha_eq, Term};

pub const DEFAULT_FUEL: u64 = 1_000_000;
pub const DEFAULT_MAX_DEPTH: usize = 4_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Universe {
    Tp,
    U0,
    U1,
}

impl Universe {
    pub fn to_term(self) -> Term {
        match self {
            Universe::Tp => Term::Tp,
            Universe::U0 => Term::U0,
            Universe::U1 => Term::U1,
        }
    }

    /// The universe this one inhabits, if any.
    pub fn successor(self) -> Option<Universe> {
        match self {
            Universe::Tp => Some(Universe::U0),
            Universe::U0 => Some(Universe::U1),
            Universe::U1 => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Value {
    True,
    False,
    Bool,
    Univ(Universe),
    Pi(Arc<Value>, Closure),
    Lam(Closure),
    Neutral(Arc<Neutral>),
}

#[derive(Clone, Debug)]
pub enum Neutral {
    /// De Bruijn level.
    Var(usize),
    App(Arc<Neutral>, Value),
    If {
        motive: Closure,
        scrutinee: Arc<Neutral>,
        tbranch: Value,
        fbranch: Value,
    },
}

impl Value {
    pub fn var(level: usize) -> Value {
        Value::Neutral(Arc::new(Neutral::Var(level)))
    }

    pub fn as_universe(&self) -> Option<Universe> {
        match self {
            Value::Univ(u) => Some(*u),
            _ => None,
        }
    }

    fn describe(&self) -> &'static str {
        match self {
            Value::True | Value::False => "a boolean",
            Value::Bool => "bool",
            Value::Univ(_) => "a universe",
            Value::Pi(..) => "a function type",
            Value::Lam(_) => "a function",
            Value::Neutral(_) => "a neutral term",
        }
    }
}

/// Persistent environment; index 0 is the most recent entry.
#[derive(Clone, Default)]
pub struct Env {
    head: Option<Arc<EnvCell>>,
    len: usize,
}

struct EnvCell {
    value: Value,
    next: Option<Arc<EnvCell>>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn pushed(&self, value: Value) -> Env {
        Env {
            head: Some(Arc::new(EnvCell {
                value,
                next: self.head.clone(),
            })),
            len: self.len + 1,
        }
    }

    pub fn get(&self, index: usize) -> Option<&Value> {
        let mut cell = self.head.as_deref();
        for _ in 0..index {
            cell = cell?.next.as_deref();
        }
        cell.map(|c| &c.value)
    }

    /// Environment of fresh variables for levels `0..n`.
    pub fn identity(n: usize) -> Env {
        (0..n).fold(Env::new(), |env, l| env.pushed(Value::var(l)))
    }
}

impl FromIterator<Value> for Env {
    /// Builds from values in push order (the last becomes index 0).
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Self {
        iter.into_iter().fold(Env::new(), |env, v| env.pushed(v))
    }
}

impl fmt::Debug for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        let mut cell = self.head.as_deref();
        while let Some(c) = cell {
            list.entry(&c.value);
            cell = c.next.as_deref();
        }
        list.finish()
    }
}

#[derive(Clone, Debug)]
pub struct Closure {
    pub env: Env,
    pub body: Arc<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvalError {
    #[error("evaluation fuel exhausted after {steps} steps")]
    FuelExhausted { steps: u64 },
    #[error("recursion depth limit of {limit} exceeded")]
    TooDeep { limit: usize },
    #[error("stuck term: cannot {action} {found}")]
    Stuck { action: &'static str, found: &'static str },
    #[error("variable index {index} escapes an environment of length {len}")]
    Unbound { index: usize, len: usize },
    #[error("cannot read back {found} at {at}")]
    IllTyped { found: &'static str, at: &'static str },
}

/// One reduction step, as recorded by `--trace`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    IfBeta1,
    IfBeta2,
    PiBeta,
}

/// Evaluation machine: shares a fuel budget and a recursion guard across
/// every evaluation and readback it performs.
pub struct Nbe {
    fuel: u64,
    used: Cell<u64>,
    depth: Cell<usize>,
    max_depth: usize,
    trace: Option<RefCell<Vec<Reduction>>>,
}

impl Default for Nbe {
    fn default() -> Self {
        Nbe::new(DEFAULT_FUEL)
    }
}

struct DepthGuard<'a>(&'a Cell<usize>);

impl Drop for DepthGuard<'_> {
    fn drop(&mut self) {
        self.0.set(self.0.get() - 1);
    }
}

impl Nbe {
    pub fn new(fuel: u64) -> Self {
        Nbe {
            fuel,
            used: Cell::new(0),
            depth: Cell::new(0),
            max_depth: DEFAULT_MAX_DEPTH,
            trace: None,
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(RefCell::new(Vec::new()));
        self
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    /// Steps consumed so far.
    pub fn steps(&self) -> u64 {
        self.used.get()
    }

    pub fn fuel(&self) -> u64 {
        self.fuel
    }

    pub fn take_trace(&self) -> Vec<Reduction> {
        self.trace
            .as_ref()
            .map(|t| std::mem::take(&mut *t.borrow_mut()))
            .unwrap_or_default()
    }

    fn tick(&self) -> Result<(), EvalError> {
        let used = self.used.get() + 1;
        self.used.set(used);
        if used > self.fuel {
            Err(EvalError::FuelExhausted { steps: self.fuel })
        } else {
            Ok(())
        }
    }

    fn enter(&self) -> Result<DepthGuard<'_>, EvalError> {
        let d = self.depth.get() + 1;
        if d > self.max_depth {
            return Err(EvalError::TooDeep { limit: self.max_depth });
        }
        self.depth.set(d);
        Ok(DepthGuard(&self.depth))
    }

    fn record(&self, r: Reduction) {
        if let Some(t) = &self.trace {
            t.borrow_mut().push(r);
        }
    }

    pub fn eval(&self, env: &Env, t: &Term) -> Result<Value, EvalError> {
        let _g = self.enter()?;
        self.tick()?;
        Ok(match t {
            Term::Var(i) => env.get(*i).cloned().ok_or(EvalError::Unbound {
                index: *i,
                len: env.len(),
            })?,
            Term::Tp => Value::Univ(Universe::Tp),
            Term::U0 => Value::Univ(Universe::U0),
            Term::U1 => Value::Univ(Universe::U1),
            Term::Tm(a) => self.eval(env, a)?,
            Term::Bool => Value::Bool,
            Term::True => Value::True,
            Term::False => Value::False,
            Term::Pi(a, b) => Value::Pi(
                Arc::new(self.eval(env, a)?),
                Closure {
                    env: env.clone(),
                    body: b.clone(),
                },
            ),
            Term::Lam(b) => Value::Lam(Closure {
                env: env.clone(),
                body: b.clone(),
            }),
            Term::App(f, a) => {
                let f = self.eval(env, f)?;
                let a = self.eval(env, a)?;
                self.apply(f, a)?
            }
            Term::If {
                motive,
                scrutinee,
                tbranch,
                fbranch,
            } => match self.eval(env, scrutinee)? {
                Value::True => {
                    self.record(Reduction::IfBeta1);
                    self.eval(env, tbranch)?
                }
                Value::False => {
                    self.record(Reduction::IfBeta2);
                    self.eval(env, fbranch)?
                }
                Value::Neutral(n) => Value::Neutral(Arc::new(Neutral::If {
                    motive: Closure {
                        env: env.clone(),
                        body: motive.clone(),
                    },
                    scrutinee: n,
                    tbranch: self.eval(env, tbranch)?,
                    fbranch: self.eval(env, fbranch)?,
                })),
                other => {
                    return Err(EvalError::Stuck {
                        action: "case on",
                        found: other.describe(),
                    })
                }
            },
        })
    }

    pub fn apply(&self, f: Value, arg: Value) -> Result<Value, EvalError> {
        match f {
            Value::Lam(c) => {
                self.record(Reduction::PiBeta);
                self.instantiate(&c, arg)
            }
            Value::Neutral(n) => Ok(Value::Neutral(Arc::new(Neutral::App(n, arg)))),
            other => Err(EvalError::Stuck {
                action: "apply",
                found: other.describe(),
            }),
        }
    }

    pub fn instantiate(&self, c: &Closure, arg: Value) -> Result<Value, EvalError> {
        self.eval(&c.env.pushed(arg), &c.body)
    }

    /// Reads `v` back at type `at`. `types[l]` is the type of level `l`.
    pub fn readback(&self, types: &[Value], v: &Value, at: &Value) -> Result<Term, EvalError> {
        let _g = self.enter()?;
        self.tick()?;
        match at {
            Value::Pi(dom, cod) => {
                let x = Value::var(types.len());
                let body = self.apply(v.clone(), x.clone())?;
                let cod = self.instantiate(cod, x)?;
                let mut inner = types.to_vec();
                inner.push((**dom).clone());
                Ok(Term::lam(self.readback(&inner, &body, &cod)?))
            }
            Value::Bool => match v {
                Value::True => Ok(Term::True),
                Value::False => Ok(Term::False),
                Value::Neutral(n) => Ok(self.readback_neutral(types, n)?.0),
                other => Err(EvalError::IllTyped {
                    found: other.describe(),
                    at: "bool",
                }),
            },
            Value::Univ(_) => self.readback_type(types, v),
            Value::Neutral(_) => match v {
                Value::Neutral(n) => Ok(self.readback_neutral(types, n)?.0),
                other => Err(EvalError::IllTyped {
                    found: other.describe(),
                    at: "a neutral type",
                }),
            },
            other => Err(EvalError::IllTyped {
                found: v.describe(),
                at: other.describe(),
            }),
        }
    }

    /// Reads back a value that is itself a type.
    pub fn readback_type(&self, types: &[Value], v: &Value) -> Result<Term, EvalError> {
        let _g = self.enter()?;
        self.tick()?;
        match v {
            Value::Bool => Ok(Term::Bool),
            Value::Univ(u) => Ok(u.to_term()),
            Value::Pi(dom, cod) => {
                let a = self.readback_type(types, dom)?;
                let x = Value::var(types.len());
                let cod = self.instantiate(cod, x)?;
                let mut inner = types.to_vec();
                inner.push((**dom).clone());
                Ok(Term::pi(a, self.readback_type(&inner, &cod)?))
            }
            Value::Neutral(n) => Ok(self.readback_neutral(types, n)?.0),
            other => Err(EvalError::IllTyped {
                found: other.describe(),
                at: "a universe",
            }),
        }
    }

    /// Reads back a neutral, returning it with its type.
    pub fn readback_neutral(&self, types: &[Value], n: &Neutral) -> Result<(Term, Value), EvalError> {
        let _g = self.enter()?;
        self.tick()?;
        match n {
            Neutral::Var(level) => {
                let ty = types.get(*level).cloned().ok_or(EvalError::Unbound {
                    index: *level,
                    len: types.len(),
                })?;
                Ok((Term::Var(types.len() - 1 - level), ty))
            }
            Neutral::App(f, a) => {
                let (tf, fty) = self.readback_neutral(types, f)?;
                match fty {
                    Value::Pi(dom, cod) => {
                        let ta = self.readback(types, a, &dom)?;
                        let ty = self.instantiate(&cod, a.clone())?;
                        Ok((Term::app(tf, ta), ty))
                    }
                    other => Err(EvalError::IllTyped {
                        found: "an application",
                        at: other.describe(),
                    }),
                }
            }
            Neutral::If {
                motive,
                scrutinee,
                tbranch,
                fbranch,
            } => {
                let (ts, _) = self.readback_neutral(types, scrutinee)?;
                let x = Value::var(types.len());
                let mut inner = types.to_vec();
                inner.push(Value::Bool);
                let tm = self.readback_type(&inner, &self.instantiate(motive, x)?)?;
                let tt = self.readback(types, tbranch, &self.instantiate(motive, Value::True)?)?;
                let tf = self.readback(types, fbranch, &self.instantiate(motive, Value::False)?)?;
                let ty = self.instantiate(motive, Value::Neutral(scrutinee.clone()))?;
                Ok((Term::if_(tm, ts, tt, tf), ty))
            }
        }
    }

    /// Evaluates the types of a telescope, each over the variables before it.
    pub fn eval_telescope<'t>(&self, types: impl IntoIterator<Item = &'t Term>) -> Result<Vec<Value>, EvalError> {
        let mut out = Vec::new();
        for ty in types {
            let env = Env::identity(out.len());
            out.push(self.eval(&env, ty)?);
        }
        Ok(out)
    }

    /// η-long β-normal form of `t : at` over a telescope of types.
    pub fn normalize(&self, ctx_types: &[Term], t: &Term, at: &Term) -> Result<Term, EvalError> {
        let types = self.eval_telescope(ctx_types)?;
        let env = Env::identity(types.len());
        let at = self.eval(&env, at)?;
        let v = self.eval(&env, t)?;
        self.readback(&types, &v, &at)
    }

    /// Convertibility without re-checking that the inputs are well typed.
    pub fn conv(&self, ctx_types: &[Term], at: &Term, t1: &Term, t2: &Term) -> Result<bool, EvalError> {
        if alpha_eq(t1, t2) {
            return Ok(true);
        }
        let types = self.eval_telescope(ctx_types)?;
        let env = Env::identity(types.len());
        let at = self.eval(&env, at)?;
        let n1 = self.readback(&types, &self.eval(&env, t1)?, &at)?;
        let n2 = self.readback(&types, &self.eval(&env, t2)?, &at)?;
        Ok(alpha_eq(&n1, &n2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Term::*;

    fn nbe() -> Nbe {
        Nbe::default()
    }

    fn id() -> Term {
        Term::lam(Var(0))
    }

    #[test]
    fn identity_beta() {
        let v = nbe().eval(&Env::new(), &Term::app(id(), True)).unwrap();
        assert!(matches!(v, Value::True));
    }

    #[test]
    fn if_beta_selects_branch() {
        let t = Term::if_(Bool, True, False, True);
        assert!(matches!(nbe().eval(&Env::new(), &t).unwrap(), Value::False));
        let t = Term::if_(Bool, False, False, True);
        assert!(matches!(nbe().eval(&Env::new(), &t).unwrap(), Value::True));
    }

    #[test]
    fn neutral_scrutinee_blocks() {
        let env = Env::identity(1);
        let t = Term::if_(Bool, Var(0), True, False);
        match nbe().eval(&env, &t).unwrap() {
            Value::Neutral(n) => match &*n {
                Neutral::If {
                    scrutinee,
                    tbranch,
                    fbranch,
                    ..
                } => {
                    assert!(matches!(**scrutinee, Neutral::Var(0)));
                    assert!(matches!(tbranch, Value::True));
                    assert!(matches!(fbranch, Value::False));
                }
                other => panic!("expected a blocked if, got {other:?}"),
            },
            other => panic!("expected a neutral, got {other:?}"),
        }
    }

    #[test]
    fn stuck_application_is_reported() {
        let err = nbe().eval(&Env::new(), &Term::app(True, False)).unwrap_err();
        assert!(matches!(err, EvalError::Stuck { action: "apply", .. }));
    }

    #[test]
    fn readback_examples() {
        let n = nbe();
        assert_eq!(n.readback(&[], &Value::True, &Value::Bool).unwrap(), True);

        // A variable of function type is η-expanded.
        let bb = n.eval(&Env::new(), &Term::arrow(Bool, Bool)).unwrap();
        let got = n.readback(std::slice::from_ref(&bb), &Value::var(0), &bb).unwrap();
        assert_eq!(got, Term::lam(Term::app(Var(1), Var(0))));
        assert!(n
            .conv(&[Term::arrow(Bool, Bool)], &Term::arrow(Bool, Bool), &got, &Var(0))
            .unwrap());

        let idv = n.eval(&Env::new(), &id()).unwrap();
        assert_eq!(n.readback(&[], &idv, &bb).unwrap(), id());
    }

    #[test]
    fn conversion_examples() {
        let n = nbe();
        assert!(n.conv(&[], &Bool, &True, &True).unwrap());
        assert!(!n.conv(&[], &Bool, &True, &False).unwrap());
        let f_ty = Term::arrow(Bool, Bool);
        let eta = Term::lam(Term::app(Var(1), Var(0)));
        assert!(n.conv(std::slice::from_ref(&f_ty), &f_ty, &eta, &Var(0)).unwrap());
        assert!(n.conv(&[], &Bool, &Term::app(id(), False), &False).unwrap());
    }

    #[test]
    fn fuel_exhaustion_is_an_error() {
        // (λf. f (f (f true))) applied to an identity, with a tiny budget.
        let t = Term::app(
            Term::lam(Term::app(Var(0), Term::app(Var(0), Term::app(Var(0), True)))),
            id(),
        );
        let n = Nbe::new(5);
        assert!(matches!(n.eval(&Env::new(), &t), Err(EvalError::FuelExhausted { .. })));
    }

    #[test]
    fn depth_guard_trips() {
        let mut t = True;
        for _ in 0..200 {
            t = Term::app(id(), t);
        }
        let n = Nbe::default().with_max_depth(50);
        assert!(matches!(n.eval(&Env::new(), &t), Err(EvalError::TooDeep { .. })));
        assert!(Nbe::default().eval(&Env::new(), &t).is_ok());
    }

    #[test]
    fn trace_records_reductions() {
        let n = Nbe::default().with_trace();
        let t = Term::if_(Bool, Term::app(id(), True), False, True);
        n.eval(&Env::new(), &t).unwrap();
        assert_eq!(n.take_trace(), vec![Reduction::PiBeta, Reduction::IfBeta1]);
    }
}
