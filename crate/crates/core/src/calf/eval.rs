//! Operational semantics.
//!
//! [`cbpv_eval`] is a small-step stack machine over closed syntax that
//! counts `Step`s. [`normalize`] is an independent big-step evaluator with
//! environments, used to replay equality witnesses.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::syntax::{subst_comp, Comp, Val};

pub const DEFAULT_CBPV_FUEL: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CbpvEvalError {
    #[error("evaluation fuel exhausted after {steps} transitions")]
    FuelExhausted { steps: u64 },
    #[error("recursion depth limit of {limit} exceeded")]
    TooDeep { limit: usize },
    #[error("stuck computation: {reason}")]
    Stuck { reason: &'static str },
    #[error("computation is not closed")]
    NotClosed,
}

/// Result of running a closed computation to a terminal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluated {
    pub cost: u64,
    pub terminal: Comp,
    /// Machine transitions taken.
    pub transitions: u64,
}

enum Frame {
    /// Continuation of a `Bind`.
    Then(Arc<Comp>),
    /// Pending argument.
    Arg(Arc<Val>),
}

pub fn cbpv_eval(m: &Comp, fuel: u64) -> Result<Evaluated, CbpvEvalError> {
    if !m.is_closed() {
        return Err(CbpvEvalError::NotClosed);
    }
    let mut stack: Vec<Frame> = Vec::new();
    let mut cur = m.clone();
    let mut cost = 0;
    let mut transitions = 0;
    loop {
        transitions += 1;
        if transitions > fuel {
            return Err(CbpvEvalError::FuelExhausted { steps: fuel });
        }
        cur = match cur {
            Comp::Step(m) => {
                cost += 1;
                (*m).clone()
            }
            Comp::Bind(m, n) => {
                stack.push(Frame::Then(n));
                (*m).clone()
            }
            Comp::App(m, v) => {
                stack.push(Frame::Arg(v));
                (*m).clone()
            }
            Comp::Force(v) => match &*v {
                Val::Thunk(m) => (**m).clone(),
                _ => {
                    return Err(CbpvEvalError::Stuck {
                        reason: "force of a non-thunk",
                    })
                }
            },
            Comp::If(v, m, n) => match v.as_bool() {
                Some(true) => (*m).clone(),
                Some(false) => (*n).clone(),
                None => {
                    return Err(CbpvEvalError::Stuck {
                        reason: "if on a non-boolean",
                    })
                }
            },
            Comp::Ret(v) => match stack.pop() {
                None => {
                    return Ok(Evaluated {
                        cost,
                        terminal: Comp::Ret(v),
                        transitions,
                    })
                }
                Some(Frame::Then(n)) => subst_comp(&n, &v),
                Some(Frame::Arg(_)) => {
                    return Err(CbpvEvalError::Stuck {
                        reason: "application of a returner",
                    })
                }
            },
            Comp::Lam(body) => match stack.pop() {
                None => {
                    return Ok(Evaluated {
                        cost,
                        terminal: Comp::Lam(body),
                        transitions,
                    })
                }
                Some(Frame::Arg(v)) => subst_comp(&body, &v),
                Some(Frame::Then(_)) => {
                    return Err(CbpvEvalError::Stuck {
                        reason: "bind on a function",
                    })
                }
            },
        };
    }
}

#[derive(Clone, Debug)]
enum NVal {
    Bool(bool),
    Thunk(Env, Arc<Comp>),
}

#[derive(Clone, Debug, Default)]
struct Env(Option<Arc<(NVal, Env)>>);

impl Env {
    fn push(&self, v: NVal) -> Env {
        Env(Some(Arc::new((v, self.clone()))))
    }

    fn get(&self, i: usize) -> Option<&NVal> {
        let mut cur = self.0.as_deref()?;
        for _ in 0..i {
            cur = cur.1 .0.as_deref()?;
        }
        Some(&cur.0)
    }

    fn to_vec(&self) -> Vec<NVal> {
        let mut out = Vec::new();
        let mut cur = self.0.as_deref();
        while let Some((v, next)) = cur {
            out.push(v.clone());
            cur = next.0.as_deref();
        }
        out.reverse();
        out
    }
}

enum Outcome {
    Ret(NVal),
    Lam(Env, Arc<Comp>),
}

struct Normalizer {
    fuel: u64,
    used: u64,
    cost: u64,
    depth: usize,
}

const MAX_DEPTH: usize = 4_000;

impl Normalizer {
    fn tick(&mut self) -> Result<(), CbpvEvalError> {
        self.used += 1;
        if self.used > self.fuel {
            Err(CbpvEvalError::FuelExhausted { steps: self.fuel })
        } else {
            Ok(())
        }
    }

    fn val(&self, env: &Env, v: &Val) -> Result<NVal, CbpvEvalError> {
        match v {
            Val::Var(i) => env.get(*i).cloned().ok_or(CbpvEvalError::NotClosed),
            Val::True => Ok(NVal::Bool(true)),
            Val::False => Ok(NVal::Bool(false)),
            Val::Thunk(m) => Ok(NVal::Thunk(env.clone(), m.clone())),
        }
    }

    fn comp(&mut self, env: &Env, m: &Comp) -> Result<Outcome, CbpvEvalError> {
        self.tick()?;
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(CbpvEvalError::TooDeep { limit: MAX_DEPTH });
        }
        let r = self.comp_inner(env, m);
        self.depth -= 1;
        r
    }

    fn comp_inner(&mut self, env: &Env, m: &Comp) -> Result<Outcome, CbpvEvalError> {
        match m {
            Comp::Ret(v) => Ok(Outcome::Ret(self.val(env, v)?)),
            Comp::Step(m) => {
                self.cost += 1;
                self.comp(env, m)
            }
            Comp::Lam(b) => Ok(Outcome::Lam(env.clone(), b.clone())),
            Comp::Bind(m, n) => match self.comp(env, m)? {
                Outcome::Ret(v) => self.comp(&env.push(v), n),
                Outcome::Lam(..) => Err(CbpvEvalError::Stuck {
                    reason: "bind on a function",
                }),
            },
            Comp::App(m, v) => {
                let arg = self.val(env, v)?;
                match self.comp(env, m)? {
                    Outcome::Lam(cenv, b) => self.comp(&cenv.push(arg), &b),
                    Outcome::Ret(_) => Err(CbpvEvalError::Stuck {
                        reason: "application of a returner",
                    }),
                }
            }
            Comp::Force(v) => match self.val(env, v)? {
                NVal::Thunk(cenv, m) => self.comp(&cenv, &m),
                NVal::Bool(_) => Err(CbpvEvalError::Stuck {
                    reason: "force of a non-thunk",
                }),
            },
            Comp::If(v, m, n) => match self.val(env, v)? {
                NVal::Bool(true) => self.comp(env, m),
                NVal::Bool(false) => self.comp(env, n),
                NVal::Thunk(..) => Err(CbpvEvalError::Stuck {
                    reason: "if on a non-boolean",
                }),
            },
        }
    }
}

fn quote_val(v: &NVal) -> Val {
    match v {
        NVal::Bool(b) => Val::bool_lit(*b),
        NVal::Thunk(env, m) => Val::thunk(close(env, m, 0)),
    }
}

/// Closes `m` (under `depth` local binders) over an environment.
fn close(env: &Env, m: &Comp, depth: usize) -> Comp {
    let vals: Vec<Val> = env.to_vec().iter().map(quote_val).collect();
    super::syntax::instantiate_comp(m, &vals, depth)
}

/// Big-step normal form of a closed computation: its cost and its terminal
/// form with all environments substituted away.
pub fn normalize(m: &Comp, fuel: u64) -> Result<(u64, Comp), CbpvEvalError> {
    if !m.is_closed() {
        return Err(CbpvEvalError::NotClosed);
    }
    let mut n = Normalizer {
        fuel,
        used: 0,
        cost: 0,
        depth: 0,
    };
    let out = n.comp(&Env::default(), m)?;
    let terminal = match out {
        Outcome::Ret(v) => Comp::ret(quote_val(&v)),
        Outcome::Lam(env, b) => Comp::lam(close(&env, &b, 1)),
    };
    Ok((n.cost, terminal))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(m: &Comp) -> (u64, Comp) {
        let e = cbpv_eval(m, DEFAULT_CBPV_FUEL).unwrap();
        (e.cost, e.terminal)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(run(&Comp::ret(Val::True)), (0, Comp::ret(Val::True)));
        assert_eq!(run(&Comp::steps(2, Comp::ret(Val::False))), (2, Comp::ret(Val::False)));
        // bind (step (ret true)) (x. step (ret x)): Step, Bind, Ret, Step, Ret.
        let m = Comp::bind(Comp::step(Comp::ret(Val::True)), Comp::step(Comp::ret(Val::Var(0))));
        let e = cbpv_eval(&m, DEFAULT_CBPV_FUEL).unwrap();
        assert_eq!((e.cost, e.terminal), (2, Comp::ret(Val::True)));
        assert_eq!(e.transitions, 5);
    }

    #[test]
    fn normalizer_agrees_on_examples() {
        let f = Val::thunk(Comp::lam(Comp::step(Comp::if_(
            Val::Var(0),
            Comp::ret(Val::False),
            Comp::ret(Val::True),
        ))));
        let m = Comp::bind(Comp::step(Comp::ret(Val::True)), Comp::app(Comp::force(f), Val::Var(0)));
        assert_eq!(run(&m), (2, Comp::ret(Val::False)));
        assert_eq!(normalize(&m, DEFAULT_CBPV_FUEL).unwrap(), (2, Comp::ret(Val::False)));
    }

    #[test]
    fn closures_are_quoted() {
        let m = Comp::bind(Comp::ret(Val::True), Comp::ret(Val::thunk(Comp::ret(Val::Var(0)))));
        assert_eq!(
            normalize(&m, DEFAULT_CBPV_FUEL).unwrap(),
            (0, Comp::ret(Val::thunk(Comp::ret(Val::True))))
        );
        assert_eq!(run(&m).1, Comp::ret(Val::thunk(Comp::ret(Val::True))));
    }

    #[test]
    fn failures_are_reported() {
        assert_eq!(cbpv_eval(&Comp::ret(Val::Var(0)), 10), Err(CbpvEvalError::NotClosed));
        assert!(matches!(
            cbpv_eval(&Comp::force(Val::True), 10),
            Err(CbpvEvalError::Stuck { .. })
        ));
        assert!(matches!(
            cbpv_eval(&Comp::steps(20, Comp::ret(Val::True)), 5),
            Err(CbpvEvalError::FuelExhausted { .. })
        ));
    }
}
