//! Call-by-push-value syntax with booleans and a cost effect.
//!
//! All variables are value variables, bound by `Lam` and by the
//! continuation of `Bind`.

use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum VType {
    Bool,
    U(Arc<CType>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum CType {
    F(Arc<VType>),
    Arrow(Arc<VType>, Arc<CType>),
}

impl VType {
    pub fn u(c: CType) -> VType {
        VType::U(Arc::new(c))
    }
}

impl CType {
    pub fn f(a: VType) -> CType {
        CType::F(Arc::new(a))
    }

    pub fn f_bool() -> CType {
        CType::f(VType::Bool)
    }

    pub fn arrow(a: VType, x: CType) -> CType {
        CType::Arrow(Arc::new(a), Arc::new(x))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Val {
    Var(usize),
    True,
    False,
    Thunk(Arc<Comp>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Comp {
    Ret(Arc<Val>),
    /// `Bind(m, n)`: `n` binds the value returned by `m`.
    Bind(Arc<Comp>, Arc<Comp>),
    Step(Arc<Comp>),
    Force(Arc<Val>),
    Lam(Arc<Comp>),
    App(Arc<Comp>, Arc<Val>),
    If(Arc<Val>, Arc<Comp>, Arc<Comp>),
}

/// A term of either sort.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CbpvTerm {
    Val(Val),
    Comp(Comp),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CbpvType {
    Val(VType),
    Comp(CType),
}

impl Val {
    pub fn bool_lit(b: bool) -> Val {
        if b {
            Val::True
        } else {
            Val::False
        }
    }

    pub fn thunk(m: Comp) -> Val {
        Val::Thunk(Arc::new(m))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Val::True => Some(true),
            Val::False => Some(false),
            _ => None,
        }
    }
}

impl Comp {
    pub fn ret(v: Val) -> Comp {
        Comp::Ret(Arc::new(v))
    }

    pub fn bind(m: Comp, n: Comp) -> Comp {
        Comp::Bind(Arc::new(m), Arc::new(n))
    }

    pub fn step(m: Comp) -> Comp {
        Comp::Step(Arc::new(m))
    }

    pub fn steps(n: u64, m: Comp) -> Comp {
        (0..n).fold(m, |m, _| Comp::step(m))
    }

    pub fn force(v: Val) -> Comp {
        Comp::Force(Arc::new(v))
    }

    pub fn lam(m: Comp) -> Comp {
        Comp::Lam(Arc::new(m))
    }

    pub fn app(m: Comp, v: Val) -> Comp {
        Comp::App(Arc::new(m), Arc::new(v))
    }

    pub fn if_(v: Val, m: Comp, n: Comp) -> Comp {
        Comp::If(Arc::new(v), Arc::new(m), Arc::new(n))
    }

    pub fn size(&self) -> usize {
        match self {
            Comp::Ret(v) | Comp::Force(v) => 1 + v.size(),
            Comp::Bind(m, n) => 1 + m.size() + n.size(),
            Comp::Step(m) | Comp::Lam(m) => 1 + m.size(),
            Comp::App(m, v) => 1 + m.size() + v.size(),
            Comp::If(v, m, n) => 1 + v.size() + m.size() + n.size(),
        }
    }

    /// Removes every `Step`.
    pub fn erase_steps(&self) -> Comp {
        match self {
            Comp::Step(m) => m.erase_steps(),
            Comp::Ret(v) => Comp::ret(v.erase_steps()),
            Comp::Force(v) => Comp::force(v.erase_steps()),
            Comp::Bind(m, n) => Comp::bind(m.erase_steps(), n.erase_steps()),
            Comp::Lam(m) => Comp::lam(m.erase_steps()),
            Comp::App(m, v) => Comp::app(m.erase_steps(), v.erase_steps()),
            Comp::If(v, m, n) => Comp::if_(v.erase_steps(), m.erase_steps(), n.erase_steps()),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.scope_ok(0)
    }

    pub fn scope_ok(&self, depth: usize) -> bool {
        match self {
            Comp::Ret(v) | Comp::Force(v) => v.scope_ok(depth),
            Comp::Bind(m, n) => m.scope_ok(depth) && n.scope_ok(depth + 1),
            Comp::Step(m) => m.scope_ok(depth),
            Comp::Lam(m) => m.scope_ok(depth + 1),
            Comp::App(m, v) => m.scope_ok(depth) && v.scope_ok(depth),
            Comp::If(v, m, n) => v.scope_ok(depth) && m.scope_ok(depth) && n.scope_ok(depth),
        }
    }
}

impl Val {
    pub fn size(&self) -> usize {
        match self {
            Val::Thunk(m) => 1 + m.size(),
            _ => 1,
        }
    }

    pub fn erase_steps(&self) -> Val {
        match self {
            Val::Thunk(m) => Val::thunk(m.erase_steps()),
            other => other.clone(),
        }
    }

    pub fn scope_ok(&self, depth: usize) -> bool {
        match self {
            Val::Var(i) => *i < depth,
            Val::Thunk(m) => m.scope_ok(depth),
            _ => true,
        }
    }
}

fn map_val(v: &Val, depth: usize, f: &impl Fn(usize, usize) -> Val) -> Val {
    match v {
        Val::Var(i) => f(depth, *i),
        Val::Thunk(m) => Val::thunk(map_comp(m, depth, f)),
        other => other.clone(),
    }
}

fn map_comp(c: &Comp, depth: usize, f: &impl Fn(usize, usize) -> Val) -> Comp {
    match c {
        Comp::Ret(v) => Comp::ret(map_val(v, depth, f)),
        Comp::Force(v) => Comp::force(map_val(v, depth, f)),
        Comp::Bind(m, n) => Comp::bind(map_comp(m, depth, f), map_comp(n, depth + 1, f)),
        Comp::Step(m) => Comp::step(map_comp(m, depth, f)),
        Comp::Lam(m) => Comp::lam(map_comp(m, depth + 1, f)),
        Comp::App(m, v) => Comp::app(map_comp(m, depth, f), map_val(v, depth, f)),
        Comp::If(v, m, n) => Comp::if_(map_val(v, depth, f), map_comp(m, depth, f), map_comp(n, depth, f)),
    }
}

pub fn shift_val(v: &Val, cutoff: usize, amount: usize) -> Val {
    map_val(v, 0, &|depth, i| {
        Val::Var(if i >= cutoff + depth { i + amount } else { i })
    })
}

pub fn shift_comp(c: &Comp, cutoff: usize, amount: usize) -> Comp {
    map_comp(c, 0, &|depth, i| {
        Val::Var(if i >= cutoff + depth { i + amount } else { i })
    })
}

/// Substitutes `u` for index 0 of `c`, decrementing the other free indices.
pub fn subst_comp(c: &Comp, u: &Val) -> Comp {
    map_comp(c, 0, &|depth, i| match i.cmp(&depth) {
        std::cmp::Ordering::Equal => shift_val(u, 0, depth),
        std::cmp::Ordering::Greater => Val::Var(i - 1),
        std::cmp::Ordering::Less => Val::Var(i),
    })
}

/// Replaces free indices `skip..skip + closed.len()` by closed values;
/// `closed[closed.len() - 1]` stands for index `skip`.
pub fn instantiate_comp(c: &Comp, closed: &[Val], skip: usize) -> Comp {
    let n = closed.len();
    if n == 0 {
        return c.clone();
    }
    map_comp(c, 0, &|depth, i| {
        let base = depth + skip;
        if i < base {
            Val::Var(i)
        } else if i - base < n {
            closed[n - 1 - (i - base)].clone()
        } else {
            Val::Var(i - n)
        }
    })
}

pub fn instantiate_val(v: &Val, closed: &[Val]) -> Val {
    let n = closed.len();
    map_val(v, 0, &|depth, i| {
        if i < depth {
            Val::Var(i)
        } else if i - depth < n {
            closed[n - 1 - (i - depth)].clone()
        } else {
            Val::Var(i - n)
        }
    })
}

impl fmt::Debug for VType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VType::Bool => write!(f, "bool"),
            VType::U(x) => write!(f, "(U {x:?})"),
        }
    }
}

impl fmt::Debug for CType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CType::F(a) => write!(f, "(F {a:?})"),
            CType::Arrow(a, x) => write!(f, "(-> {a:?} {x:?})"),
        }
    }
}

impl fmt::Debug for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Var(i) => write!(f, "#{i}"),
            Val::True => write!(f, "true"),
            Val::False => write!(f, "false"),
            Val::Thunk(m) => write!(f, "(thunk {m:?})"),
        }
    }
}

impl fmt::Debug for Comp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Comp::Ret(v) => write!(f, "(ret {v:?})"),
            Comp::Bind(m, n) => write!(f, "(bind {m:?} {n:?})"),
            Comp::Step(m) => write!(f, "(step {m:?})"),
            Comp::Force(v) => write!(f, "(force {v:?})"),
            Comp::Lam(m) => write!(f, "(lam {m:?})"),
            Comp::App(m, v) => write!(f, "(app {m:?} {v:?})"),
            Comp::If(v, m, n) => write!(f, "(if {v:?} {m:?} {n:?})"),
        }
    }
}

/// Path to a computation position: child indices from the root.
pub type Path = Vec<u8>;

/// Positions executed exactly once whenever the whole computation runs to a
/// value, found syntactically: evaluation positions that are not under an
/// untaken or data-dependent branch, a thunk, or an unapplied abstraction.
pub fn once_positions(c: &Comp) -> Vec<Path> {
    fn go(c: &Comp, applied: usize, path: &mut Path, out: &mut Vec<Path>) {
        out.push(path.clone());
        let mut child = |i: u8, m: &Comp, applied: usize, out: &mut Vec<Path>| {
            path.push(i);
            go(m, applied, path, out);
            path.pop();
        };
        match c {
            Comp::Step(m) => child(0, m, applied, out),
            Comp::Bind(m, n) => {
                child(0, m, 0, out);
                child(1, n, applied, out);
            }
            Comp::App(m, _) => child(0, m, applied + 1, out),
            Comp::Lam(m) if applied > 0 => child(0, m, applied - 1, out),
            Comp::If(v, m, n) => match v.as_bool() {
                Some(true) => child(0, m, applied, out),
                Some(false) => child(1, n, applied, out),
                None => {}
            },
            Comp::Force(v) => {
                if let Val::Thunk(m) = &**v {
                    child(0, m, applied, out)
                }
            }
            Comp::Ret(_) | Comp::Lam(_) => {}
        }
    }
    let mut out = Vec::new();
    go(c, 0, &mut Vec::new(), &mut out);
    out
}

/// Wraps the computation at `path` in one `Step`.
pub fn insert_step(c: &Comp, path: &[u8]) -> Comp {
    let Some((&i, rest)) = path.split_first() else {
        return Comp::step(c.clone());
    };
    match (c, i) {
        (Comp::Step(m), 0) => Comp::step(insert_step(m, rest)),
        (Comp::Bind(m, n), 0) => Comp::bind(insert_step(m, rest), (**n).clone()),
        (Comp::Bind(m, n), 1) => Comp::bind((**m).clone(), insert_step(n, rest)),
        (Comp::App(m, v), 0) => Comp::app(insert_step(m, rest), (**v).clone()),
        (Comp::Lam(m), 0) => Comp::lam(insert_step(m, rest)),
        (Comp::If(v, m, n), 0) => Comp::if_((**v).clone(), insert_step(m, rest), (**n).clone()),
        (Comp::If(v, m, n), 1) => Comp::if_((**v).clone(), (**m).clone(), insert_step(n, rest)),
        (Comp::Force(v), 0) => match &**v {
            Val::Thunk(m) => Comp::force(Val::thunk(insert_step(m, rest))),
            _ => panic!("path does not address a computation"),
        },
        _ => panic!("path does not address a computation"),
    }
}
