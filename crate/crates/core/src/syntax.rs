//! Object-language syntax.
//!
//! Types and terms share one grammar. Variables are de Bruijn indices; `Pi`
//! codomains, `Lam` bodies and `If` motives bind exactly one variable.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

/// Terms of the object theory. Structural equality is α-equivalence.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Tp,
    Tm(Arc<Term>),
    Bool,
    True,
    False,
    If {
        /// Binds the scrutinee.
        motive: Arc<Term>,
        scrutinee: Arc<Term>,
        tbranch: Arc<Term>,
        fbranch: Arc<Term>,
    },
    /// `Pi(dom, cod)`; `cod` binds one variable of type `dom`.
    Pi(Arc<Term>, Arc<Term>),
    Lam(Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    U0,
    U1,
}

impl Term {
    pub fn tm(of: Term) -> Term {
        Term::Tm(Arc::new(of))
    }

    pub fn pi(dom: Term, cod: Term) -> Term {
        Term::Pi(Arc::new(dom), Arc::new(cod))
    }

    /// Non-dependent function type; `cod` is written in the outer scope.
    pub fn arrow(dom: Term, cod: Term) -> Term {
        Term::pi(dom, shift(&cod, 0, 1))
    }

    pub fn lam(body: Term) -> Term {
        Term::Lam(Arc::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Arc::new(fun), Arc::new(arg))
    }

    pub fn apps(fun: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(fun, Term::app)
    }

    pub fn if_(motive: Term, scrutinee: Term, tbranch: Term, fbranch: Term) -> Term {
        Term::If {
            motive: Arc::new(motive),
            scrutinee: Arc::new(scrutinee),
            tbranch: Arc::new(tbranch),
            fbranch: Arc::new(fbranch),
        }
    }

    /// Inferable annotation `t : ty`, encoded as `if (_. ty) true t t`.
    ///
    /// The motive is constant, so both branches are checked against `ty` and
    /// the whole term reduces to `t` by the first if-β rule.
    pub fn annot(ty: Term, t: Term) -> Term {
        Term::if_(shift(&ty, 0, 1), Term::True, t.clone(), t)
    }

    pub fn bool_lit(b: bool) -> Term {
        if b {
            Term::True
        } else {
            Term::False
        }
    }

    pub fn is_closed(&self) -> bool {
        check_scope(self, 0).is_ok()
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().map(|(_, c)| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().map(|(_, c)| c.depth()).max().unwrap_or(0)
    }

    /// Immediate subterms paired with the number of variables each binds.
    pub fn children(&self) -> impl Iterator<Item = (usize, &Term)> {
        let v: Vec<(usize, &Term)> = match self {
            Term::Var(_) | Term::Tp | Term::Bool | Term::True | Term::False | Term::U0 | Term::U1 => vec![],
            Term::Tm(a) => vec![(0, &**a)],
            Term::If {
                motive,
                scrutinee,
                tbranch,
                fbranch,
            } => vec![(1, &**motive), (0, &**scrutinee), (0, &**tbranch), (0, &**fbranch)],
            Term::Pi(a, b) => vec![(0, &**a), (1, &**b)],
            Term::Lam(b) => vec![(1, &**b)],
            Term::App(f, a) => vec![(0, &**f), (0, &**a)],
        };
        v.into_iter()
    }

    /// Whether some subterm satisfies `p`.
    pub fn mentions(&self, p: &dyn Fn(&Term) -> bool) -> bool {
        p(self) || self.children().any(|(_, c)| c.mentions(p))
    }

    /// Eliminates a boolean into a universe somewhere.
    pub fn uses_large_elim(&self) -> bool {
        self.mentions(&|s| matches!(s, Term::If { motive, .. } if matches!(**motive, Term::Tp | Term::U0 | Term::U1)))
    }

    /// Mentions a function type whose domain is a function type.
    pub fn is_higher_order(&self) -> bool {
        self.mentions(&|s| matches!(s, Term::Pi(dom, _) if matches!(**dom, Term::Pi(..))))
    }

    /// Erases the `Tm` classifier everywhere.
    pub fn erase_classifiers(&self) -> Term {
        map_vars(self, 0, &mut |_, i| Term::Var(i), true)
    }
}

/// Rebuilds `t`, replacing each variable `Var(i)` under `depth` binders by
/// `f(depth, i)`. With `erase`, `Tm(a)` is replaced by the image of `a`.
fn map_vars(t: &Term, depth: usize, f: &mut impl FnMut(usize, usize) -> Term, erase: bool) -> Term {
    match t {
        Term::Var(i) => f(depth, *i),
        Term::Tp => Term::Tp,
        Term::Bool => Term::Bool,
        Term::True => Term::True,
        Term::False => Term::False,
        Term::U0 => Term::U0,
        Term::U1 => Term::U1,
        Term::Tm(a) if erase => map_vars(a, depth, f, erase),
        Term::Tm(a) => Term::tm(map_vars(a, depth, f, erase)),
        Term::If {
            motive,
            scrutinee,
            tbranch,
            fbranch,
        } => Term::if_(
            map_vars(motive, depth + 1, f, erase),
            map_vars(scrutinee, depth, f, erase),
            map_vars(tbranch, depth, f, erase),
            map_vars(fbranch, depth, f, erase),
        ),
        Term::Pi(a, b) => Term::pi(map_vars(a, depth, f, erase), map_vars(b, depth + 1, f, erase)),
        Term::Lam(b) => Term::lam(map_vars(b, depth + 1, f, erase)),
        Term::App(g, a) => Term::app(map_vars(g, depth, f, erase), map_vars(a, depth, f, erase)),
    }
}

/// Adds `amount` to every free index `>= cutoff`.
///
/// Panics if an index would become negative: callers only shift down after
/// establishing that the affected variables do not occur.
pub fn shift(t: &Term, cutoff: usize, amount: isize) -> Term {
    if amount == 0 {
        return t.clone();
    }
    map_vars(
        t,
        0,
        &mut |depth, i| {
            if i >= cutoff + depth {
                let j = i as isize + amount;
                assert!(j >= depth as isize, "shift underflow: index {i} by {amount}");
                Term::Var(j as usize)
            } else {
                Term::Var(i)
            }
        },
        false,
    )
}

/// Capture-avoiding substitution of `u` for index `target`; indices above
/// `target` are decremented.
pub fn subst(t: &Term, target: usize, u: &Term) -> Term {
    map_vars(
        t,
        0,
        &mut |depth, i| {
            let k = target + depth;
            match i.cmp(&k) {
                std::cmp::Ordering::Equal => shift(u, 0, depth as isize),
                std::cmp::Ordering::Greater => Term::Var(i - 1),
                std::cmp::Ordering::Less => Term::Var(i),
            }
        },
        false,
    )
}

/// Simultaneously replaces the free variables of `t` by closed terms.
/// `closed[closed.len() - 1]` stands for index 0.
pub fn instantiate(t: &Term, closed: &[Term]) -> Term {
    if closed.is_empty() {
        return t.clone();
    }
    let n = closed.len();
    map_vars(
        t,
        0,
        &mut |depth, i| {
            if i < depth {
                Term::Var(i)
            } else if i - depth < n {
                closed[n - 1 - (i - depth)].clone()
            } else {
                Term::Var(i - n)
            }
        },
        false,
    )
}

pub fn alpha_eq(t1: &Term, t2: &Term) -> bool {
    t1 == t2
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("variable index {index} is not bound in a scope of depth {depth}")]
pub struct ScopeError {
    pub index: usize,
    pub depth: usize,
}

/// Checks that every variable of `t` is bound within `depth` ambient entries.
pub fn check_scope(t: &Term, depth: usize) -> Result<(), ScopeError> {
    match t {
        Term::Var(i) if *i >= depth => Err(ScopeError { index: *i, depth }),
        _ => t.children().try_for_each(|(binds, c)| check_scope(c, depth + binds)),
    }
}

/// Whether index `i` occurs free in `t`.
pub fn occurs_free(t: &Term, i: usize) -> bool {
    match t {
        Term::Var(j) => *j == i,
        _ => t.children().any(|(binds, c)| occurs_free(c, i + binds)),
    }
}

/// Smallest context length in which `t` is well-scoped.
pub fn scope_depth(t: &Term) -> usize {
    match t {
        Term::Var(i) => i + 1,
        _ => t
            .children()
            .map(|(binds, c)| scope_depth(c).saturating_sub(binds))
            .max()
            .unwrap_or(0),
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "#{i}"),
            Term::Tp => write!(f, "tp"),
            Term::Tm(a) => write!(f, "(tm {a:?})"),
            Term::Bool => write!(f, "bool"),
            Term::True => write!(f, "true"),
            Term::False => write!(f, "false"),
            Term::If {
                motive,
                scrutinee,
                tbranch,
                fbranch,
            } => write!(f, "(if {motive:?} {scrutinee:?} {tbranch:?} {fbranch:?})"),
            Term::Pi(a, b) => write!(f, "(pi {a:?} {b:?})"),
            Term::Lam(b) => write!(f, "(lam {b:?})"),
            Term::App(g, a) => write!(f, "(app {g:?} {a:?})"),
            Term::U0 => write!(f, "u0"),
            Term::U1 => write!(f, "u1"),
        }
    }
}

/// A telescope of typed entries; the last entry is index 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    entries: Vec<(String, Term)>,
}

impl Context {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, name: impl Into<String>, ty: Term) {
        self.entries.push((name.into(), ty));
    }

    pub fn pop(&mut self) -> Option<(String, Term)> {
        self.entries.pop()
    }

    pub fn extended(&self, name: impl Into<String>, ty: Term) -> Self {
        let mut ctx = self.clone();
        ctx.push(name, ty);
        ctx
    }

    /// Entries in telescope order, each type scoped over the preceding prefix.
    pub fn entries(&self) -> &[(String, Term)] {
        &self.entries
    }

    /// Name and type of index `i`, with the type weakened into the full context.
    pub fn lookup(&self, i: usize) -> Option<(&str, Term)> {
        let level = self.entries.len().checked_sub(i + 1)?;
        let (name, ty) = &self.entries[level];
        Some((name, shift(ty, 0, i as isize + 1)))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    /// Checks that each entry is scoped over its prefix.
    pub fn check_scope(&self) -> Result<(), ScopeError> {
        self.entries
            .iter()
            .enumerate()
            .try_for_each(|(level, (_, ty))| check_scope(ty, level))
    }
}

impl FromIterator<(String, Term)> for Context {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Context {
            entries: iter.into_iter().collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationName {
    IfBeta1,
    IfBeta2,
    PiBeta,
    PiEta,
}

impl EquationName {
    pub const ALL: [EquationName; 4] = [
        EquationName::IfBeta1,
        EquationName::IfBeta2,
        EquationName::PiBeta,
        EquationName::PiEta,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EquationName::IfBeta1 => "if_beta1",
            EquationName::IfBeta2 => "if_beta2",
            EquationName::PiBeta => "pi_beta",
            EquationName::PiEta => "pi_eta",
        }
    }
}

/// An axiom `lhs = rhs : at` stated in a context of schematic variables.
///
/// Function-valued schematic variables (`C`, `f`, `e`) stand for the
/// meta-level functions of the signature; `lam f` is written `λx. f x`.
#[derive(Clone, Debug)]
pub struct Equation {
    pub name: EquationName,
    pub context: Context,
    pub at: Term,
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    /// Closes the equation over closed terms for its schematic variables,
    /// given in telescope order. Returns `(at, lhs, rhs)`.
    pub fn instantiate(&self, args: &[Term]) -> (Term, Term, Term) {
        assert_eq!(args.len(), self.context.len(), "wrong number of schema arguments");
        (
            instantiate(&self.at, args),
            instantiate(&self.lhs, args),
            instantiate(&self.rhs, args),
        )
    }
}

/// The equations of the signature.
#[derive(Clone, Debug)]
pub struct EquationTable {
    equations: Vec<Equation>,
}

impl EquationTable {
    pub fn signature() -> Self {
        use Term::*;
        let v = Var;
        // C : bool → u0, t : C true, f : C false
        let if_ctx: Context = [
            ("C".to_string(), Term::arrow(Bool, U0)),
            ("t".to_string(), Term::app(v(0), True)),
            ("f".to_string(), Term::app(v(1), False)),
        ]
        .into_iter()
        .collect();
        let if_motive = Term::app(v(3), v(0));
        // A : u0, B : A → u0, f : (x : A) → B x, a : A
        let pi_ctx = |with_arg: bool| -> Context {
            let mut c: Context = [
                ("A".to_string(), U0),
                ("B".to_string(), Term::pi(v(0), U0)),
                ("f".to_string(), Term::pi(v(1), Term::app(v(1), v(0)))),
            ]
            .into_iter()
            .collect();
            if with_arg {
                c.push("a", v(2));
            }
            c
        };
        let equations = vec![
            Equation {
                name: EquationName::IfBeta1,
                context: if_ctx.clone(),
                at: Term::app(v(2), True),
                lhs: Term::if_(if_motive.clone(), True, v(1), v(0)),
                rhs: v(1),
            },
            Equation {
                name: EquationName::IfBeta2,
                context: if_ctx,
                at: Term::app(v(2), False),
                lhs: Term::if_(if_motive, False, v(1), v(0)),
                rhs: v(0),
            },
            Equation {
                name: EquationName::PiBeta,
                context: pi_ctx(true),
                at: Term::app(v(2), v(0)),
                lhs: Term::app(Term::lam(Term::app(v(2), v(0))), v(0)),
                rhs: Term::app(v(1), v(0)),
            },
            Equation {
                name: EquationName::PiEta,
                context: pi_ctx(false),
                at: Term::pi(v(2), Term::app(v(2), v(0))),
                lhs: Term::lam(Term::app(v(1), v(0))),
                rhs: v(0),
            },
        ];
        EquationTable { equations }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Equation> {
        self.equations.iter()
    }

    pub fn get(&self, name: EquationName) -> &Equation {
        self.equations
            .iter()
            .find(|e| e.name == name)
            .expect("signature equation present")
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Term::*;

    /// Named-variable terms: the independent oracle for shift and subst.
    #[derive(Clone, Debug, PartialEq)]
    enum Named {
        Var(String),
        Const(Term),
        Lam(String, Box<Named>),
        App(Box<Named>, Box<Named>),
        Pi(Box<Named>, String, Box<Named>),
        Tm(Box<Named>),
        If(String, Box<Named>, Box<Named>, Box<Named>, Box<Named>),
    }

    fn to_named(t: &Term, scope: &mut Vec<String>, fresh: &mut usize) -> Named {
        match t {
            Term::Var(i) => Named::Var(scope[scope.len() - 1 - i].clone()),
            Term::Lam(b) => {
                *fresh += 1;
                let x = format!("v{fresh}");
                scope.push(x.clone());
                let body = to_named(b, scope, fresh);
                scope.pop();
                Named::Lam(x, Box::new(body))
            }
            Term::Pi(a, b) => {
                let a = to_named(a, scope, fresh);
                *fresh += 1;
                let x = format!("v{fresh}");
                scope.push(x.clone());
                let b = to_named(b, scope, fresh);
                scope.pop();
                Named::Pi(Box::new(a), x, Box::new(b))
            }
            Term::App(f, a) => Named::App(Box::new(to_named(f, scope, fresh)), Box::new(to_named(a, scope, fresh))),
            Term::Tm(a) => Named::Tm(Box::new(to_named(a, scope, fresh))),
            Term::If {
                motive,
                scrutinee,
                tbranch,
                fbranch,
            } => {
                *fresh += 1;
                let x = format!("v{fresh}");
                scope.push(x.clone());
                let m = to_named(motive, scope, fresh);
                scope.pop();
                Named::If(
                    x,
                    Box::new(m),
                    Box::new(to_named(scrutinee, scope, fresh)),
                    Box::new(to_named(tbranch, scope, fresh)),
                    Box::new(to_named(fbranch, scope, fresh)),
                )
            }
            other => Named::Const(other.clone()),
        }
    }

    fn from_named(n: &Named, scope: &mut Vec<String>) -> Term {
        match n {
            Named::Var(x) => {
                let pos = scope.iter().rposition(|y| y == x).expect("bound");
                Term::Var(scope.len() - 1 - pos)
            }
            Named::Const(t) => t.clone(),
            Named::Lam(x, b) => {
                scope.push(x.clone());
                let b = from_named(b, scope);
                scope.pop();
                Term::lam(b)
            }
            Named::Pi(a, x, b) => {
                let a = from_named(a, scope);
                scope.push(x.clone());
                let b = from_named(b, scope);
                scope.pop();
                Term::pi(a, b)
            }
            Named::App(f, a) => Term::app(from_named(f, scope), from_named(a, scope)),
            Named::Tm(a) => Term::tm(from_named(a, scope)),
            Named::If(x, m, b, t, f) => {
                scope.push(x.clone());
                let m = from_named(m, scope);
                scope.pop();
                Term::if_(m, from_named(b, scope), from_named(t, scope), from_named(f, scope))
            }
        }
    }

    fn free_vars(n: &Named, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match n {
            Named::Var(x) if !bound.contains(x) => out.push(x.clone()),
            Named::Var(_) | Named::Const(_) => {}
            Named::Lam(x, b) => {
                bound.push(x.clone());
                free_vars(b, bound, out);
                bound.pop();
            }
            Named::Pi(a, x, b) => {
                free_vars(a, bound, out);
                bound.push(x.clone());
                free_vars(b, bound, out);
                bound.pop();
            }
            Named::App(f, a) => {
                free_vars(f, bound, out);
                free_vars(a, bound, out);
            }
            Named::Tm(a) => free_vars(a, bound, out),
            Named::If(x, m, b, t, f) => {
                bound.push(x.clone());
                free_vars(m, bound, out);
                bound.pop();
                for c in [b, t, f] {
                    free_vars(c, bound, out);
                }
            }
        }
    }

    /// Textbook named substitution with renaming of binders that would capture.
    fn named_subst(n: &Named, x: &str, u: &Named, fresh: &mut usize) -> Named {
        let mut fv = vec![];
        free_vars(u, &mut vec![], &mut fv);
        let under = |y: &String, body: &Named, fresh: &mut usize| -> (String, Named) {
            if y == x {
                return (y.clone(), body.clone());
            }
            if fv.contains(y) {
                *fresh += 1;
                let z = format!("r{fresh}");
                let renamed = named_subst(body, y, &Named::Var(z.clone()), fresh);
                (z, named_subst(&renamed, x, u, fresh))
            } else {
                (y.clone(), named_subst(body, x, u, fresh))
            }
        };
        match n {
            Named::Var(y) if y == x => u.clone(),
            Named::Var(_) | Named::Const(_) => n.clone(),
            Named::Lam(y, b) => {
                let (y, b) = under(y, b, fresh);
                Named::Lam(y, Box::new(b))
            }
            Named::Pi(a, y, b) => {
                let a = named_subst(a, x, u, fresh);
                let (y, b) = under(y, b, fresh);
                Named::Pi(Box::new(a), y, Box::new(b))
            }
            Named::App(f, a) => Named::App(
                Box::new(named_subst(f, x, u, fresh)),
                Box::new(named_subst(a, x, u, fresh)),
            ),
            Named::Tm(a) => Named::Tm(Box::new(named_subst(a, x, u, fresh))),
            Named::If(y, m, b, t, f) => {
                let (y, m) = under(y, m, fresh);
                Named::If(
                    y,
                    Box::new(m),
                    Box::new(named_subst(b, x, u, fresh)),
                    Box::new(named_subst(t, x, u, fresh)),
                    Box::new(named_subst(f, x, u, fresh)),
                )
            }
        }
    }

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("g{i}")).collect()
    }

    /// Oracle for `subst(t, target, u)` in a context of `k` free names.
    fn oracle_subst(t: &Term, target: usize, u: &Term, k: usize) -> Term {
        let scope = names(k);
        let mut fresh = 0;
        let nt = to_named(t, &mut scope.clone(), &mut fresh);
        let mut smaller = scope.clone();
        let x = smaller.remove(k - 1 - target);
        let nu = to_named(u, &mut smaller.clone(), &mut fresh);
        let r = named_subst(&nt, &x, &nu, &mut fresh);
        from_named(&r, &mut smaller)
    }

    /// Oracle for `shift(t, cutoff, amount)`: rename into a wider named scope.
    fn oracle_shift(t: &Term, cutoff: usize, amount: usize, k: usize) -> Term {
        let scope = names(k);
        let mut fresh = 0;
        let nt = to_named(t, &mut scope.clone(), &mut fresh);
        let mut wider = scope.clone();
        let at = k - cutoff;
        for j in 0..amount {
            wider.insert(at, format!("w{j}"));
        }
        from_named(&nt, &mut wider)
    }

    fn arb_term(k: usize) -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![Just(True), Just(False), Just(Bool), (0..k.max(1) + 2).prop_map(Var),];
        leaf.prop_recursive(6, 48, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(Term::lam),
                (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::pi(a, b)),
                inner.clone().prop_map(Term::tm),
                (inner.clone(), inner.clone(), inner.clone(), inner).prop_map(|(m, s, t, f)| Term::if_(m, s, t, f)),
            ]
        })
    }

    /// Folds out-of-scope indices back into range.
    fn clamp_scope(t: &Term, k: usize) -> Term {
        map_vars(t, 0, &mut |depth, i| Var(i % (depth + k).max(1)), false)
    }

    fn scoped(k: usize) -> impl Strategy<Value = Term> {
        arb_term(k)
            .prop_map(move |t| clamp_scope(&t, k))
            .prop_filter("needs a variable in scope", move |t| check_scope(t, k).is_ok())
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift(&Var(0), 0, 1), Var(1));
        assert_eq!(shift(&Term::lam(Var(0)), 0, 1), Term::lam(Var(0)));
        let t = Term::lam(Term::app(Var(0), Var(1)));
        let expected = Term::lam(Term::app(Var(0), Var(3)));
        assert_eq!(shift(&t, 0, 2), expected);
        assert_eq!(oracle_shift(&t, 0, 2, 1), expected);
    }

    #[test]
    fn subst_examples() {
        assert_eq!(subst(&Var(0), 0, &True), True);
        assert_eq!(subst(&Term::lam(Var(0)), 0, &True), Term::lam(Var(0)));
        let t = Term::lam(Term::app(Var(1), Var(0)));
        let expected = Term::lam(Term::app(False, Var(0)));
        assert_eq!(subst(&t, 0, &False), expected);
        assert_eq!(oracle_subst(&t, 0, &False, 1), expected);
    }

    #[test]
    fn alpha_eq_examples() {
        assert!(alpha_eq(&Term::lam(Var(0)), &Term::lam(Var(0))));
        assert!(!alpha_eq(&True, &False));
        assert!(alpha_eq(&Term::pi(Bool, Var(0)), &Term::pi(Bool, Var(0))));
    }

    #[test]
    #[should_panic(expected = "shift underflow")]
    fn shift_underflow_is_fatal() {
        shift(&Var(0), 0, -1);
    }

    #[test]
    fn scope_validator() {
        assert!(check_scope(&Term::lam(Var(0)), 0).is_ok());
        assert_eq!(
            check_scope(&Term::lam(Var(1)), 0),
            Err(ScopeError { index: 1, depth: 1 })
        );
        assert_eq!(scope_depth(&Term::lam(Term::app(Var(0), Var(2)))), 2);
        let ctx: Context = [("A".to_string(), U0), ("x".to_string(), Var(0))].into_iter().collect();
        assert!(ctx.check_scope().is_ok());
        assert_eq!(ctx.lookup(0), Some(("x", Var(1))));
        assert_eq!(ctx.lookup(1), Some(("A", U0)));
        assert_eq!(ctx.lookup(2), None);
    }

    #[test]
    fn instantiate_matches_iterated_subst() {
        let t = Term::lam(Term::app(Term::app(Var(1), Var(2)), Var(0)));
        let closed = [True, Term::lam(Var(0))];
        let via_subst = subst(&subst(&t, 0, &closed[1]), 0, &closed[0]);
        assert_eq!(instantiate(&t, &closed), via_subst);
    }

    #[test]
    fn signature_table_is_exact() {
        let table = EquationTable::signature();
        let names: Vec<_> = table.iter().map(|e| e.name).collect();
        assert_eq!(names, EquationName::ALL.to_vec());
        for eq in table.iter() {
            eq.context.check_scope().unwrap();
            let k = eq.context.len();
            check_scope(&eq.lhs, k).unwrap();
            check_scope(&eq.rhs, k).unwrap();
            check_scope(&eq.at, k).unwrap();
        }
    }

    #[test]
    fn erasure_removes_classifiers() {
        let t = Term::pi(Term::tm(Bool), Term::tm(Var(0)));
        assert_eq!(t.erase_classifiers(), Term::pi(Bool, Var(0)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn shift_subst_cancel(t in scoped(3), u in scoped(3)) {
            let up = shift(&t, 0, 1);
            prop_assert_eq!(subst(&up, 0, &u), t);
        }

        #[test]
        fn subst_agrees_with_named_oracle(t in scoped(3), u in scoped(2), target in 0usize..3) {
            let got = subst(&t, target, &u);
            prop_assert!(check_scope(&got, 2).is_ok());
            prop_assert_eq!(got, oracle_subst(&t, target, &u, 3));
        }

        #[test]
        fn shift_agrees_with_named_oracle(t in scoped(3), cutoff in 0usize..=3, amount in 0usize..3) {
            let got = shift(&t, cutoff, amount as isize);
            prop_assert!(check_scope(&got, 3 + amount).is_ok());
            prop_assert_eq!(got, oracle_shift(&t, cutoff, amount, 3));
        }
    }
}
