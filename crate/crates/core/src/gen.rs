//! Seeded generators of well-typed closed terms for both kernels.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::calf::syntax::{CType, Comp, VType, Val};
use crate::nbe::Nbe;
use crate::syntax::{EquationName, EquationTable, Term};

/// Simple types used to steer kernel generation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SType {
    Bool,
    Arrow(Box<SType>, Box<SType>),
}

impl SType {
    pub fn arrow(a: SType, b: SType) -> SType {
        SType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn to_term(&self) -> Term {
        match self {
            SType::Bool => Term::Bool,
            SType::Arrow(a, b) => Term::arrow(a.to_term(), b.to_term()),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            SType::Bool => 0,
            SType::Arrow(a, b) => (a.order() + 1).max(b.order()),
        }
    }

    /// Argument types and result of a curried function type.
    pub fn spine(&self) -> (Vec<&SType>, &SType) {
        let mut args = Vec::new();
        let mut cur = self;
        while let SType::Arrow(a, b) = cur {
            args.push(&**a);
            cur = b;
        }
        (args, cur)
    }
}

fn bb() -> SType {
    SType::arrow(SType::Bool, SType::Bool)
}

pub const DEFAULT_DEPTH: usize = 4;

pub struct KernelGen {
    rng: StdRng,
    depth: usize,
}

impl KernelGen {
    pub fn new(seed: u64) -> Self {
        KernelGen::with_depth(seed, DEFAULT_DEPTH)
    }

    pub fn with_depth(seed: u64, depth: usize) -> Self {
        KernelGen {
            rng: StdRng::seed_from_u64(seed),
            depth,
        }
    }

    pub fn closed_bool(&mut self) -> Term {
        self.term(&[], &SType::Bool, self.depth)
    }

    /// A closed term of `ty` that checks against `ty.to_term()`.
    pub fn closed_of(&mut self, ty: &SType) -> Term {
        self.term(&[], ty, self.depth)
    }

    pub fn simple_type(&mut self) -> SType {
        self.pick_type()
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    fn pick_type(&mut self) -> SType {
        match self.rng.random_range(0..10) {
            0..=4 => SType::Bool,
            5..=7 => bb(),
            8 => SType::arrow(bb(), SType::Bool),
            _ => SType::arrow(SType::Bool, bb()),
        }
    }

    fn lit(&mut self) -> Term {
        Term::bool_lit(self.rng.random_bool(0.5))
    }

    fn pick<T: Clone>(&mut self, xs: &[T]) -> Option<T> {
        (!xs.is_empty()).then(|| xs[self.rng.random_range(0..xs.len())].clone())
    }

    /// Indices of variables whose type, after some arguments, is `ty`.
    fn heads(ctx: &[SType], ty: &SType) -> Vec<usize> {
        (0..ctx.len())
            .filter(|i| {
                let vty = &ctx[ctx.len() - 1 - i];
                vty.spine().1 == ty || vty == ty
            })
            .collect()
    }

    fn var_app(&mut self, ctx: &[SType], i: usize, ty: &SType, depth: usize) -> Term {
        let vty = ctx[ctx.len() - 1 - i].clone();
        let mut t = Term::Var(i);
        let mut cur = &vty;
        while cur != ty {
            let SType::Arrow(a, b) = cur else { break };
            t = Term::app(t, self.term(ctx, a, depth.saturating_sub(1)));
            cur = b;
        }
        t
    }

    fn term(&mut self, ctx: &[SType], ty: &SType, depth: usize) -> Term {
        let heads = Self::heads(ctx, ty);
        if depth == 0 {
            let exact: Vec<usize> = heads
                .iter()
                .copied()
                .filter(|i| ctx[ctx.len() - 1 - i] == *ty)
                .collect();
            if let Some(i) = self.pick(&exact) {
                if self.rng.random_bool(0.6) {
                    return Term::Var(i);
                }
            }
            return match ty {
                SType::Bool => self.lit(),
                SType::Arrow(a, b) => {
                    let mut inner = ctx.to_vec();
                    inner.push((**a).clone());
                    Term::lam(self.term(&inner, b, 0))
                }
            };
        }
        let d = depth - 1;
        match ty {
            SType::Bool => match self.rng.random_range(0..16) {
                0 => self.lit(),
                1..=2 => match self.pick(&heads) {
                    Some(i) => self.var_app(ctx, i, ty, depth),
                    None => self.lit(),
                },
                3..=4 => Term::if_(
                    Term::Bool,
                    self.term(ctx, &SType::Bool, d),
                    self.term(ctx, ty, d),
                    self.term(ctx, ty, d),
                ),
                5..=7 => self.annotated_app(ctx, ty, d),
                8..=9 => {
                    let mut inner = ctx.to_vec();
                    inner.push(SType::Bool);
                    let body = self.term(&inner, ty, d);
                    let arg = match self.term(ctx, &SType::Bool, d) {
                        redex @ Term::App(..) if matches!(&redex, Term::App(f, _) if matches!(**f, Term::Lam(_))) => {
                            Term::annot(Term::Bool, redex)
                        }
                        arg => arg,
                    };
                    Term::app(Term::lam(body), arg)
                }
                10..=12 => self.large_elim(d),
                13 => {
                    let motive = Term::if_(Term::Tp, Term::Var(0), Term::Bool, Term::Bool);
                    let s = self.term(&[], &SType::Bool, d);
                    Term::if_(motive, s, self.term(ctx, ty, d), self.term(ctx, ty, d))
                }
                _ => self.higher_order(ctx, d),
            },
            SType::Arrow(a, b) => match self.rng.random_range(0..6) {
                0..=2 => {
                    let mut inner = ctx.to_vec();
                    inner.push((**a).clone());
                    Term::lam(self.term(&inner, b, d))
                }
                3 => match self.pick(&heads) {
                    Some(i) => self.var_app(ctx, i, ty, depth),
                    None => self.term(ctx, ty, 0),
                },
                4 => Term::if_(
                    ty.to_term(),
                    self.term(ctx, &SType::Bool, d),
                    self.term(ctx, ty, d),
                    self.term(ctx, ty, d),
                ),
                _ => self.annotated_app(ctx, ty, d),
            },
        }
    }

    /// `((the (-> A ty) (lam x body)) arg)` for a random `A`.
    fn annotated_app(&mut self, ctx: &[SType], ty: &SType, d: usize) -> Term {
        let a = self.pick_type();
        let mut inner = ctx.to_vec();
        inner.push(a.clone());
        let body = self.term(&inner, ty, d);
        let head = Term::annot(SType::arrow(a.clone(), ty.clone()).to_term(), Term::lam(body));
        Term::app(head, self.term(ctx, &a, d))
    }

    /// Applies a generated second-order function to a generated function.
    fn higher_order(&mut self, ctx: &[SType], d: usize) -> Term {
        let fty = SType::arrow(bb(), SType::Bool);
        let mut inner = ctx.to_vec();
        inner.push(bb());
        let body = if self.rng.random_bool(0.5) {
            let k = self.term(&inner, &SType::Bool, d);
            Term::app(Term::Var(0), Term::app(Term::Var(0), k))
        } else {
            self.term(&inner, &SType::Bool, d)
        };
        let head = Term::annot(fty.to_term(), Term::lam(body));
        Term::app(head, self.term(ctx, &bb(), d))
    }

    /// A closed boolean built by dependent elimination into `tp`. The
    /// scrutinee is evaluated so that the selected type is `bool`.
    fn large_elim(&mut self, d: usize) -> Term {
        let s = self.term(&[], &SType::Bool, d);
        let tag = Nbe::default()
            .normalize(&[], &s, &Term::Bool)
            .map(|n| n == Term::True)
            .unwrap_or(true);
        let other = if self.rng.random_bool(0.5) {
            bb()
        } else {
            SType::arrow(SType::Bool, bb())
        };
        let (t1, t2) = if tag {
            (SType::Bool, other)
        } else {
            (other, SType::Bool)
        };
        let family = Term::if_(Term::Tp, Term::Var(0), t1.to_term(), t2.to_term());
        let ctx = [SType::Bool];
        let e1 = self.term(&ctx, &t1, d);
        let e2 = self.term(&ctx, &t2, d);
        let body = Term::if_(family.clone(), Term::Var(0), e1, e2);
        let head = Term::annot(Term::pi(Term::Bool, family), Term::lam(body));
        Term::app(head, s)
    }
}

/// A type family over a simple domain: constant, or split by a boolean.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fam {
    Const(SType),
    Split(SType, SType),
}

impl Fam {
    /// `λx. S` or `λx. if (b. tp) x S₁ S₂`, annotated so that it infers.
    pub fn to_term(&self, dom: &SType) -> Term {
        let body = match self {
            Fam::Const(s) => s.to_term(),
            Fam::Split(s1, s2) => Term::if_(Term::Tp, Term::Var(0), s1.to_term(), s2.to_term()),
        };
        Term::annot(Term::arrow(dom.to_term(), Term::U0), Term::lam(body))
    }

    pub fn at(&self, tag: Option<bool>) -> &SType {
        match (self, tag) {
            (Fam::Const(s), _) => s,
            (Fam::Split(s1, _), Some(true)) => s1,
            (Fam::Split(_, s2), _) => s2,
        }
    }
}

/// A closed instantiation of a signature equation.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: EquationName,
    pub args: Vec<Term>,
    pub at: Term,
    pub lhs: Term,
    pub rhs: Term,
    /// Closed arguments that saturate `at` down to `bool`.
    pub probes: Vec<Term>,
}

impl KernelGen {
    fn fam(&mut self, dom: &SType) -> Fam {
        if *dom == SType::Bool && self.coin(0.5) {
            Fam::Split(self.pick_type(), self.pick_type())
        } else {
            Fam::Const(self.pick_type())
        }
    }

    fn probes(&mut self, ty: &SType) -> Vec<Term> {
        let (args, _) = ty.spine();
        let args: Vec<SType> = args.into_iter().cloned().collect();
        args.iter().map(|a| self.closed_of(a)).collect()
    }

    fn tag_of(t: &Term) -> Option<bool> {
        match Nbe::default().normalize(&[], t, &Term::Bool) {
            Ok(Term::True) => Some(true),
            Ok(Term::False) => Some(false),
            _ => None,
        }
    }

    /// A dependent function `(x : A) → B x`, annotated.
    fn section(&mut self, dom: &SType, fam: &Fam) -> Term {
        let body = match fam {
            Fam::Const(s) => {
                return Term::annot(
                    SType::arrow(dom.clone(), s.clone()).to_term(),
                    self.closed_of(&SType::arrow(dom.clone(), s.clone())),
                )
            }
            Fam::Split(s1, s2) => {
                let motive = Term::if_(Term::Tp, Term::Var(0), s1.to_term(), s2.to_term());
                let (e1, e2) = (self.closed_of(s1), self.closed_of(s2));
                Term::if_(motive, Term::Var(0), e1, e2)
            }
        };
        let ty = Term::pi(dom.to_term(), Term::app(fam.to_term(dom), Term::Var(0)));
        Term::annot(ty, Term::lam(body))
    }

    pub fn instance(&mut self, name: EquationName) -> Instance {
        let table = EquationTable::signature();
        let eq = table.get(name);
        let (args, probes) = match name {
            EquationName::IfBeta1 | EquationName::IfBeta2 => {
                let fam = self.fam(&SType::Bool);
                let c = fam.to_term(&SType::Bool);
                let t = self.closed_of(fam.at(Some(true)));
                let f = self.closed_of(fam.at(Some(false)));
                let taken = fam.at(Some(name == EquationName::IfBeta1)).clone();
                (vec![c, t, f], self.probes(&taken))
            }
            EquationName::PiBeta | EquationName::PiEta => {
                let dom = self.pick_type();
                let fam = self.fam(&dom);
                let b = fam.to_term(&dom);
                let f = self.section(&dom, &fam);
                // The argument of a literal redex must infer.
                let a = Term::annot(dom.to_term(), self.closed_of(&dom));
                let cod = fam.at(Self::tag_of(&a)).clone();
                let mut probes = self.probes(&cod);
                let mut args = vec![dom.to_term(), b, f];
                if name == EquationName::PiBeta {
                    args.push(a);
                } else {
                    probes.insert(0, a);
                }
                (args, probes)
            }
        };
        let (at, lhs, rhs) = eq.instantiate(&args);
        Instance {
            name,
            args,
            at,
            lhs,
            rhs,
            probes,
        }
    }
}

pub struct CbpvGen {
    rng: StdRng,
    depth: usize,
}

impl CbpvGen {
    pub fn new(seed: u64) -> Self {
        CbpvGen::with_depth(seed, DEFAULT_DEPTH + 1)
    }

    pub fn with_depth(seed: u64, depth: usize) -> Self {
        CbpvGen {
            rng: StdRng::seed_from_u64(seed),
            depth,
        }
    }

    /// A closed computation of type `F bool`.
    pub fn closed_fbool(&mut self) -> Comp {
        for _ in 0..16 {
            if let Some(m) = self.comp(&[], &CType::f_bool(), self.depth, false) {
                return m;
            }
        }
        Comp::ret(Val::bool_lit(self.rng.random_bool(0.5)))
    }

    fn pick_vtype(&mut self) -> VType {
        match self.rng.random_range(0..10) {
            0..=5 => VType::Bool,
            6..=7 => VType::u(CType::f_bool()),
            _ => VType::u(CType::arrow(VType::Bool, CType::f_bool())),
        }
    }

    fn vars(ctx: &[VType], ty: &VType) -> Vec<usize> {
        (0..ctx.len()).filter(|i| ctx[ctx.len() - 1 - i] == *ty).collect()
    }

    fn val(&mut self, ctx: &[VType], ty: &VType, depth: usize, infer: bool) -> Option<Val> {
        let vars = Self::vars(ctx, ty);
        if !vars.is_empty() && self.rng.random_bool(0.4) {
            return Some(Val::Var(vars[self.rng.random_range(0..vars.len())]));
        }
        match ty {
            VType::Bool => Some(Val::bool_lit(self.rng.random_bool(0.5))),
            VType::U(c) => self
                .comp(ctx, c, depth.saturating_sub(1), infer)
                .map(Val::thunk)
                .or_else(|| vars.first().map(|i| Val::Var(*i))),
        }
    }

    /// A computation of type `ty`; when `infer` is set, one whose type the
    /// checker can synthesize.
    fn comp(&mut self, ctx: &[VType], ty: &CType, depth: usize, infer: bool) -> Option<Comp> {
        if depth == 0 {
            return match ty {
                CType::F(a) => self.val(ctx, a, 0, infer).map(Comp::ret),
                CType::Arrow(a, x) if !infer => {
                    let mut inner = ctx.to_vec();
                    inner.push((**a).clone());
                    self.comp(&inner, x, 0, false).map(Comp::lam)
                }
                CType::Arrow(..) => self.force_var(ctx, ty),
            };
        }
        let d = depth - 1;
        let choice = self.rng.random_range(0..12);
        let m = match choice {
            0..=1 => match ty {
                CType::F(a) => self.val(ctx, a, d, infer).map(Comp::ret),
                CType::Arrow(a, x) if !infer => {
                    let mut inner = ctx.to_vec();
                    inner.push((**a).clone());
                    self.comp(&inner, x, d, false).map(Comp::lam)
                }
                CType::Arrow(..) => self.force_var(ctx, ty),
            },
            2..=3 => self.comp(ctx, ty, d, infer).map(Comp::step),
            4..=5 => {
                let b = self.pick_vtype();
                let m = self.comp(ctx, &CType::f(b.clone()), d, true)?;
                let mut inner = ctx.to_vec();
                inner.push(b);
                let n = self.comp(&inner, ty, d, infer)?;
                Some(Comp::bind(m, n))
            }
            6..=7 => {
                let v = self.val(ctx, &VType::Bool, d, true)?;
                let m = self.comp(ctx, ty, d, infer)?;
                let n = self.comp(ctx, ty, d, false)?;
                Some(Comp::if_(v, m, n))
            }
            8..=9 => {
                let b = self.pick_vtype();
                let fty = CType::arrow(b.clone(), ty.clone());
                let (f, v) = if b == VType::Bool || !infer {
                    let v = self.val(ctx, &b, d, true)?;
                    (self.comp(ctx, &fty, d, infer)?, v)
                } else {
                    let f = self.comp(ctx, &fty, d, true)?;
                    (f, self.val(ctx, &b, d, false)?)
                };
                Some(Comp::app(f, v))
            }
            _ => {
                let v = self.val(ctx, &VType::u(ty.clone()), d, true)?;
                Some(Comp::force(v))
            }
        };
        m.or_else(|| self.comp(ctx, ty, 0, infer))
    }

    fn force_var(&mut self, ctx: &[VType], ty: &CType) -> Option<Comp> {
        let vars = Self::vars(ctx, &VType::u(ty.clone()));
        (!vars.is_empty()).then(|| Comp::force(Val::Var(vars[self.rng.random_range(0..vars.len())])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calf::check::cbpv_check;
    use crate::calf::syntax::{CbpvTerm, CbpvType};
    use crate::check::Checker;

    #[test]
    fn kernel_samples_are_closed_booleans() {
        let mut g = KernelGen::new(7);
        for _ in 0..300 {
            let t = g.closed_bool();
            Checker::default()
                .check_closed_bool(&t)
                .unwrap_or_else(|e| panic!("{t:?}: {e}"));
        }
    }

    #[test]
    fn kernel_samples_cover_large_elimination_and_higher_order() {
        let mut g = KernelGen::new(11);
        let samples: Vec<Term> = (0..200).map(|_| g.closed_bool()).collect();
        let large = samples.iter().filter(|t| t.uses_large_elim()).count();
        let higher = samples.iter().filter(|t| t.is_higher_order()).count();
        assert!(large >= 20, "{large}");
        assert!(higher >= 20, "{higher}");
    }

    #[test]
    fn generation_is_seeded() {
        let a: Vec<Term> = (0..20)
            .map({
                let mut g = KernelGen::new(3);
                move |_| g.closed_bool()
            })
            .collect();
        let b: Vec<Term> = (0..20)
            .map({
                let mut g = KernelGen::new(3);
                move |_| g.closed_bool()
            })
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn cbpv_samples_are_closed_fbool() {
        let mut g = CbpvGen::new(5);
        let mut nontrivial = 0;
        for _ in 0..500 {
            let m = g.closed_fbool();
            cbpv_check(
                &Vec::new(),
                &CbpvTerm::Comp(m.clone()),
                &CbpvType::Comp(CType::f_bool()),
            )
            .unwrap_or_else(|e| panic!("{m:?}: {e}"));
            if m.size() > 3 {
                nontrivial += 1;
            }
        }
        assert!(nontrivial > 250, "{nontrivial}");
    }
}
