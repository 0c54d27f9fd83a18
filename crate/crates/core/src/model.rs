//! Computable canonicity model for the kernel.
//!
//! Types are interpreted as [`SemType`]s and terms as [`SemProof`]s. Every
//! proof tracks the closed term it is about, and each interpretation step
//! audits the tracked term against the substituted syntax through the
//! conversion checker. Boolean proofs carry a [`Witness`]: a chain of
//! reduction steps from the tracked term to a literal.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::check::{Checker, TypeError, TypedTerm};
use crate::nbe::{EvalError, Nbe, Universe, DEFAULT_FUEL};
use crate::surface::stc::print_term;
use crate::syntax::{alpha_eq, instantiate, subst, Context, Term};

/// The syntactic phase. It is uninhabited while the model runs, so the
/// collapsing branch of closed-modal evidence is dead code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Syn {}

/// Closed-modal evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Closed<T> {
    Eta(T),
    Star(Syn),
}

impl<T> Closed<T> {
    pub fn get(&self) -> &T {
        match self {
            Closed::Eta(t) => t,
            Closed::Star(z) => match *z {},
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolCase {
    pub tag: bool,
    pub witness: Witness,
}

/// Evaluation context of a congruence step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Frame {
    IfScrutinee { motive: Term, tbranch: Term, fbranch: Term },
}

impl Frame {
    pub fn plug(&self, t: Term) -> Term {
        match self {
            Frame::IfScrutinee {
                motive,
                tbranch,
                fbranch,
            } => Term::if_(motive.clone(), t, tbranch.clone(), fbranch.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// Bare conversion, justified by normal forms alone.
    Conv,
    IfBeta1,
    IfBeta2,
    PiBeta,
    Congruence {
        frame: Frame,
        inner: Box<Witness>,
    },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Conv => "conv",
            Rule::IfBeta1 => "if_beta1",
            Rule::IfBeta2 => "if_beta2",
            Rule::PiBeta => "pi_beta",
            Rule::Congruence { .. } => "congruence",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub lhs: Term,
    pub rhs: Term,
}

/// A replayable chain `start ≡ … ≡ end` of closed terms at type `at`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub at: Term,
    pub start: Term,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub rule: &'static str,
    pub depth: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("step {index} does not start where the chain left off")]
    Broken { index: usize },
    #[error("step {index} is not an instance of {rule}")]
    RuleMismatch { index: usize, rule: &'static str },
    #[error("step {index} relates inconvertible terms")]
    NotConvertible { index: usize },
    #[error("the chain does not conclude with a convertible literal")]
    Conclusion,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

impl Witness {
    pub fn refl(at: Term, t: Term) -> Self {
        Witness {
            at,
            start: t,
            steps: Vec::new(),
        }
    }

    pub fn end(&self) -> &Term {
        self.steps.last().map_or(&self.start, |s| &s.rhs)
    }

    /// Total number of steps, counting congruence sub-chains.
    pub fn len(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match &s.rule {
                Rule::Congruence { inner, .. } => 1 + inner.len(),
                _ => 1,
            })
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks every step structurally and by normal forms, without
    /// re-checking the types of intermediate terms.
    pub fn replay_steps(&self, nbe: &Nbe) -> Result<(), WitnessError> {
        let mut cur = &self.start;
        for (index, step) in self.steps.iter().enumerate() {
            if !alpha_eq(cur, &step.lhs) {
                return Err(WitnessError::Broken { index });
            }
            let shaped = match &step.rule {
                Rule::Conv => true,
                Rule::IfBeta1 | Rule::IfBeta2 => match &step.lhs {
                    Term::If {
                        scrutinee,
                        tbranch,
                        fbranch,
                        ..
                    } => {
                        let first = step.rule == Rule::IfBeta1;
                        let lit = if first { Term::True } else { Term::False };
                        let branch = if first { tbranch } else { fbranch };
                        **scrutinee == lit && alpha_eq(branch, &step.rhs)
                    }
                    _ => false,
                },
                Rule::PiBeta => match &step.lhs {
                    Term::App(f, a) => match &**f {
                        Term::Lam(body) => alpha_eq(&subst(body, 0, a), &step.rhs),
                        _ => false,
                    },
                    _ => false,
                },
                Rule::Congruence { frame, inner } => {
                    inner.replay_steps(nbe)?;
                    alpha_eq(&frame.plug(inner.start.clone()), &step.lhs)
                        && alpha_eq(&frame.plug(inner.end().clone()), &step.rhs)
                }
            };
            if !shaped {
                return Err(WitnessError::RuleMismatch {
                    index,
                    rule: step.rule.name(),
                });
            }
            if !nbe.conv(&[], &self.at, &step.lhs, &step.rhs)? {
                return Err(WitnessError::NotConvertible { index });
            }
            cur = &step.rhs;
        }
        Ok(())
    }

    /// Full replay: every step, then the conclusion `start ≡ end : at` through
    /// the checked conversion judgment.
    pub fn replay(&self, fuel: u64) -> Result<(), WitnessError> {
        self.replay_steps(&Nbe::new(fuel))?;
        let checker = Checker::new(Nbe::new(fuel));
        if checker.convertible(&Context::empty(), &self.at, &self.start, self.end())? {
            Ok(())
        } else {
            Err(WitnessError::Conclusion)
        }
    }

    pub fn trace(&self) -> Vec<TraceStep> {
        let mut out = Vec::new();
        self.trace_into(0, &mut out);
        out
    }

    fn trace_into(&self, depth: usize, out: &mut Vec<TraceStep>) {
        for step in &self.steps {
            out.push(TraceStep {
                rule: step.rule.name(),
                depth,
                lhs: print_term(&step.lhs, &[]),
                rhs: print_term(&step.rhs, &[]),
            });
            if let Rule::Congruence { inner, .. } = &step.rule {
                inner.trace_into(depth + 1, out);
            }
        }
    }
}

pub type SemEnv = Vec<(Term, SemProof)>;

fn env_terms(env: &SemEnv) -> Vec<Term> {
    env.iter().map(|(t, _)| t.clone()).collect()
}

/// A type family over an interpreted domain: `body` lives under `ctx`
/// extended by `dom`.
#[derive(Clone, Debug)]
pub struct Family {
    pub ctx: Context,
    pub env: SemEnv,
    pub dom: Term,
    pub body: Term,
}

#[derive(Clone, Debug)]
pub enum SemKind {
    Bool,
    Universe(Universe),
    Pi { dom: Arc<SemType>, cod: Family },
}

/// An interpreted type: its closed normal code and the shape of its proofs.
#[derive(Clone, Debug)]
pub struct SemType {
    pub code: Term,
    pub kind: SemKind,
}

/// The body of an interpreted lambda, closed over a semantic environment.
#[derive(Clone, Debug)]
pub struct LamClosure {
    pub ctx: Context,
    pub env: SemEnv,
    pub dom: Term,
    pub cod: Term,
    pub body: Term,
    /// The closed lambda the closure came from.
    pub lam: Term,
}

#[derive(Clone, Debug)]
pub enum SemProof {
    Bool {
        tracked: Term,
        evidence: Closed<BoolCase>,
    },
    Fun {
        tracked: Term,
        code: Term,
        closure: Arc<LamClosure>,
    },
    Code {
        tracked: Term,
        sem: Arc<SemType>,
    },
}

impl SemProof {
    pub fn literal(tag: bool) -> Self {
        let t = Term::bool_lit(tag);
        SemProof::Bool {
            tracked: t.clone(),
            evidence: Closed::Eta(BoolCase {
                tag,
                witness: Witness::refl(Term::Bool, t),
            }),
        }
    }

    pub fn tracked(&self) -> &Term {
        match self {
            SemProof::Bool { tracked, .. } | SemProof::Fun { tracked, .. } | SemProof::Code { tracked, .. } => tracked,
        }
    }

    pub fn as_bool(&self) -> Option<&BoolCase> {
        match self {
            SemProof::Bool { evidence, .. } => Some(evidence.get()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("section violation: interpretation tracks {} where {} was expected", print_term(.found, &[]), print_term(.expected, &[]))]
    SectionViolation { expected: Term, found: Term },
    #[error("ill-shaped interpretation: {0}")]
    Shape(&'static str),
}

impl ModelError {
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::Type(e) => e.code(),
            ModelError::Eval(_) => "eval",
            ModelError::SectionViolation { .. } => "section_violation",
            ModelError::Shape(_) => "shape",
        }
    }
}

/// Interpretations of the signature constants. The defaults are the
/// standard model; overriding one yields a deliberately broken model.
pub trait Constants {
    fn true_(&self) -> SemProof {
        SemProof::literal(true)
    }

    fn false_(&self) -> SemProof {
        SemProof::literal(false)
    }

    fn bool_(&self) -> SemType {
        SemType {
            code: Term::Bool,
            kind: SemKind::Bool,
        }
    }

    fn universe(&self, u: Universe) -> SemType {
        SemType {
            code: u.to_term(),
            kind: SemKind::Universe(u),
        }
    }

    fn pi(&self, code: Term, dom: SemType, cod: Family) -> SemType {
        SemType {
            code,
            kind: SemKind::Pi {
                dom: Arc::new(dom),
                cod,
            },
        }
    }

    fn lam(&self, code: Term, closure: LamClosure) -> SemProof {
        SemProof::Fun {
            tracked: closure.lam.clone(),
            code,
            closure: Arc::new(closure),
        }
    }

    fn app(&self, model: &Model<Self>, f: &SemProof, arg: Term, parg: SemProof) -> Result<SemProof, ModelError>
    where
        Self: Sized,
    {
        model.beta(f, arg, parg)
    }

    /// Case analysis on boolean evidence: which branch to take.
    fn if_(&self, scrutinee: &SemProof) -> Result<bool, ModelError> {
        scrutinee
            .as_bool()
            .map(|case| case.tag)
            .ok_or(ModelError::Shape("if scrutinee is not boolean evidence"))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Standard;

impl Constants for Standard {}

pub struct Model<C = Standard> {
    constants: C,
    fuel: u64,
}

impl Default for Model<Standard> {
    fn default() -> Self {
        Model::new(DEFAULT_FUEL)
    }
}

impl Model<Standard> {
    pub fn new(fuel: u64) -> Self {
        Model {
            constants: Standard,
            fuel,
        }
    }
}

/// Result of canonicity extraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canon {
    pub term: Term,
    pub tag: bool,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackingReport {
    pub ok: bool,
    /// `(expected, found)` when a tracked term drifted from the syntax.
    pub failing: Option<(Term, Term)>,
    pub error: Option<String>,
}

impl<C: Constants> Model<C> {
    pub fn with_constants(constants: C, fuel: u64) -> Self {
        Model { constants, fuel }
    }

    pub fn fuel(&self) -> u64 {
        self.fuel
    }

    fn checker(&self) -> Checker {
        Checker::new(Nbe::new(self.fuel))
    }

    fn closed_type(&self, at: &Term, terms: &[Term]) -> Result<Term, ModelError> {
        Ok(self
            .checker()
            .normalize_type(&Context::empty(), &instantiate(at, terms))?)
    }

    fn conv(&self, at: &Term, t1: &Term, t2: &Term) -> Result<bool, ModelError> {
        if alpha_eq(t1, t2) {
            return Ok(true);
        }
        Ok(Nbe::new(self.fuel).conv(&[], at, t1, t2)?)
    }

    pub fn interp_type(&self, ctx: &Context, ty: &Term, env: &SemEnv) -> Result<SemType, ModelError> {
        let c = &self.constants;
        match ty {
            Term::Bool => Ok(c.bool_()),
            Term::Tp => Ok(c.universe(Universe::Tp)),
            Term::U0 => Ok(c.universe(Universe::U0)),
            Term::U1 => Ok(c.universe(Universe::U1)),
            Term::Tm(a) => self.interp_type(ctx, a, env),
            Term::Pi(dom, cod) => {
                let sdom = self.interp_type(ctx, dom, env)?;
                let code = self.closed_type(ty, &env_terms(env))?;
                let family = Family {
                    ctx: ctx.clone(),
                    env: env.clone(),
                    dom: (**dom).clone(),
                    body: (**cod).clone(),
                };
                Ok(c.pi(code, sdom, family))
            }
            Term::If {
                scrutinee,
                tbranch,
                fbranch,
                ..
            } => {
                let pb = self.interp_term(ctx, scrutinee, &Term::Bool, env)?;
                let branch = if c.if_(&pb)? { tbranch } else { fbranch };
                self.interp_type(ctx, branch, env)
            }
            _ => {
                let sort = self.checker().check_type(ctx, ty)?;
                let crate::check::Sort::In(u) = sort else {
                    return Err(ModelError::Shape("large type in neutral position"));
                };
                match self.interp_term(ctx, ty, &u.to_term(), env)? {
                    SemProof::Code { sem, .. } => Ok((*sem).clone()),
                    _ => Err(ModelError::Shape("type did not interpret as a code")),
                }
            }
        }
    }

    /// Interprets `t : at` under `env`, then audits the tracked term against
    /// `t[env]`.
    pub fn interp_term(&self, ctx: &Context, t: &Term, at: &Term, env: &SemEnv) -> Result<SemProof, ModelError> {
        let terms = env_terms(env);
        let expected = instantiate(t, &terms);
        let cat = self.closed_type(at, &terms)?;
        let p = self.interp_node(ctx, t, at, env, &terms, &cat)?;
        if !self.conv(&cat, p.tracked(), &expected)? {
            return Err(ModelError::SectionViolation {
                expected,
                found: p.tracked().clone(),
            });
        }
        Ok(p)
    }

    fn interp_node(
        &self,
        ctx: &Context,
        t: &Term,
        at: &Term,
        env: &SemEnv,
        terms: &[Term],
        cat: &Term,
    ) -> Result<SemProof, ModelError> {
        let c = &self.constants;
        match t {
            Term::Var(i) => {
                let n = env.len();
                if *i >= n {
                    return Err(ModelError::Shape("variable outside the environment"));
                }
                Ok(env[n - 1 - i].1.clone())
            }
            Term::True => Ok(c.true_()),
            Term::False => Ok(c.false_()),
            Term::Bool | Term::Tp | Term::U0 | Term::U1 | Term::Tm(_) | Term::Pi(..) => Ok(SemProof::Code {
                tracked: instantiate(t, terms),
                sem: Arc::new(self.interp_type(ctx, t, env)?),
            }),
            Term::Lam(body) => {
                let Term::Pi(dom, cod) = self.checker().normalize_type(ctx, at)? else {
                    return Err(ModelError::Shape("lambda at a non-function type"));
                };
                let closure = LamClosure {
                    ctx: ctx.clone(),
                    env: env.clone(),
                    dom: (*dom).clone(),
                    cod: (*cod).clone(),
                    body: (**body).clone(),
                    lam: instantiate(t, terms),
                };
                Ok(c.lam(cat.clone(), closure))
            }
            Term::App(f, a) => {
                let fty = self.checker().head_type(ctx, f, a, at)?;
                let Term::Pi(dom, _) = &fty else {
                    return Err(ModelError::Shape("head type is not a function type"));
                };
                let pf = self.interp_term(ctx, f, &fty, env)?;
                let pa = self.interp_term(ctx, a, dom, env)?;
                c.app(self, &pf, instantiate(a, terms), pa)
            }
            Term::If {
                motive,
                scrutinee,
                tbranch,
                fbranch,
            } => {
                let pb = self.interp_term(ctx, scrutinee, &Term::Bool, env)?;
                let tag = c.if_(&pb)?;
                let branch = if tag { tbranch } else { fbranch };
                let bat = subst(motive, 0, &Term::bool_lit(tag));
                let pbr = self.interp_term(ctx, branch, &bat, env)?;
                let wb = &pb
                    .as_bool()
                    .ok_or(ModelError::Shape("if scrutinee is not boolean evidence"))?
                    .witness;
                let Term::If {
                    motive,
                    tbranch,
                    fbranch,
                    ..
                } = instantiate(t, terms)
                else {
                    unreachable!("instantiation preserves the head constructor")
                };
                let frame = Frame::IfScrutinee {
                    motive: (*motive).clone(),
                    tbranch: (*tbranch).clone(),
                    fbranch: (*fbranch).clone(),
                };
                let tracked = frame.plug(pb.tracked().clone());
                let mut steps = Vec::new();
                if !wb.is_empty() {
                    steps.push(Step {
                        rule: Rule::Congruence {
                            frame: frame.clone(),
                            inner: Box::new(wb.clone()),
                        },
                        lhs: tracked.clone(),
                        rhs: frame.plug(wb.end().clone()),
                    });
                }
                steps.push(Step {
                    rule: if tag { Rule::IfBeta1 } else { Rule::IfBeta2 },
                    lhs: frame.plug(Term::bool_lit(tag)),
                    rhs: pbr.tracked().clone(),
                });
                self.retrack(pbr, tracked, steps, cat)
            }
        }
    }

    /// Moves a proof of `p.tracked()` to a proof of `tracked`, given steps
    /// from `tracked` to `p.tracked()`. The move is audited.
    pub fn retrack(&self, p: SemProof, tracked: Term, steps: Vec<Step>, at: &Term) -> Result<SemProof, ModelError> {
        if !self.conv(at, &tracked, p.tracked())? {
            return Err(ModelError::SectionViolation {
                expected: tracked,
                found: p.tracked().clone(),
            });
        }
        Ok(match p {
            SemProof::Bool { evidence, .. } => {
                let case = evidence.get();
                let mut all = steps;
                all.extend(case.witness.steps.iter().cloned());
                SemProof::Bool {
                    tracked: tracked.clone(),
                    evidence: Closed::Eta(BoolCase {
                        tag: case.tag,
                        witness: Witness {
                            at: at.clone(),
                            start: tracked,
                            steps: all,
                        },
                    }),
                }
            }
            SemProof::Fun { code, closure, .. } => SemProof::Fun { tracked, code, closure },
            SemProof::Code { sem, .. } => SemProof::Code { tracked, sem },
        })
    }

    /// Applies a function proof to an argument and its proof. The result
    /// tracks `App(f.tracked(), arg)`.
    pub fn beta(&self, f: &SemProof, arg: Term, parg: SemProof) -> Result<SemProof, ModelError> {
        let SemProof::Fun { tracked, closure, .. } = f else {
            return Err(ModelError::Shape("applied proof is not a function"));
        };
        let mut env = closure.env.clone();
        env.push((arg.clone(), parg));
        let terms = env_terms(&env);
        let ctx = closure.ctx.extended("x", closure.dom.clone());
        let p = self.interp_term(&ctx, &closure.body, &closure.cod, &env)?;
        let cat = self.closed_type(&closure.cod, &terms)?;
        let redex = Term::app(closure.lam.clone(), arg.clone());
        let reduct = p.tracked().clone();
        let p = self.retrack(
            p,
            redex.clone(),
            vec![Step {
                rule: Rule::PiBeta,
                lhs: redex.clone(),
                rhs: reduct,
            }],
            &cat,
        )?;
        if alpha_eq(tracked, &closure.lam) {
            return Ok(p);
        }
        let target = Term::app(tracked.clone(), arg);
        self.retrack(
            p,
            target.clone(),
            vec![Step {
                rule: Rule::Conv,
                lhs: target,
                rhs: redex,
            }],
            &cat,
        )
    }

    pub fn apply(&self, f: &SemProof, arg: Term, parg: SemProof) -> Result<SemProof, ModelError> {
        self.constants.app(self, f, arg, parg)
    }

    /// Whether `p` is a proof about the closed term `t` in the family of `ty`.
    /// Comparison is by normal forms, so it is stable under conversion.
    pub fn admits(&self, ty: &SemType, t: &Term, p: &SemProof) -> Result<bool, ModelError> {
        Ok(match (&ty.kind, p) {
            (SemKind::Bool, SemProof::Bool { tracked, evidence }) => {
                let case = evidence.get();
                self.conv(&Term::Bool, tracked, t)? && self.conv(&Term::Bool, t, &Term::bool_lit(case.tag))?
            }
            (SemKind::Universe(_), SemProof::Code { tracked, sem }) => {
                let key = self.closed_type(t, &[])?;
                alpha_eq(&key, &sem.code) && self.conv(&ty.code, tracked, t)?
            }
            (SemKind::Pi { .. }, SemProof::Fun { tracked, code, .. }) => {
                alpha_eq(code, &ty.code) && self.conv(&ty.code, tracked, t)?
            }
            _ => false,
        })
    }

    /// Canonical form of a closed boolean term, with its witness.
    pub fn canonical(&self, t: &Term) -> Result<Canon, ModelError> {
        self.checker().check_closed_bool(t)?;
        let p = self.interp_term(&Context::empty(), t, &Term::Bool, &Vec::new())?;
        let case = p
            .as_bool()
            .ok_or(ModelError::Shape("boolean term without boolean evidence"))?;
        Ok(Canon {
            term: t.clone(),
            tag: case.tag,
            witness: case.witness.clone(),
        })
    }

    /// Audits a typed closed term: interpretation must track it at every
    /// node, and the root proof must belong to the interpreted type.
    pub fn verify_tracking(&self, typed: &TypedTerm) -> TrackingReport {
        let fail = |failing, error: String| TrackingReport {
            ok: false,
            failing,
            error: Some(error),
        };
        if !typed.context.is_empty() {
            return fail(None, "context is not closed".into());
        }
        let empty = Context::empty();
        let run = || -> Result<bool, ModelError> {
            let p = self.interp_term(&empty, &typed.term, &typed.ty, &Vec::new())?;
            let sem = self.interp_type(&empty, &typed.ty, &Vec::new())?;
            self.admits(&sem, &typed.term, &p)
        };
        match run() {
            Ok(true) => TrackingReport {
                ok: true,
                failing: None,
                error: None,
            },
            Ok(false) => fail(None, "root proof is outside the interpreted type".into()),
            Err(ModelError::SectionViolation { expected, found }) => {
                let msg = format!(
                    "tracked {} where {} was expected",
                    print_term(&found, &[]),
                    print_term(&expected, &[])
                );
                fail(Some((expected, found)), msg)
            }
            Err(e) => fail(None, e.to_string()),
        }
    }
}

/// Outcome of interpreting both sides of a closed equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub holds: bool,
    /// Tags of the saturated sides, when they reach `bool`.
    pub tags: Option<(bool, bool)>,
    /// Rules used by the left-hand witness, outermost first.
    pub rules: Vec<&'static str>,
    pub detail: Option<String>,
}

impl<C: Constants> Model<C> {
    /// Interprets `lhs` and `rhs` at the closed type `at` and compares the
    /// evidence: both proofs must lie in the interpreted type; after applying
    /// both to `probes`, boolean evidence must agree on its tag and both
    /// witnesses must replay.
    pub fn equate(&self, at: &Term, lhs: &Term, rhs: &Term, probes: &[Term]) -> Result<Agreement, ModelError> {
        let empty = Context::empty();
        let refuted = |detail: String| Agreement {
            holds: false,
            tags: None,
            rules: Vec::new(),
            detail: Some(detail),
        };
        // Applied sides are annotated so that every saturated term infers.
        let side = |t: &Term| {
            if probes.is_empty() {
                t.clone()
            } else {
                Term::annot(at.clone(), t.clone())
            }
        };
        let (lhs, rhs) = (&side(lhs), &side(rhs));
        let sem = self.interp_type(&empty, at, &Vec::new())?;
        let mut pl = self.interp_term(&empty, lhs, at, &Vec::new())?;
        let mut pr = self.interp_term(&empty, rhs, at, &Vec::new())?;
        if !self.admits(&sem, lhs, &pl)? || !self.admits(&sem, rhs, &pr)? {
            return Ok(refuted("a side is outside the interpreted type".into()));
        }
        let mut ty = at.clone();
        for probe in probes {
            let Term::Pi(dom, cod) = self.checker().normalize_type(&empty, &ty)? else {
                return Ok(refuted(format!("cannot apply a proof at {}", print_term(&ty, &[]))));
            };
            let pp = self.interp_term(&empty, probe, &dom, &Vec::new())?;
            pl = self.apply(&pl, probe.clone(), pp.clone())?;
            pr = self.apply(&pr, probe.clone(), pp)?;
            ty = instantiate(&cod, std::slice::from_ref(probe));
        }
        if self.checker().normalize_type(&empty, &ty)? != Term::Bool {
            return Ok(Agreement {
                holds: true,
                tags: None,
                rules: Vec::new(),
                detail: None,
            });
        }
        let (Some(l), Some(r)) = (pl.as_bool(), pr.as_bool()) else {
            return Err(ModelError::Shape("boolean type without boolean evidence"));
        };
        for w in [&l.witness, &r.witness] {
            if let Err(e) = w.replay(self.fuel) {
                return Ok(refuted(e.to_string()));
            }
        }
        Ok(Agreement {
            holds: l.tag == r.tag,
            tags: Some((l.tag, r.tag)),
            rules: l.witness.trace().into_iter().map(|s| s.rule).collect(),
            detail: (l.tag != r.tag).then(|| format!("tags differ: {} and {}", l.tag, r.tag)),
        })
    }
}

pub fn extract_canonical(t: &Term, fuel: u64) -> Result<Canon, ModelError> {
    Model::new(fuel).canonical(t)
}

pub fn verify_tracking(typed: &TypedTerm, fuel: u64) -> TrackingReport {
    Model::new(fuel).verify_tracking(typed)
}

impl Canon {
    /// Replays the witness and checks that it runs from the term to the
    /// literal named by the tag.
    pub fn replay(&self, fuel: u64) -> Result<(), WitnessError> {
        if !alpha_eq(&self.witness.start, &self.term) || *self.witness.end() != Term::bool_lit(self.tag) {
            return Err(WitnessError::Conclusion);
        }
        self.witness.replay(fuel)
    }
}

impl fmt::Display for Canon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ≡ {}", print_term(&self.term, &[]), self.tag)
    }
}
