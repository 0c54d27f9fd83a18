//! Two-world Kripke logical relation for the CBPV fragment.
//!
//! Evidence is indexed by a world: at `Top` a returner carries its exact
//! cost, at `Beh` cost is quotiented away. `Step` acts on evidence through
//! the cost algebra: it adds to the cost of a returner and is deferred to
//! the result of a function.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::check::{cbpv_check, CbpvContext, CbpvError};
use super::eval::{normalize, CbpvEvalError};
use super::syntax::{instantiate_comp, CType, CbpvTerm, CbpvType, Comp, VType, Val};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum World {
    Beh,
    Top,
}

impl World {
    pub const ALL: [World; 2] = [World::Beh, World::Top];
}

/// Claims `lhs ≡ stepᶜ(ret value)` at `Top`, or `lhs ≡ ret value` modulo
/// `step m = m` at `Beh`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CalfWitness {
    pub world: World,
    pub lhs: Comp,
    pub cost: Option<u64>,
    pub value: Val,
}

impl CalfWitness {
    pub fn rhs(&self) -> Comp {
        Comp::steps(self.cost.unwrap_or(0), Comp::ret(self.value.clone()))
    }

    /// Replays the claim with the big-step normalizer.
    pub fn replay(&self, fuel: u64) -> Result<bool, CbpvEvalError> {
        match self.world {
            World::Top => {
                let Some(cost) = self.cost else {
                    return Ok(false);
                };
                let l = normalize(&self.lhs, fuel)?;
                let r = normalize(&self.rhs(), fuel)?;
                Ok(l == r && l == (cost, Comp::ret(self.value.clone())))
            }
            World::Beh => {
                if self.cost.is_some() {
                    return Ok(false);
                }
                let l = normalize(&self.lhs.erase_steps(), fuel)?;
                Ok(l == (0, Comp::ret(self.value.erase_steps())))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum ValProof {
    Bool(bool),
    /// Evidence for the forced computation.
    Thunk(Box<KripkeProof>),
}

/// A closed value paired with its evidence.
pub type KEnv = Vec<(Val, ValProof)>;

#[derive(Clone, Debug)]
pub enum KripkeProof {
    Ret {
        world: World,
        track: Comp,
        cost: Option<u64>,
        value: Val,
        vproof: Box<ValProof>,
        witness: CalfWitness,
    },
    Fun {
        world: World,
        track: Comp,
        env: Arc<KEnv>,
        body: Arc<Comp>,
        /// Cost deferred to every result.
        charge: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error(transparent)]
    Check(#[from] CbpvError),
    #[error(transparent)]
    Eval(#[from] CbpvEvalError),
    #[error("tracking audit failed: produced {found:?} for {expected:?}")]
    SectionViolation { expected: Comp, found: Comp },
    #[error("evidence of the wrong shape: {0}")]
    Shape(&'static str),
    #[error("cannot use evidence from world {from:?} at world {at:?}")]
    WorldOrder { from: World, at: World },
}

impl KripkeProof {
    pub fn world(&self) -> World {
        match self {
            KripkeProof::Ret { world, .. } | KripkeProof::Fun { world, .. } => *world,
        }
    }

    pub fn track(&self) -> &Comp {
        match self {
            KripkeProof::Ret { track, .. } | KripkeProof::Fun { track, .. } => track,
        }
    }

    /// The cost algebra: `n` steps followed by this computation, now
    /// tracking `track`.
    fn charge(self, n: u64, track: Comp) -> KripkeProof {
        match self {
            KripkeProof::Ret {
                world,
                cost,
                value,
                vproof,
                ..
            } => {
                let cost = cost.map(|c| c + n);
                KripkeProof::Ret {
                    world,
                    witness: CalfWitness {
                        world,
                        lhs: track.clone(),
                        cost,
                        value: value.clone(),
                    },
                    track,
                    cost,
                    value,
                    vproof,
                }
            }
            KripkeProof::Fun {
                world,
                env,
                body,
                charge,
                ..
            } => KripkeProof::Fun {
                world,
                track,
                env,
                body,
                charge: if world == World::Top { charge + n } else { 0 },
            },
        }
    }

    /// Restriction along `Beh ≤ Top`.
    pub fn restrict(&self) -> KripkeProof {
        match self {
            KripkeProof::Ret {
                track, value, vproof, ..
            } => KripkeProof::Ret {
                world: World::Beh,
                track: track.clone(),
                cost: None,
                value: value.clone(),
                vproof: Box::new(vproof.restrict()),
                witness: CalfWitness {
                    world: World::Beh,
                    lhs: track.clone(),
                    cost: None,
                    value: value.clone(),
                },
            },
            KripkeProof::Fun { track, env, body, .. } => KripkeProof::Fun {
                world: World::Beh,
                track: track.clone(),
                env: Arc::new(restrict_env(env)),
                body: body.clone(),
                charge: 0,
            },
        }
    }
}

impl ValProof {
    pub fn restrict(&self) -> ValProof {
        match self {
            ValProof::Bool(b) => ValProof::Bool(*b),
            ValProof::Thunk(p) => ValProof::Thunk(Box::new(p.restrict())),
        }
    }
}

fn restrict_env(env: &KEnv) -> KEnv {
    env.iter().map(|(v, p)| (v.clone(), p.restrict())).collect()
}

/// Interprets terms at one world.
pub struct Kripke {
    pub world: World,
    pub fuel: u64,
}

impl Kripke {
    pub fn new(world: World) -> Self {
        Kripke {
            world,
            fuel: super::eval::DEFAULT_CBPV_FUEL,
        }
    }

    fn closed_vals(env: &KEnv) -> Vec<Val> {
        env.iter().map(|(v, _)| v.clone()).collect()
    }

    pub fn interp_val(&self, v: &Val, env: &KEnv) -> Result<(Val, ValProof), KripkeError> {
        match v {
            Val::Var(i) => env
                .len()
                .checked_sub(i + 1)
                .map(|l| env[l].clone())
                .ok_or(KripkeError::Shape("unbound variable")),
            Val::True => Ok((Val::True, ValProof::Bool(true))),
            Val::False => Ok((Val::False, ValProof::Bool(false))),
            Val::Thunk(m) => {
                let p = self.interp(m, env)?;
                let closed = Val::thunk(instantiate_comp(m, &Self::closed_vals(env), 0));
                Ok((closed, ValProof::Thunk(Box::new(p))))
            }
        }
    }

    /// The fundamental lemma: evidence for `m` under `env`, audited against
    /// the substituted term.
    pub fn interp(&self, m: &Comp, env: &KEnv) -> Result<KripkeProof, KripkeError> {
        let p = self.interp_inner(m, env)?;
        let expected = instantiate_comp(m, &Self::closed_vals(env), 0);
        if *p.track() != expected {
            return Err(KripkeError::SectionViolation {
                expected,
                found: p.track().clone(),
            });
        }
        Ok(p)
    }

    fn interp_inner(&self, m: &Comp, env: &KEnv) -> Result<KripkeProof, KripkeError> {
        let world = self.world;
        match m {
            Comp::Ret(v) => {
                let (value, vproof) = self.interp_val(v, env)?;
                let cost = (world == World::Top).then_some(0);
                let track = Comp::ret(value.clone());
                Ok(KripkeProof::Ret {
                    world,
                    witness: CalfWitness {
                        world,
                        lhs: track.clone(),
                        cost,
                        value: value.clone(),
                    },
                    track,
                    cost,
                    value,
                    vproof: Box::new(vproof),
                })
            }
            Comp::Step(inner) => {
                let p = self.interp(inner, env)?;
                let track = Comp::step(p.track().clone());
                Ok(p.charge(1, track))
            }
            Comp::Bind(first, then) => {
                let pm = self.interp(first, env)?;
                let KripkeProof::Ret {
                    cost, value, vproof, ..
                } = &pm
                else {
                    return Err(KripkeError::Shape("bind on a function"));
                };
                let mut inner = env.clone();
                inner.push((value.clone(), (**vproof).clone()));
                let pn = self.interp(then, &inner)?;
                let track = Comp::bind(pm.track().clone(), instantiate_comp(then, &Self::closed_vals(env), 1));
                Ok(pn.charge(cost.unwrap_or(0), track))
            }
            Comp::Force(v) => {
                let (value, vproof) = self.interp_val(v, env)?;
                match vproof {
                    ValProof::Thunk(p) => Ok(p.charge(0, Comp::force(value))),
                    ValProof::Bool(_) => Err(KripkeError::Shape("force of a boolean")),
                }
            }
            Comp::Lam(body) => Ok(KripkeProof::Fun {
                world,
                track: instantiate_comp(m, &Self::closed_vals(env), 0),
                env: Arc::new(env.clone()),
                body: body.clone(),
                charge: 0,
            }),
            Comp::App(f, v) => {
                let pf = self.interp(f, env)?;
                let (value, vproof) = self.interp_val(v, env)?;
                self.apply(&pf, value, vproof)
            }
            Comp::If(v, t, e) => {
                let (value, vproof) = self.interp_val(v, env)?;
                let ValProof::Bool(b) = vproof else {
                    return Err(KripkeError::Shape("if on a thunk"));
                };
                let p = self.interp(if b { t } else { e }, env)?;
                let vals = Self::closed_vals(env);
                let track = Comp::if_(value, instantiate_comp(t, &vals, 0), instantiate_comp(e, &vals, 0));
                Ok(p.charge(0, track))
            }
        }
    }

    /// Applies function evidence at this interpreter's world, which must lie
    /// below the evidence's own world.
    pub fn apply(&self, f: &KripkeProof, arg: Val, parg: ValProof) -> Result<KripkeProof, KripkeError> {
        let KripkeProof::Fun {
            world,
            track,
            env,
            body,
            charge,
        } = f
        else {
            return Err(KripkeError::Shape("application of a returner"));
        };
        if self.world > *world {
            return Err(KripkeError::WorldOrder {
                from: *world,
                at: self.world,
            });
        }
        let (mut inner, charge) = if self.world < *world {
            (restrict_env(env), 0)
        } else {
            ((**env).clone(), *charge)
        };
        inner.push((arg.clone(), parg));
        let p = self.interp(body, &inner)?;
        Ok(p.charge(charge, Comp::app(track.clone(), arg)))
    }

    /// Checks that `p` inhabits the relation at `at`: witnesses replay, and
    /// function evidence maps every boolean argument to valid evidence.
    pub fn inhabits(&self, p: &KripkeProof, at: &CType) -> Result<bool, KripkeError> {
        match (p, at) {
            (
                KripkeProof::Ret {
                    world,
                    track,
                    cost,
                    witness,
                    vproof,
                    ..
                },
                CType::F(a),
            ) => Ok(*world == self.world
                && witness.lhs == *track
                && witness.cost == *cost
                && witness.replay(self.fuel)?
                && self.val_inhabits(vproof, a)?),
            (KripkeProof::Fun { world, .. }, CType::Arrow(a, x)) => {
                if *world != self.world {
                    return Ok(false);
                }
                match &**a {
                    VType::Bool => {
                        for b in [true, false] {
                            let r = self.apply(p, Val::bool_lit(b), ValProof::Bool(b))?;
                            if !self.inhabits(&r, x)? {
                                return Ok(false);
                            }
                        }
                        Ok(true)
                    }
                    VType::U(_) => Ok(true),
                }
            }
            _ => Ok(false),
        }
    }

    fn val_inhabits(&self, p: &ValProof, a: &VType) -> Result<bool, KripkeError> {
        match (p, a) {
            (ValProof::Bool(_), VType::Bool) => Ok(true),
            (ValProof::Thunk(q), VType::U(x)) => self.inhabits(q, x),
            _ => Ok(false),
        }
    }
}

/// Result of cost-aware canonicity for a closed `F bool` computation.
#[derive(Clone, Debug)]
pub struct CostResult {
    pub cost: u64,
    pub tag: bool,
    pub top: KripkeProof,
    pub beh: KripkeProof,
    pub top_ok: bool,
    pub beh_ok: bool,
    /// The restriction of the top evidence agrees with the beh evidence.
    pub monotone_ok: bool,
}

impl CostResult {
    pub fn top_witness(&self) -> &CalfWitness {
        match &self.top {
            KripkeProof::Ret { witness, .. } => witness,
            KripkeProof::Fun { .. } => unreachable!("F bool evidence is a returner"),
        }
    }

    pub fn beh_witness(&self) -> &CalfWitness {
        match &self.beh {
            KripkeProof::Ret { witness, .. } => witness,
            KripkeProof::Fun { .. } => unreachable!("F bool evidence is a returner"),
        }
    }
}

fn bool_evidence(p: &KripkeProof) -> Result<(Option<u64>, bool), KripkeError> {
    match p {
        KripkeProof::Ret { cost, vproof, .. } => match **vproof {
            ValProof::Bool(b) => Ok((*cost, b)),
            ValProof::Thunk(_) => Err(KripkeError::Shape("returned a thunk at bool")),
        },
        KripkeProof::Fun { .. } => Err(KripkeError::Shape("function at F bool")),
    }
}

/// Checks `t : at` under `ctx` and interprets it at `world` over `env`,
/// whose entries inhabit the types of `ctx`.
pub fn interp_kripke(
    ctx: &CbpvContext,
    t: &Comp,
    at: &CType,
    world: World,
    env: &KEnv,
) -> Result<KripkeProof, KripkeError> {
    if ctx.len() != env.len() {
        return Err(KripkeError::Shape("environment does not match the context"));
    }
    cbpv_check(ctx, &CbpvTerm::Comp(t.clone()), &CbpvType::Comp(at.clone()))?;
    Kripke::new(world).interp(t, env)
}

pub fn extract_cost(t: &Comp) -> Result<CostResult, KripkeError> {
    extract_cost_with_fuel(t, super::eval::DEFAULT_CBPV_FUEL)
}

pub fn extract_cost_with_fuel(t: &Comp, fuel: u64) -> Result<CostResult, KripkeError> {
    cbpv_check(
        &Vec::new(),
        &CbpvTerm::Comp(t.clone()),
        &CbpvType::Comp(CType::f_bool()),
    )?;
    let at = |world| Kripke { world, fuel };
    let top = at(World::Top).interp(t, &Vec::new())?;
    let beh = at(World::Beh).interp(t, &Vec::new())?;
    let (cost, tag) = bool_evidence(&top)?;
    let (_, beh_tag) = bool_evidence(&beh)?;
    let cost = cost.ok_or(KripkeError::Shape("top evidence without cost"))?;
    let fb = CType::f_bool();
    let top_ok = at(World::Top).inhabits(&top, &fb)?;
    let beh_ok = at(World::Beh).inhabits(&beh, &fb)?;
    let restricted = top.restrict();
    let (_, restricted_tag) = bool_evidence(&restricted)?;
    let monotone_ok = restricted_tag == beh_tag && beh_tag == tag && at(World::Beh).inhabits(&restricted, &fb)?;
    Ok(CostResult {
        cost,
        tag,
        top,
        beh,
        top_ok,
        beh_ok,
        monotone_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::super::eval::{cbpv_eval, DEFAULT_CBPV_FUEL};
    use super::*;

    fn ret(b: bool) -> Comp {
        Comp::ret(Val::bool_lit(b))
    }

    #[test]
    fn extract_examples() {
        let r = extract_cost(&ret(true)).unwrap();
        assert_eq!((r.cost, r.tag), (0, true));
        let r = extract_cost(&Comp::steps(2, ret(false))).unwrap();
        assert_eq!((r.cost, r.tag), (2, false));
        let m = Comp::bind(Comp::step(ret(true)), Comp::step(Comp::ret(Val::Var(0))));
        let r = extract_cost(&m).unwrap();
        assert_eq!((r.cost, r.tag), (2, true));
        assert!(r.top_ok && r.beh_ok && r.monotone_ok);
        let e = cbpv_eval(&m, DEFAULT_CBPV_FUEL).unwrap();
        assert_eq!((e.cost, e.terminal), (r.cost, ret(r.tag)));
    }

    #[test]
    fn beh_evidence_ignores_steps() {
        let p = interp_kripke(
            &Vec::new(),
            &Comp::step(ret(true)),
            &CType::f_bool(),
            World::Beh,
            &Vec::new(),
        )
        .unwrap();
        let KripkeProof::Ret { cost, witness, .. } = &p else {
            panic!("expected a returner");
        };
        assert_eq!(*cost, None);
        assert_eq!(witness.rhs(), ret(true));
        assert!(witness.replay(DEFAULT_CBPV_FUEL).unwrap());
        // Without erasing steps the same claim is false.
        let strict = CalfWitness {
            world: World::Top,
            cost: Some(0),
            ..witness.clone()
        };
        assert!(!strict.replay(DEFAULT_CBPV_FUEL).unwrap());
    }

    #[test]
    fn top_evidence_starts_at_zero() {
        let p = interp_kripke(&Vec::new(), &ret(true), &CType::f_bool(), World::Top, &Vec::new()).unwrap();
        assert!(matches!(p, KripkeProof::Ret { cost: Some(0), .. }));
    }

    #[test]
    fn charges_pass_through_functions() {
        // (step (lam x. step (ret x))) applied to true costs 2.
        let f = Comp::step(Comp::lam(Comp::step(Comp::ret(Val::Var(0)))));
        let m = Comp::app(f.clone(), Val::True);
        let r = extract_cost(&m).unwrap();
        assert_eq!((r.cost, r.tag), (2, true));
        let pf = Kripke::new(World::Top).interp(&f, &Vec::new()).unwrap();
        assert!(Kripke::new(World::Top)
            .inhabits(&pf, &CType::arrow(VType::Bool, CType::f_bool()))
            .unwrap());
        // Top evidence may be used at beh, not the other way round.
        let beh = Kripke::new(World::Beh)
            .apply(&pf, Val::True, ValProof::Bool(true))
            .unwrap();
        assert!(matches!(beh, KripkeProof::Ret { cost: None, .. }));
        let pb = pf.restrict();
        assert!(matches!(
            Kripke::new(World::Top).apply(&pb, Val::True, ValProof::Bool(true)),
            Err(KripkeError::WorldOrder { .. })
        ));
    }

    #[test]
    fn thunks_and_forcing() {
        let th = Val::thunk(Comp::step(ret(false)));
        let m = Comp::bind(Comp::ret(th), Comp::step(Comp::force(Val::Var(0))));
        let r = extract_cost(&m).unwrap();
        assert_eq!((r.cost, r.tag), (2, false));
        assert!(r.top_ok && r.beh_ok && r.monotone_ok);
    }

    #[test]
    fn ill_typed_input_is_rejected() {
        assert!(matches!(
            extract_cost(&Comp::force(Val::True)),
            Err(KripkeError::Check(_))
        ));
    }
}
