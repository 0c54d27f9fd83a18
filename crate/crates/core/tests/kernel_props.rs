use proptest::prelude::*;
use stc_core::check::Checker;
use stc_core::gen::{KernelGen, SType};
use stc_core::model::{extract_canonical, Model};
use stc_core::nbe::{Nbe, DEFAULT_FUEL};
use stc_core::surface::sexp::parse_one;
use stc_core::surface::stc::{lower_closed, print_term};
use stc_core::syntax::{Context, Term};

fn checker() -> Checker {
    Checker::new(Nbe::new(DEFAULT_FUEL))
}

fn normal(t: &Term, at: &Term) -> Term {
    Nbe::new(DEFAULT_FUEL)
        .normalize(&[], t, at)
        .expect("closed well-typed terms normalize")
}

fn typed_sample(seed: u64) -> (Term, SType) {
    let mut g = KernelGen::with_depth(seed, 3);
    let ty = if g.coin(0.6) { SType::Bool } else { g.simple_type() };
    (g.closed_of(&ty), ty)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn generated_terms_check(seed in any::<u64>()) {
        let (t, ty) = typed_sample(seed);
        prop_assert!(checker().check(&Context::empty(), &t, &ty.to_term()).is_ok());
    }

    #[test]
    fn subject_reduction(seed in any::<u64>()) {
        let (t, ty) = typed_sample(seed);
        let nf = normal(&t, &ty.to_term());
        prop_assert!(checker().check(&Context::empty(), &nf, &ty.to_term()).is_ok(), "{}", print_term(&nf, &[]));
    }

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>()) {
        let (t, ty) = typed_sample(seed);
        let nf = normal(&t, &ty.to_term());
        prop_assert_eq!(normal(&nf, &ty.to_term()), nf);
    }

    #[test]
    fn conversion_is_an_equivalence(seed in any::<u64>()) {
        let (t, ty) = typed_sample(seed);
        let at = ty.to_term();
        let nf = normal(&t, &at);
        let wrapped = Term::annot(at.clone(), t.clone());
        let c = checker();
        let e = Context::empty();
        prop_assert!(c.convertible(&e, &at, &t, &t).unwrap());
        prop_assert!(c.convertible(&e, &at, &t, &nf).unwrap());
        prop_assert!(c.convertible(&e, &at, &nf, &t).unwrap());
        prop_assert!(c.convertible(&e, &at, &wrapped, &nf).unwrap());
        prop_assert!(c.convertible(&e, &at, &t, &wrapped).unwrap());
    }

    #[test]
    fn conversion_is_a_congruence(seed in any::<u64>()) {
        let mut g = KernelGen::with_depth(seed, 3);
        let t = g.closed_bool();
        let nf = normal(&t, &Term::Bool);
        let fty = SType::arrow(SType::Bool, SType::Bool);
        let f = Term::annot(fty.to_term(), g.closed_of(&fty));
        let c = checker();
        prop_assert!(c
            .convertible(&Context::empty(), &Term::Bool, &Term::app(f.clone(), t), &Term::app(f, nf))
            .unwrap());
    }

    #[test]
    fn distinct_literals_are_not_convertible(seed in any::<u64>()) {
        let mut g = KernelGen::with_depth(seed, 3);
        let t = g.closed_bool();
        let other = match normal(&t, &Term::Bool) {
            Term::True => Term::False,
            _ => Term::True,
        };
        prop_assert!(!checker().convertible(&Context::empty(), &Term::Bool, &t, &other).unwrap());
    }

    #[test]
    fn canonicity_agrees_with_normalization(seed in any::<u64>()) {
        let mut g = KernelGen::with_depth(seed, 3);
        let t = g.closed_bool();
        let canon = extract_canonical(&t, DEFAULT_FUEL).unwrap();
        prop_assert_eq!(Term::bool_lit(canon.tag), normal(&t, &Term::Bool));
        prop_assert!(canon.replay(DEFAULT_FUEL).is_ok());
    }

    #[test]
    fn tracking_holds_on_generated_terms(seed in any::<u64>()) {
        let (t, ty) = typed_sample(seed);
        let typed = checker().check(&Context::empty(), &t, &ty.to_term()).unwrap();
        let report = Model::new(DEFAULT_FUEL).verify_tracking(&typed);
        prop_assert!(report.ok, "{:?}", report.error);
    }

    #[test]
    fn parse_print_round_trip(seed in any::<u64>()) {
        let (t, _) = typed_sample(seed);
        let text = print_term(&t, &[]);
        let back = lower_closed(&parse_one(&text).unwrap()).unwrap();
        prop_assert_eq!(back, t);
    }
}
