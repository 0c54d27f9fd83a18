use rayon::prelude::*;
use stc_core::check::Checker;
use stc_core::gen::KernelGen;
use stc_core::model::Model;
use stc_core::nbe::{Nbe, DEFAULT_FUEL};
use stc_core::surface::stc::print_term;
use stc_core::syntax::{Context, EquationName, Term};

const INSTANCES: u64 = 250;

fn rule_of(name: EquationName) -> Option<&'static str> {
    match name {
        EquationName::IfBeta1 => Some("if_beta1"),
        EquationName::IfBeta2 => Some("if_beta2"),
        EquationName::PiBeta => Some("pi_beta"),
        EquationName::PiEta => None,
    }
}

fn run(name: EquationName) {
    let saturated: usize = (0..INSTANCES)
        .into_par_iter()
        .map(|seed| {
            let inst = KernelGen::with_depth(seed ^ 0x5eed, 3).instance(name);
            let show = || {
                format!(
                    "{}: {} = {}",
                    name.as_str(),
                    print_term(&inst.lhs, &[]),
                    print_term(&inst.rhs, &[])
                )
            };
            let checker = Checker::new(Nbe::new(DEFAULT_FUEL));
            assert!(
                checker
                    .convertible(&Context::empty(), &inst.at, &inst.lhs, &inst.rhs)
                    .unwrap(),
                "{}",
                show()
            );
            let agreement = Model::new(DEFAULT_FUEL)
                .equate(&inst.at, &inst.lhs, &inst.rhs, &inst.probes)
                .unwrap_or_else(|e| panic!("{}: {e}", show()));
            assert!(agreement.holds, "{}: {:?}", show(), agreement.detail);
            if agreement.tags.is_none() {
                return 0;
            }
            if let Some(rule) = rule_of(name).filter(|_| inst.probes.is_empty()) {
                assert!(agreement.rules.contains(&rule), "{}: {:?}", show(), agreement.rules);
            }
            1
        })
        .sum();
    assert!(saturated as u64 * 2 >= INSTANCES, "{saturated} instances reached bool");
}

#[test]
fn if_beta1() {
    run(EquationName::IfBeta1);
}

#[test]
fn if_beta2() {
    run(EquationName::IfBeta2);
}

#[test]
fn pi_beta() {
    run(EquationName::PiBeta);
}

#[test]
fn pi_eta() {
    run(EquationName::PiEta);
}

#[test]
fn wrong_sides_are_refuted() {
    let mut g = KernelGen::with_depth(11, 3);
    let mut refuted = 0;
    for _ in 0..200 {
        let inst = g.instance(EquationName::IfBeta1);
        let checker = Checker::new(Nbe::new(DEFAULT_FUEL));
        let (t, f) = (&inst.args[1], &inst.args[2]);
        if checker.convertible(&Context::empty(), &inst.at, t, f).unwrap_or(true) {
            continue;
        }
        let swapped = Term::if_(
            Term::app(inst.args[0].clone(), Term::Var(0)),
            Term::True,
            f.clone(),
            t.clone(),
        );
        let ok = checker.convertible(&Context::empty(), &inst.at, &swapped, &inst.rhs);
        assert!(!matches!(ok, Ok(true)));
        refuted += 1;
    }
    assert!(refuted > 20);
}
