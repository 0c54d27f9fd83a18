use std::path::PathBuf;

use stc_core::calf::syntax::{CbpvTerm, CbpvType};
use stc_core::driver::{run, Command, Input, Options};
use stc_core::report::Status;
use stc_core::surface::sexp::parse_document;
use stc_core::surface::{calf, stc};
use stc_core::syntax::Term;

fn corpus() -> Vec<(PathBuf, String)> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut files = Vec::new();
    for dir in ["stc", "calf"] {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(root.join(dir))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for p in entries {
            let text = std::fs::read_to_string(&p).unwrap();
            files.push((p, text));
        }
    }
    files
}

fn reprint(path: &std::path::Path, form: &stc_core::surface::sexp::Sexp) -> String {
    if path.extension().unwrap() == "stc" {
        let e = stc::lower_entry(form).unwrap();
        stc::entry_to_sexp(&e.term, &e.ty).to_string()
    } else {
        match calf::lower_entry(form).unwrap() {
            calf::Entry {
                term: CbpvTerm::Comp(m),
                ty: CbpvType::Comp(x),
                ..
            } => calf::entry_to_sexp(&m, &x).to_string(),
            other => panic!("value entry {other:?}"),
        }
    }
}

#[test]
fn files_are_in_printed_form() {
    for (path, text) in corpus() {
        let doc = parse_document(&text).unwrap();
        assert_eq!(doc.to_string(), text, "{}", path.display());
        for form in doc.forms() {
            assert_eq!(reprint(&path, form), form.to_string(), "{}", path.display());
        }
    }
}

#[test]
fn composition_meets_minimums() {
    let mut booleans = Vec::new();
    for (path, text) in corpus() {
        if path.extension().unwrap() != "stc" {
            continue;
        }
        for form in parse_document(&text).unwrap().forms() {
            let e = stc::lower_entry(form).unwrap();
            let ty = stc_core::nbe::Nbe::default().normalize(&[], &e.ty, &Term::U1).unwrap();
            if ty == Term::Bool {
                booleans.push(e.term);
            }
        }
    }
    assert!(booleans.len() >= 50, "{}", booleans.len());
    assert!(booleans.iter().filter(|t| t.uses_large_elim()).count() >= 10);
    assert!(booleans.iter().filter(|t| t.is_higher_order()).count() >= 10);
}

#[test]
fn every_entry_passes() {
    let inputs: Vec<Input> = corpus()
        .into_iter()
        .map(|(p, text)| Input::new(p.display().to_string(), text))
        .collect();
    let report = run(Command::Corpus, &Options::default(), &inputs);
    let failing: Vec<_> = report.items.iter().filter(|i| i.status != Status::Pass).collect();
    assert!(failing.is_empty(), "{failing:#?}");
    assert_eq!(report.exit_code, 0);
}
