#![no_main]

use libfuzzer_sys::fuzz_target;
use stc_core::surface::sexp::parse_document;
use stc_core::surface::stc::{entry_to_sexp, lower_entry};

fuzz_target!(|text: &str| {
    let Ok(doc) = parse_document(text) else { return };
    assert_eq!(parse_document(&doc.to_string()).unwrap().to_string(), doc.to_string());
    for form in doc.forms() {
        if let Ok(e) = lower_entry(form) {
            let printed = entry_to_sexp(&e.term, &e.ty);
            let again = lower_entry(&printed).expect("printed entries lower");
            assert_eq!((again.term, again.ty), (e.term, e.ty));
        }
    }
});
