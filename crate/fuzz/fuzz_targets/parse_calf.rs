#![no_main]

use libfuzzer_sys::fuzz_target;
use stc_core::calf::syntax::{CbpvTerm, CbpvType};
use stc_core::surface::calf::{entry_to_sexp, lower_entry};
use stc_core::surface::sexp::parse_document;

fuzz_target!(|text: &str| {
    let Ok(doc) = parse_document(text) else { return };
    for form in doc.forms() {
        if let Ok(e) = lower_entry(form) {
            if let (CbpvTerm::Comp(m), CbpvType::Comp(x)) = (&e.term, &e.ty) {
                let again = lower_entry(&entry_to_sexp(m, x)).expect("printed entries lower");
                assert_eq!((&again.term, &again.ty), (&e.term, &e.ty));
            }
        }
    }
});
