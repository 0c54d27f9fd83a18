#![no_main]

use libfuzzer_sys::fuzz_target;
use stc_core::driver::{run, Command, Input, Options};

fuzz_target!(|text: &str| {
    let opts = Options {
        fuel: 20_000,
        ..Options::default()
    };
    let report = run(Command::Calf, &opts, &[Input::new("fuzz.calf", text)]);
    assert!(report.exit_code <= 2);
});
