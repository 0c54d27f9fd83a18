#![no_main]

use libfuzzer_sys::fuzz_target;
use stc_core::driver::{run, Command, Input, Options};

fuzz_target!(|text: &str| {
    let opts = Options {
        fuel: 20_000,
        ..Options::default()
    };
    for command in [Command::Check, Command::Canon] {
        let report = run(command, &opts, &[Input::new("fuzz.stc", text)]);
        assert!(report.exit_code <= 2);
    }
});
