#![no_main]

//! The first line holds arguments; `FILE` names a temporary file holding the rest.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let split = data.iter().position(|b| *b == b'\n').unwrap_or(data.len());
    let (line, body) = data.split_at(split);
    let path = std::env::temp_dir().join(format!("stc-fuzz-{}.stc", std::process::id()));
    if std::fs::write(&path, body.get(1..).unwrap_or_default()).is_err() {
        return;
    }
    let mut args = vec!["stc".to_string(), "--jobs".to_string(), "1".to_string()];
    for word in String::from_utf8_lossy(line).split_whitespace() {
        match word {
            "FILE" => args.push(path.display().to_string()),
            "--size" | "--jobs" => {}
            w => args.push(w.to_string()),
        }
    }
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = stc_cli::run_cli(args, &mut out, &mut err);
    assert!(code <= 2);
});
