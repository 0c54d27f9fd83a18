use std::process::ExitCode;

/// Deeply nested inputs recurse through the parser, checker and model.
const MAIN_STACK: usize = 256 << 20;

fn main() -> ExitCode {
    let worker = std::thread::Builder::new().stack_size(MAIN_STACK).spawn(|| {
        stc_cli::run_cli(
            std::env::args_os(),
            &mut std::io::stdout().lock(),
            &mut std::io::stderr(),
        )
    });
    match worker.map(|h| h.join()) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(_)) => ExitCode::from(101),
        Err(e) => {
            eprintln!("error: cannot start the worker thread: {e}");
            ExitCode::from(stc_cli::EXIT_USAGE)
        }
    }
}
