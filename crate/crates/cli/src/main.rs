use histories_kit_cli::{execute, Options, TOL_ENV};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let opts = Options {
        tol_env: std::env::var(TOL_ENV).ok(),
        ..Options::default()
    };
    let code = execute(&argv, &mut std::io::stdout(), &mut std::io::stderr(), &opts);
    std::process::exit(code);
}
