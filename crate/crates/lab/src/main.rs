fn main() {
    let outcome = conelab::run(std::env::args_os());
    if let Some(dir) = &outcome.dir {
        eprintln!("run directory: {}", dir.display());
    }
    std::process::exit(outcome.code);
}
