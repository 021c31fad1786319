fn main() {
    let code = nsplab::with_big_stack(|| {
        let args: Vec<_> = std::env::args_os().collect();
        nsplab::cli::run(args, &mut std::io::stdout(), &mut std::io::stderr())
    });
    std::process::exit(code);
}
