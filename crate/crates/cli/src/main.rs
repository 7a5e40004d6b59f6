fn main() {
    std::process::exit(ctfactor_cli::dispatch(std::env::args_os()));
}
