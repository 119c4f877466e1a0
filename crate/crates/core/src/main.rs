fn main() {
    std::process::exit(dephase::cli::dispatch(std::env::args_os()));
}
