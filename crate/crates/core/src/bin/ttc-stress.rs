fn main() {
    std::process::exit(ttc_stress::cli::cli_dispatch(std::env::args_os()));
}
