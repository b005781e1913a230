fn main() {
    std::process::exit(spde_excite::cli::main_with_args(std::env::args_os()));
}
