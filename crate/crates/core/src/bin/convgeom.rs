fn main() {
    std::process::exit(convgeom::cli::run(std::env::args_os()));
}
