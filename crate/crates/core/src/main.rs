fn main() {
    std::process::exit(gue_crowding::cli::run(std::env::args_os()));
}
