fn main() {
    std::process::exit(teamtrace_cli::run(std::env::args_os()));
}
