fn main() {
    std::process::exit(dnorm_lab::cli::dispatch(std::env::args_os()));
}
