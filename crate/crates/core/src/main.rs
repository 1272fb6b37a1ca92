fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FRONTIER_LOG", "warn")).init();
    std::process::exit(frontier::cli::main_with_args(std::env::args_os()));
}
