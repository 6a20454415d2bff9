fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LVMB_LOG", "warn")).init();
    std::process::exit(lvmb::cli::main_with_args(std::env::args_os()));
}
