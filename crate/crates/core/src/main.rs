fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args: Vec<String> = std::env::args().collect();
    let mut stdout = std::io::stdout().lock();
    std::process::exit(cbiem_core::cli::run(&args, &mut stdout));
}
