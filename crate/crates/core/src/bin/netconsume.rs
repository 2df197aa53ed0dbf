fn main() {
    std::process::exit(netconsume::cli::run(std::env::args_os()));
}
