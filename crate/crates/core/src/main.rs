fn main() {
    std::process::exit(raman_tuner::cli::run());
}
