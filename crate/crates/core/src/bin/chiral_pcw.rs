fn main() {
    std::process::exit(chiral_pcw::cli::run());
}
