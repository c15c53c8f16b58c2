fn main() -> std::process::ExitCode {
    pcs::cli::main()
}
