fn main() -> std::process::ExitCode {
    didpr::cli::main()
}
