fn main() -> std::process::ExitCode {
    focusmr::cli::main()
}
