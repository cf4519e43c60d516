fn main() -> std::process::ExitCode {
    dii::cli::main()
}
