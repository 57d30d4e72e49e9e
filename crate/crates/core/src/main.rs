fn main() -> std::process::ExitCode {
    ntnlink::cli::main()
}
