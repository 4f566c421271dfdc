fn main() -> std::process::ExitCode {
    echoloop::cli::run()
}
