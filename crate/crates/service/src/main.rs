fn main() -> std::process::ExitCode {
    framechat_service::cli::main()
}
