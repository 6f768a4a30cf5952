fn main() {
    // die quietly when a pipe consumer closes early (e.g. `... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(sobograph::cli::main_with_args(std::env::args_os()));
}
