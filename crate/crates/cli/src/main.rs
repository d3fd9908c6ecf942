use std::process::ExitCode;

fn main() -> ExitCode {
    entchan::main_with_args(std::env::args_os())
}
