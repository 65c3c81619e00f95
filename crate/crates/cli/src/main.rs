use std::process::ExitCode;

fn main() -> ExitCode {
    let (out, code) = psdocalc::commands::main_with(std::env::args_os());
    if code == 2 {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    ExitCode::from(code as u8)
}
