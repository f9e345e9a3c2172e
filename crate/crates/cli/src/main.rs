use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let report = unifcomm_cli::run(std::env::args_os());
    let text = report.text.as_bytes();
    let res = if report.code == unifcomm_cli::EXIT_INPUT {
        std::io::stderr().write_all(text)
    } else {
        std::io::stdout().write_all(text)
    };
    if res.is_err() {
        return ExitCode::from(unifcomm_cli::EXIT_INPUT);
    }
    ExitCode::from(report.code)
}
