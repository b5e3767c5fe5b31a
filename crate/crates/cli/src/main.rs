use std::process::ExitCode;

fn main() -> ExitCode {
    match edm_pareto_cli::execute(std::env::args_os()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
