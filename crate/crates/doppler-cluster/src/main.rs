use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(doppler_cluster::cli::main_impl())
}
