use std::process::ExitCode;

use acoufem::driver::{run_simulation, StepOutcome};
use acoufem_cli::parse_cli;

fn main() -> ExitCode {
    let cli = match parse_cli(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    env_logger::Builder::new()
        .filter_level(cli.log_level.filter())
        .format_timestamp(None)
        .format_target(false)
        .init();

    let report = run_simulation(&cli.config, &cli.overrides());
    for step in &report.steps {
        let outcome = match &step.outcome {
            StepOutcome::Completed => "completed".to_string(),
            StepOutcome::Partial { failed } => format!("partial ({} frequencies failed)", failed.len()),
            StepOutcome::Failed => "failed".to_string(),
            StepOutcome::Skipped => "skipped".to_string(),
            StepOutcome::Validated => "validated".to_string(),
        };
        log::info!(
            "[step {}][report] {}: {outcome}; {} free dofs; assembly {:.3} s, solve {:.3} s, output {:.3} s",
            step.index,
            step.analysis,
            step.n_free,
            step.assembly_seconds,
            step.solve_seconds,
            step.output_seconds
        );
    }
    if let Some(error) = &report.error {
        eprintln!("error: {error}");
    }
    ExitCode::from(report.exit_code() as u8)
}
