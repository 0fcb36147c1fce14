use std::path::PathBuf;

use clap::Args;

use crate::artifact::Artifact;
use crate::error::{CliError, Result};
use crate::run::Run;
use crate::Ctx;

#[derive(Args)]
pub struct ReportArgs {
    /// JSON artifact written by another subcommand. Repeatable.
    #[arg(long = "from", required = true)]
    from: Vec<PathBuf>,
}

pub fn report(ctx: &Ctx, args: ReportArgs) -> Result<()> {
    let mut run = Run::new("report", &ctx.out_dir)?;
    for path in &args.from {
        run.input(path)?;
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let artifact: Artifact = serde_json::from_str(&text)
            .map_err(|e| CliError::Core(xfer::Error::Schema(format!("{}: {e}", path.display()))))?;
        run.write_figures(artifact.figures()?)?;
    }
    run.finish()
}
