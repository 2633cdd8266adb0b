use std::path::Path;

use crate::args::ReplayArgs;
use crate::error::{CliError, CliResult};
use crate::manifest::{read_manifest, sha256_file};

/// Checks the recorded input digests, then reruns the recorded arguments.
pub fn run(args: &ReplayArgs) -> CliResult<()> {
    let manifest = read_manifest(&args.manifest)?;
    for input in &manifest.run.inputs {
        let digest = sha256_file(Path::new(&input.path))?;
        if digest != input.sha256 {
            return Err(CliError::Usage(format!(
                "{} has changed since the recorded run (sha256 {digest}, recorded {})",
                input.path, input.sha256
            )));
        }
    }
    if manifest.run.argv.first().map(String::as_str) == Some("replay") {
        return Err(CliError::Usage("manifest records a replay".into()));
    }
    if manifest.run.version != fdrisk_core::VERSION {
        eprintln!(
            "warning: manifest written by version {}, running {}",
            manifest.run.version,
            fdrisk_core::VERSION
        );
    }
    crate::dispatch(&manifest.run.argv)
}
