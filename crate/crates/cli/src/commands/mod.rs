pub mod adjust;
pub mod extract;
pub mod fit;
pub mod replay;
pub mod simulate;

use std::path::Path;

use fdrisk_core::{read_observations, Observation, ZObservation};

use crate::error::{CliError, CliResult};

pub fn load_observations(path: &Path) -> CliResult<Vec<Observation>> {
    if !path.exists() {
        return Err(CliError::Usage(format!("{}: no such file", path.display())));
    }
    Ok(read_observations(path)?)
}

pub fn to_z(obs: &[Observation], two_sided: bool) -> CliResult<Vec<ZObservation>> {
    obs.iter()
        .enumerate()
        .map(|(i, o)| o.to_z(two_sided).map_err(|e| CliError::Usage(format!("record {}: {e}", i + 1))))
        .collect()
}

pub fn create_parent(path: &Path) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    Ok(())
}
