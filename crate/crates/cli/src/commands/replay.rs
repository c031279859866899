use std::path::PathBuf;

use clap::Args;

use super::{say, Command, Outcome};
use crate::error::{CliError, CliResult, ExitKind};
use crate::files;
use crate::manifest::{relocate, sha256_hex, FileHash, RunManifest};

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
    /// Directory for the regenerated outputs; a temporary directory is used
    /// and removed otherwise.
    #[arg(long)]
    pub keep: Option<PathBuf>,
}

impl ReplayArgs {
    pub fn run(&self) -> CliResult<()> {
        let manifest =
            RunManifest::from_json(&files::read(&self.manifest)?).map_err(|e| e.context(self.manifest.display()))?;
        for input in &manifest.inputs {
            let now = FileHash::of(&input.path)?;
            if now.sha256 != input.sha256 {
                return Err(CliError::new(
                    ExitKind::Mismatch,
                    format!("input {} changed since the run", input.path.display()),
                ));
            }
        }
        let mut command = Command::from_manifest(&manifest)?;
        let tmp;
        let dir = match &self.keep {
            Some(d) => {
                std::fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
                d.clone()
            }
            None => {
                tmp = tempfile::tempdir().map_err(|e| CliError::io(&std::env::temp_dir(), e))?;
                tmp.path().to_path_buf()
            }
        };
        let out = command.out_mut().ok_or_else(|| CliError::new(ExitKind::Format, "manifest has no output"))?;
        let old_out = out.clone();
        let name = old_out.file_name().ok_or_else(|| CliError::new(ExitKind::Format, "manifest output has no name"))?;
        let new_out = dir.join(name);
        *out = new_out.clone();
        let Outcome { outputs, .. } = command.run()?;

        let mut mismatches = 0;
        if outputs.len() != manifest.outputs.len() {
            mismatches += 1;
            say(format_args!("MISMATCH output count {} != {}", outputs.len(), manifest.outputs.len()));
        }
        for recorded in &manifest.outputs {
            let path = relocate(&recorded.path, &old_out, &new_out)?;
            let hash = match files::read(&path) {
                Ok(bytes) => sha256_hex(&bytes),
                Err(_) => String::from("missing"),
            };
            if hash == recorded.sha256 {
                say(format_args!("ok {}", recorded.path.display()));
            } else {
                mismatches += 1;
                say(format_args!("MISMATCH {} ({hash} != {})", recorded.path.display(), recorded.sha256));
            }
        }
        if mismatches > 0 {
            return Err(CliError::new(ExitKind::Mismatch, format!("{mismatches} output(s) differ from the manifest")));
        }
        Ok(())
    }
}
