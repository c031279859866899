mod ablation;
mod acquire;
mod analyze;
mod calibrate;
mod reconstruct;
mod replay;

use std::path::PathBuf;

use clap::Subcommand;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult, ExitKind};
use crate::files;
use crate::manifest::{manifest_path, FileHash, RunManifest, MANIFEST_FORMAT, MANIFEST_VERSION};

pub use ablation::{AblationArgs, MakeCorpusArgs};
pub use acquire::{SimulateArgs, UnshuffleArgs};
pub use analyze::{AnalyzeDrArgs, HighlightArgs, MergeArgs, MetricsArgs};
pub use calibrate::CalibrateArgs;
pub use reconstruct::ReconstructArgs;
pub use replay::ReplayArgs;

/// Files read and written by one run.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Command {
    /// Simulate a measurement of a PFM scene.
    Simulate(SimulateArgs),
    /// Undo the optics permutation of a measurement.
    Unshuffle(UnshuffleArgs),
    /// Recover an HDR image from a measurement.
    Reconstruct(ReconstructArgs),
    /// Build a system matrix from simulated point-source captures.
    Calibrate(CalibrateArgs),
    /// Merge an exposure bracket into a radiance map (DN per second).
    Merge(MergeArgs),
    /// Dynamic range of a shuffled GRR exposure pattern, per patch size.
    AnalyzeDr(AnalyzeDrArgs),
    /// Isolated highlight density of PFM images.
    HighlightDensity(HighlightArgs),
    /// PSNR, gamma PSNR and SSIM of a test image against a reference.
    Metrics(MetricsArgs),
    /// Run an ablation scenario file over a directory of PFM scenes.
    Ablation(AblationArgs),
    /// Write a synthetic scene corpus.
    MakeCorpus(MakeCorpusArgs),
    /// Rerun a manifest and compare output hashes.
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Unshuffle(_) => "unshuffle",
            Command::Reconstruct(_) => "reconstruct",
            Command::Calibrate(_) => "calibrate",
            Command::Merge(_) => "merge",
            Command::AnalyzeDr(_) => "analyze-dr",
            Command::HighlightDensity(_) => "highlight-density",
            Command::Metrics(_) => "metrics",
            Command::Ablation(_) => "ablation",
            Command::MakeCorpus(_) => "make-corpus",
            Command::Replay(_) => "replay",
        }
    }

    fn out_mut(&mut self) -> Option<&mut PathBuf> {
        match self {
            Command::Simulate(a) => Some(&mut a.out),
            Command::Unshuffle(a) => Some(&mut a.out),
            Command::Reconstruct(a) => Some(&mut a.out),
            Command::Calibrate(a) => Some(&mut a.out),
            Command::Merge(a) => Some(&mut a.out),
            Command::AnalyzeDr(a) => Some(&mut a.out),
            Command::HighlightDensity(a) => Some(&mut a.out),
            Command::Metrics(a) => Some(&mut a.out),
            Command::Ablation(a) => Some(&mut a.out),
            Command::MakeCorpus(a) => Some(&mut a.out),
            Command::Replay(_) => None,
        }
    }

    /// Rewrites every path argument as an absolute path.
    fn absolutize(&mut self) -> CliResult<()> {
        let mut paths: Vec<&mut PathBuf> = match self {
            Command::Simulate(a) => vec![&mut a.scene, &mut a.out].into_iter().chain(a.matrix.as_mut()).collect(),
            Command::Unshuffle(a) => vec![&mut a.measurement, &mut a.out],
            Command::Reconstruct(a) => {
                vec![&mut a.measurement, &mut a.out].into_iter().chain(a.matrix.as_mut()).collect()
            }
            Command::Calibrate(a) => vec![&mut a.out],
            Command::Merge(a) => a.frames.iter_mut().chain([&mut a.out]).collect(),
            Command::AnalyzeDr(a) => vec![&mut a.out],
            Command::HighlightDensity(a) => a.images.iter_mut().chain([&mut a.out]).collect(),
            Command::Metrics(a) => vec![&mut a.reference, &mut a.test, &mut a.out],
            Command::Ablation(a) => vec![&mut a.corpus, &mut a.scenarios, &mut a.out],
            Command::MakeCorpus(a) => vec![&mut a.out],
            Command::Replay(a) => vec![&mut a.manifest],
        };
        for p in paths.iter_mut() {
            files::absolutize(p)?;
        }
        Ok(())
    }

    fn run(&self) -> CliResult<Outcome> {
        match self {
            Command::Simulate(a) => a.run(),
            Command::Unshuffle(a) => a.run(),
            Command::Reconstruct(a) => a.run(),
            Command::Calibrate(a) => a.run(),
            Command::Merge(a) => a.run(),
            Command::AnalyzeDr(a) => a.run(),
            Command::HighlightDensity(a) => a.run(),
            Command::Metrics(a) => a.run(),
            Command::Ablation(a) => a.run(),
            Command::MakeCorpus(a) => a.run(),
            Command::Replay(_) => unreachable!("replay is dispatched separately"),
        }
    }

    fn params(&self) -> serde_json::Value {
        let tagged = serde_json::to_value(self).expect("arguments serialize");
        tagged.get("params").cloned().unwrap_or(serde_json::Value::Null)
    }

    /// Rebuilds the command a manifest records.
    pub fn from_manifest(m: &RunManifest) -> CliResult<Self> {
        let tagged = serde_json::json!({ "command": m.command, "params": m.params });
        serde_json::from_value(tagged)
            .map_err(|e| CliError::new(ExitKind::Format, format!("manifest command {:?}: {e}", m.command)))
    }
}

fn hashes(paths: &[PathBuf]) -> CliResult<Vec<FileHash>> {
    paths.iter().map(|p| FileHash::of(p)).collect()
}

/// Runs a command and writes its manifest next to the outputs.
pub fn execute(mut command: Command) -> CliResult<()> {
    if let Command::Replay(args) = command {
        return args.run();
    }
    command.absolutize()?;
    let outcome = command.run()?;
    let manifest = RunManifest {
        format: MANIFEST_FORMAT.into(),
        version: MANIFEST_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: command.name().into(),
        params: command.params(),
        inputs: hashes(&outcome.inputs)?,
        outputs: hashes(&outcome.outputs)?,
        summary: outcome.summary.clone(),
    };
    let out = command.out_mut().expect("non-replay commands have an output");
    let path = manifest_path(out);
    files::write(&path, manifest.to_json().as_bytes())?;
    print_outputs(&outcome.outputs);
    print_outputs(&[path]);
    Ok(())
}

/// Prints to stdout, ignoring a closed pipe.
pub(crate) fn say(text: impl std::fmt::Display) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_outputs(outputs: &[PathBuf]) {
    for p in outputs {
        say(format_args!("wrote {}", p.display()));
    }
}
