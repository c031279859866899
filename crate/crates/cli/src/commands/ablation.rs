use std::fs;
use std::path::PathBuf;

use clap::Args;
use grrhdr::ablation::{run_ablation, ScenarioFile};
use grrhdr::scenes::synthetic_corpus;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Outcome;
use crate::error::{flag, CliError, CliResult};
use crate::files;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AblationArgs {
    /// Directory of single-channel PFM scenes.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Scenario file (JSON).
    #[arg(long)]
    pub scenarios: PathBuf,
    /// Output prefix: writes PREFIX.csv.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Overrides the seed in the scenario file.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl AblationArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let mut file = ScenarioFile::parse(&files::read(&self.scenarios)?)
            .map_err(|e| CliError::from(e).context(self.scenarios.display()))?;
        if let Some(seed) = self.seed {
            file.seed = seed;
        }
        let entries = fs::read_dir(&self.corpus).map_err(|e| CliError::io(&self.corpus, e))?;
        let mut paths = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| CliError::io(&self.corpus, e))?.path();
            if path.extension().is_some_and(|e| e == "pfm") {
                paths.push(path);
            }
        }
        paths.sort();
        if paths.is_empty() {
            return Err(CliError::param(format!("--corpus {} holds no .pfm scenes", self.corpus.display())));
        }
        let scenes = paths
            .iter()
            .map(|p| {
                let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                Ok((name, files::read_pfm(p)?))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let table = run_ablation(&scenes, &file).map_err(flag("--scenarios"))?;
        let path = files::suffixed(&self.out, ".csv");
        files::write(&path, table.to_csv().as_bytes())?;
        let mut inputs = paths;
        inputs.push(self.scenarios.clone());
        Ok(Outcome { inputs, outputs: vec![path], summary: json!({ "scenarios": table.summary }) })
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MakeCorpusArgs {
    /// Output directory, created if missing; scenes are scene_000.pfm, ...
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    #[arg(long, default_value_t = 64)]
    pub height: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl MakeCorpusArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let scenes = synthetic_corpus(self.count, self.width, self.height, self.seed)
            .map_err(flag("--count/--width/--height"))?;
        fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out, e))?;
        let mut outputs = Vec::with_capacity(scenes.len());
        for (i, scene) in scenes.iter().enumerate() {
            let path = self.out.join(format!("scene_{i:03}.pfm"));
            files::write_pfm(&path, scene)?;
            outputs.push(path);
        }
        Ok(Outcome { inputs: vec![], outputs, summary: json!({}) })
    }
}
