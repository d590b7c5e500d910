//! TOML run manifests.
//!
//! ```toml
//! # relative paths resolve against the directory holding this file
//! [paths]
//! argmicro_features = "features/argmicro.jsonl"
//! persessays_features = "features/persessays.jsonl"
//! plan = "plans/argmicro.json"
//! lexicon = "data/lexicon_ru.tsv"
//! output_dir = "runs/am-am-gbt"
//!
//! [experiment]
//! variant = "am-am"
//! model = "gbt"
//! feature_set = "all"
//! seed = 42
//! runs = 1
//! inner_k = 3
//!
//! [experiment.hyper.gbt]
//! learning_rate = 0.3
//! l2_lambda = 1.0
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use argmine_core::eval::ExperimentConfig;
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub argmicro_features: Option<PathBuf>,
    pub persessays_features: Option<PathBuf>,
    pub plan: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub tagged: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub paths: Paths,
    pub experiment: Option<ExperimentConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let p = &mut cfg.paths;
        for (name, slot) in [
            ("argmicro_features", &mut p.argmicro_features),
            ("persessays_features", &mut p.persessays_features),
            ("plan", &mut p.plan),
            ("lexicon", &mut p.lexicon),
            ("stopwords", &mut p.stopwords),
            ("templates", &mut p.templates),
            ("tagged", &mut p.tagged),
        ] {
            if let Some(f) = slot {
                *f = base.join(&*f);
                if !f.is_file() {
                    bail!("config {}: paths.{name} `{}` does not exist", path.display(), f.display());
                }
            }
        }
        if let Some(d) = &mut p.output_dir {
            *d = base.join(&*d);
        }
        Ok(cfg)
    }

    pub fn load_opt(path: Option<&Path>) -> Result<RunConfig> {
        path.map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
    }
}
