use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ppp_core::corpus::{FilterPolicy, Layout};
use ppp_core::metrics::{Alpha, EntropyPolicy, Metric};
use ppp_core::regression::ContextScope;
use ppp_core::stats::PplAxis;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Declarative description of one run. Relative paths are taken relative to
/// the directory of the file the config was loaded from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Label written next to every result row.
    #[serde(default = "default_corpus_name")]
    pub corpus_name: String,
    #[serde(default)]
    pub corpus: Option<PathBuf>,
    #[serde(default = "default_layout")]
    pub layout: Layout,
    #[serde(default)]
    pub dumps: Vec<PathBuf>,
    #[serde(default)]
    pub freq: Option<PathBuf>,
    #[serde(default)]
    pub stopwords: Option<PathBuf>,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    #[serde(default)]
    pub entropy_policy: EntropyPolicy,
    #[serde(default)]
    pub context_scope: ContextScope,
    #[serde(default)]
    pub ppl_axis: PplAxis,
    /// Adds length × frequency products to both models.
    #[serde(default)]
    pub interaction: bool,
    /// Characters ignored at the end of a word when measuring its length.
    #[serde(default = "default_strip")]
    pub strip_trailing: String,
    #[serde(default = "default_floor")]
    pub smoothing_floor: u64,
    #[serde(default)]
    pub filter: FilterPolicy,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: PathBuf,
    #[serde(skip)]
    base_dir: PathBuf,
}

fn default_corpus_name() -> String {
    "corpus".into()
}

fn default_layout() -> Layout {
    Layout::Averaged
}

fn default_metrics() -> Vec<Metric> {
    vec![
        Metric::Surprisal,
        Metric::Shannon,
        Metric::Renyi(Alpha::new(0.5).expect("0.5 is a valid order")),
    ]
}

fn default_strip() -> String {
    ".,;:!?\"'()".into()
}

fn default_floor() -> u64 {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus_name: default_corpus_name(),
            corpus: None,
            layout: default_layout(),
            dumps: Vec::new(),
            freq: None,
            stopwords: None,
            metrics: default_metrics(),
            entropy_policy: EntropyPolicy::default(),
            context_scope: ContextScope::default(),
            ppl_axis: PplAxis::default(),
            interaction: false,
            strip_trailing: default_strip(),
            smoothing_floor: default_floor(),
            filter: FilterPolicy::default(),
            seed: 0,
            output_dir: default_output_dir(),
            base_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if cfg.base_dir.as_os_str().is_empty() {
            cfg.base_dir = PathBuf::from(".");
        }
        cfg.filter.validate()?;
        Ok(cfg)
    }

    /// The config file's directory, against which relative paths resolve.
    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn with_base_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.base_dir = dir.into();
        self
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }

    pub fn output_path(&self, name: &str) -> PathBuf {
        self.resolve(&self.output_dir).join(name)
    }

    pub fn corpus_path(&self) -> Result<PathBuf> {
        match &self.corpus {
            Some(p) => Ok(self.resolve(p)),
            None => bail!("config does not name a corpus"),
        }
    }

    pub fn freq_path(&self) -> Result<PathBuf> {
        match &self.freq {
            Some(p) => Ok(self.resolve(p)),
            None => bail!("config does not name a frequency table"),
        }
    }

    /// Fails on the first referenced path that does not exist.
    pub fn check_paths(&self) -> Result<()> {
        let named = self
            .corpus
            .iter()
            .chain(&self.freq)
            .chain(&self.stopwords)
            .chain(&self.dumps);
        for p in named {
            let full = self.resolve(p);
            if !full.exists() {
                bail!("{} does not exist", full.display());
            }
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form of the config. The output
    /// directory is not part of it.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}
