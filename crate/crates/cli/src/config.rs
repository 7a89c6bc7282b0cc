use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use topicscope_llm::{LlmSettings, ProviderSettings};

use crate::error::CliError;

/// Optional defaults read from `--config FILE`. Command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub llm: LlmSection,
    #[serde(default)]
    pub preprocess: PreprocessSection,
    #[serde(default)]
    pub retrieve: RetrieveSection,
    #[serde(default)]
    pub serve: ServeSection,
    #[serde(default)]
    pub metrics: MetricsSection,
    #[serde(default)]
    pub saliency: SaliencySection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmSection {
    pub base_url: Option<String>,
    pub model: Option<String>,
    pub timeout_secs: Option<u64>,
    pub context_chars: Option<usize>,
    pub per_doc_chars: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessSection {
    pub stopwords: Option<PathBuf>,
    pub min_count_bigram: Option<usize>,
    pub threshold_bigram: Option<f64>,
    pub min_chars: Option<usize>,
    pub min_words_docs: Option<usize>,
    pub max_vocab: Option<usize>,
    pub min_doc_freq: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrieveSection {
    pub lambda: Option<f64>,
    pub limit: Option<usize>,
    pub candidates: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServeSection {
    pub host: Option<String>,
    pub port: Option<u16>,
    pub cors_origins: Option<Vec<String>>,
    pub prelabel: Option<bool>,
    pub static_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsSection {
    pub top_n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaliencySection {
    pub pool: Option<usize>,
    pub top_n: Option<usize>,
    pub epsilon: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new("config_error", format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::new("config_error", format!("{}: {e}", path.display())))
    }

    /// File values first, then `LLM_*` environment variables over them.
    pub fn llm_settings(&self) -> LlmSettings {
        let mut provider = ProviderSettings::default();
        if let Some(v) = &self.llm.base_url {
            provider.base_url = v.clone();
        }
        if let Some(v) = &self.llm.model {
            provider.model = v.clone();
        }
        if let Some(v) = self.llm.timeout_secs {
            provider.timeout = Duration::from_secs(v);
        }
        let env = |k: &str| std::env::var(k).ok().filter(|v| !v.is_empty());
        if let Some(v) = env("LLM_API_BASE") {
            provider.base_url = v;
        }
        if let Some(v) = env("LLM_MODEL") {
            provider.model = v;
        }
        if let Some(secs) = env("LLM_TIMEOUT_SECS").and_then(|v| v.trim().parse().ok()) {
            provider.timeout = Duration::from_secs(secs);
        }
        provider.api_key = env("LLM_API_KEY");
        let mut s = LlmSettings { provider, ..LlmSettings::default() };
        if let Some(v) = self.llm.context_chars {
            s.budget.total_chars = v;
        }
        if let Some(v) = self.llm.per_doc_chars {
            s.budget.per_doc_chars = v;
        }
        s
    }
}
