use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use topicscope_core::corpus::ProcessedCorpus;
use topicscope_core::metrics::{ttq, DEFAULT_TOP_N};
use topicscope_core::retrieval::{CacheStatus, RetrieveParams};
use topicscope_core::saliency::SaliencyConfig;
use topicscope_core::{Beta, DocRetriever, Quality};
use topicscope_llm::{KeywordTrajectory, LlmClient, LlmSettings};

use crate::error::StartupError;
use crate::sessions::SessionStore;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub addr: SocketAddr,
    pub corpus_dir: PathBuf,
    pub model_dir: PathBuf,
    /// Root for on-disk caches; the LLM cache lives in `<cache_dir>/llm`.
    /// Defaults to `<corpus_dir>/cache`.
    pub cache_dir: Option<PathBuf>,
    pub llm: LlmSettings,
    pub retrieve: RetrieveParams<f64>,
    pub saliency: SaliencyConfig<f64>,
    pub top_n: usize,
    /// Allowed CORS origins; empty allows any.
    pub cors_origins: Vec<String>,
    pub static_dir: Option<PathBuf>,
    pub prelabel: bool,
}

impl ServiceConfig {
    pub fn new(corpus_dir: impl Into<PathBuf>, model_dir: impl Into<PathBuf>) -> Self {
        Self {
            addr: SocketAddr::from(([127, 0, 0, 1], 8080)),
            corpus_dir: corpus_dir.into(),
            model_dir: model_dir.into(),
            cache_dir: None,
            llm: LlmSettings::default(),
            retrieve: RetrieveParams::default(),
            saliency: SaliencyConfig::default(),
            top_n: DEFAULT_TOP_N,
            cors_origins: Vec::new(),
            static_dir: None,
            prelabel: false,
        }
    }

    pub fn cache_root(&self) -> PathBuf {
        self.cache_dir.clone().unwrap_or_else(|| self.corpus_dir.join("cache"))
    }
}

/// Everything the handlers read. Immutable after startup apart from sessions.
#[derive(Debug)]
pub struct AppState {
    pub beta: Beta,
    pub retriever: DocRetriever,
    pub quality: Quality,
    pub llm: LlmClient,
    pub sessions: SessionStore,
    pub config: ServiceConfig,
    pub index_status: CacheStatus,
}

pub type SharedState = Arc<AppState>;

fn require_dir(p: &Path) -> Result<(), StartupError> {
    if p.is_dir() {
        Ok(())
    } else {
        Err(StartupError::MissingDir(p.to_path_buf()))
    }
}

impl AppState {
    /// Loads and cross-checks all artifacts, builds or loads the index,
    /// and computes quality scores.
    pub fn load(config: ServiceConfig) -> Result<Self, StartupError> {
        let llm = LlmClient::open(config.llm.clone(), &config.cache_root())?;
        Self::load_with(config, llm)
    }

    /// As [`AppState::load`] with a caller-supplied LLM client.
    pub fn load_with(config: ServiceConfig, llm: LlmClient) -> Result<Self, StartupError> {
        require_dir(&config.corpus_dir)?;
        require_dir(&config.model_dir)?;
        let corpus = ProcessedCorpus::load(&config.corpus_dir)?;
        let beta = Beta::load_dir(&config.model_dir, &config.corpus_dir)?;
        if beta.vocab != corpus.vocab {
            return Err(StartupError::Mismatch("model vocabulary differs from the corpus vocabulary".into()));
        }
        if beta.timestamps != corpus.timestamps {
            return Err(StartupError::Mismatch("model timestamps differ from the corpus timestamps".into()));
        }
        let quality = ttq(&beta, &corpus, config.top_n)?;
        let (retriever, index_status) = DocRetriever::build_cached(corpus, &config.corpus_dir)?;
        Ok(Self { beta, retriever, quality, llm, sessions: SessionStore::default(), config, index_status })
    }

    pub fn trajectory(&self, topic: usize) -> Result<KeywordTrajectory, topicscope_llm::LlmError> {
        KeywordTrajectory::from_beta(&self.beta, topic, self.config.top_n)
    }

    /// Labels every topic through the cache. Returns how many were labeled.
    pub async fn prelabel(&self) -> usize {
        let mut done = 0;
        for k in 0..self.beta.num_topics() {
            let labeled = match self.trajectory(k) {
                Ok(traj) => self.llm.label_topic(&traj).await,
                Err(e) => Err(e),
            };
            match labeled {
                Ok(_) => done += 1,
                Err(e) => tracing::warn!(topic = k, error = %e, "pre-labeling failed"),
            }
        }
        done
    }
}
