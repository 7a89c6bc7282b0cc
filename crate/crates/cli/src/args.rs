use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "topicscope", version, about = "Explore temporal topic models: ingest, score, retrieve and serve")]
pub struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Suppress informational output.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    /// TOML file supplying defaults for flags not given on the command line.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tokenize, detect bigrams, prune and bin a JSONL corpus.
    Preprocess(PreprocessArgs),
    /// Check that a processed corpus and a model directory load and agree.
    Validate(PairArgs),
    /// Compute temporal coherence, smoothness and quality.
    Evaluate(EvaluateArgs),
    /// Rank temporally salient words of one topic.
    Salient(SalientArgs),
    /// Label topics with the configured LLM (cached).
    Label(LabelArgs),
    /// Retrieve diverse documents for a word at a timestamp.
    Retrieve(RetrieveArgs),
    /// Run the HTTP/JSON service.
    Serve(ServeArgs),
    /// Run a local OpenAI-compatible stub provider for testing.
    StubLlm(StubArgs),
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// JSONL file with `id`, `text` and `timestamp` fields.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory for the processed corpus.
    #[arg(long)]
    pub out: PathBuf,
    /// Newline-separated stopword list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Minimum joint count for a bigram [default: 5].
    #[arg(long)]
    pub min_count_bigram: Option<usize>,
    /// Minimum bigram score [default: 20].
    #[arg(long)]
    pub threshold_bigram: Option<f64>,
    /// Minimum token length in characters [default: 3].
    #[arg(long)]
    pub min_chars: Option<usize>,
    /// Minimum tokens for a document to be kept [default: 3].
    #[arg(long)]
    pub min_words_docs: Option<usize>,
    /// Keep only the N most document-frequent terms.
    #[arg(long)]
    pub max_vocab: Option<usize>,
    /// Drop terms appearing in fewer than N documents.
    #[arg(long)]
    pub min_doc_freq: Option<usize>,
    /// Keep edge punctuation on tokens.
    #[arg(long)]
    pub keep_punctuation: bool,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Processed corpus directory.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Model directory with `model_meta.json` and `beta.f32` or `beta.json`.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Top-N words per topic and timestamp [default: 10].
    #[arg(long)]
    pub topn: Option<usize>,
    /// Where to write the quality report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MembershipArg {
    /// Top-N at any timestamp.
    Any,
    /// Top-N of the time-averaged distribution.
    Averaged,
}

#[derive(Debug, Args)]
pub struct SalientArgs {
    /// Model directory.
    #[arg(long)]
    pub model: PathBuf,
    /// Directory holding `vocab.txt` and `timestamps.txt` [default: the model directory].
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Topic index.
    #[arg(long)]
    pub topic: usize,
    /// Candidate pool size [default: 500].
    #[arg(long)]
    pub pool: Option<usize>,
    /// Number of words to return.
    #[arg(long, default_value_t = 10)]
    pub limit: usize,
    /// Top-N used for topic membership [default: 10].
    #[arg(long)]
    pub topn: Option<usize>,
    /// How topic membership is decided for uniqueness.
    #[arg(long, value_enum)]
    pub membership: Option<MembershipArg>,
    /// Where to write the ranking.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Label only this topic; all topics otherwise.
    #[arg(long)]
    pub topic: Option<usize>,
    /// Top-N words per timestamp in the trajectory [default: 10].
    #[arg(long)]
    pub topn: Option<usize>,
    /// Cache root; the LLM cache lives in `<dir>/llm` [default: <corpus>/cache].
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RetrieveArgs {
    /// Processed corpus directory.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Query word (a vocabulary term, bigrams joined by `_`).
    #[arg(long)]
    pub word: String,
    /// Timestamp label, or its index when no label matches.
    #[arg(long)]
    pub time: String,
    /// Maximum results [default: 20].
    #[arg(long)]
    pub limit: Option<usize>,
    /// MMR trade-off in [0, 1] [default: 0.7].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Candidate cap before MMR [default: 200].
    #[arg(long)]
    pub candidates: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Listen port [default: 8080].
    #[arg(long)]
    pub port: Option<u16>,
    /// Listen address [default: 127.0.0.1].
    #[arg(long)]
    pub host: Option<String>,
    /// Label every topic before accepting requests.
    #[arg(long)]
    pub prelabel: bool,
    /// Serve static UI assets from this directory.
    #[arg(long = "static", value_name = "DIR")]
    pub static_dir: Option<PathBuf>,
    /// Allowed CORS origin; repeatable. Any origin when none given.
    #[arg(long = "cors", value_name = "ORIGIN")]
    pub cors: Vec<String>,
    /// Cache root [default: <corpus>/cache].
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StubArgs {
    /// Listen port; 0 picks a free one.
    #[arg(long, default_value_t = 0)]
    pub port: u16,
    /// Answer every request with this text.
    #[arg(long)]
    pub fixed: Option<String>,
}
