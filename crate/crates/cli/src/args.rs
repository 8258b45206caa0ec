use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

/// Phonetic and cluster encodings for translation corpora, with the
/// geometry, augmentation and scoring tools around them.
///
/// Logging goes to stderr and is controlled by -v only.
#[derive(Debug, Parser)]
#[command(name = "phonetic-mt", version, propagate_version = true)]
pub struct Cli {
    /// Seed for randomized commands, or `auto` to draw one and report it.
    #[arg(long, global = true, value_name = "N|auto")]
    pub seed: Option<SeedArg>,

    /// JSON object of flag names to values. Flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedArg {
    Fixed(u64),
    Auto,
}

impl FromStr for SeedArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(SeedArg::Auto);
        }
        s.parse()
            .map(SeedArg::Fixed)
            .map_err(|_| format!("expected a non-negative integer or `auto`, got {s:?}"))
    }
}

impl fmt::Display for SeedArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedArg::Fixed(n) => write!(f, "{n}"),
            SeedArg::Auto => f.write_str("auto"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode whitespace-tokenized lines (stdin or --input) to codes.
    Encode(EncodeArgs),
    /// Build a random or K-Means cluster model.
    Cluster(ClusterArgs),
    /// Learn, apply or undo byte-pair encoding.
    #[command(subcommand)]
    Bpe(BpeCommand),
    /// End-to-end corpus preparation.
    #[command(subcommand)]
    Pipeline(PipelineCommand),
    /// Embeddings, projection and group geometry measures.
    #[command(subcommand)]
    Geometry(GeometryCommand),
    /// Corpus noise and test-set perturbation.
    #[command(subcommand)]
    Augment(AugmentCommand),
    /// BLEU and vocabulary statistics.
    #[command(subcommand)]
    Eval(EvalCommand),
}

#[derive(Debug, Args)]
pub struct Io {
    /// Input file; standard input when omitted.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// soundex, nysiis, nysiis6, metaphone, pinyin, wubi or cluster.
    #[arg(long)]
    pub codec: String,
    /// Character table for pinyin and wubi.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Emit table codes as single letters.
    #[arg(long)]
    pub letters: bool,
    /// Cluster model for the cluster codec.
    #[arg(long)]
    pub clusters: Option<PathBuf>,
    #[command(flatten)]
    pub io: Io,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClusterMethod {
    /// Sizes copied from a phonetic baseline.
    Random,
    /// round(fraction x |units|) clusters of near-equal size.
    Uniform,
    /// K-Means over embedding vectors.
    Kmeans,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long, value_enum, default_value_t = ClusterMethod::Random)]
    pub method: ClusterMethod,
    /// Corpus whose vocabulary is clustered (random, uniform).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// One unit per line, instead of --corpus.
    #[arg(long, conflicts_with = "corpus")]
    pub units: Option<PathBuf>,
    /// Phonetic codec whose group sizes are copied.
    #[arg(long, default_value = "metaphone")]
    pub baseline: String,
    /// Cluster count as a fraction of the vocabulary (uniform).
    #[arg(long)]
    pub fraction: Option<f64>,
    /// Embedding vectors to cluster (kmeans).
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Number of clusters (kmeans); defaults to the number of --baseline codes.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Where K-Means centroids go.
    #[arg(long)]
    pub centroids: Option<PathBuf>,
    /// Model or assignment file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum BpeCommand {
    /// Learn merge operations from a corpus.
    Learn {
        #[arg(long)]
        operations: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Segment a corpus with learned merges.
    Apply {
        #[arg(long)]
        merges: PathBuf,
        /// Continuation marker on non-final pieces.
        #[arg(long, default_value = "@@")]
        marker: String,
        #[command(flatten)]
        io: Io,
    },
    /// Join segmented pieces back into words.
    Decode {
        #[arg(long)]
        merges: PathBuf,
        #[arg(long, default_value = "@@")]
        marker: String,
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Debug, Subcommand)]
pub enum PipelineCommand {
    /// Run every stage from a pipeline config or an earlier run's manifest.
    Run {
        /// Pipeline config JSON or manifest.json.
        #[arg(long)]
        from: PathBuf,
        /// Artifact directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("grouping").required(true).args(["groups", "codec"])))]
pub struct GroupArgs {
    /// Projected points, `unit<TAB>x<TAB>y` per line.
    #[arg(long)]
    pub points: PathBuf,
    /// `unit<TAB>group` per line.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    /// Group units by this phonetic codec instead of --groups.
    #[arg(long)]
    pub codec: Option<String>,
}

#[derive(Debug, Args)]
pub struct HullArgs {
    /// Neighbour threshold: a fraction of the points below 1, a count from 1.
    #[arg(long, requires = "radius")]
    pub beta: Option<f64>,
    /// Neighbourhood radius for smoothing.
    #[arg(long, requires = "beta")]
    pub radius: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum GeometryCommand {
    /// Train PPMI+SVD embeddings on a corpus.
    Embed {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        window: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Project vectors to the plane with PCA.
    Project {
        /// Vector file, `unit v1 ... vd` per line.
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Concentration factor of the groups.
    Gamma {
        #[command(flatten)]
        groups: GroupArgs,
    },
    /// Nearest-neighbour density inside the hull of all points.
    Density {
        #[command(flatten)]
        groups: GroupArgs,
        #[command(flatten)]
        hull: HullArgs,
        /// Neighbour indices to report.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        neighbors: Vec<usize>,
        /// Maximum number of samples.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        /// Stop when every running mean moves less than this.
        #[arg(long, default_value_t = 0.001)]
        threshold: f64,
    },
    /// Distribution of per-group hull volumes.
    Cdf {
        #[command(flatten)]
        groups: GroupArgs,
        #[command(flatten)]
        hull: HullArgs,
    },
    /// Cumulative hull volume as groups are added in random order.
    Coverage {
        #[command(flatten)]
        groups: GroupArgs,
        #[command(flatten)]
        hull: HullArgs,
        /// Average the curve over this many orders.
        #[arg(long, default_value_t = 1)]
        orders: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoundingArg {
    Stochastic,
    Ceil,
}

#[derive(Debug, Subcommand)]
pub enum AugmentCommand {
    /// Replace a fraction of words by embedding neighbours.
    Noise {
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        fraction: f64,
        #[arg(long, default_value_t = 10)]
        top_n: usize,
        #[arg(long, value_enum, default_value_t = RoundingArg::Stochastic)]
        rounding: RoundingArg,
        /// Where the run manifest goes.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        io: Io,
    },
    /// Apply k random word edits to every sentence.
    Perturb {
        #[arg(long)]
        k: usize,
        /// Insertion and substitution words, one per line; the input
        /// vocabulary when omitted.
        #[arg(long)]
        vocab: Option<PathBuf>,
        /// Relative weights of deletion, substitution and insertion.
        #[arg(long, value_delimiter = ',', num_args = 3)]
        weights: Option<Vec<f64>>,
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Corpus BLEU-4.
    Bleu {
        #[arg(long)]
        hyp: PathBuf,
        /// Reference file; repeat for several references.
        #[arg(long = "ref", required = true)]
        refs: Vec<PathBuf>,
        /// Add-one smoothing for orders 2 to 4.
        #[arg(long)]
        smooth: bool,
    },
    /// Unique and total token counts per file.
    Vocab {
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
    },
}
