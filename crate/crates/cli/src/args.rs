use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "capcont",
    version,
    about = "Channel distances, entropies, capacity proxies and continuity checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Root seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit a versioned JSON report on stdout.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV (trend tables only).
    #[arg(long, global = true)]
    pub csv: bool,
    /// Hermiticity tolerance (recorded in the report only).
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_herm: Option<f64>,
    /// Unit-trace tolerance (recorded in the report only).
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_trace: Option<f64>,
    /// Smallest accepted Choi eigenvalue when reading channel files.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_psd: Option<f64>,
    /// Trace-preservation slack when reading channel files.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_tp: Option<f64>,
    /// Slack before an entropy inequality counts as violated.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_ent: Option<f64>,
    /// Relative gap for an optimal diamond-norm solve.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_sdp: Option<f64>,
    /// Allowed optimizer shortfall (recorded in the report only).
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_opt: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Channel distances.
    #[command(subcommand)]
    Norm(NormCmd),
    /// Entropies of a state read from a JSON file.
    Entropy(EntropyArgs),
    /// Entropic quantities at a given input.
    #[command(subcommand)]
    Info(InfoCmd),
    /// Optimized single-letter (or n-copy) capacity proxies.
    #[command(subcommand)]
    Capacity(CapacityCmd),
    /// Randomized checks of the continuity bounds.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Truncated discontinuity examples.
    #[command(subcommand)]
    Demo(DemoCmd),
    /// Rate arithmetic for assisted capacities.
    #[command(subcommand)]
    Assisted(AssistedCmd),
}

#[derive(Debug, Subcommand)]
pub enum NormCmd {
    /// `‖A − B‖⋄` by semidefinite programming, with a probe lower bound.
    Diamond(DiamondArgs),
}

#[derive(Debug, Args)]
pub struct DiamondArgs {
    #[arg(long)]
    pub channel_a: String,
    #[arg(long)]
    pub channel_b: String,
    /// Random pure inputs tried by the lower-bound probe.
    #[arg(long, default_value_t = 16)]
    pub probe_trials: usize,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// State JSON file (density matrix or pure vector).
    #[arg(long)]
    pub state: String,
    /// Also report `S(A|B)` and `I(A;B)` with `A` the first SPLIT factors.
    #[arg(long)]
    pub split: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum InfoCmd {
    /// `I^coh` at a state on `A ⊗ A'`.
    Coherent {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        state: String,
    },
    /// `I(X;B)` of an ensemble.
    Holevo {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        ensemble: String,
    },
    /// `I(X;B) − I(X;E)` of an ensemble.
    Private {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        ensemble: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum CapacityCmd {
    Coherent(CapacityArgs),
    Holevo(CapacityArgs),
    Private(CapacityArgs),
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(long)]
    pub channel: String,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    /// Number of ensemble states (default min(d², 16)).
    #[arg(long)]
    pub ensemble_size: Option<usize>,
    /// Optimize over `N^{⊗n}` and report per-copy values.
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Output-entropy bound `n(4ε log d_B + 2H(ε))` with hybrid-step checks.
    OutputEntropy(PairArgs),
    /// Fixed-parameter capacity-term checks (and optimized comparisons).
    Corollaries(CorollaryArgs),
    /// Fannes inequality on random state pairs.
    Fannes(FannesArgs),
    /// Alicki-Fannes inequality on random bipartite state pairs.
    Af(AfArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long, requires = "channel_b", conflicts_with = "random_pairs")]
    pub channel_a: Option<String>,
    #[arg(long, requires = "channel_a")]
    pub channel_b: Option<String>,
    /// Sample this many pairs `M = (1−q)N + qR` instead of reading channels.
    #[arg(long)]
    pub random_pairs: Option<usize>,
    /// Input and output dimension of sampled pairs.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Print every report, not only failures.
    #[arg(long)]
    pub all_reports: bool,
}

#[derive(Debug, Args)]
pub struct CorollaryArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value_t = 4)]
    pub ensemble_size: usize,
    /// Also compare optimized single-letter values with the capacity bounds.
    #[arg(long)]
    pub optimize: bool,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
}

#[derive(Debug, Args)]
pub struct FannesArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct AfArgs {
    /// Bipartite dimensions as `d_AxD_B`.
    #[arg(long, value_delimiter = ',', default_value = "2x2,2x4,4x2,4x4")]
    pub dims: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Debug, Subcommand)]
pub enum DemoCmd {
    /// Distance, capacity lower bounds and capacity bound for n = 2..=n_max.
    Discontinuity {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum AssistedCmd {
    /// Simulation and mutual-gap bounds from mixing weights.
    Bounds(BoundsArgs),
    /// `Q₂` and back-assisted bounds of the qubit erasure channel.
    Erasure {
        /// Single erasure probability; omit for a grid.
        #[arg(long)]
        p: Option<f64>,
        /// Grid points on [0, 1] when `--p` is absent.
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// `Q₂(N)`, required to be positive.
    #[arg(long)]
    pub q2n: f64,
    #[arg(long)]
    pub p1: f64,
    #[arg(long)]
    pub p2: Option<f64>,
    /// `Q₂(M)`; the gap bound assumes the worst case 0 when absent.
    #[arg(long)]
    pub q2m: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub logd: f64,
    /// Target accuracy for the continuity radius.
    #[arg(long, requires = "radius")]
    pub eps: Option<f64>,
    /// Radius `Δ` of the ball where the mixing decomposition holds.
    #[arg(long, requires = "eps")]
    pub radius: Option<f64>,
}
