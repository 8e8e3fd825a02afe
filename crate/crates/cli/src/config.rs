//! Command-line flags, the optional TOML config file, and their merge.
//!
//! Every per-command option is an `Option` so that a flag given on the
//! command line wins over the same key in the file, which wins over the
//! built-in default.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "lchi",
    version,
    about = "Certify explicit bounds L(1, chi) <= c log q for quadratic characters and audit their inputs"
)]
pub struct Cli {
    /// TOML file supplying defaults; flags on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write the report to this path (atomically) instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Character-sum bound used for V: `fs` (default) or `lapkova`.
    #[arg(long, global = true, value_name = "SOURCE")]
    pub v_source: Option<String>,

    /// Directory holding binary sieve caches.
    #[arg(long, global = true, env = "LCHI_CACHE_DIR", value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Write `generated_at: null` so that reruns are byte-identical.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certify L(1, chi) <= c log q for every q >= q0 of one parity.
    Certify(CertifyArgs),
    /// Smallest certified q0 for each B on a grid.
    Sweep(SweepArgs),
    /// Smallest certified q0 for a single B.
    MinQ0(MinQ0Args),
    /// Weighted integral of |psi(u) - u| up to umax plus the analytic tail.
    DeltaIntegral(DeltaArgs),
    /// psi and psi-tilde bounds at every integer up to a limit.
    PsiAudit(PsiAuditArgs),
    /// Character-sum bounds against exhaustive oracles.
    CharsumAudit(CharsumArgs),
    /// Smoothing identities and lemma checks for small moduli.
    LemmaAudit(LemmaArgs),
    /// The four standard certifications in a single report.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Certify(_) => "certify",
            Command::Sweep(_) => "sweep",
            Command::MinQ0(_) => "min-q0",
            Command::DeltaIntegral(_) => "delta-integral",
            Command::PsiAudit(_) => "psi-audit",
            Command::CharsumAudit(_) => "charsum-audit",
            Command::LemmaAudit(_) => "lemma-audit",
            Command::Report(_) => "report",
        }
    }
}

macro_rules! mergeable {
    ($t:ident { $($f:ident),* $(,)? }) => {
        impl $t {
            /// Fields set here win over the ones in `file`.
            pub fn or(self, file: Self) -> Self {
                $t { $($f: self.$f.or(file.$f)),* }
            }
        }
    };
}

#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CertifyArgs {
    /// Modulus threshold, e.g. `2e23`.
    #[arg(long)]
    pub q0: Option<String>,
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: Option<f64>,
    /// `even` or `odd`.
    #[arg(long)]
    pub parity: Option<String>,
    /// Target coefficient.
    #[arg(long)]
    pub c: Option<f64>,
}
mergeable!(CertifyArgs { q0, b, parity, c });

#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SweepArgs {
    #[arg(long)]
    pub parity: Option<String>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Comma-separated values or `start:stop:step` (default `40:200:1`).
    #[arg(long)]
    pub b_grid: Option<String>,
}
mergeable!(SweepArgs { parity, c, b_grid });

#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct MinQ0Args {
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: Option<f64>,
    #[arg(long)]
    pub parity: Option<String>,
    #[arg(long)]
    pub c: Option<f64>,
}
mergeable!(MinQ0Args { b, parity, c });

#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DeltaArgs {
    /// Upper end of the exact part (default `1e6`).
    #[arg(long)]
    pub umax: Option<String>,
    /// Start of the analytic tail, a number or `exp(L)` (default `exp(500)`).
    #[arg(long)]
    pub x1: Option<String>,
    /// Pass threshold for the exact part (default 0.408).
    #[arg(long)]
    pub max_partial: Option<f64>,
    /// Pass threshold for the total (default 0.411).
    #[arg(long)]
    pub max_total: Option<f64>,
}
mergeable!(DeltaArgs { umax, x1, max_partial, max_total });

#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PsiAuditArgs {
    /// Range end for the psi checks (default `1e7`).
    #[arg(long)]
    pub limit: Option<String>,
    /// Range end for the psi-tilde checks (default `1e6`).
    #[arg(long)]
    pub psitilde_limit: Option<String>,
}
mergeable!(PsiAuditArgs { limit, psitilde_limit });

#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CharsumArgs {
    #[arg(long)]
    pub d_min: Option<u64>,
    #[arg(long)]
    pub d_max: Option<u64>,
    /// Random (M, N) pairs per discriminant.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest modulus the exhaustive oracles accept.
    #[arg(long)]
    pub cap: Option<u64>,
}
mergeable!(CharsumArgs { d_min, d_max, samples, seed, cap });

#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct LemmaArgs {
    #[arg(long)]
    pub d_min: Option<u64>,
    #[arg(long)]
    pub d_max: Option<u64>,
    /// Use every n-th discriminant for the fixed-H checks.
    #[arg(long)]
    pub stride: Option<usize>,
    /// H for the xF(x) comparison.
    #[arg(long)]
    pub l7_h: Option<f64>,
    /// Comma-separated multiples of q used as H for the L(1, chi) check.
    #[arg(long)]
    pub h_factors: Option<String>,
    /// Comma-separated points x in [0, 1].
    #[arg(long)]
    pub xs: Option<String>,
}
mergeable!(LemmaArgs { d_min, d_max, stride, l7_h, h_factors, xs });

#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportArgs {}

impl ReportArgs {
    pub fn or(self, _file: Self) -> Self {
        self
    }
}

/// Contents of the `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub v_source: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub no_timestamp: Option<bool>,
    #[serde(default)]
    pub certify: CertifyArgs,
    #[serde(default)]
    pub sweep: SweepArgs,
    #[serde(default)]
    pub min_q0: MinQ0Args,
    #[serde(default)]
    pub delta_integral: DeltaArgs,
    #[serde(default)]
    pub psi_audit: PsiAuditArgs,
    #[serde(default)]
    pub charsum_audit: CharsumArgs,
    #[serde(default)]
    pub lemma_audit: LemmaArgs,
    #[serde(default)]
    pub report: ReportArgs,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }
}

/// Options shared by every command after merging flags and file.
#[derive(Debug, Clone)]
pub struct Common {
    pub output: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
    pub v_source: lchi::VSource,
    pub cache_dir: Option<PathBuf>,
    pub timestamp: bool,
}

/// Applies the file to the parsed flags. Returns the shared options and the
/// command with its arguments filled in from the file.
pub fn merge(cli: Cli) -> Result<(Common, Command), String> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let v_source = match cli.v_source.or(file.v_source).as_deref() {
        None | Some("fs") | Some("frolenkov-soundararajan") => lchi::VSource::FrolenkovSoundararajan,
        Some("lapkova") => lchi::VSource::Lapkova,
        Some(other) => return Err(format!("--v-source must be `fs` or `lapkova`, got `{other}`")),
    };
    let threads = cli.threads.or(file.threads);
    if threads == Some(0) {
        return Err("--threads must be at least 1".into());
    }
    let common = Common {
        output: cli.output.or(file.output),
        format: cli.format.or(file.format).unwrap_or(Format::Json),
        threads,
        v_source,
        cache_dir: cli.cache_dir.or(file.cache_dir),
        timestamp: !(cli.no_timestamp || file.no_timestamp.unwrap_or(false)),
    };
    let command = match cli.command {
        Command::Certify(a) => Command::Certify(a.or(file.certify)),
        Command::Sweep(a) => Command::Sweep(a.or(file.sweep)),
        Command::MinQ0(a) => Command::MinQ0(a.or(file.min_q0)),
        Command::DeltaIntegral(a) => Command::DeltaIntegral(a.or(file.delta_integral)),
        Command::PsiAudit(a) => Command::PsiAudit(a.or(file.psi_audit)),
        Command::CharsumAudit(a) => Command::CharsumAudit(a.or(file.charsum_audit)),
        Command::LemmaAudit(a) => Command::LemmaAudit(a.or(file.lemma_audit)),
        Command::Report(a) => Command::Report(a.or(file.report)),
    };
    Ok((common, command))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("lchi").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(
            &path,
            "format = \"csv\"\n[certify]\nq0 = \"7e22\"\nB = 51\nparity = \"even\"\nc = 0.5\n",
        )
        .unwrap();
        let cli = parse(&["certify", "--B", "60", "--config", path.to_str().unwrap()]);
        let (common, cmd) = merge(cli).unwrap();
        assert_eq!(common.format, Format::Csv);
        let Command::Certify(a) = cmd else { panic!() };
        assert_eq!(a.b, Some(60.0));
        assert_eq!(a.q0.as_deref(), Some("7e22"));
        assert_eq!(a.parity.as_deref(), Some("even"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "[certify]\nq = 3\n").unwrap();
        let cli = parse(&["report", "--config", path.to_str().unwrap()]);
        assert!(merge(cli).unwrap_err().contains("unknown field"));
    }

    #[test]
    fn bad_v_source() {
        let cli = parse(&["report", "--v-source", "x"]);
        assert!(merge(cli).is_err());
    }
}
