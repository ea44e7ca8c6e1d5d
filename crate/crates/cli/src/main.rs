use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use agqss_core::analyzer::{Analysis, AnalyzerError};
use agqss_core::classical_ss::{self, ClassicalError, Reconstruction, RNG_ALGORITHM};
use agqss_core::config::{ConfigError, Instance};
use agqss_core::qsim::{Caps, Mode};
use agqss_core::scheme::Thresholds;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

const TOOL_VERSION: &str = concat!("agqss ", env!("CARGO_PKG_VERSION"));

const EXIT_OTHER: u8 = 1;
const EXIT_SCHEMA: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_CONSISTENCY: u8 = 4;
const EXIT_AMBIGUOUS: u8 = 5;

#[derive(Parser)]
#[command(
    name = "agqss",
    version,
    about = "Quantum ramp secret sharing from AG code pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config and print a one-line summary.
    Validate { config: PathBuf },
    /// Print the resolved instance and its generator matrices as JSON.
    Build {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the closed-form thresholds.
    Thresholds { config: PathBuf },
    /// Sweep all share subsets and write a report.
    Analyze {
        config: PathBuf,
        #[arg(long)]
        mode: Option<Mode>,
        /// Emit every subset and every (I, J) pair.
        #[arg(long)]
        full: bool,
        /// Operator size cap for the oracle path.
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Deal classical shares for a secret.
    Deal {
        config: PathBuf,
        /// Comma-separated element reprs, one per secret digit.
        #[arg(long)]
        secret: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated 1-based share indices to keep (default: all).
        #[arg(long)]
        subset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the secret from a share file.
    Reconstruct {
        config: PathBuf,
        #[arg(long)]
        shares: PathBuf,
        /// Comma-separated 1-based share indices to use (default: all in the file).
        #[arg(long)]
        subset: Option<String>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShareFile {
    tool_version: String,
    instance_hash: String,
    field: Value,
    rng: String,
    seed: u64,
    #[serde(rename = "J")]
    j: Vec<usize>,
    values: Vec<u8>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let code = match e {
            ConfigError::Io { .. } => EXIT_OTHER,
            _ => EXIT_SCHEMA,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<AnalyzerError> for Failure {
    fn from(e: AnalyzerError) -> Self {
        let code = if e.is_cap_violation() {
            EXIT_CAP
        } else if e.is_disagreement() {
            EXIT_CONSISTENCY
        } else {
            EXIT_OTHER
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ClassicalError> for Failure {
    fn from(e: ClassicalError) -> Self {
        let code = match e {
            ClassicalError::CapExceeded { .. } => EXIT_CAP,
            ClassicalError::NotACodeword => EXIT_CONSISTENCY,
            _ => EXIT_SCHEMA,
        };
        Failure::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return ExitCode::from(EXIT_OTHER);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("AGQSS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("AGQSS_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { config } => {
            let inst = Instance::load(&config)?;
            let cp = &inst.code_pair;
            println!(
                "ok {} q={} genus={} u={} n={} L={} dim C1={} dim C2={} instance {}",
                TOOL_VERSION,
                cp.field().order(),
                cp.params().curve.genus(),
                cp.params().u,
                cp.n(),
                cp.l(),
                cp.dim_c1(),
                cp.dim_c2(),
                inst.hash
            );
            Ok(())
        }
        Command::Build { config, out } => {
            let inst = Instance::load(&config)?;
            let cp = &inst.code_pair;
            let basis: Vec<Value> = cp
                .rr_basis()
                .monomials
                .iter()
                .map(|m| json!([m.a, m.b]))
                .collect();
            let doc = json!({
                "tool_version": TOOL_VERSION,
                "instance_hash": inst.hash,
                "instance": inst.canonical,
                "genus": cp.params().curve.genus(),
                "rr_basis": basis,
                "dim_c1": cp.dim_c1(),
                "dim_c2": cp.dim_c2(),
                "g1": cp.g1().row_vectors(),
                "g2": cp.g2().row_vectors(),
            });
            emit(out.as_deref(), &pretty(&doc))
        }
        Command::Thresholds { config } => {
            let inst = Instance::load(&config)?;
            println!("{TOOL_VERSION} instance {}", inst.hash);
            println!("{}", threshold_line(&inst.code_pair.params().thresholds()));
            Ok(())
        }
        Command::Analyze {
            config,
            mode,
            full,
            cap,
            out,
            format,
        } => analyze(&config, mode, full, cap, out.as_deref(), format),
        Command::Deal {
            config,
            secret,
            seed,
            subset,
            out,
        } => {
            let inst = Instance::load(&config)?;
            let cp = &inst.code_pair;
            let secret = parse_list::<u8>("--secret", &secret)?;
            let seed = seed.unwrap_or(inst.config.seed);
            let shares = classical_ss::deal(cp, &secret, seed)?;
            let j = match subset {
                Some(s) => parse_subset(&s, cp.n())?,
                None => (0..cp.n()).collect(),
            };
            let file = ShareFile {
                tool_version: TOOL_VERSION.to_string(),
                instance_hash: inst.hash.clone(),
                field: inst.canonical["field"].clone(),
                rng: RNG_ALGORITHM.to_string(),
                seed,
                j: j.iter().map(|i| i + 1).collect(),
                values: j.iter().map(|&i| shares.values[i]).collect(),
            };
            let text = serde_json::to_string_pretty(&file).expect("share file serializes") + "\n";
            emit(out.as_deref(), &text)
        }
        Command::Reconstruct {
            config,
            shares,
            subset,
        } => {
            let inst = Instance::load(&config)?;
            let cp = &inst.code_pair;
            let text = std::fs::read_to_string(&shares)
                .map_err(|e| Failure::new(EXIT_OTHER, format!("cannot read {}: {e}", shares.display())))?;
            let file: ShareFile = serde_json::from_str(&text)
                .map_err(|e| Failure::new(EXIT_SCHEMA, format!("share file {}: {e}", shares.display())))?;
            if file.instance_hash != inst.hash {
                return Err(Failure::new(
                    EXIT_CONSISTENCY,
                    format!(
                        "share file was dealt for instance {} but the config is instance {}",
                        file.instance_hash, inst.hash
                    ),
                ));
            }
            if file.j.len() != file.values.len() {
                return Err(Failure::new(
                    EXIT_SCHEMA,
                    "share file has different numbers of indices and values",
                ));
            }
            let available: Vec<usize> = file
                .j
                .iter()
                .map(|&i| {
                    i.checked_sub(1)
                        .ok_or_else(|| Failure::new(EXIT_SCHEMA, "share indices are 1-based"))
                })
                .collect::<Result<_, _>>()?;
            let j = match subset {
                Some(s) => parse_subset(&s, cp.n())?,
                None => available.clone(),
            };
            let values = j
                .iter()
                .map(|i| {
                    available
                        .iter()
                        .position(|a| a == i)
                        .map(|pos| file.values[pos])
                        .ok_or_else(|| {
                            Failure::new(EXIT_SCHEMA, format!("share {} is not in the share file", i + 1))
                        })
                })
                .collect::<Result<Vec<u8>, _>>()?;
            match classical_ss::reconstruct(cp, &j, &values)? {
                Reconstruction::Secret(s) => {
                    let doc = json!({
                        "tool_version": TOOL_VERSION,
                        "instance_hash": inst.hash,
                        "J": j.iter().map(|i| i + 1).collect::<Vec<_>>(),
                        "secret": s,
                    });
                    print!("{}", pretty(&doc));
                    Ok(())
                }
                Reconstruction::Ambiguous { consistent_secrets } => Err(Failure::new(
                    EXIT_AMBIGUOUS,
                    format!("ambiguous: the shares are consistent with {consistent_secrets} secrets"),
                )),
            }
        }
    }
}

fn analyze(
    config: &Path,
    mode: Option<Mode>,
    full: bool,
    cap: Option<u64>,
    out: Option<&Path>,
    format: Format,
) -> Result<(), Failure> {
    let inst = Instance::load(config)?;
    let mode = mode.unwrap_or(inst.config.mode);
    let caps = Caps {
        operator: cap.unwrap_or(inst.config.caps.operator),
        ..inst.config.caps
    };
    let analysis = Analysis::run(&inst.code_pair, mode, &caps)?;
    let text = match format {
        Format::Json => {
            let instance = json!({"hash": inst.hash, "resolved": inst.canonical});
            pretty(&analysis.to_json(instance, TOOL_VERSION, full))
        }
        Format::Csv => analysis
            .to_csv(&inst.hash, TOOL_VERSION)
            .map_err(|e| Failure::new(EXIT_OTHER, e.to_string()))?,
    };
    emit(out, &text)?;
    if analysis.is_sound() {
        Ok(())
    } else {
        let s = analysis.soundness();
        Err(Failure::new(
            EXIT_CONSISTENCY,
            format!(
                "soundness check failed (strong bound={}, qualified bound={}, forbidden bound={}, monotone={}, disjoint={})",
                s.strong_bound,
                s.qualified_bound,
                s.forbidden_bound,
                analysis.access.monotone && analysis.strong.monotone,
                analysis.access.disjoint
            ),
        ))
    }
}

fn threshold_line(t: &Thresholds) -> String {
    let mut line = format!("forbidden ≤ {}", t.t_forbidden);
    if t.forbidden_vacuous() {
        line.push_str(" (vacuous)");
    }
    write!(line, ", qualified ≥ {}", t.t_qualified).unwrap();
    if t.qualified_vacuous() {
        line.push_str(" (vacuous)");
    }
    let offset = match t.t_forbidden {
        x if x < 0 => format!("k{x}"),
        x => format!("k+{x}"),
    };
    write!(line, ", strong(|Ī|=k): ≤ {offset}").unwrap();
    line
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::new(EXIT_OTHER, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_list<T: std::str::FromStr>(flag: &str, raw: &str) -> Result<Vec<T>, Failure> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Failure::new(EXIT_SCHEMA, format!("{flag}: cannot parse {s:?}")))
        })
        .collect()
}

fn parse_subset(raw: &str, n: usize) -> Result<Vec<usize>, Failure> {
    let mut j = Vec::new();
    for i in parse_list::<usize>("--subset", raw)? {
        if i == 0 || i > n {
            return Err(Failure::new(
                EXIT_SCHEMA,
                format!("--subset: share {i} is outside 1..={n}"),
            ));
        }
        if j.contains(&(i - 1)) {
            return Err(Failure::new(EXIT_SCHEMA, format!("--subset: share {i} repeated")));
        }
        j.push(i - 1);
    }
    j.sort_unstable();
    Ok(j)
}
