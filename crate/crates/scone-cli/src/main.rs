//! Command-line surface for the scone transcoder: file encode/decode through
//! the constrained DNA channel, corpus evaluation, constraint ablations, and
//! statistics over external FASTA files.
//!
//! Exit codes are a stable contract for scripting: 0 on success, 1 for data
//! errors (unreadable input, corrupt records, constraint violations), 2 for
//! usage errors (bad flags or configuration).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use scone::{
    corpus_eval, corpus_payload, generate_strand, pack_strand, read_fasta,
    read_record, rows_to_csv, strand_stats, write_fasta, write_record, BasePmf, ConfigWarning,
    ConstraintConfig, CorpusEval, CorpusStats, FastaEntry, LatentAdapterConfig, Payload,
    ProbabilityProvider, ProviderId, StaticProvider, StrandRecord, UniformProvider,
};

#[derive(Parser)]
#[command(
    name = "scone",
    version,
    about = "Constraint-aware DNA transcoding: encode, decode, evaluate, ablate, and inspect"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a file (or latent symbols) into a DNA strand record
    Encode(EncodeArgs),
    /// Decode a strand record back into bytes (or latent symbols)
    Decode(DecodeArgs),
    /// Generate a seeded corpus and report aggregate quality metrics
    Eval(EvalArgs),
    /// Compare the full coder against its constraint-ablated variants
    Ablate(AblateArgs),
    /// Per-strand statistics and violation checks for a FASTA corpus
    Stats(StatsArgs),
}

/// Constraint flags shared by every subcommand. Omitted flags fall back to
/// the config file (when given), then to the library defaults.
#[derive(Args, Clone, Default)]
struct ConstraintArgs {
    /// Lower GC bound in per-mille (default 450)
    #[arg(long, value_name = "PERMILLE")]
    gc_lo: Option<u16>,
    /// Upper GC bound in per-mille (default 550)
    #[arg(long, value_name = "PERMILLE")]
    gc_hi: Option<u16>,
    /// GC window length in bases (default 20)
    #[arg(long, value_name = "BASES")]
    window: Option<u8>,
    /// Maximum homopolymer run length (default 3)
    #[arg(long, value_name = "BASES")]
    hp_max: Option<u8>,
    /// Guard bits appended for termination (default 32)
    #[arg(long, value_name = "BITS")]
    guard_bits: Option<u8>,
    /// Disable the GC-balance rule
    #[arg(long)]
    no_gc: bool,
    /// Disable the homopolymer rule
    #[arg(long)]
    no_hp: bool,
    /// Reserve an in-band escape slot for termination (best effort; strands
    /// that stop on the escape lose their tail)
    #[arg(long)]
    eos: bool,
    /// Key=value file with the long flag names above; explicit flags win
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    /// Input file: raw bytes, or a JSON array of integers with --latent
    input: PathBuf,
    /// Output record path (default: INPUT.scn1)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Also write the strand as FASTA
    #[arg(long, value_name = "FILE")]
    fasta: Option<PathBuf>,
    /// JSON side-file describing the latent channel model: an object with
    /// mu, sigma, k_min, k_max, digits, and an optional "coded" flag
    #[arg(long, value_name = "FILE", conflicts_with = "pmf")]
    latent: Option<PathBuf>,
    /// Static per-base weights "A,T,G,C" for the strand coder
    #[arg(long, value_name = "W,W,W,W")]
    pmf: Option<String>,
    #[command(flatten)]
    constraints: ConstraintArgs,
}

#[derive(Args)]
struct DecodeArgs {
    /// Input .scn1 record
    record: PathBuf,
    /// Output path (default: RECORD with extension .dec)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Number of strands in the corpus
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Payload length in quaternary symbols (2 bits each)
    #[arg(long, default_value_t = 100)]
    len: usize,
    /// Corpus seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads (default: one per core)
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Write the JSON report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write per-strand rows as CSV
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Dump every generated strand as FASTA
    #[arg(long, value_name = "FILE")]
    fasta: Option<PathBuf>,
    #[command(flatten)]
    constraints: ConstraintArgs,
}

#[derive(Args)]
struct AblateArgs {
    /// Number of strands per variant
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Payload length in quaternary symbols (2 bits each)
    #[arg(long, default_value_t = 100)]
    len: usize,
    /// Corpus seed (shared by all variants)
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads (default: one per core)
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Write the JSON report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    constraints: ConstraintArgs,
}

#[derive(Args)]
struct StatsArgs {
    /// Input FASTA file
    #[arg(long, value_name = "FILE")]
    fasta: PathBuf,
    /// Write the JSON report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write per-strand rows as CSV
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    #[command(flatten)]
    constraints: ConstraintArgs,
}

enum CliError {
    Usage(String),
    Data(String),
}

type CliResult<T> = Result<T, CliError>;

fn usage_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn data_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Data(msg.into()))
}

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

impl ConstraintArgs {
    fn resolve(&self) -> CliResult<ConstraintConfig> {
        let mut cfg = ConstraintConfig::default();
        if let Some(path) = &self.config {
            apply_config_file(&mut cfg, path)?;
        }
        if let Some(v) = self.gc_lo {
            cfg.gc_lo = v;
        }
        if let Some(v) = self.gc_hi {
            cfg.gc_hi = v;
        }
        if let Some(v) = self.window {
            cfg.window = v;
        }
        if let Some(v) = self.hp_max {
            cfg.hp_max = v;
        }
        if let Some(v) = self.guard_bits {
            cfg.guard_bits = v;
        }
        if self.no_gc {
            cfg.gc_enabled = false;
        }
        if self.no_hp {
            cfg.hp_enabled = false;
        }
        if self.eos {
            cfg.eos_mode = true;
        }
        match cfg.validate() {
            Ok(warnings) => {
                for w in warnings {
                    match w {
                        ConfigWarning::RelaxationPossible => eprintln!(
                            "warning: window * (gc_hi - gc_lo) < 1000: the GC band may hold \
                             no reachable count and the fail-safe relaxation can fire"
                        ),
                    }
                }
                Ok(cfg)
            }
            Err(e) => usage_err(e.to_string()),
        }
    }
}

/// Applies `key=value` lines (with `#` comments) to the config. Keys use the
/// long flag names: gc_lo, gc_hi, window, hp_max, guard_bits, gc_enabled,
/// hp_enabled, eos_mode.
fn apply_config_file(cfg: &mut ConstraintConfig, path: &Path) -> CliResult<()> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return usage_err(format!(
                "{}:{}: expected key=value, got {raw:?}",
                path.display(),
                lineno + 1
            ));
        };
        let key = key.trim();
        let value = value.trim();
        let parse_failure = |e: String| {
            CliError::Usage(format!(
                "{}:{}: bad value for {key}: {e}",
                path.display(),
                lineno + 1
            ))
        };
        match key {
            "gc_lo" => cfg.gc_lo = value.parse().map_err(|e: std::num::ParseIntError| parse_failure(e.to_string()))?,
            "gc_hi" => cfg.gc_hi = value.parse().map_err(|e: std::num::ParseIntError| parse_failure(e.to_string()))?,
            "window" => cfg.window = value.parse().map_err(|e: std::num::ParseIntError| parse_failure(e.to_string()))?,
            "hp_max" => cfg.hp_max = value.parse().map_err(|e: std::num::ParseIntError| parse_failure(e.to_string()))?,
            "guard_bits" => cfg.guard_bits = value.parse().map_err(|e: std::num::ParseIntError| parse_failure(e.to_string()))?,
            "gc_enabled" => cfg.gc_enabled = value.parse().map_err(|e: std::str::ParseBoolError| parse_failure(e.to_string()))?,
            "hp_enabled" => cfg.hp_enabled = value.parse().map_err(|e: std::str::ParseBoolError| parse_failure(e.to_string()))?,
            "eos_mode" => cfg.eos_mode = value.parse().map_err(|e: std::str::ParseBoolError| parse_failure(e.to_string()))?,
            other => {
                return usage_err(format!(
                    "{}:{}: unknown config key {other:?}",
                    path.display(),
                    lineno + 1
                ))
            }
        }
    }
    Ok(())
}

/// Latent channel metadata carried in the record params so decode can invert
/// the symbol mapping. `count` is the number of symbols; `coded` selects the
/// entropy-coded packing instead of the fixed two-bit digits.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct LatentParams {
    mu: f64,
    sigma: f64,
    k_min: i64,
    k_max: i64,
    digits: u8,
    #[serde(default)]
    coded: bool,
    #[serde(default)]
    count: u64,
}

impl LatentParams {
    fn adapter_config(&self) -> LatentAdapterConfig {
        LatentAdapterConfig {
            mu: self.mu,
            sigma: self.sigma,
            k_min: self.k_min,
            k_max: self.k_max,
            digits: self.digits,
        }
    }
}

fn parse_pmf_weights(text: &str) -> CliResult<[u64; 4]> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return usage_err(format!(
            "--pmf expects four comma-separated weights (A,T,G,C), got {}",
            parts.len()
        ));
    }
    let mut weights = [0u64; 4];
    for (i, part) in parts.iter().enumerate() {
        weights[i] = part
            .parse()
            .map_err(|e| CliError::Usage(format!("--pmf weight {part:?}: {e}")))?;
    }
    Ok(weights)
}

/// Rebuilds the probability provider a record was written with.
fn provider_for_record(record: &StrandRecord) -> CliResult<Box<dyn ProbabilityProvider>> {
    match record.provider_id {
        ProviderId::Uniform => Ok(Box::new(UniformProvider)),
        ProviderId::StaticPmf => {
            let weights: [u64; 4] = serde_json::from_slice(&record.provider_params)
                .map_err(|e| CliError::Data(format!("bad static-pmf params: {e}")))?;
            let pmf = BasePmf::from_weights(&weights)
                .map_err(|e| CliError::Data(format!("bad static-pmf weights: {e}")))?;
            Ok(Box::new(StaticProvider::new(pmf)))
        }
        // The latent mapping happens before the strand coder; the strand
        // itself is coded against uniform digit probabilities.
        ProviderId::LatentAdapter => Ok(Box::new(UniformProvider)),
    }
}

fn latent_params_for_record(record: &StrandRecord) -> CliResult<LatentParams> {
    serde_json::from_slice(&record.provider_params)
        .map_err(|e| CliError::Data(format!("bad latent params: {e}")))
}

fn run_encode(args: EncodeArgs) -> CliResult<()> {
    let cfg = args.constraints.resolve()?;
    let input_bytes = read_file(&args.input)?;

    let (payload, provider_id, params, provider): (
        Payload,
        ProviderId,
        Vec<u8>,
        Box<dyn ProbabilityProvider>,
    ) = if let Some(side_path) = &args.latent {
        let side_bytes = fs::read(side_path).map_err(|e| {
            CliError::Usage(format!("cannot read latent model {}: {e}", side_path.display()))
        })?;
        let mut params: LatentParams = serde_json::from_slice(&side_bytes).map_err(|e| {
            CliError::Usage(format!("bad latent model {}: {e}", side_path.display()))
        })?;
        let adapter = params.adapter_config();
        adapter.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        let symbols: Vec<i64> = serde_json::from_slice(&input_bytes).map_err(|e| {
            CliError::Data(format!(
                "{}: expected a JSON array of integers: {e}",
                args.input.display()
            ))
        })?;
        params.count = symbols.len() as u64;
        let payload = if params.coded {
            scone::symbols_to_payload_coded(&symbols, &adapter)
        } else {
            scone::symbols_to_payload(&symbols, &adapter)
        }
        .map_err(|e| CliError::Data(e.to_string()))?;
        let params_bytes = serde_json::to_vec(&params).expect("serializable params");
        (
            payload,
            ProviderId::LatentAdapter,
            params_bytes,
            Box::new(UniformProvider),
        )
    } else if let Some(weights_text) = &args.pmf {
        let weights = parse_pmf_weights(weights_text)?;
        let pmf = BasePmf::from_weights(&weights).map_err(|e| CliError::Usage(e.to_string()))?;
        let params_bytes = serde_json::to_vec(&weights).expect("serializable weights");
        (
            Payload::from_bytes(input_bytes),
            ProviderId::StaticPmf,
            params_bytes,
            Box::new(StaticProvider::new(pmf)),
        )
    } else {
        (
            Payload::from_bytes(input_bytes),
            ProviderId::Uniform,
            Vec::new(),
            Box::new(UniformProvider),
        )
    };

    let result = generate_strand(&payload, provider.as_ref(), cfg)
        .map_err(|e| CliError::Data(format!("encode failed: {e}")))?;
    if result.eos_terminated {
        eprintln!(
            "warning: EOS escape hit after {} bits; the strand does not carry the full payload",
            result.consumed_bits
        );
    }

    let record = StrandRecord::new(
        cfg,
        payload.bit_len() as u64,
        provider_id,
        params,
        result.strand.bases.clone(),
    );
    let bytes = write_record(&record).map_err(|e| CliError::Data(e.to_string()))?;
    let out_path = args
        .out
        .clone()
        .unwrap_or_else(|| append_extension(&args.input, "scn1"));
    write_file(&out_path, &bytes)?;

    if let Some(fasta_path) = &args.fasta {
        let id = args
            .input
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("strand")
            .to_string();
        let entries = [FastaEntry {
            id,
            bases: result.strand.bases.clone(),
        }];
        let text = write_fasta(&entries).map_err(|e| CliError::Data(e.to_string()))?;
        write_file(fasta_path, text.as_bytes())?;
    }

    let bpn_core = result
        .bpn_core()
        .map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
    println!(
        "encoded {} bits -> {} bases (bpn_core {}) -> {}",
        payload.bit_len(),
        result.strand.len(),
        bpn_core,
        out_path.display()
    );
    Ok(())
}

fn run_decode(args: DecodeArgs) -> CliResult<()> {
    let bytes = read_file(&args.record)?;
    let record = read_record(&bytes).map_err(|e| CliError::Data(e.to_string()))?;
    let provider = provider_for_record(&record)?;

    let packed = pack_strand(&record.bases, provider.as_ref(), record.config)
        .map_err(|e| CliError::Data(e.to_string()))?;
    let bit_length = record.payload_bit_length as usize;
    if packed.bit_len() < bit_length {
        return data_err(format!(
            "record declares {bit_length} payload bits but the strand yields only {}",
            packed.bit_len()
        ));
    }
    let recovered = packed.truncated(bit_length);

    // A well-formed record regenerates its own strand from the recovered
    // payload; anything else means corruption (or an EOS-truncated strand).
    let regenerated = generate_strand(&recovered, provider.as_ref(), record.config)
        .map_err(|e| CliError::Data(format!("verification re-encode failed: {e}")))?;
    if regenerated.strand.bases != record.bases {
        return data_err(
            "strand does not regenerate from its recovered payload: corrupt record",
        );
    }

    let out_path = args
        .out
        .clone()
        .unwrap_or_else(|| args.record.with_extension("dec"));
    if record.provider_id == ProviderId::LatentAdapter {
        let params = latent_params_for_record(&record)?;
        let adapter = params.adapter_config();
        let symbols = if params.coded {
            scone::payload_to_symbols_coded(&recovered, &adapter, params.count as usize)
        } else {
            scone::payload_to_symbols(&recovered, &adapter, params.count as usize)
        }
        .map_err(|e| CliError::Data(e.to_string()))?;
        let mut text = serde_json::to_string(&symbols).expect("serializable symbols");
        text.push('\n');
        write_file(&out_path, text.as_bytes())?;
        println!(
            "decoded {} bases -> {} symbols -> {}",
            record.bases.len(),
            symbols.len(),
            out_path.display()
        );
    } else {
        write_file(&out_path, recovered.as_bytes())?;
        println!(
            "decoded {} bases -> {} bits -> {}",
            record.bases.len(),
            bit_length,
            out_path.display()
        );
    }
    Ok(())
}

fn append_extension(path: &Path, ext: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(ext);
    path.with_file_name(name)
}

const DENSITY_NOTE: &str = "bpn_core counts payload bits per base emitted before the \
termination tail and is the headline bits-per-nucleotide figure; bpn divides by the full \
strand length including the tail.";

#[derive(Serialize)]
struct EvalReport<'a> {
    command: &'a str,
    n: usize,
    len_symbols: usize,
    payload_bits: usize,
    seed: u64,
    config: ConstraintConfig,
    stats: &'a CorpusStats,
    note: &'a str,
}

fn run_in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> CliResult<T> {
    match workers {
        None => Ok(job()),
        Some(0) => usage_err("--workers must be at least 1"),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn payload_bits_for(len_symbols: usize) -> CliResult<usize> {
    len_symbols
        .checked_mul(2)
        .ok_or_else(|| CliError::Usage("--len is too large".into()))
}

fn print_corpus_stats(stats: &CorpusStats) {
    println!("roundtrip success   {:.2}%", stats.roundtrip_success_rate * 100.0);
    println!(
        "gc ratio            {:.4} +/- {:.4}  range [{:.4}, {:.4}]",
        stats.gc_mean, stats.gc_std, stats.gc_min, stats.gc_max
    );
    println!(
        "window gc range     [{:.4}, {:.4}]",
        stats.window_gc_min, stats.window_gc_max
    );
    println!("homopolymer max     {}", stats.hp_max);
    println!(
        "bpn_core            {:.4} +/- {:.4}",
        stats.bpn_core_mean, stats.bpn_core_std
    );
    println!(
        "bpn                 {:.4} +/- {:.4}",
        stats.bpn_mean, stats.bpn_std
    );
    println!("strand length mean  {:.1}", stats.strand_len_mean);
    println!("relaxed steps       {}", stats.total_relaxed_steps);
    println!(
        "latency per strand  encode {:.1} us, decode {:.1} us",
        stats.encode_micros_mean, stats.decode_micros_mean
    );
}

fn run_eval(args: EvalArgs) -> CliResult<()> {
    let cfg = args.constraints.resolve()?;
    if args.n == 0 {
        return usage_err("--n must be at least 1");
    }
    let bits = payload_bits_for(args.len)?;
    let eval: CorpusEval = run_in_pool(args.workers, || {
        corpus_eval(args.n, bits, &UniformProvider, cfg, args.seed)
    })?
    .map_err(|e| CliError::Data(e.to_string()))?;

    println!(
        "corpus              n={} len={} symbols ({} bits) seed={}",
        args.n, args.len, bits, args.seed
    );
    print_corpus_stats(&eval.stats);
    println!("note: {DENSITY_NOTE}");

    if let Some(path) = &args.out {
        let report = EvalReport {
            command: "eval",
            n: args.n,
            len_symbols: args.len,
            payload_bits: bits,
            seed: args.seed,
            config: cfg,
            stats: &eval.stats,
            note: DENSITY_NOTE,
        };
        let json = serde_json::to_string_pretty(&report).expect("serializable report");
        write_file(path, json.as_bytes())?;
    }
    if let Some(path) = &args.csv {
        write_file(path, rows_to_csv(&eval.rows).as_bytes())?;
    }
    if let Some(path) = &args.fasta {
        let entries: Vec<FastaEntry> = (0..args.n as u64)
            .map(|index| -> CliResult<FastaEntry> {
                let payload = corpus_payload(args.seed, index, bits);
                let result = generate_strand(&payload, &UniformProvider, cfg)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                Ok(FastaEntry {
                    id: format!("strand_{index:05}"),
                    bases: result.strand.bases,
                })
            })
            .collect::<CliResult<_>>()?;
        let text = write_fasta(&entries).map_err(|e| CliError::Data(e.to_string()))?;
        write_file(path, text.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct AblateReport<'a> {
    command: &'a str,
    n: usize,
    len_symbols: usize,
    payload_bits: usize,
    seed: u64,
    config: ConstraintConfig,
    full: &'a CorpusStats,
    no_fsm: &'a CorpusStats,
    gc_only: &'a CorpusStats,
    hp_only: &'a CorpusStats,
    note: &'a str,
}

fn ablation_variants(base: ConstraintConfig) -> [(&'static str, ConstraintConfig); 4] {
    [
        (
            "full",
            ConstraintConfig {
                gc_enabled: true,
                hp_enabled: true,
                ..base
            },
        ),
        (
            "no_fsm",
            ConstraintConfig {
                gc_enabled: false,
                hp_enabled: false,
                ..base
            },
        ),
        (
            "gc_only",
            ConstraintConfig {
                gc_enabled: true,
                hp_enabled: false,
                ..base
            },
        ),
        (
            "hp_only",
            ConstraintConfig {
                gc_enabled: false,
                hp_enabled: true,
                ..base
            },
        ),
    ]
}

fn run_ablate(args: AblateArgs) -> CliResult<()> {
    let base = args.constraints.resolve()?;
    if args.n == 0 {
        return usage_err("--n must be at least 1");
    }
    let bits = payload_bits_for(args.len)?;
    let variants = ablation_variants(base);

    let mut results: Vec<(&'static str, CorpusEval)> = Vec::with_capacity(4);
    for (name, cfg) in variants {
        let eval = run_in_pool(args.workers, || {
            corpus_eval(args.n, bits, &UniformProvider, cfg, args.seed)
        })?
        .map_err(|e| CliError::Data(format!("{name}: {e}")))?;
        results.push((name, eval));
    }

    println!(
        "ablation            n={} len={} symbols ({} bits) seed={}",
        args.n, args.len, bits, args.seed
    );
    println!(
        "{:<8} {:>8} {:>8} {:>7} {:>10} {:>10} {:>10}",
        "variant", "gc_mean", "gc_std", "hp_max", "bpn_core", "roundtrip", "relaxed"
    );
    for (name, eval) in &results {
        let s = &eval.stats;
        println!(
            "{:<8} {:>8.4} {:>8.4} {:>7} {:>10.4} {:>9.2}% {:>10}",
            name,
            s.gc_mean,
            s.gc_std,
            s.hp_max,
            s.bpn_core_mean,
            s.roundtrip_success_rate * 100.0,
            s.total_relaxed_steps
        );
    }
    println!("note: {DENSITY_NOTE}");

    if let Some(path) = &args.out {
        let report = AblateReport {
            command: "ablate",
            n: args.n,
            len_symbols: args.len,
            payload_bits: bits,
            seed: args.seed,
            config: base,
            full: &results[0].1.stats,
            no_fsm: &results[1].1.stats,
            gc_only: &results[2].1.stats,
            hp_only: &results[3].1.stats,
            note: DENSITY_NOTE,
        };
        let json = serde_json::to_string_pretty(&report).expect("serializable report");
        write_file(path, json.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct StatsRow {
    id: String,
    length: usize,
    gc_ratio: Option<f64>,
    max_run: usize,
    window_gc_min: Option<f64>,
    window_gc_max: Option<f64>,
    violations: Vec<usize>,
}

#[derive(Serialize)]
struct StatsReport<'a> {
    command: &'a str,
    config: ConstraintConfig,
    strands: usize,
    violating_strands: usize,
    total_violations: usize,
    gc_mean: f64,
    gc_std: f64,
    hp_max: usize,
    rows: &'a [StatsRow],
}

fn run_stats(args: StatsArgs) -> CliResult<()> {
    let cfg = args.constraints.resolve()?;
    let text = fs::read_to_string(&args.fasta)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", args.fasta.display())))?;
    let entries = read_fasta(&text).map_err(|e| CliError::Data(e.to_string()))?;

    let mut rows = Vec::with_capacity(entries.len());
    for entry in &entries {
        let stats = strand_stats(&entry.bases, cfg).map_err(|e| CliError::Data(e.to_string()))?;
        let (wmin, wmax) = if stats.window_gc_series.is_empty() {
            (None, None)
        } else {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &g in &stats.window_gc_series {
                lo = lo.min(g);
                hi = hi.max(g);
            }
            (Some(lo), Some(hi))
        };
        rows.push(StatsRow {
            id: entry.id.clone(),
            length: entry.bases.len(),
            gc_ratio: stats.gc_ratio,
            max_run: stats.max_run,
            window_gc_min: wmin,
            window_gc_max: wmax,
            violations: stats.violations,
        });
    }

    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.gc_ratio).collect();
    let gc_mean = if ratios.is_empty() {
        0.0
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    let gc_std = if ratios.is_empty() {
        0.0
    } else {
        (ratios.iter().map(|r| (r - gc_mean) * (r - gc_mean)).sum::<f64>() / ratios.len() as f64)
            .sqrt()
    };
    let hp_max = rows.iter().map(|r| r.max_run).max().unwrap_or(0);
    let violating = rows.iter().filter(|r| !r.violations.is_empty()).count();
    let total_violations: usize = rows.iter().map(|r| r.violations.len()).sum();

    println!("strands             {}", rows.len());
    println!("violating strands   {violating}");
    println!("total violations    {total_violations}");
    println!("gc ratio            {gc_mean:.4} +/- {gc_std:.4}");
    println!("homopolymer max     {hp_max}");
    for row in rows.iter().filter(|r| !r.violations.is_empty()) {
        let shown: Vec<usize> = row.violations.iter().copied().take(8).collect();
        let suffix = if row.violations.len() > 8 { ", ..." } else { "" };
        println!(
            "violation: {} ({} bases): {} masked position(s) at {:?}{suffix}",
            row.id,
            row.length,
            row.violations.len(),
            shown
        );
    }

    if let Some(path) = &args.out {
        let report = StatsReport {
            command: "stats",
            config: cfg,
            strands: rows.len(),
            violating_strands: violating,
            total_violations,
            gc_mean,
            gc_std,
            hp_max,
            rows: &rows,
        };
        let json = serde_json::to_string_pretty(&report).expect("serializable report");
        write_file(path, json.as_bytes())?;
    }
    if let Some(path) = &args.csv {
        let mut csv = String::from("id,length,gc_ratio,max_run,violations\n");
        for row in &rows {
            let gc = row
                .gc_ratio
                .map_or_else(String::new, |v| format!("{v:.6}"));
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                row.id,
                row.length,
                gc,
                row.max_run,
                row.violations.len()
            );
        }
        write_file(path, csv.as_bytes())?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Encode(args) => run_encode(args),
        Command::Decode(args) => run_decode(args),
        Command::Eval(args) => run_eval(args),
        Command::Ablate(args) => run_ablate(args),
        Command::Stats(args) => run_stats(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
