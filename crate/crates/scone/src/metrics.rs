//! Constraint and density measurement: per-strand statistics, corpus
//! aggregation over seeded roundtrip runs, and CSV emission for external
//! plotting.

use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coder::{generate_strand, pack_strand};
use crate::error::Result;
use crate::fsm::{ConstraintConfig, Fsm};
use crate::model::ProbabilityProvider;
use crate::payload::Payload;
use crate::Base;

/// Per-strand constraint measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct StrandStats {
    /// (#G + #C) / length; `None` for an empty strand.
    pub gc_ratio: Option<f64>,
    /// Longest identical-base run; 0 for an empty strand.
    pub max_run: usize,
    /// GC ratio of every full `window`-sized sliding window, one entry per
    /// position from `window - 1` on.
    pub window_gc_series: Vec<f64>,
    /// Allowed-base count of the replayed mask at each position.
    pub allowed_count_series: Vec<u8>,
    /// Positions whose base the replayed mask forbids (empty for strands
    /// produced by the coder under the same config).
    pub violations: Vec<usize>,
    /// Positions where the replayed mask needed the fail-safe relaxation.
    pub relaxed_steps: usize,
}

/// Replays the constraint FSM over a strand and measures it. The strand
/// need not be legal; violations are recorded, not errors.
pub fn strand_stats(bases: &[Base], config: ConstraintConfig) -> Result<StrandStats> {
    let mut fsm = Fsm::new(config)?;
    let window = usize::from(config.window);

    let mut gc_count = 0usize;
    let mut max_run = 0usize;
    let mut run = 0usize;
    let mut prev: Option<Base> = None;
    let mut window_gc_series = Vec::new();
    let mut allowed_count_series = Vec::with_capacity(bases.len());
    let mut violations = Vec::new();
    let mut relaxed_steps = 0usize;
    // Rolling GC count over the trailing full window.
    let mut win_gc = 0usize;

    for (i, &base) in bases.iter().enumerate() {
        let mask = fsm.mask();
        allowed_count_series.push(mask.allowed_count() as u8);
        if !mask.allows(base) {
            violations.push(i);
        }
        if mask.relaxed {
            relaxed_steps += 1;
        }
        fsm.advance(base);

        if base.is_gc() {
            gc_count += 1;
            win_gc += 1;
        }
        if i >= window && bases[i - window].is_gc() {
            win_gc -= 1;
        }
        if window >= 1 && i + 1 >= window {
            window_gc_series.push(win_gc as f64 / window as f64);
        }

        if prev == Some(base) {
            run += 1;
        } else {
            run = 1;
            prev = Some(base);
        }
        max_run = max_run.max(run);
    }

    let gc_ratio = if bases.is_empty() {
        None
    } else {
        Some(gc_count as f64 / bases.len() as f64)
    };
    Ok(StrandStats {
        gc_ratio,
        max_run,
        window_gc_series,
        allowed_count_series,
        violations,
        relaxed_steps,
    })
}

/// Position-indexed CSV of a strand's window-GC and allowed-count series,
/// for external plotting. Window values are empty until the first full
/// window.
pub fn strand_series_csv(stats: &StrandStats, window: u8) -> String {
    let mut out = String::from("position,window_gc,allowed_count\n");
    let lead = usize::from(window).saturating_sub(1);
    for (i, &count) in stats.allowed_count_series.iter().enumerate() {
        let gc = if i >= lead {
            stats
                .window_gc_series
                .get(i - lead)
                .map(|g| format!("{g:.4}"))
                .unwrap_or_default()
        } else {
            String::new()
        };
        out.push_str(&format!("{i},{gc},{count}\n"));
    }
    out
}

/// One roundtrip observation inside a corpus run.
#[derive(Debug, Clone, Serialize)]
pub struct StrandRow {
    pub index: u64,
    pub strand_len: usize,
    pub gc_ratio: f64,
    pub max_run: usize,
    pub bpn: Option<f64>,
    pub bpn_core: Option<f64>,
    pub relaxed_steps: usize,
    pub roundtrip_ok: bool,
    pub encode_micros: f64,
    pub decode_micros: f64,
}

/// Corpus-level aggregates. All non-latency fields are deterministic for a
/// fixed (n, len_bits, provider, config, seed); when `n = 0` (or a series
/// has no defined values) the affected aggregates are reported as 0.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusStats {
    pub n: usize,
    pub gc_mean: f64,
    pub gc_std: f64,
    pub gc_min: f64,
    pub gc_max: f64,
    /// Longest homopolymer run seen anywhere in the corpus.
    pub hp_max: usize,
    pub bpn_core_mean: f64,
    pub bpn_core_std: f64,
    pub bpn_mean: f64,
    pub bpn_std: f64,
    pub strand_len_mean: f64,
    /// Extremes of the full-window GC ratio across every window of every
    /// strand.
    pub window_gc_min: f64,
    pub window_gc_max: f64,
    pub total_relaxed_steps: u64,
    pub roundtrip_success_rate: f64,
    pub encode_micros_mean: f64,
    pub decode_micros_mean: f64,
}

/// A corpus run: ordered per-strand rows plus the aggregate block.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusEval {
    pub stats: CorpusStats,
    pub rows: Vec<StrandRow>,
}

/// Mean and population standard deviation, in fixed accumulation order.
fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let mut n = 0usize;
    let mut sum = 0.0;
    for v in values.clone() {
        n += 1;
        sum += v;
    }
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = sum / n as f64;
    let mut sq = 0.0;
    for v in values {
        sq += (v - mean) * (v - mean);
    }
    (mean, (sq / n as f64).sqrt())
}

/// The corpus payload convention: strand `index` draws `len_bits` bits from
/// stream `index` of a ChaCha8 generator seeded with `seed`. Shared by
/// [`corpus_eval`] and any caller that needs to rebuild the same corpus.
pub fn corpus_payload(seed: u64, index: u64, len_bits: usize) -> Payload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut bytes = vec![0u8; len_bits.div_ceil(8)];
    rng.fill_bytes(&mut bytes);
    Payload::from_bits(bytes, len_bits)
}

/// Generates `n` seeded random payloads of `len_bits`, runs a full
/// generate/pack roundtrip on each, and aggregates. Payloads follow the
/// [`corpus_payload`] convention, so results are independent of the parallel
/// schedule; rows come back in index order and aggregation runs over them
/// sequentially.
pub fn corpus_eval(
    n: usize,
    len_bits: usize,
    provider: &dyn ProbabilityProvider,
    config: ConstraintConfig,
    seed: u64,
) -> Result<CorpusEval> {
    config.validate()?;
    let observations: Vec<(StrandRow, StrandStats)> = (0..n as u64)
        .into_par_iter()
        .map(|index| -> Result<(StrandRow, StrandStats)> {
            let payload = corpus_payload(seed, index, len_bits);

            let start = Instant::now();
            let generated = generate_strand(&payload, provider, config)?;
            let encode_micros = start.elapsed().as_secs_f64() * 1e6;

            let start = Instant::now();
            let packed = pack_strand(&generated.strand.bases, provider, config)?;
            let decode_micros = start.elapsed().as_secs_f64() * 1e6;
            let roundtrip_ok = packed.prefix_eq(&payload, payload.bit_len());

            let stats = strand_stats(&generated.strand.bases, config)?;
            let row = StrandRow {
                index,
                strand_len: generated.strand.len(),
                gc_ratio: stats.gc_ratio.unwrap_or(0.0),
                max_run: stats.max_run,
                bpn: generated.bpn(),
                bpn_core: generated.bpn_core(),
                relaxed_steps: generated.relaxed_steps,
                roundtrip_ok,
                encode_micros,
                decode_micros,
            };
            Ok((row, stats))
        })
        .collect::<Result<_>>()?;

    let rows: Vec<StrandRow> = observations.iter().map(|(r, _)| r.clone()).collect();
    let (gc_mean, gc_std) = mean_std(rows.iter().map(|r| r.gc_ratio));
    let (bpn_core_mean, bpn_core_std) = mean_std(rows.iter().filter_map(|r| r.bpn_core));
    let (bpn_mean, bpn_std) = mean_std(rows.iter().filter_map(|r| r.bpn));
    let (strand_len_mean, _) = mean_std(rows.iter().map(|r| r.strand_len as f64));
    let (encode_micros_mean, _) = mean_std(rows.iter().map(|r| r.encode_micros));
    let (decode_micros_mean, _) = mean_std(rows.iter().map(|r| r.decode_micros));

    let mut gc_min = f64::INFINITY;
    let mut gc_max = f64::NEG_INFINITY;
    let mut window_gc_min = f64::INFINITY;
    let mut window_gc_max = f64::NEG_INFINITY;
    let mut hp_max = 0usize;
    let mut total_relaxed_steps = 0u64;
    let mut ok = 0usize;
    for (row, stats) in &observations {
        gc_min = gc_min.min(row.gc_ratio);
        gc_max = gc_max.max(row.gc_ratio);
        hp_max = hp_max.max(row.max_run);
        total_relaxed_steps += row.relaxed_steps as u64;
        if row.roundtrip_ok {
            ok += 1;
        }
        for &g in &stats.window_gc_series {
            window_gc_min = window_gc_min.min(g);
            window_gc_max = window_gc_max.max(g);
        }
    }
    if !gc_min.is_finite() {
        gc_min = 0.0;
        gc_max = 0.0;
    }
    if !window_gc_min.is_finite() {
        window_gc_min = 0.0;
        window_gc_max = 0.0;
    }

    let stats = CorpusStats {
        n,
        gc_mean,
        gc_std,
        gc_min,
        gc_max,
        hp_max,
        bpn_core_mean,
        bpn_core_std,
        bpn_mean,
        bpn_std,
        strand_len_mean,
        window_gc_min,
        window_gc_max,
        total_relaxed_steps,
        roundtrip_success_rate: if n == 0 { 0.0 } else { ok as f64 / n as f64 },
        encode_micros_mean,
        decode_micros_mean,
    };
    Ok(CorpusEval { stats, rows })
}

/// Per-strand rows as CSV, one line per strand in index order.
pub fn rows_to_csv(rows: &[StrandRow]) -> String {
    let mut out = String::from(
        "index,strand_len,gc_ratio,max_run,bpn,bpn_core,relaxed_steps,roundtrip_ok,encode_micros,decode_micros\n",
    );
    for r in rows {
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{:.6},{},{},{},{},{},{:.3},{:.3}\n",
            r.index,
            r.strand_len,
            r.gc_ratio,
            r.max_run,
            fmt_opt(r.bpn),
            fmt_opt(r.bpn_core),
            r.relaxed_steps,
            r.roundtrip_ok,
            r.encode_micros,
            r.decode_micros
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::bases_from_ascii;
    use crate::model::UniformProvider;
    use rand::Rng;

    fn strand(s: &str) -> Vec<Base> {
        bases_from_ascii(s.as_bytes()).unwrap()
    }

    fn no_fsm() -> ConstraintConfig {
        ConstraintConfig {
            gc_enabled: false,
            hp_enabled: false,
            ..Default::default()
        }
    }

    #[test]
    fn gc_ratio_and_runs() {
        let stats = strand_stats(&strand("GGCCAATT"), ConstraintConfig::default()).unwrap();
        assert_eq!(stats.gc_ratio, Some(0.5));
        assert_eq!(stats.max_run, 2);

        let stats = strand_stats(&strand("AAAAG"), no_fsm()).unwrap();
        assert_eq!(stats.max_run, 4);
        assert_eq!(stats.gc_ratio, Some(0.2));
    }

    #[test]
    fn periodic_strand_windows_are_exactly_half() {
        let bases = strand("ATGC").repeat(25);
        let stats = strand_stats(&bases, ConstraintConfig::default()).unwrap();
        assert_eq!(stats.window_gc_series.len(), 81);
        assert!(stats.window_gc_series.iter().all(|&g| g == 0.5));
        assert_eq!(stats.allowed_count_series.len(), 100);
        assert!(stats.violations.is_empty());
    }

    #[test]
    fn empty_strand_stats() {
        let stats = strand_stats(&[], ConstraintConfig::default()).unwrap();
        assert_eq!(stats.gc_ratio, None);
        assert_eq!(stats.max_run, 0);
        assert!(stats.window_gc_series.is_empty());
        assert!(stats.allowed_count_series.is_empty());
    }

    #[test]
    fn violation_positions_match_mask_replay() {
        let stats = strand_stats(&strand("AAAA"), ConstraintConfig::default()).unwrap();
        assert_eq!(stats.violations, vec![3]);
        assert_eq!(stats.max_run, 4);
    }

    #[test]
    fn max_run_agrees_with_naive_oracle() {
        let naive = |bases: &[Base]| -> usize {
            let mut best = 0;
            for i in 0..bases.len() {
                let mut j = i;
                while j < bases.len() && bases[j] == bases[i] {
                    j += 1;
                }
                best = best.max(j - i);
            }
            best
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let len = rng.gen_range(0..60);
            let bases: Vec<Base> = (0..len)
                .map(|_| Base::from_index(rng.gen_range(0..4)).unwrap())
                .collect();
            let stats = strand_stats(&bases, no_fsm()).unwrap();
            assert_eq!(stats.max_run, naive(&bases));
        }
    }

    #[test]
    fn rolling_window_agrees_with_naive_oracle() {
        let cfg = ConstraintConfig {
            window: 7,
            ..Default::default()
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let bases: Vec<Base> = (0..50)
            .map(|_| Base::from_index(rng.gen_range(0..4)).unwrap())
            .collect();
        let stats = strand_stats(&bases, cfg).unwrap();
        let naive: Vec<f64> = bases
            .windows(7)
            .map(|w| w.iter().filter(|b| b.is_gc()).count() as f64 / 7.0)
            .collect();
        assert_eq!(stats.window_gc_series, naive);
    }

    #[test]
    fn corpus_smoke_constrained() {
        let eval = corpus_eval(20, 200, &UniformProvider, ConstraintConfig::default(), 9).unwrap();
        assert_eq!(eval.stats.n, 20);
        assert_eq!(eval.rows.len(), 20);
        assert_eq!(eval.stats.roundtrip_success_rate, 1.0);
        assert!(eval.stats.hp_max <= 3);
        assert!(eval.stats.window_gc_min >= 0.45 && eval.stats.window_gc_max <= 0.55);
        assert!(eval.stats.gc_std < 0.05);
    }

    #[test]
    fn corpus_no_fsm_density_is_exact() {
        let eval = corpus_eval(10, 200, &UniformProvider, no_fsm(), 3).unwrap();
        assert_eq!(eval.stats.bpn_core_mean, 2.0);
        assert_eq!(eval.stats.bpn_core_std, 0.0);
        assert!(eval.stats.strand_len_mean > 100.0);
    }

    #[test]
    fn corpus_is_reproducible() {
        let a = corpus_eval(15, 160, &UniformProvider, ConstraintConfig::default(), 77).unwrap();
        let b = corpus_eval(15, 160, &UniformProvider, ConstraintConfig::default(), 77).unwrap();
        assert_eq!(a.stats.gc_mean.to_bits(), b.stats.gc_mean.to_bits());
        assert_eq!(a.stats.gc_std.to_bits(), b.stats.gc_std.to_bits());
        assert_eq!(a.stats.bpn_core_mean.to_bits(), b.stats.bpn_core_mean.to_bits());
        assert_eq!(a.stats.hp_max, b.stats.hp_max);
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.strand_len, y.strand_len);
            assert_eq!(x.gc_ratio.to_bits(), y.gc_ratio.to_bits());
        }
        let c = corpus_eval(15, 160, &UniformProvider, ConstraintConfig::default(), 78).unwrap();
        assert_ne!(a.stats.gc_mean.to_bits(), c.stats.gc_mean.to_bits());
    }

    #[test]
    fn corpus_empty() {
        let eval = corpus_eval(0, 200, &UniformProvider, ConstraintConfig::default(), 1).unwrap();
        assert_eq!(eval.stats.n, 0);
        assert_eq!(eval.stats.roundtrip_success_rate, 0.0);
        assert_eq!(eval.stats.gc_mean, 0.0);
        assert!(eval.rows.is_empty());
    }

    #[test]
    fn csv_emission() {
        let eval = corpus_eval(3, 64, &UniformProvider, ConstraintConfig::default(), 5).unwrap();
        let csv = rows_to_csv(&eval.rows);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("index,strand_len,gc_ratio"));

        let stats = strand_stats(&strand("ATGCATGCATGCATGCATGCATGC"), ConstraintConfig::default())
            .unwrap();
        let series = strand_series_csv(&stats, 20);
        assert_eq!(series.lines().count(), 25);
        let line20 = series.lines().nth(20).unwrap();
        assert_eq!(line20, "19,0.5000,4");
    }
}
