//! The quaternary transcoder.
//!
//! Both directions run the same 32-bit fixed-point interval machinery with
//! E1/E2/E3 renormalization over the masked quaternary alphabet.
//!
//! The write path ([`generate_strand`]) treats the payload as a code stream
//! and *decodes* it against the constrained model: at each step the FSM mask
//! and provider pmf define four cumulative-frequency slots, the slot holding
//! the code register selects the emitted base, and renormalization pulls
//! further payload bits in (virtual zeros past the end). Constraints
//! therefore hold by construction. Generation stops once
//! `bit_length + guard_bits` stream bits have been consumed; the zero guard
//! tail (default 32 bits, one register width) is what makes the inverse
//! prefix-stable.
//!
//! The read path ([`pack_strand`]) replays the FSM over the strand to
//! rebuild the identical mask/pmf sequence and arithmetic-*encodes* the
//! bases, emitting bits on E1/E2 renormalization, carrying pending E3 bits,
//! and flushing with the standard two-bit-plus-pending termination. Its
//! output reproduces the original payload as a prefix.

use crate::arith::{Interval, Renorm, QUARTER};
use crate::base::Base;
use crate::error::{CodecError, Result};
use crate::fsm::{BaseMask, ConstraintConfig, Fsm};
use crate::model::{BasePmf, ProbabilityProvider, EOS_RESERVE, PMF_TOTAL};
use crate::payload::Payload;

/// Consecutive probability-one steps tolerated before generation is declared
/// stuck. Legal configs produce only short certainty chains; an infinite one
/// means the constraint channel has zero capacity.
fn certainty_limit(config: &ConstraintConfig) -> u64 {
    64 + 4 * (u64::from(config.window) + u64::from(config.hp_max))
}

/// Per-step record of what the writer saw: the (possibly relaxed) mask, the
/// masked-and-scaled pmf, and how many stream bits the step consumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepTrace {
    pub mask: BaseMask,
    pub pmf: BasePmf,
    pub bits_consumed: u8,
}

/// A base sequence, optionally carrying the writer's step trace.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DnaStrand {
    pub bases: Vec<Base>,
    pub writer_trace: Option<Vec<StepTrace>>,
}

impl DnaStrand {
    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }
}

/// Outcome of [`generate_strand`], with the accounting needed for density
/// metrics.
#[derive(Debug, Clone)]
pub struct GenerateResult {
    pub strand: DnaStrand,
    /// Payload length in bits (copied from the input).
    pub payload_bits: u64,
    /// Bases emitted while fewer than `payload_bits` stream bits had been
    /// consumed, i.e. before the coder entered the guard tail.
    pub core_bases: usize,
    /// Renormalization shifts performed (stream bits consumed); at least
    /// `payload_bits + guard_bits` unless EOS terminated early.
    pub consumed_bits: u64,
    /// Steps whose mask came from the fail-safe relaxation.
    pub relaxed_steps: usize,
    /// True when EOS mode stopped generation on an escape-slot hit.
    pub eos_terminated: bool,
}

impl GenerateResult {
    /// Payload bits per base over the whole strand, `None` for an empty
    /// strand.
    pub fn bpn(&self) -> Option<f64> {
        if self.strand.is_empty() {
            None
        } else {
            Some(self.payload_bits as f64 / self.strand.len() as f64)
        }
    }

    /// Payload bits per base excluding the guard tail, `None` when no core
    /// bases exist (empty payload).
    pub fn bpn_core(&self) -> Option<f64> {
        if self.core_bases == 0 {
            None
        } else {
            Some(self.payload_bits as f64 / self.core_bases as f64)
        }
    }
}

/// Transcodes a payload into a constraint-legal strand. See the module docs
/// for the construction.
pub fn generate_strand(
    payload: &Payload,
    provider: &dyn ProbabilityProvider,
    config: ConstraintConfig,
) -> Result<GenerateResult> {
    generate_impl(payload, provider, config, false)
}

/// [`generate_strand`] with the per-step writer trace attached.
pub fn generate_strand_traced(
    payload: &Payload,
    provider: &dyn ProbabilityProvider,
    config: ConstraintConfig,
) -> Result<GenerateResult> {
    generate_impl(payload, provider, config, true)
}

fn generate_impl(
    payload: &Payload,
    provider: &dyn ProbabilityProvider,
    config: ConstraintConfig,
    collect_trace: bool,
) -> Result<GenerateResult> {
    let mut fsm = Fsm::new(config)?;
    let payload_bits = payload.bit_len() as u64;
    let budget = payload_bits + u64::from(config.guard_bits);
    let reserve = if config.eos_mode { EOS_RESERVE } else { 0 };

    let mut interval = Interval::full();
    let mut code: u32 = 0;
    for i in 0..32u64 {
        code = (code << 1) | u32::from(payload.bit_or_zero(i as usize));
    }
    let mut cursor: u64 = 32;
    let mut consumed: u64 = 0;

    let mut bases = Vec::new();
    let mut trace = collect_trace.then(Vec::new);
    let mut core_bases = 0usize;
    let mut relaxed_steps = 0usize;
    let mut eos_terminated = false;
    let mut certainty_run: u64 = 0;
    let certainty_limit = certainty_limit(&config);

    while consumed < budget {
        let mask = fsm.mask();
        let pmf = provider.next_pmf(bases.len() as u64, &fsm);
        let scaled = pmf.masked_scaled(&mask, reserve);
        let cum = scaled.cumulative();

        let Some(index) = interval.slot_select(code, scaled.freq(), &cum) else {
            // Only the escape slot is uncovered, and it exists only in EOS
            // mode; the base slots partition the interval otherwise.
            if reserve > 0 {
                eos_terminated = true;
                break;
            }
            return Err(CodecError::Internal(
                "code register escaped the slot partition".into(),
            ));
        };
        let base = Base::from_index(index).expect("index < 4");

        if scaled.freq()[index] == PMF_TOTAL {
            certainty_run += 1;
            if certainty_run > certainty_limit {
                return Err(CodecError::NoProgress);
            }
        } else {
            certainty_run = 0;
        }

        if consumed < payload_bits {
            core_bases += 1;
        }
        if mask.relaxed {
            relaxed_steps += 1;
        }

        interval.narrow(cum[index], cum[index + 1]);
        let mut step_bits: u8 = 0;
        while let Some(class) = interval.renorm_class() {
            let sub = class.subtrahend();
            interval.shift(class);
            let bit = payload.bit_or_zero(cursor as usize);
            code = ((code - sub) << 1) | u32::from(bit);
            cursor += 1;
            consumed += 1;
            step_bits += 1;
        }
        debug_assert!(interval.high - interval.low >= QUARTER);
        debug_assert!(code >= interval.low && code <= interval.high);

        fsm.advance(base);
        bases.push(base);
        if let Some(trace) = trace.as_mut() {
            trace.push(StepTrace {
                mask,
                pmf: scaled,
                bits_consumed: step_bits,
            });
        }
    }

    Ok(GenerateResult {
        strand: DnaStrand {
            bases,
            writer_trace: trace,
        },
        payload_bits,
        core_bases,
        consumed_bits: consumed,
        relaxed_steps,
        eos_terminated,
    })
}

/// Inverts [`generate_strand`]: re-encodes the strand under the replayed
/// mask/pmf sequence. The returned bit stream carries the original payload
/// as its `bit_length`-prefix. Fails with [`CodecError::IllegalStrand`] at
/// the first position whose base the replayed mask forbids.
pub fn pack_strand(
    bases: &[Base],
    provider: &dyn ProbabilityProvider,
    config: ConstraintConfig,
) -> Result<Payload> {
    let mut fsm = Fsm::new(config)?;
    let reserve = if config.eos_mode { EOS_RESERVE } else { 0 };

    let mut interval = Interval::full();
    let mut out = Payload::new();
    let mut pending: u64 = 0;
    let emit = |out: &mut Payload, pending: &mut u64, bit: bool| {
        out.push_bit(bit);
        for _ in 0..*pending {
            out.push_bit(!bit);
        }
        *pending = 0;
    };

    for (position, &base) in bases.iter().enumerate() {
        let mask = fsm.mask();
        if !mask.allows(base) {
            return Err(CodecError::IllegalStrand { position });
        }
        let pmf = provider.next_pmf(position as u64, &fsm);
        let scaled = pmf.masked_scaled(&mask, reserve);
        if scaled.freq()[base.index()] == 0 {
            // Allowed by the mask but impossible under the provider: can only
            // happen for foreign strands against a zero-frequency static pmf.
            return Err(CodecError::Internal(format!(
                "provider assigns zero probability to base at position {position}"
            )));
        }
        let cum = scaled.cumulative();
        interval.narrow(cum[base.index()], cum[base.index() + 1]);
        while let Some(class) = interval.renorm_class() {
            match class {
                Renorm::E1 => emit(&mut out, &mut pending, false),
                Renorm::E2 => emit(&mut out, &mut pending, true),
                Renorm::E3 => pending += 1,
            }
            interval.shift(class);
        }
        debug_assert!(interval.high - interval.low >= QUARTER);
        fsm.advance(base);
    }

    // Termination pins the midpoint of the final interval: a one bit, then
    // pending + 1 zeros. The midpoint is always inside the interval here
    // (no renorm class fired, so low < HALF <= high), and it is the one
    // choice that keeps the output prefix-stable: a long pending chain can
    // only arise when the guard tail sits exactly on the midpoint, i.e. the
    // true stream continues "1 then zeros". A low-based side choice would
    // break the final payload bit in exactly that case.
    out.push_bit(true);
    for _ in 0..=pending {
        out.push_bit(false);
    }
    Ok(out)
}
