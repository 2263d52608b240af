//! Quaternary probability models.
//!
//! A [`BasePmf`] is an integer-quantized distribution over the four bases
//! with a fixed total of 2^16, which keeps all coder arithmetic in 64-bit
//! intermediates. Masking zeroes forbidden bases and redistributes their
//! mass over the allowed ones by largest-remainder rounding, with a floor of
//! one unit per allowed base so every mask-compliant strand stays encodable.

use crate::base::Base;
use crate::error::{CodecError, Result};
use crate::fsm::{BaseMask, Fsm};

/// Fixed frequency total for every [`BasePmf`].
pub const PMF_TOTAL: u32 = 1 << 16;

/// Frequency reserved for the escape slot when EOS mode is on.
pub const EOS_RESERVE: u32 = 16;

/// Integer-quantized probability over the four bases; frequencies always sum
/// to [`PMF_TOTAL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasePmf {
    freq: [u32; 4],
}

impl BasePmf {
    /// The flat distribution: 16384 per base.
    pub fn uniform() -> BasePmf {
        BasePmf {
            freq: [PMF_TOTAL / 4; 4],
        }
    }

    /// Quantizes arbitrary non-negative weights onto the fixed total by
    /// largest-remainder rounding. Zero weights stay zero; at least one
    /// weight must be positive.
    pub fn from_weights(weights: &[u64; 4]) -> Result<BasePmf> {
        if weights.iter().all(|&w| w == 0) {
            return Err(CodecError::InvalidParams(
                "static pmf weights must not all be zero".into(),
            ));
        }
        let quantized = apportion(weights, PMF_TOTAL, false);
        let mut freq = [0u32; 4];
        freq.copy_from_slice(&quantized);
        Ok(BasePmf { freq })
    }

    /// Builds a pmf directly from frequencies that already sum to the total.
    pub fn from_freq(freq: [u32; 4]) -> Result<BasePmf> {
        if freq.iter().map(|&f| u64::from(f)).sum::<u64>() != u64::from(PMF_TOTAL) {
            return Err(CodecError::InvalidParams(format!(
                "pmf frequencies must sum to {PMF_TOTAL}"
            )));
        }
        Ok(BasePmf { freq })
    }

    #[inline]
    pub fn freq(&self) -> &[u32; 4] {
        &self.freq
    }

    /// Applies a mask and renormalizes back to the fixed total.
    ///
    /// With an all-true mask the pmf is returned unchanged; otherwise the
    /// allowed frequencies are rescaled by largest-remainder rounding with a
    /// floor of one unit each.
    pub fn mask_and_renormalize(&self, mask: &BaseMask) -> BasePmf {
        self.masked_scaled(mask, 0)
    }

    /// Like [`Self::mask_and_renormalize`] but scales the allowed bases to
    /// `PMF_TOTAL - reserve`, leaving the top `reserve` units unassigned
    /// (the escape slot used by EOS mode). The result's frequencies sum to
    /// `PMF_TOTAL - reserve`.
    pub(crate) fn masked_scaled(&self, mask: &BaseMask, reserve: u32) -> BasePmf {
        debug_assert!(mask.allowed_count() >= 1, "mask must allow a base");
        if mask.allowed == [true; 4] && reserve == 0 {
            return *self;
        }
        let mut weights = [0u64; 4];
        for b in Base::ALL {
            if mask.allows(b) {
                weights[b.index()] = u64::from(self.freq[b.index()]);
            }
        }
        // A provider may give zero mass to every allowed base; fall back to
        // an even split rather than failing.
        if weights.iter().all(|&w| w == 0) {
            for b in Base::ALL {
                if mask.allows(b) {
                    weights[b.index()] = 1;
                }
            }
        }
        let target = PMF_TOTAL - reserve;
        let quantized = apportion_masked(&weights, &mask.allowed, target);
        let mut freq = [0u32; 4];
        freq.copy_from_slice(&quantized);
        BasePmf { freq }
    }

    /// Cumulative frequencies: `cum[i]..cum[i+1]` is base `i`'s slot.
    pub fn cumulative(&self) -> [u32; 5] {
        let mut cum = [0u32; 5];
        for i in 0..4 {
            cum[i + 1] = cum[i] + self.freq[i];
        }
        cum
    }
}

/// Largest-remainder apportionment of `total` units over `weights`.
/// With `floor_one`, every positive-weight entry is guaranteed at least one
/// unit before the remainder distribution. Remainder units go to the largest
/// remainders, ties broken toward the higher index; when floors overshoot
/// the total, units are taken back from the largest entries.
pub(crate) fn apportion(weights: &[u64], total: u32, floor_one: bool) -> Vec<u32> {
    let eligible = |w: u64| w > 0;
    apportion_inner(weights, total, floor_one, &eligible)
}

/// Apportionment where the floor applies to every *allowed* entry, even ones
/// with zero weight.
fn apportion_masked(weights: &[u64; 4], allowed: &[bool; 4], total: u32) -> Vec<u32> {
    let allowed = *allowed;
    let eligible = move |_w: u64| true;
    let mut out = vec![0u32; 4];
    let idx: Vec<usize> = (0..4).filter(|&i| allowed[i]).collect();
    let sub: Vec<u64> = idx.iter().map(|&i| weights[i]).collect();
    let shares = apportion_inner(&sub, total, true, &eligible);
    for (slot, &i) in idx.iter().enumerate() {
        out[i] = shares[slot];
    }
    out
}

fn apportion_inner(
    weights: &[u64],
    total: u32,
    floor_one: bool,
    floor_eligible: &dyn Fn(u64) -> bool,
) -> Vec<u32> {
    let weight_sum: u64 = weights.iter().sum();
    assert!(weight_sum > 0, "apportion requires positive total weight");
    let total = u64::from(total);
    let n = weights.len();

    let mut freq = vec![0u64; n];
    let mut rem = vec![0u64; n];
    for i in 0..n {
        let product = (total as u128) * (weights[i] as u128);
        freq[i] = (product / weight_sum as u128) as u64;
        rem[i] = (product % weight_sum as u128) as u64;
        if floor_one && freq[i] == 0 && floor_eligible(weights[i]) {
            freq[i] = 1;
            rem[i] = 0;
        }
    }

    let assigned: u64 = freq.iter().sum();
    if assigned < total {
        // Hand out the shortfall by remainder, largest first; ties go to the
        // higher index.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| rem[b].cmp(&rem[a]).then(b.cmp(&a)));
        let mut left = total - assigned;
        for &i in &order {
            if left == 0 {
                break;
            }
            freq[i] += 1;
            left -= 1;
        }
        debug_assert_eq!(left, 0);
    } else if assigned > total {
        // Floors overshot; shave the largest entries down to rebalance.
        let mut excess = assigned - total;
        while excess > 0 {
            let i = (0..n)
                .filter(|&i| freq[i] > 1)
                .max_by_key(|&i| (freq[i], std::cmp::Reverse(i)))
                .expect("some entry above the floor");
            freq[i] -= 1;
            excess -= 1;
        }
    }

    debug_assert_eq!(freq.iter().sum::<u64>(), total);
    freq.into_iter().map(|f| f as u32).collect()
}

/// A deterministic source of per-step base distributions. Implementations
/// must depend only on information the read path can reconstruct: the step
/// index, the emitted-base history visible through the FSM, and static
/// configuration.
pub trait ProbabilityProvider: Send + Sync {
    fn next_pmf(&self, step: u64, fsm: &Fsm) -> BasePmf;
}

/// The flat quaternary distribution at every step.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformProvider;

impl ProbabilityProvider for UniformProvider {
    fn next_pmf(&self, _step: u64, _fsm: &Fsm) -> BasePmf {
        BasePmf::uniform()
    }
}

/// One fixed pmf for every step.
#[derive(Debug, Clone, Copy)]
pub struct StaticProvider {
    pmf: BasePmf,
}

impl StaticProvider {
    pub fn new(pmf: BasePmf) -> StaticProvider {
        StaticProvider { pmf }
    }
}

impl ProbabilityProvider for StaticProvider {
    fn next_pmf(&self, _step: u64, _fsm: &Fsm) -> BasePmf {
        self.pmf
    }
}
