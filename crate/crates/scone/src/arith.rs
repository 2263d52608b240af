//! Shared fixed-point interval primitives for the arithmetic coding paths.
//!
//! All coder arithmetic lives in 32-bit registers with 64-bit intermediates;
//! every operation truncates deterministically, so identical inputs give
//! identical bit streams on every platform.

use crate::model::PMF_TOTAL;

pub(crate) const HALF: u32 = 1 << 31;
pub(crate) const QUARTER: u32 = 1 << 30;
pub(crate) const THREE_QUARTERS: u32 = HALF + QUARTER;

/// Renormalization classes of the classic E1/E2/E3 scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Renorm {
    /// Interval in the lower half; a 0 bit is determined.
    E1,
    /// Interval in the upper half; a 1 bit is determined.
    E2,
    /// Interval straddles the midpoint within the middle half; the bit is
    /// deferred (pending).
    E3,
}

impl Renorm {
    #[inline]
    pub(crate) fn subtrahend(self) -> u32 {
        match self {
            Renorm::E1 => 0,
            Renorm::E2 => HALF,
            Renorm::E3 => QUARTER,
        }
    }
}

/// Coding interval, closed on both ends: `[low, high]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Interval {
    pub(crate) low: u32,
    pub(crate) high: u32,
}

impl Interval {
    pub(crate) fn full() -> Interval {
        Interval {
            low: 0,
            high: u32::MAX,
        }
    }

    #[inline]
    pub(crate) fn range(&self) -> u64 {
        u64::from(self.high - self.low) + 1
    }

    /// Narrows to the cumulative-frequency slot `[cum_lo, cum_hi)` out of
    /// `PMF_TOTAL`.
    #[inline]
    pub(crate) fn narrow(&mut self, cum_lo: u32, cum_hi: u32) {
        let range = self.range();
        let base = u64::from(self.low);
        let total = u64::from(PMF_TOTAL);
        self.high = (base + range * u64::from(cum_hi) / total - 1) as u32;
        self.low = (base + range * u64::from(cum_lo) / total) as u32;
        debug_assert!(self.low <= self.high);
    }

    #[inline]
    pub(crate) fn renorm_class(&self) -> Option<Renorm> {
        if self.high < HALF {
            Some(Renorm::E1)
        } else if self.low >= HALF {
            Some(Renorm::E2)
        } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
            Some(Renorm::E3)
        } else {
            None
        }
    }

    #[inline]
    pub(crate) fn shift(&mut self, class: Renorm) {
        let sub = class.subtrahend();
        self.low = (self.low - sub) << 1;
        self.high = ((self.high - sub) << 1) | 1;
    }

    /// Finds the symbol whose slot contains the code register, skipping
    /// zero-frequency symbols. Returns `None` when the code sits in the
    /// uncovered top gap (the EOS escape zone when a reserve is present).
    pub(crate) fn slot_select(&self, code: u32, freq: &[u32], cum: &[u32]) -> Option<usize> {
        let range = self.range();
        let base = u64::from(self.low);
        let code = u64::from(code);
        let total = u64::from(PMF_TOTAL);
        for i in 0..freq.len() {
            if freq[i] == 0 {
                continue;
            }
            let slot_lo = base + range * u64::from(cum[i]) / total;
            let slot_hi = base + range * u64::from(cum[i + 1]) / total - 1;
            if code >= slot_lo && code <= slot_hi {
                return Some(i);
            }
        }
        None
    }
}
