//! Deterministic constraint state machine.
//!
//! Tracks a sliding GC window and the current homopolymer run over the
//! emitted base history and derives, for the *next* position, a 4-way
//! permissibility mask. The state is a pure function of the emitted
//! sequence, so the read path reconstructs the writer's mask sequence by
//! replaying the strand. All threshold comparisons are cross-multiplied
//! integer inequalities in per-mille units; no floating point.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::base::Base;
use crate::error::{CodecError, Result};

/// Biochemical constraint parameters plus the coder's guard-bit count.
///
/// Thresholds are per-mille (450 means 0.45).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintConfig {
    pub gc_enabled: bool,
    pub hp_enabled: bool,
    /// GC window length in bases, 1..=255.
    pub window: u8,
    /// Lower GC bound, per-mille.
    pub gc_lo: u16,
    /// Upper GC bound, per-mille.
    pub gc_hi: u16,
    /// Maximum homopolymer run length.
    pub hp_max: u8,
    /// Zero bits logically appended to the payload before strand generation.
    pub guard_bits: u8,
    /// Reserve an escape slot in every scaled distribution (see coder docs).
    pub eos_mode: bool,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        ConstraintConfig {
            gc_enabled: true,
            hp_enabled: true,
            window: 20,
            gc_lo: 450,
            gc_hi: 550,
            hp_max: 3,
            guard_bits: 32,
            eos_mode: false,
        }
    }
}

/// Non-fatal findings from [`ConstraintConfig::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigWarning {
    /// `window * (gc_hi - gc_lo) < 1000`: the GC band is narrower than one
    /// base step, so the fail-safe relaxation can fire.
    RelaxationPossible,
}

impl std::fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigWarning::RelaxationPossible => write!(
                f,
                "GC band narrower than one window step; fail-safe relaxation may fire"
            ),
        }
    }
}

impl ConstraintConfig {
    /// Checks hard bounds, returning any warnings for the legal-but-tight
    /// regimes. Warnings never reject a config.
    pub fn validate(&self) -> Result<Vec<ConfigWarning>> {
        if self.window == 0 {
            return Err(CodecError::InvalidConfig("window must be >= 1".into()));
        }
        if self.gc_lo > 1000 || self.gc_hi > 1000 {
            return Err(CodecError::InvalidConfig(
                "GC bounds must be <= 1000 per-mille".into(),
            ));
        }
        if self.gc_lo > self.gc_hi {
            return Err(CodecError::InvalidConfig(format!(
                "gc_lo ({}) must not exceed gc_hi ({})",
                self.gc_lo, self.gc_hi
            )));
        }
        if self.hp_max == 0 {
            return Err(CodecError::InvalidConfig("hp_max must be >= 1".into()));
        }
        let mut warnings = Vec::new();
        if self.gc_enabled
            && u32::from(self.window) * u32::from(self.gc_hi - self.gc_lo) < 1000
        {
            warnings.push(ConfigWarning::RelaxationPossible);
        }
        Ok(warnings)
    }
}

/// Per-step permissibility mask, indexed by [`Base`] index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaseMask {
    pub allowed: [bool; 4],
    /// True when the fail-safe dropped the GC prohibitions for this step.
    pub relaxed: bool,
}

impl BaseMask {
    pub const ALL: BaseMask = BaseMask {
        allowed: [true; 4],
        relaxed: false,
    };

    #[inline]
    pub fn allows(&self, base: Base) -> bool {
        self.allowed[base.index()]
    }

    pub fn allowed_count(&self) -> u32 {
        self.allowed.iter().filter(|&&a| a).count() as u32
    }
}

/// Sliding-window + run-length state over the emitted base history.
#[derive(Debug, Clone)]
pub struct Fsm {
    config: ConstraintConfig,
    /// The most recent `<= window` bases, oldest first.
    recent: VecDeque<Base>,
    /// Count of G/C entries in `recent`.
    gc_count: u32,
    run_base: Option<Base>,
    /// Length of the maximal identical-base suffix of the full history.
    run_len: u64,
    emitted: u64,
}

impl Fsm {
    /// Builds an empty state; rejects invalid configs (warnings are dropped
    /// here, use [`ConstraintConfig::validate`] to surface them).
    pub fn new(config: ConstraintConfig) -> Result<Fsm> {
        config.validate()?;
        Ok(Fsm {
            config,
            recent: VecDeque::with_capacity(config.window as usize + 1),
            gc_count: 0,
            run_base: None,
            run_len: 0,
            emitted: 0,
        })
    }

    /// Rebuilds the state a writer would have after emitting `bases`.
    pub fn replay(config: ConstraintConfig, bases: &[Base]) -> Result<Fsm> {
        let mut fsm = Fsm::new(config)?;
        for &b in bases {
            fsm.advance(b);
        }
        Ok(fsm)
    }

    pub fn config(&self) -> &ConstraintConfig {
        &self.config
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn run_len(&self) -> u64 {
        self.run_len
    }

    /// Mask for the next position.
    ///
    /// Homopolymer rule: once the current run reaches `hp_max`, the run base
    /// is disallowed. GC rule: with `n` the GC count over the last
    /// `min(emitted, window - 1)` bases, G and C are disallowed when
    /// `(n+1)/W > gc_hi` and A and T when `(n+d)/W < gc_lo`, where `d` is the
    /// number of positions still missing from the first full window
    /// (`d = 0` once `emitted >= window - 1`). The candidate plus the
    /// surviving `window - 1` bases form exactly the window that will exist
    /// after the step, so eviction is already accounted for. During warm-up
    /// the deficit credits each unfilled position as potentially G/C, so the
    /// rule only forbids choices that would make the first full window
    /// unreachable in band; once the window is full it pins every subsequent
    /// window inside `[gc_lo, gc_hi]`. If the two GC rules combine to forbid
    /// everything, the GC prohibitions are dropped (homopolymer kept) and
    /// `relaxed` is set.
    pub fn mask(&self) -> BaseMask {
        let cfg = &self.config;
        let mut allowed = [true; 4];

        if cfg.hp_enabled {
            if let Some(run_base) = self.run_base {
                if self.run_len >= u64::from(cfg.hp_max) {
                    allowed[run_base.index()] = false;
                }
            }
        }

        let mut relaxed = false;
        if cfg.gc_enabled {
            let w = u32::from(cfg.window);
            let n = self.prospective_gc_count();
            let d = u64::from(cfg.window - 1).saturating_sub(self.emitted) as u32;
            let mask_gc = (n + 1) * 1000 > u32::from(cfg.gc_hi) * w;
            let mask_at = (n + d) * 1000 < u32::from(cfg.gc_lo) * w;
            if mask_gc && mask_at {
                // Both pairs forbidden: drop the GC prohibitions entirely.
                relaxed = true;
            } else {
                if mask_gc {
                    allowed[Base::G.index()] = false;
                    allowed[Base::C.index()] = false;
                }
                if mask_at {
                    allowed[Base::A.index()] = false;
                    allowed[Base::T.index()] = false;
                }
            }
        }

        let mask = BaseMask { allowed, relaxed };
        debug_assert!(mask.allowed_count() >= 1);
        mask
    }

    /// GC count over the most recent `window - 1` bases (the part of the
    /// current buffer that survives the next push).
    fn prospective_gc_count(&self) -> u32 {
        if self.recent.len() == self.config.window as usize {
            let front_gc = self.recent.front().map_or(false, |b| b.is_gc());
            self.gc_count - u32::from(front_gc)
        } else {
            self.gc_count
        }
    }

    /// Pushes a base into the history. Accepts masked bases too, so foreign
    /// strands can be replayed for measurement; mask enforcement belongs to
    /// the coder.
    pub fn advance(&mut self, base: Base) {
        self.recent.push_back(base);
        if base.is_gc() {
            self.gc_count += 1;
        }
        if self.recent.len() > self.config.window as usize {
            let evicted = self.recent.pop_front().expect("non-empty");
            if evicted.is_gc() {
                self.gc_count -= 1;
            }
        }
        if self.run_base == Some(base) {
            self.run_len += 1;
        } else {
            self.run_base = Some(base);
            self.run_len = 1;
        }
        self.emitted += 1;
        debug_assert_eq!(
            self.gc_count as usize,
            self.recent.iter().filter(|b| b.is_gc()).count()
        );
    }
}
