//! Adapter between quantized latent symbols and payload bitstreams.
//!
//! Learned-compression pipelines hand us signed integer symbols together
//! with a per-channel discretized Gaussian model (mu, sigma, support). The
//! adapter turns symbol sequences into payload bits two ways:
//!
//! * packed (default): zigzag the symbol, expand to fixed-width base-4
//!   digits, and emit each digit as two bits;
//! * coded (optional): arithmetic-code the symbol indices under the
//!   quantized Gaussian pmf, which approaches the model entropy instead of
//!   the fixed 2 bits per digit.
//!
//! Both are exact inverses of their decode counterparts; the Gaussian model
//! only shapes code length, never correctness.

use serde::{Deserialize, Serialize};

use crate::arith::{Interval, Renorm};
use crate::base::Base;
use crate::error::{CodecError, Result};
use crate::model::{apportion, PMF_TOTAL};
use crate::payload::Payload;

/// One channel of the latent model: a discretized Gaussian over a signed
/// integer support, plus the base-4 digit width used by the packed mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatentAdapterConfig {
    pub mu: f64,
    pub sigma: f64,
    pub k_min: i64,
    pub k_max: i64,
    /// Base-4 digits per symbol in the packed mapping.
    pub digits: u8,
}

impl LatentAdapterConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(CodecError::InvalidConfig(format!(
                "sigma must be finite and positive, got {}",
                self.sigma
            )));
        }
        if !self.mu.is_finite() {
            return Err(CodecError::InvalidConfig("mu must be finite".into()));
        }
        if self.k_min > self.k_max {
            return Err(CodecError::InvalidConfig(format!(
                "empty support: k_min {} > k_max {}",
                self.k_min, self.k_max
            )));
        }
        if self.digits == 0 || self.digits > 16 {
            return Err(CodecError::InvalidConfig(format!(
                "digits must be in 1..=16, got {}",
                self.digits
            )));
        }
        let capacity = 1u64 << (2 * u32::from(self.digits));
        let extreme = zigzag(self.k_min).max(zigzag(self.k_max));
        if extreme >= capacity {
            return Err(CodecError::InvalidConfig(format!(
                "support [{}, {}] needs zigzag values up to {}, beyond 4^{} = {}",
                self.k_min, self.k_max, extreme, self.digits, capacity
            )));
        }
        Ok(())
    }

    pub fn support_len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    fn contains(&self, k: i64) -> bool {
        (self.k_min..=self.k_max).contains(&k)
    }
}

/// Quantized pmf over a symbol support, totalling [`PMF_TOTAL`] with at
/// least one unit per bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolPmf {
    freq: Vec<u32>,
}

impl SymbolPmf {
    pub fn freq(&self) -> &[u32] {
        &self.freq
    }

    pub fn cumulative(&self) -> Vec<u32> {
        let mut cum = vec![0u32; self.freq.len() + 1];
        for (i, &f) in self.freq.iter().enumerate() {
            cum[i + 1] = cum[i] + f;
        }
        cum
    }
}

/// Standard normal CDF via the error function.
fn phi(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

/// Discretizes the channel Gaussian over its support: interior bins take
/// `Phi(k+1/2) - Phi(k-1/2)` (standardized), and the end bins absorb the
/// tails so the distribution sums to one before quantization.
pub fn gaussian_symbol_pmf(config: &LatentAdapterConfig) -> Result<SymbolPmf> {
    config.validate()?;
    let n = config.support_len();
    let upper = |k: i64| (k as f64 + 0.5 - config.mu) / config.sigma;
    let lower = |k: i64| (k as f64 - 0.5 - config.mu) / config.sigma;

    let mut mass = Vec::with_capacity(n);
    for k in config.k_min..=config.k_max {
        let hi = if k == config.k_max { 1.0 } else { phi(upper(k)) };
        let lo = if k == config.k_min { 0.0 } else { phi(lower(k)) };
        mass.push((hi - lo).max(0.0));
    }

    // Scale to integer weights for the deterministic apportionment; 2^52
    // keeps full f64 precision for any realistic channel. Far-tail bins can
    // underflow to zero mass, but every supported symbol must stay
    // encodable, so clamp to one weight unit before the floor-one rounding.
    let scale = (1u64 << 52) as f64;
    let weights: Vec<u64> = mass.iter().map(|&m| ((m * scale) as u64).max(1)).collect();
    Ok(SymbolPmf {
        freq: apportion(&weights, PMF_TOTAL, true),
    })
}

/// Maps signed symbols onto non-negative integers: 0, -1, 1, -2, 2, ...
/// become 0, 1, 2, 3, 4, ...
#[inline]
pub fn zigzag(k: i64) -> u64 {
    if k >= 0 {
        2 * k as u64
    } else {
        2 * (-(k + 1)) as u64 + 1
    }
}

/// Inverse of [`zigzag`].
#[inline]
pub fn unzigzag(z: u64) -> i64 {
    if z % 2 == 0 {
        (z / 2) as i64
    } else {
        -((z / 2) as i64) - 1
    }
}

/// Expands `zigzag(k)` into `digits` base-4 digits, most significant first.
pub fn base4_map(k: i64, digits: u8) -> Result<Vec<Base>> {
    let z = zigzag(k);
    if digits == 0 || digits > 16 || z >= 1u64 << (2 * u32::from(digits)) {
        return Err(CodecError::SymbolOutOfRange { value: k });
    }
    let mut out = Vec::with_capacity(usize::from(digits));
    for d in (0..u32::from(digits)).rev() {
        let digit = (z >> (2 * d)) & 0b11;
        out.push(Base::from_index(digit as usize).expect("two-bit digit"));
    }
    Ok(out)
}

/// Inverse of [`base4_map`]: reads the digits as a base-4 number and
/// un-zigzags it.
pub fn base4_unmap(digits: &[Base]) -> Result<i64> {
    if digits.is_empty() || digits.len() > 16 {
        return Err(CodecError::InvalidConfig(format!(
            "digit count {} outside 1..=16",
            digits.len()
        )));
    }
    let mut z = 0u64;
    for &d in digits {
        z = (z << 2) | d.index() as u64;
    }
    Ok(unzigzag(z))
}

/// Packed mapping: each symbol becomes `digits` base-4 digits, each digit
/// two bits (MSB first).
pub fn symbols_to_payload(symbols: &[i64], config: &LatentAdapterConfig) -> Result<Payload> {
    config.validate()?;
    let mut payload = Payload::new();
    for &k in symbols {
        if !config.contains(k) {
            return Err(CodecError::SymbolOutOfRange { value: k });
        }
        for base in base4_map(k, config.digits)? {
            let index = base.index();
            payload.push_bit(index & 0b10 != 0);
            payload.push_bit(index & 0b01 != 0);
        }
    }
    Ok(payload)
}

/// Inverse of [`symbols_to_payload`]; `count` symbols are read from the
/// front of the payload (trailing bits are ignored).
pub fn payload_to_symbols(
    payload: &Payload,
    config: &LatentAdapterConfig,
    count: usize,
) -> Result<Vec<i64>> {
    config.validate()?;
    let bits_per_symbol = 2 * usize::from(config.digits);
    let needed = count
        .checked_mul(bits_per_symbol)
        .ok_or(CodecError::Truncated)?;
    if payload.bit_len() < needed {
        return Err(CodecError::Truncated);
    }
    let mut symbols = Vec::with_capacity(count);
    let mut cursor = 0usize;
    for _ in 0..count {
        let mut digits = Vec::with_capacity(usize::from(config.digits));
        for _ in 0..config.digits {
            let hi = payload.bit_or_zero(cursor);
            let lo = payload.bit_or_zero(cursor + 1);
            cursor += 2;
            let index = usize::from(hi) << 1 | usize::from(lo);
            digits.push(Base::from_index(index).expect("two-bit digit"));
        }
        let k = base4_unmap(&digits)?;
        if !config.contains(k) {
            return Err(CodecError::SymbolOutOfRange { value: k });
        }
        symbols.push(k);
    }
    Ok(symbols)
}

/// Model-based mapping: arithmetic-codes symbol indices under the channel's
/// quantized Gaussian pmf. Denser than the packed mapping whenever the model
/// fits the data.
pub fn symbols_to_payload_coded(
    symbols: &[i64],
    config: &LatentAdapterConfig,
) -> Result<Payload> {
    let pmf = gaussian_symbol_pmf(config)?;
    let cum = pmf.cumulative();
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

    for &k in symbols {
        if !config.contains(k) {
            return Err(CodecError::SymbolOutOfRange { value: k });
        }
        let index = (k - config.k_min) as usize;
        interval.narrow(cum[index], cum[index + 1]);
        while let Some(class) = interval.renorm_class() {
            match class {
                Renorm::E1 => emit(&mut out, &mut pending, false),
                Renorm::E2 => emit(&mut out, &mut pending, true),
                Renorm::E3 => pending += 1,
            }
            interval.shift(class);
        }
    }
    // Midpoint flush, as in strand packing: the decoder zero-extends, and
    // "1 then zeros" is the midpoint's exact expansion.
    out.push_bit(true);
    for _ in 0..=pending {
        out.push_bit(false);
    }
    Ok(out)
}

/// Inverse of [`symbols_to_payload_coded`] for a known symbol count.
pub fn payload_to_symbols_coded(
    payload: &Payload,
    config: &LatentAdapterConfig,
    count: usize,
) -> Result<Vec<i64>> {
    let pmf = gaussian_symbol_pmf(config)?;
    let cum = pmf.cumulative();
    let mut interval = Interval::full();
    let mut code: u32 = 0;
    for i in 0..32usize {
        code = (code << 1) | u32::from(payload.bit_or_zero(i));
    }
    let mut cursor = 32usize;

    let mut symbols = Vec::with_capacity(count);
    for _ in 0..count {
        let index = interval
            .slot_select(code, pmf.freq(), &cum)
            .ok_or_else(|| CodecError::Internal("code register escaped the slot partition".into()))?;
        symbols.push(config.k_min + index as i64);
        interval.narrow(cum[index], cum[index + 1]);
        while let Some(class) = interval.renorm_class() {
            let sub = class.subtrahend();
            interval.shift(class);
            code = ((code - sub) << 1) | u32::from(payload.bit_or_zero(cursor));
            cursor += 1;
        }
    }
    Ok(symbols)
}
