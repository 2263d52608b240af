//! Payload bit sequences.
//!
//! Bits are stored MSB-first within each byte, matching the order in which
//! file bytes enter the coder.

/// A finite bit sequence; zero length is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Payload {
    bytes: Vec<u8>,
    bit_len: usize,
}

impl Payload {
    pub fn new() -> Payload {
        Payload::default()
    }

    /// Wraps whole bytes; the bit length is `8 * bytes.len()`.
    pub fn from_bytes(bytes: Vec<u8>) -> Payload {
        let bit_len = bytes.len() * 8;
        Payload { bytes, bit_len }
    }

    /// Wraps a byte buffer holding exactly `bit_len` MSB-first bits; any
    /// trailing bits in the last byte are cleared.
    pub fn from_bits(mut bytes: Vec<u8>, bit_len: usize) -> Payload {
        assert!(bit_len <= bytes.len() * 8);
        bytes.truncate(bit_len.div_ceil(8));
        if bit_len % 8 != 0 {
            if let Some(last) = bytes.last_mut() {
                *last &= 0xffu8 << (8 - bit_len % 8);
            }
        }
        Payload { bytes, bit_len }
    }

    pub fn bit_len(&self) -> usize {
        self.bit_len
    }

    pub fn is_empty(&self) -> bool {
        self.bit_len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Consumes the payload, returning the underlying bytes. Only meaningful
    /// when the bit length is a whole number of bytes.
    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    /// Bit `index`, or `None` past the end.
    #[inline]
    pub fn bit(&self, index: usize) -> Option<bool> {
        if index >= self.bit_len {
            return None;
        }
        let byte = self.bytes[index / 8];
        Some(byte & (0x80 >> (index % 8)) != 0)
    }

    /// Bit `index`, reading zero past the end (the coder's virtual zero
    /// extension).
    #[inline]
    pub fn bit_or_zero(&self, index: usize) -> bool {
        self.bit(index).unwrap_or(false)
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.bit_len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.last_mut().expect("just pushed");
            *last |= 0x80 >> (self.bit_len % 8);
        }
        self.bit_len += 1;
    }

    /// True when the first `prefix_len` bits of both payloads agree (and
    /// both are at least that long).
    pub fn prefix_eq(&self, other: &Payload, prefix_len: usize) -> bool {
        if self.bit_len < prefix_len || other.bit_len < prefix_len {
            return false;
        }
        let whole = prefix_len / 8;
        if self.bytes[..whole] != other.bytes[..whole] {
            return false;
        }
        (whole * 8..prefix_len).all(|i| self.bit(i) == other.bit(i))
    }

    /// The first `bit_len` bits as a new payload.
    pub fn truncated(&self, bit_len: usize) -> Payload {
        assert!(bit_len <= self.bit_len);
        Payload::from_bits(self.bytes.clone(), bit_len)
    }
}
