//! The quaternary symbol alphabet.

use std::fmt;

/// A DNA base. The index mapping 0→A, 1→T, 2→G, 3→C is fixed and doubles as
/// the 2-bit digit value everywhere in the codec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Base {
    A = 0,
    T = 1,
    G = 2,
    C = 3,
}

impl Base {
    /// All four bases in canonical index order.
    pub const ALL: [Base; 4] = [Base::A, Base::T, Base::G, Base::C];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(index: usize) -> Option<Base> {
        match index {
            0 => Some(Base::A),
            1 => Some(Base::T),
            2 => Some(Base::G),
            3 => Some(Base::C),
            _ => None,
        }
    }

    /// Accepts upper- and lowercase letters.
    #[inline]
    pub fn from_ascii(byte: u8) -> Option<Base> {
        match byte.to_ascii_uppercase() {
            b'A' => Some(Base::A),
            b'T' => Some(Base::T),
            b'G' => Some(Base::G),
            b'C' => Some(Base::C),
            _ => None,
        }
    }

    #[inline]
    pub fn to_ascii(self) -> u8 {
        match self {
            Base::A => b'A',
            Base::T => b'T',
            Base::G => b'G',
            Base::C => b'C',
        }
    }

    #[inline]
    pub fn is_gc(self) -> bool {
        matches!(self, Base::G | Base::C)
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_ascii() as char)
    }
}

/// Renders a base sequence as an ASCII string.
pub fn bases_to_string(bases: &[Base]) -> String {
    bases.iter().map(|b| b.to_ascii() as char).collect()
}

/// Parses an ASCII sequence, reporting the offset of the first bad byte.
pub fn bases_from_ascii(text: &[u8]) -> Result<Vec<Base>, (u8, usize)> {
    text.iter()
        .enumerate()
        .map(|(i, &b)| Base::from_ascii(b).ok_or((b, i)))
        .collect()
}
