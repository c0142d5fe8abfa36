use crate::error::{Error, Result};

/// A finite bit sequence read front to back.
///
/// Hex input is consumed most-significant bit of the first digit first.
/// `from_index(t, len)` uses the same order: the first bit read is bit
/// `len - 1` of `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedStream {
    bits: Vec<bool>,
    cursor: usize,
}

impl SeedStream {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        SeedStream { bits, cursor: 0 }
    }

    /// The `len`-bit big-endian encoding of `index`. Bits above 128 are zero.
    pub fn from_index(index: u128, len: usize) -> Self {
        let bits = (0..len)
            .map(|i| {
                let pos = len - 1 - i;
                pos < 128 && (index >> pos) & 1 == 1
            })
            .collect();
        SeedStream { bits, cursor: 0 }
    }

    /// Parses a hex string holding exactly `len` bits. The string must have
    /// `ceil(len / 4)` digits; padding bits at the end of the last digit must
    /// be zero.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let digits: Vec<char> = hex
            .trim()
            .trim_start_matches("0x")
            .chars()
            .filter(|c| *c != '_')
            .collect();
        let want = len.div_ceil(4);
        if digits.len() != want {
            return Err(Error::InvalidHex(format!(
                "expected {want} hex digits for {len} bits, got {}",
                digits.len()
            )));
        }
        let mut bits = Vec::with_capacity(want * 4);
        for c in digits {
            let d = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidHex(format!("bad digit {c:?}")))?;
            for b in (0..4).rev() {
                bits.push((d >> b) & 1 == 1);
            }
        }
        if bits[len..].iter().any(|&b| b) {
            return Err(Error::InvalidHex("nonzero padding bits".into()));
        }
        bits.truncate(len);
        Ok(SeedStream { bits, cursor: 0 })
    }

    /// Hex rendering with trailing zero padding, inverse of `from_hex`.
    pub fn to_hex(&self) -> String {
        self.bits
            .chunks(4)
            .map(|chunk| {
                let mut d = 0u32;
                for (i, &b) in chunk.iter().enumerate() {
                    if b {
                        d |= 1 << (3 - i);
                    }
                }
                char::from_digit(d, 16).unwrap()
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn consumed(&self) -> usize {
        self.cursor
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.cursor
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        self.require(1)?;
        let b = self.bits[self.cursor];
        self.cursor += 1;
        Ok(b)
    }

    /// Reads `width <= 64` bits as an unsigned integer, first bit most
    /// significant.
    pub fn read_uint(&mut self, width: u32) -> Result<u64> {
        assert!(width <= 64);
        self.require(width as usize)?;
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.bits[self.cursor] as u64;
            self.cursor += 1;
        }
        Ok(v)
    }

    fn require(&self, needed: usize) -> Result<()> {
        if self.remaining() < needed {
            return Err(Error::SeedUnderflow {
                needed,
                available: self.remaining(),
            });
        }
        Ok(())
    }
}
