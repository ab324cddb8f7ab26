//! Bit strings over GF(2), choice bits, and XOR secret sharing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::Randomness;

/// Longest supported string.
pub const MAX_LEN: usize = 64;

/// A fixed-length string of bits with XOR as addition.
///
/// Bit `i` (0-based, counting from the least significant end) is stored in
/// bit `i` of `bits`. Text form lists the most significant bit first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    len: u8,
    bits: u64,
}

impl BitString {
    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_u64(0, len)
    }

    /// Takes the low `len` bits of `value`. Higher bits must be zero.
    pub fn from_u64(value: u64, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::contract(format!("bit string length {len} outside 1..={MAX_LEN}")));
        }
        if value & !mask(len) != 0 {
            return Err(Error::contract(format!("value {value:#x} does not fit in {len} bits")));
        }
        Ok(Self { len: len as u8, bits: value })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_u64(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len(), "bit index out of range");
        (self.bits >> i) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(BitString { len: self.len, bits: self.bits ^ other.bits })
    }

    /// Bitwise product with a single bit: `self` if `bit` is set, zero otherwise.
    pub fn scale(&self, bit: ChoiceBit) -> BitString {
        if bit.value() {
            *self
        } else {
            BitString { len: self.len, bits: 0 }
        }
    }

    /// Truncates or zero-pads (at the most significant end) to `len` bits.
    pub fn fit(&self, len: usize) -> BitString {
        let len = len.clamp(1, MAX_LEN);
        BitString { len: len as u8, bits: self.bits & mask(len) }
    }

    /// Flips every bit selected by `flip_mask`.
    pub fn flip(&self, flip_mask: u64) -> BitString {
        BitString { len: self.len, bits: (self.bits ^ flip_mask) & mask(self.len()) }
    }

    /// All `2^len` strings of the given length in increasing order.
    pub fn all(len: usize) -> Result<impl Iterator<Item = BitString>> {
        if len == 0 || len > 20 {
            return Err(Error::contract(format!("refusing to list all strings of length {len}")));
        }
        Ok((0..(1u64 << len)).map(move |v| BitString { len: len as u8, bits: v }))
    }

    /// Uniformly random string.
    pub fn random(len: usize, rng: &mut dyn Randomness) -> Result<BitString> {
        let mut out = 0u64;
        let mut filled = 0;
        // draw in chunks of at most 32 bits so `below` never overflows
        while filled < len {
            let width = (len - filled).min(32);
            out |= rng.below(1u64 << width) << filled;
            filled += width;
        }
        Self::from_u64(out, len)
    }
}

fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len()).rev() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_LEN {
            return Err(Error::contract(format!("bit string {s:?} must have 1..={MAX_LEN} characters")));
        }
        let mut bits = 0u64;
        for ch in s.chars() {
            bits <<= 1;
            match ch {
                '0' => {}
                '1' => bits |= 1,
                other => return Err(Error::contract(format!("invalid bit character {other:?}"))),
            }
        }
        Self::from_u64(bits, s.len())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A single choice bit. Kept apart from one-bit message strings.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ChoiceBit(bool);

impl ChoiceBit {
    pub const ZERO: ChoiceBit = ChoiceBit(false);
    pub const ONE: ChoiceBit = ChoiceBit(true);

    pub fn new(value: bool) -> Self {
        ChoiceBit(value)
    }

    pub fn from_u8(value: u8) -> Result<Self> {
        match value {
            0 => Ok(ChoiceBit(false)),
            1 => Ok(ChoiceBit(true)),
            v => Err(Error::contract(format!("choice bit must be 0 or 1, got {v}"))),
        }
    }

    pub fn value(self) -> bool {
        self.0
    }

    pub fn as_index(self) -> usize {
        self.0 as usize
    }

    pub fn xor(self, other: ChoiceBit) -> ChoiceBit {
        ChoiceBit(self.0 ^ other.0)
    }

    pub fn flipped(self) -> ChoiceBit {
        ChoiceBit(!self.0)
    }

    pub fn random(rng: &mut dyn Randomness) -> ChoiceBit {
        ChoiceBit(rng.below(2) == 1)
    }

    pub fn both() -> [ChoiceBit; 2] {
        [ChoiceBit::ZERO, ChoiceBit::ONE]
    }
}

impl fmt::Debug for ChoiceBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChoiceBit({})", self.0 as u8)
    }
}

impl fmt::Display for ChoiceBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 as u8)
    }
}

impl Serialize for ChoiceBit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.0 as u8)
    }
}

impl<'de> Deserialize<'de> for ChoiceBit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = u8::deserialize(deserializer)?;
        ChoiceBit::from_u8(v).map_err(serde::de::Error::custom)
    }
}

/// Values that can be XOR-shared: message strings and choice bits.
pub trait Shareable: Copy + Sized {
    fn random_like(&self, rng: &mut dyn Randomness) -> Result<Self>;
    fn add(&self, other: &Self) -> Result<Self>;
}

impl Shareable for BitString {
    fn random_like(&self, rng: &mut dyn Randomness) -> Result<Self> {
        BitString::random(self.len(), rng)
    }

    fn add(&self, other: &Self) -> Result<Self> {
        self.xor(other)
    }
}

impl Shareable for ChoiceBit {
    fn random_like(&self, rng: &mut dyn Randomness) -> Result<Self> {
        Ok(ChoiceBit::random(rng))
    }

    fn add(&self, other: &Self) -> Result<Self> {
        Ok(self.xor(*other))
    }
}

pub fn xor(a: &BitString, b: &BitString) -> Result<BitString> {
    a.xor(b)
}

/// Splits `secret` into `n` shares: the first `n - 1` are drawn uniformly,
/// the last one fixes the XOR to `secret`.
pub fn share_xor<T: Shareable>(secret: T, n: usize, rng: &mut dyn Randomness) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::contract("cannot split a secret into zero shares"));
    }
    let mut shares = Vec::with_capacity(n);
    let mut acc = secret;
    for _ in 1..n {
        let share = secret.random_like(rng)?;
        acc = acc.add(&share)?;
        shares.push(share);
    }
    shares.push(acc);
    Ok(shares)
}

pub fn reconstruct_xor<T: Shareable>(shares: &[T]) -> Result<T> {
    let (first, rest) = shares
        .split_first()
        .ok_or_else(|| Error::contract("cannot reconstruct from an empty share list"))?;
    rest.iter().try_fold(*first, |acc, s| acc.add(s))
}
