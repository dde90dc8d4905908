//! Half-integral theta characteristics of genus 3, stored reduced mod 2.
//!
//! A characteristic is a point of 𝔽₂⁶ written as a pair of 3-bit vectors
//! `[top, bottom]`. The numeric label `(i, j)` reads each half as a binary
//! number with the first bit most significant, so `[110,100]` has label `64`.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacteristicError {
    #[error("label digit {0} out of range 0..=7")]
    LabelOutOfRange(u8),
    #[error("cannot parse characteristic from {0:?}")]
    Parse(String),
}

/// Parity of a characteristic: `e(m) = (-1)^(m'·m'')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `+1` for even, `-1` for odd.
    pub fn sign(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Characteristic {
    top: u8,
    bottom: u8,
}

impl Characteristic {
    pub const ZERO: Characteristic = Characteristic { top: 0, bottom: 0 };

    /// Builds a characteristic from its label digits `(i, j)`.
    pub fn from_label(top: u8, bottom: u8) -> Result<Self, CharacteristicError> {
        if top > 7 {
            return Err(CharacteristicError::LabelOutOfRange(top));
        }
        if bottom > 7 {
            return Err(CharacteristicError::LabelOutOfRange(bottom));
        }
        Ok(Characteristic { top, bottom })
    }

    /// Builds a characteristic from a two-digit label written as a decimal
    /// literal, e.g. `lab(64)` for `[110,100]`.
    ///
    /// Panics on digits above 7; intended for compile-time constant labels.
    pub const fn lab(label: u8) -> Self {
        let top = label / 10;
        let bottom = label % 10;
        assert!(top <= 7 && bottom <= 7, "label digits must be octal");
        Characteristic { top, bottom }
    }

    /// Builds a characteristic from its bit vectors `(a1,a2,a3)` and `(b1,b2,b3)`.
    pub fn from_bits(top: [bool; 3], bottom: [bool; 3]) -> Self {
        let pack = |b: [bool; 3]| (b[0] as u8) << 2 | (b[1] as u8) << 1 | b[2] as u8;
        Characteristic {
            top: pack(top),
            bottom: pack(bottom),
        }
    }

    /// Index in `0..64`, `8 * i + j`.
    pub fn index(self) -> usize {
        (self.top as usize) << 3 | self.bottom as usize
    }

    pub fn from_index(index: usize) -> Self {
        Characteristic {
            top: ((index >> 3) & 7) as u8,
            bottom: (index & 7) as u8,
        }
    }

    pub fn label(self) -> (u8, u8) {
        (self.top, self.bottom)
    }

    /// The label as the two-character string used in reports, e.g. `"77"`.
    pub fn label_string(self) -> String {
        format!("{}{}", self.top, self.bottom)
    }

    pub fn top_bits(self) -> [u8; 3] {
        bits(self.top)
    }

    pub fn bottom_bits(self) -> [u8; 3] {
        bits(self.bottom)
    }

    pub fn parity(self) -> Parity {
        let dot: u8 = self
            .top_bits()
            .iter()
            .zip(self.bottom_bits())
            .map(|(a, b)| a * b)
            .sum();
        if dot.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(self) -> bool {
        self.parity() == Parity::Even
    }

    pub fn is_odd(self) -> bool {
        self.parity() == Parity::Odd
    }

    /// All 64 characteristics in index order.
    pub fn all() -> impl Iterator<Item = Characteristic> {
        (0..64).map(Characteristic::from_index)
    }

    /// The 36 even characteristics in index order.
    pub fn evens() -> impl Iterator<Item = Characteristic> {
        Self::all().filter(|m| m.is_even())
    }

    /// The 28 odd characteristics in index order.
    pub fn odds() -> impl Iterator<Item = Characteristic> {
        Self::all().filter(|m| m.is_odd())
    }
}

fn bits(v: u8) -> [u8; 3] {
    [(v >> 2) & 1, (v >> 1) & 1, v & 1]
}

impl Add for Characteristic {
    type Output = Characteristic;

    fn add(self, rhs: Characteristic) -> Characteristic {
        Characteristic {
            top: self.top ^ rhs.top,
            bottom: self.bottom ^ rhs.bottom,
        }
    }
}

/// `e(m1, m2, m3) = e(m1) e(m2) e(m3) e(m1 + m2 + m3)`; `-1` is azygetic.
pub fn triple_sign(m1: Characteristic, m2: Characteristic, m3: Characteristic) -> i8 {
    m1.parity().sign() * m2.parity().sign() * m3.parity().sign() * (m1 + m2 + m3).parity().sign()
}

pub fn is_azygetic(m1: Characteristic, m2: Characteristic, m3: Characteristic) -> bool {
    triple_sign(m1, m2, m3) == -1
}

/// Symplectic pairing `e(m, n) = (-1)^(m'·n'' - m''·n')` on 𝔽₂⁶.
pub fn symplectic_pairing(m: Characteristic, n: Characteristic) -> i8 {
    let exponent = (m.top & n.bottom).count_ones() + (m.bottom & n.top).count_ones();
    if exponent.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3] = self.top_bits();
        let [b1, b2, b3] = self.bottom_bits();
        write!(f, "[{a1}{a2}{a3},{b1}{b2}{b3}]")
    }
}

impl FromStr for Characteristic {
    type Err = CharacteristicError;

    /// Accepts either the bracket form `[abc,def]` or a two-digit label `ij`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CharacteristicError::Parse(s.to_string());
        let t = s.trim();
        if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let (top, bottom) = inner.split_once(',').ok_or_else(err)?;
            let half = |h: &str| -> Option<[bool; 3]> {
                let h = h.trim().as_bytes();
                if h.len() != 3 {
                    return None;
                }
                let mut out = [false; 3];
                for (o, &c) in out.iter_mut().zip(h) {
                    *o = match c {
                        b'0' => false,
                        b'1' => true,
                        _ => return None,
                    };
                }
                Some(out)
            };
            return Ok(Characteristic::from_bits(
                half(top).ok_or_else(err)?,
                half(bottom).ok_or_else(err)?,
            ));
        }
        let digits = t.as_bytes();
        if digits.len() == 2 && digits.iter().all(|d| (b'0'..=b'7').contains(d)) {
            return Characteristic::from_label(digits[0] - b'0', digits[1] - b'0');
        }
        Err(err())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_even_and_all_ones_is_odd() {
        assert_eq!(Characteristic::ZERO.parity(), Parity::Even);
        let m: Characteristic = "[111,111]".parse().unwrap();
        assert_eq!(m.parity(), Parity::Odd);
        assert_eq!(m, Characteristic::lab(77));
    }

    #[test]
    fn parity_counts() {
        assert_eq!(Characteristic::evens().count(), 36);
        assert_eq!(Characteristic::odds().count(), 28);
    }

    #[test]
    fn parity_matches_label_popcount() {
        for m in Characteristic::all() {
            let (i, j) = m.label();
            let expect = if (i & j).count_ones() % 2 == 0 {
                Parity::Even
            } else {
                Parity::Odd
            };
            assert_eq!(m.parity(), expect);
        }
    }

    #[test]
    fn label_encoding() {
        let m: Characteristic = "[110,100]".parse().unwrap();
        assert_eq!(m.label(), (6, 4));
        assert_eq!(m.label_string(), "64");
        assert_eq!("64".parse::<Characteristic>().unwrap(), m);
        assert_eq!(m.to_string(), "[110,100]");
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "[11,111]", "[111;111]", "88", "7", "[112,000]", "777", "[111,111"] {
            assert!(bad.parse::<Characteristic>().is_err(), "{bad}");
        }
        assert!(Characteristic::from_label(8, 0).is_err());
    }

    #[test]
    fn triple_sign_examples() {
        let m = Characteristic::lab(35);
        assert_eq!(triple_sign(m, m, m), 1);
        let (a, b, c) = (
            "[111,111]".parse().unwrap(),
            "[110,100]".parse().unwrap(),
            "[101,001]".parse().unwrap(),
        );
        assert_eq!(triple_sign(a, b, c), -1);
    }

    #[test]
    fn odd_triple_counts() {
        let odds: Vec<_> = Characteristic::odds().collect();
        let (mut azy, mut syz) = (0, 0);
        for i in 0..odds.len() {
            for j in i + 1..odds.len() {
                for k in j + 1..odds.len() {
                    match triple_sign(odds[i], odds[j], odds[k]) {
                        -1 => azy += 1,
                        _ => syz += 1,
                    }
                }
            }
        }
        assert_eq!((azy, syz), (2016, 1260));
    }

    #[test]
    fn pairing_against_zero_and_nonzero_counts() {
        for m in Characteristic::all() {
            assert_eq!(symplectic_pairing(m, Characteristic::ZERO), 1);
            assert_eq!(symplectic_pairing(m, m), 1);
            if m != Characteristic::ZERO {
                let minus: i32 = Characteristic::all()
                    .map(|n| (1 - symplectic_pairing(m, n) as i32) / 2)
                    .sum();
                assert_eq!(minus, 32);
            }
        }
    }
}
