use std::fmt;

use crate::{Error, Result};

/// Largest width a [`BitVector`] can hold.
pub const MAX_WIDTH: usize = 64;

/// Fixed-width binary word.
///
/// Digit `j` corresponds to bit `j` of [`BitVector::index`], so for a fixed width the
/// conversion to and from an unsigned index is a bijection. 3×3 matrices are stored
/// row-major: entry `(i, j)` is digit `3i + j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    word: u64,
    width: u8,
}

impl BitVector {
    pub fn zeros(width: usize) -> Result<Self> {
        Self::from_index(0, width)
    }

    /// Builds the word whose digit `j` is bit `j` of `index`.
    pub fn from_index(index: u64, width: usize) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::InvalidArgument(format!(
                "bit vector width must be in 1..={MAX_WIDTH}, got {width}"
            )));
        }
        if width < 64 && index >> width != 0 {
            return Err(Error::InvalidArgument(format!(
                "index {index} does not fit in {width} bits"
            )));
        }
        Ok(Self {
            word: index,
            width: width as u8,
        })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let word = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &b)| acc | (u64::from(b) << j));
        Self::from_index(word, bits.len())
    }

    /// Parses a digit string such as `"101"`; the first character is digit 0.
    pub fn parse(digits: &str) -> Result<Self> {
        let bits = digits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!(
                    "binary digit expected, found `{other}`"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width as usize
    }

    #[inline]
    pub fn index(&self) -> u64 {
        self.word
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        debug_assert!(j < self.width());
        (self.word >> j) & 1 == 1
    }

    pub fn set(&mut self, j: usize, value: bool) {
        assert!(j < self.width(), "digit {j} out of range");
        if value {
            self.word |= 1 << j;
        } else {
            self.word &= !(1 << j);
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.word.count_ones()
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width()).map(|j| self.get(j))
    }

    /// Transposes a 3×3 row-major matrix.
    pub fn transpose3(&self) -> Result<Self> {
        if self.width() != 9 {
            return Err(Error::WidthMismatch {
                what: "3x3 matrix",
                expected: 9,
                got: self.width(),
            });
        }
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.set(3 * j + i, self.get(3 * i + j));
            }
        }
        Ok(out)
    }

    pub(crate) fn expect_width(&self, what: &'static str, expected: usize) -> Result<()> {
        if self.width() == expected {
            Ok(())
        } else {
            Err(Error::WidthMismatch {
                what,
                expected,
                got: self.width(),
            })
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_widths() {
        assert!(BitVector::zeros(0).is_err());
        assert!(BitVector::zeros(65).is_err());
        assert!(BitVector::from_index(8, 3).is_err());
        assert!(BitVector::from_index(u64::MAX, 64).is_ok());
    }

    #[test]
    fn digit_order_is_lsb_first() {
        let v = BitVector::parse("110").unwrap();
        assert_eq!(v.index(), 0b011);
        assert_eq!(v.to_string(), "110");
        assert!(BitVector::parse("12").is_err());
    }

    #[test]
    fn transpose_moves_rows_to_columns() {
        // top row set
        let m = BitVector::parse("111000000").unwrap();
        assert_eq!(m.transpose3().unwrap().to_string(), "100100100");
    }

    proptest! {
        #[test]
        fn index_round_trip(width in 1usize..=64, raw: u64) {
            let index = if width == 64 { raw } else { raw & ((1u64 << width) - 1) };
            let v = BitVector::from_index(index, width).unwrap();
            let back = BitVector::from_bits(&v.bits().collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(back, v);
            prop_assert_eq!(BitVector::parse(&v.to_string()).unwrap().index(), index);
        }
    }
}
