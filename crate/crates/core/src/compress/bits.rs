//! MSB-first bit packing.

use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub(crate) struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    filled: u32,
}

impl BitWriter {
    pub(crate) fn with_prefix(prefix: Vec<u8>) -> Self {
        BitWriter {
            out: prefix,
            acc: 0,
            filled: 0,
        }
    }

    /// Appends the low `width` bits of `value` (`width <= 32`).
    pub(crate) fn write(&mut self, value: u32, width: u32) {
        debug_assert!(width <= 32);
        debug_assert!(width == 32 || value >> width == 0);
        if width == 0 {
            return;
        }
        self.acc = (self.acc << width) | u64::from(value);
        self.filled += width;
        while self.filled >= 8 {
            self.filled -= 8;
            self.out.push((self.acc >> self.filled) as u8);
        }
        self.acc &= (1u64 << self.filled) - 1;
    }

    pub(crate) fn bytes_so_far(&self) -> usize {
        self.out.len() + usize::from(self.filled > 0)
    }

    pub(crate) fn finish(mut self) -> Vec<u8> {
        if self.filled > 0 {
            self.out.push((self.acc << (8 - self.filled)) as u8);
        }
        self.out
    }
}

pub(crate) struct BitReader<'a> {
    data: &'a [u8],
    bit_pos: usize,
}

impl<'a> BitReader<'a> {
    pub(crate) fn new(data: &'a [u8]) -> Self {
        BitReader { data, bit_pos: 0 }
    }

    pub(crate) fn read(&mut self, width: u32) -> Result<u32> {
        let width = width as usize;
        if self.bit_pos + width > self.data.len() * 8 {
            return Err(Error::Decode("stream truncated".into()));
        }
        let mut v = 0u32;
        for _ in 0..width {
            let byte = self.data[self.bit_pos / 8];
            let bit = (byte >> (7 - self.bit_pos % 8)) & 1;
            v = (v << 1) | u32::from(bit);
            self.bit_pos += 1;
        }
        Ok(v)
    }

    /// Fails unless only zero padding inside the final byte remains.
    pub(crate) fn expect_end(&self) -> Result<()> {
        let used_bytes = self.bit_pos.div_ceil(8);
        if used_bytes != self.data.len() {
            return Err(Error::Decode(format!(
                "{} trailing bytes after end of stream",
                self.data.len() - used_bytes
            )));
        }
        if !self.bit_pos.is_multiple_of(8) {
            let last = self.data[used_bytes - 1];
            if last & ((1u8 << (8 - self.bit_pos % 8)) - 1) != 0 {
                return Err(Error::Decode("non-zero padding bits".into()));
            }
        }
        Ok(())
    }
}
