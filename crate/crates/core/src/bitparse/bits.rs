//! Bit cursor over RBSP bytes plus Exp-Golomb entropy codes.

use super::BitparseError;

/// MSB-first bit reader over a byte slice.
#[derive(Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize, // absolute bit position
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        BitReader { data, pos: 0 }
    }

    pub fn bit_pos(&self) -> usize {
        self.pos
    }

    pub fn bits_left(&self) -> usize {
        self.data.len() * 8 - self.pos
    }

    pub fn read_bit(&mut self) -> Result<u32, BitparseError> {
        let byte = self
            .data
            .get(self.pos >> 3)
            .ok_or(BitparseError::OutOfBits { bit: self.pos })?;
        let bit = (byte >> (7 - (self.pos & 7))) & 1;
        self.pos += 1;
        Ok(u32::from(bit))
    }

    pub fn read_flag(&mut self) -> Result<bool, BitparseError> {
        Ok(self.read_bit()? == 1)
    }

    /// Reads `n` bits (n <= 32) MSB-first.
    pub fn read_bits(&mut self, n: u32) -> Result<u32, BitparseError> {
        debug_assert!(n <= 32);
        let mut v: u32 = 0;
        for _ in 0..n {
            v = (v << 1) | self.read_bit()?;
        }
        Ok(v)
    }

    /// ue(v): unsigned Exp-Golomb.
    pub fn read_ue(&mut self) -> Result<u32, BitparseError> {
        let mut leading_zeros = 0u32;
        while self.read_bit()? == 0 {
            leading_zeros += 1;
            if leading_zeros > 31 {
                return Err(BitparseError::CodeTooLong { bit: self.pos });
            }
        }
        if leading_zeros == 0 {
            return Ok(0);
        }
        let suffix = self.read_bits(leading_zeros)?;
        let code = (1u64 << leading_zeros) - 1 + u64::from(suffix);
        u32::try_from(code).map_err(|_| BitparseError::CodeTooLong { bit: self.pos })
    }

    /// se(v): signed Exp-Golomb. Code numbers 1,2,3,4 map to +1,-1,+2,-2.
    pub fn read_se(&mut self) -> Result<i32, BitparseError> {
        let code = i64::from(self.read_ue()?);
        let value = if code % 2 == 0 { -code / 2 } else { (code + 1) / 2 };
        Ok(value as i32)
    }

    /// te(v): truncated Exp-Golomb with the given upper bound.
    pub fn read_te(&mut self, max: u32) -> Result<u32, BitparseError> {
        if max == 1 {
            Ok(1 - self.read_bit()?)
        } else {
            self.read_ue()
        }
    }

    /// Skips forward to the next byte boundary.
    pub fn byte_align(&mut self) -> Result<(), BitparseError> {
        while self.pos & 7 != 0 {
            self.read_bit()?;
        }
        Ok(())
    }

    pub fn read_byte_aligned(&mut self, out: &mut [u8]) -> Result<(), BitparseError> {
        debug_assert!(self.pos & 7 == 0);
        let start = self.pos >> 3;
        let end = start + out.len();
        if end > self.data.len() {
            return Err(BitparseError::OutOfBits { bit: end * 8 });
        }
        out.copy_from_slice(&self.data[start..end]);
        self.pos = end * 8;
        Ok(())
    }

    /// True while bits remain before the rbsp_stop_one_bit.
    ///
    /// The RBSP ends with a single 1 bit followed by zero padding; data
    /// remains iff the cursor is before that final set bit.
    pub fn more_rbsp_data(&self) -> bool {
        let mut last_set: Option<usize> = None;
        for (i, b) in self.data.iter().enumerate().rev() {
            if *b != 0 {
                last_set = Some(i * 8 + (7 - b.trailing_zeros() as usize));
                break;
            }
        }
        match last_set {
            Some(stop) => self.pos < stop,
            None => false,
        }
    }

    /// Reads the remainder of the buffer as raw bits.
    pub fn read_tail(&mut self) -> BitString {
        let mut tail = BitString::new();
        while self.bits_left() > 0 {
            tail.push(self.read_bit().expect("bits_left checked") == 1);
        }
        tail
    }
}

/// MSB-first bit sink.
#[derive(Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    nbits: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bit_len(&self) -> usize {
        self.nbits
    }

    pub fn write_bit(&mut self, bit: bool) {
        if self.nbits & 7 == 0 {
            self.bytes.push(0);
        }
        if bit {
            let idx = self.nbits >> 3;
            self.bytes[idx] |= 1 << (7 - (self.nbits & 7));
        }
        self.nbits += 1;
    }

    pub fn write_flag(&mut self, flag: bool) {
        self.write_bit(flag);
    }

    pub fn write_bits(&mut self, value: u32, n: u32) {
        debug_assert!(n <= 32);
        for i in (0..n).rev() {
            self.write_bit((value >> i) & 1 == 1);
        }
    }

    pub fn write_ue(&mut self, value: u32) {
        let code = u64::from(value) + 1;
        let len = 64 - code.leading_zeros();
        for _ in 0..len - 1 {
            self.write_bit(false);
        }
        for i in (0..len).rev() {
            self.write_bit((code >> i) & 1 == 1);
        }
    }

    pub fn write_se(&mut self, value: i32) {
        let v = i64::from(value);
        let code = if v <= 0 { (-v * 2) as u64 } else { (v * 2 - 1) as u64 };
        debug_assert!(code <= u64::from(u32::MAX));
        self.write_ue(code as u32);
    }

    pub fn write_te(&mut self, value: u32, max: u32) {
        if max == 1 {
            self.write_bit(value == 0);
        } else {
            self.write_ue(value);
        }
    }

    pub fn write_byte_aligned(&mut self, bytes: &[u8]) {
        debug_assert!(self.nbits & 7 == 0);
        self.bytes.extend_from_slice(bytes);
        self.nbits += bytes.len() * 8;
    }

    pub fn write_bitstring(&mut self, bits: &BitString) {
        for i in 0..bits.len() {
            self.write_bit(bits.get(i));
        }
    }

    /// rbsp_stop_one_bit plus zero padding to the byte boundary.
    pub fn write_rbsp_trailing(&mut self) {
        self.write_bit(true);
        while self.nbits & 7 != 0 {
            self.write_bit(false);
        }
    }

    /// Zero bits up to the byte boundary (pcm alignment).
    pub fn zero_align(&mut self) {
        while self.nbits & 7 != 0 {
            self.write_bit(false);
        }
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

/// An arbitrary-length bit sequence, used to carry uninterpreted header
/// tails verbatim so parse/serialize roundtrips stay bit-exact.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    /// Parses a string of '0'/'1' characters; other characters are ignored.
    pub fn from_str01(s: &str) -> Self {
        let bits = s.chars().filter_map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        });
        BitString { bits: bits.collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reader_from(s: &str) -> Vec<u8> {
        let bs = BitString::from_str01(s);
        let mut w = BitWriter::new();
        w.write_bitstring(&bs);
        // pad out with ones so short reads in tests never hit EOF
        while w.bit_len() & 7 != 0 {
            w.write_bit(true);
        }
        w.into_bytes()
    }

    #[test]
    fn ue_zero_case() {
        let data = reader_from("1");
        assert_eq!(BitReader::new(&data).read_ue().unwrap(), 0);
    }

    #[test]
    fn ue_small_codes() {
        let data = reader_from("010");
        assert_eq!(BitReader::new(&data).read_ue().unwrap(), 1);
        let data = reader_from("00100");
        assert_eq!(BitReader::new(&data).read_ue().unwrap(), 3);
    }

    #[test]
    fn se_mapping() {
        // code numbers 1,2,3,4 -> +1,-1,+2,-2
        let data = reader_from("011");
        assert_eq!(BitReader::new(&data).read_se().unwrap(), -1);
        for (bits, expect) in [("010", 1), ("011", -1), ("00100", 2), ("00101", -2)] {
            let data = reader_from(bits);
            assert_eq!(BitReader::new(&data).read_se().unwrap(), expect, "bits {bits}");
        }
    }

    #[test]
    fn out_of_bits_is_reported() {
        let data: [u8; 1] = [0x00];
        let mut r = BitReader::new(&data);
        // all-zero prefix never terminates inside the buffer
        assert!(matches!(
            r.read_ue(),
            Err(BitparseError::OutOfBits { .. })
        ));
    }

    #[test]
    fn more_rbsp_data_sees_stop_bit() {
        // one flag, then stop bit + padding
        let mut w = BitWriter::new();
        w.write_flag(true);
        w.write_rbsp_trailing();
        let bytes = w.into_bytes();
        let mut r = BitReader::new(&bytes);
        assert!(r.more_rbsp_data());
        r.read_flag().unwrap();
        assert!(!r.more_rbsp_data());
    }

    proptest! {
        #[test]
        fn ue_roundtrip(v in 0u32..u32::MAX) {
            let mut w = BitWriter::new();
            w.write_ue(v);
            w.write_rbsp_trailing();
            let bytes = w.into_bytes();
            prop_assert_eq!(BitReader::new(&bytes).read_ue().unwrap(), v);
        }

        #[test]
        fn se_roundtrip(v in -(1i32 << 30)..(1i32 << 30)) {
            let mut w = BitWriter::new();
            w.write_se(v);
            w.write_rbsp_trailing();
            let bytes = w.into_bytes();
            prop_assert_eq!(BitReader::new(&bytes).read_se().unwrap(), v);
        }

        #[test]
        fn bits_roundtrip(v in 0u32..u32::MAX, n in 1u32..=32) {
            let v = if n == 32 { v } else { v & ((1 << n) - 1) };
            let mut w = BitWriter::new();
            w.write_bits(v, n);
            w.write_rbsp_trailing();
            let bytes = w.into_bytes();
            prop_assert_eq!(BitReader::new(&bytes).read_bits(n).unwrap(), v);
        }
    }
}
