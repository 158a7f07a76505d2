//! CAVLC residual syntax.
//!
//! The decoder parses coeff_token, trailing-one signs, level codes,
//! total_zeros and run_before exactly as the entropy layer requires, then
//! discards the coefficient values: only the per-block nonzero count is
//! kept, because neighbouring blocks need it to select coeff_token tables.
//! The encode direction exists for building conformant test streams.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::bits::{BitReader, BitWriter};
use super::BitparseError;

/// (code bits, trailing_ones, total_coeff) rows of the coeff_token VLC
/// for 0 <= nC < 2.
const COEFF_TOKEN_NC0: &[(&str, u8, u8)] = &[
    ("1", 0, 0),
    ("000101", 0, 1),
    ("01", 1, 1),
    ("00000111", 0, 2),
    ("000100", 1, 2),
    ("001", 2, 2),
    ("000000111", 0, 3),
    ("00000110", 1, 3),
    ("0000101", 2, 3),
    ("00011", 3, 3),
    ("0000000111", 0, 4),
    ("000000110", 1, 4),
    ("00000101", 2, 4),
    ("000011", 3, 4),
    ("00000000111", 0, 5),
    ("0000000110", 1, 5),
    ("000000101", 2, 5),
    ("0000100", 3, 5),
    ("0000000001111", 0, 6),
    ("00000000110", 1, 6),
    ("0000000101", 2, 6),
    ("00000100", 3, 6),
    ("0000000001011", 0, 7),
    ("0000000001110", 1, 7),
    ("00000000101", 2, 7),
    ("000000100", 3, 7),
    ("0000000001000", 0, 8),
    ("0000000001010", 1, 8),
    ("0000000001101", 2, 8),
    ("0000000100", 3, 8),
    ("00000000001111", 0, 9),
    ("00000000001110", 1, 9),
    ("0000000001001", 2, 9),
    ("00000000100", 3, 9),
    ("00000000001011", 0, 10),
    ("00000000001010", 1, 10),
    ("00000000001101", 2, 10),
    ("0000000001100", 3, 10),
    ("000000000001111", 0, 11),
    ("000000000001110", 1, 11),
    ("00000000001001", 2, 11),
    ("00000000001100", 3, 11),
    ("000000000001011", 0, 12),
    ("000000000001010", 1, 12),
    ("000000000001101", 2, 12),
    ("00000000001000", 3, 12),
    ("0000000000001111", 0, 13),
    ("000000000000001", 1, 13),
    ("000000000001001", 2, 13),
    ("000000000001100", 3, 13),
    ("0000000000001011", 0, 14),
    ("0000000000001110", 1, 14),
    ("0000000000001101", 2, 14),
    ("000000000001000", 3, 14),
    ("0000000000000111", 0, 15),
    ("0000000000001010", 1, 15),
    ("0000000000001001", 2, 15),
    ("0000000000001100", 3, 15),
    ("0000000000000100", 0, 16),
    ("0000000000000110", 1, 16),
    ("0000000000000101", 2, 16),
    ("0000000000001000", 3, 16),
];

/// coeff_token rows for 2 <= nC < 4.
const COEFF_TOKEN_NC2: &[(&str, u8, u8)] = &[
    ("11", 0, 0),
    ("001011", 0, 1),
    ("10", 1, 1),
    ("000111", 0, 2),
    ("00111", 1, 2),
    ("011", 2, 2),
    ("0000111", 0, 3),
    ("001010", 1, 3),
    ("001001", 2, 3),
    ("0101", 3, 3),
    ("00000111", 0, 4),
    ("000110", 1, 4),
    ("000101", 2, 4),
    ("0100", 3, 4),
    ("00000100", 0, 5),
    ("0000110", 1, 5),
    ("0000101", 2, 5),
    ("00110", 3, 5),
    ("000000111", 0, 6),
    ("00000110", 1, 6),
    ("00000101", 2, 6),
    ("001000", 3, 6),
    ("00000001111", 0, 7),
    ("000000110", 1, 7),
    ("000000101", 2, 7),
    ("000100", 3, 7),
    ("00000001011", 0, 8),
    ("00000001110", 1, 8),
    ("00000001101", 2, 8),
    ("0000100", 3, 8),
    ("000000001111", 0, 9),
    ("00000001010", 1, 9),
    ("00000001001", 2, 9),
    ("000000100", 3, 9),
    ("000000001011", 0, 10),
    ("000000001110", 1, 10),
    ("000000001101", 2, 10),
    ("00000001100", 3, 10),
    ("000000001000", 0, 11),
    ("000000001010", 1, 11),
    ("000000001001", 2, 11),
    ("00000001000", 3, 11),
    ("0000000001111", 0, 12),
    ("0000000001110", 1, 12),
    ("0000000001101", 2, 12),
    ("000000001100", 3, 12),
    ("0000000001011", 0, 13),
    ("0000000001010", 1, 13),
    ("0000000001001", 2, 13),
    ("0000000001100", 3, 13),
    ("0000000000111", 0, 14),
    ("00000000001011", 1, 14),
    ("0000000000110", 2, 14),
    ("0000000001000", 3, 14),
    ("00000000001001", 0, 15),
    ("00000000001000", 1, 15),
    ("00000000001010", 2, 15),
    ("0000000000001", 3, 15),
    ("00000000000111", 0, 16),
    ("00000000000110", 1, 16),
    ("00000000000101", 2, 16),
    ("00000000000100", 3, 16),
];

/// coeff_token rows for 4 <= nC < 8.
const COEFF_TOKEN_NC4: &[(&str, u8, u8)] = &[
    ("1111", 0, 0),
    ("001111", 0, 1),
    ("1110", 1, 1),
    ("001011", 0, 2),
    ("01111", 1, 2),
    ("1101", 2, 2),
    ("001000", 0, 3),
    ("01100", 1, 3),
    ("01110", 2, 3),
    ("1100", 3, 3),
    ("0001111", 0, 4),
    ("01010", 1, 4),
    ("01011", 2, 4),
    ("1011", 3, 4),
    ("0001011", 0, 5),
    ("01000", 1, 5),
    ("01001", 2, 5),
    ("1010", 3, 5),
    ("0001001", 0, 6),
    ("001110", 1, 6),
    ("001101", 2, 6),
    ("1001", 3, 6),
    ("0001000", 0, 7),
    ("001010", 1, 7),
    ("001001", 2, 7),
    ("1000", 3, 7),
    ("00001111", 0, 8),
    ("0001110", 1, 8),
    ("0001101", 2, 8),
    ("01101", 3, 8),
    ("00001011", 0, 9),
    ("00001110", 1, 9),
    ("0001010", 2, 9),
    ("001100", 3, 9),
    ("000001111", 0, 10),
    ("00001010", 1, 10),
    ("00001101", 2, 10),
    ("0001100", 3, 10),
    ("000001011", 0, 11),
    ("000001110", 1, 11),
    ("00001001", 2, 11),
    ("00001100", 3, 11),
    ("000001000", 0, 12),
    ("000001010", 1, 12),
    ("000001101", 2, 12),
    ("00001000", 3, 12),
    ("0000001101", 0, 13),
    ("000000111", 1, 13),
    ("000001001", 2, 13),
    ("000001100", 3, 13),
    ("0000001001", 0, 14),
    ("0000001100", 1, 14),
    ("0000001011", 2, 14),
    ("0000001010", 3, 14),
    ("0000000101", 0, 15),
    ("0000001000", 1, 15),
    ("0000000111", 2, 15),
    ("0000000110", 3, 15),
    ("0000000001", 0, 16),
    ("0000000100", 1, 16),
    ("0000000011", 2, 16),
    ("0000000010", 3, 16),
];

/// coeff_token rows for chroma DC blocks (nC == -1, 4:2:0).
const COEFF_TOKEN_CHROMA_DC: &[(&str, u8, u8)] = &[
    ("01", 0, 0),
    ("000111", 0, 1),
    ("1", 1, 1),
    ("000100", 0, 2),
    ("000110", 1, 2),
    ("001", 2, 2),
    ("000011", 0, 3),
    ("0000011", 1, 3),
    ("0000010", 2, 3),
    ("000101", 3, 3),
    ("000010", 0, 4),
    ("00000011", 1, 4),
    ("00000010", 2, 4),
    ("0000000", 3, 4),
];

/// total_zeros VLC for 4x4 residual blocks; row index = total_coeff - 1,
/// column = total_zeros.
const TOTAL_ZEROS_LUMA: &[&[&str]] = &[
    &["1", "011", "010", "0011", "0010", "00011", "00010", "000011", "000010", "0000011", "0000010", "00000011", "00000010", "000000011", "000000010", "000000001"],
    &["111", "110", "101", "100", "011", "0101", "0100", "0011", "0010", "00011", "00010", "000011", "000010", "000001", "000000"],
    &["0101", "111", "110", "101", "0100", "0011", "100", "011", "0010", "00011", "00010", "000001", "00001", "000000"],
    &["00011", "111", "0101", "0100", "110", "101", "100", "0011", "011", "0010", "00010", "00001", "00000"],
    &["0101", "0100", "0011", "111", "110", "101", "100", "011", "0010", "00001", "0001", "00000"],
    &["000001", "00001", "111", "110", "101", "100", "011", "010", "0001", "001", "000000"],
    &["000001", "00001", "101", "100", "011", "11", "010", "0001", "001", "000000"],
    &["000001", "0001", "00001", "011", "11", "10", "010", "001", "000000"],
    &["000001", "000000", "0001", "11", "10", "001", "01", "00001"],
    &["00001", "00000", "001", "11", "10", "01", "0001"],
    &["0000", "0001", "001", "010", "1", "011"],
    &["0000", "0001", "01", "1", "001"],
    &["000", "001", "1", "01"],
    &["00", "01", "1"],
    &["0", "1"],
];

/// total_zeros VLC for 2x2 chroma DC blocks (4:2:0); row = total_coeff - 1.
const TOTAL_ZEROS_CHROMA_DC: &[&[&str]] = &[
    &["1", "01", "001", "000"],
    &["1", "01", "00"],
    &["1", "0"],
];

/// run_before VLC; row index = min(zeros_left, 7) - 1, column = run_before.
const RUN_BEFORE: &[&[&str]] = &[
    &["1", "0"],
    &["1", "01", "00"],
    &["11", "10", "01", "00"],
    &["11", "10", "01", "001", "000"],
    &["11", "10", "011", "010", "001", "000"],
    &["11", "000", "001", "011", "010", "101", "100"],
    &["111", "110", "101", "100", "011", "010", "001", "0001", "00001", "000001", "0000001", "00000001", "000000001", "0000000001", "00000000001"],
];

type VlcKey = (u8, u16); // (code length, code value)

struct VlcDecode {
    map: HashMap<VlcKey, (u8, u8)>,
    max_len: u8,
}

impl VlcDecode {
    fn build(rows: &[(&str, u8, u8)]) -> Self {
        let mut map = HashMap::new();
        let mut max_len = 0;
        for (code, t1, tc) in rows {
            let len = code.len() as u8;
            let val = u16::from_str_radix(code, 2).expect("binary literal");
            let prev = map.insert((len, val), (*t1, *tc));
            assert!(prev.is_none(), "duplicate VLC code {code}");
            max_len = max_len.max(len);
        }
        VlcDecode { map, max_len }
    }
}

struct ValueVlc {
    // rows[row][value] = (len, code)
    rows: Vec<HashMap<VlcKey, u8>>,
    encode: Vec<Vec<(u8, u16)>>,
    max_len: u8,
}

impl ValueVlc {
    fn build(table: &[&[&str]]) -> Self {
        let mut rows = Vec::new();
        let mut encode = Vec::new();
        let mut max_len = 0;
        for row in table {
            let mut m = HashMap::new();
            let mut e = Vec::new();
            for (value, code) in row.iter().enumerate() {
                let len = code.len() as u8;
                let val = u16::from_str_radix(code, 2).expect("binary literal");
                let prev = m.insert((len, val), value as u8);
                assert!(prev.is_none(), "duplicate VLC code {code}");
                e.push((len, val));
                max_len = max_len.max(len);
            }
            rows.push(m);
            encode.push(e);
        }
        ValueVlc { rows, encode, max_len }
    }
}

struct Tables {
    coeff_token: [VlcDecode; 3],
    coeff_token_chroma: VlcDecode,
    coeff_token_encode: [HashMap<(u8, u8), (u8, u16)>; 4],
    total_zeros: ValueVlc,
    total_zeros_chroma: ValueVlc,
    run_before: ValueVlc,
}

fn encode_map(rows: &[(&str, u8, u8)]) -> HashMap<(u8, u8), (u8, u16)> {
    rows.iter()
        .map(|(code, t1, tc)| {
            ((*t1, *tc), (code.len() as u8, u16::from_str_radix(code, 2).unwrap()))
        })
        .collect()
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| Tables {
        coeff_token: [
            VlcDecode::build(COEFF_TOKEN_NC0),
            VlcDecode::build(COEFF_TOKEN_NC2),
            VlcDecode::build(COEFF_TOKEN_NC4),
        ],
        coeff_token_chroma: VlcDecode::build(COEFF_TOKEN_CHROMA_DC),
        coeff_token_encode: [
            encode_map(COEFF_TOKEN_NC0),
            encode_map(COEFF_TOKEN_NC2),
            encode_map(COEFF_TOKEN_NC4),
            encode_map(COEFF_TOKEN_CHROMA_DC),
        ],
        total_zeros: ValueVlc::build(TOTAL_ZEROS_LUMA),
        total_zeros_chroma: ValueVlc::build(TOTAL_ZEROS_CHROMA_DC),
        run_before: ValueVlc::build(RUN_BEFORE),
    })
}

fn read_vlc(r: &mut BitReader, table: &VlcDecode, what: &'static str) -> Result<(u8, u8), BitparseError> {
    let mut len = 0u8;
    let mut val = 0u16;
    while len < table.max_len {
        val = (val << 1) | r.read_bit()? as u16;
        len += 1;
        if let Some(&hit) = table.map.get(&(len, val)) {
            return Ok(hit);
        }
    }
    Err(BitparseError::Malformed { what, reason: "no VLC code matches", bit: r.bit_pos() })
}

fn read_value_vlc(
    r: &mut BitReader,
    vlc: &ValueVlc,
    row: usize,
    what: &'static str,
) -> Result<u8, BitparseError> {
    let map = &vlc.rows[row];
    let mut len = 0u8;
    let mut val = 0u16;
    while len < vlc.max_len {
        val = (val << 1) | r.read_bit()? as u16;
        len += 1;
        if let Some(&hit) = map.get(&(len, val)) {
            return Ok(hit);
        }
    }
    Err(BitparseError::Malformed { what, reason: "no VLC code matches", bit: r.bit_pos() })
}

/// Decodes coeff_token, returning (trailing_ones, total_coeff).
///
/// `nc` is the context: -1 for chroma DC, otherwise the predicted nonzero
/// count from the left/top neighbouring blocks.
pub fn decode_coeff_token(r: &mut BitReader, nc: i32) -> Result<(u8, u8), BitparseError> {
    let t = tables();
    if nc == -1 {
        return read_vlc(r, &t.coeff_token_chroma, "coeff_token (chroma DC)");
    }
    match nc {
        0..=1 => read_vlc(r, &t.coeff_token[0], "coeff_token"),
        2..=3 => read_vlc(r, &t.coeff_token[1], "coeff_token"),
        4..=7 => read_vlc(r, &t.coeff_token[2], "coeff_token"),
        _ if nc >= 8 => {
            // fixed 6-bit code: 4*(total_coeff-1) + trailing_ones, (0,0) = 3
            let code = r.read_bits(6)? as u8;
            if code == 3 {
                return Ok((0, 0));
            }
            let t1 = code & 3;
            let tc = (code >> 2) + 1;
            if t1 > tc.min(3) || (tc == 1 && t1 > 1) {
                return Err(BitparseError::Malformed {
                    what: "coeff_token",
                    reason: "invalid fixed-length code",
                    bit: r.bit_pos(),
                });
            }
            Ok((t1, tc))
        }
        _ => Err(BitparseError::Malformed {
            what: "coeff_token",
            reason: "negative nC other than chroma DC",
            bit: r.bit_pos(),
        }),
    }
}

pub fn encode_coeff_token(w: &mut BitWriter, nc: i32, trailing_ones: u8, total_coeff: u8) {
    let t = tables();
    let table_idx = match nc {
        -1 => 3,
        0..=1 => 0,
        2..=3 => 1,
        4..=7 => 2,
        _ => {
            let code = if total_coeff == 0 { 3 } else { ((total_coeff - 1) << 2) | trailing_ones };
            w.write_bits(code.into(), 6);
            return;
        }
    };
    let (len, val) = t.coeff_token_encode[table_idx][&(trailing_ones, total_coeff)];
    w.write_bits(val.into(), len.into());
}

/// Parses one residual block's syntax and returns its total_coeff.
///
/// Coefficient values are decoded (to keep the cursor aligned) and dropped.
/// `max_num_coeff` is 16 for plain 4x4 blocks, 15 for DC-split AC blocks
/// and 4 for chroma DC.
pub fn parse_residual_block(
    r: &mut BitReader,
    nc: i32,
    max_num_coeff: u8,
) -> Result<u8, BitparseError> {
    let (trailing_ones, total_coeff) = decode_coeff_token(r, nc)?;
    if total_coeff > max_num_coeff {
        return Err(BitparseError::Malformed {
            what: "residual block",
            reason: "total_coeff exceeds block size",
            bit: r.bit_pos(),
        });
    }
    if total_coeff == 0 {
        return Ok(0);
    }

    for _ in 0..trailing_ones {
        let _sign = r.read_bit()?;
    }

    let mut suffix_length: u32 = if total_coeff > 10 && trailing_ones < 3 { 1 } else { 0 };
    for i in trailing_ones..total_coeff {
        let mut level_prefix = 0u32;
        while r.read_bit()? == 0 {
            level_prefix += 1;
            if level_prefix > 32 {
                return Err(BitparseError::Malformed {
                    what: "residual block",
                    reason: "level_prefix too long",
                    bit: r.bit_pos(),
                });
            }
        }
        let level_suffix_size = if level_prefix == 14 && suffix_length == 0 {
            4
        } else if level_prefix >= 15 {
            level_prefix - 3
        } else {
            suffix_length
        };
        let suffix = if level_suffix_size > 0 { r.read_bits(level_suffix_size)? } else { 0 };
        let mut level_code = i64::from(level_prefix.min(15) << suffix_length) + i64::from(suffix);
        if level_prefix >= 15 && suffix_length == 0 {
            level_code += 15;
        }
        if level_prefix >= 16 {
            level_code += (1i64 << (level_prefix - 3)) - 4096;
        }
        if i == trailing_ones && trailing_ones < 3 {
            level_code += 2;
        }
        let level: i64 = if level_code % 2 == 0 { (level_code + 2) >> 1 } else { -((level_code + 1) >> 1) };
        if suffix_length == 0 {
            suffix_length = 1;
        }
        if level.unsigned_abs() > (3 << (suffix_length - 1)) && suffix_length < 6 {
            suffix_length += 1;
        }
    }

    let mut zeros_left: u8 = 0;
    if total_coeff < max_num_coeff {
        let t = tables();
        zeros_left = if max_num_coeff == 4 {
            read_value_vlc(r, &t.total_zeros_chroma, (total_coeff - 1).into(), "total_zeros (chroma DC)")?
        } else {
            read_value_vlc(r, &t.total_zeros, (total_coeff - 1).into(), "total_zeros")?
        };
        if zeros_left > max_num_coeff - total_coeff {
            return Err(BitparseError::Malformed {
                what: "residual block",
                reason: "total_zeros exceeds remaining positions",
                bit: r.bit_pos(),
            });
        }
    }

    for _ in 0..total_coeff.saturating_sub(1) {
        if zeros_left == 0 {
            break;
        }
        let t = tables();
        let row = (zeros_left.min(7) - 1) as usize;
        let run = read_value_vlc(r, &t.run_before, row, "run_before")?;
        if run > zeros_left {
            return Err(BitparseError::Malformed {
                what: "residual block",
                reason: "run_before exceeds zeros left",
                bit: r.bit_pos(),
            });
        }
        zeros_left -= run;
    }

    Ok(total_coeff)
}

/// Encodes one residual block from a dense coefficient array in scan order
/// (lowest frequency first). Inverse of [`parse_residual_block`]; used by
/// the fixture stream builder.
pub fn encode_residual_block(w: &mut BitWriter, coeffs: &[i32], nc: i32) {
    let max_num_coeff = coeffs.len() as u8;
    // collect nonzero levels in reverse scan order (highest frequency first)
    let nonzero: Vec<(usize, i32)> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect();
    let total_coeff = nonzero.len() as u8;

    let mut trailing_ones = 0u8;
    for (_, level) in nonzero.iter().take(3) {
        if level.abs() == 1 {
            trailing_ones += 1;
        } else {
            break;
        }
    }

    encode_coeff_token(w, nc, trailing_ones, total_coeff);
    if total_coeff == 0 {
        return;
    }

    for (_, level) in nonzero.iter().take(trailing_ones as usize) {
        w.write_bit(*level < 0);
    }

    let mut suffix_length: u32 = if total_coeff > 10 && trailing_ones < 3 { 1 } else { 0 };
    for (i, (_, level)) in nonzero.iter().enumerate().skip(trailing_ones as usize) {
        let level = i64::from(*level);
        let mut level_code = if level > 0 { 2 * level - 2 } else { -2 * level - 1 };
        if i == trailing_ones as usize && trailing_ones < 3 {
            level_code -= 2;
        }
        debug_assert!(level_code >= 0);
        if suffix_length == 0 {
            if level_code < 14 {
                w.write_bits(1, level_code as u32 + 1); // prefix zeros + stop
            } else if level_code < 30 {
                w.write_bits(1, 15); // prefix 14
                w.write_bits((level_code - 14) as u32, 4);
            } else {
                assert!(level_code - 30 < 4096, "level too large for fixture encoder");
                w.write_bits(1, 16); // prefix 15
                w.write_bits((level_code - 30) as u32, 12);
            }
        } else if level_code < (15 << suffix_length) {
            let prefix = (level_code >> suffix_length) as u32;
            w.write_bits(1, prefix + 1);
            w.write_bits(level_code as u32 & ((1 << suffix_length) - 1), suffix_length);
        } else {
            let rem = level_code - (15 << suffix_length);
            assert!(rem < 4096, "level too large for fixture encoder");
            w.write_bits(1, 16);
            w.write_bits(rem as u32, 12);
        }
        if suffix_length == 0 {
            suffix_length = 1;
        }
        if level.unsigned_abs() > (3 << (suffix_length - 1)) && suffix_length < 6 {
            suffix_length += 1;
        }
    }

    // total_zeros = zeros located before the highest-frequency nonzero coeff
    let highest = nonzero.first().expect("total_coeff > 0").0;
    let total_zeros: u8 = coeffs[..highest].iter().filter(|&&c| c == 0).count() as u8;

    let t = tables();
    if total_coeff < max_num_coeff {
        let (len, val) = if max_num_coeff == 4 {
            t.total_zeros_chroma.encode[(total_coeff - 1) as usize][total_zeros as usize]
        } else {
            t.total_zeros.encode[(total_coeff - 1) as usize][total_zeros as usize]
        };
        w.write_bits(val.into(), len.into());
    }

    let mut zeros_left = total_zeros;
    for k in 0..nonzero.len().saturating_sub(1) {
        if zeros_left == 0 {
            break;
        }
        let pos = nonzero[k].0;
        let prev_pos = nonzero[k + 1].0;
        let run: u8 = coeffs[prev_pos + 1..pos].iter().filter(|&&c| c == 0).count() as u8;
        let row = (zeros_left.min(7) - 1) as usize;
        let (len, val) = t.run_before.encode[row][run as usize];
        w.write_bits(val.into(), len.into());
        zeros_left -= run;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_tables() -> Vec<(&'static str, Vec<&'static str>)> {
        let mut out: Vec<(&'static str, Vec<&'static str>)> = vec![
            ("coeff_token nc0", COEFF_TOKEN_NC0.iter().map(|e| e.0).collect()),
            ("coeff_token nc2", COEFF_TOKEN_NC2.iter().map(|e| e.0).collect()),
            ("coeff_token nc4", COEFF_TOKEN_NC4.iter().map(|e| e.0).collect()),
            ("coeff_token chroma", COEFF_TOKEN_CHROMA_DC.iter().map(|e| e.0).collect()),
        ];
        for (i, row) in TOTAL_ZEROS_LUMA.iter().enumerate() {
            out.push(("total_zeros", row.to_vec()));
            assert_eq!(row.len(), 16 - i, "row {i} arity");
        }
        for (i, row) in TOTAL_ZEROS_CHROMA_DC.iter().enumerate() {
            out.push(("total_zeros chroma", row.to_vec()));
            assert_eq!(row.len(), 4 - i, "chroma row {i} arity");
        }
        for row in RUN_BEFORE {
            out.push(("run_before", row.to_vec()));
        }
        out
    }

    #[test]
    fn vlc_tables_are_prefix_free() {
        for (name, codes) in all_tables() {
            for a in &codes {
                for b in &codes {
                    if a != b {
                        assert!(!b.starts_with(a), "{name}: {a} prefixes {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn coeff_token_known_codes() {
        for (bits, nc, expect) in [
            ("1", 0, (0u8, 0u8)),
            ("01", 0, (1, 1)),
            ("001", 1, (2, 2)),
            ("11", 2, (0, 0)),
            ("1111", 4, (0, 0)),
            ("01", -1, (0, 0)),
            ("1", -1, (1, 1)),
        ] {
            let mut w = BitWriter::new();
            w.write_bitstring(&crate::bitparse::bits::BitString::from_str01(bits));
            w.write_rbsp_trailing();
            let bytes = w.into_bytes();
            let mut r = BitReader::new(&bytes);
            assert_eq!(decode_coeff_token(&mut r, nc).unwrap(), expect, "bits {bits} nc {nc}");
        }
    }

    #[test]
    fn coeff_token_roundtrip_all_contexts() {
        for nc in [-1i32, 0, 1, 2, 3, 4, 7, 8, 16] {
            let max_tc = if nc == -1 { 4 } else { 16 };
            for tc in 0..=max_tc {
                for t1 in 0..=tc.min(3) {
                    let mut w = BitWriter::new();
                    encode_coeff_token(&mut w, nc, t1, tc);
                    w.write_rbsp_trailing();
                    let bytes = w.into_bytes();
                    let mut r = BitReader::new(&bytes);
                    assert_eq!(decode_coeff_token(&mut r, nc).unwrap(), (t1, tc), "nc {nc} t1 {t1} tc {tc}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn residual_block_roundtrip(
            raw in proptest::collection::vec(-40i32..40, 16),
            zero_mask in proptest::collection::vec(prop::bool::ANY, 16),
            nc in prop_oneof![Just(0i32), Just(2), Just(4), Just(8)],
        ) {
            let coeffs: Vec<i32> = raw.iter().zip(&zero_mask)
                .map(|(&c, &keep)| if keep { c } else { 0 })
                .collect();
            let mut w = BitWriter::new();
            encode_residual_block(&mut w, &coeffs, nc);
            w.write_rbsp_trailing();
            let bytes = w.into_bytes();
            let mut r = BitReader::new(&bytes);
            let expected_tc = coeffs.iter().filter(|&&c| c != 0).count() as u8;
            let tc = parse_residual_block(&mut r, nc, 16).unwrap();
            prop_assert_eq!(tc, expected_tc);
            prop_assert!(!r.more_rbsp_data(), "parser must consume the exact syntax");
        }

        #[test]
        fn chroma_dc_roundtrip(raw in proptest::collection::vec(-10i32..10, 4)) {
            let mut w = BitWriter::new();
            encode_residual_block(&mut w, &raw, -1);
            w.write_rbsp_trailing();
            let bytes = w.into_bytes();
            let mut r = BitReader::new(&bytes);
            let expected_tc = raw.iter().filter(|&&c| c != 0).count() as u8;
            prop_assert_eq!(parse_residual_block(&mut r, -1, 4).unwrap(), expected_tc);
        }

        #[test]
        fn residual_parse_never_panics(data in proptest::collection::vec(any::<u8>(), 1..64), nc in -1i32..20) {
            let mut r = BitReader::new(&data);
            let _ = parse_residual_block(&mut r, nc, if nc == -1 { 4 } else { 16 });
        }
    }

    #[test]
    fn large_levels_roundtrip() {
        // exercises the escape paths: suffix_length growth and prefix-15 escapes
        let coeffs: Vec<i32> = vec![900, -800, 700, -60, 50, -40, 30, -20, 10, -9, 8, -7, 1, -1, 1, -1];
        let mut w = BitWriter::new();
        encode_residual_block(&mut w, &coeffs, 0);
        w.write_rbsp_trailing();
        let bytes = w.into_bytes();
        let mut r = BitReader::new(&bytes);
        assert_eq!(parse_residual_block(&mut r, 0, 16).unwrap(), 16);
        assert!(!r.more_rbsp_data());
    }
}
