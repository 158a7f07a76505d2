//! Annex-B framing: start-code scan and emulation-prevention handling.

use super::BitparseError;

pub const NAL_SLICE_NON_IDR: u8 = 1;
pub const NAL_SLICE_IDR: u8 = 5;
pub const NAL_SEI: u8 = 6;
pub const NAL_SPS: u8 = 7;
pub const NAL_PPS: u8 = 8;
pub const NAL_AUD: u8 = 9;

/// One network abstraction layer unit with its RBSP payload
/// (emulation-prevention bytes already removed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NalUnit {
    pub ref_idc: u8,
    pub unit_type: u8,
    pub rbsp: Vec<u8>,
}

/// Splits an Annex-B byte stream into NAL units.
///
/// Both 3-byte and 4-byte start codes are accepted; bytes before the first
/// start code are ignored. A start code at end-of-stream with no header byte
/// is reported as a truncated stream.
pub fn split_annexb(stream: &[u8]) -> Result<Vec<NalUnit>, BitparseError> {
    let mut units = Vec::new();
    let mut i = 0usize;
    let mut payload_start: Option<usize> = None;

    let mut flush = |start: usize, end: usize, units: &mut Vec<NalUnit>| -> Result<(), BitparseError> {
        let payload = &stream[start..end];
        if payload.is_empty() {
            return Err(BitparseError::TruncatedStream { offset: start });
        }
        let header = payload[0];
        if header & 0x80 != 0 {
            return Err(BitparseError::MalformedHeader { reason: "forbidden_zero_bit set" });
        }
        units.push(NalUnit {
            ref_idc: (header >> 5) & 0x3,
            unit_type: header & 0x1f,
            rbsp: strip_emulation_prevention(&payload[1..]),
        });
        Ok(())
    };

    while i + 2 < stream.len() {
        if stream[i] == 0 && stream[i + 1] == 0 && stream[i + 2] == 1 {
            let code_pos = i;
            if let Some(start) = payload_start {
                // a 4-byte start code claims one preceding zero
                let mut end = code_pos;
                if end > start && stream[end - 1] == 0 {
                    end -= 1;
                }
                flush(start, end, &mut units)?;
            }
            i += 3;
            payload_start = Some(i);
        } else {
            i += 1;
        }
    }
    match payload_start {
        Some(start) => flush(start, stream.len(), &mut units)?,
        None => {} // no start code at all: empty or garbage-only stream
    }
    Ok(units)
}

/// Removes emulation-prevention bytes: `00 00 03 xx` with `xx <= 03`
/// becomes `00 00 xx`.
pub fn strip_emulation_prevention(payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(payload.len());
    let mut zeros = 0usize;
    let mut i = 0usize;
    while i < payload.len() {
        let b = payload[i];
        if zeros >= 2 && b == 3 && payload.get(i + 1).is_some_and(|n| *n <= 3) {
            zeros = 0;
            i += 1;
            continue;
        }
        zeros = if b == 0 { zeros + 1 } else { 0 };
        out.push(b);
        i += 1;
    }
    out
}

/// Inserts emulation-prevention bytes so the payload never contains a
/// `00 00 0x` (x <= 3) pattern.
pub fn insert_emulation_prevention(rbsp: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(rbsp.len() + rbsp.len() / 64);
    let mut zeros = 0usize;
    for &b in rbsp {
        if zeros >= 2 && b <= 3 {
            out.push(3);
            zeros = 0;
        }
        zeros = if b == 0 { zeros + 1 } else { 0 };
        out.push(b);
    }
    out
}

/// Serializes a NAL unit with a 4-byte start code.
pub fn write_annexb(nal: &NalUnit, out: &mut Vec<u8>) {
    out.extend_from_slice(&[0, 0, 0, 1]);
    out.push((nal.ref_idc << 5) | (nal.unit_type & 0x1f));
    out.extend_from_slice(&insert_emulation_prevention(&nal.rbsp));
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_stream_yields_no_units() {
        assert_eq!(split_annexb(&[]).unwrap(), Vec::new());
    }

    #[test]
    fn single_unit_with_4byte_code() {
        let units = split_annexb(&[0x00, 0x00, 0x00, 0x01, 0x67, 0x42]).unwrap();
        assert_eq!(units.len(), 1);
        assert_eq!(units[0].unit_type, 7);
        assert_eq!(units[0].ref_idc, 3);
        assert_eq!(units[0].rbsp, vec![0x42]);
    }

    #[test]
    fn three_byte_code_and_leading_garbage() {
        let units = split_annexb(&[0xaa, 0x00, 0x00, 0x01, 0x41, 0x99]).unwrap();
        assert_eq!(units.len(), 1);
        assert_eq!(units[0].unit_type, 1);
        assert_eq!(units[0].ref_idc, 2);
    }

    #[test]
    fn two_units_split_on_boundary() {
        let data = [
            0x00, 0x00, 0x00, 0x01, 0x67, 0x11, // sps
            0x00, 0x00, 0x01, 0x68, 0x22, // pps, 3-byte code
        ];
        let units = split_annexb(&data).unwrap();
        assert_eq!(units.len(), 2);
        assert_eq!(units[0].unit_type, 7);
        assert_eq!(units[0].rbsp, vec![0x11]);
        assert_eq!(units[1].unit_type, 8);
        assert_eq!(units[1].rbsp, vec![0x22]);
    }

    #[test]
    fn emulation_prevention_removed() {
        assert_eq!(strip_emulation_prevention(&[0x00, 0x00, 0x03, 0x00]), vec![0x00, 0x00, 0x00]);
        assert_eq!(strip_emulation_prevention(&[0x00, 0x00, 0x03, 0x01]), vec![0x00, 0x00, 0x01]);
        // 03 followed by a byte > 3 is payload, not an escape
        assert_eq!(strip_emulation_prevention(&[0x00, 0x00, 0x03, 0x44]), vec![0x00, 0x00, 0x03, 0x44]);
    }

    #[test]
    fn truncated_after_start_code() {
        let err = split_annexb(&[0x00, 0x00, 0x00, 0x01]).unwrap_err();
        assert!(matches!(err, BitparseError::TruncatedStream { .. }));
    }

    #[test]
    fn forbidden_zero_bit_rejected() {
        let err = split_annexb(&[0x00, 0x00, 0x01, 0x80]).unwrap_err();
        assert!(matches!(err, BitparseError::MalformedHeader { .. }));
    }

    proptest! {
        #[test]
        fn escape_roundtrip(rbsp in proptest::collection::vec(0u8..=4, 0..256)) {
            // biased toward low bytes so escape patterns actually occur
            let escaped = insert_emulation_prevention(&rbsp);
            prop_assert_eq!(strip_emulation_prevention(&escaped), rbsp);
        }

        #[test]
        fn escaped_payload_has_no_start_codes(rbsp in proptest::collection::vec(0u8..=3, 0..256)) {
            let escaped = insert_emulation_prevention(&rbsp);
            for w in escaped.windows(3) {
                prop_assert!(!(w[0] == 0 && w[1] == 0 && w[2] <= 2));
            }
        }

        #[test]
        fn split_never_panics(data in proptest::collection::vec(any::<u8>(), 0..512)) {
            let _ = split_annexb(&data);
        }
    }
}
