//! Sequence and picture parameter sets.
//!
//! Only the fields the motion path needs are interpreted; everything after
//! them (VUI, PPS extensions beyond the rejected features) is kept as a raw
//! bit tail so parse -> serialize roundtrips bit-exactly.

use super::bits::{BitReader, BitString, BitWriter};
use super::BitparseError;

/// Luma cropping offsets in pixels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Cropping {
    pub left: u32,
    pub right: u32,
    pub top: u32,
    pub bottom: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqParamSet {
    pub profile_idc: u8,
    pub constraint_flags: u8,
    pub level_idc: u8,
    pub sps_id: u32,
    pub log2_max_frame_num: u8,
    pub pic_order_cnt_type: u8,
    /// Present iff pic_order_cnt_type == 0.
    pub log2_max_pic_order_cnt_lsb: u8,
    /// Raw type-1 POC fields, kept only for re-serialization.
    pub poc_type1: Option<PocType1>,
    pub max_num_ref_frames: u32,
    pub gaps_in_frame_num_allowed: bool,
    pub pic_width_in_mbs: u32,
    pub pic_height_in_map_units: u32,
    pub frame_mbs_only: bool,
    pub direct_8x8_inference: bool,
    pub cropping: Cropping,
    /// Everything from vui_parameters_present_flag to the end of the RBSP.
    pub tail: BitString,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PocType1 {
    pub delta_pic_order_always_zero: bool,
    pub offset_for_non_ref_pic: i32,
    pub offset_for_top_to_bottom_field: i32,
    pub offsets_for_ref_frame: Vec<i32>,
}

impl SeqParamSet {
    /// Decoder-visible frame width in pixels (after cropping).
    pub fn frame_width(&self) -> u32 {
        self.pic_width_in_mbs * 16 - self.cropping.left - self.cropping.right
    }

    /// Decoder-visible frame height in pixels (after cropping).
    pub fn frame_height(&self) -> u32 {
        self.pic_height_in_map_units * 16 - self.cropping.top - self.cropping.bottom
    }

    pub fn mb_width(&self) -> u32 {
        self.pic_width_in_mbs
    }

    pub fn mb_height(&self) -> u32 {
        self.pic_height_in_map_units
    }
}

const HIGH_PROFILES: [u8; 12] = [100, 110, 122, 244, 44, 83, 86, 118, 128, 138, 139, 134];

pub fn parse_sps(rbsp: &[u8]) -> Result<SeqParamSet, BitparseError> {
    let mut r = BitReader::new(rbsp);
    let profile_idc = r.read_bits(8)? as u8;
    let constraint_flags = r.read_bits(8)? as u8;
    let level_idc = r.read_bits(8)? as u8;
    let sps_id = r.read_ue()?;
    if sps_id > 31 {
        return Err(BitparseError::FieldOutOfRange { field: "seq_parameter_set_id", value: sps_id.into() });
    }

    if HIGH_PROFILES.contains(&profile_idc) {
        let chroma_format_idc = r.read_ue()?;
        if chroma_format_idc != 1 {
            return Err(BitparseError::UnsupportedFeature { feature: "chroma format other than 4:2:0" });
        }
        let bit_depth_luma = r.read_ue()? + 8;
        let bit_depth_chroma = r.read_ue()? + 8;
        if bit_depth_luma != 8 || bit_depth_chroma != 8 {
            return Err(BitparseError::UnsupportedFeature { feature: "bit depth above 8" });
        }
        let _qpprime_y_zero_transform_bypass = r.read_flag()?;
        if r.read_flag()? {
            return Err(BitparseError::UnsupportedFeature { feature: "seq scaling matrix" });
        }
    }

    let log2_max_frame_num_minus4 = r.read_ue()?;
    if log2_max_frame_num_minus4 > 12 {
        return Err(BitparseError::FieldOutOfRange {
            field: "log2_max_frame_num_minus4",
            value: log2_max_frame_num_minus4.into(),
        });
    }
    let pic_order_cnt_type = r.read_ue()?;
    let mut log2_max_pic_order_cnt_lsb = 0u8;
    let mut poc_type1 = None;
    match pic_order_cnt_type {
        0 => {
            let v = r.read_ue()?;
            if v > 12 {
                return Err(BitparseError::FieldOutOfRange {
                    field: "log2_max_pic_order_cnt_lsb_minus4",
                    value: v.into(),
                });
            }
            log2_max_pic_order_cnt_lsb = (v + 4) as u8;
        }
        1 => {
            let delta_pic_order_always_zero = r.read_flag()?;
            let offset_for_non_ref_pic = r.read_se()?;
            let offset_for_top_to_bottom_field = r.read_se()?;
            let n = r.read_ue()?;
            if n > 255 {
                return Err(BitparseError::FieldOutOfRange {
                    field: "num_ref_frames_in_pic_order_cnt_cycle",
                    value: n.into(),
                });
            }
            let mut offsets = Vec::with_capacity(n as usize);
            for _ in 0..n {
                offsets.push(r.read_se()?);
            }
            poc_type1 = Some(PocType1 {
                delta_pic_order_always_zero,
                offset_for_non_ref_pic,
                offset_for_top_to_bottom_field,
                offsets_for_ref_frame: offsets,
            });
        }
        2 => {}
        v => {
            return Err(BitparseError::FieldOutOfRange { field: "pic_order_cnt_type", value: v.into() })
        }
    }
    let max_num_ref_frames = r.read_ue()?;
    if max_num_ref_frames > 16 {
        return Err(BitparseError::FieldOutOfRange {
            field: "max_num_ref_frames",
            value: max_num_ref_frames.into(),
        });
    }
    let gaps_in_frame_num_allowed = r.read_flag()?;
    let pic_width_in_mbs = r.read_ue()? + 1;
    let pic_height_in_map_units = r.read_ue()? + 1;
    // level 6.2 ceiling, also guards allocation on fuzzed input
    if pic_width_in_mbs > 1024 || pic_height_in_map_units > 1024 {
        return Err(BitparseError::FieldOutOfRange {
            field: "picture size in macroblocks",
            value: i64::from(pic_width_in_mbs) * i64::from(pic_height_in_map_units),
        });
    }
    let frame_mbs_only = r.read_flag()?;
    if !frame_mbs_only {
        return Err(BitparseError::UnsupportedFeature { feature: "interlaced coding" });
    }
    let direct_8x8_inference = r.read_flag()?;
    let mut cropping = Cropping::default();
    if r.read_flag()? {
        // 4:2:0 progressive: crop units are 2 luma pixels in both axes
        cropping.left = r.read_ue()?.saturating_mul(2);
        cropping.right = r.read_ue()?.saturating_mul(2);
        cropping.top = r.read_ue()?.saturating_mul(2);
        cropping.bottom = r.read_ue()?.saturating_mul(2);
        if cropping.left + cropping.right >= pic_width_in_mbs * 16
            || cropping.top + cropping.bottom >= pic_height_in_map_units * 16
        {
            return Err(BitparseError::FieldOutOfRange {
                field: "frame cropping offsets",
                value: i64::from(cropping.left + cropping.right),
            });
        }
    }
    let tail = r.read_tail();

    Ok(SeqParamSet {
        profile_idc,
        constraint_flags,
        level_idc,
        sps_id,
        log2_max_frame_num: (log2_max_frame_num_minus4 + 4) as u8,
        pic_order_cnt_type: pic_order_cnt_type as u8,
        log2_max_pic_order_cnt_lsb,
        poc_type1,
        max_num_ref_frames,
        gaps_in_frame_num_allowed,
        pic_width_in_mbs,
        pic_height_in_map_units,
        frame_mbs_only,
        direct_8x8_inference,
        cropping,
        tail,
    })
}

pub fn write_sps(sps: &SeqParamSet) -> Vec<u8> {
    let mut w = BitWriter::new();
    w.write_bits(sps.profile_idc.into(), 8);
    w.write_bits(sps.constraint_flags.into(), 8);
    w.write_bits(sps.level_idc.into(), 8);
    w.write_ue(sps.sps_id);
    if HIGH_PROFILES.contains(&sps.profile_idc) {
        w.write_ue(1); // chroma_format_idc 4:2:0
        w.write_ue(0); // bit_depth_luma_minus8
        w.write_ue(0); // bit_depth_chroma_minus8
        w.write_flag(false);
        w.write_flag(false);
    }
    w.write_ue(u32::from(sps.log2_max_frame_num) - 4);
    w.write_ue(sps.pic_order_cnt_type.into());
    match sps.pic_order_cnt_type {
        0 => w.write_ue(u32::from(sps.log2_max_pic_order_cnt_lsb) - 4),
        1 => {
            let p = sps.poc_type1.as_ref().expect("poc type 1 fields");
            w.write_flag(p.delta_pic_order_always_zero);
            w.write_se(p.offset_for_non_ref_pic);
            w.write_se(p.offset_for_top_to_bottom_field);
            w.write_ue(p.offsets_for_ref_frame.len() as u32);
            for &o in &p.offsets_for_ref_frame {
                w.write_se(o);
            }
        }
        _ => {}
    }
    w.write_ue(sps.max_num_ref_frames);
    w.write_flag(sps.gaps_in_frame_num_allowed);
    w.write_ue(sps.pic_width_in_mbs - 1);
    w.write_ue(sps.pic_height_in_map_units - 1);
    w.write_flag(sps.frame_mbs_only);
    w.write_flag(sps.direct_8x8_inference);
    let c = sps.cropping;
    let has_crop = c != Cropping::default();
    w.write_flag(has_crop);
    if has_crop {
        w.write_ue(c.left / 2);
        w.write_ue(c.right / 2);
        w.write_ue(c.top / 2);
        w.write_ue(c.bottom / 2);
    }
    if sps.tail.is_empty() {
        w.write_flag(false); // vui_parameters_present_flag
        w.write_rbsp_trailing();
    } else {
        w.write_bitstring(&sps.tail);
    }
    w.into_bytes()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PicParamSet {
    pub pps_id: u32,
    pub sps_id: u32,
    /// Always false after a successful parse (CABAC streams are rejected).
    pub entropy_coding_mode: bool,
    pub bottom_field_pic_order_present: bool,
    pub num_ref_idx_l0_default: u32,
    pub num_ref_idx_l1_default: u32,
    pub pic_init_qp: i32,
    pub pic_init_qs: i32,
    pub chroma_qp_index_offset: i32,
    pub deblocking_filter_control_present: bool,
    pub constrained_intra_pred: bool,
    pub redundant_pic_cnt_present: bool,
    /// second_chroma_qp_index_offset when the More-RBSP extension is present.
    pub extension: Option<i32>,
    /// Bits after the interpreted fields, verbatim.
    pub tail: BitString,
}

pub fn parse_pps(rbsp: &[u8]) -> Result<PicParamSet, BitparseError> {
    let mut r = BitReader::new(rbsp);
    let pps_id = r.read_ue()?;
    if pps_id > 255 {
        return Err(BitparseError::FieldOutOfRange { field: "pic_parameter_set_id", value: pps_id.into() });
    }
    let sps_id = r.read_ue()?;
    if sps_id > 31 {
        return Err(BitparseError::FieldOutOfRange { field: "seq_parameter_set_id", value: sps_id.into() });
    }
    if r.read_flag()? {
        return Err(BitparseError::UnsupportedFeature { feature: "CABAC entropy coding" });
    }
    let bottom_field_pic_order_present = r.read_flag()?;
    let num_slice_groups = r.read_ue()? + 1;
    if num_slice_groups != 1 {
        return Err(BitparseError::UnsupportedFeature { feature: "multiple slice groups" });
    }
    let num_ref_idx_l0_default = r.read_ue()? + 1;
    let num_ref_idx_l1_default = r.read_ue()? + 1;
    if num_ref_idx_l0_default > 32 || num_ref_idx_l1_default > 32 {
        return Err(BitparseError::FieldOutOfRange {
            field: "num_ref_idx_default_active",
            value: num_ref_idx_l0_default.into(),
        });
    }
    if r.read_flag()? {
        return Err(BitparseError::UnsupportedFeature { feature: "weighted prediction" });
    }
    let weighted_bipred_idc = r.read_bits(2)?;
    if weighted_bipred_idc != 0 {
        return Err(BitparseError::UnsupportedFeature { feature: "weighted biprediction" });
    }
    let pic_init_qp = 26 + r.read_se()?;
    if !(0..=51).contains(&pic_init_qp) {
        return Err(BitparseError::FieldOutOfRange { field: "pic_init_qp", value: pic_init_qp.into() });
    }
    let pic_init_qs = 26 + r.read_se()?;
    let chroma_qp_index_offset = r.read_se()?;
    if !(-12..=12).contains(&chroma_qp_index_offset) {
        return Err(BitparseError::FieldOutOfRange {
            field: "chroma_qp_index_offset",
            value: chroma_qp_index_offset.into(),
        });
    }
    let deblocking_filter_control_present = r.read_flag()?;
    let constrained_intra_pred = r.read_flag()?;
    let redundant_pic_cnt_present = r.read_flag()?;

    let mut extension = None;
    if r.more_rbsp_data() {
        if r.read_flag()? {
            return Err(BitparseError::UnsupportedFeature { feature: "8x8 transform" });
        }
        if r.read_flag()? {
            return Err(BitparseError::UnsupportedFeature { feature: "pic scaling matrix" });
        }
        extension = Some(r.read_se()?);
    }
    let tail = r.read_tail();

    Ok(PicParamSet {
        pps_id,
        sps_id,
        entropy_coding_mode: false,
        bottom_field_pic_order_present,
        num_ref_idx_l0_default,
        num_ref_idx_l1_default,
        pic_init_qp,
        pic_init_qs,
        chroma_qp_index_offset,
        deblocking_filter_control_present,
        constrained_intra_pred,
        redundant_pic_cnt_present,
        extension,
        tail,
    })
}

pub fn write_pps(pps: &PicParamSet) -> Vec<u8> {
    let mut w = BitWriter::new();
    w.write_ue(pps.pps_id);
    w.write_ue(pps.sps_id);
    w.write_flag(false); // CAVLC
    w.write_flag(pps.bottom_field_pic_order_present);
    w.write_ue(0); // one slice group
    w.write_ue(pps.num_ref_idx_l0_default - 1);
    w.write_ue(pps.num_ref_idx_l1_default - 1);
    w.write_flag(false); // weighted_pred_flag
    w.write_bits(0, 2); // weighted_bipred_idc
    w.write_se(pps.pic_init_qp - 26);
    w.write_se(pps.pic_init_qs - 26);
    w.write_se(pps.chroma_qp_index_offset);
    w.write_flag(pps.deblocking_filter_control_present);
    w.write_flag(pps.constrained_intra_pred);
    w.write_flag(pps.redundant_pic_cnt_present);
    if let Some(second_offset) = pps.extension {
        w.write_flag(false);
        w.write_flag(false);
        w.write_se(second_offset);
    }
    if pps.tail.is_empty() {
        w.write_rbsp_trailing();
    } else {
        w.write_bitstring(&pps.tail);
    }
    w.into_bytes()
}
