//! Slice header parsing for I and P slices.

use super::bits::BitReader;
use super::nal::NalUnit;
use super::params::{PicParamSet, SeqParamSet};
use super::BitparseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceType {
    I,
    P,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceHeader {
    pub first_mb_in_slice: u32,
    pub slice_type: SliceType,
    pub idr: bool,
    pub pps_id: u32,
    pub frame_num: u32,
    /// Slice QP after applying slice_qp_delta to pic_init_qp.
    pub qp: i32,
    /// Active reference count for list 0.
    pub num_ref_idx_l0: u32,
}

/// Parses the slice header and leaves the reader positioned at the first
/// bit of slice data.
pub fn parse_slice_header(
    r: &mut BitReader,
    nal: &NalUnit,
    sps: &SeqParamSet,
    pps: &PicParamSet,
) -> Result<SliceHeader, BitparseError> {
    let idr = nal.unit_type == super::nal::NAL_SLICE_IDR;
    let first_mb_in_slice = r.read_ue()?;
    let slice_type_code = r.read_ue()?;
    let slice_type = match slice_type_code {
        0 | 5 => SliceType::P,
        2 | 7 => SliceType::I,
        1 | 6 => return Err(BitparseError::UnsupportedFeature { feature: "B slices (use the dump ingest path)" }),
        3 | 4 | 8 | 9 => return Err(BitparseError::UnsupportedFeature { feature: "SP/SI slices" }),
        v => return Err(BitparseError::FieldOutOfRange { field: "slice_type", value: v.into() }),
    };
    if idr && slice_type != SliceType::I {
        return Err(BitparseError::Malformed {
            what: "slice header",
            reason: "IDR NAL with non-I slice type",
            bit: r.bit_pos(),
        });
    }
    let pps_id = r.read_ue()?;
    let frame_num = r.read_bits(sps.log2_max_frame_num.into())?;
    if idr {
        let idr_pic_id = r.read_ue()?;
        if idr_pic_id > 65535 {
            return Err(BitparseError::FieldOutOfRange { field: "idr_pic_id", value: idr_pic_id.into() });
        }
    }
    match sps.pic_order_cnt_type {
        0 => {
            let _poc_lsb = r.read_bits(sps.log2_max_pic_order_cnt_lsb.into())?;
            if pps.bottom_field_pic_order_present {
                let _delta_bottom = r.read_se()?;
            }
        }
        1 => {
            let t1 = sps.poc_type1.as_ref().expect("poc type 1 fields present");
            if !t1.delta_pic_order_always_zero {
                let _d0 = r.read_se()?;
                if pps.bottom_field_pic_order_present {
                    let _d1 = r.read_se()?;
                }
            }
        }
        _ => {}
    }
    if pps.redundant_pic_cnt_present {
        let _redundant = r.read_ue()?;
    }

    let mut num_ref_idx_l0 = pps.num_ref_idx_l0_default;
    if slice_type == SliceType::P {
        if r.read_flag()? {
            num_ref_idx_l0 = r.read_ue()? + 1;
            if num_ref_idx_l0 > 32 {
                return Err(BitparseError::FieldOutOfRange {
                    field: "num_ref_idx_l0_active",
                    value: num_ref_idx_l0.into(),
                });
            }
        }
        // ref_pic_list_modification: reordering changes reference distances
        // in ways this parser does not model
        if r.read_flag()? {
            return Err(BitparseError::UnsupportedFeature { feature: "reference picture list modification" });
        }
    }

    if nal.ref_idc != 0 {
        if idr {
            let _no_output_of_prior_pics = r.read_flag()?;
            if r.read_flag()? {
                return Err(BitparseError::UnsupportedFeature { feature: "long-term reference pictures" });
            }
        } else if r.read_flag()? {
            return Err(BitparseError::UnsupportedFeature { feature: "adaptive reference picture marking" });
        }
    }

    let slice_qp_delta = r.read_se()?;
    let qp = pps.pic_init_qp + slice_qp_delta;
    if !(0..=51).contains(&qp) {
        return Err(BitparseError::FieldOutOfRange { field: "slice qp", value: qp.into() });
    }
    if pps.deblocking_filter_control_present {
        let disable_idc = r.read_ue()?;
        if disable_idc > 2 {
            return Err(BitparseError::FieldOutOfRange {
                field: "disable_deblocking_filter_idc",
                value: disable_idc.into(),
            });
        }
        if disable_idc != 1 {
            let _alpha = r.read_se()?;
            let _beta = r.read_se()?;
        }
    }

    Ok(SliceHeader {
        first_mb_in_slice,
        slice_type,
        idr,
        pps_id,
        frame_num,
        qp,
        num_ref_idx_l0,
    })
}
