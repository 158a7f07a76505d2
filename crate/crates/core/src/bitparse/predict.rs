//! Luma motion vector prediction.
//!
//! Final MVs are reconstructed as prediction + decoded difference, where the
//! prediction is the componentwise median of the left (A), top (B) and
//! top-right (C, falling back to top-left D) neighbouring partitions, with
//! the standard's directional shortcuts for 16x8 / 8x16 partitions and the
//! all-zero shortcut for skipped macroblocks.

/// A neighbouring partition as seen by the predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    /// The covering macroblock exists, is decoded, and lies in the same slice.
    pub available: bool,
    /// The covering macroblock is intra coded.
    pub intra: bool,
    pub ref_idx: i8,
    pub mv: (i32, i32),
}

impl Neighbor {
    pub const UNAVAILABLE: Neighbor =
        Neighbor { available: false, intra: false, ref_idx: -1, mv: (0, 0) };

    /// Motion data contribution: unavailable or intra neighbours count as
    /// zero motion with reference index -1.
    fn contribution(&self) -> ((i32, i32), i8) {
        if !self.available || self.intra {
            ((0, 0), -1)
        } else {
            (self.mv, self.ref_idx)
        }
    }
}

/// Partition geometry cases that change the prediction rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartShape {
    /// 16x8 macroblock partition; `lower` selects the bottom half.
    Wide16x8 { lower: bool },
    /// 8x16 macroblock partition; `right` selects the right half.
    Tall8x16 { right: bool },
    /// 16x16 partitions and all sub-macroblock partitions.
    Other,
}

fn median3(a: i32, b: i32, c: i32) -> i32 {
    a + b + c - a.min(b).min(c) - a.max(b).max(c)
}

/// Median motion vector prediction over neighbours A, B, C.
///
/// `c` must already be the top-right neighbour with the top-left fallback
/// applied when top-right is undecoded or outside the slice.
pub fn predict_mv(a: Neighbor, b: Neighbor, c: Neighbor, ref_idx: i8, shape: PartShape) -> (i32, i32) {
    let (mva, ra) = a.contribution();
    let (mvb, rb) = b.contribution();
    let (mvc, rc) = c.contribution();

    match shape {
        PartShape::Wide16x8 { lower: false } if rb == ref_idx => return mvb,
        PartShape::Wide16x8 { lower: true } if ra == ref_idx => return mva,
        PartShape::Tall8x16 { right: false } if ra == ref_idx => return mva,
        PartShape::Tall8x16 { right: true } if rc == ref_idx => return mvc,
        _ => {}
    }

    // lone-left rule: with no decoded context above, the left vector wins
    if !b.available && !c.available && a.available {
        return mva;
    }

    let matches = [(ra == ref_idx, mva), (rb == ref_idx, mvb), (rc == ref_idx, mvc)];
    let hit_count = matches.iter().filter(|(m, _)| *m).count();
    if hit_count == 1 {
        return matches.iter().find(|(m, _)| *m).expect("hit_count == 1").1;
    }

    (median3(mva.0, mvb.0, mvc.0), median3(mva.1, mvb.1, mvc.1))
}

/// Skip-mode motion vector: zero when either direct neighbour is missing or
/// already parked at zero motion on reference 0, otherwise the 16x16 median
/// prediction.
pub fn skip_mv(a: Neighbor, b: Neighbor, c: Neighbor) -> (i32, i32) {
    if !a.available || !b.available {
        return (0, 0);
    }
    let (mva, ra) = a.contribution();
    let (mvb, rb) = b.contribution();
    if (ra == 0 && mva == (0, 0)) || (rb == 0 && mvb == (0, 0)) {
        return (0, 0);
    }
    predict_mv(a, b, c, 0, PartShape::Other)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inter(ref_idx: i8, mv: (i32, i32)) -> Neighbor {
        Neighbor { available: true, intra: false, ref_idx, mv }
    }

    #[test]
    fn identical_neighbors_win() {
        let n = inter(0, (4, -8));
        assert_eq!(predict_mv(n, n, n, 0, PartShape::Other), (4, -8));
    }

    #[test]
    fn componentwise_median() {
        let a = inter(0, (0, 0));
        let b = inter(0, (10, 2));
        let c = inter(0, (4, 4));
        assert_eq!(predict_mv(a, b, c, 0, PartShape::Other), (4, 2));
    }

    #[test]
    fn lone_left_neighbor_wins() {
        let a = inter(0, (6, 2));
        let b = Neighbor::UNAVAILABLE;
        let c = Neighbor::UNAVAILABLE;
        assert_eq!(predict_mv(a, b, c, 0, PartShape::Other), (6, 2));
        // even with a mismatching reference index
        assert_eq!(predict_mv(inter(2, (6, 2)), b, c, 0, PartShape::Other), (6, 2));
    }

    #[test]
    fn top_row_without_left_falls_to_median() {
        // left unavailable, top available: zero-substitution median
        let a = Neighbor::UNAVAILABLE;
        let b = inter(0, (8, 4));
        let c = inter(0, (2, 2));
        // contributions: a = (0,0) ref -1; exactly-one rule does not apply (b and c match)
        assert_eq!(predict_mv(a, b, c, 0, PartShape::Other), (2, 2));
    }

    #[test]
    fn single_matching_reference_shortcut() {
        let a = inter(1, (9, 9));
        let b = inter(0, (1, 1));
        let c = inter(1, (5, 5));
        assert_eq!(predict_mv(a, b, c, 0, PartShape::Other), (1, 1));
    }

    #[test]
    fn directional_rules_for_rectangular_partitions() {
        let a = inter(0, (1, 1));
        let b = inter(0, (2, 2));
        let c = inter(0, (3, 3));
        assert_eq!(predict_mv(a, b, c, 0, PartShape::Wide16x8 { lower: false }), (2, 2));
        assert_eq!(predict_mv(a, b, c, 0, PartShape::Wide16x8 { lower: true }), (1, 1));
        assert_eq!(predict_mv(a, b, c, 0, PartShape::Tall8x16 { right: false }), (1, 1));
        assert_eq!(predict_mv(a, b, c, 0, PartShape::Tall8x16 { right: true }), (3, 3));
        // reference mismatch falls back to the median path
        let b1 = inter(1, (2, 2));
        assert_eq!(predict_mv(a, b1, c, 0, PartShape::Wide16x8 { lower: false }), (1, 1));
    }

    #[test]
    fn intra_neighbors_contribute_zero() {
        let a = Neighbor { available: true, intra: true, ref_idx: -1, mv: (0, 0) };
        let b = inter(0, (4, 4));
        let c = inter(0, (8, -2));
        // a contributes (0,0) ref -1; b and c both match -> median
        assert_eq!(predict_mv(a, b, c, 0, PartShape::Other), (4, 0));
    }

    #[test]
    fn skip_zero_conditions() {
        let zero = inter(0, (0, 0));
        let moving = inter(0, (12, 4));
        assert_eq!(skip_mv(Neighbor::UNAVAILABLE, moving, moving), (0, 0));
        assert_eq!(skip_mv(moving, Neighbor::UNAVAILABLE, moving), (0, 0));
        assert_eq!(skip_mv(zero, moving, moving), (0, 0));
        assert_eq!(skip_mv(moving, zero, moving), (0, 0));
        assert_eq!(skip_mv(moving, moving, moving), (12, 4));
    }
}
