//! Two-zone tensor grids for the reduced half-plane.

use crate::error::{CoreError, Result};
use crate::poisson::Axis;
use serde::{Deserialize, Serialize};

/// Grid description: a fine uniform window around the expected concentration
/// circle `(0, fine_center_r)`, coarse uniform cells elsewhere. Coarse cells
/// are an integer multiple of the fine step, so every cell center sits on an
/// exact half-step lattice (the Poisson summation relies on this).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Domain half-width in s: the box is `[-s_half, s_half]`.
    pub s_half: f64,
    /// Outer truncation radius in r.
    pub r_max: f64,
    /// Center radius of the fine window.
    pub fine_center_r: f64,
    /// Half-width of the fine window in both axes (`0` for fully coarse).
    pub fine_half_width: f64,
    /// Fine cell size.
    pub h_fine: f64,
    /// Coarse cell size as a multiple of `h_fine`.
    pub coarse_mult: usize,
}

impl GridSpec {
    /// Uniform grid of step `h` (no zones).
    pub fn uniform(s_half: f64, r_max: f64, h: f64) -> GridSpec {
        GridSpec {
            s_half,
            r_max,
            fine_center_r: 0.5 * r_max,
            fine_half_width: s_half.max(r_max),
            h_fine: h,
            coarse_mult: 1,
        }
    }

    /// Build the two axes. Zone edges snap outward to whole cells, so the
    /// realized domain may be slightly larger than requested.
    pub fn build(&self) -> Result<(Axis, Axis)> {
        if !(self.h_fine > 0.0) || self.coarse_mult == 0 {
            return Err(CoreError::Grid("invalid grid steps".into()));
        }
        let h = self.h_fine;
        let ch = h * self.coarse_mult as f64;

        // s axis, symmetric about 0
        let w_req = self.fine_half_width.min(self.s_half);
        let n_fine_half = (w_req / h).round().max(1.0) as usize;
        let w = n_fine_half as f64 * h;
        let n_flank = if self.s_half > w + 1e-12 {
            ((self.s_half - w) / ch).ceil() as usize
        } else {
            0
        };
        let s_start = -(w + n_flank as f64 * ch);
        let mut s_blocks = Vec::new();
        if n_flank > 0 {
            s_blocks.push((self.coarse_mult, n_flank));
        }
        s_blocks.push((1, 2 * n_fine_half));
        if n_flank > 0 {
            s_blocks.push((self.coarse_mult, n_flank));
        }
        let s_axis = Axis::blocks(s_start, h, &s_blocks)?;

        // r axis from the symmetry axis outward
        let r_lo_req = (self.fine_center_r - w_req).max(0.0);
        let n_inner = (r_lo_req / ch).floor() as usize;
        let r_lo = n_inner as f64 * ch;
        let r_hi_req = (self.fine_center_r + w_req).min(self.r_max);
        let n_fine_r = ((r_hi_req - r_lo) / h).ceil().max(1.0) as usize;
        let r_hi = r_lo + n_fine_r as f64 * h;
        let n_outer = if self.r_max > r_hi + 1e-12 {
            ((self.r_max - r_hi) / ch).ceil() as usize
        } else {
            0
        };
        let mut r_blocks = Vec::new();
        if n_inner > 0 {
            r_blocks.push((self.coarse_mult, n_inner));
        }
        r_blocks.push((1, n_fine_r));
        if n_outer > 0 {
            r_blocks.push((self.coarse_mult, n_outer));
        }
        let r_axis = Axis::blocks(0.0, h, &r_blocks)?;
        Ok((s_axis, r_axis))
    }
}
