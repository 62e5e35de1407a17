//! Orthonormal 2-D Haar (Daubechies-1) transform.
//!
//! Coefficients use the recursive Mallat layout on the `side × side` grid,
//! flattened row-major: after each level the low-low block occupies the
//! top-left quadrant of the active region and the next level recurses on it.
//! With the full number of levels the DC coefficient ends up at index 0.

use super::{Entry, LinearMap};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaarDirection {
    /// `W`: image to coefficients.
    Forward,
    /// `W⁻¹ = Wᵀ`: coefficients to image.
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HaarMap {
    side: usize,
    levels: usize,
    direction: HaarDirection,
}

fn check_side(side: usize) -> Result<usize> {
    if side == 0 || !side.is_power_of_two() {
        return Err(Error::SideNotPowerOfTwo { side });
    }
    Ok(side.trailing_zeros() as usize)
}

impl HaarMap {
    /// Full-depth transform (down to a 1×1 low-low block).
    pub fn new(side: usize, direction: HaarDirection) -> Result<Self> {
        let levels = check_side(side)?;
        Ok(Self {
            side,
            levels,
            direction,
        })
    }

    /// Transform truncated after `levels` levels (clamped to the full depth).
    pub fn with_levels(side: usize, levels: usize, direction: HaarDirection) -> Result<Self> {
        let max = check_side(side)?;
        Ok(Self {
            side,
            levels: levels.min(max),
            direction,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn direction(&self) -> HaarDirection {
        self.direction
    }

    pub fn transposed(&self) -> Self {
        let direction = match self.direction {
            HaarDirection::Forward => HaarDirection::Inverse,
            HaarDirection::Inverse => HaarDirection::Forward,
        };
        Self { direction, ..*self }
    }
}

fn step_1d<T: Scalar, E: Entry<T>>(v: &mut [E], tmp: &mut Vec<E>, inverse: bool) {
    let h = v.len() / 2;
    let r = T::FRAC_1_SQRT_2();
    tmp.clear();
    tmp.extend_from_slice(v);
    if inverse {
        for i in 0..h {
            let a = tmp[i];
            let d = tmp[h + i];
            v[2 * i] = (a + d).scale(r);
            v[2 * i + 1] = (a - d).scale(r);
        }
    } else {
        for i in 0..h {
            let p = tmp[2 * i];
            let q = tmp[2 * i + 1];
            v[i] = (p + q).scale(r);
            v[h + i] = (p - q).scale(r);
        }
    }
}

fn rows_then_cols<T: Scalar, E: Entry<T>>(buf: &mut [E], side: usize, s: usize, inverse: bool) {
    let mut tmp = Vec::with_capacity(s);
    let mut col = vec![E::zero(); s];
    let do_rows = |buf: &mut [E], tmp: &mut Vec<E>| {
        for r in 0..s {
            step_1d::<T, E>(&mut buf[r * side..r * side + s], tmp, inverse);
        }
    };
    let do_cols = |buf: &mut [E], tmp: &mut Vec<E>, col: &mut Vec<E>| {
        for c in 0..s {
            for r in 0..s {
                col[r] = buf[r * side + c];
            }
            step_1d::<T, E>(col, tmp, inverse);
            for r in 0..s {
                buf[r * side + c] = col[r];
            }
        }
    };
    if inverse {
        do_cols(buf, &mut tmp, &mut col);
        do_rows(buf, &mut tmp);
    } else {
        do_rows(buf, &mut tmp);
        do_cols(buf, &mut tmp, &mut col);
    }
}

fn forward_in_place<T: Scalar, E: Entry<T>>(buf: &mut [E], side: usize, levels: usize) {
    for l in 0..levels {
        rows_then_cols::<T, E>(buf, side, side >> l, false);
    }
}

fn inverse_in_place<T: Scalar, E: Entry<T>>(buf: &mut [E], side: usize, levels: usize) {
    for l in (0..levels).rev() {
        rows_then_cols::<T, E>(buf, side, side >> l, true);
    }
}

fn check_image(len: usize, side: usize) -> Result<usize> {
    let levels = check_side(side)?;
    if len != side * side {
        return Err(Error::DimensionMismatch {
            what: "image pixels",
            expected: side * side,
            got: len,
        });
    }
    Ok(levels)
}

/// Full-depth forward transform of a row-major `side × side` image.
pub fn haar_forward<T: Scalar>(image: &[T], side: usize) -> Result<Vec<T>> {
    let levels = check_image(image.len(), side)?;
    haar_forward_levels(image, side, levels)
}

pub fn haar_forward_levels<T: Scalar>(image: &[T], side: usize, levels: usize) -> Result<Vec<T>> {
    let max = check_image(image.len(), side)?;
    let mut buf = image.to_vec();
    forward_in_place::<T, T>(&mut buf, side, levels.min(max));
    Ok(buf)
}

pub fn haar_inverse<T: Scalar>(coeffs: &[T], side: usize) -> Result<Vec<T>> {
    let levels = check_image(coeffs.len(), side)?;
    haar_inverse_levels(coeffs, side, levels)
}

pub fn haar_inverse_levels<T: Scalar>(coeffs: &[T], side: usize, levels: usize) -> Result<Vec<T>> {
    let max = check_image(coeffs.len(), side)?;
    let mut buf = coeffs.to_vec();
    inverse_in_place::<T, T>(&mut buf, side, levels.min(max));
    Ok(buf)
}

impl<T: Scalar, E: Entry<T>> LinearMap<T, E> for HaarMap {
    fn nrows(&self) -> usize {
        self.side * self.side
    }
    fn ncols(&self) -> usize {
        self.side * self.side
    }
    fn apply(&self, x: &[E]) -> Vec<E> {
        let mut buf = x.to_vec();
        match self.direction {
            HaarDirection::Forward => forward_in_place::<T, E>(&mut buf, self.side, self.levels),
            HaarDirection::Inverse => inverse_in_place::<T, E>(&mut buf, self.side, self.levels),
        }
        buf
    }
    fn adjoint_apply(&self, y: &[E]) -> Vec<E> {
        let mut buf = y.to_vec();
        match self.direction {
            HaarDirection::Forward => inverse_in_place::<T, E>(&mut buf, self.side, self.levels),
            HaarDirection::Inverse => forward_in_place::<T, E>(&mut buf, self.side, self.levels),
        }
        buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist, norm};

    #[test]
    fn constant_image_has_single_dc_coefficient() {
        let side = 8;
        let c = 0.75;
        let w = haar_forward(&vec![c; side * side], side).unwrap();
        assert!((w[0] - c * side as f64).abs() < 1e-12);
        assert!(w[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn two_by_two_by_hand() {
        // [[a b],[c d]] -> rows: [(a+b)/√2, (a-b)/√2], then columns
        let w = haar_forward(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        let expect = [5.0, -1.0, -2.0, 0.0];
        assert!(dist(&w, &expect) < 1e-12, "{w:?}");
    }

    #[test]
    fn round_trip_and_norm() {
        let side = 16;
        let img: Vec<f64> = (0..side * side).map(|i| ((i * 37) % 11) as f64 / 3.0).collect();
        let w = haar_forward(&img, side).unwrap();
        assert!((norm(&w) - norm(&img)).abs() < 1e-10);
        let back = haar_inverse(&w, side).unwrap();
        assert!(dist(&back, &img) < 1e-10);
    }

    #[test]
    fn truncated_levels_round_trip() {
        let side = 16;
        let img: Vec<f64> = (0..side * side).map(|i| (i % 5) as f64).collect();
        let w = haar_forward_levels(&img, side, 2).unwrap();
        assert!((norm(&w) - norm(&img)).abs() < 1e-10);
        assert!(dist(&haar_inverse_levels(&w, side, 2).unwrap(), &img) < 1e-10);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert_eq!(
            haar_forward(&[0.0; 9], 3),
            Err(Error::SideNotPowerOfTwo { side: 3 })
        );
        assert!(HaarMap::new(12, HaarDirection::Forward).is_err());
    }
}
