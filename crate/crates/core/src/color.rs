//! RGB points and the small amount of 3-vector arithmetic the pipeline needs.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Upper bound of every channel, in RGB units.
pub const CHANNEL_MAX: f64 = 255.0;

/// A point (or direction) in RGB space, in RGB units.
///
/// Points read from images lie in `[0, 255]³`; points derived from a model
/// (extrapolated curve samples, offsets) may leave the cube.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct RgbPoint {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl RgbPoint {
    pub const ZERO: RgbPoint = RgbPoint {
        r: 0.0,
        g: 0.0,
        b: 0.0,
    };

    pub const fn new(r: f64, g: f64, b: f64) -> Self {
        Self { r, g, b }
    }

    pub fn splat(v: f64) -> Self {
        Self::new(v, v, v)
    }

    pub fn from_rgb8(px: [u8; 3]) -> Self {
        Self::new(px[0] as f64, px[1] as f64, px[2] as f64)
    }

    /// Rounds and clamps each channel to an 8-bit value.
    pub fn to_rgb8(self) -> [u8; 3] {
        let q = |c: f64| c.round().clamp(0.0, CHANNEL_MAX) as u8;
        [q(self.r), q(self.g), q(self.b)]
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }

    pub fn dot(self, o: RgbPoint) -> f64 {
        self.r * o.r + self.g * o.g + self.b * o.b
    }

    pub fn cross(self, o: RgbPoint) -> RgbPoint {
        RgbPoint::new(
            self.g * o.b - self.b * o.g,
            self.b * o.r - self.r * o.b,
            self.r * o.g - self.g * o.r,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, o: RgbPoint) -> f64 {
        (self - o).norm()
    }

    pub fn distance_squared(self, o: RgbPoint) -> f64 {
        (self - o).norm_squared()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<RgbPoint> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    pub fn is_finite(self) -> bool {
        self.r.is_finite() && self.g.is_finite() && self.b.is_finite()
    }

    /// True when every channel lies in `[-margin, 255 + margin]`.
    pub fn in_cube(self, margin: f64) -> bool {
        let ok = |c: f64| c >= -margin && c <= CHANNEL_MAX + margin;
        ok(self.r) && ok(self.g) && ok(self.b)
    }

    pub fn clamped(self) -> RgbPoint {
        let c = |v: f64| v.clamp(0.0, CHANNEL_MAX);
        RgbPoint::new(c(self.r), c(self.g), c(self.b))
    }

    /// Angle between two non-zero vectors, in degrees.
    pub fn angle_deg(self, o: RgbPoint) -> f64 {
        let c = self.dot(o) / (self.norm() * o.norm());
        c.clamp(-1.0, 1.0).acos().to_degrees()
    }

    pub(crate) fn component(self, axis: usize) -> f64 {
        match axis {
            0 => self.r,
            1 => self.g,
            _ => self.b,
        }
    }

    /// Bit pattern key, used to group identical colors deterministically.
    pub(crate) fn bits(self) -> [u64; 3] {
        // +0.0 and -0.0 are the same color
        let k = |c: f64| (c + 0.0).to_bits();
        [k(self.r), k(self.g), k(self.b)]
    }
}

impl From<[f64; 3]> for RgbPoint {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl From<RgbPoint> for [f64; 3] {
    fn from(p: RgbPoint) -> Self {
        p.to_array()
    }
}

impl Add for RgbPoint {
    type Output = RgbPoint;
    fn add(self, o: RgbPoint) -> RgbPoint {
        RgbPoint::new(self.r + o.r, self.g + o.g, self.b + o.b)
    }
}

impl AddAssign for RgbPoint {
    fn add_assign(&mut self, o: RgbPoint) {
        *self = *self + o;
    }
}

impl Sub for RgbPoint {
    type Output = RgbPoint;
    fn sub(self, o: RgbPoint) -> RgbPoint {
        RgbPoint::new(self.r - o.r, self.g - o.g, self.b - o.b)
    }
}

impl Mul<f64> for RgbPoint {
    type Output = RgbPoint;
    fn mul(self, s: f64) -> RgbPoint {
        RgbPoint::new(self.r * s, self.g * s, self.b * s)
    }
}

impl Div<f64> for RgbPoint {
    type Output = RgbPoint;
    fn div(self, s: f64) -> RgbPoint {
        RgbPoint::new(self.r / s, self.g / s, self.b / s)
    }
}

impl Neg for RgbPoint {
    type Output = RgbPoint;
    fn neg(self) -> RgbPoint {
        RgbPoint::new(-self.r, -self.g, -self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_right_handed() {
        let x = RgbPoint::new(1.0, 0.0, 0.0);
        let y = RgbPoint::new(0.0, 1.0, 0.0);
        assert_eq!(x.cross(y), RgbPoint::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn rgb8_round_trip_clamps() {
        assert_eq!(RgbPoint::new(-3.0, 127.5, 300.0).to_rgb8(), [0, 128, 255]);
        assert_eq!(RgbPoint::from_rgb8([1, 2, 3]), RgbPoint::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn signed_zero_shares_key() {
        assert_eq!(
            RgbPoint::new(-0.0, 0.0, 1.0).bits(),
            RgbPoint::new(0.0, 0.0, 1.0).bits()
        );
    }
}
