//! Transceiver geometry and the path-length primitives the channel model
//! is built on.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// 2D point or displacement, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn unit(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Wavelength for a carrier frequency.
pub fn wavelength(carrier_hz: f64) -> Result<f64> {
    if carrier_hz <= 0.0 || !carrier_hz.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "carrier frequency must be positive and finite, got {carrier_hz}"
        )));
    }
    Ok(SPEED_OF_LIGHT / carrier_hz)
}

/// Transmitter/receiver placement and carrier parameters.
///
/// The receiver carries two or more antennas; `rx_pos` is antenna 0 and
/// `rx_antenna_offsets[k]` is the displacement of antenna k from it
/// (offset 0 is the zero vector).
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub tx_pos: Vec2,
    pub rx_pos: Vec2,
    pub rx_antenna_offsets: Vec<Vec2>,
    pub carrier_hz: f64,
    pub wavelength_m: f64,
}

impl Geometry {
    pub fn new(
        tx_pos: Vec2,
        rx_pos: Vec2,
        rx_antenna_offsets: Vec<Vec2>,
        carrier_hz: f64,
    ) -> Result<Geometry> {
        let wavelength_m = wavelength(carrier_hz)?;
        let g = Geometry {
            tx_pos,
            rx_pos,
            rx_antenna_offsets,
            carrier_hz,
            wavelength_m,
        };
        g.validate()?;
        Ok(g)
    }

    /// Doorway layout: tx at the origin, rx `los_dist_m` along +x, and a
    /// three-antenna receive array spaced a quarter wavelength apart
    /// along the axis perpendicular to the line of sight. The tight
    /// spacing keeps the antenna-ratio excursions bounded through the
    /// deep fades of a close pass.
    pub fn doorway(los_dist_m: f64, carrier_hz: f64) -> Result<Geometry> {
        if los_dist_m <= 0.0 || los_dist_m.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "LoS distance must be positive, got {los_dist_m}"
            )));
        }
        let lambda = wavelength(carrier_hz)?;
        Geometry::new(
            Vec2::ZERO,
            Vec2::new(los_dist_m, 0.0),
            vec![
                Vec2::ZERO,
                Vec2::new(0.0, 0.25 * lambda),
                Vec2::new(0.0, 0.5 * lambda),
            ],
            carrier_hz,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let lambda = wavelength(self.carrier_hz)?;
        if (self.wavelength_m - lambda).abs() > 1e-9 * lambda {
            return Err(Error::InvalidArgument(format!(
                "wavelength {} inconsistent with carrier {} Hz",
                self.wavelength_m, self.carrier_hz
            )));
        }
        if self.los_distance() <= 0.0 || self.los_distance().is_nan() {
            return Err(Error::InvalidArgument(
                "tx and rx positions must differ".into(),
            ));
        }
        if self.rx_antenna_offsets.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 receive antennas, got {}",
                self.rx_antenna_offsets.len()
            )));
        }
        if self.rx_antenna_offsets[0].norm() != 0.0 {
            return Err(Error::InvalidArgument(
                "antenna offset 0 must be the zero vector".into(),
            ));
        }
        if !self.tx_pos.is_finite() || !self.rx_pos.is_finite() {
            return Err(Error::InvalidArgument("non-finite transceiver position".into()));
        }
        Ok(())
    }

    pub fn num_antennas(&self) -> usize {
        self.rx_antenna_offsets.len()
    }

    pub fn antenna_pos(&self, index: usize) -> Option<Vec2> {
        self.rx_antenna_offsets
            .get(index)
            .map(|&off| self.rx_pos + off)
    }

    pub fn los_distance(&self) -> f64 {
        self.tx_pos.dist(self.rx_pos)
    }

    /// Unit vector from tx toward rx.
    pub fn los_dir(&self) -> Vec2 {
        (self.rx_pos - self.tx_pos).unit()
    }

    /// Unit normal of the LoS line (counter-clockwise from `los_dir`).
    pub fn los_normal(&self) -> Vec2 {
        self.los_dir().perp()
    }

    pub fn los_midpoint(&self) -> Vec2 {
        (self.tx_pos + self.rx_pos) * 0.5
    }

    /// Signed perpendicular distance of `p` from the LoS line
    /// (positive on the `los_normal` side).
    pub fn signed_los_distance(&self, p: Vec2) -> f64 {
        (p - self.tx_pos).dot(self.los_normal())
    }
}

/// Sum of the distances from `p` to the transmitter and to the receiver
/// (antenna 0). Level sets are ellipses with the transceivers as foci.
pub fn path_sum(geometry: &Geometry, p: Vec2) -> f64 {
    p.dist(geometry.tx_pos) + p.dist(geometry.rx_pos)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_at_5g24() {
        let lambda = wavelength(5.24e9).unwrap();
        assert!((lambda - 0.0572123).abs() < 1e-7);
        assert_eq!(lambda, SPEED_OF_LIGHT / 5.24e9);
    }

    #[test]
    fn wavelength_identity_case() {
        assert_eq!(wavelength(SPEED_OF_LIGHT).unwrap(), 1.0);
    }

    #[test]
    fn wavelength_scaling_symmetry() {
        // halving the frequency doubles the wavelength, exactly in f64
        assert_eq!(wavelength(2.62e9).unwrap(), 2.0 * wavelength(5.24e9).unwrap());
    }

    #[test]
    fn wavelength_rejects_nonpositive() {
        assert!(matches!(wavelength(0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(wavelength(-1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(wavelength(f64::NAN), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn wavelength_strictly_decreasing() {
        let freqs = [1e9, 2.4e9, 5.24e9, 6.0e9, 60.0e9];
        for w in freqs.windows(2) {
            assert!(wavelength(w[0]).unwrap() > wavelength(w[1]).unwrap());
        }
    }

    fn unit_geometry() -> Geometry {
        Geometry::new(
            Vec2::ZERO,
            Vec2::new(2.0, 0.0),
            vec![Vec2::ZERO, Vec2::new(0.0, 0.03)],
            5.24e9,
        )
        .unwrap()
    }

    #[test]
    fn path_sum_on_los() {
        let g = unit_geometry();
        assert_eq!(path_sum(&g, Vec2::new(1.0, 0.0)), 2.0);
    }

    #[test]
    fn path_sum_isosceles() {
        let g = unit_geometry();
        let v = path_sum(&g, Vec2::new(1.0, 1.0));
        assert!((v - 2.0 * 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn path_sum_mirror_symmetry() {
        let g = unit_geometry();
        for i in 0..50 {
            let y = 0.1 + i as f64 * 0.13;
            let a = path_sum(&g, Vec2::new(1.0, y));
            let b = path_sum(&g, Vec2::new(1.0, -y));
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn path_sum_bounded_below_by_los() {
        let g = unit_geometry();
        let mut s = 0x243F_6A88_85A3_08D3u64; // xorshift, fixed seed
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let p = Vec2::new(next() * 20.0 - 10.0, next() * 20.0 - 10.0);
            assert!(path_sum(&g, p) >= g.los_distance() - 1e-12);
        }
        // equality on the closed LoS segment
        for i in 0..=10 {
            let p = Vec2::new(2.0 * i as f64 / 10.0, 0.0);
            assert!((path_sum(&g, p) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn geometry_rejects_degenerate() {
        assert!(Geometry::new(Vec2::ZERO, Vec2::ZERO, vec![Vec2::ZERO, Vec2::ZERO], 5.24e9).is_err());
        assert!(Geometry::new(Vec2::ZERO, Vec2::new(1.0, 0.0), vec![Vec2::ZERO], 5.24e9).is_err());
        assert!(Geometry::new(
            Vec2::ZERO,
            Vec2::new(1.0, 0.0),
            vec![Vec2::new(0.1, 0.0), Vec2::ZERO],
            5.24e9
        )
        .is_err());
        assert!(Geometry::new(Vec2::ZERO, Vec2::new(1.0, 0.0), vec![Vec2::ZERO, Vec2::ZERO], -5.0).is_err());
    }

    #[test]
    fn doorway_layout() {
        let g = Geometry::doorway(2.0, 5.24e9).unwrap();
        assert_eq!(g.num_antennas(), 3);
        assert_eq!(g.los_distance(), 2.0);
        let spacing = g.rx_antenna_offsets[1].norm();
        assert!((spacing - 0.25 * g.wavelength_m).abs() < 1e-15);
        // antennas sit on the axis perpendicular to the LoS
        assert_eq!(g.rx_antenna_offsets[2].dot(g.los_dir()), 0.0);
    }
}
