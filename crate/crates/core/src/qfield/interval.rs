//! Floating enclosures: real intervals and complex disks with conservative
//! radius growth. Every operation widens its result by a few ulps of the
//! magnitudes involved, so a true value inside the inputs stays inside the
//! output.

use num_complex::Complex64;
use serde::Serialize;

const SLACK: f64 = 4.0 * f64::EPSILON;

fn widen(mag: f64) -> f64 {
    mag.abs() * SLACK + f64::MIN_POSITIVE
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// True iff every point of `self` lies strictly above every point of `other`.
    pub fn strictly_above(&self, other: &RealInterval) -> bool {
        self.lo > other.hi
    }
}

/// Closed disk `{z : |z - center| <= radius}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexBall {
    pub center: Complex64,
    pub radius: f64,
}

impl ComplexBall {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn exact(center: Complex64) -> Self {
        Self { center, radius: 0.0 }
    }

    pub fn real(x: f64) -> Self {
        Self::exact(Complex64::new(x, 0.0))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    pub fn add(&self, o: &Self) -> Self {
        let c = self.center + o.center;
        Self::new(c, self.radius + o.radius + widen(c.norm()))
    }

    pub fn sub(&self, o: &Self) -> Self {
        let c = self.center - o.center;
        Self::new(c, self.radius + o.radius + widen(c.norm()))
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.center, self.radius)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = self.center * o.center;
        let a = self.center.norm();
        let b = o.center.norm();
        let r = a * o.radius + b * self.radius + self.radius * o.radius;
        Self::new(c, r + widen(c.norm()) + widen(r))
    }

    /// Principal square root; requires the disk to avoid 0.
    pub fn sqrt(&self) -> Option<Self> {
        let m = self.center.norm();
        if m <= self.radius {
            return None;
        }
        let c = self.center.sqrt();
        // |sqrt z - sqrt c| = |z - c| / |sqrt z + sqrt c| <= r / sqrt(|c| - r)
        let r = self.radius / (m - self.radius).sqrt();
        Some(Self::new(c, r + widen(c.norm()) + widen(r)))
    }

    /// Enclosure of `|z|` over the disk.
    pub fn abs(&self) -> RealInterval {
        let m = self.center.norm();
        RealInterval::new((m - self.radius - widen(m)).max(0.0), m + self.radius + widen(m))
    }

    pub fn re(&self) -> RealInterval {
        let x = self.center.re;
        RealInterval::new(x - self.radius - widen(x), x + self.radius + widen(x))
    }

    pub fn im(&self) -> RealInterval {
        let y = self.center.im;
        RealInterval::new(y - self.radius - widen(y), y + self.radius + widen(y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceKind {
    Real,
    Complex,
}

/// Certified value of an element at an archimedean place.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaceValue {
    pub kind: PlaceKind,
    pub center: Complex64,
    /// The true embedding lies within this distance of `center`.
    pub radius: f64,
}

impl PlaceValue {
    pub fn ball(&self) -> ComplexBall {
        ComplexBall::new(self.center, self.radius)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.ball().contains(z)
    }
}
