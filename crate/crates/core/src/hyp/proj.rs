//! Projective models of ℍⁿ over A = ℝ, ℂ, ℍ.
//!
//! Vectors live in the right A-module A^{n+1} with the Hermitian form
//! `⟨v, w⟩ = w̄_{n+1} v_1 + Σ_{i=2..n} w̄_i v_i + w̄_1 v_{n+1}`.

use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use thiserror::Error;

/// Real quaternion `w + xi + yj + zk` with `i² = j² = k² = ijk = −1`.
/// ℝ and ℂ embed as the `w` and `w + xi` parts.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const ZERO: Quat = Quat { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const ONE: Quat = Quat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn real(w: f64) -> Self {
        Self { w, ..Self::ZERO }
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// `|q|_{A/ℝ} = q̄q`, the squared modulus.
    pub fn rnorm(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// `tr_{A/ℝ}(q) = q + q̄`.
    pub fn rtrace(self) -> f64 {
        2.0 * self.w
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn inv(self) -> Self {
        self.conj().scale(1.0 / self.rnorm())
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, o: Quat) -> Quat {
        Quat::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, o: Quat) -> Quat {
        Quat::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        self.scale(-1.0)
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        Quat::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DivAlg {
    Real,
    Complex,
    Quaternion,
}

impl DivAlg {
    pub const ALL: [DivAlg; 3] = [DivAlg::Real, DivAlg::Complex, DivAlg::Quaternion];

    fn holds(self, q: &Quat) -> bool {
        match self {
            DivAlg::Real => q.x == 0.0 && q.y == 0.0 && q.z == 0.0,
            DivAlg::Complex => q.y == 0.0 && q.z == 0.0,
            DivAlg::Quaternion => true,
        }
    }

    pub fn random<R: Rng>(self, rng: &mut R, scale: f64) -> Quat {
        let mut c = || rng.gen_range(-scale..scale);
        match self {
            DivAlg::Real => Quat::real(c()),
            DivAlg::Complex => Quat::new(c(), c(), 0.0, 0.0),
            DivAlg::Quaternion => Quat::new(c(), c(), c(), c()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjError {
    #[error("point is not in V₋ (⟨v,v⟩ = {0} ≥ 0)")]
    NotNegative(f64),
    #[error("points have different algebras or dimensions")]
    Mismatch,
    #[error("coordinates are not in the declared algebra")]
    WrongAlgebra,
    #[error("need at least two coordinates")]
    TooShort,
}

/// A vector of A^{n+1}; `coords[0]` is `v_1`, the last entry `v_{n+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint {
    pub alg: DivAlg,
    pub coords: Vec<Quat>,
}

/// The Hermitian form `⟨v, w⟩`.
pub fn inner(v: &[Quat], w: &[Quat]) -> Quat {
    let m = v.len() - 1;
    let mut acc = w[m].conj() * v[0] + w[0].conj() * v[m];
    for i in 1..m {
        acc = acc + w[i].conj() * v[i];
    }
    acc
}

impl ProjPoint {
    /// Any vector of the right length over `alg` (membership in V₋ not required).
    pub fn raw(alg: DivAlg, coords: Vec<Quat>) -> Result<Self, ProjError> {
        if coords.len() < 2 {
            return Err(ProjError::TooShort);
        }
        if !coords.iter().all(|q| alg.holds(q)) {
            return Err(ProjError::WrongAlgebra);
        }
        Ok(Self { alg, coords })
    }

    pub fn new(alg: DivAlg, coords: Vec<Quat>) -> Result<Self, ProjError> {
        let p = Self::raw(alg, coords)?;
        let s = p.self_inner();
        if s >= 0.0 {
            return Err(ProjError::NotNegative(s));
        }
        Ok(p)
    }

    /// `⟨v, v⟩` (always real).
    pub fn self_inner(&self) -> f64 {
        inner(&self.coords, &self.coords).w
    }

    pub fn in_v_minus(&self) -> bool {
        self.self_inner() < 0.0
    }

    /// Right scalar multiplication `v ↦ vλ`.
    pub fn scale_right(&self, lambda: Quat) -> Self {
        Self { alg: self.alg, coords: self.coords.iter().map(|&c| c * lambda).collect() }
    }

    /// A random point of V₋ of dimension `n + 1` (last coordinate normalized,
    /// then rescaled on the right by a random unit-ish scalar).
    pub fn random<R: Rng>(alg: DivAlg, n: usize, rng: &mut R) -> Self {
        let mut coords = vec![Quat::ZERO; n + 1];
        let mut mass = 0.0;
        for c in coords.iter_mut().take(n).skip(1) {
            *c = alg.random(rng, 2.0);
            mass += c.rnorm();
        }
        let mut v1 = alg.random(rng, 2.0);
        v1.w = -0.5 * mass - rng.gen_range(0.01..3.0);
        coords[0] = v1;
        coords[n] = Quat::ONE;
        let mut lambda = alg.random(rng, 1.0);
        if lambda.rnorm() < 1e-3 {
            lambda = Quat::ONE;
        }
        Self { alg, coords }.scale_right(lambda)
    }
}

fn check_pair(p: &ProjPoint, q: &ProjPoint) -> Result<(), ProjError> {
    if p.alg != q.alg || p.coords.len() != q.coords.len() {
        return Err(ProjError::Mismatch);
    }
    for x in [p, q] {
        let s = x.self_inner();
        if s >= 0.0 {
            return Err(ProjError::NotNegative(s));
        }
    }
    Ok(())
}

/// Distance from `cosh(d/2)² = |⟨v,w⟩|_{A/ℝ} / (⟨v,v⟩⟨w,w⟩)`.
pub fn hyp_distance(p: &ProjPoint, q: &ProjPoint) -> Result<f64, ProjError> {
    check_pair(p, q)?;
    let ratio = inner(&p.coords, &q.coords).rnorm() / (p.self_inner() * q.self_inner());
    Ok(2.0 * ratio.sqrt().max(1.0).acosh())
}

/// `tr_{A/ℝ}(v̄_{n+1} w_{n+1} ⟨v, w⟩)`, negative on V₋ × V₋.
pub fn trace_neg_check(p: &ProjPoint, q: &ProjPoint) -> Result<f64, ProjError> {
    check_pair(p, q)?;
    Ok(trace_quantity(p, q))
}

/// Same quantity without the V₋ precondition.
pub fn trace_quantity(p: &ProjPoint, q: &ProjPoint) -> f64 {
    let m = p.coords.len() - 1;
    (p.coords[m].conj() * q.coords[m] * inner(&p.coords, &q.coords)).rtrace()
}
