//! Upper half-space model `{x ∈ ℝⁿ : x_n > 0}` with
//! `cosh d(x, y) = 1 + |x − y|² / (2 x_n y_n)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::HypError;

pub type HPoint = DVector<f64>;

fn height(p: &HPoint) -> f64 {
    p[p.len() - 1]
}

/// `sinh(d/2)²`, which orders distances without cancellation.
pub fn half_sinh_sq(p: &HPoint, q: &HPoint) -> f64 {
    (p - q).norm_squared() / (4.0 * height(p) * height(q))
}

pub fn distance(p: &HPoint, q: &HPoint) -> f64 {
    2.0 * half_sinh_sq(p, q).sqrt().asinh()
}

pub trait Isometry {
    fn apply(&self, p: &HPoint) -> HPoint;
    fn apply_inv(&self, p: &HPoint) -> HPoint;
}

/// `x ↦ k·A·x` fixing the vertical axis: `A` rotates the first `n − 1`
/// coordinates, `k > 1` dilates.
#[derive(Clone, Debug, PartialEq)]
pub struct AxialForm {
    pub k: f64,
    pub a: DMatrix<f64>,
}

impl AxialForm {
    pub fn new(k: f64, a: DMatrix<f64>) -> Result<Self, HypError> {
        if !(k > 1.0) {
            return Err(HypError::NotAxial(format!("dilation {k} must exceed 1")));
        }
        if !a.is_square() || (a.transpose() * &a - DMatrix::identity(a.nrows(), a.ncols())).amax() > 1e-9 {
            return Err(HypError::NotAxial("rotation part is not orthogonal".into()));
        }
        Ok(Self { k, a })
    }

    /// Plane rotation by `theta` in the first two coordinates of `ℝ^{n−1}`.
    pub fn rotation(n: usize, theta: f64, k: f64) -> Result<Self, HypError> {
        let mut a = DMatrix::identity(n - 1, n - 1);
        if n >= 3 {
            let (s, c) = theta.sin_cos();
            a[(0, 0)] = c;
            a[(0, 1)] = -s;
            a[(1, 0)] = s;
            a[(1, 1)] = c;
        }
        Self::new(k, a)
    }

    /// Dimension `n` of the hyperbolic space acted on.
    pub fn dim(&self) -> usize {
        self.a.nrows() + 1
    }

    /// Translation length `log k`.
    pub fn length(&self) -> f64 {
        self.k.ln()
    }

    /// Absolute rotation: operator norm of `A − I`.
    pub fn r_gamma(&self) -> f64 {
        let m = &self.a - DMatrix::identity(self.a.nrows(), self.a.ncols());
        m.singular_values().max()
    }

    fn lift(&self, scale: f64, a: &DMatrix<f64>, p: &HPoint) -> HPoint {
        let n = p.len();
        let horiz = a * p.rows(0, n - 1);
        let mut out = HPoint::zeros(n);
        out.rows_mut(0, n - 1).copy_from(&(horiz * scale));
        out[n - 1] = p[n - 1] * scale;
        out
    }
}

impl Isometry for AxialForm {
    fn apply(&self, p: &HPoint) -> HPoint {
        self.lift(self.k, &self.a, p)
    }

    fn apply_inv(&self, p: &HPoint) -> HPoint {
        self.lift(1.0 / self.k, &self.a.transpose(), p)
    }
}

/// Element of SL₂(ℂ) acting on ℍ³ by the Poincaré extension; points are `(x, y, t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }
}

impl Isometry for Mobius {
    fn apply(&self, p: &HPoint) -> HPoint {
        let z = Complex64::new(p[0], p[1]);
        let t = p[2];
        let czd = self.c * z + self.d;
        let den = czd.norm_sqr() + self.c.norm_sqr() * t * t;
        let num = (self.a * z + self.b) * czd.conj() + self.a * self.c.conj() * t * t;
        HPoint::from_vec(vec![num.re / den, num.im / den, t / den])
    }

    fn apply_inv(&self, p: &HPoint) -> HPoint {
        self.inverse().apply(p)
    }
}

/// Random points with horizontal part in `[-2, 2]^{n−1}` and height in `[e^{-2}, e^2]`.
pub fn random_point<R: Rng>(n: usize, rng: &mut R) -> HPoint {
    let mut v: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
    v.push(rng.gen_range(-2.0f64..2.0).exp());
    HPoint::from_vec(v)
}

pub fn random_pairs(n: usize, count: usize, seed: u64) -> Vec<(HPoint, HPoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (random_point(n, &mut rng), random_point(n, &mut rng))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub pairs: usize,
    pub violations: usize,
    /// Smallest `max(d(x, gy), d(x, g⁻¹y)) − d(x, y)` over the samples.
    pub min_margin: f64,
    pub first_violation: Option<(Vec<f64>, Vec<f64>)>,
}

impl SeparationReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Evaluates `max(d(x, gy), d(x, g⁻¹y)) > d(x, y)` on every sample pair.
pub fn bisector_separation_test<I: Isometry>(g: &I, pairs: &[(HPoint, HPoint)]) -> SeparationReport {
    let mut report = SeparationReport { pairs: pairs.len(), violations: 0, min_margin: f64::INFINITY, first_violation: None };
    for (x, y) in pairs {
        let s0 = half_sinh_sq(x, y);
        let s1 = half_sinh_sq(x, &g.apply(y)).max(half_sinh_sq(x, &g.apply_inv(y)));
        let margin = 2.0 * s1.sqrt().asinh() - 2.0 * s0.sqrt().asinh();
        report.min_margin = report.min_margin.min(margin);
        if s1 <= s0 {
            report.violations += 1;
            if report.first_violation.is_none() {
                report.first_violation = Some((x.iter().copied().collect(), y.iter().copied().collect()));
            }
        }
    }
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub d_xy: f64,
    pub d_x_gy: f64,
    pub d_x_ginv_y: f64,
}

impl Witness {
    pub fn is_counterexample(&self) -> bool {
        self.d_x_gy.max(self.d_x_ginv_y) < self.d_xy
    }
}

/// Points `x, y` with `max(d(x, γy), d(x, γ⁻¹y)) < d(x, y)`.
///
/// Summing the two required inequalities `|x − kÃy|² < k|x − y|²` and
/// `|y − kÃx|² < k|x − y|²` gives `(k − 1)² < k·r²`, i.e. `cosh ℓ < 1 + r²/2`,
/// as a necessary condition; the antipodal horizontal pair `x = −y` with `y`
/// a top singular vector of `A − I` attains it. Forms with
/// `1 + r²/2 ≤ cosh ℓ < 1 + r` violate the criterion but admit no witness.
pub fn separation_witness(g: &AxialForm) -> Result<Witness, HypError> {
    let r = g.r_gamma();
    if r <= 1e-12 {
        return Err(HypError::NoWitness("rotation part is trivial".into()));
    }
    if super::bowditch_improved(g) {
        return Err(HypError::NoWitness("translation length satisfies arcosh(1 + r)".into()));
    }
    if (g.k - 1.0).powi(2) >= g.k * r * r {
        return Err(HypError::NoWitness(format!(
            "cosh ℓ = {:.12} ≥ 1 + r²/2 = {:.12}: no pair can fail separation",
            g.length().cosh(),
            1.0 + 0.5 * r * r
        )));
    }
    let n = g.dim();
    let id = DMatrix::<f64>::identity(n - 1, n - 1);
    let svd = (&g.a - &id).svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| HypError::NoWitness("SVD failed".into()))?;
    let (imax, _) = svd.singular_values.argmax();
    let y0: DVector<f64> = v_t.row(imax).transpose();
    let mut eps = 0.5;
    for _ in 0..80 {
        let mut x = HPoint::zeros(n);
        let mut y = HPoint::zeros(n);
        x.rows_mut(0, n - 1).copy_from(&(-&y0));
        y.rows_mut(0, n - 1).copy_from(&y0);
        x[n - 1] = eps;
        y[n - 1] = eps;
        let w = Witness {
            d_xy: distance(&x, &y),
            d_x_gy: distance(&x, &g.apply(&y)),
            d_x_ginv_y: distance(&x, &g.apply_inv(&y)),
            x: x.iter().copied().collect(),
            y: y.iter().copied().collect(),
        };
        if w.is_counterexample() {
            return Ok(w);
        }
        eps /= 2.0;
    }
    Err(HypError::NoWitness("perturbation did not separate (inequality too tight)".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_plane_distance_known_value() {
        // points i and 2i on the imaginary axis: d = log 2
        let p = HPoint::from_vec(vec![0.0, 1.0]);
        let q = HPoint::from_vec(vec![0.0, 2.0]);
        assert!((distance(&p, &q) - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn mobius_is_an_isometry() {
        let g = Mobius::new(
            Complex64::new(2.0, 1.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        let det = g.a * g.d - g.b * g.c;
        let s = det.sqrt();
        let g = Mobius::new(g.a / s, g.b / s, g.c / s, g.d / s);
        for (p, q) in random_pairs(3, 50, 9) {
            let d0 = distance(&p, &q);
            let d1 = distance(&g.apply(&p), &g.apply(&q));
            assert!((d0 - d1).abs() < 1e-8 * (1.0 + d0));
            let back = g.apply_inv(&g.apply(&p));
            assert!((back - &p).norm() < 1e-9 * (1.0 + p.norm()));
        }
    }

    #[test]
    fn rotation_r_gamma() {
        let g = AxialForm::rotation(3, PI, 2.0).unwrap();
        assert!((g.r_gamma() - 2.0).abs() < 1e-12);
        let g = AxialForm::rotation(3, 0.0, 2.0).unwrap();
        assert!(g.r_gamma() < 1e-12);
        assert!(AxialForm::rotation(3, 0.3, 1.0).is_err());
    }

    #[test]
    fn witness_for_small_dilation() {
        let g = AxialForm::rotation(3, PI, 1.1).unwrap();
        let w = separation_witness(&g).unwrap();
        assert!(w.is_counterexample());
        let report = bisector_separation_test(
            &g,
            &[(HPoint::from_vec(w.x.clone()), HPoint::from_vec(w.y.clone()))],
        );
        assert_eq!(report.violations, 1);
        let big = AxialForm::rotation(3, PI, 6.0).unwrap();
        assert!(separation_witness(&big).is_err());
        let flat = AxialForm::rotation(3, 0.0, 1.1).unwrap();
        assert!(separation_witness(&flat).is_err());
    }

    #[test]
    fn small_rotation_gap_has_no_witness() {
        // violates log k ≥ arcosh(1 + r) but cosh ℓ ≥ 1 + r²/2
        let g = AxialForm::rotation(3, 0.3, 1.8).unwrap();
        assert!(!crate::hyp::bowditch_improved(&g));
        assert!(separation_witness(&g).is_err());
        assert!(bisector_separation_test(&g, &random_pairs(3, 20_000, 5)).holds());
    }
}
