//! Certified isolation of the complex roots of a squarefree integer polynomial.
//!
//! Approximations come from Durand–Kerner iteration; they are certified with
//! the Weierstrass inclusion disks `|z - z_i| <= n |f(z_i)| / prod_{j != i} |z_i - z_j|`,
//! evaluated in exact rational arithmetic. When the disks are pairwise
//! disjoint each holds exactly one root. Real roots are refined by bisection
//! with exact sign evaluation, complex ones by Newton steps whose inclusion
//! disk `n |f(z)/f'(z)|` is checked to sit inside the isolating disk.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::FieldError;

/// Exact complex number with rational parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl QComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn from_f64(z: Complex64) -> Option<Self> {
        Some(Self {
            re: BigRational::from_float(z.re)?,
            im: BigRational::from_float(z.im)?,
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        let d = o.norm_sq();
        if d.is_zero() {
            return None;
        }
        let num = self.mul(&Self::new(o.re.clone(), -&o.im));
        Some(Self::new(num.re / &d, num.im / d))
    }

    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Rounds both parts to the grid `2^-bits`.
    pub fn round_to(&self, bits: u32) -> Self {
        Self::new(round_dyadic(&self.re, bits), round_dyadic(&self.im, bits))
    }
}

pub fn round_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigRational::from_integer(BigInt::one() << bits);
    (x * &scale).round() / scale
}

/// Rational upper bound for `sqrt(q)`, `q >= 0`.
pub fn sqrt_up(q: &BigRational) -> BigRational {
    if !q.is_positive() {
        return BigRational::zero();
    }
    let approx = q.to_f64().unwrap_or(0.0);
    if approx == 0.0 || !approx.is_finite() {
        return bisect_sqrt_up(q);
    }
    let mut s = BigRational::from_float(approx.sqrt() * (1.0 + 1e-12)).unwrap_or_else(BigRational::one);
    let bump = BigRational::new(BigInt::from(1_000_001), BigInt::from(1_000_000));
    while &s * &s < *q {
        s *= &bump;
    }
    s
}

fn bisect_sqrt_up(q: &BigRational) -> BigRational {
    let mut lo = BigRational::zero();
    let mut hi = if *q > BigRational::one() { q.clone() } else { BigRational::one() };
    let two = BigRational::from_integer(2.into());
    for _ in 0..200 {
        let mid = (&lo + &hi) / &two;
        if &mid * &mid >= *q {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Horner evaluation of an integer polynomial (low degree first).
pub fn eval_int_poly(p: &[BigInt], z: &QComplex) -> QComplex {
    let mut acc = QComplex::zero();
    for c in p.iter().rev() {
        acc = acc.mul(z);
        acc.re += BigRational::from_integer(c.clone());
    }
    acc
}

pub fn eval_int_poly_real(p: &[BigInt], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}

fn int_derivative(p: &[BigInt]) -> Vec<BigInt> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

/// A disk in ℂ with rational center and rational radius bound.
#[derive(Clone, Debug)]
pub struct RootDisk {
    pub center: QComplex,
    pub radius: BigRational,
}

impl RootDisk {
    pub fn is_real(&self) -> bool {
        self.center.im.is_zero()
    }
}

/// Isolates all `n` roots. Returned disks are pairwise disjoint; a disk with
/// a real center contains a real root, one whose center has `|im| > radius`
/// a non-real root.
pub fn isolate(f: &[BigInt]) -> Result<Vec<RootDisk>, FieldError> {
    let n = f.len() - 1;
    if n == 1 {
        let root = BigRational::from_integer(-f[0].clone());
        return Ok(vec![RootDisk { center: QComplex::real(root), radius: BigRational::zero() }]);
    }
    let mut z: Vec<QComplex> = durand_kerner_f64(f)
        .into_iter()
        .map(|c| QComplex::from_f64(c).unwrap_or_else(QComplex::zero))
        .collect();
    let mut bits = 64u32;
    loop {
        if let Some(disks) = certify(f, &z).and_then(snap_real) {
            return Ok(disks);
        }
        if bits >= 4096 {
            break;
        }
        bits *= 2;
        for _ in 0..8 {
            z = durand_kerner_step_exact(f, &z, bits);
        }
    }
    Err(FieldError::RootIsolation("could not separate the roots".into()))
}

fn durand_kerner_f64(f: &[BigInt]) -> Vec<Complex64> {
    let n = f.len() - 1;
    let coeffs: Vec<f64> = f.iter().map(|c| c.to_f64().unwrap_or(0.0)).collect();
    let eval = |z: Complex64| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let bound = coeffs[..n].iter().fold(0.0f64, |m, c| m.max(c.abs())) + 1.0;
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * (bound / 2.0).max(1.0)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-17 {
            break;
        }
    }
    z
}

fn durand_kerner_step_exact(f: &[BigInt], z: &[QComplex], bits: u32) -> Vec<QComplex> {
    let mut out = z.to_vec();
    for i in 0..z.len() {
        let mut denom = QComplex::real(BigRational::one());
        for j in 0..z.len() {
            if i != j {
                denom = denom.mul(&out[i].sub(&out[j]));
            }
        }
        if let Some(step) = eval_int_poly(f, &out[i]).div(&denom) {
            out[i] = out[i].sub(&step).round_to(bits);
        }
    }
    out
}

fn certify(f: &[BigInt], z: &[QComplex]) -> Option<Vec<RootDisk>> {
    let n = z.len();
    let nn = BigRational::from_integer(BigInt::from(n * n));
    let mut disks = Vec::with_capacity(n);
    for i in 0..n {
        let mut prod = BigRational::one();
        for j in 0..n {
            if i != j {
                let d = z[i].sub(&z[j]).norm_sq();
                if d.is_zero() {
                    return None;
                }
                prod *= d;
            }
        }
        let r2 = &nn * eval_int_poly(f, &z[i]).norm_sq() / prod;
        disks.push(RootDisk { center: z[i].clone(), radius: sqrt_up(&r2) });
    }
    pairwise_disjoint(&disks).then_some(disks)
}

fn pairwise_disjoint(disks: &[RootDisk]) -> bool {
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            let d2 = disks[i].center.sub(&disks[j].center).norm_sq();
            let r = &disks[i].radius + &disks[j].radius;
            if d2 <= &r * &r {
                return false;
            }
        }
    }
    true
}

/// Moves disks that meet the real axis onto it; fails if that breaks disjointness.
fn snap_real(disks: Vec<RootDisk>) -> Option<Vec<RootDisk>> {
    let snapped: Vec<RootDisk> = disks
        .into_iter()
        .map(|d| {
            if d.center.im.abs() <= d.radius {
                RootDisk {
                    radius: &d.radius + d.center.im.abs(),
                    center: QComplex::real(d.center.re),
                }
            } else {
                d
            }
        })
        .collect();
    if !pairwise_disjoint(&snapped) {
        return None;
    }
    let upper = snapped.iter().filter(|d| d.center.im.is_positive()).count();
    let lower = snapped.iter().filter(|d| d.center.im.is_negative()).count();
    (upper == lower).then_some(snapped)
}

/// Shrinks the isolating interval of a real root to width `<= 2 * target`.
pub fn refine_real(f: &[BigInt], disk: &RootDisk, target: &BigRational) -> RootDisk {
    if disk.radius <= *target {
        return disk.clone();
    }
    let two = BigRational::from_integer(2.into());
    let mut lo = &disk.center.re - &disk.radius;
    let mut hi = &disk.center.re + &disk.radius;
    let mut flo = eval_int_poly_real(f, &lo);
    if flo.is_zero() {
        return RootDisk { center: QComplex::real(lo), radius: BigRational::zero() };
    }
    if eval_int_poly_real(f, &hi).is_zero() {
        return RootDisk { center: QComplex::real(hi), radius: BigRational::zero() };
    }
    while (&hi - &lo) / &two > *target {
        let mid = (&lo + &hi) / &two;
        let fm = eval_int_poly_real(f, &mid);
        if fm.is_zero() {
            return RootDisk { center: QComplex::real(mid), radius: BigRational::zero() };
        }
        if fm.is_positive() == flo.is_positive() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    RootDisk { center: QComplex::real((&lo + &hi) / &two), radius: (hi - lo) / two }
}

/// Newton refinement of a non-real root inside its isolating disk.
pub fn refine_complex(f: &[BigInt], disk: &RootDisk, target: &BigRational) -> Option<RootDisk> {
    if disk.radius <= *target {
        return Some(disk.clone());
    }
    let n = BigRational::from_integer(BigInt::from(f.len() - 1));
    let df = int_derivative(f);
    let mut z = disk.center.clone();
    let mut bits = 64u32;
    for _ in 0..200 {
        let fz = eval_int_poly(f, &z);
        let dz = eval_int_poly(&df, &z);
        let step = fz.div(&dz)?;
        // inclusion radius around the current iterate
        let rho = &n * sqrt_up(&step.norm_sq());
        let offset = sqrt_up(&z.sub(&disk.center).norm_sq());
        if rho <= *target && &offset + &rho <= disk.radius {
            return Some(RootDisk { center: z, radius: rho });
        }
        let target_f = target.to_f64().unwrap_or(0.0).max(1e-300);
        let needed = (-target_f.log2()).max(0.0) as u32 + 64;
        bits = bits.max(needed).min(8192);
        z = z.sub(&step).round_to(bits);
    }
    None
}
