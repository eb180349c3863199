//! Exact arithmetic in number fields `ℚ(α) = ℚ[x]/(f)` for a monic integer
//! polynomial `f`, with certified evaluation at the archimedean places.
//!
//! Elements are stored as an integer numerator vector in the power basis
//! over a common positive denominator, so products of algebraic integers
//! never touch rational normalisation beyond a final gcd.

pub mod interval;
pub mod poly;
pub mod roots;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use interval::{ComplexBall, PlaceKind, PlaceValue, RealInterval};
use roots::{QComplex, RootDisk};

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("minimal polynomial must be monic")]
    NotMonic,
    #[error("minimal polynomial must have degree at least 1")]
    DegreeZero,
    #[error("minimal polynomial is not squarefree")]
    NotSquarefree,
    #[error("minimal polynomial has the rational root {0}")]
    RationalRoot(BigInt),
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not integral in the declared integral basis")]
    NotIntegral,
    #[error("valuation undefined for a non-prime (zero or unit) uniformiser")]
    BadUniformiser,
    #[error("place index {0} out of range")]
    BadPlace(usize),
    #[error("expected {expected} coefficients, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("root isolation failed: {0}")]
    RootIsolation(String),
    #[error("integral basis is singular or has the wrong size")]
    BadIntegralBasis,
    #[error("comparison undecided at maximal precision: {0}")]
    Undecidable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// An archimedean place: one real root, or one root of a conjugate pair
/// (the representative with positive imaginary part).
#[derive(Clone, Debug)]
pub struct Place {
    pub kind: PlaceKind,
    disk: RootDisk,
}

impl Place {
    /// Floating approximation of the root defining this place.
    pub fn approx_root(&self) -> Complex64 {
        self.disk.center.to_c64()
    }
}

pub struct NumberField {
    minpoly: Vec<BigInt>,
    places: Vec<Place>,
    /// Rows express the integral basis in the power basis; `None` means `ℤ[α]`.
    integral_basis: Option<(Vec<Vec<BigRational>>, Vec<Vec<BigRational>>)>,
    refined: Mutex<HashMap<(usize, u32), RootDisk>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("minpoly", &self.minpoly)
            .field("places", &self.places.iter().map(|p| (p.kind, p.approx_root())).collect::<Vec<_>>())
            .finish()
    }
}

impl NumberField {
    /// Builds `ℚ[x]/(f)` from integer coefficients, lowest degree first.
    pub fn new(minpoly: &[i64]) -> Result<Arc<Self>, FieldError> {
        Self::from_bigints(minpoly.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_bigints(mut minpoly: Vec<BigInt>) -> Result<Arc<Self>, FieldError> {
        while minpoly.len() > 1 && minpoly.last().is_some_and(|c| c.is_zero()) {
            minpoly.pop();
        }
        if minpoly.len() < 2 {
            return Err(FieldError::DegreeZero);
        }
        if !minpoly.last().is_some_and(|c| c.is_one()) {
            return Err(FieldError::NotMonic);
        }
        let f = poly::from_ints(&minpoly);
        if poly::degree(&poly::gcd(&f, &poly::derivative(&f))) != Some(0) {
            return Err(FieldError::NotSquarefree);
        }
        let disks = roots::isolate(&minpoly)?;
        let n = minpoly.len() - 1;
        if n > 1 {
            // any integer root sits inside its (real) isolating disk
            for d in disks.iter().filter(|d| d.is_real()) {
                let lo = (&d.center.re - &d.radius).floor().to_integer();
                let hi = (&d.center.re + &d.radius).ceil().to_integer();
                let mut k = lo;
                while k <= hi {
                    if roots::eval_int_poly_real(&minpoly, &BigRational::from_integer(k.clone())).is_zero() {
                        return Err(FieldError::RationalRoot(k));
                    }
                    k += 1;
                }
            }
        }
        let mut real: Vec<RootDisk> = disks.iter().filter(|d| d.is_real()).cloned().collect();
        real.sort_by(|a, b| a.center.re.cmp(&b.center.re));
        let mut complex: Vec<RootDisk> =
            disks.iter().filter(|d| d.center.im.is_positive()).cloned().collect();
        complex.sort_by(|a, b| a.center.re.cmp(&b.center.re).then(a.center.im.cmp(&b.center.im)));
        if real.len() + 2 * complex.len() != n {
            return Err(FieldError::RootIsolation("place count mismatch".into()));
        }
        let places = real
            .into_iter()
            .map(|disk| Place { kind: PlaceKind::Real, disk })
            .chain(complex.into_iter().map(|disk| Place { kind: PlaceKind::Complex, disk }))
            .collect();
        Ok(Arc::new(Self { minpoly, places, integral_basis: None, refined: Mutex::new(HashMap::new()) }))
    }

    /// Same field with an explicit integral basis (rows in power-basis coordinates).
    pub fn with_integral_basis(
        minpoly: &[i64],
        basis: Vec<Vec<BigRational>>,
    ) -> Result<Arc<Self>, FieldError> {
        let base = Self::new(minpoly)?;
        let n = base.degree();
        if basis.len() != n || basis.iter().any(|r| r.len() != n) {
            return Err(FieldError::BadIntegralBasis);
        }
        let inv = crate::linalg::inverse(&basis).ok_or(FieldError::BadIntegralBasis)?;
        Ok(Arc::new(Self {
            minpoly: base.minpoly.clone(),
            places: base.places.clone(),
            integral_basis: Some((basis, inv)),
            refined: Mutex::new(HashMap::new()),
        }))
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn num_real_places(&self) -> usize {
        self.places.iter().filter(|p| p.kind == PlaceKind::Real).count()
    }

    pub fn num_complex_places(&self) -> usize {
        self.places.len() - self.num_real_places()
    }

    /// Index into [`places`](Self::places) of the `i`-th real place.
    pub fn real_place(&self, i: usize) -> Result<usize, FieldError> {
        (i < self.num_real_places()).then_some(i).ok_or(FieldError::BadPlace(i))
    }

    /// Index into [`places`](Self::places) of the `i`-th complex place.
    pub fn complex_place(&self, i: usize) -> Result<usize, FieldError> {
        let r = self.num_real_places();
        (i < self.num_complex_places()).then_some(r + i).ok_or(FieldError::BadPlace(i))
    }

    fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || self.minpoly == other.minpoly
    }

    pub fn zero(self: &Arc<Self>) -> NFElem {
        NFElem { field: self.clone(), num: vec![BigInt::zero(); self.degree()], den: BigInt::one() }
    }

    pub fn one(self: &Arc<Self>) -> NFElem {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, k: i64) -> NFElem {
        let mut e = self.zero();
        e.num[0] = BigInt::from(k);
        e
    }

    pub fn from_rational(self: &Arc<Self>, q: &BigRational) -> NFElem {
        let mut num = vec![BigInt::zero(); self.degree()];
        num[0] = q.numer().clone();
        NFElem::normalized(self.clone(), num, q.denom().clone())
    }

    /// The generator `α` (equal to `-f(0)` in degree one).
    pub fn gen(self: &Arc<Self>) -> NFElem {
        if self.degree() == 1 {
            return self.from_rational(&BigRational::from_integer(-self.minpoly[0].clone()));
        }
        let mut e = self.zero();
        e.num[1] = BigInt::one();
        e
    }

    /// Element from rational power-basis coordinates.
    pub fn elem(self: &Arc<Self>, coeffs: &[BigRational]) -> Result<NFElem, FieldError> {
        if coeffs.len() != self.degree() {
            return Err(FieldError::WrongLength { expected: self.degree(), got: coeffs.len() });
        }
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Ok(NFElem::normalized(self.clone(), num, den))
    }

    /// Element from integer power-basis coordinates; shorter slices are zero-padded.
    pub fn elem_i64(self: &Arc<Self>, coeffs: &[i64]) -> NFElem {
        assert!(coeffs.len() <= self.degree(), "too many coefficients");
        let mut e = self.zero();
        for (slot, &c) in e.num.iter_mut().zip(coeffs) {
            *slot = BigInt::from(c);
        }
        e
    }

    fn reduce(&self, mut prod: Vec<BigInt>) -> Vec<BigInt> {
        let n = self.degree();
        for d in (n..prod.len()).rev() {
            let c = std::mem::take(&mut prod[d]);
            if c.is_zero() {
                continue;
            }
            for k in 0..n {
                prod[d - n + k] -= &c * &self.minpoly[k];
            }
        }
        prod.resize(n, BigInt::zero());
        prod
    }

    /// Isolating disk for `place` with radius at most `2^-bits`.
    fn root_disk(&self, place: usize, bits: u32) -> Result<RootDisk, FieldError> {
        let p = self.places.get(place).ok_or(FieldError::BadPlace(place))?;
        if let Some(d) = self.refined.lock().unwrap().get(&(place, bits)) {
            return Ok(d.clone());
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let d = match p.kind {
            PlaceKind::Real => roots::refine_real(&self.minpoly, &p.disk, &target),
            PlaceKind::Complex => roots::refine_complex(&self.minpoly, &p.disk, &target)
                .ok_or_else(|| FieldError::RootIsolation("Newton refinement failed".into()))?,
        };
        self.refined.lock().unwrap().insert((place, bits), d.clone());
        Ok(d)
    }
}

/// Element of a number field.
#[derive(Clone)]
pub struct NFElem {
    field: Arc<NumberField>,
    num: Vec<BigInt>,
    den: BigInt,
}

/// `π`-adic valuation of an element; `Infinite` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(k) => s.serialize_u32(*k),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl Valuation {
    pub fn at_least(self, k: u32) -> bool {
        match self {
            Valuation::Finite(v) => v >= k,
            Valuation::Infinite => true,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(k) => write!(f, "{k}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl NFElem {
    fn normalized(field: Arc<NumberField>, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        let g = num.iter().fold(den.clone(), |g, c| g.gcd(c));
        if !g.is_one() && !g.is_zero() {
            for c in num.iter_mut() {
                *c = &*c / &g;
            }
            den /= &g;
        }
        if num.iter().all(|c| c.is_zero()) {
            den = BigInt::one();
        }
        Self { field, num, den }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn same_field(&self, other: &NFElem) -> bool {
        self.field.same(&other.field)
    }

    /// Power-basis coordinates.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num.iter().map(|c| BigRational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    /// `Some(q)` when the element lies in ℚ.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.num[1..]
            .iter()
            .all(|c| c.is_zero())
            .then(|| BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    pub fn is_int(&self, k: i64) -> bool {
        self.as_rational() == Some(BigRational::from_integer(BigInt::from(k)))
    }

    /// Sign of the first nonzero coordinate (`Equal` for zero).
    pub fn leading_sign(&self) -> Ordering {
        match self.num.iter().find(|c| !c.is_zero()).map(|c| c.sign()) {
            Some(Sign::Plus) => Ordering::Greater,
            Some(Sign::Minus) => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    pub fn checked_add(&self, o: &NFElem) -> Result<NFElem, FieldError> {
        if !self.same_field(o) {
            return Err(FieldError::FieldMismatch);
        }
        let num = self
            .num
            .iter()
            .zip(&o.num)
            .map(|(a, b)| a * &o.den + b * &self.den)
            .collect();
        Ok(Self::normalized(self.field.clone(), num, &self.den * &o.den))
    }

    pub fn checked_sub(&self, o: &NFElem) -> Result<NFElem, FieldError> {
        self.checked_add(&-o)
    }

    pub fn checked_mul(&self, o: &NFElem) -> Result<NFElem, FieldError> {
        if !self.same_field(o) {
            return Err(FieldError::FieldMismatch);
        }
        let n = self.field.degree();
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let num = self.field.reduce(prod);
        Ok(Self::normalized(self.field.clone(), num, &self.den * &o.den))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against the minimal polynomial.
    pub fn inv(&self) -> Result<NFElem, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let f = poly::from_ints(&self.field.minpoly);
        let a: poly::QPoly = self.coeffs();
        let (g, s) = poly::ext_gcd_inverse_part(&a, &f);
        if poly::degree(&g) != Some(0) {
            // only possible for a reducible minimal polynomial
            return Err(FieldError::DivisionByZero);
        }
        let mut coeffs = s;
        coeffs.resize(self.field.degree(), BigRational::zero());
        self.field.elem(&coeffs)
    }

    pub fn checked_div(&self, o: &NFElem) -> Result<NFElem, FieldError> {
        self.checked_mul(&o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<NFElem, FieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.field.one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Field norm `N(a)`, computed as the resultant of the minimal polynomial and `a(x)`.
    pub fn norm(&self) -> BigRational {
        let f = poly::from_ints(&self.field.minpoly);
        poly::resultant(&f, &self.coeffs())
    }

    /// Integrality in the field's declared integral basis.
    pub fn is_integral(&self) -> bool {
        match &self.field.integral_basis {
            None => self.den.is_one(),
            Some((_, inv)) => {
                let c = self.coeffs();
                (0..c.len()).all(|j| {
                    let s: BigRational = c.iter().zip(inv).map(|(x, row)| x * &row[j]).sum();
                    s.is_integer()
                })
            }
        }
    }

    /// Largest `k` with `self / pi^k` integral; `Infinite` for zero.
    pub fn val_pi(&self, pi: &NFElem) -> Result<Valuation, FieldError> {
        if !self.same_field(pi) {
            return Err(FieldError::FieldMismatch);
        }
        if !self.is_integral() || !pi.is_integral() {
            return Err(FieldError::NotIntegral);
        }
        if self.is_zero() {
            return Ok(Valuation::Infinite);
        }
        let n = pi.norm();
        if n.is_zero() || n.abs().is_one() {
            return Err(FieldError::BadUniformiser);
        }
        let pinv = pi.inv()?;
        let mut cur = self.clone();
        let mut k = 0u32;
        loop {
            let next = &cur * &pinv;
            if !next.is_integral() {
                return Ok(Valuation::Finite(k));
            }
            cur = next;
            k += 1;
        }
    }

    /// Exact value of the numerator polynomial at the disk center plus an
    /// error bound for the whole disk, both scaled by `1/den`.
    fn eval_disk(&self, disk: &RootDisk) -> (QComplex, BigRational) {
        let c = &disk.center;
        // Taylor coefficients of the numerator at c by repeated synthetic division
        let mut t: Vec<QComplex> = self
            .num
            .iter()
            .map(|x| QComplex::real(BigRational::from_integer(x.clone())))
            .collect();
        let n = t.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let carry = t[j + 1].mul(c);
                t[j] = t[j].add(&carry);
            }
        }
        let den = BigRational::from_integer(self.den.clone());
        let value = t[0].scale(&den.recip());
        let mut err = BigRational::zero();
        let mut rho_k = BigRational::one();
        for tk in t.iter().skip(1) {
            rho_k *= &disk.radius;
            err += roots::sqrt_up(&tk.norm_sq()) * &rho_k;
        }
        (value, err / den)
    }

    /// Certified embedding at `place` with radius at most `target` (down to
    /// double precision resolution of the center).
    pub fn embed(&self, place: usize, target: f64) -> Result<PlaceValue, FieldError> {
        let kind = self.field.places.get(place).ok_or(FieldError::BadPlace(place))?.kind;
        if let Some(q) = self.as_rational() {
            let (x, e) = rational_to_f64(&q);
            return Ok(PlaceValue { kind, center: Complex64::new(x, 0.0), radius: round_up(&e) });
        }
        let mut bits = 40u32;
        loop {
            let disk = self.field.root_disk(place, bits)?;
            let (v, err) = self.eval_disk(&disk);
            let (re, ere) = rational_to_f64(&v.re);
            let (im, eim) = rational_to_f64(&v.im);
            let radius = round_up(&(err.clone() + ere + eim));
            let floor = 8.0 * f64::EPSILON * Complex64::new(re, im).norm();
            if radius <= target || (radius <= floor && err.to_f64().unwrap_or(1.0) <= floor * 1e-3) || bits >= 1024 {
                return Ok(PlaceValue { kind, center: Complex64::new(re, im), radius });
            }
            bits += 40;
        }
    }

    /// Exact three-way comparison of `|τ(self)|` against a rational bound.
    pub fn cmp_abs(&self, place: usize, bound: &BigRational) -> Result<Ordering, FieldError> {
        self.field.places.get(place).ok_or(FieldError::BadPlace(place))?;
        if let Some(q) = self.as_rational() {
            return Ok(q.abs().cmp(bound));
        }
        let mut bits = 32u32;
        while bits <= 1024 {
            let disk = self.field.root_disk(place, bits)?;
            let (v, err) = self.eval_disk(&disk);
            let m2 = v.norm_sq();
            let up = bound + &err;
            if m2 > &up * &up {
                return Ok(Ordering::Greater);
            }
            let down = bound - &err;
            if down.is_positive() && m2 < &down * &down {
                return Ok(Ordering::Less);
            }
            bits *= 2;
        }
        Err(FieldError::Undecidable(format!("|τ({self})| vs {bound}")))
    }

    /// Sign of the imaginary part of `τ(self)` at a place.
    pub fn sign_im(&self, place: usize) -> Result<Ordering, FieldError> {
        let p = self.field.places.get(place).ok_or(FieldError::BadPlace(place))?;
        if p.kind == PlaceKind::Real || self.as_rational().is_some() {
            return Ok(Ordering::Equal);
        }
        let mut bits = 32u32;
        while bits <= 1024 {
            let disk = self.field.root_disk(place, bits)?;
            let (v, err) = self.eval_disk(&disk);
            if v.im > err {
                return Ok(Ordering::Greater);
            }
            if -&v.im > err {
                return Ok(Ordering::Less);
            }
            bits *= 2;
        }
        Err(FieldError::Undecidable(format!("sign of Im τ({self})")))
    }

    /// Matrix of multiplication by `self` on the power basis (column `j` = `self·α^j`).
    pub fn mult_matrix(&self) -> Vec<Vec<BigRational>> {
        let n = self.field.degree();
        let mut basis = self.field.one();
        let alpha = self.field.gen();
        let mut cols = Vec::with_capacity(n);
        for _ in 0..n {
            cols.push((self * &basis).coeffs());
            basis = &basis * &alpha;
        }
        (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// Characteristic polynomial of multiplication by `self` (monic, low degree first),
    /// by the Faddeev–LeVerrier recurrence.
    pub fn charpoly(&self) -> poly::QPoly {
        let a = self.mult_matrix();
        let n = a.len();
        let mut c = vec![BigRational::zero(); n + 1];
        c[n] = BigRational::one();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = crate::linalg::mat_mul(&a, &m);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] += &c[n - k + 1];
            }
            m = next;
            let am = crate::linalg::mat_mul(&a, &m);
            let tr: BigRational = (0..n).map(|i| am[i][i].clone()).sum();
            c[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
        }
        c
    }

    /// Whether `τ(self)` is real at `place`, decided exactly: the value is a
    /// root of the squarefree part of the characteristic polynomial of
    /// `den·self`, whose roots are isolated in disjoint certified disks.
    pub fn is_real_at(&self, place: usize) -> Result<bool, FieldError> {
        let p = self.field.places.get(place).ok_or(FieldError::BadPlace(place))?;
        if p.kind == PlaceKind::Real || self.as_rational().is_some() {
            return Ok(true);
        }
        let quick = self.embed(place, 1e-12)?;
        if quick.center.im.abs() > quick.radius {
            return Ok(false);
        }
        let scaled = self * &self.field.from_rational(&BigRational::from_integer(self.den.clone()));
        let cp = scaled.charpoly();
        let sqf = poly::div_rem(&cp, &poly::gcd(&cp, &poly::derivative(&cp))).0;
        let ints: Vec<BigInt> = sqf.iter().map(|c| c.to_integer()).collect();
        if ints.len() == 2 {
            return Ok(true);
        }
        let disks = roots::isolate(&ints)?;
        let mut bits = 32u32;
        while bits <= 1024 {
            let disk = self.field.root_disk(place, bits)?;
            let (v, err) = scaled.eval_disk(&disk);
            let hits: Vec<&RootDisk> = disks
                .iter()
                .filter(|d| {
                    let r = &d.radius + &err;
                    d.center.sub(&v).norm_sq() <= &r * &r
                })
                .collect();
            if let [only] = hits.as_slice() {
                return Ok(only.is_real());
            }
            bits *= 2;
        }
        Err(FieldError::Undecidable(format!("realness of τ({self})")))
    }

    /// Coordinates as `"p/q"` strings (integers without a slash).
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs().iter().map(rational_to_string).collect()
    }

    pub fn from_strings(field: &Arc<NumberField>, items: &[String]) -> Result<NFElem, FieldError> {
        let coeffs = items.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
        field.elem(&coeffs)
    }

    /// Appends a self-delimiting byte encoding of the coordinates.
    pub fn write_key(&self, out: &mut Vec<u8>) {
        write_bigint(out, &self.den);
        for c in &self.num {
            write_bigint(out, c);
        }
    }
}

fn write_bigint(out: &mut Vec<u8>, x: &BigInt) {
    let (sign, bytes) = x.to_bytes_le();
    out.push(match sign {
        Sign::Minus => 0,
        Sign::NoSign => 1,
        Sign::Plus => 2,
    });
    out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    if sign != Sign::NoSign {
        out.extend_from_slice(&bytes);
    }
}

/// Nearest double and the exact conversion error.
pub fn rational_to_f64(q: &BigRational) -> (f64, BigRational) {
    let x = q.to_f64().unwrap_or(f64::NAN);
    let back = BigRational::from_float(x).unwrap_or_else(BigRational::zero);
    (x, (q - back).abs())
}

/// Smallest double that is `>= q` (q finite and nonnegative).
pub fn round_up(q: &BigRational) -> f64 {
    let x = q.to_f64().unwrap_or(f64::INFINITY);
    match BigRational::from_float(x) {
        Some(b) if b >= *q => x,
        _ => x.next_up(),
    }
}

pub fn rational_to_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, FieldError> {
    let s = s.trim();
    let parse_int =
        |t: &str| t.trim().parse::<BigInt>().map_err(|e| FieldError::Parse(format!("{t:?}: {e}")));
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(FieldError::Parse(format!("{s:?}: zero denominator")));
            }
            Ok(BigRational::new(parse_int(p)?, q))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

impl PartialEq for NFElem {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other) && self.den == other.den && self.num == other.num
    }
}

impl Eq for NFElem {}

impl Hash for NFElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Display for NFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs().iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            let body = match (i, mag.is_one()) {
                (0, _) => rational_to_string(&mag),
                (1, true) => "a".to_string(),
                (1, false) => format!("{}*a", rational_to_string(&mag)),
                (_, true) => format!("a^{i}"),
                (_, false) => format!("{}*a^{i}", rational_to_string(&mag)),
            };
            terms.push((sign, body));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (sign, body)) in terms.iter().enumerate() {
            match (k, *sign) {
                (0, "-") => write!(f, "-{body}")?,
                (0, _) => write!(f, "{body}")?,
                (_, s) => write!(f, " {s} {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for NFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NFElem({self})")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&NFElem> for &NFElem {
            type Output = NFElem;
            fn $method(self, rhs: &NFElem) -> NFElem {
                self.$checked(rhs).expect("number field mismatch")
            }
        }
        impl $tr<NFElem> for NFElem {
            type Output = NFElem;
            fn $method(self, rhs: NFElem) -> NFElem {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&NFElem> for NFElem {
            type Output = NFElem;
            fn $method(self, rhs: &NFElem) -> NFElem {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &NFElem {
    type Output = NFElem;
    fn neg(self) -> NFElem {
        NFElem { field: self.field.clone(), num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
}

impl Neg for NFElem {
    type Output = NFElem;
    fn neg(self) -> NFElem {
        -&self
    }
}

/// JSON form of a field: `{"minpoly": [c0, ..., 1]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldSpec {
    pub minpoly: Vec<i64>,
}

impl FieldSpec {
    pub fn build(&self) -> Result<Arc<NumberField>, FieldError> {
        NumberField::new(&self.minpoly)
    }

    pub fn of(field: &NumberField) -> Self {
        Self { minpoly: field.minpoly.iter().map(|c| c.to_i64().unwrap_or(i64::MAX)).collect() }
    }
}
