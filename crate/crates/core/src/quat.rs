//! Quaternion algebras `(a, b)_K` over a number field: `i² = a`, `j² = b`,
//! `k = ij = −ji`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qfield::{ComplexBall, FieldError, NFElem, NumberField, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuatError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("quaternion algebra parameters must be nonzero")]
    ZeroParameter,
    #[error("elements belong to different quaternion algebras")]
    AlgebraMismatch,
    #[error("order basis is not a basis of the algebra")]
    SingularBasis,
    #[error("square root of τ(a) undefined: the disk contains 0")]
    BadSplitting,
}

pub struct QuatAlgebra {
    field: Arc<NumberField>,
    a: NFElem,
    b: NFElem,
}

impl fmt::Debug for QuatAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuatAlgebra(({}, {}) over {:?})", self.a, self.b, self.field.minpoly())
    }
}

impl QuatAlgebra {
    pub fn new(a: NFElem, b: NFElem) -> Result<Arc<Self>, QuatError> {
        if a.is_zero() || b.is_zero() {
            return Err(QuatError::ZeroParameter);
        }
        if !a.same_field(&b) {
            return Err(FieldError::FieldMismatch.into());
        }
        Ok(Arc::new(Self { field: a.field().clone(), a, b }))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn a(&self) -> &NFElem {
        &self.a
    }

    pub fn b(&self) -> &NFElem {
        &self.b
    }

    pub fn elem(self: &Arc<Self>, t: NFElem, x: NFElem, y: NFElem, z: NFElem) -> Result<QuatElem, QuatError> {
        if ![&x, &y, &z].iter().all(|c| c.same_field(&t)) || !t.same_field(&self.a) {
            return Err(FieldError::FieldMismatch.into());
        }
        Ok(QuatElem { alg: self.clone(), c: [t, x, y, z] })
    }

    pub fn scalar(self: &Arc<Self>, t: NFElem) -> QuatElem {
        let z = self.field.zero();
        QuatElem { alg: self.clone(), c: [t, z.clone(), z.clone(), z] }
    }

    pub fn one(self: &Arc<Self>) -> QuatElem {
        self.scalar(self.field.one())
    }

    fn unit(self: &Arc<Self>, slot: usize) -> QuatElem {
        let mut u = self.scalar(self.field.zero());
        u.c[slot] = self.field.one();
        u
    }

    pub fn i(self: &Arc<Self>) -> QuatElem {
        self.unit(1)
    }

    pub fn j(self: &Arc<Self>) -> QuatElem {
        self.unit(2)
    }

    pub fn k(self: &Arc<Self>) -> QuatElem {
        self.unit(3)
    }

    fn same(self: &Arc<Self>, o: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, o) || (self.a == o.a && self.b == o.b)
    }
}

#[derive(Clone)]
pub struct QuatElem {
    alg: Arc<QuatAlgebra>,
    c: [NFElem; 4],
}

impl PartialEq for QuatElem {
    fn eq(&self, o: &Self) -> bool {
        self.alg.same(&o.alg) && self.c == o.c
    }
}

impl Eq for QuatElem {}

impl fmt::Debug for QuatElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i + ({})j + ({})k", self.c[0], self.c[1], self.c[2], self.c[3])
    }
}

impl QuatElem {
    pub fn algebra(&self) -> &Arc<QuatAlgebra> {
        &self.alg
    }

    /// Coordinates `(t, x, y, z)` on `1, i, j, k`.
    pub fn coords(&self) -> &[NFElem; 4] {
        &self.c
    }

    fn check(&self, o: &Self) -> Result<(), QuatError> {
        if self.alg.same(&o.alg) {
            Ok(())
        } else {
            Err(QuatError::AlgebraMismatch)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, QuatError> {
        self.check(o)?;
        Ok(Self { alg: self.alg.clone(), c: std::array::from_fn(|s| &self.c[s] + &o.c[s]) })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, QuatError> {
        self.check(o)?;
        Ok(Self { alg: self.alg.clone(), c: std::array::from_fn(|s| &self.c[s] - &o.c[s]) })
    }

    pub fn neg(&self) -> Self {
        Self { alg: self.alg.clone(), c: std::array::from_fn(|s| -&self.c[s]) }
    }

    pub fn scale(&self, k: &NFElem) -> Self {
        Self { alg: self.alg.clone(), c: std::array::from_fn(|s| &self.c[s] * k) }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, QuatError> {
        self.check(o)?;
        let (a, b) = (&self.alg.a, &self.alg.b);
        let ab = a * b;
        let [t1, x1, y1, z1] = &self.c;
        let [t2, x2, y2, z2] = &o.c;
        let t = t1 * t2 + a * &(x1 * x2) + b * &(y1 * y2) - &ab * &(z1 * z2);
        let x = t1 * x2 + x1 * t2 - b * &(y1 * z2) + b * &(z1 * y2);
        let y = t1 * y2 + y1 * t2 + a * &(x1 * z2) - a * &(z1 * x2);
        let z = t1 * z2 + z1 * t2 + x1 * y2 - y1 * x2;
        Ok(Self { alg: self.alg.clone(), c: [t, x, y, z] })
    }

    pub fn conj(&self) -> Self {
        let [t, x, y, z] = &self.c;
        Self { alg: self.alg.clone(), c: [t.clone(), -x, -y, -z] }
    }

    /// Reduced trace `2t`.
    pub fn trace(&self) -> NFElem {
        &self.c[0] + &self.c[0]
    }

    /// Reduced norm `t² − a x² − b y² + ab z²`.
    pub fn norm(&self) -> NFElem {
        let (a, b) = (&self.alg.a, &self.alg.b);
        let [t, x, y, z] = &self.c;
        t * t - a * &(x * x) - b * &(y * y) + &(a * b) * &(z * z)
    }

    pub fn inv(&self) -> Result<Self, QuatError> {
        let n = self.norm().inv()?;
        Ok(self.conj().scale(&n))
    }

    pub fn is_scalar(&self, k: i64) -> bool {
        self.c[0].is_int(k) && self.c[1..].iter().all(|c| c.is_zero())
    }

    /// Equal to `±1`, i.e. trivial in the projectivised unit group.
    pub fn is_pm_one(&self) -> bool {
        self.is_scalar(1) || self.is_scalar(-1)
    }

    /// `w(u) = val_π(n(u))`.
    pub fn w_valuation(&self, pi: &NFElem) -> Result<Valuation, QuatError> {
        Ok(self.norm().val_pi(pi)?)
    }

    /// Image in `M₂(ℂ)` at a complex place under `i ↦ diag(s, −s)`,
    /// `j ↦ [[0, 1], [τ(b), 0]]` with `s² = τ(a)`.
    pub fn embed_sl2(&self, place: usize, radius: f64) -> Result<[[ComplexBall; 2]; 2], QuatError> {
        let ev = |e: &NFElem| e.embed(place, radius).map(|v| v.ball());
        let s = ev(&self.alg.a)?.sqrt().ok_or(QuatError::BadSplitting)?;
        let tb = ev(&self.alg.b)?;
        let [t, x, y, z] = [ev(&self.c[0])?, ev(&self.c[1])?, ev(&self.c[2])?, ev(&self.c[3])?];
        let xs = x.mul(&s);
        let zs = z.mul(&s);
        Ok([[t.add(&xs), y.add(&zs)], [tb.mul(&y.sub(&zs)), t.sub(&xs)]])
    }

    pub fn to_json(&self) -> QuatElemJson {
        QuatElemJson(self.c.iter().map(|c| c.to_strings()).collect())
    }
}

/// Four coefficient arrays of `"p/q"` strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QuatElemJson(pub Vec<Vec<String>>);

impl QuatElemJson {
    pub fn build(&self, alg: &Arc<QuatAlgebra>) -> Result<QuatElem, QuatError> {
        if self.0.len() != 4 {
            return Err(FieldError::WrongLength { expected: 4, got: self.0.len() }.into());
        }
        let f = alg.field();
        let c: Vec<NFElem> = self.0.iter().map(|s| NFElem::from_strings(f, s)).collect::<Result<_, _>>()?;
        alg.elem(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QuatAlgebraJson {
    pub a: Vec<String>,
    pub b: Vec<String>,
}

impl QuatAlgebraJson {
    pub fn build(&self, field: &Arc<NumberField>) -> Result<Arc<QuatAlgebra>, QuatError> {
        QuatAlgebra::new(NFElem::from_strings(field, &self.a)?, NFElem::from_strings(field, &self.b)?)
    }
}

/// A ℤ_K-lattice of full rank given by four basis elements; membership is
/// decided by solving for coordinates over K and testing integrality.
#[derive(Clone, Debug)]
pub struct QuatOrder {
    basis: [QuatElem; 4],
    /// inverse of the 4×4 coordinate matrix (rows = basis elements)
    inv: Vec<Vec<NFElem>>,
}

impl QuatOrder {
    pub fn new(basis: [QuatElem; 4]) -> Result<Self, QuatError> {
        for b in &basis[1..] {
            basis[0].check(b)?;
        }
        let m: Vec<Vec<NFElem>> = basis.iter().map(|b| b.c.to_vec()).collect();
        let inv = nf_inverse(&m).ok_or(QuatError::SingularBasis)?;
        Ok(Self { basis, inv })
    }

    pub fn basis(&self) -> &[QuatElem; 4] {
        &self.basis
    }

    /// Coordinates of `u` in the order basis (over K).
    pub fn coordinates(&self, u: &QuatElem) -> Result<Vec<NFElem>, QuatError> {
        self.basis[0].check(u)?;
        // u = Σ λ_m basis_m  ⇔  coords(u) = λ · M  ⇔  λ = coords(u) · M⁻¹
        Ok((0..4)
            .map(|j| {
                (0..4).fold(u.alg.field.zero(), |acc, s| acc + &u.c[s] * &self.inv[s][j])
            })
            .collect())
    }

    pub fn contains(&self, u: &QuatElem) -> Result<bool, QuatError> {
        Ok(self.coordinates(u)?.iter().all(|c| c.is_integral()))
    }
}

/// Gauss–Jordan inverse of a square matrix over a number field.
pub fn nf_inverse(m: &[Vec<NFElem>]) -> Option<Vec<Vec<NFElem>>> {
    let n = m.len();
    let f = m.first()?.first()?.field().clone();
    let mut aug: Vec<Vec<NFElem>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !aug[r][c].is_zero())?;
        aug.swap(c, p);
        let inv = aug[c][c].inv().ok()?;
        for x in aug[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != c && !aug[r][c].is_zero() {
                let k = aug[r][c].clone();
                for j in 0..2 * n {
                    let t = &k * &aug[c][j];
                    aug[r][j] = &aug[r][j] - &t;
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn setup() -> (Arc<NumberField>, Arc<QuatAlgebra>) {
        let k = NumberField::new(&[-1, 1, 0, 1]).unwrap();
        let d = QuatAlgebra::new(k.from_int(-1), k.from_int(-3)).unwrap();
        (k, d)
    }

    #[test]
    fn basic_norms_and_anticommutation() {
        let (_, d) = setup();
        assert!(d.i().norm().is_int(1));
        assert!(d.j().norm().is_int(3));
        let ij = d.i().mul(&d.j()).unwrap();
        let ji = d.j().mul(&d.i()).unwrap();
        assert!(ij.add(&ji).unwrap().is_scalar(0));
        assert_eq!(ij, d.k());
        assert!(d.i().mul(&d.i()).unwrap().is_scalar(-1));
        assert!(d.j().mul(&d.j()).unwrap().is_scalar(-3));
    }

    #[test]
    fn w_of_pi_and_one() {
        let (k, d) = setup();
        let pi = k.elem_i64(&[1, 1]);
        assert_eq!(d.one().w_valuation(&pi).unwrap(), Valuation::Finite(0));
        assert_eq!(d.scalar(pi.clone()).w_valuation(&pi).unwrap(), Valuation::Finite(2));
    }

    #[test]
    fn embedding_is_multiplicative_on_samples() {
        let (k, d) = setup();
        let place = k.complex_place(0).unwrap();
        let u = d.elem(k.elem_i64(&[1, 2]), k.elem_i64(&[0, 1, -1]), k.from_int(3), k.elem_i64(&[2])).unwrap();
        let v = d.elem(k.elem_i64(&[-1]), k.elem_i64(&[1, 1]), k.elem_i64(&[0, 0, 1]), k.from_int(-1)).unwrap();
        let uv = u.mul(&v).unwrap().embed_sl2(place, 1e-12).unwrap();
        let (mu, mv) = (u.embed_sl2(place, 1e-12).unwrap(), v.embed_sl2(place, 1e-12).unwrap());
        for r in 0..2 {
            for c in 0..2 {
                let prod = mu[r][0].mul(&mv[0][c]).add(&mu[r][1].mul(&mv[1][c]));
                assert!((prod.center - uv[r][c].center).norm() <= prod.radius + uv[r][c].radius);
            }
        }
        let one = d.one().embed_sl2(place, 1e-12).unwrap();
        assert_eq!(one[0][0].center, Complex64::new(1.0, 0.0));
        assert!(one[0][1].radius < 1e-300 && one[0][1].center.norm() == 0.0);
    }

    #[test]
    fn order_membership() {
        let (_, d) = setup();
        let order = QuatOrder::new([d.one(), d.i(), d.j(), d.k()]).unwrap();
        assert!(order.contains(&d.i()).unwrap());
        let half = d.field().from_rational(&num_rational::BigRational::new(1.into(), 2.into()));
        assert!(!order.contains(&d.i().scale(&half)).unwrap());
        assert!(QuatOrder::new([d.one(), d.i(), d.i(), d.k()]).is_err());
    }
}
