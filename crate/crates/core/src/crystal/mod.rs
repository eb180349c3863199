//! Crystallographic groups acting on ℚⁿ ⊂ ℝⁿ by rational affine maps.
//!
//! A group is given by generators; the point group, a transversal of lifts
//! and the translation lattice are computed exactly at construction.

pub mod finite;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::linalg::{self, q, QMat, QVec};
use crate::linrep::{ElementSet, Group};
use crate::qfield::{parse_rational, rational_to_string};
use crate::ravel;

pub use finite::{FiniteGroup, FiniteGroupJson, HolonomyClass};

/// Upper bound on lattice points examined by a single `ball_at`.
pub const MAX_BOX: usize = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrystalError {
    #[error("invalid multiplication table: {0}")]
    BadTable(String),
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("{p} does not divide the group order {order}")]
    PrimeDoesNotDivide { p: usize, order: usize },
    #[error("trivial holonomy (a lattice group; conventionally diffuse)")]
    TrivialGroup,
    #[error("malformed crystallographic group: {0}")]
    Malformed(String),
    #[error("gram matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("generator {0} does not preserve the gram form")]
    NotIsometry(usize),
    #[error("point group is infinite or larger than {0}")]
    InfinitePointGroup(usize),
    #[error("translation lattice has rank {rank} < {dim}")]
    LatticeNotFullRank { rank: usize, dim: usize },
    #[error("conjugation does not preserve the translation lattice")]
    LatticeNotInvariant,
    #[error("first Betti number is {0} > 0; no ravel is guaranteed")]
    PositiveBetti(usize),
    #[error("no ravel found up to radius {0}")]
    RadiusExceeded(String),
    #[error("enumeration exceeds {0} lattice points")]
    ResourceLimit(usize),
    #[error("radius must be nonnegative")]
    NegativeRadius,
    #[error("group has torsion")]
    Torsion,
}

/// `x ↦ linear·x + translation`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineIso {
    pub linear: QMat,
    pub translation: QVec,
}

impl AffineIso {
    pub fn identity(n: usize) -> Self {
        Self { linear: linalg::identity(n), translation: vec![q(0); n] }
    }

    pub fn translation(t: QVec) -> Self {
        Self { linear: linalg::identity(t.len()), translation: t }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &Self) -> Self {
        Self {
            linear: linalg::mat_mul(&self.linear, &o.linear),
            translation: linalg::vec_add(&linalg::mat_vec(&self.linear, &o.translation), &self.translation),
        }
    }

    pub fn inverse(&self) -> Self {
        let inv = linalg::inverse(&self.linear).expect("isometries are invertible");
        let t = linalg::mat_vec(&inv, &self.translation).into_iter().map(|x| -x).collect();
        Self { linear: inv, translation: t }
    }

    pub fn apply(&self, x: &[BigRational]) -> QVec {
        linalg::vec_add(&linalg::mat_vec(&self.linear, x), &self.translation)
    }

    pub fn is_translation(&self) -> bool {
        self.linear == linalg::identity(self.dim())
    }

    fn write_key(&self, out: &mut Vec<u8>) {
        for x in self.linear.iter().flatten().chain(&self.translation) {
            out.extend_from_slice(rational_to_string(x).as_bytes());
            out.push(b',');
        }
    }

    pub fn to_json(&self) -> AffineJson {
        AffineJson {
            linear: self.linear.iter().map(|r| r.iter().map(|x| Value::String(rational_to_string(x))).collect()).collect(),
            translation: self.translation.iter().map(|x| Value::String(rational_to_string(x))).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AffineJson {
    pub linear: Vec<Vec<Value>>,
    pub translation: Vec<Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CrystGroupJson {
    pub dim: usize,
    pub gram: Vec<Vec<Value>>,
    pub generators: Vec<AffineJson>,
}

fn parse_q(v: &Value) -> Result<BigRational, CrystalError> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| CrystalError::Malformed(e.to_string())),
        Value::Number(n) => n
            .as_i64()
            .map(q)
            .ok_or_else(|| CrystalError::Malformed(format!("non-integer number {n}; write fractions as strings"))),
        other => Err(CrystalError::Malformed(format!("expected a rational, got {other}"))),
    }
}

fn parse_mat(rows: &[Vec<Value>], n: usize) -> Result<QMat, CrystalError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CrystalError::Malformed(format!("expected a {n}×{n} matrix")));
    }
    rows.iter().map(|r| r.iter().map(parse_q).collect()).collect()
}

fn parse_vec(v: &[Value], n: usize) -> Result<QVec, CrystalError> {
    if v.len() != n {
        return Err(CrystalError::Malformed(format!("expected a vector of length {n}")));
    }
    v.iter().map(parse_q).collect()
}

/// Symmetric with all pivots of symmetric Gaussian elimination positive.
pub fn is_positive_definite(g: &QMat) -> bool {
    let n = g.len();
    if g.iter().any(|r| r.len() != n) || linalg::transpose(g) != *g {
        return false;
    }
    let mut m = g.clone();
    for k in 0..n {
        if !m[k][k].is_positive() {
            return false;
        }
        for i in k + 1..n {
            let f = &m[i][k] / &m[k][k];
            for j in k..n {
                let t = &f * &m[k][j];
                m[i][j] -= t;
            }
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct CrystGroup {
    dim: usize,
    gram: QMat,
    generators: Vec<AffineIso>,
    /// HNF basis rows of the translation subgroup.
    lattice: Vec<QVec>,
    /// Point group elements; index 0 is the identity.
    point_group: Vec<QMat>,
    /// `lifts[i]` is an element of the group with linear part `point_group[i]`.
    lifts: Vec<AffineIso>,
    table: Vec<Vec<usize>>,
}

impl CrystGroup {
    pub fn new(dim: usize, gram: QMat, generators: Vec<AffineIso>) -> Result<Self, CrystalError> {
        if dim == 0 || gram.len() != dim || !is_positive_definite(&gram) {
            return Err(CrystalError::NotPositiveDefinite);
        }
        if generators.is_empty() || generators.len() > 26 {
            return Err(CrystalError::Malformed("need between 1 and 26 generators".into()));
        }
        for (i, s) in generators.iter().enumerate() {
            if s.linear.len() != dim || s.linear.iter().any(|r| r.len() != dim) || s.dim() != dim {
                return Err(CrystalError::Malformed(format!("generator {i} has the wrong shape")));
            }
            let pulled = linalg::mat_mul(&linalg::transpose(&s.linear), &linalg::mat_mul(&gram, &s.linear));
            if pulled != gram {
                return Err(CrystalError::NotIsometry(i));
            }
        }

        // point group with a transversal of lifts, by breadth-first closure
        let mut point_group = vec![linalg::identity(dim)];
        let mut lifts = vec![AffineIso::identity(dim)];
        let mut index: HashMap<QMat, usize> = HashMap::from([(point_group[0].clone(), 0)]);
        let mut i = 0;
        while i < point_group.len() {
            for s in &generators {
                let next = lifts[i].compose(s);
                if !index.contains_key(&next.linear) {
                    if point_group.len() >= finite::MAX_ORDER {
                        return Err(CrystalError::InfinitePointGroup(finite::MAX_ORDER));
                    }
                    index.insert(next.linear.clone(), point_group.len());
                    point_group.push(next.linear.clone());
                    lifts.push(next);
                }
            }
            i += 1;
        }

        // Schreier generators of the translation subgroup
        let mut translations = Vec::new();
        for (p, lift) in lifts.iter().enumerate() {
            for s in &generators {
                let ps = lift.compose(s);
                let target = &lifts[index[&ps.linear]];
                let t = ps.compose(&target.inverse());
                debug_assert!(t.is_translation() && index[&ps.linear] < lifts.len() && p < lifts.len());
                translations.push(t.translation);
            }
        }
        let lattice = linalg::lattice_basis(&translations);
        if lattice.len() < dim {
            return Err(CrystalError::LatticeNotFullRank { rank: lattice.len(), dim });
        }
        for s in &generators {
            for b in &lattice {
                if !linalg::in_lattice(&lattice, &linalg::mat_vec(&s.linear, b)) {
                    return Err(CrystalError::LatticeNotInvariant);
                }
            }
        }

        let table = point_group
            .iter()
            .map(|a| point_group.iter().map(|b| index[&linalg::mat_mul(a, b)]).collect())
            .collect();
        Ok(Self { dim, gram, generators, lattice, point_group, lifts, table })
    }

    pub fn from_json(v: &CrystGroupJson) -> Result<Self, CrystalError> {
        let gram = parse_mat(&v.gram, v.dim)?;
        let generators = v
            .generators
            .iter()
            .map(|g| Ok(AffineIso { linear: parse_mat(&g.linear, v.dim)?, translation: parse_vec(&g.translation, v.dim)? }))
            .collect::<Result<_, CrystalError>>()?;
        Self::new(v.dim, gram, generators)
    }

    pub fn to_json(&self) -> CrystGroupJson {
        CrystGroupJson {
            dim: self.dim,
            gram: self.gram.iter().map(|r| r.iter().map(|x| Value::String(rational_to_string(x))).collect()).collect(),
            generators: self.generators.iter().map(AffineIso::to_json).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &QMat {
        &self.gram
    }

    pub fn lattice(&self) -> &[QVec] {
        &self.lattice
    }

    pub fn point_group(&self) -> &[QMat] {
        &self.point_group
    }

    pub fn lifts(&self) -> &[AffineIso] {
        &self.lifts
    }

    pub fn holonomy(&self) -> FiniteGroup {
        FiniteGroup::from_table(self.table.clone()).expect("point group table is a group table")
    }

    /// Dimension of the space of vectors fixed by the whole point group.
    pub fn betti1(&self) -> usize {
        let n = self.dim;
        let stacked: QMat = self
            .point_group
            .iter()
            .flat_map(|m| linalg::mat_sub(m, &linalg::identity(n)))
            .collect();
        n - linalg::rank(&stacked)
    }

    /// The lift of point-group element `i` has a fixed point modulo the lattice
    /// iff `t + λ ∈ im(M − I)` for some lattice vector `λ`.
    fn lift_has_fixed_point(&self, i: usize) -> bool {
        let n = self.dim;
        let m = linalg::mat_sub(&self.point_group[i], &linalg::identity(n));
        // rows spanning the annihilator of im(M − I)
        let annihilator = linalg::kernel(&linalg::transpose(&m), n);
        if annihilator.is_empty() {
            return true;
        }
        let project = |v: &[BigRational]| -> QVec {
            annihilator.iter().map(|u| u.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
        };
        let image = linalg::lattice_basis(&self.lattice.iter().map(|b| project(b)).collect::<Vec<_>>());
        let target: QVec = project(&self.lifts[i].translation).into_iter().map(|x| -x).collect();
        if target.iter().all(Zero::is_zero) {
            return true;
        }
        !image.is_empty() && linalg::in_lattice(&image, &target)
    }

    /// No nontrivial element of finite order (Bieberbach).
    pub fn is_torsion_free(&self) -> bool {
        (1..self.point_group.len()).all(|i| !self.lift_has_fixed_point(i))
    }

    /// `{γ : ‖γe − e‖ ≤ r}` in the gram norm, compared exactly as squares.
    pub fn ball_at(&self, e: &[BigRational], r: &BigRational) -> Result<ElementSet<AffineIso>, CrystalError> {
        if r.is_negative() {
            return Err(CrystalError::NegativeRadius);
        }
        if e.len() != self.dim {
            return Err(CrystalError::Malformed(format!("base point must have length {}", self.dim)));
        }
        let n = self.dim;
        let r2 = r * r;
        let bt = linalg::transpose(&self.lattice);
        let bt_inv = linalg::inverse(&bt).expect("lattice basis is full rank");
        let h = linalg::mat_mul(&self.lattice, &linalg::mat_mul(&self.gram, &bt));
        let h_inv = linalg::inverse(&h).expect("lattice gram is definite");
        let rf = r.to_f64().unwrap_or(f64::INFINITY);
        let widths: Vec<f64> = (0..n).map(|i| rf * h_inv[i][i].to_f64().unwrap_or(f64::INFINITY).sqrt() + 1e-9).collect();

        let per_coset: Vec<Result<Vec<AffineIso>, CrystalError>> = self
            .lifts
            .par_iter()
            .map(|lift| {
                // γe − e = u + λ with u = Me + t − e
                let u = linalg::vec_sub(&lift.apply(e), e);
                let c0: Vec<f64> = linalg::mat_vec(&bt_inv, &u).iter().map(|x| -x.to_f64().unwrap_or(0.0)).collect();
                let lo: Vec<i64> = (0..n).map(|i| (c0[i] - widths[i]).floor() as i64).collect();
                let hi: Vec<i64> = (0..n).map(|i| (c0[i] + widths[i]).ceil() as i64).collect();
                let count = lo.iter().zip(&hi).fold(1f64, |acc, (a, b)| acc * ((b - a + 1) as f64));
                if count > MAX_BOX as f64 {
                    return Err(CrystalError::ResourceLimit(MAX_BOX));
                }
                let mut out = Vec::new();
                let mut c = lo.clone();
                loop {
                    let lambda: QVec = linalg::mat_vec(&bt, &c.iter().map(|&k| q(k)).collect::<Vec<_>>());
                    let moved = linalg::vec_add(&u, &lambda);
                    if linalg::quad_form(&self.gram, &moved) <= r2 {
                        out.push(AffineIso {
                            linear: lift.linear.clone(),
                            translation: linalg::vec_add(&lift.translation, &lambda),
                        });
                    }
                    // odometer over the box
                    let mut k = n;
                    loop {
                        if k == 0 {
                            return Ok(out);
                        }
                        k -= 1;
                        if c[k] < hi[k] {
                            c[k] += 1;
                            break;
                        }
                        c[k] = lo[k];
                    }
                }
            })
            .collect();
        let mut set = ElementSet::new();
        for coset in per_coset {
            for g in coset? {
                set.insert(self, g, None);
            }
        }
        Ok(set)
    }

    /// Twice the half-diagonal of the fundamental parallelepiped, rounded up
    /// to a multiple of 1/1000.
    pub fn default_start_radius(&self) -> BigRational {
        let sum: f64 = self.lattice.iter().map(|b| linalg::quad_form(&self.gram, b).to_f64().unwrap_or(0.0)).sum();
        BigRational::new(BigInt::from((sum.sqrt() * 1000.0).ceil() as i64), BigInt::from(1000))
    }

    /// Grows `ball_at(e, r)` from `r0`, doubling, until it contains a ravel.
    pub fn construct_ravel(
        &self,
        e: &[BigRational],
        r0: Option<BigRational>,
        r_max: &BigRational,
    ) -> Result<CrystalRavel, CrystalError> {
        let b = self.betti1();
        if b > 0 {
            return Err(CrystalError::PositiveBetti(b));
        }
        let start = self.default_start_radius();
        let mut r = r0.unwrap_or_else(|| start.clone());
        let mut attempts = Vec::new();
        while &r <= r_max {
            let ball = self.ball_at(e, &r)?;
            let found = ravel::find_ravel(self, &ball);
            attempts.push((rational_to_string(&r), ball.len()));
            if !found.is_empty() {
                return Ok(CrystalRavel { radius: r, ball_size: ball.len(), ravel: found, attempts });
            }
            r = if r.is_zero() { start.clone() } else { &r * q(2) };
        }
        Err(CrystalError::RadiusExceeded(rational_to_string(r_max)))
    }
}

#[derive(Clone, Debug)]
pub struct CrystalRavel {
    pub radius: BigRational,
    pub ball_size: usize,
    pub ravel: ElementSet<AffineIso>,
    /// `(radius, ball size)` for every radius tried.
    pub attempts: Vec<(String, usize)>,
}

impl Group for CrystGroup {
    type Elem = AffineIso;

    fn identity(&self) -> AffineIso {
        AffineIso::identity(self.dim)
    }

    fn mul(&self, a: &AffineIso, b: &AffineIso) -> AffineIso {
        a.compose(b)
    }

    fn inv(&self, a: &AffineIso) -> AffineIso {
        a.inverse()
    }

    fn key(&self, a: &AffineIso) -> Vec<u8> {
        let mut out = Vec::new();
        a.write_key(&mut out);
        out
    }

    fn generators(&self) -> Vec<(char, AffineIso)> {
        self.generators.iter().enumerate().map(|(i, g)| ((b'a' + i as u8) as char, g.clone())).collect()
    }
}

fn diag(d: &[i64]) -> QMat {
    let n = d.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { q(d[i]) } else { q(0) }).collect()).collect()
}

fn half(k: i64) -> BigRational {
    BigRational::new(BigInt::from(k), BigInt::from(2))
}

/// The Hantzsche–Wendt group: generated by two screw motions, holonomy
/// `(ℤ/2)²`, torsion-free, with vanishing first Betti number.
pub fn promislow_group() -> CrystGroup {
    let alpha = AffineIso { linear: diag(&[1, -1, -1]), translation: vec![half(1), half(1), half(0)] };
    let beta = AffineIso { linear: diag(&[-1, 1, -1]), translation: vec![half(0), half(1), half(1)] };
    let g = CrystGroup::new(3, linalg::identity(3), vec![alpha, beta]).expect("valid crystallographic group");
    assert!(g.is_torsion_free(), "Hantzsche–Wendt group is torsion-free");
    assert_eq!(g.betti1(), 0);
    let h = g.holonomy();
    assert!(h.order() == 4 && h.exponent_bound() == 2);
    g
}

/// `ℤⁿ` acting by unit translations.
pub fn lattice_group(n: usize) -> CrystGroup {
    let gens = (0..n)
        .map(|i| AffineIso::translation((0..n).map(|j| if i == j { q(1) } else { q(0) }).collect()))
        .collect();
    CrystGroup::new(n, linalg::identity(n), gens).expect("ℤⁿ is crystallographic")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin(n: usize) -> QVec {
        vec![q(0); n]
    }

    #[test]
    fn lattice_group_basics() {
        let z3 = lattice_group(3);
        assert_eq!(z3.betti1(), 3);
        assert!(z3.is_torsion_free());
        assert_eq!(z3.holonomy().order(), 1);
        let z2 = lattice_group(2);
        assert_eq!(z2.ball_at(&origin(2), &q(1)).unwrap().len(), 5);
        assert_eq!(z2.ball_at(&origin(2), &q(0)).unwrap().len(), 1);
    }

    #[test]
    fn klein_bottle_group() {
        // glide reflection plus a vertical translation
        let glide = AffineIso { linear: diag(&[1, -1]), translation: vec![half(1), q(0)] };
        let up = AffineIso::translation(vec![q(0), q(1)]);
        let g = CrystGroup::new(2, linalg::identity(2), vec![glide, up]).unwrap();
        assert_eq!(g.betti1(), 1);
        assert!(g.is_torsion_free());
        assert_eq!(g.lattice(), &[vec![q(1), q(0)], vec![q(0), q(1)]]);
        assert_eq!(g.construct_ravel(&origin(2), None, &q(64)).unwrap_err(), CrystalError::PositiveBetti(1));
    }

    #[test]
    fn promislow_properties() {
        let g = promislow_group();
        assert_eq!(g.lattice(), linalg::identity(3).as_slice());
        assert_eq!(g.holonomy().holonomy_class().unwrap(), HolonomyClass::Mixed);
        assert_eq!(g.ball_at(&origin(3), &q(1)).unwrap().len(), 19);
        let found = g.construct_ravel(&origin(3), None, &q(64)).unwrap();
        assert!(ravel::is_ravel(&g, &found.ravel));
    }

    #[test]
    fn torsion_detected() {
        // p2: translations plus the half-turn about the origin
        let half_turn = AffineIso { linear: diag(&[-1, -1]), translation: origin(2) };
        let g = CrystGroup::new(
            2,
            linalg::identity(2),
            vec![AffineIso::translation(vec![q(1), q(0)]), AffineIso::translation(vec![q(0), q(1)]), half_turn.clone()],
        )
        .unwrap();
        assert!(!g.is_torsion_free());
        assert_eq!(g.betti1(), 0);
        let found = g.construct_ravel(&origin(2), Some(q(0)), &q(8)).unwrap();
        assert_eq!(found.ravel.len(), 2);
        assert!(found.ravel.contains(&g, &half_turn));
    }

    #[test]
    fn rejects_non_isometry_and_rank_deficiency() {
        let shear = AffineIso { linear: vec![vec![q(1), q(1)], vec![q(0), q(1)]], translation: origin(2) };
        assert_eq!(CrystGroup::new(2, linalg::identity(2), vec![shear]).unwrap_err(), CrystalError::NotIsometry(0));
        let t = AffineIso::translation(vec![q(1), q(0)]);
        assert!(matches!(
            CrystGroup::new(2, linalg::identity(2), vec![t]).unwrap_err(),
            CrystalError::LatticeNotFullRank { rank: 1, dim: 2 }
        ));
    }

    #[test]
    fn json_roundtrip() {
        let g = promislow_group();
        let back = CrystGroup::from_json(&g.to_json()).unwrap();
        assert_eq!(back.lattice(), g.lattice());
        assert_eq!(back.point_group().len(), 4);
    }

    #[test]
    fn positive_definiteness() {
        assert!(is_positive_definite(&vec![vec![q(2), q(1)], vec![q(1), q(2)]]));
        assert!(!is_positive_definite(&vec![vec![q(1), q(2)], vec![q(2), q(1)]]));
        assert!(!is_positive_definite(&vec![vec![q(1), q(1)], vec![q(0), q(1)]]));
    }
}
