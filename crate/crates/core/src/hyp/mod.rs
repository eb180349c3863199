//! Hyperbolic geometry: isometry classification from traces, translation
//! lengths, the Bowditch-type criteria for bisector separation, and ball
//! certificates for matrix groups acting on ℍ³.

pub mod halfspace;
pub mod proj;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linrep::{ball, Group, GroupDef, GroupError, Mat2};
use crate::qfield::{ComplexBall, FieldError, NFElem, RealInterval};

pub use halfspace::{
    bisector_separation_test, separation_witness, AxialForm, HPoint, Isometry, Mobius, SeparationReport, Witness,
};
pub use proj::{hyp_distance, trace_neg_check, DivAlg, ProjPoint, Quat};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypError {
    #[error("not an axial isometry: {0}")]
    NotAxial(String),
    #[error("no separation witness: {0}")]
    NoWitness(String),
    #[error("matrix does not have determinant 1")]
    NotSl2,
    #[error("decision undetermined at working precision: {0}")]
    Undecidable(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsometryKind {
    Identity,
    Elliptic,
    ParabolicUnipotent,
    ParabolicNonunipotent,
    Axial,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    /// Translation length `ℓ` (axial only).
    pub length: Option<RealInterval>,
    /// Rotation angle `θ ∈ (−π, π]` (axial only), sign fixed by `|λ| > 1`.
    pub angle: Option<f64>,
    /// `√(2 − 2 cos θ)`, the absolute rotation (axial only).
    pub rotation: Option<RealInterval>,
}

impl IsometryClass {
    fn plain(kind: IsometryKind) -> Self {
        Self { kind, length: None, angle: None, rotation: None }
    }
}

fn widen(x: RealInterval) -> RealInterval {
    let pad = |v: f64| 4.0 * f64::EPSILON * v.abs() + f64::MIN_POSITIVE;
    RealInterval::new(x.lo - pad(x.lo), x.hi + pad(x.hi))
}

/// `T(z) = Re(2 arcosh(z/2)) = 2 arcosh((|w+1| + |w−1|)/2)` with `w = z/2`,
/// evaluated over a disk of traces.
pub fn translation_length(tr: &ComplexBall) -> RealInterval {
    let w = tr.mul(&ComplexBall::real(0.5));
    let a = w.add(&ComplexBall::real(1.0)).abs();
    let b = w.sub(&ComplexBall::real(1.0)).abs();
    let lo = (0.5 * (a.lo + b.lo)).max(1.0);
    let hi = (0.5 * (a.hi + b.hi)).max(1.0);
    let out = widen(RealInterval::new(2.0 * lo.acosh(), 2.0 * hi.acosh()));
    RealInterval::new(out.lo.max(0.0), out.hi)
}

/// Eigenvalue `λ` with `|λ| ≥ 1` of a matrix with trace in `tr`.
fn eigen_ball(tr: &ComplexBall) -> Option<ComplexBall> {
    let w = tr.mul(&ComplexBall::real(0.5));
    let s = w.mul(&w).sub(&ComplexBall::real(1.0)).sqrt()?;
    let (l1, l2) = (w.add(&s), w.sub(&s));
    Some(if l1.center.norm() >= l2.center.norm() { l1 } else { l2 })
}

/// `√(2 − 2 cos θ) = 2|Im λ| / |λ|`; invariant under `λ ↦ λ⁻¹`.
fn rotation_interval(lambda: &ComplexBall) -> RealInterval {
    let im = lambda.im();
    let im_abs = if im.lo > 0.0 {
        RealInterval::new(im.lo, im.hi)
    } else if im.hi < 0.0 {
        RealInterval::new(-im.hi, -im.lo)
    } else {
        RealInterval::new(0.0, im.hi.max(-im.lo))
    };
    let m = lambda.abs();
    let hi = if m.lo > 0.0 { (2.0 * im_abs.hi / m.lo).min(2.0) } else { 2.0 };
    widen(RealInterval::new((2.0 * im_abs.lo / m.hi).min(2.0), hi))
}

fn normalize_angle(t: f64) -> f64 {
    use std::f64::consts::PI;
    let mut t = t % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

fn axial_class(tr: &ComplexBall) -> Result<IsometryClass, HypError> {
    let lambda = eigen_ball(tr).ok_or_else(|| HypError::Undecidable("trace too close to ±2".into()))?;
    Ok(IsometryClass {
        kind: IsometryKind::Axial,
        length: Some(translation_length(tr)),
        angle: Some(normalize_angle(2.0 * lambda.center.arg())),
        rotation: Some(rotation_interval(&lambda)),
    })
}

/// Class of a non-central element of SL₂(ℂ) with trace `tr`, at a complex (or real) place.
pub fn classify_trace(tr: &NFElem, place: usize) -> Result<IsometryClass, HypError> {
    if tr.is_int(2) || tr.is_int(-2) {
        return Ok(IsometryClass::plain(IsometryKind::ParabolicUnipotent));
    }
    if tr.is_real_at(place)? && tr.cmp_abs(place, &BigRational::from_integer(BigInt::from(2)))?.is_lt() {
        return Ok(IsometryClass::plain(IsometryKind::Elliptic));
    }
    axial_class(&tr.embed(place, 1e-14)?.ball())
}

/// Classification of `m ∈ SL₂(K)` acting on ℍ³ through a place of K.
pub fn classify_sl2(m: &Mat2, place: usize) -> Result<IsometryClass, HypError> {
    if !m.det().is_one() {
        return Err(HypError::NotSl2);
    }
    if m.is_scalar(1) || m.is_scalar(-1) {
        return Ok(IsometryClass::plain(IsometryKind::Identity));
    }
    classify_trace(&m.trace(), place)
}

/// `2 log(1 + √2) = arcosh 3` as a certified interval.
pub fn two_log_one_plus_sqrt2() -> RealInterval {
    let v = 2.0 * (1.0 + 2f64.sqrt()).ln();
    widen(widen(RealInterval::point(v)))
}

/// Bowditch's sufficient condition `ℓ > 2 log(1 + √2)`.
pub fn bowditch_basic(length: f64) -> bool {
    length > two_log_one_plus_sqrt2().hi
}

/// Interval version: `Some(true)` only when every point of `length` clears the bound.
pub fn bowditch_basic_interval(length: &RealInterval) -> Option<bool> {
    let c = two_log_one_plus_sqrt2();
    if length.lo > c.hi {
        Some(true)
    } else if length.hi <= c.lo {
        Some(false)
    } else {
        None
    }
}

/// `log k ≥ arcosh(1 + r_γ)`, i.e. `k ≥ 1 + r + √(r² + 2r)`.
pub fn bowditch_improved(g: &AxialForm) -> bool {
    let r = g.r_gamma();
    g.k >= improved_threshold(r)
}

/// `exp(arcosh(1 + r))`.
pub fn improved_threshold(r: f64) -> f64 {
    1.0 + r + (r * r + 2.0 * r).sqrt()
}

/// SL₂(ℂ) form of the criterion: `cosh ℓ ≥ 1 + √(2 − 2 cos θ)`.
pub fn bowditch_improved_sl2(length: f64, angle: f64) -> bool {
    length.cosh() >= 1.0 + (2.0 - 2.0 * angle.cos()).max(0.0).sqrt()
}

/// Certified evaluation of the SL₂(ℂ) criterion for an axial class; `None` if undecided.
pub fn bowditch_improved_class(class: &IsometryClass) -> Option<bool> {
    let (l, rot) = (class.length?, class.rotation?);
    let lo = l.lo.max(0.0).cosh() - 1.0 - rot.hi;
    let hi = l.hi.cosh() - 1.0 - rot.lo;
    let pad = 8.0 * f64::EPSILON * (1.0 + l.hi.cosh());
    if lo - pad >= 0.0 {
        Some(true)
    } else if hi + pad < 0.0 {
        Some(false)
    } else {
        None
    }
}

/// Groups whose elements have a trace in a number field (matrix trace or reduced trace).
pub trait TraceGroup: Group {
    fn trace(&self, a: &Self::Elem) -> NFElem;
    /// Whether `a` acts trivially on ℍ³ (e.g. `−I`).
    fn acts_trivially(&self, a: &Self::Elem) -> bool;
}

impl TraceGroup for GroupDef {
    fn trace(&self, a: &Mat2) -> NFElem {
        a.trace()
    }

    fn acts_trivially(&self, a: &Mat2) -> bool {
        a.is_scalar(1) || a.is_scalar(-1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    PassGlobal,
    PassUpToRadius,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Offender {
    pub word: String,
    pub trace: Vec<String>,
    pub class: IsometryClass,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceCheck {
    pub trace: Vec<String>,
    pub class: IsometryClass,
    pub satisfies: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub radius: usize,
    pub criterion: &'static str,
    pub checked: usize,
    /// The ball stopped growing, so it is the whole (finite) group.
    pub ball_closed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offender: Option<Offender>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_set: Option<Vec<TraceCheck>>,
    pub note: String,
}

fn obstruction(class: &IsometryClass) -> Result<Option<String>, HypError> {
    Ok(match class.kind {
        IsometryKind::Identity | IsometryKind::ParabolicUnipotent => None,
        IsometryKind::Elliptic => Some("elliptic element (torsion)".into()),
        IsometryKind::ParabolicNonunipotent => Some("non-unipotent parabolic".into()),
        IsometryKind::Axial => match bowditch_improved_class(class) {
            Some(true) => None,
            Some(false) => Some("axial element with min(γ) < arcosh(1 + r_γ)".into()),
            None => return Err(HypError::Undecidable("criterion at the boundary".into())),
        },
    })
}

/// Classifies every non-trivial element of the radius-`r` ball at `place`.
/// With a trace set covering all elements of translation length below
/// `arcosh 3` (as produced by a systole enumeration), a clean run is a
/// global certificate; otherwise it only covers the ball.
pub fn certify_ball<G: TraceGroup>(
    g: &G,
    radius: usize,
    place: usize,
    traces: Option<&[NFElem]>,
    cap: usize,
) -> Result<Certificate, HypError>
where
    G::Elem: Send + Sync,
{
    let b = ball(g, radius, cap)?;
    let closed = b.sphere_sizes.last().is_some_and(|&s| s == 0) || g.generators().is_empty();
    let elems: Vec<_> = b.set.iter().collect();
    let results: Vec<Result<Option<Offender>, HypError>> = elems
        .par_iter()
        .map(|e| {
            if g.is_identity(&e.value) {
                return Ok(None);
            }
            let tr = g.trace(&e.value);
            let word = e.word.clone().unwrap_or_default();
            if g.acts_trivially(&e.value) {
                return Ok(Some(Offender {
                    word,
                    trace: tr.to_strings(),
                    class: IsometryClass::plain(IsometryKind::Identity),
                    reason: "non-trivial element acting trivially (torsion)".into(),
                }));
            }
            let class = classify_trace(&tr, place)?;
            Ok(obstruction(&class)?.map(|reason| Offender { word, trace: tr.to_strings(), class, reason }))
        })
        .collect();
    let mut offender = None;
    for r in results {
        if let Some(o) = r? {
            offender = Some(o);
            break;
        }
    }
    let mut trace_set = None;
    let mut traces_ok = false;
    if let Some(ts) = traces {
        let mut checks = Vec::new();
        traces_ok = true;
        for t in ts {
            if t.is_int(2) || t.is_int(-2) {
                continue;
            }
            let class = classify_trace(t, place)?;
            let satisfies = obstruction(&class)?.is_none();
            traces_ok &= satisfies;
            checks.push(TraceCheck { trace: t.to_strings(), class, satisfies });
        }
        trace_set = Some(checks);
    }
    let (verdict, note) = if offender.is_some() {
        (Verdict::Fail, "obstruction found inside the ball".to_string())
    } else if traces.is_some() && !traces_ok {
        (Verdict::Fail, "a trace of the supplied short-geodesic set violates the criterion".to_string())
    } else if closed {
        (Verdict::PassGlobal, "the ball is the whole group".to_string())
    } else if traces_ok {
        (Verdict::PassGlobal, "all traces of translation length below arcosh 3 satisfy the criterion".to_string())
    } else {
        (
            Verdict::PassUpToRadius,
            format!("no obstruction up to radius {radius}; elements outside the ball are not covered"),
        )
    };
    Ok(Certificate {
        verdict,
        radius,
        criterion: "arcosh(1+r)",
        checked: b.set.len(),
        ball_closed: closed,
        offender,
        trace_set,
        note,
    })
}

/// Float SL₂(ℂ) image of a matrix at a place (centers only).
pub fn mobius_at(m: &Mat2, place: usize) -> Result<Mobius, HypError> {
    let c = |e: &NFElem| -> Result<Complex64, HypError> { Ok(e.embed(place, 1e-14)?.center) };
    Ok(Mobius::new(c(&m.0[0][0])?, c(&m.0[0][1])?, c(&m.0[1][0])?, c(&m.0[1][1])?))
}
