//! Short-geodesic trace enumeration for `N`: every trace of translation
//! length below `arcosh 3` is of the form `c₀ + c₁α + c₂α²` with small
//! coefficients, so a finite box search finds them all.

use nalgebra::{Matrix3, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::appendix::AppendixGroup;
use super::WeeksError;
use crate::hyp::{translation_length, two_log_one_plus_sqrt2};
use crate::qfield::{NFElem, RealInterval};

/// Bound on `c₀² + c₁² + c₂²`.
pub const COEFF_BOUND: i64 = 36;

#[derive(Clone, Debug, Serialize)]
pub struct TraceLength {
    pub trace: Vec<String>,
    pub length: RealInterval,
}

#[derive(Clone, Debug, Serialize)]
pub struct SystoleReport {
    pub triples: usize,
    /// Survivors of the three filters, as power-basis coefficients.
    pub traces: Vec<Vec<String>>,
    /// Translation lengths of the non-parabolic survivors, shortest first.
    pub lengths: Vec<TraceLength>,
    pub systole: Option<RealInterval>,
    pub threshold: RealInterval,
    /// The systole interval lies strictly above `2 log(1 + √2)`.
    pub certified: bool,
    /// Eigenvalues of the Minkowski form `τ_ℝ² + 2|τ_ℂ|²` on `{1, α, α²}`.
    pub gram_eigenvalues: [f64; 3],
    /// The smallest eigenvalue is at least 1, so the coefficient box contains
    /// every element with `τ_ℝ² + 2|τ_ℂ|² ≤ 36`.
    pub box_valid: bool,
    #[serde(skip)]
    pub trace_elems: Vec<NFElem>,
}

fn minkowski_gram(g: &AppendixGroup) -> Result<[f64; 3], WeeksError> {
    let k = &g.field;
    let real = k.real_place(0)?;
    let cplx = k.complex_place(0)?;
    let powers: Vec<NFElem> = (0..3).map(|i| g.alpha().pow(i).expect("nonnegative power")).collect();
    let ev = |e: &NFElem, p: usize| e.embed(p, 1e-15).map(|v| v.center);
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let (ri, rj) = (ev(&powers[i], real)?, ev(&powers[j], real)?);
            let (ci, cj) = (ev(&powers[i], cplx)?, ev(&powers[j], cplx)?);
            m[(i, j)] = ri.re * rj.re + 2.0 * (ci * cj.conj()).re;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok([ev[0], ev[1], ev[2]])
}

pub fn systole_enumeration(g: &AppendixGroup) -> Result<SystoleReport, WeeksError> {
    let k = &g.field;
    let real = k.real_place(0)?;
    let cplx = k.complex_place(0)?;
    let r = (COEFF_BOUND as f64).sqrt() as i64;
    let mut triples = Vec::new();
    for c0 in -r..=r {
        for c1 in -r..=r {
            for c2 in -r..=r {
                if c0 * c0 + c1 * c1 + c2 * c2 <= COEFF_BOUND {
                    triples.push([c0, c1, c2]);
                }
            }
        }
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let four = BigRational::from_integer(BigInt::from(4));
    let two_k = k.from_int(2);
    let kept: Vec<Option<NFElem>> = triples
        .par_iter()
        .map(|c| {
            let t = k.elem_i64(c);
            if !(&t - &two_k).val_pi(&g.pi)?.at_least(3) {
                return Ok(None);
            }
            if t.cmp_abs(real, &two)?.is_gt() || t.cmp_abs(cplx, &four)?.is_gt() {
                return Ok(None);
            }
            Ok(Some(t))
        })
        .collect::<Result<_, WeeksError>>()?;
    let trace_elems: Vec<NFElem> = kept.into_iter().flatten().collect();

    let mut lengths = Vec::new();
    for t in &trace_elems {
        if t.is_int(2) || t.is_int(-2) {
            continue;
        }
        let length = translation_length(&t.embed(cplx, 1e-15)?.ball());
        lengths.push(TraceLength { trace: t.to_strings(), length });
    }
    lengths.sort_by(|a, b| a.length.lo.total_cmp(&b.length.lo));
    let systole = lengths.first().map(|l| l.length);
    let threshold = two_log_one_plus_sqrt2();
    let certified = systole.is_some_and(|s| s.strictly_above(&threshold));
    let gram_eigenvalues = minkowski_gram(g)?;
    Ok(SystoleReport {
        triples: triples.len(),
        traces: trace_elems.iter().map(NFElem::to_strings).collect(),
        lengths,
        systole,
        threshold,
        certified,
        box_valid: gram_eigenvalues[0] >= 1.0,
        gram_eigenvalues,
        trace_elems,
    })
}
