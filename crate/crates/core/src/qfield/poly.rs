//! Dense univariate polynomials over ℚ, coefficients stored low degree first.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QPoly = Vec<BigRational>;

pub fn from_ints(coeffs: &[BigInt]) -> QPoly {
    let mut p: QPoly = coeffs.iter().cloned().map(BigRational::from_integer).collect();
    trim(&mut p);
    p
}

pub fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Degree, with `None` for the zero polynomial.
pub fn degree(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn is_zero(p: &[BigRational]) -> bool {
    degree(p).is_none()
}

pub fn sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
        out.push(x - y);
    }
    trim(&mut out);
    out
}

pub fn mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if is_zero(a) || is_zero(b) {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub fn derivative(p: &[BigRational]) -> QPoly {
    let mut out: QPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    trim(&mut out);
    out
}

/// Euclidean division `a = q*b + r`, `deg r < deg b`. Panics on `b = 0`.
pub fn div_rem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let db = degree(b).expect("division by the zero polynomial");
    let mut r: QPoly = a.to_vec();
    trim(&mut r);
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lead;
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate().take(db + 1) {
            r[shift + i] -= &c * bc;
        }
        q[shift] = c;
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

/// Monic gcd (zero polynomial if both inputs vanish).
pub fn gcd(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut x: QPoly = a.to_vec();
    let mut y: QPoly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !is_zero(&y) {
        let (_, r) = div_rem(&x, &y);
        x = y;
        y = r;
    }
    make_monic(&mut x);
    x
}

pub fn make_monic(p: &mut QPoly) {
    if let Some(d) = degree(p) {
        let lead = p[d].clone();
        for c in p.iter_mut() {
            *c = &*c / &lead;
        }
    }
}

/// Returns `s` with `s*a ≡ g (mod m)` where `g = gcd(a, m)` is monic; `(g, s)`.
pub fn ext_gcd_inverse_part(a: &[BigRational], m: &[BigRational]) -> (QPoly, QPoly) {
    let mut r0: QPoly = m.to_vec();
    let mut r1: QPoly = a.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let mut s0: QPoly = Vec::new();
    let mut s1: QPoly = vec![BigRational::one()];
    while !is_zero(&r1) {
        let (q, r) = div_rem(&r0, &r1);
        let s2 = sub(&s0, &mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if let Some(d) = degree(&r0) {
        let lead = r0[d].clone();
        for c in r0.iter_mut().chain(s0.iter_mut()) {
            *c = &*c / &lead;
        }
    }
    (r0, s0)
}

/// Resultant `Res(f, g)` over ℚ by the Euclidean remainder sequence.
pub fn resultant(f: &[BigRational], g: &[BigRational]) -> BigRational {
    let (Some(df), Some(dg)) = (degree(f), degree(g)) else {
        return BigRational::zero();
    };
    if df == 0 {
        return pow(&f[0], dg);
    }
    if dg == 0 {
        return pow(&g[0], df);
    }
    // Res(f, g) = (-1)^{df*dg} Res(g, f) and Res(g, f) = lc(g)^{df - deg r} Res(g, r), r = f mod g.
    let (_, r) = div_rem(f, g);
    let Some(dr) = degree(&r) else {
        return BigRational::zero();
    };
    let mut out = pow(&g[dg], df - dr) * resultant(g, &r);
    if (df * dg) % 2 == 1 {
        out = -out;
    }
    out
}

pub fn pow(x: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Cauchy bound: every complex root has modulus below it.
pub fn cauchy_bound(monic: &[BigInt]) -> BigInt {
    let n = monic.len() - 1;
    let max = monic[..n].iter().map(|c| c.abs()).max().unwrap_or_default();
    max + BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> QPoly {
        let mut p: QPoly = v.iter().map(|&c| BigRational::from_integer(c.into())).collect();
        trim(&mut p);
        p
    }

    #[test]
    fn resultant_matches_norm_of_linear_poly() {
        // Res(x^3 + x - 1, x + 1) = N(α + 1) = 3
        assert_eq!(resultant(&q(&[-1, 1, 0, 1]), &q(&[1, 1])), BigRational::from_integer(3.into()));
        assert_eq!(resultant(&q(&[-1, 1, 0, 1]), &q(&[0, 1])), BigRational::one());
    }

    #[test]
    fn gcd_detects_repeated_root() {
        let f = q(&[1, -2, 1]);
        let g = gcd(&f, &derivative(&f));
        assert_eq!(degree(&g), Some(1));
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = q(&[3, 0, 2, 5, 1]);
        let b = q(&[1, 1, 2]);
        let (qq, r) = div_rem(&a, &b);
        let back = sub(&mul(&qq, &b), &sub(&Vec::new(), &r));
        assert_eq!(back, a);
    }
}
