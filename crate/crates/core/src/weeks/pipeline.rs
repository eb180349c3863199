//! Ravel search in the fundamental group of the Weeks manifold.

use serde::Serialize;

use super::WeeksError;
use crate::linrep::{ball, Group, GroupDef, Mat2};
use crate::qfield::NumberField;
use crate::ravel;

/// `x⁶ + 2x⁴ − x³ + 2x² + 1`, low degree first.
pub const WEEKS_MINPOLY: [i64; 7] = [1, 0, 2, -1, 2, 0, 1];
pub const WEEKS_RELATORS: [&str; 2] = ["aabbaaBaB", "aabbAbAbb"];

/// Index of the complex place giving the discrete faithful representation.
pub const WEEKS_PLACE: usize = 0;

pub fn weeks_group() -> GroupDef {
    let k = NumberField::new(&WEEKS_MINPOLY).expect("irreducible sextic");
    let x = k.gen();
    let x_inv = x.inv().expect("x is a unit");
    let a = Mat2([[x.clone(), k.one()], [k.zero(), x_inv.clone()]]);
    let lower = &k.from_int(2) - &(&x + &x_inv);
    let b = Mat2([[x, k.zero()], [lower, x_inv]]);
    let rels = WEEKS_RELATORS.iter().map(|s| s.to_string()).collect();
    GroupDef::new(k, vec![('a', a), ('b', b)], true, rels).expect("unimodular generators")
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalRavel {
    pub size: usize,
    pub words: Vec<String>,
    pub deletion_minimal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeeksReport {
    pub radius: usize,
    pub relators_verified: bool,
    pub ball_size: usize,
    pub sphere_sizes: Vec<usize>,
    pub ravel_size: usize,
    /// Every element of the ravel was re-checked to be non-extremal.
    pub ravel_verified: bool,
    pub ravel_words: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal: Option<MinimalRavel>,
}

pub fn weeks_pipeline(radius: usize, minimal: bool, cap: usize) -> Result<WeeksReport, WeeksError> {
    if radius == 0 {
        return Err(WeeksError::Malformed("radius must be at least 1".into()));
    }
    let g = weeks_group();
    g.check_relators()?;
    let b = ball(&g, radius, cap)?;
    let found = ravel::find_ravel(&g, &b.set);
    let ravel_verified = !found.is_empty() && ravel::count_extremal(&g, &found) == 0;
    let minimal = if minimal && !found.is_empty() {
        let m = ravel::min_ravel(&g, &found).map_err(|e| WeeksError::Malformed(e.to_string()))?;
        Some(MinimalRavel { size: m.len(), deletion_minimal: ravel::is_deletion_minimal(&g, &m), words: m.words() })
    } else {
        None
    };
    debug_assert!(found.iter().all(|e| g.eval_word(e.word.as_deref().unwrap_or("")).is_ok()));
    Ok(WeeksReport {
        radius,
        relators_verified: true,
        ball_size: b.set.len(),
        sphere_sizes: b.sphere_sizes,
        ravel_size: found.len(),
        ravel_verified,
        ravel_words: found.words(),
        minimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linrep::MAX_BALL;

    #[test]
    fn relators_are_identity() {
        let g = weeks_group();
        for r in WEEKS_RELATORS {
            assert!(g.eval_word(r).unwrap().is_scalar(1), "{r}");
        }
        assert!(!g.is_trivial_elem(&g.eval_word("aaBaabbAbb").unwrap()));
    }

    #[test]
    fn small_radii_have_no_ravel() {
        for r in 1..=3 {
            let rep = weeks_pipeline(r, false, MAX_BALL).unwrap();
            assert_eq!(rep.ravel_size, 0, "radius {r}");
        }
        assert_eq!(weeks_pipeline(1, false, MAX_BALL).unwrap().ball_size, 5);
    }
}
