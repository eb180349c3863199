//! The quaternion generators `ā, b̄`, the derived letters, relator checks and
//! the level-`π³` congruence.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Letters, QuatGroup, WeeksError};
use crate::linrep::invert_word;
use crate::qfield::{NFElem, NumberField, Valuation};
use crate::quat::{QuatAlgebra, QuatElem, QuatOrder};

/// Minimal polynomial of `α`, low degree first.
pub const ALPHA_MINPOLY: [i64; 4] = [-1, 1, 0, 1];

/// Derived letters as words in `a, b`.
pub const LETTERS: [(char, &str); 9] = [
    ('c', "aaa"),
    ('d', "bbb"),
    ('e', "baBA"),
    ('f', "bABa"),
    ('g', "aBABB"),
    ('h', "abbAb"),
    ('n', "aBBAB"),
    ('m', "aBaab"),
    ('v', "ABAAb"),
];

/// Presentation of the lattice generated by `ā, b̄`.
pub const LAMBDA_RELATORS: [&str; 2] = ["aaBaabbAbb", "abbAbAAbAbb"];

/// Relators of the index-finite subgroup generated by `c, d, e, f`.
pub const GAMMA_RELATORS: [&str; 4] =
    ["DefDeceFdFcFe", "DeceDecDCEfCEfCfDf", "ECEdFcDfDeceDeccFec", "fCfDecdcFecfDeceDec"];

#[derive(Clone, Debug)]
pub struct AppendixGroup {
    pub field: Arc<NumberField>,
    pub alg: Arc<QuatAlgebra>,
    /// Uniformiser `α + 1` of the prime of norm 3.
    pub pi: NFElem,
    pub order: QuatOrder,
    pub a: QuatElem,
    pub b: QuatElem,
    letters: Letters,
}

pub fn build_appendix_group() -> AppendixGroup {
    let k = NumberField::new(&ALPHA_MINPOLY).expect("irreducible cubic");
    let alpha = k.gen();
    let pi = &alpha + &k.one();
    let alg = QuatAlgebra::new(k.from_int(-1), k.from_int(-3)).expect("nonzero parameters");
    let (one, i, j, kk) = (alg.one(), alg.i(), alg.j(), alg.k());
    let half = k.from_rational(&num_rational::BigRational::new(1.into(), 2.into()));
    let sixth = k.from_rational(&num_rational::BigRational::new(1.into(), 6.into()));
    let pi2 = &pi * &pi;
    let x = i.add(&j).unwrap().scale(&half);
    let y = one
        .scale(&(&k.from_int(3) * &pi))
        .add(&i.scale(&(&k.from_int(3) * &pi2)))
        .and_then(|s| s.add(&j.scale(&pi2)))
        .and_then(|s| s.add(&kk.scale(&pi)))
        .unwrap()
        .scale(&sixth);
    let order = QuatOrder::new([one.clone(), i.clone(), x.clone(), y.clone()]).expect("basis is independent");

    let a = one
        .add(&i.scale(&alpha))
        .and_then(|s| s.add(&x.scale(&alpha)))
        .and_then(|s| s.add(&y.scale(&(&alpha - &k.one()))))
        .unwrap();
    let b = i.neg().mul(&a).and_then(|s| s.mul(&i)).unwrap();

    let mut base = vec![('a', a.clone()), ('b', b.clone())];
    let ab = Letters::new(&base);
    for (c, w) in LETTERS {
        base.push((c, ab.eval(alg.one(), w).expect("letters are words in a, b")));
    }
    AppendixGroup { field: k, alg, pi, order, a, b, letters: Letters::new(&base) }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelatorCheck {
    pub relator: String,
    /// `"+1"`, `"-1"` or `"other"`.
    pub value: &'static str,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelatorReport {
    pub relators: Vec<RelatorCheck>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    /// `w(g − 1)` for each derived letter.
    pub letter_levels: Vec<(char, Valuation)>,
    pub a_level: Valuation,
    pub samples: usize,
    pub seed: u64,
    /// Sampled words whose trace is not `2 mod π³`.
    pub sample_failures: Vec<String>,
    pub pass: bool,
}

impl AppendixGroup {
    pub fn letters(&self) -> &Letters {
        &self.letters
    }

    pub fn alpha(&self) -> NFElem {
        self.field.gen()
    }

    /// Value of a word over `a, b` and the derived letters (capitals invert).
    pub fn eval(&self, word: &str) -> Result<QuatElem, WeeksError> {
        self.letters.eval(self.alg.one(), word)
    }

    pub fn letter(&self, c: char) -> Result<QuatElem, WeeksError> {
        self.letters.get(c).cloned().ok_or(WeeksError::UnknownLetter(c))
    }

    /// `⟨ā, b̄⟩` up to sign.
    pub fn lambda(&self) -> QuatGroup {
        QuatGroup::new(self.alg.clone(), vec![('a', self.a.clone()), ('b', self.b.clone())]).expect("units")
    }

    /// `⟨c, d, e, f⟩` up to sign: the fundamental group of `N`.
    pub fn gamma(&self) -> QuatGroup {
        let gens = ['c', 'd', 'e', 'f'].iter().map(|&c| (c, self.letters.get(c).unwrap().clone())).collect();
        QuatGroup::new(self.alg.clone(), gens).expect("units")
    }

    /// `w(u − 1) = val_π n(u − 1)`.
    pub fn level(&self, u: &QuatElem) -> Result<Valuation, WeeksError> {
        Ok(u.sub(&self.alg.one())?.w_valuation(&self.pi)?)
    }

    pub fn check_relator(&self, r: &str) -> Result<RelatorCheck, WeeksError> {
        let v = self.eval(r)?;
        let value = if v.is_scalar(1) {
            "+1"
        } else if v.is_scalar(-1) {
            "-1"
        } else {
            "other"
        };
        Ok(RelatorCheck { relator: r.to_string(), value, pass: value != "other" })
    }

    pub fn verify_relators(&self, relators: &[&str]) -> Result<RelatorReport, WeeksError> {
        let relators: Vec<RelatorCheck> =
            relators.par_iter().map(|r| self.check_relator(r)).collect::<Result<_, _>>()?;
        let pass = relators.iter().all(|r| r.pass);
        Ok(RelatorReport { relators, pass })
    }

    /// All six relators of the appendix presentations.
    pub fn verify_all_relators(&self) -> Result<RelatorReport, WeeksError> {
        let all: Vec<&str> = LAMBDA_RELATORS.iter().chain(GAMMA_RELATORS.iter()).copied().collect();
        self.verify_relators(&all)
    }

    pub fn verify_level(&self, samples: usize, seed: u64) -> Result<LevelReport, WeeksError> {
        let mut letter_levels = Vec::new();
        for c in ['c', 'd', 'e', 'f', 'g', 'h', 'n', 'm', 'v'] {
            letter_levels.push((c, self.level(&self.letter(c)?)?));
        }
        let a_level = self.level(&self.a)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alphabet: Vec<char> = "cdefCDEF".chars().collect();
        let words: Vec<String> = (0..samples)
            .map(|_| {
                let len = rng.gen_range(1..=12);
                (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
            })
            .collect();
        let two = self.field.from_int(2);
        let checks: Vec<(String, bool)> = words
            .par_iter()
            .map(|w| {
                let t = self.eval(w)?.trace();
                Ok((w.clone(), (&t - &two).val_pi(&self.pi)?.at_least(3)))
            })
            .collect::<Result<_, WeeksError>>()?;
        let sample_failures: Vec<String> = checks.into_iter().filter(|(_, ok)| !ok).map(|(w, _)| w).collect();
        let pass = sample_failures.is_empty()
            && letter_levels.iter().take(4).all(|(_, v)| *v == Valuation::Finite(3));
        Ok(LevelReport { letter_levels, a_level, samples, seed, sample_failures, pass })
    }

    /// Flip the case of the letter at `pos`, a one-letter perturbation.
    pub fn perturb(word: &str, pos: usize) -> String {
        word.chars()
            .enumerate()
            .map(|(i, c)| if i == pos { crate::linrep::flip_case(c) } else { c })
            .collect()
    }

    /// Inverse of a relator word (also a relator).
    pub fn inverse_word(word: &str) -> String {
        invert_word(word)
    }
}
