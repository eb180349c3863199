//! The Weeks manifold and the arithmetic manifold `N` built from a maximal
//! order in a quaternion algebra over the cubic field `ℚ(α)`, `α³ + α = 1`.

pub mod appendix;
pub mod pipeline;
pub mod systole;
pub mod tree;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::hyp::{HypError, TraceGroup};
use crate::linrep::{flip_case, Group, GroupError};
use crate::qfield::{FieldError, NFElem};
use crate::quat::{QuatAlgebra, QuatElem, QuatError};

pub use appendix::{build_appendix_group, AppendixGroup};
pub use pipeline::{weeks_group, weeks_pipeline, WeeksReport};
pub use systole::{systole_enumeration, SystoleReport};
pub use tree::{appendix_tree, verify_orderability_tree, CaseTree, TreeCertificate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeeksError {
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Hyp(#[from] HypError),
    #[error("unknown letter {0:?}")]
    UnknownLetter(char),
    #[error("malformed input: {0}")]
    Malformed(String),
}

/// Unit quaternions up to sign, generated by named elements.
#[derive(Clone, Debug)]
pub struct QuatGroup {
    pub alg: Arc<QuatAlgebra>,
    pub generators: Vec<(char, QuatElem)>,
}

impl QuatGroup {
    pub fn new(alg: Arc<QuatAlgebra>, generators: Vec<(char, QuatElem)>) -> Result<Self, WeeksError> {
        for (c, g) in &generators {
            if !c.is_ascii_lowercase() {
                return Err(GroupError::BadGeneratorName(c.to_string()).into());
            }
            if !g.norm().is_one() {
                return Err(WeeksError::Malformed(format!("generator {c} does not have reduced norm 1")));
            }
        }
        Ok(Self { alg, generators })
    }
}

impl Group for QuatGroup {
    type Elem = QuatElem;

    fn identity(&self) -> QuatElem {
        self.alg.one()
    }

    fn mul(&self, a: &QuatElem, b: &QuatElem) -> QuatElem {
        a.mul(b).expect("same algebra")
    }

    fn inv(&self, a: &QuatElem) -> QuatElem {
        // reduced norm 1
        a.conj()
    }

    /// Sign-normalised so that `u` and `−u` share a key.
    fn key(&self, a: &QuatElem) -> Vec<u8> {
        let first = a.coords().iter().find(|c| !c.is_zero());
        let flip = first.is_some_and(|c| c.leading_sign() == std::cmp::Ordering::Less);
        let u = if flip { a.neg() } else { a.clone() };
        let mut out = Vec::new();
        for c in u.coords() {
            c.write_key(&mut out);
            out.push(b';');
        }
        out
    }

    fn generators(&self) -> Vec<(char, QuatElem)> {
        self.generators.clone()
    }

    fn is_identity(&self, a: &QuatElem) -> bool {
        a.is_pm_one()
    }
}

impl TraceGroup for QuatGroup {
    fn trace(&self, a: &QuatElem) -> NFElem {
        a.trace()
    }

    fn acts_trivially(&self, a: &QuatElem) -> bool {
        a.is_pm_one()
    }
}

/// Letter values for words over an extended alphabet: each lowercase letter
/// has a value, its uppercase form the inverse.
#[derive(Clone, Debug)]
pub struct Letters {
    values: HashMap<char, QuatElem>,
}

impl Letters {
    pub fn new(base: &[(char, QuatElem)]) -> Self {
        let mut values = HashMap::new();
        for (c, v) in base {
            values.insert(flip_case(*c), v.conj());
            values.insert(*c, v.clone());
        }
        Self { values }
    }

    pub fn get(&self, c: char) -> Option<&QuatElem> {
        self.values.get(&c)
    }

    pub fn eval(&self, one: QuatElem, word: &str) -> Result<QuatElem, WeeksError> {
        word.chars().try_fold(one, |acc, ch| {
            let v = self.values.get(&ch).ok_or(WeeksError::UnknownLetter(ch))?;
            Ok(acc.mul(v)?)
        })
    }
}
