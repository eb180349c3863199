//! Finitely generated matrix groups over number fields: exact word
//! evaluation, canonical keys, and word-metric balls.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::qfield::{FieldError, FieldSpec, NFElem, NumberField};

pub const MAX_BALL: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("unknown generator letter {0:?}")]
    UnknownLetter(char),
    #[error("generator {0:?} is not invertible (determinant zero)")]
    Singular(char),
    #[error("generator name must be a single lowercase letter, got {0:?}")]
    BadGeneratorName(String),
    #[error("relator {0:?} does not evaluate to the identity")]
    RelatorFails(String),
    #[error("ball exceeds the resource cap of {0} elements")]
    ResourceLimit(usize),
    #[error("malformed group definition: {0}")]
    Malformed(String),
}

/// Words are strings over generator letters; uppercase means inverse.
pub type Word = String;

pub fn invert_word(w: &str) -> Word {
    w.chars().rev().map(flip_case).collect()
}

pub fn flip_case(c: char) -> char {
    if c.is_ascii_uppercase() {
        c.to_ascii_lowercase()
    } else {
        c.to_ascii_uppercase()
    }
}

/// What the ball/ravel machinery needs from a group.
pub trait Group: Sync {
    type Elem: Clone + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Injective on group elements.
    fn key(&self, a: &Self::Elem) -> Vec<u8>;
    /// Named generators in declared order.
    fn generators(&self) -> Vec<(char, Self::Elem)>;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        self.key(a) == self.key(&self.identity())
    }

    /// Letters with their values: generators in order, then their inverses.
    fn alphabet(&self) -> Vec<(char, Self::Elem)> {
        let gens = self.generators();
        let inverses: Vec<_> = gens.iter().map(|(c, g)| (c.to_ascii_uppercase(), self.inv(g))).collect();
        gens.into_iter().chain(inverses).collect()
    }

    fn eval_word(&self, w: &str) -> Result<Self::Elem, GroupError> {
        let letters = self.alphabet();
        let mut acc = self.identity();
        for ch in w.chars() {
            let (_, g) = letters.iter().find(|(c, _)| *c == ch).ok_or(GroupError::UnknownLetter(ch))?;
            acc = self.mul(&acc, g);
        }
        Ok(acc)
    }
}

/// 2×2 matrix over a number field, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat2(pub [[NFElem; 2]; 2]);

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl Mat2 {
    pub fn identity(field: &Arc<NumberField>) -> Self {
        Self([[field.one(), field.zero()], [field.zero(), field.one()]])
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.0[0][0].field()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j])
        }))
    }

    pub fn det(&self) -> NFElem {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn trace(&self) -> NFElem {
        &self.0[0][0] + &self.0[1][1]
    }

    pub fn neg(&self) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| -&self.0[i][j])))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        let d = self.det().inv()?;
        let m = &self.0;
        Ok(Self([
            [&m[1][1] * &d, -(&m[0][1] * &d)],
            [-(&m[1][0] * &d), &m[0][0] * &d],
        ]))
    }

    pub fn is_scalar(&self, k: i64) -> bool {
        let m = &self.0;
        m[0][0].is_int(k) && m[1][1].is_int(k) && m[0][1].is_zero() && m[1][0].is_zero()
    }

    pub fn entries_json(&self) -> Vec<Vec<Vec<String>>> {
        self.0.iter().map(|row| row.iter().map(|e| e.to_strings()).collect()).collect()
    }
}

/// Byte key identifying `m`, or `±m` when `projective`.
pub fn canonical_key(m: &Mat2, projective: bool) -> Vec<u8> {
    let flip = projective
        && m.0
            .iter()
            .flatten()
            .find(|e| !e.is_zero())
            .is_some_and(|e| e.leading_sign() == std::cmp::Ordering::Less);
    let mut out = Vec::with_capacity(64);
    for e in m.0.iter().flatten() {
        if flip {
            (-e).write_key(&mut out);
        } else {
            e.write_key(&mut out);
        }
    }
    out
}

/// A matrix group given by named generators over one number field.
#[derive(Clone, Debug)]
pub struct GroupDef {
    pub field: Arc<NumberField>,
    pub generators: Vec<(char, Mat2)>,
    pub projective: bool,
    pub relators: Vec<Word>,
}

impl GroupDef {
    pub fn new(
        field: Arc<NumberField>,
        generators: Vec<(char, Mat2)>,
        projective: bool,
        relators: Vec<Word>,
    ) -> Result<Self, GroupError> {
        for (c, m) in &generators {
            if !c.is_ascii_lowercase() {
                return Err(GroupError::BadGeneratorName(c.to_string()));
            }
            if m.det().is_zero() {
                return Err(GroupError::Singular(*c));
            }
        }
        Ok(Self { field, generators, projective, relators })
    }

    pub fn is_trivial_elem(&self, m: &Mat2) -> bool {
        m.is_scalar(1) || (self.projective && m.is_scalar(-1))
    }

    /// Evaluates every declared relator and reports failures.
    pub fn check_relators(&self) -> Result<(), GroupError> {
        for r in &self.relators {
            if !self.is_trivial_elem(&self.eval_word(r)?) {
                return Err(GroupError::RelatorFails(r.clone()));
            }
        }
        Ok(())
    }

    pub fn from_json(v: &GroupDefJson) -> Result<Self, GroupError> {
        let field = v.field.build()?;
        let mut gens = Vec::new();
        for (name, rows) in &v.generators {
            let mut chars = name.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(GroupError::BadGeneratorName(name.clone()));
            };
            gens.push((c, parse_mat2(&field, rows)?));
        }
        Self::new(field, gens, v.projective, v.relators.clone())
    }

    pub fn to_json(&self) -> GroupDefJson {
        GroupDefJson {
            field: FieldSpec::of(&self.field),
            projective: self.projective,
            generators: self
                .generators
                .iter()
                .map(|(c, m)| (c.to_string(), serde_json::to_value(m.entries_json()).unwrap_or(Value::Null)))
                .collect(),
            relators: self.relators.clone(),
        }
    }
}

/// File format of a matrix group definition. Matrix entries are arrays of
/// power-basis coefficients given as `"p/q"` strings or integers; a bare
/// string or integer denotes a rational constant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupDefJson {
    pub field: FieldSpec,
    #[serde(default)]
    pub projective: bool,
    pub generators: IndexMap<String, Value>,
    #[serde(default)]
    pub relators: Vec<Word>,
}

fn parse_entry(field: &Arc<NumberField>, v: &Value) -> Result<NFElem, GroupError> {
    let scalar = |v: &Value| -> Result<String, GroupError> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(GroupError::Malformed(format!("bad coefficient {other}"))),
        }
    };
    match v {
        Value::Array(items) => {
            let mut strs = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
            if strs.len() > field.degree() {
                return Err(FieldError::WrongLength { expected: field.degree(), got: strs.len() }.into());
            }
            strs.resize(field.degree(), "0".into());
            Ok(NFElem::from_strings(field, &strs)?)
        }
        other => Ok(field.from_rational(&crate::qfield::parse_rational(&scalar(other)?)?)),
    }
}

pub fn parse_mat2(field: &Arc<NumberField>, v: &Value) -> Result<Mat2, GroupError> {
    let bad = || GroupError::Malformed("a matrix must be [[e, e], [e, e]]".into());
    let rows = v.as_array().filter(|r| r.len() == 2).ok_or_else(bad)?;
    let mut m = Mat2::identity(field);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().filter(|r| r.len() == 2).ok_or_else(bad)?;
        for (j, e) in row.iter().enumerate() {
            m.0[i][j] = parse_entry(field, e)?;
        }
    }
    Ok(m)
}

impl Group for GroupDef {
    type Elem = Mat2;

    fn identity(&self) -> Mat2 {
        Mat2::identity(&self.field)
    }

    fn mul(&self, a: &Mat2, b: &Mat2) -> Mat2 {
        a.mul(b)
    }

    fn inv(&self, a: &Mat2) -> Mat2 {
        a.inv().expect("group elements are invertible")
    }

    fn key(&self, a: &Mat2) -> Vec<u8> {
        canonical_key(a, self.projective)
    }

    fn generators(&self) -> Vec<(char, Mat2)> {
        self.generators.clone()
    }

    fn is_identity(&self, a: &Mat2) -> bool {
        self.is_trivial_elem(a)
    }
}

#[derive(Clone, Debug)]
pub struct GroupElement<E> {
    pub value: E,
    /// A word producing `value`; absent for groups enumerated without words.
    pub word: Option<Word>,
}

/// Finite set of group elements keyed by canonical key, in insertion order.
#[derive(Clone, Debug)]
pub struct ElementSet<E> {
    pub elements: IndexMap<Vec<u8>, GroupElement<E>>,
}

impl<E> Default for ElementSet<E> {
    fn default() -> Self {
        Self { elements: IndexMap::new() }
    }
}

impl<E: Clone> ElementSet<E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn insert<G: Group<Elem = E>>(&mut self, g: &G, value: E, word: Option<Word>) -> bool {
        let k = g.key(&value);
        if self.elements.contains_key(&k) {
            return false;
        }
        self.elements.insert(k, GroupElement { value, word });
        true
    }

    pub fn contains<G: Group<Elem = E>>(&self, g: &G, value: &E) -> bool {
        self.elements.contains_key(&g.key(value))
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroupElement<E>> {
        self.elements.values()
    }

    /// Subset keeping the given positions (in the given order).
    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            elements: idx
                .iter()
                .filter_map(|&i| self.elements.get_index(i).map(|(k, v)| (k.clone(), v.clone())))
                .collect(),
        }
    }

    /// Same elements with keys sorted.
    pub fn sorted(&self) -> Self {
        let mut elements = self.elements.clone();
        elements.sort_keys();
        Self { elements }
    }

    pub fn same_set(&self, o: &Self) -> bool {
        self.len() == o.len() && self.elements.keys().all(|k| o.elements.contains_key(k))
    }

    pub fn words(&self) -> Vec<Word> {
        self.iter().map(|e| e.word.clone().unwrap_or_default()).collect()
    }
}

/// The elements of word length at most `radius`, each with a geodesic word.
#[derive(Clone, Debug)]
pub struct Ball<E> {
    pub radius: usize,
    pub set: ElementSet<E>,
    /// Number of elements at each exact word length `0..=radius`.
    pub sphere_sizes: Vec<usize>,
}

/// Breadth-first enumeration with canonical-key dedup. Frontier products are
/// computed in parallel and merged in a fixed order, so the result does not
/// depend on the thread count.
pub fn ball<G: Group>(g: &G, radius: usize, cap: usize) -> Result<Ball<G::Elem>, GroupError> {
    let alphabet = g.alphabet();
    let mut set = ElementSet::new();
    set.insert(g, g.identity(), Some(String::new()));
    let mut frontier: Vec<usize> = vec![0];
    let mut sphere_sizes = vec![1];
    for _ in 0..radius {
        if frontier.is_empty() {
            sphere_sizes.push(0);
            continue;
        }
        let candidates: Vec<(Vec<u8>, G::Elem, Word)> = frontier
            .par_iter()
            .flat_map_iter(|&i| {
                let (_, base) = set.elements.get_index(i).expect("frontier index");
                alphabet.iter().map(move |(c, s)| {
                    let v = g.mul(&base.value, s);
                    let mut w = base.word.clone().unwrap_or_default();
                    w.push(*c);
                    (g.key(&v), v, w)
                })
            })
            .collect();
        let start = set.len();
        for (k, v, w) in candidates {
            if !set.elements.contains_key(&k) {
                set.elements.insert(k, GroupElement { value: v, word: Some(w) });
                if set.len() > cap {
                    return Err(GroupError::ResourceLimit(cap));
                }
            }
        }
        frontier = (start..set.len()).collect();
        sphere_sizes.push(frontier.len());
    }
    Ok(Ball { radius, set, sphere_sizes })
}

/// JSON export entry `{word, matrix}`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ElementJson {
    pub word: Word,
    pub matrix: Vec<Vec<Vec<String>>>,
}

pub fn export_mat_set(set: &ElementSet<Mat2>) -> Vec<ElementJson> {
    set.iter()
        .map(|e| ElementJson { word: e.word.clone().unwrap_or_default(), matrix: e.value.entries_json() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_group() -> GroupDef {
        let q = NumberField::new(&[-1, 1]).unwrap();
        let t = Mat2([[q.one(), q.one()], [q.zero(), q.one()]]);
        GroupDef::new(q, vec![('t', t)], false, vec![]).unwrap()
    }

    #[test]
    fn keys_respect_projectivity() {
        let q = NumberField::new(&[-1, 1]).unwrap();
        let i = Mat2::identity(&q);
        assert_eq!(canonical_key(&i, true), canonical_key(&i.neg(), true));
        assert_ne!(canonical_key(&i, false), canonical_key(&i.neg(), false));
    }

    #[test]
    fn empty_word_is_identity() {
        let g = z_group();
        assert!(g.eval_word("").unwrap().is_scalar(1));
        assert!(g.eval_word("tT").unwrap().is_scalar(1));
        assert_eq!(g.eval_word("x").unwrap_err(), GroupError::UnknownLetter('x'));
    }

    #[test]
    fn ball_in_z_is_an_interval() {
        let g = z_group();
        let b = ball(&g, 3, MAX_BALL).unwrap();
        assert_eq!(b.set.len(), 7);
        assert_eq!(b.sphere_sizes, vec![1, 2, 2, 2]);
        assert_eq!(ball(&g, 0, MAX_BALL).unwrap().set.len(), 1);
        assert_eq!(ball(&g, 3, 4).unwrap_err(), GroupError::ResourceLimit(4));
    }

    #[test]
    fn finite_group_ball_closes() {
        // order-3 element [[0,-1],[1,-1]]
        let q = NumberField::new(&[-1, 1]).unwrap();
        let m = Mat2([[q.zero(), q.from_int(-1)], [q.one(), q.from_int(-1)]]);
        let g = GroupDef::new(q, vec![('t', m)], false, vec!["ttt".into()]).unwrap();
        g.check_relators().unwrap();
        let b = ball(&g, 5, MAX_BALL).unwrap();
        assert_eq!(b.set.len(), 3);
    }

    #[test]
    fn singular_generator_rejected() {
        let q = NumberField::new(&[-1, 1]).unwrap();
        let m = Mat2([[q.one(), q.one()], [q.one(), q.one()]]);
        assert_eq!(GroupDef::new(q, vec![('s', m)], false, vec![]).unwrap_err(), GroupError::Singular('s'));
    }
}
