//! Finite groups given by multiplication tables: solvability, Sylow
//! cyclicity, and the holonomy classification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use super::CrystalError;

pub const MAX_ORDER: usize = 2000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteGroupJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HolonomyClass {
    AntiDiffuse,
    Diffuse,
    Mixed,
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, CrystalError> {
        let n = table.len();
        if n == 0 || n > MAX_ORDER {
            return Err(CrystalError::BadTable(format!("order {n} outside 1..={MAX_ORDER}")));
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(CrystalError::BadTable("rows must have length N with entries < N".into()));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if std::mem::replace(&mut seen[x], true) {
                    return Err(CrystalError::BadTable("rows are not permutations".into()));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| CrystalError::BadTable("no identity element".into()))?;
        let mut inverse = vec![0; n];
        for x in 0..n {
            inverse[x] = (0..n)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or_else(|| CrystalError::BadTable(format!("element {x} has no inverse")))?;
        }
        let g = Self { table, identity, inverse };
        g.check_associativity()?;
        Ok(g)
    }

    pub fn from_json(v: &FiniteGroupJson) -> Result<Self, CrystalError> {
        if v.order != v.table.len() {
            return Err(CrystalError::BadTable(format!("order {} but {} rows", v.order, v.table.len())));
        }
        Self::from_table(v.table.clone())
    }

    pub fn to_json(&self) -> FiniteGroupJson {
        FiniteGroupJson { order: self.order(), table: self.table.clone() }
    }

    /// All triples for small groups, 20 000 seeded random triples otherwise.
    fn check_associativity(&self) -> Result<(), CrystalError> {
        let n = self.order();
        let bad = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c));
        if n <= 40 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if bad(a, b, c) {
                            return Err(CrystalError::BadTable(format!("({a}·{b})·{c} ≠ {a}·({b}·{c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..20_000 {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if bad(a, b, c) {
                    return Err(CrystalError::BadTable(format!("({a}·{b})·{c} ≠ {a}·({b}·{c})")));
                }
            }
        }
        Ok(())
    }

    /// Closure of permutations (images of `0..d`) under composition.
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<Self, CrystalError> {
        let d = gens.first().map_or(0, |g| g.len());
        let id: Vec<usize> = (0..d).collect();
        let mut elems = vec![id];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(elems[0].clone(), 0)]);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                // (x ∘ g)(k) = x(g(k))
                let p: Vec<usize> = g.iter().map(|&k| elems[i][k]).collect();
                if !index.contains_key(&p) {
                    if elems.len() >= MAX_ORDER {
                        return Err(CrystalError::BadTable("permutation group too large".into()));
                    }
                    index.insert(p.clone(), elems.len());
                    elems.push(p);
                }
            }
            i += 1;
        }
        let table = elems
            .iter()
            .map(|x| elems.iter().map(|y| index[&y.iter().map(|&k| x[k]).collect::<Vec<_>>()]).collect())
            .collect();
        Self::from_table(table)
    }

    pub fn cyclic(n: usize) -> Self {
        Self::from_table((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect())
            .expect("cyclic table is valid")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Largest element order.
    pub fn exponent_bound(&self) -> usize {
        (0..self.order()).map(|a| self.element_order(a)).max().unwrap_or(1)
    }

    /// Same group with elements renamed by `perm` (old index `i` becomes `perm[i]`).
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.order();
        let mut table = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                table[perm[a]][perm[b]] = perm[self.table[a][b]];
            }
        }
        Self::from_table(table).expect("relabelling preserves validity")
    }

    fn generated(&self, seeds: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.order()];
        inside[self.identity] = true;
        let mut members = vec![self.identity];
        let gens: Vec<usize> = seeds.iter().copied().filter(|&s| s != self.identity).collect();
        let mut i = 0;
        while i < members.len() {
            for &s in &gens {
                let p = self.mul(members[i], s);
                if !inside[p] {
                    inside[p] = true;
                    members.push(p);
                }
            }
            i += 1;
        }
        inside
    }

    /// Commutator subgroup of the subgroup `h` (membership mask).
    fn derived(&self, h: &[bool]) -> Vec<bool> {
        let elems: Vec<usize> = (0..self.order()).filter(|&x| h[x]).collect();
        let mut comms = vec![false; self.order()];
        for &x in &elems {
            for &y in &elems {
                let c = self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y));
                comms[c] = true;
            }
        }
        let seeds: Vec<usize> = (0..self.order()).filter(|&c| comms[c]).collect();
        self.generated(&seeds)
    }

    /// Orders of the derived series `G ⊇ G' ⊇ G'' ⊇ …` until it stabilises.
    pub fn derived_series(&self) -> Vec<usize> {
        let mut h = vec![true; self.order()];
        let mut sizes = vec![self.order()];
        loop {
            let next = self.derived(&h);
            let size = next.iter().filter(|&&x| x).count();
            if size == *sizes.last().unwrap() {
                return sizes;
            }
            sizes.push(size);
            h = next;
        }
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last() == Some(&1)
    }

    /// A Sylow `p`-subgroup is cyclic iff some element has order `p^{v_p(N)}`.
    pub fn sylow_cyclic(&self, p: usize) -> Result<bool, CrystalError> {
        if !is_prime(p) {
            return Err(CrystalError::NotPrime(p));
        }
        let n = self.order();
        if n % p != 0 {
            return Err(CrystalError::PrimeDoesNotDivide { p, order: n });
        }
        let mut pk = 1;
        let mut m = n;
        while m % p == 0 {
            m /= p;
            pk *= p;
        }
        Ok((0..n).any(|a| self.element_order(a) == pk))
    }

    pub fn prime_divisors(&self) -> Vec<usize> {
        let mut n = self.order();
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                out.push(p);
                while n % p == 0 {
                    n /= p;
                }
            }
            p += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    /// Anti-diffuse iff not solvable; diffuse iff every Sylow subgroup is
    /// cyclic; mixed otherwise.
    pub fn holonomy_class(&self) -> Result<HolonomyClass, CrystalError> {
        if self.order() == 1 {
            return Err(CrystalError::TrivialGroup);
        }
        if !self.is_solvable() {
            return Ok(HolonomyClass::AntiDiffuse);
        }
        for p in self.prime_divisors() {
            if !self.sylow_cyclic(p)? {
                return Ok(HolonomyClass::Mixed);
            }
        }
        Ok(HolonomyClass::Diffuse)
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn klein() -> FiniteGroup {
        FiniteGroup::from_table((0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect()).unwrap()
    }

    fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(&[vec![1, 0, 2], vec![1, 2, 0]]).unwrap()
    }

    fn a5() -> FiniteGroup {
        FiniteGroup::from_permutations(&[vec![1, 2, 0, 3, 4], vec![1, 2, 3, 4, 0]]).unwrap()
    }

    fn d8() -> FiniteGroup {
        // symmetries of a square on vertices 0..4
        FiniteGroup::from_permutations(&[vec![1, 2, 3, 0], vec![3, 2, 1, 0]]).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(s3().order(), 6);
        assert_eq!(a5().order(), 60);
        assert_eq!(d8().order(), 8);
    }

    #[test]
    fn solvability() {
        assert!(klein().is_solvable());
        assert!(s3().is_solvable());
        assert!(!a5().is_solvable());
        // A5 is perfect
        assert_eq!(a5().derived_series(), vec![60]);
    }

    #[test]
    fn sylow() {
        let z6 = FiniteGroup::cyclic(6);
        assert!(z6.sylow_cyclic(2).unwrap() && z6.sylow_cyclic(3).unwrap());
        assert!(!klein().sylow_cyclic(2).unwrap());
        assert!(!d8().sylow_cyclic(2).unwrap());
        assert_eq!(d8().exponent_bound(), 4);
        assert!(matches!(z6.sylow_cyclic(5), Err(CrystalError::PrimeDoesNotDivide { .. })));
        assert!(matches!(z6.sylow_cyclic(4), Err(CrystalError::NotPrime(4))));
    }

    #[test]
    fn holonomy_classes() {
        assert_eq!(klein().holonomy_class().unwrap(), HolonomyClass::Mixed);
        assert_eq!(FiniteGroup::cyclic(6).holonomy_class().unwrap(), HolonomyClass::Diffuse);
        assert_eq!(a5().holonomy_class().unwrap(), HolonomyClass::AntiDiffuse);
        assert_eq!(FiniteGroup::cyclic(1).holonomy_class().unwrap_err(), CrystalError::TrivialGroup);
    }

    #[test]
    fn rejects_broken_tables() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![0, 1]]).is_err());
        // x·y = −x − y mod 3 is a Latin square without identity
        let t = vec![vec![0, 2, 1], vec![2, 1, 0], vec![1, 0, 2]];
        assert!(FiniteGroup::from_table(t).is_err());
    }
}
