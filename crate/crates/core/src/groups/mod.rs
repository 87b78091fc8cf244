//! Finite permutation groups and the group theory behind Sunada covers.
//!
//! Every group is stored as a list of permutations of a faithful action with
//! a hash index, so multiplication is composition followed by a lookup.
//! Small groups additionally cache a full multiplication table.

mod hom;
mod psl3;
mod semidirect;
mod subgroup;

pub use hom::*;
pub use psl3::*;
pub use semidirect::*;
pub use subgroup::*;

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

/// Groups up to this order get a cached multiplication table.
const TABLE_LIMIT: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("p = {p} exceeds the configured limit {max}")]
    TooLarge { p: u32, max: u32 },
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("group order exceeds the limit {limit}")]
    OrderLimit { limit: usize },
    #[error("subgroup orders differ: {h1} vs {h2}")]
    OrderMismatch { h1: usize, h2: usize },
    #[error("map is not a group automorphism")]
    NotAutomorphism,
    #[error("automorphism is not an involution")]
    NotInvolution,
    #[error("images generate a subgroup of order {image_order}, not the whole group of order {group_order}")]
    NotSurjective {
        image_order: usize,
        group_order: usize,
    },
    #[error("invalid projective point or hyperplane {0:?}")]
    InvalidFlag(Vec<u32>),
    #[error("element set is not a subgroup")]
    NotASubgroup,
    #[error("word uses generator {letter} but the homomorphism has rank {rank}")]
    RankMismatch { letter: i32, rank: usize },
    #[error("invalid group element: {0}")]
    InvalidElement(String),
}

/// A permutation of `0..n`, applied as `x -> images[x]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u16>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Self((0..n as u16).collect())
    }

    pub fn from_images(images: Vec<u16>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            let slot = seen.get_mut(x as usize)?;
            if *slot {
                return None;
            }
            *slot = true;
        }
        Some(Self(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u16] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u16; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u16;
        }
        Self(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn fixed_points(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, &x)| *i == x as usize)
            .count()
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        cycles_of(&self.0.iter().map(|&x| x as usize).collect::<Vec<_>>())
    }

    /// Cycle lengths, largest first.
    pub fn cycle_type(&self) -> Vec<usize> {
        cycle_type_of(&self.0.iter().map(|&x| x as usize).collect::<Vec<_>>())
    }
}

/// Cycles of a permutation given by its image list, each starting at its
/// smallest point, ordered by that point.
pub fn cycles_of(images: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; images.len()];
    let mut out = Vec::new();
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x);
            x = images[x];
        }
        out.push(cycle);
    }
    out
}

pub fn cycle_type_of(images: &[usize]) -> Vec<usize> {
    let mut t: Vec<usize> = cycles_of(images).iter().map(Vec::len).collect();
    t.sort_unstable_by(|a, b| b.cmp(a));
    t
}

/// A finite group of permutations. Element `0` is the identity.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    degree: usize,
    elements: Vec<Perm>,
    lookup: HashMap<Perm, usize>,
    inverses: Vec<usize>,
    generators: Vec<usize>,
    table: Option<Vec<u32>>,
}

impl FiniteGroup {
    /// Closure of `gens` by breadth-first search.
    pub fn from_generators(
        degree: usize,
        gens: &[Perm],
        max_order: usize,
    ) -> Result<Self, GroupError> {
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut lookup = HashMap::from([(id, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for s in gens {
                let y = s.compose(&elements[i]);
                if !lookup.contains_key(&y) {
                    if elements.len() == max_order {
                        return Err(GroupError::OrderLimit { limit: max_order });
                    }
                    lookup.insert(y.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(y);
                }
            }
        }
        let generators = gens.iter().map(|s| lookup[s]).collect();
        Ok(Self::finish(degree, elements, lookup, generators))
    }

    /// Wraps an explicit element list (identity first). Closure is checked
    /// against the given generating indices.
    pub fn from_elements(elements: Vec<Perm>, generators: Vec<usize>) -> Result<Self, GroupError> {
        let degree = elements.first().map_or(0, Perm::degree);
        if elements.is_empty() || !elements[0].is_identity() {
            return Err(GroupError::NotASubgroup);
        }
        let lookup: HashMap<Perm, usize> = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        if lookup.len() != elements.len() {
            return Err(GroupError::NotASubgroup);
        }
        for x in &elements {
            for &s in &generators {
                if !lookup.contains_key(&elements[s].compose(x)) {
                    return Err(GroupError::NotASubgroup);
                }
            }
        }
        Ok(Self::finish(degree, elements, lookup, generators))
    }

    fn finish(
        degree: usize,
        elements: Vec<Perm>,
        lookup: HashMap<Perm, usize>,
        generators: Vec<usize>,
    ) -> Self {
        let inverses = elements.iter().map(|p| lookup[&p.inverse()]).collect();
        let mut group = Self {
            degree,
            elements,
            lookup,
            inverses,
            generators,
            table: None,
        };
        let n = group.order();
        if n <= TABLE_LIMIT {
            let mut table = vec![0u32; n * n];
            for i in 0..n {
                for j in 0..n {
                    table[i * n + j] =
                        group.lookup[&group.elements[i].compose(&group.elements[j])] as u32;
                }
            }
            group.table = Some(table);
        }
        group
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Index of `e_i ∘ e_j`.
    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        match &self.table {
            Some(t) => t[i * self.order() + j] as usize,
            None => self.lookup[&self.elements[i].compose(&self.elements[j])],
        }
    }

    #[inline]
    pub fn inv(&self, i: usize) -> usize {
        self.inverses[i]
    }

    /// `g x g^-1`
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn pow(&self, x: usize, n: i64) -> usize {
        let base = if n < 0 { self.inv(x) } else { x };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut acc = x;
        let mut k = 1;
        while acc != self.identity() {
            acc = self.mul(acc, x);
            k += 1;
        }
        k
    }

    /// Sorted element indices of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order()];
        member[self.identity()] = true;
        let mut out = vec![self.identity()];
        let mut queue = VecDeque::from([self.identity()]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(s, x);
                if !member[y] {
                    member[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn generates(&self, gens: &[usize]) -> bool {
        self.closure(gens).len() == self.order()
    }

    /// Cyclic group of order `n` acting regularly.
    pub fn cyclic(n: usize) -> Self {
        let shift = Perm((0..n as u16).map(|x| (x + 1) % n as u16).collect());
        Self::from_generators(n, &[shift], n).expect("cyclic group has order n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_algebra() {
        let p = Perm::from_images(vec![1, 2, 0, 3]).unwrap();
        let q = Perm::from_images(vec![0, 1, 3, 2]).unwrap();
        assert_eq!(p.compose(&q).apply(2), p.apply(q.apply(2)));
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(p.cycle_type(), vec![3, 1]);
        assert_eq!(p.fixed_points(), 1);
        assert!(Perm::from_images(vec![0, 0]).is_none());
    }

    #[test]
    fn cyclic_group() {
        let c5 = FiniteGroup::cyclic(5);
        assert_eq!(c5.order(), 5);
        assert!(c5.elements.iter().skip(1).all(|p| p.fixed_points() == 0));
        let g = c5.generators()[0];
        assert_eq!(c5.element_order(g), 5);
        assert_eq!(c5.pow(g, 5), c5.identity());
        assert_eq!(c5.pow(g, -1), c5.inv(g));
    }

    #[test]
    fn symmetric_group_closure() {
        let t = Perm::from_images(vec![1, 0, 2, 3]).unwrap();
        let c = Perm::from_images(vec![1, 2, 3, 0]).unwrap();
        let s4 = FiniteGroup::from_generators(4, &[t, c], 100).unwrap();
        assert_eq!(s4.order(), 24);
        assert!(matches!(
            FiniteGroup::from_generators(4, &[s4.element(1).clone(), s4.element(2).clone()], 5),
            Err(GroupError::OrderLimit { .. })
        ));
    }
}
