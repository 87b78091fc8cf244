use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use super::{cycle_type_of, FiniteGroup, GroupError, Perm};

/// A subgroup of a [`FiniteGroup`] with a left-coset transversal.
///
/// Cosets are numbered in order of their smallest element, and each
/// representative is that smallest element.
#[derive(Debug, Clone)]
pub struct SubgroupHandle {
    group: Arc<FiniteGroup>,
    member: Vec<bool>,
    elements: Vec<usize>,
    reps: Vec<usize>,
    coset_of: Vec<usize>,
}

impl SubgroupHandle {
    /// Checks closure under multiplication.
    pub fn from_elements(
        group: Arc<FiniteGroup>,
        mut elements: Vec<usize>,
    ) -> Result<Self, GroupError> {
        elements.sort_unstable();
        elements.dedup();
        let mut member = vec![false; group.order()];
        for &x in &elements {
            member[x] = true;
        }
        if !member[group.identity()] {
            return Err(GroupError::NotASubgroup);
        }
        for &x in &elements {
            for &y in &elements {
                if !member[group.mul(x, y)] {
                    return Err(GroupError::NotASubgroup);
                }
            }
        }
        Ok(Self::build(group, member, elements))
    }

    pub fn generated(group: Arc<FiniteGroup>, gens: &[usize]) -> Self {
        let elements = group.closure(gens);
        let mut member = vec![false; group.order()];
        for &x in &elements {
            member[x] = true;
        }
        Self::build(group, member, elements)
    }

    /// Elements whose permutation satisfies `pred`. The caller guarantees the
    /// result is a subgroup (stabilizers and the like).
    pub fn from_predicate(group: Arc<FiniteGroup>, pred: impl Fn(&Perm) -> bool) -> Self {
        let member: Vec<bool> = (0..group.order()).map(|i| pred(group.element(i))).collect();
        let elements = (0..group.order()).filter(|&i| member[i]).collect();
        Self::build(group, member, elements)
    }

    pub fn whole(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        Self::build(group, vec![true; n], (0..n).collect())
    }

    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let mut member = vec![false; group.order()];
        member[group.identity()] = true;
        let e = group.identity();
        Self::build(group, member, vec![e])
    }

    fn build(group: Arc<FiniteGroup>, member: Vec<bool>, elements: Vec<usize>) -> Self {
        let n = group.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::with_capacity(n / elements.len().max(1));
        for x in 0..n {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let j = reps.len();
            reps.push(x);
            for &h in &elements {
                coset_of[group.mul(x, h)] = j;
            }
        }
        Self {
            group,
            member,
            elements,
            reps,
            coset_of,
        }
    }

    /// `x H x^-1`
    pub fn conjugate(&self, x: usize) -> Self {
        let g = &self.group;
        let mut elements: Vec<usize> = self.elements.iter().map(|&h| g.conj(x, h)).collect();
        elements.sort_unstable();
        let mut member = vec![false; g.order()];
        for &y in &elements {
            member[y] = true;
        }
        Self::build(g.clone(), member, elements)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index(&self) -> usize {
        self.reps.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.member[x]
    }

    /// Sorted element indices.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn transversal(&self) -> &[usize] {
        &self.reps
    }

    /// Index of the coset `xH`.
    pub fn coset_of(&self, x: usize) -> usize {
        self.coset_of[x]
    }

    /// Permutation of `G/H` induced by `gH' -> x g H`.
    pub fn left_action(&self, x: usize) -> Vec<usize> {
        self.reps
            .iter()
            .map(|&r| self.coset_of[self.group.mul(x, r)])
            .collect()
    }

    pub fn fixed_cosets(&self, x: usize) -> usize {
        self.reps
            .iter()
            .enumerate()
            .filter(|&(j, &r)| self.coset_of[self.group.mul(x, r)] == j)
            .count()
    }

    pub fn cycle_type(&self, x: usize) -> Vec<usize> {
        cycle_type_of(&self.left_action(x))
    }

    pub fn same_elements(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

/// Partition of a group into conjugacy classes, each sorted, listed in order
/// of their smallest element.
#[derive(Debug, Clone)]
pub struct ConjugacyClasses {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl ConjugacyClasses {
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

/// Orbits under conjugation by the generators, which are the full classes.
pub fn conjugacy_classes(group: &FiniteGroup) -> ConjugacyClasses {
    let n = group.order();
    let mut class_of = vec![usize::MAX; n];
    let mut classes = Vec::new();
    let mut conjugators: Vec<usize> = group.generators().to_vec();
    conjugators.extend(group.generators().iter().map(|&s| group.inv(s)));
    for x in 0..n {
        if class_of[x] != usize::MAX {
            continue;
        }
        let id = classes.len();
        class_of[x] = id;
        let mut class = vec![x];
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            for &s in &conjugators {
                let z = group.conj(s, y);
                if class_of[z] == usize::MAX {
                    class_of[z] = id;
                    class.push(z);
                    queue.push_back(z);
                }
            }
        }
        class.sort_unstable();
        classes.push(class);
    }
    ConjugacyClasses { class_of, classes }
}

/// Class data for one conjugacy class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassCount {
    pub representative: usize,
    pub size: usize,
    pub in_h1: usize,
    pub in_h2: usize,
}

/// Outcome of the Gassmann test for `(G, H1, H2)`.
#[derive(Debug, Clone, Serialize)]
pub struct GassmannTriple {
    pub group_order: usize,
    pub h1_order: usize,
    pub index: usize,
    pub classes: Vec<ClassCount>,
    pub sunada_ok: bool,
    pub perm_char_ok: bool,
    pub cycle_types_ok: bool,
    /// Equality on a class carries over to the classes of all its powers.
    pub powers_ok: bool,
    pub conj_in_g: bool,
    pub conjugator: Option<usize>,
    /// First element with different fixed-point counts, if any.
    pub fixed_point_witness: Option<usize>,
}

/// Counts `#(C ∩ H1)` and `#(C ∩ H2)` for every class `C`.
pub fn class_counts(
    classes: &ConjugacyClasses,
    h1: &SubgroupHandle,
    h2: &SubgroupHandle,
) -> Vec<ClassCount> {
    classes
        .classes()
        .iter()
        .map(|c| ClassCount {
            representative: c[0],
            size: c.len(),
            in_h1: c.iter().filter(|&&x| h1.contains(x)).count(),
            in_h2: c.iter().filter(|&&x| h2.contains(x)).count(),
        })
        .collect()
}

pub fn sunada_check(
    h1: &SubgroupHandle,
    h2: &SubgroupHandle,
) -> Result<GassmannTriple, GroupError> {
    let classes = conjugacy_classes(h1.group());
    sunada_check_with(&classes, h1, h2)
}

/// As [`sunada_check`] with precomputed classes.
pub fn sunada_check_with(
    classes: &ConjugacyClasses,
    h1: &SubgroupHandle,
    h2: &SubgroupHandle,
) -> Result<GassmannTriple, GroupError> {
    if !Arc::ptr_eq(h1.group(), h2.group()) {
        return Err(GroupError::InvalidElement(
            "subgroups of different groups".into(),
        ));
    }
    if h1.order() != h2.order() {
        return Err(GroupError::OrderMismatch {
            h1: h1.order(),
            h2: h2.order(),
        });
    }
    let g = h1.group();
    let counts = class_counts(classes, h1, h2);
    let equal: Vec<bool> = counts.iter().map(|c| c.in_h1 == c.in_h2).collect();
    let sunada_ok = equal.iter().all(|&e| e);

    let powers_ok = counts.iter().zip(&equal).all(|(c, &eq)| {
        if !eq {
            return true;
        }
        let x = c.representative;
        (1..=g.element_order(x) as i64).all(|k| equal[classes.class_of(g.pow(x, k))])
    });

    let mut fixed_point_witness = None;
    let mut cycle_types_ok = true;
    for x in 0..g.order() {
        if fixed_point_witness.is_none() && h1.fixed_cosets(x) != h2.fixed_cosets(x) {
            fixed_point_witness = Some(x);
        }
        if cycle_types_ok && h1.cycle_type(x) != h2.cycle_type(x) {
            cycle_types_ok = false;
        }
    }
    let conjugator = find_conjugator(h1, h2);

    Ok(GassmannTriple {
        group_order: g.order(),
        h1_order: h1.order(),
        index: h1.index(),
        classes: counts,
        sunada_ok,
        perm_char_ok: fixed_point_witness.is_none(),
        cycle_types_ok,
        powers_ok,
        conj_in_g: conjugator.is_some(),
        conjugator,
        fixed_point_witness,
    })
}

/// First `x` (by element index) with `x H1 x^-1 = H2`.
pub fn find_conjugator(h1: &SubgroupHandle, h2: &SubgroupHandle) -> Option<usize> {
    if h1.order() != h2.order() {
        return None;
    }
    let g = h1.group();
    (0..g.order()).find(|&x| h1.elements().iter().all(|&h| h2.contains(g.conj(x, h))))
}

/// Distinct subgroups of the given order among those generated by at most
/// two elements.
pub fn two_generated_subgroups_of_order(
    group: &Arc<FiniteGroup>,
    order: usize,
) -> Vec<SubgroupHandle> {
    let n = group.order();
    let mut found: Vec<Vec<usize>> = Vec::new();
    for a in 0..n {
        for b in a..n {
            let c = group.closure(&[a, b]);
            if c.len() == order && !found.contains(&c) {
                found.push(c);
            }
        }
    }
    found
        .into_iter()
        .map(|els| {
            SubgroupHandle::from_elements(group.clone(), els).expect("closure is a subgroup")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::build_psl3;
    use super::*;

    #[test]
    fn psl32_classes() {
        let g = build_psl3(2).unwrap();
        let cc = conjugacy_classes(g.group());
        assert_eq!(cc.len(), 6);
        let mut sizes = cc.sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 21, 24, 24, 42, 56]);
        assert_eq!(cc.classes()[0], vec![0]);
        assert!(sizes.iter().all(|s| 168 % s == 0));
    }

    #[test]
    fn classes_agree_with_full_conjugation() {
        let g = build_psl3(2).unwrap();
        let grp = g.group();
        let cc = conjugacy_classes(grp);
        for x in [1usize, 5, 17, 100] {
            let mut brute: Vec<usize> = (0..grp.order()).map(|y| grp.conj(y, x)).collect();
            brute.sort_unstable();
            brute.dedup();
            assert_eq!(brute, cc.classes()[cc.class_of(x)]);
        }
    }

    #[test]
    fn trivial_triple() {
        let g = build_psl3(2).unwrap();
        let k1 = g.stabilizer_of_point([1, 0, 0]).unwrap();
        let t = sunada_check(&k1, &k1).unwrap();
        assert!(t.sunada_ok && t.perm_char_ok && t.conj_in_g);
    }

    #[test]
    fn fano_triple() {
        let g = build_psl3(2).unwrap();
        let k1 = g.stabilizer_of_point([1, 0, 0]).unwrap();
        let k2 = g.stabilizer_of_hyperplane([1, 0, 0]).unwrap();
        let t = sunada_check(&k1, &k2).unwrap();
        assert!(t.sunada_ok && t.perm_char_ok && t.cycle_types_ok && t.powers_ok);
        assert!(!t.conj_in_g);
    }

    #[test]
    fn order_mismatch() {
        let g = build_psl3(2).unwrap();
        let k1 = g.stabilizer_of_point([1, 0, 0]).unwrap();
        let t = SubgroupHandle::trivial(g.group().clone());
        assert_eq!(
            sunada_check(&k1, &t).unwrap_err(),
            GroupError::OrderMismatch { h1: 24, h2: 1 }
        );
    }

    #[test]
    fn conjugate_is_found() {
        let g = build_psl3(2).unwrap();
        let k1 = g.stabilizer_of_point([1, 0, 0]).unwrap();
        let c = k1.conjugate(37);
        let x = find_conjugator(&k1, &c).unwrap();
        assert!(k1.conjugate(x).same_elements(&c));
    }

    #[test]
    fn cosets_partition() {
        let g = build_psl3(2).unwrap();
        let k2 = g.stabilizer_of_hyperplane([0, 1, 1]).unwrap();
        assert_eq!(k2.index() * k2.order(), 168);
        let mut counts = vec![0; k2.index()];
        for x in 0..168 {
            counts[k2.coset_of(x)] += 1;
        }
        assert!(counts.iter().all(|&c| c == 24));
        let x = (0..168).find(|&x| g.group().element_order(x) == 3).unwrap();
        assert!(SubgroupHandle::from_elements(g.group().clone(), vec![0, x]).is_err());
        assert!(
            SubgroupHandle::from_elements(g.group().clone(), vec![0, x, g.group().inv(x)]).is_ok()
        );
    }
}
