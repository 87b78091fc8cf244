use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use super::{cycle_type_of, FiniteGroup, GroupError, SubgroupHandle};
use crate::schottky::{Letter, ReducedWord};

/// A homomorphism from the free group on `images.len()` letters.
#[derive(Debug, Clone)]
pub struct FreeGroupHom {
    group: Arc<FiniteGroup>,
    images: Vec<usize>,
    image_order: usize,
}

impl FreeGroupHom {
    /// Any images are allowed; surjectivity is recorded, not required.
    pub fn new(group: Arc<FiniteGroup>, images: Vec<usize>) -> Self {
        let image_order = group.closure(&images).len();
        Self {
            group,
            images,
            image_order,
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image_order(&self) -> usize {
        self.image_order
    }

    pub fn is_surjective(&self) -> bool {
        self.image_order == self.group.order()
    }

    pub fn require_surjective(&self) -> Result<(), GroupError> {
        if self.is_surjective() {
            Ok(())
        } else {
            Err(GroupError::NotSurjective {
                image_order: self.image_order,
                group_order: self.group.order(),
            })
        }
    }

    pub fn letter_image(&self, l: Letter) -> Result<usize, GroupError> {
        let i = l.unsigned_abs() as usize;
        if i == 0 || i > self.rank() {
            return Err(GroupError::RankMismatch {
                letter: l,
                rank: self.rank(),
            });
        }
        let x = self.images[i - 1];
        Ok(if l < 0 { self.group.inv(x) } else { x })
    }

    /// `φ(l1) φ(l2) ⋯`
    pub fn eval(&self, w: &ReducedWord) -> Result<usize, GroupError> {
        let mut acc = self.group.identity();
        for &l in w.letters() {
            acc = self.group.mul(acc, self.letter_image(l)?);
        }
        Ok(acc)
    }
}

pub fn hom_from_free(
    group: Arc<FiniteGroup>,
    images: Vec<usize>,
) -> Result<FreeGroupHom, GroupError> {
    let hom = FreeGroupHom::new(group, images);
    hom.require_surjective()?;
    Ok(hom)
}

/// First pair `(a, b)`, `a < b` in element order, generating the group.
pub fn find_generating_pair(group: &FiniteGroup) -> Option<(usize, usize)> {
    let n = group.order();
    (1..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .find(|&(a, b)| group.generates(&[a, b]))
}

/// Left translation by `φ(w)` on `G/H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetPermutation {
    pub images: Vec<usize>,
    pub cycle_type: Vec<usize>,
}

pub fn coset_action(
    hom: &FreeGroupHom,
    w: &ReducedWord,
    h: &SubgroupHandle,
) -> Result<CosetPermutation, GroupError> {
    let x = hom.eval(w)?;
    let images = h.left_action(x);
    let cycle_type = cycle_type_of(&images);
    Ok(CosetPermutation { images, cycle_type })
}

/// Free generators of `φ^-1(H)`.
#[derive(Debug, Clone, Serialize)]
pub struct SchreierBasis {
    /// Shortlex Schreier transversal, indexed by coset.
    pub transversal: Vec<ReducedWord>,
    pub generators: Vec<ReducedWord>,
    /// `1 + [G:H](g - 1)`
    pub expected_rank: usize,
}

/// Reidemeister–Schreier generators `u_j x u_{j·x}^-1` over a shortlex
/// transversal of the right cosets of `φ^-1(H)`, trivial ones dropped.
///
/// The right coset `K v` is tracked as the left coset `φ(v)^-1 H`.
pub fn schreier_generators(
    hom: &FreeGroupHom,
    h: &SubgroupHandle,
) -> Result<SchreierBasis, GroupError> {
    hom.require_surjective()?;
    let g = hom.group();
    let rank = hom.rank();
    let letters: Vec<Letter> = (1..=rank as Letter).flat_map(|i| [i, -i]).collect();
    let step = |j: usize, l: Letter| -> usize {
        let y = hom.letter_image(l).expect("letter in range");
        h.coset_of(g.mul(g.inv(y), h.transversal()[j]))
    };

    let start = h.coset_of(g.identity());
    let mut words: Vec<Option<ReducedWord>> = vec![None; h.index()];
    words[start] = Some(ReducedWord::empty());
    let mut queue = VecDeque::from([start]);
    while let Some(j) = queue.pop_front() {
        let u = words[j].clone().unwrap();
        for &l in &letters {
            let k = step(j, l);
            if words[k].is_none() {
                words[k] = Some(u.concat(&ReducedWord::reduce([l])));
                queue.push_back(k);
            }
        }
    }
    let transversal: Vec<ReducedWord> = words
        .into_iter()
        .map(|w| w.expect("action is transitive"))
        .collect();

    let mut generators = Vec::new();
    for j in 0..h.index() {
        for i in 1..=rank as Letter {
            let k = step(j, i);
            let t = transversal[j]
                .concat(&ReducedWord::reduce([i]))
                .concat(&transversal[k].inverse());
            if !t.is_empty() {
                generators.push(t);
            }
        }
    }
    Ok(SchreierBasis {
        transversal,
        generators,
        expected_rank: 1 + h.index() * (rank - 1),
    })
}

/// Index of the subgroup of the free group of the given rank generated by
/// `words`, via Stallings folding. `None` when the index is infinite.
pub fn folded_index(words: &[ReducedWord], rank: usize) -> Option<usize> {
    let mut edges: Vec<(usize, Letter, usize)> = Vec::new();
    let mut vertices = 1usize;
    for w in words {
        let ls = w.letters();
        let mut at = 0usize;
        for (pos, &l) in ls.iter().enumerate() {
            let next = if pos + 1 == ls.len() {
                0
            } else {
                vertices += 1;
                vertices - 1
            };
            if l > 0 {
                edges.push((at, l, next));
            } else {
                edges.push((next, -l, at));
            }
            at = next;
        }
    }

    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    loop {
        let mut out: HashMap<(usize, Letter), usize> = HashMap::new();
        let mut merge = None;
        'scan: for &(u, l, v) in &edges {
            let (u, v) = (find(&mut parent, u), find(&mut parent, v));
            for (key, target) in [((u, l), v), ((v, -l), u)] {
                match out.get(&key) {
                    Some(&t) if t != target => {
                        merge = Some((t, target));
                        break 'scan;
                    }
                    Some(_) => {}
                    None => {
                        out.insert(key, target);
                    }
                }
            }
        }
        match merge {
            Some((a, b)) => {
                let (a, b) = (find(&mut parent, a), find(&mut parent, b));
                parent[b] = a;
            }
            None => {
                let mut roots: Vec<usize> = (0..vertices).map(|x| find(&mut parent, x)).collect();
                roots.sort_unstable();
                roots.dedup();
                let complete = roots.iter().all(|&r| {
                    (1..=rank as Letter)
                        .all(|l| out.contains_key(&(r, l)) && out.contains_key(&(r, -l)))
                });
                return complete.then_some(roots.len());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::build_psl3;
    use super::*;

    fn setup() -> (crate::groups::Psl3, FreeGroupHom) {
        let g = build_psl3(2).unwrap();
        let (a, b) = find_generating_pair(g.group()).unwrap();
        let hom = hom_from_free(g.group().clone(), vec![a, b]).unwrap();
        (g, hom)
    }

    #[test]
    fn generating_pair_found() {
        let (_, hom) = setup();
        assert!(hom.is_surjective());
        assert_eq!(hom.image_order(), 168);
    }

    #[test]
    fn stabilizer_images_not_surjective() {
        let g = build_psl3(2).unwrap();
        let k1 = g.stabilizer_of_point([1, 0, 0]).unwrap();
        let e = k1.elements();
        let err = hom_from_free(g.group().clone(), vec![e[3], e[10]]).unwrap_err();
        match err {
            GroupError::NotSurjective { image_order, .. } => assert!(image_order <= 24),
            _ => panic!("{err:?}"),
        }
    }

    #[test]
    fn schreier_rank_and_membership() {
        let (g, hom) = setup();
        let k1 = g.stabilizer_of_point([1, 0, 0]).unwrap();
        let basis = schreier_generators(&hom, &k1).unwrap();
        assert_eq!(basis.generators.len(), 8);
        assert_eq!(basis.expected_rank, 8);
        for w in &basis.generators {
            assert!(k1.contains(hom.eval(w).unwrap()));
        }
        assert_eq!(folded_index(&basis.generators, 2), Some(7));

        let whole = SubgroupHandle::whole(g.group().clone());
        let basis = schreier_generators(&hom, &whole).unwrap();
        let names: Vec<String> = basis.generators.iter().map(ToString::to_string).collect();
        assert_eq!(names, ["a", "b"]);
    }

    #[test]
    fn folding_small_cases() {
        let a2: ReducedWord = "aa".parse().unwrap();
        let b: ReducedWord = "b".parse().unwrap();
        let aba: ReducedWord = "abA".parse().unwrap();
        assert_eq!(folded_index(&[a2, b, aba], 2), Some(2));
        assert_eq!(folded_index(&["a".parse().unwrap()], 2), None);
    }

    #[test]
    fn coset_action_of_order_seven() {
        let (g, hom) = setup();
        let k1 = g.stabilizer_of_point([1, 0, 0]).unwrap();
        let trivial = coset_action(&hom, &ReducedWord::empty(), &k1).unwrap();
        assert_eq!(trivial.cycle_type, vec![1; 7]);
        let grp = g.group();
        let words = crate::schottky::enumerate_reduced_words(2, 4);
        let w = words
            .into_iter()
            .find(|w| grp.element_order(hom.eval(w).unwrap()) == 7)
            .unwrap();
        assert_eq!(coset_action(&hom, &w, &k1).unwrap().cycle_type, vec![7]);
    }
}
