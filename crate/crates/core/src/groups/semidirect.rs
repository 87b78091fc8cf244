use std::sync::Arc;

use super::{FiniteGroup, GroupError, Perm, SubgroupHandle};

/// A group automorphism given by its table of images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    images: Vec<usize>,
}

impl Automorphism {
    pub fn identity(group: &FiniteGroup) -> Self {
        Self {
            images: (0..group.order()).collect(),
        }
    }

    /// Checks bijectivity and `σ(x s) = σ(x) σ(s)` for every `x` and every
    /// generator `s`, which is enough for a homomorphism.
    pub fn from_images(group: &FiniteGroup, images: Vec<usize>) -> Result<Self, GroupError> {
        let n = group.order();
        if images.len() != n {
            return Err(GroupError::NotAutomorphism);
        }
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n || seen[y] {
                return Err(GroupError::NotAutomorphism);
            }
            seen[y] = true;
        }
        for x in 0..n {
            for &s in group.generators() {
                if images[group.mul(x, s)] != group.mul(images[x], images[s]) {
                    return Err(GroupError::NotAutomorphism);
                }
            }
        }
        Ok(Self { images })
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_involution(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(x, &y)| self.images[y] == x)
    }
}

/// `G ⋊ C2` with `(g,ε)(h,δ) = (g σ^ε(h), ε+δ)`.
///
/// Realized on two copies of `G`'s permutation domain: `(g,0)` acts as `g`
/// on the first copy and as `σ(g)` on the second, while `(e,1)` swaps the
/// copies. Element `(g, ε)` has index `g + ε|G|`.
#[derive(Debug, Clone)]
pub struct SemidirectProduct {
    base: Arc<FiniteGroup>,
    sigma: Automorphism,
    group: Arc<FiniteGroup>,
}

impl SemidirectProduct {
    pub fn new(base: Arc<FiniteGroup>, sigma: Automorphism) -> Result<Self, GroupError> {
        if sigma.images.len() != base.order() {
            return Err(GroupError::NotAutomorphism);
        }
        if !sigma.is_involution() {
            return Err(GroupError::NotInvolution);
        }
        let n = base.order();
        let d = base.degree();
        let half = |g: usize, flip: bool| -> Perm {
            let a = base.element(g).images();
            let b = base.element(sigma.apply(g)).images();
            let mut images = Vec::with_capacity(2 * d);
            if flip {
                // (g,0)(e,1): swap first, then act
                images.extend(b.iter().map(|&x| x + d as u16));
                images.extend(a.iter().copied());
            } else {
                images.extend(a.iter().copied());
                images.extend(b.iter().map(|&x| x + d as u16));
            }
            Perm::from_images(images).expect("valid permutation")
        };
        let mut elements = Vec::with_capacity(2 * n);
        for flip in [false, true] {
            for g in 0..n {
                elements.push(half(g, flip));
            }
        }
        let mut gens: Vec<usize> = base.generators().to_vec();
        gens.push(n);
        let group = FiniteGroup::from_elements(elements, gens)?;
        Ok(Self {
            base,
            sigma,
            group: Arc::new(group),
        })
    }

    pub fn base(&self) -> &Arc<FiniteGroup> {
        &self.base
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn sigma(&self) -> &Automorphism {
        &self.sigma
    }

    /// Index of `(g, ε)`.
    pub fn element(&self, g: usize, flip: bool) -> usize {
        g + if flip { self.base.order() } else { 0 }
    }

    pub fn split(&self, x: usize) -> (usize, bool) {
        let n = self.base.order();
        (x % n, x >= n)
    }

    /// The element `(e, 1)`.
    pub fn flip(&self) -> usize {
        self.base.order()
    }

    /// Multiplication straight from the defining formula.
    pub fn mul_formula(&self, x: usize, y: usize) -> usize {
        let (g, e) = self.split(x);
        let (h, d) = self.split(y);
        let h = if e { self.sigma.apply(h) } else { h };
        self.element(self.base.mul(g, h), e ^ d)
    }

    /// Image of a subgroup of the base under `g -> (g, 0)`.
    pub fn embed(&self, h: &SubgroupHandle) -> SubgroupHandle {
        SubgroupHandle::from_elements(self.group.clone(), h.elements().to_vec())
            .expect("embedded subgroup")
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_psl3, find_conjugator};
    use super::*;

    #[test]
    fn direct_product_with_identity() {
        let g = build_psl3(2).unwrap();
        let sd =
            SemidirectProduct::new(g.group().clone(), Automorphism::identity(g.group())).unwrap();
        assert_eq!(sd.group().order(), 336);
        let f = sd.flip();
        for x in [0, 3, 77] {
            assert_eq!(sd.group().mul(f, x), sd.group().mul(x, f));
        }
    }

    #[test]
    fn inverse_transpose_extension() {
        let g = build_psl3(2).unwrap();
        let sd = SemidirectProduct::new(g.group().clone(), g.inverse_transpose()).unwrap();
        let gp = sd.group();
        assert_eq!(gp.order(), 336);
        for x in (0..336).step_by(7) {
            for y in (0..336).step_by(11) {
                assert_eq!(gp.mul(x, y), sd.mul_formula(x, y));
            }
        }
        // (g,1)^2 = (g σ(g), 0)
        for g0 in 0..168 {
            let x = sd.element(g0, true);
            let expect = sd.element(sd.base().mul(g0, sd.sigma().apply(g0)), false);
            assert_eq!(gp.mul(x, x), expect);
        }
        let k1 = sd.embed(&g.stabilizer_of_point([1, 0, 0]).unwrap());
        let k2 = sd.embed(&g.stabilizer_of_hyperplane([1, 0, 0]).unwrap());
        assert!(k1.conjugate(sd.flip()).same_elements(&k2));
        assert!(find_conjugator(&k1, &k2).is_some());
    }

    #[test]
    fn rejects_bad_maps() {
        let g = build_psl3(2).unwrap();
        let grp = g.group();
        let mut images: Vec<usize> = (0..grp.order()).collect();
        images.swap(1, 2);
        assert_eq!(
            Automorphism::from_images(grp, images).unwrap_err(),
            GroupError::NotAutomorphism
        );

        // conjugation by an element of order 3 is an automorphism but not an involution
        let x = (0..grp.order())
            .find(|&x| grp.element_order(x) == 3)
            .unwrap();
        let conj =
            Automorphism::from_images(grp, (0..grp.order()).map(|y| grp.conj(x, y)).collect())
                .unwrap();
        assert_eq!(
            SemidirectProduct::new(grp.clone(), conj).unwrap_err(),
            GroupError::NotInvolution
        );
    }
}
