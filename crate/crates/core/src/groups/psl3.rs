use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::{Automorphism, FiniteGroup, GroupError, Perm, SubgroupHandle};

/// Largest `p` accepted by [`build_psl3`].
pub const DEFAULT_MAX_P: u32 = 3;

pub type Mat3 = [[u32; 3]; 3];

/// PSL(3, p) acting on the `p² + p + 1` points of the projective plane.
///
/// Points are stored with their first nonzero coordinate equal to 1 and
/// `(1,0,0)` is point 0. Each group element keeps one matrix representative
/// of determinant 1.
#[derive(Debug, Clone)]
pub struct Psl3 {
    p: u32,
    points: Vec<[u32; 3]>,
    point_index: HashMap<[u32; 3], usize>,
    group: Arc<FiniteGroup>,
    matrices: Vec<Mat3>,
}

pub fn build_psl3(p: u32) -> Result<Psl3, GroupError> {
    build_psl3_with_limit(p, DEFAULT_MAX_P)
}

pub fn build_psl3_with_limit(p: u32, max_p: u32) -> Result<Psl3, GroupError> {
    if p < 2
        || (2..p)
            .take_while(|d| d * d <= p)
            .any(|d| p.is_multiple_of(d))
    {
        return Err(GroupError::NotPrime(p));
    }
    if p > max_p {
        return Err(GroupError::TooLarge { p, max: max_p });
    }
    let points = projective_points(p);
    let point_index: HashMap<[u32; 3], usize> =
        points.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let perm_of = |m: &Mat3| -> Perm {
        let images = points
            .iter()
            .map(|v| {
                point_index[&normalize(mat_vec(m, v, p), p).expect("invertible matrix")] as u16
            })
            .collect();
        Perm::from_images(images).expect("invertible matrix permutes points")
    };

    // elementary transvections generate SL(3, p)
    let mut gens = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let mut m = identity_mat();
                m[i][j] = 1;
                gens.push(m);
            }
        }
    }

    let id = identity_mat();
    let mut perms = vec![perm_of(&id)];
    let mut matrices = vec![id];
    let mut lookup = HashMap::from([(perms[0].clone(), 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for s in &gens {
            let m = mat_mul(s, &matrices[i], p);
            let perm = perm_of(&m);
            if !lookup.contains_key(&perm) {
                lookup.insert(perm.clone(), perms.len());
                queue.push_back(perms.len());
                perms.push(perm);
                matrices.push(m);
            }
        }
    }
    let gen_idx = gens.iter().map(|m| lookup[&perm_of(m)]).collect();
    let group = FiniteGroup::from_elements(perms, gen_idx)?;
    Ok(Psl3 {
        p,
        points,
        point_index,
        group: Arc::new(group),
        matrices,
    })
}

impl Psl3 {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn points(&self) -> &[[u32; 3]] {
        &self.points
    }

    pub fn point_index(&self, v: [u32; 3]) -> Result<usize, GroupError> {
        normalize(v.map(|x| x % self.p), self.p)
            .and_then(|n| self.point_index.get(&n).copied())
            .ok_or_else(|| GroupError::InvalidFlag(v.to_vec()))
    }

    /// Matrix representative of element `i`.
    pub fn matrix(&self, i: usize) -> Mat3 {
        self.matrices[i]
    }

    /// Group element acting like the invertible matrix `m` (entries taken mod p).
    pub fn element_of_matrix(&self, m: &Mat3) -> Result<usize, GroupError> {
        let m = m.map(|r| r.map(|x| x % self.p));
        if det(&m, self.p) == 0 {
            return Err(GroupError::InvalidElement(format!("singular matrix {m:?}")));
        }
        let images = self
            .points
            .iter()
            .map(|v| self.point_index[&normalize(mat_vec(&m, v, self.p), self.p).unwrap()] as u16)
            .collect();
        let perm = Perm::from_images(images).unwrap();
        self.group.index_of(&perm).ok_or_else(|| {
            GroupError::InvalidElement(format!("matrix {m:?} is not in PSL(3,{})", self.p))
        })
    }

    /// Points `x` with `w · x = 0`.
    pub fn hyperplane_points(&self, w: [u32; 3]) -> Result<Vec<usize>, GroupError> {
        if w.iter().all(|&x| x % self.p == 0) {
            return Err(GroupError::InvalidFlag(w.to_vec()));
        }
        Ok((0..self.points.len())
            .filter(|&i| dot(&w, &self.points[i], self.p) == 0)
            .collect())
    }

    pub fn stabilizer_of_point(&self, v: [u32; 3]) -> Result<SubgroupHandle, GroupError> {
        let x = self.point_index(v)?;
        Ok(SubgroupHandle::from_predicate(self.group.clone(), |g| {
            g.apply(x) == x
        }))
    }

    pub fn stabilizer_of_hyperplane(&self, w: [u32; 3]) -> Result<SubgroupHandle, GroupError> {
        let on = self.hyperplane_points(w)?;
        let mut member = vec![false; self.points.len()];
        for &x in &on {
            member[x] = true;
        }
        Ok(SubgroupHandle::from_predicate(self.group.clone(), |g| {
            on.iter().all(|&x| member[g.apply(x)])
        }))
    }

    /// `A -> (A^-1)^t`.
    pub fn inverse_transpose(&self) -> Automorphism {
        let images = self
            .matrices
            .iter()
            .map(|m| {
                let it = transpose(&mat_inverse(m, self.p).expect("group matrices are invertible"));
                self.element_of_matrix(&it)
                    .expect("inverse transpose preserves PSL")
            })
            .collect();
        Automorphism::from_images(&self.group, images)
            .expect("inverse transpose is an automorphism")
    }
}

fn projective_points(p: u32) -> Vec<[u32; 3]> {
    let mut pts = Vec::new();
    for x in 0..p {
        for y in 0..p {
            pts.push([1, x, y]);
        }
    }
    for y in 0..p {
        pts.push([0, 1, y]);
    }
    pts.push([0, 0, 1]);
    pts
}

fn inv_mod(a: u32, p: u32) -> u32 {
    (1..p)
        .find(|&b| a * b % p == 1)
        .expect("nonzero residue mod prime")
}

fn normalize(v: [u32; 3], p: u32) -> Option<[u32; 3]> {
    let lead = *v.iter().find(|&&x| x != 0)?;
    let s = inv_mod(lead, p);
    Some(v.map(|x| x * s % p))
}

fn dot(a: &[u32; 3], b: &[u32; 3], p: u32) -> u32 {
    (0..3).map(|i| a[i] * b[i]).sum::<u32>() % p
}

fn identity_mat() -> Mat3 {
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
}

pub fn mat_mul(a: &Mat3, b: &Mat3, p: u32) -> Mat3 {
    let mut out = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum::<u32>() % p;
        }
    }
    out
}

fn mat_vec(m: &Mat3, v: &[u32; 3], p: u32) -> [u32; 3] {
    [0, 1, 2].map(|i| (0..3).map(|k| m[i][k] * v[k]).sum::<u32>() % p)
}

pub fn transpose(m: &Mat3) -> Mat3 {
    let mut t = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

pub fn det(m: &Mat3, p: u32) -> u32 {
    let m = m.map(|r| r.map(i64::from));
    let d = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    d.rem_euclid(p as i64) as u32
}

pub fn mat_inverse(m: &Mat3, p: u32) -> Option<Mat3> {
    let d = det(m, p);
    if d == 0 {
        return None;
    }
    let dinv = inv_mod(d, p) as i64;
    let pm = p as i64;
    let e = |i: usize, j: usize| m[i % 3][j % 3] as i64;
    let mut out = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // cofactor of (j, i)
            let c = e(j + 1, i + 1) * e(j + 2, i + 2) - e(j + 1, i + 2) * e(j + 2, i + 1);
            out[i][j] = (c * dinv).rem_euclid(pm) as u32;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psl32_order_matches_matrix_count() {
        let g = build_psl3(2).unwrap();
        assert_eq!(g.group().order(), 168);
        // every invertible binary matrix, mapped to its permutation, hits a
        // distinct group element: the action has trivial kernel
        let mut seen = std::collections::HashSet::new();
        for bits in 0u32..512 {
            let m: Mat3 = [0, 1, 2].map(|i| [0, 1, 2].map(|j| (bits >> (3 * i + j)) & 1));
            if det(&m, 2) == 1 {
                assert!(seen.insert(g.element_of_matrix(&m).unwrap()));
            }
        }
        assert_eq!(seen.len(), 168);
    }

    #[test]
    fn psl33_order() {
        let g = build_psl3(3).unwrap();
        assert_eq!(g.group().order(), 5616);
        assert_eq!(g.points().len(), 13);
    }

    #[test]
    fn rejects_large_and_composite() {
        assert!(matches!(
            build_psl3(5),
            Err(GroupError::TooLarge { p: 5, max: 3 })
        ));
        assert!(matches!(build_psl3(4), Err(GroupError::NotPrime(4))));
    }

    #[test]
    fn stabilizer_block_shapes() {
        let g = build_psl3(2).unwrap();
        let k1 = g.stabilizer_of_point([1, 0, 0]).unwrap();
        let k2 = g.stabilizer_of_hyperplane([1, 0, 0]).unwrap();
        assert_eq!(k1.order(), 24);
        assert_eq!(k2.order(), 24);
        assert_eq!(k1.index(), 7);
        for i in 0..g.group().order() {
            let m = g.matrix(i);
            assert_eq!(k1.contains(i), m[1][0] == 0 && m[2][0] == 0);
            assert_eq!(k2.contains(i), m[0][1] == 0 && m[0][2] == 0);
        }
    }

    #[test]
    fn matrix_inverse_roundtrip() {
        let m = [[1, 2, 0], [0, 1, 1], [2, 0, 1]];
        let inv = mat_inverse(&m, 3).unwrap();
        assert_eq!(mat_mul(&m, &inv, 3), identity_mat());
        assert!(mat_inverse(&[[1, 1, 0], [1, 1, 0], [0, 0, 1]], 3).is_none());
    }
}
