//! Transplantation between the permutation modules `C[G/H1]` and `C[G/H2]`.
//!
//! Every `G`-equivariant map is a combination of the indicator matrices of
//! the `G`-orbits on `G/H2 × G/H1`. For a Gassmann triple some combination
//! is invertible, and it intertwines the Schreier-graph adjacency operators
//! of the two coset spaces.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::groups::{GroupError, SubgroupHandle};
use crate::intmat::IntMatrix;

/// Default bound on `|c_i|` in the intertwiner search.
pub const DEFAULT_COEFF_BOUND: i64 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransplantError {
    #[error("no invertible combination of the {basis} basis matrices with coefficients bounded by {bound}")]
    NoInvertibleIntertwiner { basis: usize, bound: i64 },
    #[error("the generating set only generates a subgroup of order {order} of {group_order}")]
    NotGenerating { order: usize, group_order: usize },
    #[error("subgroups belong to different groups")]
    DifferentGroups,
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn same_group(h1: &SubgroupHandle, h2: &SubgroupHandle) -> Result<(), TransplantError> {
    if Arc::ptr_eq(h1.group(), h2.group()) {
        Ok(())
    } else {
        Err(TransplantError::DifferentGroups)
    }
}

/// Permutation matrix of left translation by `g` on `G/H`.
pub fn translation_matrix(h: &SubgroupHandle, g: usize) -> IntMatrix {
    IntMatrix::permutation(&h.left_action(g))
}

/// Indicator matrices (`[G:H2] × [G:H1]`) of the `G`-orbits on coset pairs,
/// ordered by orbit size and then by the first pair in row-major order.
pub fn double_coset_basis(
    h1: &SubgroupHandle,
    h2: &SubgroupHandle,
) -> Result<Vec<IntMatrix>, TransplantError> {
    same_group(h1, h2)?;
    let g = h1.group();
    let (n2, n1) = (h2.index(), h1.index());
    let actions: Vec<(Vec<usize>, Vec<usize>)> = g
        .generators()
        .iter()
        .map(|&s| (h2.left_action(s), h1.left_action(s)))
        .collect();
    let mut orbit_of = vec![usize::MAX; n2 * n1];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..n2 * n1 {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        orbit_of[start] = id;
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            let (i, j) = (p / n1, p % n1);
            for (a2, a1) in &actions {
                let q = a2[i] * n1 + a1[j];
                if orbit_of[q] == usize::MAX {
                    orbit_of[q] = id;
                    members.push(q);
                    queue.push_back(q);
                }
            }
        }
        orbits.push(members);
    }
    orbits.sort_by_key(Vec::len);
    Ok(orbits
        .into_iter()
        .map(|members| {
            let mut m = IntMatrix::zeros(n2, n1);
            for p in members {
                m.set(p / n1, p % n1, 1);
            }
            m
        })
        .collect())
}

/// An invertible `G`-equivariant map `C[G/H1] -> C[G/H2]`.
#[derive(Debug, Clone, Serialize)]
pub struct IntertwinerMatrix {
    pub t: IntMatrix,
    pub coefficients: Vec<i64>,
    pub det: i128,
}

/// Coefficient vectors with entries in `[-bound, bound]`, by increasing
/// L1 norm; within a norm, coordinates run through `0, 1, -1, 2, -2, ...`
/// with the first coordinate varying fastest.
fn coefficient_vectors(len: usize, bound: i64) -> Vec<Vec<i64>> {
    let values: Vec<i64> = std::iter::once(0)
        .chain((1..=bound).flat_map(|v| [v, -v]))
        .collect();
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = vec![v];
                    p.extend_from_slice(&prefix);
                    p
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&c| c != 0));
    out.sort_by_key(|v| v.iter().map(|c| c.abs()).sum::<i64>());
    out
}

pub fn combine(basis: &[IntMatrix], coefficients: &[i64]) -> IntMatrix {
    let mut t = IntMatrix::zeros(basis[0].rows(), basis[0].cols());
    for (b, &c) in basis.iter().zip(coefficients) {
        if c != 0 {
            t = &t + &b.scale(c);
        }
    }
    t
}

/// First invertible combination of the double-coset basis in the fixed
/// enumeration order. For `H1 = H2` this is the identity.
pub fn build_intertwiner(
    h1: &SubgroupHandle,
    h2: &SubgroupHandle,
) -> Result<IntertwinerMatrix, TransplantError> {
    build_intertwiner_with_bound(h1, h2, DEFAULT_COEFF_BOUND)
}

pub fn build_intertwiner_with_bound(
    h1: &SubgroupHandle,
    h2: &SubgroupHandle,
    bound: i64,
) -> Result<IntertwinerMatrix, TransplantError> {
    let basis = double_coset_basis(h1, h2)?;
    let not_found = TransplantError::NoInvertibleIntertwiner {
        basis: basis.len(),
        bound,
    };
    if h1.index() != h2.index() {
        return Err(not_found);
    }
    for c in coefficient_vectors(basis.len(), bound) {
        let t = combine(&basis, &c);
        let det = t.det();
        if det != 0 {
            return Ok(IntertwinerMatrix {
                t,
                coefficients: c,
                det,
            });
        }
    }
    Err(not_found)
}

/// First `(g, row, col)` where `T λ1(g) != λ2(g) T`, checking every element.
pub fn equivariance_witness(
    t: &IntMatrix,
    h1: &SubgroupHandle,
    h2: &SubgroupHandle,
) -> Option<(usize, usize, usize)> {
    (0..h1.group().order()).find_map(|g| {
        let lhs = t * &translation_matrix(h1, g);
        let rhs = &translation_matrix(h2, g) * t;
        lhs.first_difference(&rhs).map(|(i, j)| (g, i, j))
    })
}

/// Coset graph of `G/H` under a multiset of generators.
#[derive(Debug, Clone, Serialize)]
pub struct SchreierGraph {
    pub generators: Vec<usize>,
    /// `(A f)(gH) = Σ_s f(s^-1 g H)`, i.e. `A = Σ_s λ(s)`.
    pub adjacency: IntMatrix,
}

impl SchreierGraph {
    pub fn vertices(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && (self.adjacency.get(i, j) != 0 || self.adjacency.get(j, i) != 0) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }
}

pub fn schreier_graph(
    h: &SubgroupHandle,
    generators: &[usize],
) -> Result<SchreierGraph, TransplantError> {
    let g = h.group();
    let order = g.closure(generators).len();
    if order != g.order() {
        return Err(TransplantError::NotGenerating {
            order,
            group_order: g.order(),
        });
    }
    let n = h.index();
    let mut adjacency = IntMatrix::zeros(n, n);
    for &s in generators {
        let back = h.left_action(g.inv(s));
        for (i, &j) in back.iter().enumerate() {
            adjacency.add_at(i, j, 1);
        }
    }
    Ok(SchreierGraph {
        generators: generators.to_vec(),
        adjacency,
    })
}

/// `S ∪ S^-1` as a multiset.
pub fn symmetrize(h: &SubgroupHandle, generators: &[usize]) -> Vec<usize> {
    let g = h.group();
    generators
        .iter()
        .copied()
        .chain(generators.iter().map(|&s| g.inv(s)))
        .collect()
}

/// Outcome of the discrete isoscattering check.
#[derive(Debug, Clone, Serialize)]
pub struct TransplantReport {
    pub intertwines: bool,
    pub charpoly_equal: bool,
    #[serde(rename = "T")]
    pub t: IntMatrix,
    pub charpoly: Vec<i128>,
    pub charpoly_h2: Vec<i128>,
    pub det: i128,
    /// `(operator, row, col)` of the first failed intertwining entry, with
    /// operator `"A"` for the plain generating set and `"A_sym"` for `S ∪ S^-1`.
    pub witness: Option<(String, usize, usize)>,
}

impl TransplantReport {
    pub fn passed(&self) -> bool {
        self.intertwines && self.charpoly_equal
    }
}

/// Builds `T` and checks it against the Schreier-graph operators.
pub fn verify_isoscattering_discrete(
    h1: &SubgroupHandle,
    h2: &SubgroupHandle,
    generators: &[usize],
) -> Result<TransplantReport, TransplantError> {
    let t = build_intertwiner(h1, h2)?;
    verify_with_intertwiner(h1, h2, generators, t.t)
}

/// As [`verify_isoscattering_discrete`] with a caller-supplied `T`.
pub fn verify_with_intertwiner(
    h1: &SubgroupHandle,
    h2: &SubgroupHandle,
    generators: &[usize],
    t: IntMatrix,
) -> Result<TransplantReport, TransplantError> {
    same_group(h1, h2)?;
    let sym = symmetrize(h1, generators);
    let mut witness = None;
    for (name, set) in [("A", generators), ("A_sym", &sym[..])] {
        let a1 = schreier_graph(h1, set)?.adjacency;
        let a2 = schreier_graph(h2, set)?.adjacency;
        if let Some((i, j)) = (&t * &a1).first_difference(&(&a2 * &t)) {
            witness = Some((name.to_string(), i, j));
            break;
        }
    }
    let p1 = schreier_graph(h1, &sym)?.adjacency.charpoly();
    let p2 = schreier_graph(h2, &sym)?.adjacency.charpoly();
    let det = if t.is_square() { t.det() } else { 0 };
    Ok(TransplantReport {
        intertwines: witness.is_none() && det != 0,
        charpoly_equal: p1 == p2,
        t,
        charpoly: p1,
        charpoly_h2: p2,
        det,
        witness,
    })
}
