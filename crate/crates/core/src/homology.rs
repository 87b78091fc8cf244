//! First homology of a closed genus-`g` surface and curve systems on it.
//!
//! Coordinates are in the symplectic basis `(a1, b1, ..., ag, bg)` with
//! `ai · bi = 1`. A Dehn twist about `d` acts as `x -> x + k (x·d) d`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{cycle_type_of, Automorphism, FiniteGroup, SubgroupHandle};
use crate::intmat::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("genus mismatch: {left} vs {right}")]
    GenusMismatch { left: usize, right: usize },
    #[error("homology vectors need an even, nonzero number of coordinates, got {0}")]
    OddLength(usize),
    #[error("twist curve {0:?} is not primitive")]
    NotPrimitive(Vec<i64>),
    #[error("curves {i} and {j} have intersection number {value}")]
    NotDisjoint { i: usize, j: usize, value: i64 },
    #[error("surface relator maps to a nontrivial element")]
    RelatorViolated,
    #[error("cannot parse surface word token {0:?}")]
    Parse(String),
    #[error("generator {index} out of range for genus {genus}")]
    GeneratorOutOfRange { index: usize, genus: usize },
    #[error("cover degree and genus must be positive")]
    InvalidDegree,
    #[error("involution check failed: tau^2 != I")]
    NotInvolution,
    #[error("matrix has shape {rows}x{cols}, expected {expected}x{expected}")]
    Shape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("homomorphism needs {expected} images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("no generating images found with first image of order dividing {k}")]
    NoFixture { k: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct HomologyClass {
    coords: Vec<i64>,
}

impl TryFrom<Vec<i64>> for HomologyClass {
    type Error = HomologyError;

    fn try_from(coords: Vec<i64>) -> Result<Self, Self::Error> {
        Self::new(coords)
    }
}

impl From<HomologyClass> for Vec<i64> {
    fn from(x: HomologyClass) -> Self {
        x.coords
    }
}

impl HomologyClass {
    pub fn new(coords: Vec<i64>) -> Result<Self, HomologyError> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(HomologyError::OddLength(coords.len()));
        }
        Ok(Self { coords })
    }

    pub fn zero(genus: usize) -> Self {
        Self {
            coords: vec![0; 2 * genus],
        }
    }

    /// `a_i`, 1-based.
    pub fn a(i: usize, genus: usize) -> Self {
        let mut x = Self::zero(genus);
        x.coords[2 * (i - 1)] = 1;
        x
    }

    /// `b_i`, 1-based.
    pub fn b(i: usize, genus: usize) -> Self {
        let mut x = Self::zero(genus);
        x.coords[2 * (i - 1) + 1] = 1;
        x
    }

    pub fn genus(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn add(&self, other: &Self) -> Result<Self, HomologyError> {
        check_genus(self, other)?;
        Ok(Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, k: i64) -> Self {
        Self {
            coords: self.coords.iter().map(|x| x * k).collect(),
        }
    }

    pub fn is_primitive(&self) -> bool {
        self.coords.iter().fold(0i64, |g, &x| gcd(g, x.abs())) == 1
    }

    /// `M x`
    pub fn transform(&self, m: &IntMatrix) -> Result<Self, HomologyError> {
        let n = self.coords.len();
        if m.rows() != n || m.cols() != n {
            return Err(HomologyError::Shape {
                rows: m.rows(),
                cols: m.cols(),
                expected: n,
            });
        }
        Ok(Self {
            coords: (0..n)
                .map(|i| (0..n).map(|j| m.get(i, j) * self.coords[j]).sum())
                .collect(),
        })
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn check_genus(x: &HomologyClass, y: &HomologyClass) -> Result<(), HomologyError> {
    if x.genus() == y.genus() {
        Ok(())
    } else {
        Err(HomologyError::GenusMismatch {
            left: x.genus(),
            right: y.genus(),
        })
    }
}

/// Block-diagonal `J` with blocks `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(genus: usize) -> IntMatrix {
    let mut j = IntMatrix::zeros(2 * genus, 2 * genus);
    for i in 0..genus {
        j.set(2 * i, 2 * i + 1, 1);
        j.set(2 * i + 1, 2 * i, -1);
    }
    j
}

/// `x^T J y`
pub fn intersection(x: &HomologyClass, y: &HomologyClass) -> Result<i64, HomologyError> {
    check_genus(x, y)?;
    Ok((0..x.genus())
        .map(|i| x.coords[2 * i] * y.coords[2 * i + 1] - x.coords[2 * i + 1] * y.coords[2 * i])
        .sum())
}

/// Matrix of `x -> x + k (x·d) d`.
pub fn dehn_twist(d: &HomologyClass, k: i64) -> Result<IntMatrix, HomologyError> {
    if !d.is_primitive() {
        return Err(HomologyError::NotPrimitive(d.coords.clone()));
    }
    let n = d.coords.len();
    // x·d = sum_j x_j (J d)_j
    let jd: Vec<i64> = (0..d.genus())
        .flat_map(|i| [d.coords[2 * i + 1], -d.coords[2 * i]])
        .collect();
    let mut m = IntMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            m.add_at(i, j, k * d.coords[i] * jd[j]);
        }
    }
    Ok(m)
}

/// `M^T J M = J`
pub fn is_symplectic(m: &IntMatrix) -> bool {
    if !m.is_square() || !m.rows().is_multiple_of(2) {
        return false;
    }
    let j = symplectic_form(m.rows() / 2);
    &(&m.transpose() * &j) * m == j
}

/// Inverse of a symplectic matrix, `-J M^T J`.
pub fn symplectic_inverse(m: &IntMatrix) -> IntMatrix {
    let j = symplectic_form(m.rows() / 2);
    (&(&j * &m.transpose()) * &j).scale(-1)
}

/// Rank over `F_2`.
pub fn rank_mod2(vectors: &[HomologyClass]) -> usize {
    let mut rows: Vec<Vec<u8>> = vectors
        .iter()
        .map(|v| v.coords.iter().map(|x| x.rem_euclid(2) as u8).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] == 1 {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Homological test that a disjoint system does not separate: the classes
/// must be independent mod 2. Pairwise intersections must vanish.
pub fn jointly_nonseparating(curves: &[HomologyClass]) -> Result<bool, HomologyError> {
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let value = intersection(&curves[i], &curves[j])?;
            if value != 0 {
                return Err(HomologyError::NotDisjoint {
                    i: i + 1,
                    j: j + 1,
                    value,
                });
            }
        }
    }
    Ok(rank_mod2(curves) == curves.len())
}

/// `k(g - 1) + 1`
pub fn cover_genus(k: usize, g: usize) -> Result<usize, HomologyError> {
    if k == 0 || g == 0 {
        return Err(HomologyError::InvalidDegree);
    }
    Ok(k * (g - 1) + 1)
}

/// Word in the surface group generators. Tokens are `a3`, `b1`, with
/// uppercase for inverses and an optional positive exponent `b5^3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurfaceWord {
    /// `(generator index, inverse)`, generator `2(i-1)` is `a_i` and
    /// `2(i-1)+1` is `b_i`.
    letters: Vec<(usize, bool)>,
}

impl SurfaceWord {
    pub fn letters(&self) -> &[(usize, bool)] {
        &self.letters
    }

    pub fn max_genus(&self) -> usize {
        self.letters
            .iter()
            .map(|&(g, _)| g / 2 + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn abelianization(&self, genus: usize) -> Result<HomologyClass, HomologyError> {
        let mut x = HomologyClass::zero(genus);
        for &(g, inv) in &self.letters {
            if g >= 2 * genus {
                return Err(HomologyError::GeneratorOutOfRange {
                    index: g / 2 + 1,
                    genus,
                });
            }
            x.coords[g] += if inv { -1 } else { 1 };
        }
        Ok(x)
    }
}

impl FromStr for SurfaceWord {
    type Err = HomologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let bad = || HomologyError::Parse(tok.to_string());
            let (body, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e.parse::<usize>().map_err(|_| bad())?),
                None => (tok, 1),
            };
            let mut chars = body.chars();
            let head = chars.next().ok_or_else(bad)?;
            let index: usize = chars.as_str().parse().map_err(|_| bad())?;
            if index == 0 || exp == 0 {
                return Err(bad());
            }
            let (kind, inv) = match head {
                'a' => (0, false),
                'A' => (0, true),
                'b' => (1, false),
                'B' => (1, true),
                _ => return Err(bad()),
            };
            letters.extend(std::iter::repeat_n((2 * (index - 1) + kind, inv), exp));
        }
        Ok(Self { letters })
    }
}

impl fmt::Display for SurfaceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self
            .letters
            .iter()
            .map(|&(g, inv)| {
                let c = match (g % 2, inv) {
                    (0, false) => 'a',
                    (0, true) => 'A',
                    (_, false) => 'b',
                    (_, true) => 'B',
                };
                format!("{c}{}", g / 2 + 1)
            })
            .collect();
        write!(f, "{}", toks.join(" "))
    }
}

/// Homomorphism from the genus-`g` surface group to a finite group.
#[derive(Debug, Clone)]
pub struct SurfaceHom {
    group: Arc<FiniteGroup>,
    /// Images of `a1, b1, a2, b2, ...`.
    images: Vec<usize>,
}

impl SurfaceHom {
    /// Checks that `prod [a_i, b_i]` maps to the identity.
    pub fn new(
        group: Arc<FiniteGroup>,
        genus: usize,
        images: Vec<usize>,
    ) -> Result<Self, HomologyError> {
        if images.len() != 2 * genus {
            return Err(HomologyError::ImageCount {
                expected: 2 * genus,
                got: images.len(),
            });
        }
        let g = &group;
        let mut acc = g.identity();
        for i in 0..genus {
            let (a, b) = (images[2 * i], images[2 * i + 1]);
            for x in [a, b, g.inv(a), g.inv(b)] {
                acc = g.mul(acc, x);
            }
        }
        if acc != g.identity() {
            return Err(HomologyError::RelatorViolated);
        }
        Ok(Self { group, images })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn genus(&self) -> usize {
        self.images.len() / 2
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn eval(&self, w: &SurfaceWord) -> Result<usize, HomologyError> {
        let g = &self.group;
        let mut acc = g.identity();
        for &(i, inv) in &w.letters {
            let x = *self
                .images
                .get(i)
                .ok_or(HomologyError::GeneratorOutOfRange {
                    index: i / 2 + 1,
                    genus: self.genus(),
                })?;
            acc = g.mul(acc, if inv { g.inv(x) } else { x });
        }
        Ok(acc)
    }

    pub fn generates(&self) -> bool {
        self.group.generates(&self.images)
    }
}

/// How a closed curve lifts to the cover attached to `H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftReport {
    /// Every lift is a closed curve mapping with degree 1.
    pub disjoint: bool,
    pub components: usize,
    pub cycle_lengths: Vec<usize>,
    pub degree: usize,
}

/// Lifts of the curve `w` to the cover attached to `H` (the regular cover
/// when `H` is trivial): one component per cycle of `φ(w)` on `G/H`.
pub fn lifts_disjointly(
    w: &SurfaceWord,
    hom: &SurfaceHom,
    h: &SubgroupHandle,
) -> Result<LiftReport, HomologyError> {
    let x = hom.eval(w)?;
    let cycle_lengths = cycle_type_of(&h.left_action(x));
    Ok(LiftReport {
        disjoint: cycle_lengths.iter().all(|&c| c == 1),
        components: cycle_lengths.len(),
        degree: h.index(),
        cycle_lengths,
    })
}

/// One curve of a system: homology class plus optional surface word.
#[derive(Debug, Clone)]
pub struct Curve {
    pub coords: HomologyClass,
    pub word: Option<SurfaceWord>,
}

/// Inputs of the curve-configuration check.
#[derive(Debug, Clone)]
pub struct CurveConfig {
    pub genus: usize,
    pub curves: Vec<Curve>,
    pub tau: IntMatrix,
    pub d: HomologyClass,
    pub k: i64,
    /// Class that the `k`-fold twist about `d` carries to the last curve.
    pub twist_base: Option<HomologyClass>,
    pub hom: Option<SurfaceHom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveReport {
    pub genus: usize,
    pub k: i64,
    pub tau_symplectic: bool,
    pub disjoint_nonseparating: bool,
    pub images_trivial: bool,
    pub tau_intersection: i64,
    pub intersection_ok: bool,
    /// Some `τ(γ_i)·γ_j` is nonzero, so the two curve systems define
    /// different Schottky structures.
    pub distinct_structures: bool,
    pub items: Vec<CheckItem>,
    pub note: String,
}

impl CurveReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> Vec<&CheckItem> {
        self.items.iter().filter(|i| !i.passed).collect()
    }
}

fn item(name: &str, passed: bool, detail: impl Into<String>) -> CheckItem {
    CheckItem {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// Checks a curve system against an involution `τ`.
///
/// (i) the curves are pairwise disjoint in homology and independent mod 2;
/// (ii) each curve word maps to the identity, so it lifts to `|G|`
/// disjoint closed curves; (iii) `τ(γ1)·γ_last = k` with `k != 0`. Fails
/// outright unless `τ² = I`.
pub fn verify_sunada_curve_config(cfg: &CurveConfig) -> Result<CurveReport, HomologyError> {
    let n = 2 * cfg.genus;
    if cfg.tau.rows() != n || cfg.tau.cols() != n {
        return Err(HomologyError::Shape {
            rows: cfg.tau.rows(),
            cols: cfg.tau.cols(),
            expected: n,
        });
    }
    if &cfg.tau * &cfg.tau != IntMatrix::identity(n) {
        return Err(HomologyError::NotInvolution);
    }
    for c in &cfg.curves {
        if c.coords.genus() != cfg.genus {
            return Err(HomologyError::GenusMismatch {
                left: cfg.genus,
                right: c.coords.genus(),
            });
        }
    }
    let mut items = Vec::new();
    let tau_symplectic = is_symplectic(&cfg.tau);
    items.push(item("tau_symplectic", tau_symplectic, ""));

    if let (Some(base), Some(last)) = (&cfg.twist_base, cfg.curves.last()) {
        let twisted = base.transform(&dehn_twist(&cfg.d, cfg.k)?)?;
        items.push(item(
            "twist_matches_last_curve",
            twisted == last.coords,
            format!("T_D^k(base) = {twisted}, last curve = {}", last.coords),
        ));
    }

    let mut words_ok = true;
    for (i, c) in cfg.curves.iter().enumerate() {
        if let Some(w) = &c.word {
            let ab = w.abelianization(cfg.genus)?;
            if ab != c.coords {
                words_ok = false;
                items.push(item(
                    "word_matches_coords",
                    false,
                    format!(
                        "curve {}: word abelianizes to {ab}, coords {}",
                        i + 1,
                        c.coords
                    ),
                ));
            }
        }
    }
    if words_ok {
        items.push(item("word_matches_coords", true, ""));
    }

    let classes: Vec<HomologyClass> = cfg.curves.iter().map(|c| c.coords.clone()).collect();
    let (disjoint_nonseparating, detail) = match jointly_nonseparating(&classes) {
        Ok(true) => (true, String::new()),
        Ok(false) => (false, "classes are dependent mod 2".to_string()),
        Err(e) => (false, e.to_string()),
    };
    items.push(item(
        "disjoint_nonseparating",
        disjoint_nonseparating,
        detail,
    ));

    let images_trivial = match &cfg.hom {
        None => {
            items.push(item("images_trivial", false, "no homomorphism configured"));
            false
        }
        Some(hom) => {
            let trivial = SubgroupHandle::trivial(hom.group().clone());
            let mut ok = true;
            let mut detail = Vec::new();
            for (i, c) in cfg.curves.iter().enumerate() {
                match &c.word {
                    None => {
                        ok = false;
                        detail.push(format!("curve {} has no word", i + 1));
                    }
                    Some(w) => {
                        let lift = lifts_disjointly(w, hom, &trivial)?;
                        if !lift.disjoint {
                            ok = false;
                            detail.push(format!(
                                "curve {} lifts with cycles {:?}",
                                i + 1,
                                lift.cycle_lengths
                            ));
                        }
                    }
                }
            }
            items.push(item("images_trivial", ok, detail.join("; ")));
            ok
        }
    };

    let tau_intersection = match (cfg.curves.first(), cfg.curves.last()) {
        (Some(first), Some(last)) => {
            intersection(&first.coords.transform(&cfg.tau)?, &last.coords)?
        }
        _ => 0,
    };
    let intersection_ok = cfg.k != 0 && tau_intersection == cfg.k;
    items.push(item(
        "tau_intersection_equals_k",
        intersection_ok,
        format!(
            "tau(gamma_1).gamma_last = {tau_intersection}, k = {}",
            cfg.k
        ),
    ));
    let distinct_structures = tau_intersection != 0;
    items.push(item("distinct_structures", distinct_structures, ""));

    Ok(CurveReport {
        genus: cfg.genus,
        k: cfg.k,
        tau_symplectic,
        disjoint_nonseparating,
        images_trivial,
        tau_intersection,
        intersection_ok,
        distinct_structures,
        items,
        note: "curve coordinates, twist curve and involution are a constructed configuration"
            .into(),
    })
}

impl CurveConfig {
    /// Same data without words or homomorphism.
    pub fn without_words(&self) -> Self {
        Self {
            curves: self
                .curves
                .iter()
                .map(|c| Curve {
                    coords: c.coords.clone(),
                    word: None,
                })
                .collect(),
            hom: None,
            ..self.clone()
        }
    }

    /// Homological data expressed in a new symplectic basis, `x -> P x`.
    /// Words and the homomorphism are dropped since `P` need not come from
    /// a known map of the surface group.
    pub fn change_basis(&self, p: &IntMatrix) -> Result<Self, HomologyError> {
        let inv = symplectic_inverse(p);
        Ok(Self {
            genus: self.genus,
            curves: self
                .curves
                .iter()
                .map(|c| {
                    Ok(Curve {
                        coords: c.coords.transform(p)?,
                        word: None,
                    })
                })
                .collect::<Result<_, HomologyError>>()?,
            tau: &(p * &self.tau) * &inv,
            d: self.d.transform(p)?,
            k: self.k,
            twist_base: self
                .twist_base
                .as_ref()
                .map(|b| b.transform(p))
                .transpose()?,
            hom: None,
        })
    }
}

/// Genus-5 double-cover configuration for a group `G` with involution `σ`.
///
/// `τ` reverses the handles (1 5)(2 4). Curves are `a1..a4` and
/// `γ5 = T_D^k(a5) = a5 + k b5` with `D = b5`, so `τ(γ1)·γ5 = k`. The
/// homomorphism sends every `a_i` and `b3` to `e`, `b1, b2` to `g1, g2`
/// and `b4, b5` to `σ(g2), σ(g1)`, which is compatible with `τ` and kills
/// the relator. `g1` is taken of maximal order dividing `k` so that
/// `σ(g1)^k = e`, and `g2` so that the four images generate `G`.
pub fn sunada_curve_fixture(
    group: Arc<FiniteGroup>,
    sigma: &Automorphism,
    k: i64,
) -> Result<CurveConfig, HomologyError> {
    let genus = 5;
    let divides =
        |o: usize| k == 0 && o == 1 || k != 0 && k.unsigned_abs().is_multiple_of(o as u64);
    let mut firsts: Vec<usize> = (0..group.order())
        .filter(|&x| divides(group.element_order(x)))
        .collect();
    firsts.sort_by_key(|&x| (std::cmp::Reverse(group.element_order(x)), x));
    let (g1, g2) = firsts
        .iter()
        .find_map(|&g1| {
            (0..group.order())
                .find(|&g2| group.generates(&[g1, g2, sigma.apply(g1), sigma.apply(g2)]))
                .map(|g2| (g1, g2))
        })
        .ok_or(HomologyError::NoFixture { k })?;
    let e = group.identity();
    let images = vec![e, g1, e, g2, e, e, e, sigma.apply(g2), e, sigma.apply(g1)];
    let hom = SurfaceHom::new(group, genus, images)?;

    let d = HomologyClass::b(5, genus);
    let base = HomologyClass::a(5, genus);
    let mut curves: Vec<Curve> = (1..=4)
        .map(|i| Curve {
            coords: HomologyClass::a(i, genus),
            word: Some(format!("a{i}").parse().expect("valid token")),
        })
        .collect();
    let twist_word = match k {
        0 => "a5".to_string(),
        k if k > 0 => format!("b5^{k} a5"),
        k => format!("B5^{} a5", -k),
    };
    curves.push(Curve {
        coords: base.transform(&dehn_twist(&d, k)?)?,
        word: Some(twist_word.parse()?),
    });
    Ok(CurveConfig {
        genus,
        curves,
        tau: handle_reversal(genus),
        d,
        k,
        twist_base: Some(base),
        hom: Some(hom),
    })
}

/// Involution swapping handles `i <-> genus + 1 - i`.
pub fn handle_reversal(genus: usize) -> IntMatrix {
    let mut p = vec![0usize; 2 * genus];
    for i in 0..genus {
        let j = genus - 1 - i;
        p[2 * i] = 2 * j;
        p[2 * i + 1] = 2 * j + 1;
    }
    IntMatrix::permutation(&p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_intersections() {
        let g = 3;
        assert_eq!(
            intersection(&HomologyClass::a(1, g), &HomologyClass::b(1, g)).unwrap(),
            1
        );
        assert_eq!(
            intersection(&HomologyClass::a(1, g), &HomologyClass::a(2, g)).unwrap(),
            0
        );
        assert_eq!(
            intersection(&HomologyClass::b(2, g), &HomologyClass::a(2, g)).unwrap(),
            -1
        );
        assert!(matches!(
            intersection(&HomologyClass::a(1, 2), &HomologyClass::a(1, 3)),
            Err(HomologyError::GenusMismatch { .. })
        ));
    }

    #[test]
    fn form_is_unimodular() {
        for g in 1..5 {
            assert_eq!(symplectic_form(g).det(), 1);
        }
    }

    #[test]
    fn genus_one_twist() {
        let a = HomologyClass::a(1, 1);
        let b = HomologyClass::b(1, 1);
        for k in -2..=3 {
            let m = dehn_twist(&a, k).unwrap();
            assert_eq!(a.transform(&m).unwrap(), a);
            assert_eq!(b.transform(&m).unwrap(), b.add(&a.scale(-k)).unwrap());
            assert!(is_symplectic(&m));
        }
        assert!(matches!(
            dehn_twist(&a.scale(2), 1),
            Err(HomologyError::NotPrimitive(_))
        ));
    }

    #[test]
    fn nonseparating_examples() {
        let g = 3;
        let all_a: Vec<_> = (1..=g).map(|i| HomologyClass::a(i, g)).collect();
        assert!(jointly_nonseparating(&all_a).unwrap());
        let a1 = HomologyClass::a(1, g);
        assert!(!jointly_nonseparating(&[a1.clone(), a1.clone()]).unwrap());
        assert!(matches!(
            jointly_nonseparating(&[a1, HomologyClass::b(1, g)]),
            Err(HomologyError::NotDisjoint { value: 1, .. })
        ));
    }

    #[test]
    fn genus_of_covers() {
        assert_eq!(cover_genus(1, 4).unwrap(), 4);
        assert_eq!(cover_genus(2, 3).unwrap(), 5);
        assert_eq!(cover_genus(7, 3).unwrap(), 15);
        assert!(cover_genus(0, 3).is_err());
    }

    #[test]
    fn surface_words() {
        let w: SurfaceWord = "a1 b1 A1 B2^2".parse().unwrap();
        assert_eq!(w.letters().len(), 5);
        assert_eq!(w.abelianization(2).unwrap().coords(), &[0, 1, 0, -2]);
        assert_eq!(w.to_string(), "a1 b1 A1 B2 B2");
        assert!("c1".parse::<SurfaceWord>().is_err());
        assert!("a0".parse::<SurfaceWord>().is_err());
        assert!("a1^0".parse::<SurfaceWord>().is_err());
    }

    #[test]
    fn relator_and_lifts() {
        let c2 = Arc::new(FiniteGroup::cyclic(2));
        let t = c2.generators()[0];
        // a1 -> t, b1 -> e: commutator trivial since C2 is abelian
        let hom = SurfaceHom::new(c2.clone(), 1, vec![t, 0]).unwrap();
        let trivial = SubgroupHandle::trivial(c2.clone());
        let r = lifts_disjointly(&"a1".parse().unwrap(), &hom, &trivial).unwrap();
        assert_eq!((r.disjoint, r.components), (false, 1));
        let r = lifts_disjointly(&"".parse().unwrap(), &hom, &trivial).unwrap();
        assert_eq!((r.disjoint, r.components), (true, 2));
        let r = lifts_disjointly(&"a1 a1".parse().unwrap(), &hom, &trivial).unwrap();
        assert!(r.disjoint);
    }

    #[test]
    fn relator_violation_detected() {
        let g = crate::groups::build_psl3(2).unwrap();
        let grp = g.group().clone();
        let (a, b) = crate::groups::find_generating_pair(&grp).unwrap();
        assert_eq!(
            SurfaceHom::new(grp, 1, vec![a, b]).unwrap_err(),
            HomologyError::RelatorViolated
        );
    }

    #[test]
    fn handle_reversal_is_symplectic_involution() {
        let t = handle_reversal(5);
        assert!(is_symplectic(&t));
        assert_eq!(&t * &t, IntMatrix::identity(10));
        assert_eq!(
            HomologyClass::a(1, 5).transform(&t).unwrap(),
            HomologyClass::a(5, 5)
        );
    }

    fn fixture(k: i64) -> CurveConfig {
        let g = crate::groups::build_psl3(2).unwrap();
        sunada_curve_fixture(g.group().clone(), &g.inverse_transpose(), k).unwrap()
    }

    #[test]
    fn fixture_passes_for_small_k() {
        for k in 1..=3 {
            let cfg = fixture(k);
            let hom = cfg.hom.as_ref().unwrap();
            assert!(hom.generates());
            let r = verify_sunada_curve_config(&cfg).unwrap();
            assert!(r.passed(), "k = {k}: {:?}", r.failures());
            assert_eq!(r.tau_intersection, k);
            assert!(r.distinct_structures);
            // first image has order exactly k in PSL(3,2)
            assert_eq!(hom.group().element_order(hom.images()[1]), k as usize);
        }
    }

    #[test]
    fn degenerate_k_rejected() {
        let r = verify_sunada_curve_config(&fixture(0)).unwrap();
        assert!(!r.passed());
        assert!(!r.intersection_ok);
        assert!(!r.distinct_structures);
        assert_eq!(r.tau_intersection, 0);
    }

    #[test]
    fn wrong_exponent_breaks_lifting() {
        let mut cfg = fixture(2);
        cfg.curves[4].word = Some("b5 a5".parse().unwrap());
        cfg.curves[4].coords = HomologyClass::new(vec![0, 0, 0, 0, 0, 0, 0, 0, 1, 1]).unwrap();
        let r = verify_sunada_curve_config(&cfg).unwrap();
        assert!(!r.images_trivial);
        assert!(r.disjoint_nonseparating);
    }

    #[test]
    fn non_involution_rejected_first() {
        let mut cfg = fixture(2);
        cfg.tau = dehn_twist(&HomologyClass::a(1, 5), 1).unwrap();
        assert_eq!(
            verify_sunada_curve_config(&cfg).unwrap_err(),
            HomologyError::NotInvolution
        );
    }

    #[test]
    fn basis_change_invariance() {
        let cfg = fixture(3);
        let p = &(&dehn_twist(
            &HomologyClass::new(vec![1, 0, 2, -1, 0, 0, 1, 0, 0, 3]).unwrap(),
            2,
        )
        .unwrap()
            * &dehn_twist(&HomologyClass::b(2, 5), -1).unwrap())
            * &handle_reversal(5);
        assert!(is_symplectic(&p));
        let a = verify_sunada_curve_config(&cfg.without_words()).unwrap();
        let b = verify_sunada_curve_config(&cfg.change_basis(&p).unwrap()).unwrap();
        let verdicts = |r: &CurveReport| {
            r.items
                .iter()
                .map(|i| (i.name.clone(), i.passed))
                .collect::<Vec<_>>()
        };
        assert_eq!(verdicts(&a), verdicts(&b));
        assert_eq!(a.tau_intersection, b.tau_intersection);
    }

    #[test]
    fn symplectic_inverse_roundtrip() {
        let m = &dehn_twist(&HomologyClass::new(vec![1, 2, 0, 1]).unwrap(), 3).unwrap()
            * &handle_reversal(2);
        assert_eq!(&m * &symplectic_inverse(&m), IntMatrix::identity(4));
    }
}
