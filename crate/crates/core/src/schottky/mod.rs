//! Classical Schottky groups built from circle pairings.
//!
//! Generator `i` (1-based) pairs circle `2i - 1` with circle `2i`: it maps the
//! first onto the second and sends the interior of the first to the exterior
//! of the second. Circle indices in reports and errors are 1-based.

mod words;

pub use words::*;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::moebius::{
    image_of_circle, Circle, Classification, ComplexLength, GeneralizedCircle, MoebiusError,
    MoebiusMap,
};

/// Default tolerance for margins and pairing residuals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Number of sample points used for the pairing residual.
pub const PAIRING_SAMPLES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchottkyError {
    #[error("need 2g circles for g generators, got {circles} circles and {generators} generators")]
    ShapeMismatch { circles: usize, generators: usize },
    #[error("generator {generator} does not pair its circles (residual {residual:e})")]
    InvalidPairing { generator: usize, residual: f64 },
    #[error("generator {generator} maps the interior of its source circle to the interior of its target")]
    WrongOrientation { generator: usize },
    #[error("circles {i} and {j} overlap (depth {depth:e})")]
    CirclesOverlap { i: usize, j: usize, depth: f64 },
    #[error("word uses generator {letter} but the group has rank {rank}")]
    LetterOutOfRange { letter: i32, rank: usize },
    #[error("word {word} is not loxodromic")]
    NotLoxodromic { word: String },
    #[error("disk for word {word} is not nested in its parent")]
    DegenerateDisk { word: String },
    #[error("no root bracketed for the dimension estimate at depth {depth}")]
    NoBracket { depth: usize },
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

/// Pairing circles plus generators.
#[derive(Debug, Clone, PartialEq)]
pub struct SchottkyData {
    circles: Vec<Circle>,
    generators: Vec<MoebiusMap>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairSeparation {
    pub i: usize,
    pub j: usize,
    /// `|c_i - c_j| - r_i - r_j`
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairingCheck {
    pub generator: usize,
    /// Max distance from the image of a sampled source point to the target circle.
    pub residual: f64,
    pub interior_to_exterior: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub tol: f64,
    pub separations: Vec<PairSeparation>,
    pub pairings: Vec<PairingCheck>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn min_margin(&self) -> f64 {
        self.separations
            .iter()
            .map(|s| s.margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_residual(&self) -> f64 {
        self.pairings.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    /// First failure in the order overlaps, residuals, orientation.
    pub fn first_failure(&self) -> Option<SchottkyError> {
        if let Some(s) = self.separations.iter().find(|s| !(s.margin > self.tol)) {
            return Some(SchottkyError::CirclesOverlap {
                i: s.i,
                j: s.j,
                depth: -s.margin,
            });
        }
        if let Some(p) = self.pairings.iter().find(|p| !(p.residual < self.tol)) {
            return Some(SchottkyError::InvalidPairing {
                generator: p.generator,
                residual: p.residual,
            });
        }
        self.pairings
            .iter()
            .find(|p| !p.interior_to_exterior)
            .map(|p| SchottkyError::WrongOrientation {
                generator: p.generator,
            })
    }
}

impl SchottkyData {
    pub fn new(circles: Vec<Circle>, generators: Vec<MoebiusMap>) -> Result<Self, SchottkyError> {
        if generators.is_empty() || circles.len() != 2 * generators.len() {
            return Err(SchottkyError::ShapeMismatch {
                circles: circles.len(),
                generators: generators.len(),
            });
        }
        Ok(Self {
            circles,
            generators,
        })
    }

    /// Four unit-spaced circles at `±3` and `±3i` of the given radius, paired
    /// by `z -> ±3 + r^2 / (z ± 3)`-type maps. With `radius = 1` the
    /// generators are `A(z) = 3 + 1/(z + 3)` and `B(z) = 3i + 1/(z + 3i)`.
    pub fn four_circle_example(radius: f64) -> Self {
        let r2 = radius * radius;
        let pair = |c: Complex64| {
            // z -> c + r^2 / (z + c)  ==  [[c, c^2 + r^2], [1, c]]
            MoebiusMap::new(c, c * c + r2, Complex64::new(1.0, 0.0), c).expect("nonsingular")
        };
        let three = Complex64::new(3.0, 0.0);
        let three_i = Complex64::new(0.0, 3.0);
        let circles = vec![
            Circle::new(-three, radius).expect("positive radius"),
            Circle::new(three, radius).expect("positive radius"),
            Circle::new(-three_i, radius).expect("positive radius"),
            Circle::new(three_i, radius).expect("positive radius"),
        ];
        Self::new(circles, vec![pair(three), pair(three_i)]).expect("2g circles")
    }

    /// Rank-one group generated by `A(z) = 3 + 1/(z + 3)` pairing the unit
    /// circles at `-3` and `3`.
    pub fn rank_one_example() -> Self {
        let full = Self::four_circle_example(1.0);
        Self::new(full.circles[..2].to_vec(), vec![full.generators[0]]).expect("2g circles")
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    pub fn generators(&self) -> &[MoebiusMap] {
        &self.generators
    }

    /// Map for a single letter.
    pub fn letter_map(&self, letter: Letter) -> Result<MoebiusMap, SchottkyError> {
        let idx = letter.unsigned_abs() as usize;
        if letter == 0 || idx > self.rank() {
            return Err(SchottkyError::LetterOutOfRange {
                letter,
                rank: self.rank(),
            });
        }
        let m = self.generators[idx - 1];
        Ok(if letter > 0 { m } else { m.inverse() })
    }

    /// Circle that the letter maps the exterior of its source into.
    pub fn target_circle(&self, letter: Letter) -> &Circle {
        let i = letter.unsigned_abs() as usize;
        if letter > 0 {
            &self.circles[2 * i - 1]
        } else {
            &self.circles[2 * i - 2]
        }
    }

    /// Separation margins and pairing residuals; never fails.
    pub fn inspect(&self, tol: f64) -> ValidationReport {
        let mut separations = Vec::new();
        for i in 0..self.circles.len() {
            for j in i + 1..self.circles.len() {
                separations.push(PairSeparation {
                    i: i + 1,
                    j: j + 1,
                    margin: self.circles[i].separation(&self.circles[j]),
                });
            }
        }
        let pairings = self
            .generators
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let source = &self.circles[2 * k];
                let target = &self.circles[2 * k + 1];
                let residual = source
                    .sample(PAIRING_SAMPLES, 0.1)
                    .into_iter()
                    .map(|z| match m.apply_finite(z) {
                        Some(w) => target.distance_to(w),
                        None => f64::INFINITY,
                    })
                    .fold(0.0, f64::max);
                let img = image_of_circle(m, &GeneralizedCircle::Circle(*source));
                PairingCheck {
                    generator: k + 1,
                    residual,
                    interior_to_exterior: !img.interior_to_interior,
                }
            })
            .collect();
        let mut report = ValidationReport {
            tol,
            separations,
            pairings,
            passed: false,
        };
        report.passed = report.first_failure().is_none();
        report
    }

    /// Checks the circle configuration and pairings.
    pub fn validate(&self, tol: f64) -> Result<ValidationReport, SchottkyError> {
        let report = self.inspect(tol);
        match report.first_failure() {
            Some(e) => Err(e),
            None => Ok(report),
        }
    }

    /// Product of the generators along the word, left to right.
    pub fn word_to_map(&self, w: &ReducedWord) -> Result<MoebiusMap, SchottkyError> {
        let mut acc = MoebiusMap::identity();
        for &l in w.letters() {
            acc = acc.compose(&self.letter_map(l)?);
        }
        Ok(acc)
    }

    /// Complex length of the element named by `w`.
    pub fn word_complex_length(&self, w: &ReducedWord) -> Result<ComplexLength, SchottkyError> {
        match self.word_to_map(w)?.classify()? {
            Classification::Loxodromic(l) => Ok(l.length),
            _ => Err(SchottkyError::NotLoxodromic {
                word: w.to_string(),
            }),
        }
    }

    /// Nested disks of the limit set construction down to `depth`.
    ///
    /// Level `n` holds one disk per reduced word `l1 ... ln`: the image of the
    /// target disk of `ln` under `l1 ... l(n-1)`.
    pub fn limit_set_sample(&self, depth: usize) -> Result<LimitSetSample, SchottkyError> {
        let g = self.rank() as u32;
        let mut levels: Vec<Vec<LimitDisk>> = Vec::new();
        // (word, map of the whole word) for the frontier
        let mut frontier: Vec<(ReducedWord, MoebiusMap, usize)> = Vec::new();
        let first: Vec<LimitDisk> = (0..2 * g)
            .map(|k| {
                let l = letter_from_key(k);
                let c = self.target_circle(l);
                LimitDisk {
                    word: ReducedWord::new(vec![l]).expect("single letter"),
                    center: c.center,
                    radius: c.radius,
                    parent: None,
                }
            })
            .collect();
        for (idx, d) in first.iter().enumerate() {
            frontier.push((d.word.clone(), self.word_to_map(&d.word)?, idx));
        }
        if depth >= 1 {
            levels.push(first);
        }
        for _ in 1..depth {
            let mut level = Vec::new();
            let mut next = Vec::new();
            for (word, map, parent) in &frontier {
                let last = *word.letters().last().expect("nonempty");
                for k in 0..2 * g {
                    let l = letter_from_key(k);
                    if l == -last {
                        continue;
                    }
                    let w = ReducedWord::new(word.letters().iter().copied().chain([l]).collect())
                        .expect("extension of a reduced word by a non-inverse letter");
                    let img =
                        image_of_circle(map, &GeneralizedCircle::Circle(*self.target_circle(l)));
                    let disk = match (img.image, img.interior_to_interior) {
                        (GeneralizedCircle::Circle(c), true) => c,
                        _ => {
                            return Err(SchottkyError::DegenerateDisk {
                                word: w.to_string(),
                            })
                        }
                    };
                    let full = map.compose(&self.letter_map(l)?);
                    next.push((w.clone(), full, level.len()));
                    level.push(LimitDisk {
                        word: w,
                        center: disk.center,
                        radius: disk.radius,
                        parent: Some(*parent),
                    });
                }
            }
            levels.push(level);
            frontier = next;
        }
        Ok(LimitSetSample { levels })
    }

    /// Solves `sum_{|w| = depth} r_w^s = 1` for `s` by bisection on `(0, 2)`.
    ///
    /// Also reports the level-ratio estimate, the root of
    /// `sum_{|w| = depth} r_w^s = sum_{|w| = depth - 1} r_w^s`, which cancels
    /// the scale of the base circles and converges much faster.
    pub fn delta_estimate(&self, depth: usize) -> Result<DeltaEstimate, SchottkyError> {
        if depth < 2 {
            return Err(SchottkyError::NoBracket { depth });
        }
        let sample = self.limit_set_sample(depth)?;
        let radii =
            |d: usize| -> Vec<f64> { sample.levels[d - 1].iter().map(|x| x.radius).collect() };
        let mut by_depth = Vec::new();
        for d in 2..=depth {
            let root = bisect(|s| moment(&radii(d), s) - 1.0)
                .ok_or(SchottkyError::NoBracket { depth: d })?;
            by_depth.push((d, root));
        }
        let (deep, shallow) = (radii(depth), radii(depth - 1));
        let refined = bisect(|s| moment(&deep, s) - moment(&shallow, s));
        let value = by_depth.last().expect("depth >= 2").1;
        let diffs: Vec<f64> = by_depth.windows(2).map(|w| w[1].1 - w[0].1).collect();
        let monotone = diffs.iter().all(|&x| x <= 0.0) || diffs.iter().all(|&x| x >= 0.0);
        Ok(DeltaEstimate {
            depth,
            value,
            refined,
            by_depth,
            drift: diffs.last().copied().unwrap_or(0.0),
            monotone,
        })
    }
}

fn moment(radii: &[f64], s: f64) -> f64 {
    radii.iter().map(|r| r.powf(s)).sum()
}

/// Root of a decreasing function on `(0, 2)`.
fn bisect(f: impl Fn(f64) -> f64) -> Option<f64> {
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    if !(f(lo) > 0.0 && f(hi) < 0.0) {
        return None;
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitDisk {
    pub word: ReducedWord,
    pub center: Complex64,
    pub radius: f64,
    /// Index of the enclosing disk in the previous level.
    pub parent: Option<usize>,
}

impl LimitDisk {
    pub fn circle(&self) -> Circle {
        Circle {
            center: self.center,
            radius: self.radius,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LimitSetSample {
    /// `levels[n - 1]` holds the disks for words of length `n`.
    pub levels: Vec<Vec<LimitDisk>>,
}

impl LimitSetSample {
    /// Total area of the disks at the given level (1-based).
    pub fn covering_area(&self, depth: usize) -> f64 {
        self.levels[depth - 1]
            .iter()
            .map(|d| PI * d.radius * d.radius)
            .sum()
    }

    /// Every disk sits inside its parent within `tol`.
    pub fn is_nested(&self, tol: f64) -> bool {
        self.levels.windows(2).all(|pair| {
            pair[1].iter().all(|d| {
                let parent = &pair[0][d.parent.expect("deeper levels have parents")];
                parent.circle().contains_disk(&d.circle(), tol)
            })
        })
    }

    pub fn points(&self, depth: usize) -> Vec<Complex64> {
        self.levels[depth - 1].iter().map(|d| d.center).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaEstimate {
    pub depth: usize,
    pub value: f64,
    /// Level-ratio estimate; `None` when consecutive levels have equal
    /// counts (rank one), where the limit set is two points.
    pub refined: Option<f64>,
    pub by_depth: Vec<(usize, f64)>,
    /// Change between the last two depths.
    pub drift: f64,
    pub monotone: bool,
}
