//! Truncated Selberg zeta function of a Schottky group.
//!
//! For a primitive class with complex length `(ell, theta)` the local factor
//! is `prod_{k,l >= 0, k+l <= k_max} (1 - e^{i(k-l) theta} e^{-(s+k+l) ell})`
//! and `Z(s)` is the product of local factors raised to the class weight.
//! Zeros are located with the argument principle applied to the analytic
//! logarithmic derivative.

mod contour;
pub mod cover;

pub use contour::*;
pub use cover::*;

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::GroupError;
use crate::moebius::ComplexLength;
use crate::schottky::{
    cmp_shortlex, enumerate_primitive_classes_par, ReducedWord, SchottkyData, SchottkyError,
};

/// Factors closer than this to zero are reported instead of evaluated.
pub const VANISHING_TOL: f64 = 1e-14;

const CHUNK: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZetaError {
    #[error("factor (entry {entry}, k={k}, l={l}) vanishes at s = {s}")]
    FactorVanished {
        entry: usize,
        k: u32,
        l: u32,
        s: Complex64,
    },
    #[error("a zero lies on or near the contour close to s = {near}; try {suggestion}")]
    ZeroOnContour { near: Complex64, suggestion: Rect },
    #[error("contour integral did not settle to an integer (residual {residual:e})")]
    QuadratureDiverged { residual: f64 },
    #[error("rectangle must satisfy re_min < re_max and im_min < im_max with finite bounds")]
    InvalidRect,
    #[error("resolution must be positive")]
    InvalidResolution,
    #[error("word length cutoff must be at least 1")]
    InvalidTruncation,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Schottky(#[from] SchottkyError),
}

/// One closed geodesic, or a bundle of `weight` geodesics with the same
/// complex length lying over the same base class.
///
/// `word` is the primitive base class and `period` the degree of the cover
/// geodesic over it, so the geodesic itself is `word^period`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub length: ComplexLength,
    pub word: ReducedWord,
    pub period: u32,
    pub weight: u64,
}

impl SpectrumEntry {
    pub fn base(length: ComplexLength, word: ReducedWord) -> Self {
        Self {
            length,
            word,
            period: 1,
            weight: 1,
        }
    }

    /// Word label: the base word, with `^period` appended when above 1.
    pub fn label(&self) -> String {
        if self.period == 1 {
            self.word.to_string()
        } else {
            format!("{}^{}", self.word, self.period)
        }
    }
}

/// Orders entries by `(ell, theta)`, then by word and period.
pub fn cmp_entries(a: &SpectrumEntry, b: &SpectrumEntry) -> Ordering {
    a.length
        .ell
        .total_cmp(&b.length.ell)
        .then(a.length.theta.total_cmp(&b.length.theta))
        .then_with(|| cmp_shortlex(a.word.letters(), b.word.letters()))
        .then(a.period.cmp(&b.period))
        .then(a.weight.cmp(&b.weight))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaTruncation {
    pub n_max: usize,
    pub k_max: u32,
}

impl Default for ZetaTruncation {
    fn default() -> Self {
        Self {
            n_max: 8,
            k_max: 12,
        }
    }
}

impl ZetaTruncation {
    pub fn new(n_max: usize, k_max: u32) -> Result<Self, ZetaError> {
        if n_max == 0 {
            return Err(ZetaError::InvalidTruncation);
        }
        Ok(Self { n_max, k_max })
    }

    /// Number of `(k, l)` pairs per class.
    pub fn pairs(&self) -> usize {
        let k = self.k_max as usize;
        (k + 1) * (k + 2) / 2
    }
}

/// One entry per primitive class of length at most `n_max`, sorted.
pub fn length_spectrum(data: &SchottkyData, n_max: usize) -> Result<Vec<SpectrumEntry>, ZetaError> {
    if n_max == 0 {
        return Err(ZetaError::InvalidTruncation);
    }
    let classes = enumerate_primitive_classes_par(data.rank() as u32, n_max);
    let mut entries = classes
        .into_par_iter()
        .map(|c| {
            let w = c.representative().clone();
            data.word_complex_length(&w)
                .map(|l| SpectrumEntry::base(l, w))
        })
        .collect::<Result<Vec<_>, _>>()?;
    entries.sort_by(cmp_entries);
    Ok(entries)
}

/// `ln(1 + z)` accurate for small `|z|`.
fn log1p(z: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * z.re + z.norm_sqr()).ln_1p();
    Complex64::new(re, z.im.atan2(1.0 + z.re))
}

/// Neumaier-compensated complex sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, x: Complex64) {
        let (re, cr) = two_sum(self.sum.re, x.re);
        let (im, ci) = two_sum(self.sum.im, x.im);
        self.sum = Complex64::new(re, im);
        self.comp += Complex64::new(cr, ci);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = if a.abs() >= b.abs() {
        (a - s) + b
    } else {
        (b - s) + a
    };
    (s, err)
}

/// Per-class coefficients `e^{-(k+l) ell} e^{i(k-l) theta}` for a fixed
/// truncation, reused across evaluation points.
#[derive(Debug, Clone)]
pub struct PreparedZeta {
    ells: Vec<f64>,
    weights: Vec<f64>,
    coeffs: Vec<Complex64>,
    pairs: Vec<(u32, u32)>,
}

impl PreparedZeta {
    pub fn new(spectrum: &[SpectrumEntry], trunc: ZetaTruncation) -> Self {
        let mut pairs = Vec::with_capacity(trunc.pairs());
        for n in 0..=trunc.k_max {
            for k in 0..=n {
                pairs.push((k, n - k));
            }
        }
        let coeffs = spectrum
            .iter()
            .flat_map(|e| {
                let (ell, theta) = (e.length.ell, e.length.theta);
                pairs.iter().map(move |&(k, l)| {
                    let m = (k + l) as f64;
                    let phase = (k as f64 - l as f64) * theta;
                    Complex64::from_polar((-m * ell).exp(), phase)
                })
            })
            .collect();
        Self {
            ells: spectrum.iter().map(|e| e.length.ell).collect(),
            weights: spectrum.iter().map(|e| e.weight as f64).collect(),
            coeffs,
            pairs,
        }
    }

    pub fn len(&self) -> usize {
        self.ells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ells.is_empty()
    }

    fn entry_terms(&self, i: usize, s: Complex64) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let u = (-s * self.ells[i]).exp();
        let p = self.pairs.len();
        self.coeffs[i * p..(i + 1) * p]
            .iter()
            .enumerate()
            .map(move |(j, &c)| (j, u * c))
    }

    fn vanished(&self, i: usize, j: usize, s: Complex64) -> ZetaError {
        let (k, l) = self.pairs[j];
        ZetaError::FactorVanished { entry: i, k, l, s }
    }

    /// `ln Z(s)` modulo `2 pi i`, summed from the smallest terms up.
    pub fn log_zeta(&self, s: Complex64) -> Result<Complex64, ZetaError> {
        let per_entry: Vec<Vec<(f64, Complex64)>> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let w = self.weights[i];
                self.entry_terms(i, s)
                    .map(|(j, x)| {
                        if (Complex64::new(1.0, 0.0) - x).norm() < VANISHING_TOL {
                            return Err(self.vanished(i, j, s));
                        }
                        let t = log1p(-x) * w;
                        Ok((t.norm(), t))
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        let mut terms: Vec<(f64, Complex64)> = per_entry.into_iter().flatten().collect();
        terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = CompensatedSum::default();
        for (_, t) in terms {
            acc.add(t);
        }
        Ok(acc.value())
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64, ZetaError> {
        Ok(self.log_zeta(s)?.exp())
    }

    /// `Z'(s) / Z(s) = sum weight * ell * x / (1 - x)`.
    ///
    /// Summed in fixed blocks of classes so the result does not depend on
    /// the number of threads.
    pub fn log_derivative(&self, s: Complex64) -> Result<Complex64, ZetaError> {
        let block = |lo: usize, hi: usize| -> Result<Complex64, ZetaError> {
            let mut acc = CompensatedSum::default();
            for i in lo..hi {
                let scale = self.weights[i] * self.ells[i];
                for (j, x) in self.entry_terms(i, s) {
                    let d = Complex64::new(1.0, 0.0) - x;
                    if d.norm() < VANISHING_TOL {
                        return Err(self.vanished(i, j, s));
                    }
                    acc.add(x / d * scale);
                }
            }
            Ok(acc.value())
        };
        let n = self.len();
        let partials: Vec<Complex64> = if n <= CHUNK {
            vec![block(0, n)?]
        } else {
            (0..n.div_ceil(CHUNK))
                .into_par_iter()
                .map(|b| block(b * CHUNK, ((b + 1) * CHUNK).min(n)))
                .collect::<Result<_, _>>()?
        };
        let mut acc = CompensatedSum::default();
        for p in partials {
            acc.add(p);
        }
        Ok(acc.value())
    }

    /// Zero of the product closest to the segment `a -> b`, with its distance.
    ///
    /// Factor `1 - c e^{-s ell}` vanishes exactly on
    /// `s = (ln|c| + i(arg c + 2 pi m)) / ell`, a vertical lattice, so the
    /// nearest lattice point is found from one or two candidates of `m`.
    pub fn nearest_zero_to_segment(&self, a: Complex64, b: Complex64) -> Option<(Complex64, f64)> {
        let p = self.pairs.len();
        let mut best: Option<(Complex64, f64)> = None;
        for i in 0..self.len() {
            let ell = self.ells[i];
            let spacing = 2.0 * PI / ell;
            for c in &self.coeffs[i * p..(i + 1) * p] {
                let re = c.norm().ln() / ell;
                let phase = c.arg() / ell;
                let mut targets = [0.0; 3];
                let n = if a.re == b.re {
                    targets = [a.im, b.im, a.im.min(b.im)];
                    3
                } else {
                    let t = ((re - a.re) / (b.re - a.re)).clamp(0.0, 1.0);
                    targets[0] = a.im + t * (b.im - a.im);
                    1
                };
                for (idx, &y) in targets[..n].iter().enumerate() {
                    let m = (y - phase) / spacing;
                    // the third target asks for the first lattice point above the lower end
                    let ms = if idx == 2 {
                        [m.ceil(), m.ceil()]
                    } else {
                        [m.floor(), m.ceil()]
                    };
                    for m in ms {
                        let z = Complex64::new(re, phase + m * spacing);
                        let d = point_segment_distance(z, a, b);
                        if best.is_none_or(|(_, bd)| d < bd) {
                            best = Some((z, d));
                        }
                    }
                }
            }
        }
        best
    }
}

fn point_segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

pub fn zeta_eval(
    spectrum: &[SpectrumEntry],
    s: Complex64,
    trunc: ZetaTruncation,
) -> Result<Complex64, ZetaError> {
    PreparedZeta::new(spectrum, trunc).eval(s)
}

pub fn log_derivative(
    spectrum: &[SpectrumEntry],
    s: Complex64,
    trunc: ZetaTruncation,
) -> Result<Complex64, ZetaError> {
    PreparedZeta::new(spectrum, trunc).log_derivative(s)
}

/// Bound on `|ln Z|` contributed by the pairs with `k + l > k_max` that the
/// truncation drops, for the classes present in the spectrum. Infinite when
/// the dropped factors are not all inside the unit disk.
pub fn tail_bound(spectrum: &[SpectrumEntry], s: Complex64, trunc: ZetaTruncation) -> f64 {
    let mut total = 0.0;
    for e in spectrum {
        let a = (-s.re * e.length.ell).exp();
        let r = (-e.length.ell).exp();
        let mut m = trunc.k_max as i32 + 1;
        loop {
            let x = a * r.powi(m);
            if x >= 1.0 {
                return f64::INFINITY;
            }
            // |ln(1 - x)| <= |x| / (1 - |x|), and m + 1 pairs share k + l = m
            let term = (m + 1) as f64 * x / (1.0 - x);
            total += e.weight as f64 * term;
            if term < 1e-18 * total.max(f64::MIN_POSITIVE) || m > 10_000 {
                break;
            }
            m += 1;
        }
    }
    total
}

/// Axis-parallel rectangle in the `s`-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, ZetaError> {
        let r = Self {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        r.check()?;
        Ok(r)
    }

    pub fn check(&self) -> Result<(), ZetaError> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|x| x.is_finite());
        if finite && self.re_min < self.re_max && self.im_min < self.im_max {
            Ok(())
        } else {
            Err(ZetaError::InvalidRect)
        }
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, s: Complex64) -> bool {
        s.re > self.re_min && s.re < self.re_max && s.im > self.im_min && s.im < self.im_max
    }

    /// Each side pushed outward by `frac` of the larger dimension, with
    /// slightly different amounts so no side lands on a lattice.
    pub fn perturbed(&self, frac: f64) -> Self {
        let d = frac * self.width().max(self.height());
        Self {
            re_min: self.re_min - d,
            re_max: self.re_max + 0.73 * d,
            im_min: self.im_min - 0.61 * d,
            im_max: self.im_max + 0.87 * d,
        }
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}] x [{}, {}]",
            self.re_min, self.re_max, self.im_min, self.im_max
        )
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn rank_one() -> Vec<SpectrumEntry> {
        length_spectrum(&SchottkyData::rank_one_example(), 5).unwrap()
    }

    #[test]
    fn rank_one_spectrum_has_two_entries() {
        let spec = rank_one();
        assert_eq!(spec.len(), 2);
        assert!((spec[0].length.ell - spec[1].length.ell).abs() < 1e-12);
        let expected = 2.0 * (3.0 + 10f64.sqrt()).ln();
        assert!((spec[0].length.ell - expected).abs() < 1e-12);
    }

    #[test]
    fn four_circle_counts_and_min_length() {
        let data = SchottkyData::four_circle_example(1.0);
        let spec = length_spectrum(&data, 3).unwrap();
        let classes = crate::schottky::enumerate_primitive_classes(2, 3).count();
        assert_eq!(spec.len(), classes);
        let min = spec
            .iter()
            .map(|e| e.length.ell)
            .fold(f64::INFINITY, f64::min);
        let len_one_min = spec
            .iter()
            .filter(|e| e.word.len() == 1)
            .map(|e| e.length.ell)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, len_one_min);
    }

    #[test]
    fn log1p_small_arguments() {
        let z = log1p(Complex64::new(0.0, 1e-200));
        assert_eq!(z.im, 1e-200);
        assert!(z.re.abs() < 1e-300);
        let z = Complex64::new(3e-9, -4e-9);
        let expect = z - z * z / 2.0 + z * z * z / 3.0;
        assert!((log1p(z) - expect).norm() < 1e-24);
        let z = Complex64::new(0.5, 0.7);
        assert!((log1p(z) - (z + 1.0).ln()).norm() < 1e-15);
    }

    #[test]
    fn empty_spectrum_is_one() {
        for s in [Complex64::new(0.3, 1.0), Complex64::new(-4.0, 2.0)] {
            assert_eq!(
                zeta_eval(&[], s, ZetaTruncation::default()).unwrap(),
                Complex64::new(1.0, 0.0)
            );
        }
    }

    #[test]
    fn large_real_part_is_near_one() {
        let spec = length_spectrum(&SchottkyData::four_circle_example(1.0), 4).unwrap();
        let z = zeta_eval(&spec, Complex64::new(20.0, 3.0), ZetaTruncation::default()).unwrap();
        assert!((z - 1.0).norm() < 1e-8);
        assert!(tail_bound(&spec, Complex64::new(20.0, 0.0), ZetaTruncation::default()) < 1e-40);
    }

    #[test]
    fn vanishes_on_analytic_lattice() {
        let spec = rank_one();
        let (ell, theta) = (spec[0].length.ell, spec[0].length.theta);
        let trunc = ZetaTruncation { n_max: 5, k_max: 3 };
        let prepared = PreparedZeta::new(&spec, trunc);
        for (k, l, m) in [
            (0u32, 0u32, 0i32),
            (0, 0, 1),
            (1, 0, 0),
            (1, 2, -1),
            (2, 1, 3),
        ] {
            let s0 = Complex64::new(
                -((k + l) as f64),
                ((k as f64 - l as f64) * theta + 2.0 * PI * m as f64) / ell,
            );
            // exactly on the zero the factor is reported
            assert!(matches!(
                prepared.eval(s0),
                Err(ZetaError::FactorVanished { .. })
            ));
            // nearby, |Z| shrinks linearly (at least) with the distance
            let near = prepared
                .eval(s0 + Complex64::new(1e-6, 0.0))
                .unwrap()
                .norm();
            let far = prepared
                .eval(s0 + Complex64::new(1e-3, 0.0))
                .unwrap()
                .norm();
            assert!(near < 1e-2 * far, "{near} {far}");
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let spec = length_spectrum(&SchottkyData::four_circle_example(1.0), 4).unwrap();
        let p = PreparedZeta::new(&spec, ZetaTruncation::default());
        for s in [
            Complex64::new(0.7, 0.3),
            Complex64::new(1.5, -2.0),
            Complex64::new(-0.2, 5.0),
        ] {
            let a = p.eval(s.conj()).unwrap();
            let b = p.eval(s).unwrap().conj();
            assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn nearest_zero_matches_lattice() {
        let spec = rank_one();
        let ell = spec[0].length.ell;
        let p = PreparedZeta::new(&spec, ZetaTruncation::new(1, 1).unwrap());
        // theta = pi puts k - l = 1 zeros at Im (pi + 2 pi m) / ell on Re -1
        let a = Complex64::new(-1.25, 0.2);
        let b = Complex64::new(-1.25, 0.5 + PI / ell);
        let (z, d) = p.nearest_zero_to_segment(a, b).unwrap();
        assert!((z - Complex64::new(-1.0, PI / ell)).norm() < 1e-12);
        assert!((d - 0.25).abs() < 1e-12);
        let h = p
            .nearest_zero_to_segment(Complex64::new(-3.0, 0.1), Complex64::new(3.0, 0.1))
            .unwrap();
        assert!((h.1 - 0.1).abs() < 1e-12);
    }

    #[test]
    fn log_derivative_matches_difference_quotient() {
        let spec = length_spectrum(&SchottkyData::four_circle_example(1.0), 3).unwrap();
        let p = PreparedZeta::new(&spec, ZetaTruncation::default());
        let s = Complex64::new(0.8, 0.4);
        let h = 1e-5;
        let fd = (p.log_zeta(s + h).unwrap() - p.log_zeta(s - h).unwrap()) / (2.0 * h);
        let d = p.log_derivative(s).unwrap();
        assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0));
    }

    #[test]
    fn truncation_monotone_in_k() {
        let spec = length_spectrum(&SchottkyData::four_circle_example(1.0), 3).unwrap();
        let s = Complex64::new(2.5, 0.7);
        let exact = PreparedZeta::new(
            &spec,
            ZetaTruncation {
                n_max: 3,
                k_max: 30,
            },
        )
        .log_zeta(s)
        .unwrap();
        let mut last = f64::INFINITY;
        for k in [0, 1, 2, 4, 8] {
            let trunc = ZetaTruncation { n_max: 3, k_max: k };
            let err = (PreparedZeta::new(&spec, trunc).log_zeta(s).unwrap() - exact).norm();
            assert!(err <= last);
            assert!(err <= tail_bound(&spec, s, trunc) + 1e-15);
            last = err;
        }
    }

    #[test]
    fn rect_validation() {
        assert!(Rect::new(0.0, 1.0, 0.0, 1.0).is_ok());
        assert_eq!(
            Rect::new(1.0, 0.0, 0.0, 1.0).unwrap_err(),
            ZetaError::InvalidRect
        );
        assert_eq!(
            Rect::new(0.0, 1.0, 0.0, f64::NAN).unwrap_err(),
            ZetaError::InvalidRect
        );
    }
}
