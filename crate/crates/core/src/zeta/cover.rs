use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{cmp_entries, SpectrumEntry, ZetaError};
use crate::groups::{coset_action, schreier_generators, FreeGroupHom, SubgroupHandle};
use crate::schottky::{enumerate_primitive_classes_par, Letter, ReducedWord, SchottkyData};

/// Length spectrum of the cover attached to `H` under `hom`.
///
/// A base class `w` whose image permutes `G/H` with `n_c` cycles of length
/// `c` contributes `n_c` primitive cover geodesics of complex length
/// `c * (ell, theta)`, bundled into one entry of weight `n_c`.
pub fn lift_spectrum(
    base: &[SpectrumEntry],
    hom: &FreeGroupHom,
    h: &SubgroupHandle,
) -> Result<Vec<SpectrumEntry>, ZetaError> {
    hom.require_surjective()?;
    let lifted: Vec<Vec<SpectrumEntry>> = base
        .par_iter()
        .map(|e| {
            let perm = coset_action(hom, &e.word.power(e.period), h)?;
            let mut cycles: BTreeMap<usize, u64> = BTreeMap::new();
            for c in perm.cycle_type {
                *cycles.entry(c).or_default() += 1;
            }
            Ok(cycles
                .into_iter()
                .map(|(c, n)| SpectrumEntry {
                    length: e.length.scaled(c as u32),
                    word: e.word.clone(),
                    period: e.period * c as u32,
                    weight: e.weight * n,
                })
                .collect())
        })
        .collect::<Result<_, ZetaError>>()?;
    let mut out: Vec<SpectrumEntry> = lifted.into_iter().flatten().collect();
    out.sort_by(cmp_entries);
    Ok(out)
}

/// Entries whose cover geodesic has base word length at most `cutoff`.
pub fn restrict_to_base_length(spectrum: &[SpectrumEntry], cutoff: usize) -> Vec<SpectrumEntry> {
    spectrum
        .iter()
        .filter(|e| e.word.len() * e.period as usize <= cutoff)
        .cloned()
        .collect()
}

/// Cover spectrum computed inside the cover group itself.
///
/// Primitive classes of the free group on the Reidemeister–Schreier
/// generators of `φ^-1(H)` are enumerated up to length `cutoff`, rewritten
/// in the base generators, and kept when their cyclically reduced base
/// length is at most `cutoff`. Every Schreier generator keeps at least one
/// letter after cancellation, so this is complete for base lengths up to
/// `cutoff`. Lengths come from the rewritten words directly.
pub fn cover_spectrum_by_schreier(
    data: &SchottkyData,
    hom: &FreeGroupHom,
    h: &SubgroupHandle,
    cutoff: usize,
) -> Result<Vec<SpectrumEntry>, ZetaError> {
    if cutoff == 0 {
        return Err(ZetaError::InvalidTruncation);
    }
    let basis = schreier_generators(hom, h)?;
    let gens = &basis.generators;
    let inverses: Vec<ReducedWord> = gens.iter().map(ReducedWord::inverse).collect();
    let classes = enumerate_primitive_classes_par(gens.len() as u32, cutoff);

    let found: Vec<Option<(ReducedWord, u32, ReducedWord)>> = classes
        .par_iter()
        .map(|c| {
            let letters = c.representative().letters().iter().flat_map(|&l: &Letter| {
                let i = l.unsigned_abs() as usize - 1;
                let w = if l > 0 { &gens[i] } else { &inverses[i] };
                w.letters().iter().copied()
            });
            let base_word = ReducedWord::reduce(letters).cyclic_reduction();
            if base_word.len() > cutoff {
                return None;
            }
            let (root, m) = base_word
                .conjugacy_normal_form()
                .expect("nontrivial in a free group");
            Some((root.representative().clone(), m, base_word))
        })
        .collect();

    let mut groups: BTreeMap<(Vec<Letter>, u32), (ReducedWord, u64)> = BTreeMap::new();
    for (root, m, word) in found.into_iter().flatten() {
        groups
            .entry((root.letters().to_vec(), m))
            .and_modify(|g| g.1 += 1)
            .or_insert((word, 1));
    }
    let mut out = groups
        .into_par_iter()
        .map(|((root, m), (word, n))| {
            let length = data.word_complex_length(&word)?;
            Ok(SpectrumEntry {
                length,
                word: ReducedWord::new(root).expect("canonical roots are reduced"),
                period: m,
                weight: n,
            })
        })
        .collect::<Result<Vec<_>, ZetaError>>()?;
    out.sort_by(cmp_entries);
    Ok(out)
}

/// First disagreement between two spectra compared as multisets.
#[derive(Debug, Clone, PartialEq, Serialize, Error)]
#[error("spectra differ near (ell, theta) = ({ell}, {theta}): weights {left:?} vs {right:?}")]
pub struct SpectrumMismatch {
    pub ell: f64,
    pub theta: f64,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
}

/// Multiset comparison of `(ell, theta, weight)`.
///
/// Entries are grouped into clusters whose `(ell, theta)` agree within
/// `tol` (theta taken on the circle); inside each cluster the sorted weight
/// lists of both sides must be identical.
pub fn compare_spectra(
    left: &[SpectrumEntry],
    right: &[SpectrumEntry],
    tol: f64,
) -> Result<(), SpectrumMismatch> {
    let mut items: Vec<(f64, f64, u64, bool)> = left
        .iter()
        .map(|e| (e.length.ell, e.length.theta, e.weight, false))
        .chain(
            right
                .iter()
                .map(|e| (e.length.ell, e.length.theta, e.weight, true)),
        )
        .collect();
    items.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut start = 0;
    while start < items.len() {
        let mut end = start + 1;
        while end < items.len() && items[end].0 - items[end - 1].0 <= tol {
            end += 1;
        }
        let mut cluster: Vec<(f64, u64, bool)> = items[start..end]
            .iter()
            .map(|&(_, t, w, side)| (if t > PI - tol { t - 2.0 * PI } else { t }, w, side))
            .collect();
        cluster.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut s = 0;
        while s < cluster.len() {
            let mut e = s + 1;
            while e < cluster.len() && cluster[e].0 - cluster[e - 1].0 <= tol {
                e += 1;
            }
            let mut l: Vec<u64> = cluster[s..e].iter().filter(|c| !c.2).map(|c| c.1).collect();
            let mut r: Vec<u64> = cluster[s..e].iter().filter(|c| c.2).map(|c| c.1).collect();
            l.sort_unstable();
            r.sort_unstable();
            if l != r {
                return Err(SpectrumMismatch {
                    ell: items[start].0,
                    theta: cluster[s].0,
                    left: l,
                    right: r,
                });
            }
            s = e;
        }
        start = end;
    }
    Ok(())
}
