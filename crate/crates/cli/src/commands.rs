use std::fs;
use std::path::Path;

use serde::Serialize;

use isoscatter_core::groups::{
    find_conjugator, find_generating_pair, hom_from_free, sunada_check, ClassCount, FreeGroupHom,
    GroupError,
};
use isoscatter_core::homology::{sunada_curve_fixture, verify_sunada_curve_config, CurveReport};
use isoscatter_core::io::{spectrum_csv, to_json_string, zeros_csv, GroupContext};
use isoscatter_core::schottky::{SchottkyData, ValidationReport};
use isoscatter_core::transplant::{verify_isoscattering_discrete, TransplantReport};
use isoscatter_core::zeta::cover::{compare_spectra, lift_spectrum};
use isoscatter_core::zeta::{length_spectrum, scan_zeros, tail_bound, LocatedZero, ZetaTruncation};

use crate::config::{CurvesConfig, ExperimentConfig};
use crate::error::CliError;

pub const DEFAULT_SPECTRUM_TOL: f64 = 1e-12;
pub const DEFAULT_SCHOTTKY_TOL: f64 = 1e-9;

/// Command-line overrides shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n_max: Option<usize>,
    pub k_max: Option<u32>,
    pub tol: Option<f64>,
    /// Test hook: add one to this lifted weight of the second cover.
    pub corrupt_weight: Option<usize>,
}

fn write(out: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    fs::write(out.join(name), contents)?;
    Ok(())
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<(), CliError> {
    write(out, name, &to_json_string(value)?)
}

fn free_hom(
    cfg: &ExperimentConfig,
    ctx: &GroupContext,
    rank: usize,
) -> Result<FreeGroupHom, CliError> {
    let images = match &cfg.hom {
        Some(specs) => specs
            .iter()
            .map(|e| ctx.element(e))
            .collect::<Result<Vec<_>, _>>()?,
        None if rank == 2 => {
            let (a, b) = find_generating_pair(ctx.group())
                .ok_or_else(|| CliError::Config("group is not 2-generated".into()))?;
            vec![a, b]
        }
        None => {
            return Err(CliError::Config(format!(
                "rank {rank} needs explicit `hom` images"
            )))
        }
    };
    if images.len() != rank {
        return Err(GroupError::RankMismatch {
            letter: images.len() as i32,
            rank,
        }
        .into());
    }
    Ok(hom_from_free(ctx.group().clone(), images)?)
}

#[derive(Debug, Serialize)]
struct GPrimeWitness {
    g: usize,
    flip: bool,
}

#[derive(Debug, Serialize)]
struct SunadaReport {
    group_order: usize,
    subgroup_order: usize,
    index: usize,
    sunada_ok: bool,
    perm_char_ok: bool,
    cycle_types_ok: bool,
    powers_ok: bool,
    #[serde(rename = "conj_in_G")]
    conj_in_g: bool,
    #[serde(rename = "conjugator_in_G")]
    conjugator_in_g: Option<usize>,
    #[serde(rename = "conj_in_G_prime")]
    conj_in_gprime: Option<bool>,
    #[serde(rename = "conjugator_in_G_prime")]
    conjugator_in_gprime: Option<GPrimeWitness>,
    classes: Vec<ClassCount>,
    transplant: TransplantReport,
    transplant_note: &'static str,
}

pub fn sunada(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let ctx = cfg.group()?.build()?;
    let (s1, s2) = cfg.subgroup_pair()?;
    let (h1, h2) = (ctx.subgroup(s1)?, ctx.subgroup(s2)?);
    let triple = sunada_check(&h1, &h2)?;
    let (conj_in_gprime, conjugator_in_gprime) = match &ctx.semidirect {
        Some(sd) => {
            let found = find_conjugator(&sd.embed(&h1), &sd.embed(&h2));
            (
                Some(found.is_some()),
                found.map(|x| {
                    let (g, flip) = sd.split(x);
                    GPrimeWitness { g, flip }
                }),
            )
        }
        None => (None, None),
    };
    let gens = match &cfg.generators {
        Some(specs) => specs
            .iter()
            .map(|e| ctx.element(e))
            .collect::<Result<Vec<_>, _>>()?,
        None => free_hom(cfg, &ctx, 2)?.images().to_vec(),
    };
    let transplant = if triple.sunada_ok {
        verify_isoscattering_discrete(&h1, &h2, &gens)?
    } else {
        return Err(CliError::Assertion(format!(
            "subgroups are not Gassmann equivalent: {:?}",
            triple.classes.iter().find(|c| c.in_h1 != c.in_h2)
        )));
    };
    let report = SunadaReport {
        group_order: triple.group_order,
        subgroup_order: triple.h1_order,
        index: triple.index,
        sunada_ok: triple.sunada_ok,
        perm_char_ok: triple.perm_char_ok,
        cycle_types_ok: triple.cycle_types_ok,
        powers_ok: triple.powers_ok,
        conj_in_g: triple.conj_in_g,
        conjugator_in_g: triple.conjugator,
        conj_in_gprime,
        conjugator_in_gprime,
        classes: triple.classes,
        transplant_note: "intertwiner of the finite coset modules and their Schreier graphs",
        transplant,
    };
    write_json(out, "sunada.json", &report)?;
    println!(
        "sunada_ok={} conj_in_G={} conj_in_G'={} transplant={} det(T)={}",
        report.sunada_ok,
        report.conj_in_g,
        report
            .conj_in_gprime
            .map_or("n/a".to_string(), |b| b.to_string()),
        report.transplant.passed(),
        report.transplant.det
    );
    let ok = report.perm_char_ok && report.cycle_types_ok && report.transplant.passed();
    if ok {
        Ok(())
    } else {
        Err(CliError::Assertion(
            "permutation or transplant check failed; see sunada.json".into(),
        ))
    }
}

#[derive(Debug, Serialize)]
struct IsoscatterReport {
    n_max: usize,
    k_max: u32,
    tol: f64,
    base_classes: usize,
    entries_h1: usize,
    entries_h2: usize,
    spectra_equal: bool,
    zeros_h1: Option<usize>,
    zeros_h2: Option<usize>,
    zeros_equal: Option<bool>,
    tail_bound: Option<f64>,
    zeros_note: &'static str,
}

fn same_zeros(a: &[LocatedZero], b: &[LocatedZero], resolution: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.multiplicity == y.multiplicity && (x.s - y.s).norm() <= resolution)
}

pub fn isoscatter(cfg: &ExperimentConfig, out: &Path, ov: &Overrides) -> Result<(), CliError> {
    let data = cfg.schottky()?.to_data()?;
    data.validate(DEFAULT_SCHOTTKY_TOL)?;
    let ctx = cfg.group()?.build()?;
    let (s1, s2) = cfg.subgroup_pair()?;
    let (h1, h2) = (ctx.subgroup(s1)?, ctx.subgroup(s2)?);
    let hom = free_hom(cfg, &ctx, data.rank())?;
    hom.require_surjective()?;
    let trunc = cfg.truncation(ov.n_max, ov.k_max)?;
    let tol = ov.tol.or(cfg.tol).unwrap_or(DEFAULT_SPECTRUM_TOL);

    let base = length_spectrum(&data, trunc.n_max)?;
    let l1 = lift_spectrum(&base, &hom, &h1)?;
    let mut l2 = lift_spectrum(&base, &hom, &h2)?;
    if let Some(i) = ov.corrupt_weight {
        let n = l2.len();
        l2.get_mut(i)
            .ok_or_else(|| {
                CliError::Config(format!("corrupt index {i} out of range ({n} entries)"))
            })?
            .weight += 1;
    }
    write(out, "spectrum_h1.csv", &spectrum_csv(&l1))?;
    write(out, "spectrum_h2.csv", &spectrum_csv(&l2))?;
    let mismatch = compare_spectra(&l1, &l2, tol).err();

    let mut report = IsoscatterReport {
        n_max: trunc.n_max,
        k_max: trunc.k_max,
        tol,
        base_classes: base.len(),
        entries_h1: l1.len(),
        entries_h2: l2.len(),
        spectra_equal: mismatch.is_none(),
        zeros_h1: None,
        zeros_h2: None,
        zeros_equal: None,
        tail_bound: None,
        zeros_note: "zeros of the truncated zeta product (scattering pole proxies)",
    };
    if let Some(m) = mismatch {
        write_json(out, "isoscatter.json", &report)?;
        return Err(CliError::Assertion(m.to_string()));
    }
    if let Some(scan) = &cfg.scan {
        let z1 = scan_zeros(&l1, scan.rect, trunc, scan.resolution)?;
        let z2 = scan_zeros(&l2, scan.rect, trunc, scan.resolution)?;
        write(out, "zeros_h1.csv", &zeros_csv(&z1))?;
        write(out, "zeros_h2.csv", &zeros_csv(&z2))?;
        let corner = num_complex::Complex64::new(scan.rect.re_min, scan.rect.im_min);
        report.tail_bound = Some(tail_bound(&l1, corner, trunc));
        report.zeros_h1 = Some(z1.iter().map(|z| z.multiplicity as usize).sum());
        report.zeros_h2 = Some(z2.iter().map(|z| z.multiplicity as usize).sum());
        report.zeros_equal = Some(same_zeros(&z1, &z2, scan.resolution));
    }
    write_json(out, "isoscatter.json", &report)?;
    println!(
        "spectra equal: {} classes -> {} entries per cover; zeros: {}",
        report.base_classes,
        report.entries_h1,
        report
            .zeros_h1
            .map_or("not scanned".to_string(), |n| n.to_string())
    );
    match report.zeros_equal {
        Some(false) => Err(CliError::Assertion(
            "zero lists differ; see zeros_h1.csv and zeros_h2.csv".into(),
        )),
        _ => Ok(()),
    }
}

pub fn zeta_scan(cfg: &ExperimentConfig, out: &Path, ov: &Overrides) -> Result<(), CliError> {
    let data = cfg.schottky()?.to_data()?;
    data.validate(DEFAULT_SCHOTTKY_TOL)?;
    let scan = cfg.scan()?;
    let trunc: ZetaTruncation = cfg.truncation(ov.n_max, ov.k_max)?;
    let spectrum = length_spectrum(&data, trunc.n_max)?;
    let zeros = scan_zeros(&spectrum, scan.rect, trunc, scan.resolution)?;
    write(out, "zeros.csv", &zeros_csv(&zeros))?;
    println!(
        "{} zero clusters, {} zeros in {}",
        zeros.len(),
        zeros.iter().map(|z| z.multiplicity).sum::<i64>(),
        scan.rect
    );
    Ok(())
}

pub fn schottky_validate(
    cfg: &ExperimentConfig,
    out: &Path,
    ov: &Overrides,
) -> Result<(), CliError> {
    let data: SchottkyData = cfg.schottky()?.to_data()?;
    let tol = ov.tol.or(cfg.tol).unwrap_or(DEFAULT_SCHOTTKY_TOL);
    let report: ValidationReport = data.inspect(tol);
    write_json(out, "schottky.json", &report)?;
    match report.first_failure() {
        None => {
            println!(
                "valid: rank {}, min margin {:.6e}, max residual {:.3e}",
                data.rank(),
                report.min_margin(),
                report.max_residual()
            );
            Ok(())
        }
        Some(e) => Err(CliError::Assertion(e.to_string())),
    }
}

pub fn curves_check(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let curves = cfg
        .curves
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no `curves` entry".into()))?;
    let config = match curves {
        CurvesConfig::Fixture { fixture } => {
            let psl = isoscatter_core::groups::build_psl3(fixture.p)?;
            sunada_curve_fixture(psl.group().clone(), &psl.inverse_transpose(), fixture.k)?
        }
        CurvesConfig::Explicit(json) => json.to_config()?,
    };
    let report: CurveReport = verify_sunada_curve_config(&config)?;
    write_json(out, "curves.json", &report)?;
    for item in &report.items {
        println!(
            "{} {}",
            if item.passed { "ok  " } else { "FAIL" },
            item.name
        );
    }
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().iter().map(|i| i.name.as_str()).collect();
        Err(CliError::Assertion(format!("failed: {}", names.join(", "))))
    }
}
