use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn run(sub: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoscatter"))
        .arg(sub)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn code(sub: &str, name: &str, extra: &[&str]) -> (i32, TempDir) {
    let dir = TempDir::new().unwrap();
    let o = run(sub, &config(name), dir.path(), extra);
    (o.status.code().unwrap(), dir)
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn parse_zeros(csv: &str) -> Vec<(f64, f64, i64)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("re,im,multiplicity"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn sunada_report_on_fano_pair() {
    let (c, dir) = code("sunada", "sunada_fano.json", &[]);
    assert_eq!(c, 0);
    let r = read_json(dir.path().join("sunada.json"));
    assert_eq!(r["group_order"], 168);
    assert_eq!(r["index"], 7);
    assert_eq!(r["sunada_ok"], true);
    assert_eq!(r["conj_in_G"], false);
    assert_eq!(r["conj_in_G_prime"], true);
    assert_eq!(r["conjugator_in_G_prime"]["flip"], true);
    assert_eq!(r["transplant"]["det"], 24);
    assert_eq!(r["classes"].as_array().unwrap().len(), 6);
}

#[test]
fn sunada_same_subgroup_has_unit_transplant() {
    let (c, dir) = code("sunada", "sunada_same.json", &[]);
    assert_eq!(c, 0);
    let r = read_json(dir.path().join("sunada.json"));
    assert_eq!(r["conj_in_G"], true);
    assert_eq!(r["transplant"]["det"].as_i64().unwrap().abs(), 1);
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(code("sunada", "sunada_order_mismatch.json", &[]).0, 2);
    assert_eq!(code("sunada", "does_not_exist.json", &[]).0, 2);
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"unknown_field": 1}"#).unwrap();
    assert_eq!(run("sunada", &bad, dir.path(), &[]).status.code(), Some(2));
    // sunada needs a group
    assert_eq!(code("sunada", "zeta_rank_one.json", &[]).0, 2);
}

#[test]
fn corrupted_weight_is_caught() {
    let (c, dir) = code(
        "isoscatter",
        "isoscatter_conjugate.json",
        &["--corrupt-weight", "0"],
    );
    assert_eq!(c, 1);
    let r = read_json(dir.path().join("isoscatter.json"));
    assert_eq!(r["spectra_equal"], false);
}

#[test]
fn conjugate_subgroups_give_equal_spectra() {
    let (c, dir) = code("isoscatter", "isoscatter_conjugate.json", &[]);
    assert_eq!(c, 0);
    let a = fs::read_to_string(dir.path().join("spectrum_h1.csv")).unwrap();
    assert!(a.starts_with("ell,theta,weight,word\n"));
    assert_eq!(
        read_json(dir.path().join("isoscatter.json"))["spectra_equal"],
        true
    );
}

#[test]
fn rank_one_zeros_match_lattice() {
    let (c, dir) = code("zeta-scan", "zeta_rank_one.json", &[]);
    assert_eq!(c, 0);
    let got = parse_zeros(&fs::read_to_string(dir.path().join("zeros.csv")).unwrap());

    // eigenvalue -(3 + sqrt 10) of [[3, 10], [1, 3]]: ell = 2 ln(3 + sqrt 10), theta = pi;
    // the class and its inverse each contribute
    let ell = 2.0 * (3.0 + 10f64.sqrt()).ln();
    let (im_lo, im_hi) = (-0.3, 2.0277);
    let mut expect: Vec<(f64, f64, i64)> = Vec::new();
    for n in 0..=2i64 {
        for k in 0..=n {
            let shift = (2 * k - n) as f64 * PI;
            for m in -3..=3 {
                let im = (shift + 2.0 * PI * m as f64) / ell;
                if im > im_lo && im < im_hi {
                    match expect
                        .iter_mut()
                        .find(|e| e.0 == -(n as f64) && (e.1 - im).abs() < 1e-9)
                    {
                        Some(e) => e.2 += 2,
                        None => expect.push((-(n as f64), im, 2)),
                    }
                }
            }
        }
    }
    assert_eq!(got.len(), expect.len());
    for e in &expect {
        let g = got
            .iter()
            .find(|g| (g.0 - e.0).abs() < 1e-6 && (g.1 - e.1).abs() < 1e-6)
            .unwrap_or_else(|| panic!("missing zero near {e:?}"));
        assert_eq!(g.2, e.2);
    }
}

#[test]
fn doubling_k_max_keeps_rank_one_zeros() {
    let (_, a) = code("zeta-scan", "zeta_rank_one.json", &[]);
    let (c, b) = code("zeta-scan", "zeta_rank_one.json", &["--k-max", "24"]);
    assert_eq!(c, 0);
    let za = parse_zeros(&fs::read_to_string(a.path().join("zeros.csv")).unwrap());
    let zb = parse_zeros(&fs::read_to_string(b.path().join("zeros.csv")).unwrap());
    assert_eq!(za.len(), zb.len());
    for (x, y) in za.iter().zip(&zb) {
        assert_eq!(x.2, y.2);
        assert!((x.0 - y.0).abs() < 1e-6 && (x.1 - y.1).abs() < 1e-6);
    }
}

#[test]
fn no_zeros_far_right() {
    let (c, dir) = code("zeta-scan", "zeta_high_re.json", &[]);
    assert_eq!(c, 0);
    assert_eq!(
        fs::read_to_string(dir.path().join("zeros.csv")).unwrap(),
        "re,im,multiplicity\n"
    );
}

#[test]
fn zero_on_contour_exits_3() {
    let dir = TempDir::new().unwrap();
    let o = run(
        "zeta-scan",
        &config("zeta_on_contour.json"),
        dir.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("try"));
}

#[test]
fn schottky_validation() {
    let (c, dir) = code("schottky-validate", "validate_four_circle.json", &[]);
    assert_eq!(c, 0);
    let r = read_json(dir.path().join("schottky.json"));
    assert_eq!(r["separations"].as_array().unwrap().len(), 6);
    assert_eq!(
        code("schottky-validate", "validate_overlapping.json", &[]).0,
        1
    );
}

#[test]
fn curve_checks() {
    let (c, dir) = code("curves-check", "curves_fixture.json", &[]);
    assert_eq!(c, 0);
    let r = read_json(dir.path().join("curves.json"));
    assert_eq!(r["genus"], 5);
    assert_eq!(r["tau_intersection"], 2);
    assert_eq!(r["distinct_structures"], true);
    assert_eq!(code("curves-check", "curves_genus5.json", &[]).0, 0);
    assert_eq!(code("curves-check", "curves_degenerate.json", &[]).0, 1);
}

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_are_deterministic_across_threads() {
    for (sub, name) in [
        ("zeta-scan", "zeta_rank_one.json"),
        ("isoscatter", "isoscatter_fano.json"),
    ] {
        let (c1, a) = code(sub, name, &["--threads", "1"]);
        let (c4, b) = code(sub, name, &["--threads", "4"]);
        let (c0, d) = code(sub, name, &[]);
        assert_eq!((c1, c4, c0), (0, 0, 0));
        let oa = outputs(a.path());
        assert!(!oa.is_empty());
        assert_eq!(oa, outputs(b.path()), "{name}: 1 vs 4 threads");
        assert_eq!(oa, outputs(d.path()), "{name}: repeated run");
    }
}

#[test]
fn fano_covers_share_zeros() {
    let (c, dir) = code("isoscatter", "isoscatter_fano.json", &[]);
    assert_eq!(c, 0);
    let r = read_json(dir.path().join("isoscatter.json"));
    assert_eq!(r["spectra_equal"], true);
    assert_eq!(r["zeros_equal"], true);
    assert_eq!(
        fs::read(dir.path().join("zeros_h1.csv")).unwrap(),
        fs::read(dir.path().join("zeros_h2.csv")).unwrap()
    );
}
