//! JSON specs, `$ref` includes and CSV output.
//!
//! Floats in CSV files are written with 17 significant digits so that they
//! round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;
use thiserror::Error;

use crate::groups::{
    build_psl3, Automorphism, FiniteGroup, GroupError, Psl3, SemidirectProduct, SubgroupHandle,
};
use crate::homology::{Curve, CurveConfig, HomologyClass, HomologyError, SurfaceHom};
use crate::intmat::IntMatrix;
use crate::moebius::{Circle, MoebiusError, MoebiusMap};
use crate::schottky::{SchottkyData, SchottkyError};
use crate::zeta::{LocatedZero, SpectrumEntry};

/// Nesting limit for `$ref` includes.
pub const MAX_REF_DEPTH: usize = 16;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("$ref nesting deeper than {MAX_REF_DEPTH} at {0}")]
    RefDepth(PathBuf),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Schottky(#[from] SchottkyError),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// Reads a JSON file, replacing every object of the form
/// `{"$ref": "path"}` by the contents of that file. Paths are relative to
/// the file containing the reference.
pub fn load_json(path: &Path) -> Result<Value, ConfigError> {
    load_at_depth(path, 0)
}

fn load_at_depth(path: &Path, depth: usize) -> Result<Value, ConfigError> {
    if depth > MAX_REF_DEPTH {
        return Err(ConfigError::RefDepth(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|source| ConfigError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    resolve_refs(value, dir, depth)
}

fn resolve_refs(value: Value, dir: &Path, depth: usize) -> Result<Value, ConfigError> {
    match value {
        Value::Object(map) => {
            if map.len() == 1 {
                if let Some(Value::String(target)) = map.get("$ref") {
                    return load_at_depth(&dir.join(target), depth + 1);
                }
            }
            map.into_iter()
                .map(|(k, v)| Ok((k, resolve_refs(v, dir, depth)?)))
                .collect::<Result<_, ConfigError>>()
                .map(Value::Object)
        }
        Value::Array(items) => items
            .into_iter()
            .map(|v| resolve_refs(v, dir, depth))
            .collect::<Result<_, _>>()
            .map(Value::Array),
        other => Ok(other),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleJson {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

/// Matrix entries as `[re, im]` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
    pub d: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchottkyJson {
    pub g: usize,
    pub circles: Vec<CircleJson>,
    pub generators: Vec<GeneratorJson>,
}

fn c(x: [f64; 2]) -> Complex64 {
    Complex64::new(x[0], x[1])
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl SchottkyJson {
    pub fn to_data(&self) -> Result<SchottkyData, ConfigError> {
        if self.generators.len() != self.g {
            return Err(ConfigError::Invalid(format!(
                "g = {} but {} generators given",
                self.g,
                self.generators.len()
            )));
        }
        let circles = self
            .circles
            .iter()
            .map(|k| Circle::new(Complex64::new(k.cx, k.cy), k.r))
            .collect::<Result<Vec<_>, _>>()?;
        let gens = self
            .generators
            .iter()
            .map(|m| MoebiusMap::new(c(m.a), c(m.b), c(m.c), c(m.d)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SchottkyData::new(circles, gens)?)
    }

    pub fn from_data(data: &SchottkyData) -> Self {
        Self {
            g: data.rank(),
            circles: data
                .circles()
                .iter()
                .map(|k| CircleJson {
                    cx: k.center.re,
                    cy: k.center.im,
                    r: k.radius,
                })
                .collect(),
            generators: data
                .generators()
                .iter()
                .map(|m| {
                    let [a, b, c, d] = m.entries();
                    GeneratorJson {
                        a: pair(a),
                        b: pair(b),
                        c: pair(c),
                        d: pair(d),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Psl3 { p: u32 },
    Semidirect { base: Box<GroupSpec>, auto: String },
}

/// `PSL(3, p)` and, for a semidirect spec, its extension by an involution.
pub struct GroupContext {
    pub psl: Psl3,
    pub semidirect: Option<SemidirectProduct>,
}

impl GroupSpec {
    pub fn build(&self) -> Result<GroupContext, ConfigError> {
        match self {
            GroupSpec::Psl3 { p } => Ok(GroupContext {
                psl: build_psl3(*p)?,
                semidirect: None,
            }),
            GroupSpec::Semidirect { base, auto } => {
                let inner = base.build()?;
                if inner.semidirect.is_some() {
                    return Err(ConfigError::Invalid(
                        "nested semidirect products are not supported".into(),
                    ));
                }
                let sigma = match auto.as_str() {
                    "inverse-transpose" => inner.psl.inverse_transpose(),
                    "identity" => Automorphism::identity(inner.psl.group()),
                    other => {
                        return Err(ConfigError::Invalid(format!(
                            "unknown automorphism {other:?}"
                        )))
                    }
                };
                let sd = SemidirectProduct::new(inner.psl.group().clone(), sigma)?;
                Ok(GroupContext {
                    psl: inner.psl,
                    semidirect: Some(sd),
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementSpec {
    Identity,
    Index(usize),
    Matrix([[u32; 3]; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stabilizer {
    Point([u32; 3]),
    Hyperplane([u32; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubgroupSpec {
    Whole,
    Trivial,
    Stabilizer(Stabilizer),
    GeneratedBy(Vec<ElementSpec>),
    Conjugate {
        of: Box<SubgroupSpec>,
        by: ElementSpec,
    },
}

impl GroupContext {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.psl.group()
    }

    pub fn element(&self, spec: &ElementSpec) -> Result<usize, ConfigError> {
        match spec {
            ElementSpec::Identity => Ok(self.group().identity()),
            ElementSpec::Index(i) if *i < self.group().order() => Ok(*i),
            ElementSpec::Index(i) => Err(GroupError::InvalidElement(format!("index {i}")).into()),
            ElementSpec::Matrix(m) => Ok(self.psl.element_of_matrix(m)?),
        }
    }

    pub fn subgroup(&self, spec: &SubgroupSpec) -> Result<SubgroupHandle, ConfigError> {
        let g = self.group().clone();
        Ok(match spec {
            SubgroupSpec::Whole => SubgroupHandle::whole(g),
            SubgroupSpec::Trivial => SubgroupHandle::trivial(g),
            SubgroupSpec::Stabilizer(Stabilizer::Point(v)) => self.psl.stabilizer_of_point(*v)?,
            SubgroupSpec::Stabilizer(Stabilizer::Hyperplane(w)) => {
                self.psl.stabilizer_of_hyperplane(*w)?
            }
            SubgroupSpec::GeneratedBy(gens) => {
                let gens = gens
                    .iter()
                    .map(|e| self.element(e))
                    .collect::<Result<Vec<_>, _>>()?;
                SubgroupHandle::generated(g, &gens)
            }
            SubgroupSpec::Conjugate { of, by } => self.subgroup(of)?.conjugate(self.element(by)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveJson {
    pub coords: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassJson {
    pub coords: Vec<i64>,
}

/// Images of `a1, b1, ..., ag, bg` in the configured group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceHomJson {
    pub group: GroupSpec,
    pub images: Vec<ElementSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfigJson {
    pub genus: usize,
    pub curves: Vec<CurveJson>,
    pub tau: IntMatrix,
    #[serde(rename = "D")]
    pub d: ClassJson,
    pub k: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<ClassJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hom: Option<SurfaceHomJson>,
}

impl CurveConfigJson {
    pub fn to_config(&self) -> Result<CurveConfig, ConfigError> {
        let curves = self
            .curves
            .iter()
            .map(|c| {
                Ok(Curve {
                    coords: HomologyClass::new(c.coords.clone())?,
                    word: c.word.as_deref().map(str::parse).transpose()?,
                })
            })
            .collect::<Result<Vec<_>, ConfigError>>()?;
        let hom = match &self.hom {
            None => None,
            Some(h) => {
                let ctx = h.group.build()?;
                let images = h
                    .images
                    .iter()
                    .map(|e| ctx.element(e))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(SurfaceHom::new(ctx.group().clone(), self.genus, images)?)
            }
        };
        Ok(CurveConfig {
            genus: self.genus,
            curves,
            tau: self.tau.clone(),
            d: HomologyClass::new(self.d.coords.clone())?,
            k: self.k,
            twist_base: self
                .base
                .as_ref()
                .map(|b| HomologyClass::new(b.coords.clone()))
                .transpose()?,
            hom,
        })
    }

    /// JSON form of a config whose group is `PSL(3, p)`.
    pub fn from_config(cfg: &CurveConfig, p: u32) -> Self {
        Self {
            genus: cfg.genus,
            curves: cfg
                .curves
                .iter()
                .map(|c| CurveJson {
                    coords: c.coords.coords().to_vec(),
                    word: c.word.as_ref().map(ToString::to_string),
                })
                .collect(),
            tau: cfg.tau.clone(),
            d: ClassJson {
                coords: cfg.d.coords().to_vec(),
            },
            k: cfg.k,
            base: cfg.twist_base.as_ref().map(|b| ClassJson {
                coords: b.coords().to_vec(),
            }),
            hom: cfg.hom.as_ref().map(|h| SurfaceHomJson {
                group: GroupSpec::Psl3 { p },
                images: h.images().iter().map(|&i| ElementSpec::Index(i)).collect(),
            }),
        }
    }
}

/// Float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON whose floats carry 17 significant digits.
struct DigitsFormatter(PrettyFormatter<'static>);

impl Formatter for DigitsFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty-printed JSON with 17-digit floats and a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String, serde_json::Error> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, DigitsFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// `re,im,multiplicity`
pub fn zeros_csv(zeros: &[LocatedZero]) -> String {
    let mut out = String::from("re,im,multiplicity\n");
    for z in zeros {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_f64(z.s.re),
            fmt_f64(z.s.im),
            z.multiplicity
        );
    }
    out
}

/// `ell,theta,weight,word`
pub fn spectrum_csv(spectrum: &[SpectrumEntry]) -> String {
    let mut out = String::from("ell,theta,weight,word\n");
    for e in spectrum {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(e.length.ell),
            fmt_f64(e.length.theta),
            e.weight,
            e.label()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::ComplexLength;
    use crate::schottky::ReducedWord;

    #[test]
    fn schottky_roundtrip() {
        let data = SchottkyData::four_circle_example(1.0);
        let json = SchottkyJson::from_data(&data);
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.contains("\"cx\"") && text.contains("\"generators\""));
        let back: SchottkyJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_data().unwrap(), data);
    }

    #[test]
    fn schottky_rank_mismatch() {
        let mut json = SchottkyJson::from_data(&SchottkyData::four_circle_example(1.0));
        json.g = 3;
        assert!(matches!(json.to_data(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn group_and_subgroup_specs() {
        let spec: GroupSpec = serde_json::from_str(
            r#"{"kind":"semidirect","base":{"kind":"psl3","p":2},"auto":"inverse-transpose"}"#,
        )
        .unwrap();
        let ctx = spec.build().unwrap();
        assert_eq!(ctx.semidirect.as_ref().unwrap().group().order(), 336);
        let k1: SubgroupSpec = serde_json::from_str(r#"{"stabilizer":{"point":[1,0,0]}}"#).unwrap();
        let k2: SubgroupSpec =
            serde_json::from_str(r#"{"stabilizer":{"hyperplane":[1,0,0]}}"#).unwrap();
        assert_eq!(ctx.subgroup(&k1).unwrap().order(), 24);
        assert_eq!(ctx.subgroup(&k2).unwrap().order(), 24);
        let conj: SubgroupSpec =
            serde_json::from_str(r#"{"conjugate":{"of":{"stabilizer":{"point":[1,0,0]}},"by":{"matrix":[[0,1,0],[1,0,0],[0,0,1]]}}}"#)
                .unwrap();
        let h = ctx.subgroup(&conj).unwrap();
        // fixes e2 but not e1
        let x = ctx
            .element(&ElementSpec::Matrix([[1, 0, 0], [0, 1, 0], [1, 0, 1]]))
            .unwrap();
        assert!(h.contains(x));
        assert!(!ctx.subgroup(&k1).unwrap().contains(x));
        let whole: SubgroupSpec = serde_json::from_str(r#""whole""#).unwrap();
        assert_eq!(ctx.subgroup(&whole).unwrap().order(), 168);
        assert!(ctx.element(&ElementSpec::Index(168)).is_err());
        let bad: GroupSpec = serde_json::from_str(r#"{"kind":"psl3","p":4}"#).unwrap();
        assert!(matches!(
            bad.build(),
            Err(ConfigError::Group(GroupError::NotPrime(_)))
        ));
    }

    #[test]
    fn refs_are_resolved() {
        let dir = std::env::temp_dir().join(format!("isoscatter-io-{}", std::process::id()));
        fs::create_dir_all(dir.join("sub")).unwrap();
        fs::write(dir.join("sub/group.json"), r#"{"kind":"psl3","p":2}"#).unwrap();
        fs::write(
            dir.join("sub/wrap.json"),
            r#"{"group":{"$ref":"group.json"}}"#,
        )
        .unwrap();
        fs::write(
            dir.join("main.json"),
            r#"{"x":[{"$ref":"sub/wrap.json"}],"y":1}"#,
        )
        .unwrap();
        let v = load_json(&dir.join("main.json")).unwrap();
        assert_eq!(v["x"][0]["group"]["p"], 2);
        fs::write(dir.join("loop.json"), r#"{"$ref":"loop.json"}"#).unwrap();
        assert!(matches!(
            load_json(&dir.join("loop.json")),
            Err(ConfigError::RefDepth(_))
        ));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn csv_digits_roundtrip() {
        let x = 0.1f64 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        let zeros = vec![LocatedZero {
            s: Complex64::new(-1.0, std::f64::consts::PI),
            multiplicity: 4,
        }];
        let csv = zeros_csv(&zeros);
        assert_eq!(csv.lines().next(), Some("re,im,multiplicity"));
        let fields: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(fields[1].parse::<f64>().unwrap(), std::f64::consts::PI);
        let spec = vec![SpectrumEntry {
            length: ComplexLength::new(2.5, 0.5),
            word: "ab".parse::<ReducedWord>().unwrap(),
            period: 2,
            weight: 3,
        }];
        assert!(spectrum_csv(&spec).ends_with(",3,ab^2\n"));
    }

    #[test]
    fn json_floats_have_17_digits() {
        #[derive(Serialize)]
        struct R {
            x: f64,
            v: Vec<f64>,
            n: u32,
        }
        let text = to_json_string(&R {
            x: 0.1,
            v: vec![-2.5e-300, f64::NAN],
            n: 3,
        })
        .unwrap();
        assert!(text.contains("\"x\": 1.0000000000000001e-1"), "{text}");
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
        assert_eq!(back["v"][0].as_f64(), Some(-2.5e-300));
        assert!(back["v"][1].is_null());
        assert_eq!(back["n"], 3);
    }

    #[test]
    fn curve_config_roundtrip() {
        let g = build_psl3(2).unwrap();
        let cfg =
            crate::homology::sunada_curve_fixture(g.group().clone(), &g.inverse_transpose(), 2)
                .unwrap();
        let json = CurveConfigJson::from_config(&cfg, 2);
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.contains("\"D\":{\"coords\""));
        let back: CurveConfigJson = serde_json::from_str(&text).unwrap();
        let cfg2 = back.to_config().unwrap();
        let r = crate::homology::verify_sunada_curve_config(&cfg2).unwrap();
        assert!(r.passed());
    }
}
