//! Experiment config: one JSON file, specs may be pulled in with `$ref`.

use std::path::Path;

use serde::Deserialize;

use isoscatter_core::io::{
    load_json, CurveConfigJson, ElementSpec, GroupSpec, SchottkyJson, SubgroupSpec,
};
use isoscatter_core::zeta::{Rect, ZetaTruncation};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schottky: Option<SchottkyJson>,
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub subgroups: Vec<SubgroupSpec>,
    /// Images of the free generators; a frozen generating pair by default.
    pub hom: Option<Vec<ElementSpec>>,
    /// Generators for the Schreier graphs; the hom images by default.
    pub generators: Option<Vec<ElementSpec>>,
    pub truncation: Option<ZetaTruncation>,
    pub scan: Option<ScanConfig>,
    pub tol: Option<f64>,
    pub curves: Option<CurvesConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub rect: Rect,
    pub resolution: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CurvesConfig {
    Fixture { fixture: FixtureConfig },
    Explicit(Box<CurveConfigJson>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureConfig {
    #[serde(default = "default_p")]
    pub p: u32,
    pub k: i64,
}

fn default_p() -> u32 {
    2
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let value = load_json(path)?;
        serde_json::from_value(value)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn schottky(&self) -> Result<&SchottkyJson, CliError> {
        self.schottky.as_ref().ok_or_else(|| missing("schottky"))
    }

    pub fn group(&self) -> Result<&GroupSpec, CliError> {
        self.group.as_ref().ok_or_else(|| missing("group"))
    }

    pub fn subgroup_pair(&self) -> Result<(&SubgroupSpec, &SubgroupSpec), CliError> {
        match &self.subgroups[..] {
            [h1, h2] => Ok((h1, h2)),
            other => Err(CliError::Config(format!(
                "need exactly 2 subgroups, got {}",
                other.len()
            ))),
        }
    }

    pub fn scan(&self) -> Result<&ScanConfig, CliError> {
        self.scan.as_ref().ok_or_else(|| missing("scan"))
    }

    /// Config truncation with command-line overrides.
    pub fn truncation(
        &self,
        n_max: Option<usize>,
        k_max: Option<u32>,
    ) -> Result<ZetaTruncation, CliError> {
        let base = self.truncation.unwrap_or_default();
        Ok(ZetaTruncation::new(
            n_max.unwrap_or(base.n_max),
            k_max.unwrap_or(base.k_max),
        )?)
    }
}

fn missing(field: &str) -> CliError {
    CliError::Config(format!("config has no `{field}` entry"))
}
