//! Model files: JSON documents describing a space, a governing partition, a
//! kernel, named measures and an optional chain. Rationals are strings of
//! the form "p/q" (a bare integer "p" is accepted on input).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use quasikernel::rational::{self, Rational};
use quasikernel::{ChainSpec, FiniteSpace, Kernel, Partition, ProbabilityMeasure};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const MODEL_SCHEMA: &str = "quasikernel-model/1";

/// On-disk shape of a model file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub measures: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<RawChain>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChain {
    pub partitions: Vec<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernels: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<String>>,
}

/// A validated model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub path: PathBuf,
    pub name: Option<String>,
    pub n: usize,
    pub partition: Option<Partition>,
    pub kernel: Option<Kernel>,
    pub measures: BTreeMap<String, ProbabilityMeasure>,
    pub chain: Option<ChainSpec>,
}

impl Model {
    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.path.display().to_string())
    }

    /// The kernel and its governing partition, or a diagnostic naming the
    /// missing section.
    pub fn kernel_and_partition(&self) -> Result<(&Kernel, &Partition), CliError> {
        match (&self.kernel, &self.partition) {
            (Some(k), Some(p)) => Ok((k, p)),
            _ => Err(CliError::Model {
                path: self.path.clone(),
                message: "this command needs the \"partition\" and \"kernel\" sections".into(),
            }),
        }
    }

    pub fn chain(&self) -> Result<&ChainSpec, CliError> {
        self.chain.as_ref().ok_or_else(|| CliError::Model {
            path: self.path.clone(),
            message: "this command needs a \"chain\" section".into(),
        })
    }

    /// Canonical raw form: normalized rationals, canonical partitions.
    pub fn to_raw(&self) -> RawModel {
        RawModel {
            schema: MODEL_SCHEMA.to_string(),
            name: self.name.clone(),
            n: self.n,
            partition: self.partition.as_ref().map(Partition::to_blocks),
            kernel: self.kernel.as_ref().map(|k| format_rows(k.rows())),
            measures: self
                .measures
                .iter()
                .map(|(k, v)| (k.clone(), format_vec(v.masses())))
                .collect(),
            chain: self.chain.as_ref().map(|c| RawChain {
                partitions: c.partitions().iter().map(Partition::to_blocks).collect(),
                kernels: c
                    .kernels()
                    .map(|ks| ks.iter().map(|k| format_rows(k.rows())).collect()),
                reference: c.reference().map(|m| format_vec(m.masses())),
            }),
        }
    }

    /// Canonical file text (pretty JSON with a trailing newline).
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_raw()).expect("models serialize");
        s.push('\n');
        s
    }
}

pub fn format_vec(values: &[Rational]) -> Vec<String> {
    values.iter().map(rational::format).collect()
}

pub fn format_rows(rows: &[Vec<Rational>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| format_vec(r)).collect()
}

pub fn read_model(path: &Path) -> Result<Model, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_model(&text, path)
}

pub fn parse_model(text: &str, path: &Path) -> Result<Model, CliError> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| CliError::Syntax {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    validate(raw, path)
}

struct Ctx<'a> {
    path: &'a Path,
}

impl Ctx<'_> {
    fn invalid(&self, location: impl Into<String>, source: quasikernel::Error) -> CliError {
        CliError::Validation {
            path: self.path.to_path_buf(),
            location: location.into(),
            source,
        }
    }

    fn model(&self, message: impl Into<String>) -> CliError {
        CliError::Model {
            path: self.path.to_path_buf(),
            message: message.into(),
        }
    }

    fn vector(&self, location: &str, values: &[String]) -> Result<Vec<Rational>, CliError> {
        values
            .iter()
            .enumerate()
            .map(|(i, s)| {
                rational::parse(s).map_err(|source| CliError::Rational {
                    path: self.path.to_path_buf(),
                    location: format!("{location}[{i}]"),
                    source,
                })
            })
            .collect()
    }

    fn matrix(&self, location: &str, rows: &[Vec<String>]) -> Result<Vec<Vec<Rational>>, CliError> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| self.vector(&format!("{location}[{i}]"), r))
            .collect()
    }

    fn partition(
        &self,
        location: &str,
        space: FiniteSpace,
        blocks: &[Vec<usize>],
    ) -> Result<Partition, CliError> {
        Partition::new(space, blocks).map_err(|e| self.invalid(location, e))
    }

    fn measure(
        &self,
        location: &str,
        values: &[String],
        n: usize,
    ) -> Result<ProbabilityMeasure, CliError> {
        let v = self.vector(location, values)?;
        if v.len() != n {
            return Err(self.invalid(
                location,
                quasikernel::Error::SpaceMismatch {
                    left: n,
                    right: v.len(),
                },
            ));
        }
        ProbabilityMeasure::new(v).map_err(|e| self.invalid(location, e))
    }

    fn kernel(
        &self,
        location: &str,
        rows: &[Vec<String>],
        governing: &Partition,
    ) -> Result<Kernel, CliError> {
        let m = self.matrix(location, rows)?;
        Kernel::new(m, governing.clone()).map_err(|e| self.invalid(location, e))
    }
}

fn validate(raw: RawModel, path: &Path) -> Result<Model, CliError> {
    let ctx = Ctx { path };
    if raw.schema != MODEL_SCHEMA {
        return Err(ctx.model(format!(
            "unsupported schema {:?}, expected {MODEL_SCHEMA:?}",
            raw.schema
        )));
    }
    let space = FiniteSpace::new(raw.n).map_err(|e| ctx.invalid("n", e))?;
    let n = raw.n;
    let partition = raw
        .partition
        .as_ref()
        .map(|b| ctx.partition("partition", space, b))
        .transpose()?;
    let kernel = match (&raw.kernel, &partition) {
        (Some(rows), Some(p)) => Some(ctx.kernel("kernel", rows, p)?),
        (Some(_), None) => return Err(ctx.model("a kernel needs a \"partition\" section")),
        (None, _) => None,
    };
    let measures = raw
        .measures
        .iter()
        .map(|(name, v)| {
            Ok((
                name.clone(),
                ctx.measure(&format!("measures.{name}"), v, n)?,
            ))
        })
        .collect::<Result<BTreeMap<_, _>, CliError>>()?;
    let chain = match &raw.chain {
        None => None,
        Some(c) => {
            let partitions = c
                .partitions
                .iter()
                .enumerate()
                .map(|(i, b)| ctx.partition(&format!("chain.partitions[{i}]"), space, b))
                .collect::<Result<Vec<_>, _>>()?;
            let kernels = match &c.kernels {
                None => None,
                Some(ks) => {
                    if ks.len() != partitions.len() {
                        return Err(ctx.model(format!(
                            "chain has {} partitions but {} kernels",
                            partitions.len(),
                            ks.len()
                        )));
                    }
                    Some(
                        ks.iter()
                            .zip(&partitions)
                            .enumerate()
                            .map(|(i, (k, p))| ctx.kernel(&format!("chain.kernels[{i}]"), k, p))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
            };
            let reference = c
                .reference
                .as_ref()
                .map(|v| ctx.measure("chain.reference", v, n))
                .transpose()?;
            Some(
                ChainSpec::new(partitions, kernels, reference)
                    .map_err(|e| ctx.invalid("chain", e))?,
            )
        }
    };
    Ok(Model {
        path: path.to_path_buf(),
        name: raw.name,
        n,
        partition,
        kernel,
        measures,
        chain,
    })
}

/// Reads a measure file: either a bare JSON array of rationals or an object
/// with a "measure" array.
pub fn read_measure(path: &Path, n: usize) -> Result<ProbabilityMeasure, CliError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum MeasureFile {
        Bare(Vec<String>),
        Wrapped { measure: Vec<String> },
    }
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: MeasureFile = serde_json::from_str(&text).map_err(|e| CliError::Syntax {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let values = match file {
        MeasureFile::Bare(v) | MeasureFile::Wrapped { measure: v } => v,
    };
    Ctx { path }.measure("measure", &values, n)
}
