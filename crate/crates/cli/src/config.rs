//! Job configuration: the JSON file passed with `--config`.

use std::collections::BTreeMap;
use std::path::Path;

use loopmod_core::algebra::parse_scalar;
use loopmod_core::heisenberg::HeisenbergKind;
use loopmod_core::phi::{PhiFunction, Sign};
use loopmod_core::roots::AffineType;
use loopmod_core::{Error, Label, Result, Scalar, Truncation};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub algebra: AlgebraSpec,
    pub level_a: String,
    #[serde(default = "default_phi")]
    pub phi: PhiFunction,
    #[serde(default)]
    pub lambda: BTreeMap<String, String>,
    pub truncation: Truncation,
    pub task: Task,
    #[serde(default)]
    pub task_params: serde_json::Value,
    #[serde(default)]
    pub seed: u64,
}

fn default_phi() -> PhiFunction {
    PhiFunction::constant(Sign::Plus)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    /// `"H_n"`, `"H"` or an affine type such as `"A1^(1)"`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    RootSystem,
    PhiVerma,
    WeylClassify,
    Realization,
    LoopModule,
    PartialLoop,
    Verify,
    Probe,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::RootSystem => "root-system",
            Task::PhiVerma => "phi-verma",
            Task::WeylClassify => "weyl-classify",
            Task::Realization => "realization",
            Task::LoopModule => "loop-module",
            Task::PartialLoop => "partial-loop",
            Task::Verify => "verify",
            Task::Probe => "probe",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Algebra {
    Finite(usize),
    Infinite,
    Affine(AffineType),
}

impl Algebra {
    pub fn heisenberg(&self) -> HeisenbergKind {
        match self {
            Algebra::Finite(n) => HeisenbergKind::Finite(*n),
            Algebra::Infinite => HeisenbergKind::Infinite,
            Algebra::Affine(t) => HeisenbergKind::Loop(*t),
        }
    }

    pub fn affine(&self) -> Result<AffineType> {
        match self {
            Algebra::Affine(t) => Ok(*t),
            _ => Err(Error::InvalidArgument("this task needs an affine algebra".into())),
        }
    }
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        let cfg: JobConfig =
            serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.truncation.validate()?;
        self.algebra()?;
        self.level()?;
        for v in self.lambda.values() {
            parse_scalar(v)?;
        }
        if !(self.task_params.is_null() || self.task_params.is_object()) {
            return Err(Error::InvalidArgument("task_params must be an object".into()));
        }
        Ok(())
    }

    pub fn algebra(&self) -> Result<Algebra> {
        match (self.algebra.kind.as_str(), self.algebra.n) {
            ("H_n", Some(n)) if n >= 1 => Ok(Algebra::Finite(n)),
            ("H_n", _) => Err(Error::InvalidArgument("H_n needs n >= 1".into())),
            ("H", None) => Ok(Algebra::Infinite),
            ("H", Some(_)) => Err(Error::InvalidArgument("H takes no n".into())),
            (s, None) => Ok(Algebra::Affine(s.parse()?)),
            (s, Some(_)) => Err(Error::InvalidArgument(format!("{s} takes no n"))),
        }
    }

    pub fn level(&self) -> Result<Scalar> {
        parse_scalar(&self.level_a)
    }

    /// Task parameters, with defaults for missing fields.
    pub fn params<P: DeserializeOwned + Default>(&self) -> Result<P> {
        if self.task_params.is_null() {
            return Ok(P::default());
        }
        serde_json::from_value(self.task_params.clone())
            .map_err(|e| Error::InvalidArgument(format!("bad task_params for {}: {e}", self.task.name())))
    }
}

/// `theta` given as label strings to rationals.
pub fn parse_theta(raw: &BTreeMap<Label, String>) -> Result<BTreeMap<Label, Scalar>> {
    raw.iter().map(|(k, v)| Ok((*k, parse_scalar(v)?))).collect()
}
