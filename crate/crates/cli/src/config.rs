//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use typicality_core::dynamics::{
    CorrelationBound, DynSystem, Observable, PointSpec, SubsequenceSchedule,
};
use typicality_core::exact::{ApproxReal, Rational};
use typicality_core::measures::{Atom, CdfForm, ComputableMeasure, FiniteMeasure};
use typicality_core::Result;

use crate::CliError;

pub const SUBCOMMANDS: &[&str] = &[
    "birkhoff",
    "correlation",
    "deviation",
    "prokhorov",
    "zero-point",
    "convert-test",
    "verify",
    "construct",
    "isomorphism",
];

/// A whole config file: the experiment plus run-wide defaults that the
/// command-line flags override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub precision: Option<u32>,
    #[serde(default)]
    pub budget: Option<u32>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Experiment {
    Birkhoff {
        system: SystemSpec,
        observable: Observable,
        /// Starting points; empty means one pseudorandom point from the seed.
        #[serde(default)]
        points: Vec<PointInput>,
        schedule: SubsequenceSchedule,
        max_i: u64,
    },
    Correlation {
        system: SystemSpec,
        events: Vec<Observable>,
        /// Defaults to every ordered pair.
        #[serde(default)]
        pairs: Option<Vec<(usize, usize)>>,
        ns: Vec<u64>,
        bound: BoundSpec,
    },
    Deviation {
        system: SystemSpec,
        observable: Observable,
        deltas: Vec<Rational>,
        ns: Vec<u64>,
    },
    Prokhorov {
        mu: MeasureSource,
        nu: MeasureSource,
    },
    ZeroPoint {
        measure: MeasureSpec,
        interval: (Rational, Rational),
        levels: usize,
    },
    ConvertTest {
        test: String,
        levels: u32,
        #[serde(default)]
        stage: Option<u32>,
    },
    Verify {
        test: String,
        point: PointInput,
        upto: u32,
        /// A previous `verification.json` whose certificates are replayed.
        #[serde(default)]
        replay: Option<PathBuf>,
    },
    Construct {
        test: String,
        #[serde(default = "default_check")]
        check: u32,
        #[serde(default = "default_bits")]
        bits: usize,
        #[serde(default = "default_check")]
        upto: u32,
    },
    Isomorphism {
        measure: MeasureSpec,
        #[serde(default)]
        points: Vec<Rational>,
        /// Extra non-dyadic sample points drawn from the seed.
        #[serde(default)]
        samples: usize,
    },
}

fn default_check() -> u32 {
    12
}

fn default_bits() -> usize {
    64
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Birkhoff { .. } => "birkhoff",
            Experiment::Correlation { .. } => "correlation",
            Experiment::Deviation { .. } => "deviation",
            Experiment::Prokhorov { .. } => "prokhorov",
            Experiment::ZeroPoint { .. } => "zero-point",
            Experiment::ConvertTest { .. } => "convert-test",
            Experiment::Verify { .. } => "verify",
            Experiment::Construct { .. } => "construct",
            Experiment::Isomorphism { .. } => "isomorphism",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemSpec {
    Shift,
    Doubling,
    MannevillePomeau {
        s: Rational,
        #[serde(default)]
        mixing: Option<BoundSpec>,
    },
    /// `theta` is `p/q` or `golden` for `(√5 - 1)/2`.
    Rotation {
        theta: String,
    },
}

impl SystemSpec {
    pub fn build(&self) -> Result<DynSystem> {
        match self {
            SystemSpec::Shift => Ok(DynSystem::shift()),
            SystemSpec::Doubling => Ok(DynSystem::doubling()),
            SystemSpec::MannevillePomeau { s, mixing } => {
                let sys = DynSystem::manneville_pomeau(s.clone())?;
                match mixing {
                    Some(b) => Ok(sys.with_mixing(b.build()?)),
                    None => Ok(sys),
                }
            }
            SystemSpec::Rotation { theta } => Ok(DynSystem::rotation(parse_theta(theta)?)),
        }
    }
}

fn parse_theta(s: &str) -> Result<ApproxReal> {
    if s.trim() == "golden" {
        let root5 = ApproxReal::sqrt(Rational::integer(5));
        return Ok(ApproxReal::try_from_fn(move |n| {
            Ok((root5.eval(n + 1)? - Rational::one()).half())
        })
        .with_bound(Rational::one()));
    }
    Ok(ApproxReal::constant(s.parse()?))
}

/// `|C_n(E_i, E_j)| <= constant / n^alpha` for every pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSpec {
    pub alpha: Rational,
    pub constant: Rational,
}

impl BoundSpec {
    pub fn build(&self) -> Result<CorrelationBound> {
        let c = self.constant.clone();
        CorrelationBound::new(self.alpha.clone(), move |_, _| c.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    Lebesgue,
    Power {
        k: u32,
    },
    Piecewise {
        cuts: Vec<Rational>,
        densities: Vec<Rational>,
    },
    Bernoulli {
        p: Rational,
    },
    Finite(FiniteMeasure),
    /// `blend·atoms + (1 - blend)·rest`.
    Mixture {
        atoms: Vec<Atom>,
        blend: Rational,
        rest: Box<MeasureSpec>,
    },
}

impl MeasureSpec {
    pub fn build(&self) -> Result<ComputableMeasure> {
        match self {
            MeasureSpec::Lebesgue => Ok(ComputableMeasure::lebesgue()),
            MeasureSpec::Power { k } => ComputableMeasure::from_cdf(CdfForm::Power(*k)),
            MeasureSpec::Piecewise { cuts, densities } => {
                ComputableMeasure::piecewise_density(cuts.clone(), densities.clone())
            }
            MeasureSpec::Bernoulli { p } => ComputableMeasure::bernoulli(p.clone()),
            MeasureSpec::Finite(m) => Ok(ComputableMeasure::finite(m.clone())),
            MeasureSpec::Mixture { atoms, blend, rest } => ComputableMeasure::atomic_mixture(
                atoms
                    .iter()
                    .map(|a| (a.point.clone(), a.weight.clone()))
                    .collect(),
                Some(rest.build()?),
                blend.clone(),
            ),
        }
    }
}

/// A starting point as text (`"01(10)"`, `"1/3"`), as a tagged object, or
/// as `{"file": "x.txt"}` holding the text form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointInput {
    Text(String),
    File { file: PathBuf },
    Spec(PointSpec),
}

impl PointInput {
    pub fn resolve(&self, base: &Path) -> std::result::Result<PointSpec, CliError> {
        match self {
            PointInput::Spec(p) => Ok(p.clone()),
            PointInput::Text(s) => Ok(s.parse()?),
            PointInput::File { file } => {
                let path = base.join(file);
                crate::read(&path)?
                    .parse()
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
            }
        }
    }
}

/// A finite measure given inline or as `{"file": "path.json"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureSource {
    File { file: PathBuf },
    Inline(FiniteMeasure),
}

impl MeasureSource {
    pub fn load(&self, base: &Path) -> std::result::Result<FiniteMeasure, CliError> {
        match self {
            MeasureSource::Inline(m) => Ok(m.clone()),
            MeasureSource::File { file } => {
                let path = base.join(file);
                let text = crate::read(&path)?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
            }
        }
    }
}

/// Parses a config, taking the subcommand from `subcommand` when the file
/// does not name one. A file that names a different one is rejected.
pub fn parse_config(
    text: &str,
    subcommand: Option<&str>,
) -> std::result::Result<ExperimentConfig, CliError> {
    let mut value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("not JSON: {e}")))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| CliError::Config("config must be a JSON object".into()))?;
    match (obj.get("subcommand").and_then(|v| v.as_str()), subcommand) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Config(format!(
                "config is for {a:?} but {b:?} was requested"
            )));
        }
        (None, Some(b)) => {
            obj.insert("subcommand".into(), b.into());
        }
        (None, None) => return Err(CliError::Config("no subcommand given".into())),
        _ => {}
    }
    let keys: Vec<String> = obj.keys().cloned().collect();
    let config: ExperimentConfig =
        serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
    // flatten rules out deny_unknown_fields, so compare against a re-serialization
    let known = serde_json::to_value(&config).expect("config serializes");
    let known = known.as_object().expect("object");
    if let Some(k) = keys.iter().find(|k| !known.contains_key(*k)) {
        return Err(CliError::Config(format!(
            "unknown field {k:?} for {}",
            config.experiment.name()
        )));
    }
    Ok(config)
}
