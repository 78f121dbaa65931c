//! Experiment runner: reads a JSON config, runs one subcommand and writes
//! CSV/JSON artifacts into an output directory.

pub mod config;

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use typicality_core::dynamics::{
    deviation_measure, typicality_experiment, verify_mixing, DeviationMode, MixingReport, PointSpec,
};
use typicality_core::exact::{ApproxReal, Interval, Rational};
use typicality_core::isomorphism::{cdf_forward, cdf_inverse, CdfIsomorphism};
use typicality_core::measures::{
    find_zero_measure_point, prokhorov, prokhorov_bisect, SUPPORT_CAP,
};
use typicality_core::randomness::{
    builtin_schnorr, builtin_strong_bc, builtin_witnessed, construct_failing_point,
    strong_bc_to_schnorr, verify_failure, SchnorrTest, Verification,
};
use typicality_core::spaces::bits_to_string;
use typicality_core::Error;

pub use config::{parse_config, Experiment, ExperimentConfig, PointInput, SUBCOMMANDS};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for invalid input, 3 for an exhausted stage or precision budget,
    /// 1 for I/O failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_budget() => 3,
            CliError::Config(_) | CliError::Core(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Settings resolved from flags over config over defaults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    pub out: PathBuf,
    pub precision: u32,
    pub budget: u32,
    pub seed: u64,
    /// Directory that relative paths inside the config are resolved from.
    pub base: PathBuf,
}

pub const DEFAULT_PRECISION: u32 = 20;
pub const DEFAULT_BUDGET: u32 = 64;

/// Command-line overrides; `None` falls back to the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub precision: Option<u32>,
    pub budget: Option<u32>,
    pub seed: Option<u64>,
}

impl Settings {
    pub fn resolve(config: &ExperimentConfig, flags: &Overrides, base: &Path) -> Settings {
        Settings {
            out: flags
                .out
                .clone()
                .or_else(|| config.output.clone())
                .unwrap_or_else(|| PathBuf::from(".")),
            precision: flags
                .precision
                .or(config.precision)
                .unwrap_or(DEFAULT_PRECISION),
            budget: flags.budget.or(config.budget).unwrap_or(DEFAULT_BUDGET),
            seed: flags.seed.or(config.seed).unwrap_or(0),
            base: base.to_path_buf(),
        }
    }
}

/// Loads `path`, resolving relative paths against its directory.
pub fn load(path: &Path, subcommand: Option<&str>) -> CliResult<(ExperimentConfig, PathBuf)> {
    let text = read(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((parse_config(&text, subcommand)?, base))
}

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn text(&mut self, name: &str, body: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut body = serde_json::to_string_pretty(value).expect("serializable report");
        body.push('\n');
        self.text(name, &body)
    }
}

/// Runs the experiment and returns the artifact paths in write order.
pub fn run(config: &ExperimentConfig, settings: &Settings) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(&settings.out).map_err(|source| CliError::Io {
        path: settings.out.clone(),
        source,
    })?;
    let mut w = Writer {
        dir: &settings.out,
        written: Vec::new(),
    };
    match &config.experiment {
        Experiment::Birkhoff {
            system,
            observable,
            points,
            schedule,
            max_i,
        } => {
            let sys = system.build()?;
            let points: Vec<PointSpec> = if points.is_empty() {
                vec![PointSpec::Pseudorandom {
                    seed: settings.seed,
                }]
            } else {
                points
                    .iter()
                    .map(|p| p.resolve(&settings.base))
                    .collect::<CliResult<_>>()?
            };
            let reports = points
                .par_iter()
                .map(|p| typicality_experiment(&sys, &p.to_point()?, observable, schedule, *max_i))
                .collect::<Result<Vec<_>, Error>>()?;
            let mut summary = Vec::new();
            for (i, (p, r)) in points.iter().zip(&reports).enumerate() {
                let name = if points.len() == 1 {
                    "birkhoff.csv".to_string()
                } else {
                    format!("birkhoff-{i}.csv")
                };
                w.text(&name, &r.to_csv())?;
                let last = r.final_deviation();
                summary.push(json!({
                    "point": p.to_string(),
                    "csv": name,
                    "mean": r.mean,
                    "window_max": r.window_max,
                    "window_min": r.window_min,
                    "oscillation": r.oscillation(),
                    "final_abs_dev": [last.lo, last.hi],
                }));
            }
            w.json("birkhoff.json", &summary)?;
        }
        Experiment::Correlation {
            system,
            events,
            pairs,
            ns,
            bound,
        } => {
            let sys = system.build()?;
            let bound = bound.build()?;
            let pairs: Vec<(usize, usize)> = match pairs {
                Some(p) => p.clone(),
                None => (0..events.len())
                    .flat_map(|i| (0..events.len()).map(move |j| (i, j)))
                    .collect(),
            };
            let parts = pairs
                .par_iter()
                .map(|&pair| verify_mixing(&sys, events, &[pair], &bound, ns))
                .collect::<Result<Vec<_>, Error>>()?;
            let report = MixingReport {
                shift_horizon_zero: parts
                    .iter()
                    .map(|r| r.shift_horizon_zero)
                    .try_fold(true, |acc, h| h.map(|h| acc && h)),
                entries: parts.into_iter().flat_map(|r| r.entries).collect(),
            };
            let mut csv = String::from("i,j,n,correlation_lo,correlation_hi,bound,verdict\n");
            for e in &report.entries {
                let verdict = serde_json::to_value(e.verdict).expect("verdict");
                csv += &format!(
                    "{},{},{},{},{},{},{}\n",
                    e.i,
                    e.j,
                    e.n,
                    e.correlation_lo,
                    e.correlation_hi,
                    e.bound_hi,
                    verdict.as_str().unwrap_or("")
                );
            }
            w.text("correlation.csv", &csv)?;
            w.json("correlation.json", &report)?;
        }
        Experiment::Deviation {
            system,
            observable,
            deltas,
            ns,
        } => {
            let sys = system.build()?;
            let grid: Vec<(u64, &Rational)> = ns
                .iter()
                .flat_map(|&n| deltas.iter().map(move |d| (n, d)))
                .collect();
            let rows = grid
                .par_iter()
                .map(|&(n, d)| {
                    let exact =
                        match deviation_measure(&sys, observable, d, n, DeviationMode::Exact) {
                            Ok(v) => v.to_pq(),
                            Err(Error::BadDelta { .. }) => "inadmissible".into(),
                            Err(Error::TooLarge(_) | Error::UnsupportedObservable(_)) => {
                                "unavailable".into()
                            }
                            Err(e) => return Err(e),
                        };
                    let cheb = deviation_measure(&sys, observable, d, n, DeviationMode::Chebyshev)?;
                    Ok(format!("{n},{},{exact},{}\n", d.to_pq(), cheb.to_pq()))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            w.text(
                "deviation.csv",
                &(String::from("n,delta,exact,chebyshev\n") + &rows.concat()),
            )?;
        }
        Experiment::Prokhorov { mu, nu } => {
            let (mu, nu) = (mu.load(&settings.base)?, nu.load(&settings.base)?);
            if mu.space() != nu.space() {
                return Err(Error::SpaceMismatch {
                    expected: mu.space(),
                    found: nu.space(),
                }
                .into());
            }
            let value = if mu.len().max(nu.len()) <= SUPPORT_CAP {
                let d = prokhorov(&mu, &nu)?;
                json!({ "distance": d, "exact": true })
            } else {
                let iv = prokhorov_bisect(&mu, &nu, settings.precision)?;
                json!({ "lower": iv.lo, "upper": iv.hi, "exact": false })
            };
            w.json("prokhorov.json", &value)?;
        }
        Experiment::ZeroPoint {
            measure,
            interval,
            levels,
        } => {
            let mu = measure.build()?;
            let iv = Interval::new(interval.0.clone(), interval.1.clone());
            let (point, trace) = find_zero_measure_point(&mu, &iv, settings.budget, *levels)?;
            let approx = point.eval(settings.precision)?;
            w.text("zero_point.csv", &trace.to_csv())?;
            w.json(
                "zero_point.json",
                &json!({ "point": approx, "precision": settings.precision, "trace": trace }),
            )?;
        }
        Experiment::ConvertTest {
            test,
            levels,
            stage,
        } => {
            let bc = builtin_strong_bc(test)?;
            let schnorr = strong_bc_to_schnorr(&bc)?;
            let stage = stage.unwrap_or(1 << (levels + 1).min(16));
            let desc = schnorr.describe(*levels, stage, settings.precision.max(levels + 2))?;
            desc.check()?;
            w.json("test.json", &desc)?;
        }
        Experiment::Verify {
            test,
            point,
            upto,
            replay,
        } => {
            let t = schnorr_by_name(test)?;
            let x = point.resolve(&settings.base)?.to_point()?;
            let v = verify_failure(&x, t.ml(), *upto, settings.budget)?;
            w.json("verification.json", &v)?;
            if let Some(path) = replay {
                let path = settings.base.join(path);
                let old: Verification = serde_json::from_str(&read(&path)?)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let results = old
                    .certificates
                    .iter()
                    .map(|c| Ok(json!({ "level": c.level, "stage": c.stage, "valid": c.replay(&x, t.ml())? })))
                    .collect::<Result<Vec<_>, Error>>()?;
                w.json("replay.json", &results)?;
            }
        }
        Experiment::Construct {
            test,
            check,
            bits,
            upto,
        } => {
            let wt = builtin_witnessed(test, settings.budget)?;
            let x = construct_failing_point(&wt, *check)?;
            let prefix = bits_to_string(&x.bits(*bits)?);
            let v = verify_failure(&x, wt.test().ml(), *upto, settings.budget.max(2 * upto + 8))?;
            w.json(
                "construct.json",
                &json!({ "test": test, "prefix": prefix, "verification": v }),
            )?;
        }
        Experiment::Isomorphism {
            measure,
            points,
            samples,
        } => {
            let iso = CdfIsomorphism::new(&measure.build()?)?;
            let mut xs = points.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
            while xs.len() < points.len() + samples {
                let d = 2 * rng.random_range(1..1000i64) + 1;
                xs.push(Rational::new(rng.random_range(1..d), d));
            }
            let p = settings.precision;
            let rows = xs
                .par_iter()
                .map(|x| {
                    let fx = cdf_forward(&iso, &ApproxReal::constant(x.clone()), settings.budget);
                    let gfx = cdf_inverse(&iso, &fx, settings.budget);
                    Ok(format!(
                        "{},{},{}\n",
                        x.to_pq(),
                        fx.eval(p)?.to_pq(),
                        gfx.eval(p)?.to_pq()
                    ))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            w.text(
                "isomorphism.csv",
                &(String::from("x,F(x),G(F(x))\n") + &rows.concat()),
            )?;
        }
    }
    Ok(w.written)
}

/// A built-in Schnorr test, or `converted:NAME` for a converted strong BC test.
fn schnorr_by_name(name: &str) -> Result<SchnorrTest, Error> {
    match name.strip_prefix("converted:") {
        Some(bc) => strong_bc_to_schnorr(&builtin_strong_bc(bc)?),
        None => builtin_schnorr(name),
    }
}
