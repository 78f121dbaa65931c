use std::collections::BTreeMap;
use std::fmt;

use super::observable::Observable;
use crate::error::{Error, Result};
use crate::exact::{ApproxReal, Interval, Rational};
use crate::measures::{
    find_zero_measure_point, pushforward, Atom, ComputableMeasure, FiniteMeasure, Morphism,
    ZeroMeasureTrace,
};
use crate::spaces::{IdealPoint, SpaceId};

/// What is being approximated by a step function.
#[derive(Debug, Clone)]
pub enum StepSource {
    /// A bounded observable; its pushforward is a finite measure.
    Observable(Observable),
    /// A morphism into `[0, 1]`, taken with bound `M = 1`.
    Map(Morphism),
}

/// One level `r_i` with a window known to contain it and, for levels
/// inside `[-M, M]`, the nested-thirds certificate that `μ(f^-1{r_i}) = 0`.
#[derive(Clone)]
pub struct StepLevel {
    pub value: ApproxReal,
    pub window: Interval,
    pub trace: Option<ZeroMeasureTrace>,
    scale: Rational,
    shift: Rational,
}

impl StepLevel {
    fn exact(r: Rational) -> Self {
        StepLevel {
            value: ApproxReal::constant(r.clone()),
            window: Interval::point(r),
            trace: None,
            scale: Rational::one(),
            shift: Rational::zero(),
        }
    }

    /// Smallest certified interval around the level, in the original units.
    pub fn enclosure(&self) -> Interval {
        match &self.trace {
            Some(t) => {
                let j = t.intervals.last().expect("nonempty trace");
                Interval::new(
                    &j.lo * &self.scale - &self.shift,
                    &j.hi * &self.scale - &self.shift,
                )
            }
            None => self.window.clone(),
        }
    }

    /// Certified upper bound on the mass of the level set.
    pub fn mass_upper(&self) -> Rational {
        self.trace
            .as_ref()
            .and_then(|t| t.upper_bounds.last().cloned())
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Debug for StepLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StepLevel({:?} in {:?})", self.value, self.enclosure())
    }
}

/// Levels `r_1 < ... < r_k` with gaps below `ε`, each of null preimage.
/// The outer two sit just beyond `[-M, M]`, where the pushforward has no
/// mass, so atoms at `±M` never become levels.
#[derive(Debug, Clone)]
pub struct StepApproximation {
    pub epsilon: Rational,
    pub bound: Rational,
    pub levels: Vec<StepLevel>,
}

impl StepApproximation {
    /// Certified bound on every gap `r_{i+1} - r_i`, hence on `|f - f_ε|`
    /// off the level sets.
    pub fn max_gap(&self) -> Rational {
        self.levels
            .windows(2)
            .map(|w| &w[1].enclosure().hi - &w[0].enclosure().lo)
            .fold(Rational::zero(), Rational::max)
    }

    /// Gaps below `ε`, windows ordered, traces valid.
    pub fn check(&self) -> Result<()> {
        if self.max_gap() >= self.epsilon {
            return Err(Error::BadParameter(format!(
                "gap {} is not below {}",
                self.max_gap(),
                self.epsilon
            )));
        }
        for w in self.levels.windows(2) {
            if w[0].enclosure().hi > w[1].enclosure().lo {
                return Err(Error::BadParameter("level windows overlap".into()));
            }
        }
        for l in &self.levels {
            if let Some(t) = &l.trace {
                t.check().map_err(Error::BadParameter)?;
            }
        }
        Ok(())
    }
}

/// `μ ∘ f^-1` as a finite measure of `(value, mass)` pairs.
fn observable_pushforward(
    f: &Observable,
    mu: &ComputableMeasure,
) -> Result<Vec<(Rational, Rational)>> {
    let mut masses: BTreeMap<Rational, Rational> = BTreeMap::new();
    match f {
        Observable::Cylinder { word } => {
            let m = mu.cylinder_mass(word).ok_or_else(|| {
                Error::UnsupportedObservable("cylinder mass needs a Bernoulli measure".into())
            })?;
            masses.insert(Rational::one(), m.clone());
            *masses
                .entry(Rational::zero())
                .or_insert_with(Rational::zero) += Rational::one() - m;
        }
        _ => {
            for (lo, hi, v) in f.interval_pieces()? {
                let w = mu
                    .closed_cdf(&hi)
                    .zip(mu.closed_cdf(&lo))
                    .map(|(b, a)| b - a)
                    .ok_or_else(|| Error::UnsupportedObservable("no closed-form CDF".into()))?;
                *masses.entry(v).or_insert_with(Rational::zero) += w;
            }
        }
    }
    Ok(masses
        .into_iter()
        .filter(|(_, m)| m.is_positive())
        .collect())
}

/// Levels chosen by the zero-measure search inside consecutive windows of
/// width at most `ε/3` covering `[-M, M]`, plus one level just outside each
/// end; consecutive levels are then less than `2ε/3` apart.
pub fn step_approx(
    source: &StepSource,
    mu: &ComputableMeasure,
    epsilon: &Rational,
    budget: u32,
    depth: usize,
) -> Result<StepApproximation> {
    if !epsilon.is_positive() {
        return Err(Error::BadParameter(format!(
            "epsilon {epsilon} must be positive"
        )));
    }
    let bound = match source {
        StepSource::Observable(f) => f.bound(),
        StepSource::Map(m) => {
            if m.target(mu.space()) != SpaceId::UnitInterval {
                return Err(Error::UnsupportedMorphism(format!(
                    "{m:?} does not land in [0, 1]"
                )));
            }
            Rational::one()
        }
    };
    let two_m = Rational::integer(2) * bound.clone();
    let (windows, eta) = if *epsilon > two_m {
        (0i64, (epsilon - &two_m) * Rational::new(1, 4))
    } else {
        let k = (&two_m * &Rational::integer(3) / epsilon).ceil();
        let k = i64::try_from(&k).map_err(|_| Error::TooLarge(format!("{k} windows")))?;
        (k, &two_m / &Rational::integer(k))
    };
    let lo_end = -(&bound + &eta);
    let span = &two_m + &(Rational::integer(2) * eta.clone());
    // y = (x - lo_end) / span maps [-M - η, M + η] onto [0, 1].
    let to_unit = |x: &Rational| (x - &lo_end) / span.clone();
    let mut levels = vec![StepLevel::exact(lo_end.clone())];
    if windows > 0 {
        let nu = rescaled_pushforward(source, mu, &span, &lo_end)?;
        for j in 0..windows {
            let a = -bound.clone() + &eta * &Rational::integer(j);
            let b = &a + &eta;
            let unit = Interval::new(to_unit(&a), to_unit(&b));
            let (y, trace) = find_zero_measure_point(&nu, &unit, budget, depth)?;
            let extra = span.ceil_log2().max(0) as u32;
            let (sc, sh) = (span.clone(), -lo_end.clone());
            let value =
                ApproxReal::try_from_fn(move |p| Ok(y.eval(p + extra)? * sc.clone() - sh.clone()));
            levels.push(StepLevel {
                value,
                window: Interval::new(a, b),
                trace: Some(trace),
                scale: span.clone(),
                shift: -lo_end.clone(),
            });
        }
    }
    levels.push(StepLevel::exact(&bound + &eta));
    Ok(StepApproximation {
        epsilon: epsilon.clone(),
        bound,
        levels,
    })
}

fn rescaled_pushforward(
    source: &StepSource,
    mu: &ComputableMeasure,
    span: &Rational,
    lo_end: &Rational,
) -> Result<ComputableMeasure> {
    match source {
        StepSource::Observable(f) => {
            let atoms = observable_pushforward(f, mu)?
                .into_iter()
                .map(|(v, m)| {
                    Ok(Atom {
                        point: IdealPoint::rational((v - lo_end) / span.clone())?,
                        weight: m,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ComputableMeasure::finite(FiniteMeasure::new(
                SpaceId::UnitInterval,
                atoms,
            )?))
        }
        StepSource::Map(m) => {
            let nu = pushforward(mu, m)?;
            let scale = span.recip();
            let offset = -(lo_end * &scale);
            pushforward(&nu, &Morphism::affine(scale, offset)?)
        }
    }
}
