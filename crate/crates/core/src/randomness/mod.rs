//! Randomness tests as leveled enumerations of effective open sets.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ApproxReal, Rational};
use crate::measures::{derive_bounds, ComputableMeasure};
use crate::spaces::{
    ball_membership, open_membership, ApproxPoint, EffectiveOpen, IdealBall, Membership, SpaceId,
};

mod builtin;
mod construct;
mod convert;
mod deviation;

pub use builtin::{
    builtin_schnorr, builtin_strong_bc, builtin_witnessed, SCHNORR_BUILTINS, STRONG_BC_BUILTINS,
    WITNESSED_BUILTINS,
};
pub use construct::{
    construct_failing_point, oscillating_block_end, oscillating_ones, oscillating_point,
    WitnessedTest,
};
pub use convert::{least_exponent, strong_bc_to_schnorr, strong_bc_to_schnorr_with};
pub use deviation::deviation_schnorr_test;

type LevelFn = Arc<dyn Fn(u32) -> EffectiveOpen + Send + Sync>;
type MeasureFn = Arc<dyn Fn(u32) -> ApproxReal + Send + Sync>;

/// Levels `A_n` with `μ(A_n) <= 2^-n` (the bound is the constructor's
/// contract).
#[derive(Clone)]
pub struct MLTest {
    name: String,
    measure: ComputableMeasure,
    levels: LevelFn,
}

impl MLTest {
    pub fn new<F>(name: impl Into<String>, measure: ComputableMeasure, levels: F) -> Self
    where
        F: Fn(u32) -> EffectiveOpen + Send + Sync + 'static,
    {
        MLTest {
            name: name.into(),
            measure,
            levels: Arc::new(levels),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn measure(&self) -> &ComputableMeasure {
        &self.measure
    }

    pub fn space(&self) -> SpaceId {
        self.measure.space()
    }

    pub fn level(&self, n: u32) -> EffectiveOpen {
        (self.levels)(n)
    }

    /// Certified bracket of the measure of the stage-`t` list of `A_n`.
    pub fn stage_bounds(&self, n: u32, t: u32) -> Result<(Rational, Rational)> {
        derive_bounds(&self.measure, &self.level(n).stage(t), t)
    }
}

impl fmt::Debug for MLTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MLTest({:?} on {})", self.name, self.space())
    }
}

/// An ML test whose level measures are uniformly computable.
#[derive(Clone)]
pub struct SchnorrTest {
    test: MLTest,
    measures: MeasureFn,
}

impl SchnorrTest {
    pub fn new<F>(test: MLTest, measures: F) -> Self
    where
        F: Fn(u32) -> ApproxReal + Send + Sync + 'static,
    {
        SchnorrTest {
            test,
            measures: Arc::new(measures),
        }
    }

    pub fn ml(&self) -> &MLTest {
        &self.test
    }

    pub fn name(&self) -> &str {
        self.test.name()
    }

    pub fn space(&self) -> SpaceId {
        self.test.space()
    }

    pub fn level(&self, n: u32) -> EffectiveOpen {
        self.test.level(n)
    }

    /// `μ(A_n)` as a computable real.
    pub fn level_measure(&self, n: u32) -> ApproxReal {
        (self.measures)(n)
    }

    /// Certified enclosure `[v - 2^-p, v + 2^-p]` of `μ(A_n)`, clipped to `[0, 1]`.
    pub fn measure_enclosure(&self, n: u32, p: u32) -> Result<(Rational, Rational)> {
        let v = self.level_measure(n).eval(p)?;
        let e = Rational::pow2(-(p as i64));
        Ok((
            (&v - &e).max(Rational::zero()),
            (v + e).min(Rational::one()),
        ))
    }

    /// JSON-ready description of levels `1..=upto` at stage `stage`.
    pub fn describe(&self, upto: u32, stage: u32, precision: u32) -> Result<TestDescription> {
        let mut levels = Vec::new();
        for n in 1..=upto {
            let (lo, hi) = self.measure_enclosure(n, precision)?;
            levels.push(LevelDescription {
                level: n,
                stage,
                balls: self.level(n).stage(stage),
                measure_lower: lo,
                measure_upper: hi,
            });
        }
        Ok(TestDescription {
            name: self.name().to_string(),
            space: self.space(),
            levels,
        })
    }
}

impl fmt::Debug for SchnorrTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SchnorrTest({:?} on {})", self.name(), self.space())
    }
}

/// Levels `C_n` (`n >= 1`) with `Σ μ(C_n)` computable; a point fails the
/// test when it lies in infinitely many levels.
#[derive(Clone)]
pub struct StrongBCTest {
    name: String,
    measure: ComputableMeasure,
    levels: LevelFn,
    sum: ApproxReal,
    sum_upper: Rational,
    budget: u32,
}

impl StrongBCTest {
    /// `sum_upper` must bound `Σ μ(C_n)` from above; `sum` computes it.
    pub fn new<F>(
        name: impl Into<String>,
        measure: ComputableMeasure,
        levels: F,
        sum: ApproxReal,
        sum_upper: Rational,
    ) -> Self
    where
        F: Fn(u32) -> EffectiveOpen + Send + Sync + 'static,
    {
        StrongBCTest {
            name: name.into(),
            measure,
            levels: Arc::new(levels),
            sum,
            sum_upper,
            budget: 64,
        }
    }

    /// Extra stages the converted measure oracle may use.
    pub fn with_budget(mut self, budget: u32) -> Self {
        self.budget = budget;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn measure(&self) -> &ComputableMeasure {
        &self.measure
    }

    pub fn space(&self) -> SpaceId {
        self.measure.space()
    }

    pub fn level(&self, n: u32) -> EffectiveOpen {
        (self.levels)(n)
    }

    pub fn sum(&self) -> &ApproxReal {
        &self.sum
    }

    pub fn sum_upper(&self) -> &Rational {
        &self.sum_upper
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    /// Levels `n <= stage` whose stage-`stage` list certifiably contains `x`.
    pub fn hits(&self, x: &ApproxPoint, stage: u32) -> Result<Vec<u32>> {
        let mut out = Vec::new();
        for n in 1..=stage {
            if open_membership(x, &self.level(n), stage)?.is_some() {
                out.push(n);
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for StrongBCTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "StrongBCTest({:?} on {}, sum <= {})",
            self.name,
            self.space(),
            self.sum_upper
        )
    }
}

/// A certified membership `x ∈ A_level`, witnessed by one enumerated ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCertificate {
    pub test: String,
    pub level: u32,
    pub stage: u32,
    pub witness: IdealBall,
}

impl FailureCertificate {
    /// Re-checks that the witness is listed at `stage` and contains `x`.
    pub fn replay(&self, x: &ApproxPoint, test: &MLTest) -> Result<bool> {
        if self.test != test.name() {
            return Ok(false);
        }
        let listed = test
            .level(self.level)
            .stage(self.stage)
            .contains(&self.witness);
        Ok(listed && ball_membership(x, &self.witness, self.stage)? == Membership::Yes)
    }
}

/// Certificates for the levels that were certified and the list of those
/// that were not. A missing certificate proves nothing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub certificates: Vec<FailureCertificate>,
    pub uncertified: Vec<u32>,
}

impl Verification {
    pub fn is_complete(&self) -> bool {
        self.uncertified.is_empty()
    }
}

/// Tries to certify `x ∈ A_n` for `n = 1..=upto`, using stages `0..=budget`.
pub fn verify_failure(
    x: &ApproxPoint,
    test: &MLTest,
    upto: u32,
    budget: u32,
) -> Result<Verification> {
    if x.space() != test.space() {
        return Err(Error::SpaceMismatch {
            expected: test.space(),
            found: x.space(),
        });
    }
    let mut certificates = Vec::new();
    let mut uncertified = Vec::new();
    for n in 1..=upto {
        let level = test.level(n);
        let mut found = None;
        for t in 0..=budget {
            if let Some(ball) = open_membership(x, &level, t)? {
                found = Some(FailureCertificate {
                    test: test.name().to_string(),
                    level: n,
                    stage: t,
                    witness: ball,
                });
                break;
            }
        }
        match found {
            Some(c) => certificates.push(c),
            None => uncertified.push(n),
        }
    }
    Ok(Verification {
        certificates,
        uncertified,
    })
}

/// One level of a serialized test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDescription {
    pub level: u32,
    pub stage: u32,
    pub balls: Vec<IdealBall>,
    pub measure_lower: Rational,
    pub measure_upper: Rational,
}

/// Serialized snapshot of a Schnorr test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestDescription {
    pub name: String,
    pub space: SpaceId,
    pub levels: Vec<LevelDescription>,
}

impl TestDescription {
    /// Balls live in the declared space, brackets are ordered and inside
    /// `[0, 1]`, and no level certifiably exceeds `2^-n`.
    pub fn check(&self) -> Result<()> {
        for l in &self.levels {
            for b in &l.balls {
                if b.space() != self.space {
                    return Err(Error::SpaceMismatch {
                        expected: self.space,
                        found: b.space(),
                    });
                }
            }
            if l.measure_lower.is_negative()
                || l.measure_lower > l.measure_upper
                || l.measure_upper > Rational::one()
            {
                return Err(Error::BadParameter(format!(
                    "level {}: bad measure bracket",
                    l.level
                )));
            }
            if l.measure_lower > Rational::pow2(-(l.level as i64)) {
                return Err(Error::BadParameter(format!(
                    "level {}: measure exceeds 2^-{}",
                    l.level, l.level
                )));
            }
        }
        Ok(())
    }

    /// Every level certified strictly below `2^-n`.
    pub fn certifies_bound(&self) -> bool {
        self.levels
            .iter()
            .all(|l| l.measure_upper < Rational::pow2(-(l.level as i64)))
    }
}

#[cfg(test)]
mod tests;
