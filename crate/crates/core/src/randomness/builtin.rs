use super::{MLTest, SchnorrTest, StrongBCTest, WitnessedTest};
use crate::error::{Error, Result};
use crate::exact::{ApproxReal, Rational};
use crate::measures::ComputableMeasure;
use crate::spaces::{EffectiveOpen, IdealBall, SpaceId};

pub const STRONG_BC_BUILTINS: &[&str] = &["halving-intervals", "cantor-ones", "empty"];
pub const SCHNORR_BUILTINS: &[&str] = &[
    "cylinder-zeros",
    "initial-intervals",
    "alternating-cylinders",
];
pub const WITNESSED_BUILTINS: &[&str] = &["cylinder-zeros", "alternating-cylinders"];

/// `(0, 2^-n)` as a ball.
fn initial_interval(n: u32) -> IdealBall {
    let r = Rational::pow2(-(n as i64) - 1);
    IdealBall::interval(r.clone(), r).expect("positive radius")
}

fn ones(n: u32) -> Vec<bool> {
    vec![true; n as usize]
}

/// Named strong Borel-Cantelli tests:
///
/// - `halving-intervals`: `C_n = (0, 2^-n)` under Lebesgue measure.
/// - `cantor-ones`: `C_n = [1^n]` under the fair coin measure.
/// - `empty`: every level empty, under Lebesgue measure.
pub fn builtin_strong_bc(name: &str) -> Result<StrongBCTest> {
    let one = Rational::one();
    match name {
        "halving-intervals" => Ok(StrongBCTest::new(
            name,
            ComputableMeasure::lebesgue(),
            |n| {
                EffectiveOpen::finite(SpaceId::UnitInterval, vec![initial_interval(n)])
                    .expect("interval ball")
            },
            ApproxReal::constant(one.clone()),
            one,
        )),
        "cantor-ones" => Ok(StrongBCTest::new(
            name,
            ComputableMeasure::bernoulli(Rational::new(1, 2))?,
            |n| EffectiveOpen::cylinder(&ones(n)),
            ApproxReal::constant(one.clone()),
            one,
        )),
        "empty" => Ok(StrongBCTest::new(
            name,
            ComputableMeasure::lebesgue(),
            |_| EffectiveOpen::empty(SpaceId::UnitInterval),
            ApproxReal::constant(Rational::zero()),
            Rational::zero(),
        )),
        _ => Err(Error::BadParameter(format!(
            "unknown strong BC test {name:?}"
        ))),
    }
}

/// Named Schnorr tests:
///
/// - `cylinder-zeros`: `A_n = [0^n]` under the fair coin measure.
/// - `initial-intervals`: `A_n = (0, 2^-n)` under Lebesgue measure.
/// - `alternating-cylinders`: `A_n = [(01)^n]` under the fair coin measure.
pub fn builtin_schnorr(name: &str) -> Result<SchnorrTest> {
    let (measure, levels): (ComputableMeasure, fn(u32) -> EffectiveOpen) = match name {
        "cylinder-zeros" => (ComputableMeasure::bernoulli(Rational::new(1, 2))?, |n| {
            EffectiveOpen::cylinder(&vec![false; n as usize])
        }),
        "initial-intervals" => (ComputableMeasure::lebesgue(), |n| {
            EffectiveOpen::finite(SpaceId::UnitInterval, vec![initial_interval(n)])
                .expect("interval ball")
        }),
        "alternating-cylinders" => {
            let ml = MLTest::new(
                name,
                ComputableMeasure::bernoulli(Rational::new(1, 2))?,
                |n| EffectiveOpen::cylinder(&alternating(2 * n)),
            );
            return Ok(SchnorrTest::new(ml, |n| {
                ApproxReal::constant(Rational::pow2(-2 * n as i64))
            }));
        }
        _ => {
            return Err(Error::BadParameter(format!(
                "unknown Schnorr test {name:?}"
            )))
        }
    };
    let ml = MLTest::new(name, measure, levels);
    Ok(SchnorrTest::new(ml, |n| {
        ApproxReal::constant(Rational::pow2(-(n as i64)))
    }))
}

fn alternating(len: u32) -> Vec<bool> {
    (0..len).map(|i| i % 2 == 1).collect()
}

/// Schnorr tests with a nested witness chain, for [`super::construct_failing_point`].
pub fn builtin_witnessed(name: &str, budget: u32) -> Result<WitnessedTest> {
    let test = builtin_schnorr(name)?;
    match name {
        "cylinder-zeros" => Ok(WitnessedTest::new(
            test,
            |n| IdealBall::cantor(&[], Rational::pow2(-(n as i64))).expect("positive radius"),
            budget,
        )),
        "alternating-cylinders" => Ok(WitnessedTest::new(
            test,
            |n| {
                IdealBall::cantor(&alternating(2 * n), Rational::pow2(-2 * n as i64))
                    .expect("positive radius")
            },
            budget,
        )),
        _ => Err(Error::BadParameter(format!(
            "no witness chain for {name:?}"
        ))),
    }
}
