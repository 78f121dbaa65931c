//! Exact rationals, rational intervals and oracle-presented reals.

mod interval;
pub mod pairing;
mod rational;
mod real;

pub use interval::Interval;
pub use rational::Rational;
pub use real::{
    combine, eval, semis_to_computable, separate, ApproxReal, Direction, Evaluation, Op, SemiReal,
    Separation,
};
