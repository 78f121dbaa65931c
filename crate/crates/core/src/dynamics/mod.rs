//! Dynamical systems, Birkhoff averages, correlations and deviation sets.

mod birkhoff;
mod deviation;
mod experiment;
mod mixing;
mod observable;
mod schedule;
mod step;
mod system;

pub use birkhoff::{
    birkhoff_average, birkhoff_averages, correlation, correlation_enclosure, preimage_mean,
    Average, ENUM_LIMIT,
};
pub use deviation::{
    delta_admissible, deviation_cover, deviation_measure, variance_bound, DeviationMode,
    DEVIATION_LIMIT,
};
pub use experiment::{
    pseudorandom_point, typicality_experiment, BirkhoffReport, BirkhoffRow, PointSpec,
    DENSE_SAMPLES,
};
pub use mixing::{verify_mixing, CorrelationBound, MixingEntry, MixingReport, Verdict};
pub use observable::Observable;
pub use schedule::{interpolation_gap_check, make_schedule, SubsequenceSchedule};
pub use step::{step_approx, StepApproximation, StepLevel, StepSource};
pub use system::{iterate, DynSystem, SystemKind};

pub(crate) use birkhoff::IntTable;
pub(crate) use deviation::exact_mass as deviation_exact_mass;

#[cfg(test)]
mod tests;
