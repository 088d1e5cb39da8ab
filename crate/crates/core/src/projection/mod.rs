//! Angular-momentum projection by alternating filter measurements.

mod oracle;
mod record;
mod run;
mod schedule;

pub use oracle::{exact_projector_oracle, ORACLE_LIMIT};
pub use record::{weight_at, weights_csv, ProjectionRecord, RecordRow, Weight};
pub use run::{lowest_occupation, run_j0, run_jhalf, run_projection, MeasurementMode, ProjectionSetup};
pub use schedule::{half_integer_filters, ProjectionSchedule, Target};
