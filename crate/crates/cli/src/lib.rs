//! Experiment files, result envelopes, figure replication and the worked
//! example check behind the `cosearch` command.

pub mod app;
pub mod config;
pub mod envelope;
pub mod figure;
pub mod plot;
pub mod worked;

pub use app::{rerun, AppError, OutputOpts};
pub use config::{parse_experiment, ConfigError, ErrorCode, ExperimentFile};
pub use envelope::{emit_results, Format, Payload, ResultEnvelope, CSV_COLUMNS};
pub use figure::{replicate_figure, FigureData, FigureParams};
pub use plot::render_svg;
pub use worked::show_worked_examples;
