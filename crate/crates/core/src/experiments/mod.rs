//! Initial data with prescribed regularity, the continuum decay oracle,
//! decay-exponent fits, smallness scans and negative-Besov tracking.

pub mod data;
pub mod decay;
pub mod fit;
pub mod oracle;
pub mod scan;
pub mod track;

pub use data::{gen_initial_data, measure_data, DataReport, DataSpec, RegularityParams};
pub use decay::{decay_experiment, DecayEntry, DecayOptions, DecayReport};
pub use fit::{fit_decay, DecayFit};
pub use oracle::{heat_oracle_radial, oracle_decay, OracleReport, RadialProfile};
pub use scan::{smallness_scan, ScanEntry, ScanOptions, ThresholdReport};
pub use track::{besov_negative, besov_negative_track, smallness_functional, track_run, TrackReport};
