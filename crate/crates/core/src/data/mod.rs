//! Synthetic generators, CSV ingestion, standardization and splitting.

mod io;
mod synth;
mod transform;

pub use io::{load_csv, read_csv, write_csv, TargetColumn};
pub use synth::{generate, ill_conditioned_classification, Family, SynthSpec, ILL_CONDITIONED_DELTA};
pub use transform::{split, standardize, Standardization};
