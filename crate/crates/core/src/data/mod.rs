//! Dataset ingestion, parameter persistence and synthetic data.

mod csv_io;
mod persist;
mod synth;

pub use csv_io::{
    load_dataset, load_dataset_from, write_dataset, ClassifierEntry, Manifest, ManifestOptions,
    Rescale, MANIFEST_VERSION,
};
pub use persist::{
    load_accuracy_table, load_ds0_reference, load_evidence, save_accuracy_table,
    save_ds0_reference, save_evidence, EvidenceArtifact, TrainingMeta, FORMAT, PARAMS_VERSION,
};
pub use synth::{calibrate, gen_split, gen_synthetic, SynthSpec, PILOT_DRAWS};
