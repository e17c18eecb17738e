pub mod dataset;
pub mod optimizer;
pub mod trainer;

pub use dataset::{generate_dataset, Dataset, DatasetConfig, Sample, Split};
pub use optimizer::{learning_rate, Adam};
pub use trainer::{evaluate, temperature_sweep, train, EpochRecord, EvalReport, SweepRow, TrainConfig, TrainReport};
