pub mod checkpoint;
pub mod dataset;
pub mod field;
pub mod pgm;
pub mod table;
pub mod tensors;

pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
pub use dataset::{load_dataset, save_dataset, DatasetManifest};
pub use field::{decode_field, encode_field, read_field, write_field};
pub use pgm::{decode_pgm, encode_pgm16, read_pgm, write_pgm16};
pub use table::{config_hash, fmt_f64, read_csv, write_csv, Manifest};
pub use tensors::{decode_tensors, encode_tensors, Tensor};
