pub mod geometric;
pub mod sweep;
pub mod turbulence;

pub use geometric::{apply_angular_shift, apply_longitudinal_shift, apply_rotation, apply_transverse_shift};
pub use sweep::{robustness_sweep, DistortionKind, RobustnessReport, SweepConfig, SweepPoint};
pub use turbulence::{make_von_karman_screen, propagate_through_turbulence, structure_function, TurbulenceConfig};
