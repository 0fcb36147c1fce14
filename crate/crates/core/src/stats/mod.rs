//! Length and class distribution machinery.

pub mod class;
pub mod kde;
pub mod ks;
pub mod length;
pub mod profile;

pub use class::{
    class_profile, complete_targets, parse_target_proportions, rebalance_plan, total_variation,
    ClassProfile,
};
pub use kde::{kde, silverman_bandwidth, KdeCurve};
pub use ks::ks_distance;
pub use length::{
    interpolation_index, length_profile, per_class_length, LengthProfile, LengthUnit,
};
pub use profile::{profile_dataset, DatasetProfile};
