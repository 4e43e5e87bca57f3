pub mod adversary;
pub mod attack_opt;
pub mod bits;
pub mod channels;
pub mod codes;
pub mod distinguish;
pub mod error;
pub mod hashing;
pub mod mat;
pub mod protocol;
pub mod qstate;
pub mod real;
pub mod sample;
pub mod security;
pub mod verify;

pub use error::{Error, Result};

/// Concrete double-precision aliases for the generic core types; the crate
/// is generic over the scalar, these are the defaults everything downstream
/// uses.
pub type CMat64 = mat::CMat<f64>;
pub type DensityMatrix64 = qstate::DensityMatrix<f64>;
pub type BlochVector64 = qstate::BlochVector<f64>;
pub type KrausChannel64 = channels::KrausChannel<f64>;
pub type MeasurementFamily64 = channels::MeasurementFamily<f64>;
pub type StorageAttack64 = distinguish::StorageAttack<f64>;
pub type CqEnsemble64 = distinguish::CqEnsemble<f64>;
pub type AttackParams64 = attack_opt::AttackParams<f64>;
pub type OptResult64 = attack_opt::OptResult<f64>;
