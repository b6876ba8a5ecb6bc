//! Operator quantum error correction: noiseless subsystems, correctable
//! subsystems and recovery synthesis for finite-dimensional channels.

pub mod algebra;
pub mod channel;
pub mod correction;
pub mod error;
pub mod examples;
pub mod matkit;
pub mod noiseless;
pub mod random;
pub mod space;
pub mod uns;

pub use algebra::{AlgebraBasis, Block, BlockStructure};
pub use channel::{ChannelReport, QuantumChannel};
pub use correction::{KLReport, OQECReport, RecoveryChannel, RecoveryOrigin};
pub use error::*;
pub use matkit::{ComplexMatrix, Tolerance, C64};
pub use noiseless::{NSReport, SubsystemDecomposition};
pub use space::OperatorSpace;
pub use uns::UNSReport;
