//! Exact Wigner symbols, Racah unit tensors, and the frame-vector machinery
//! for checking SIC-POVMs and mutually unbiased bases.

pub mod family;
pub mod frame;
pub mod linalg;
pub mod mub;
pub mod report;
pub mod sic;
pub mod tensor;
pub mod wigner;
