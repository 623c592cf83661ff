//! Deterministic simulator and verification laboratory for the
//! box-basket-ball system: exact time evolutions, the birational whurl maps
//! they tropicalize, soliton classification, and scattering analysis.

pub mod combinatorial;
pub mod evolve;
pub mod minplus;
pub mod random;
pub mod scatter;
pub mod soliton;
pub mod state;
pub mod trace;
pub mod verify;
pub mod whurl;
