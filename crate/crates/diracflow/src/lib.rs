pub mod causal;
pub mod error;
pub mod export;
pub mod fock;
pub mod gamma;
pub mod lattice;
pub mod modes;
pub mod multiwave;
pub mod run;
pub mod scenario;
pub mod spectral;
pub mod stats;
pub mod trajectory;
pub mod projection;
