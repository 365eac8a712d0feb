//! Floquet PT-symmetry of a two-level system under pulsed measurement.
//!
//! A drive segment (coupling Ω for `t₀`) alternates with a measurement
//! segment (loss γ on `|1⟩` for `t₁`). The one-period propagator decides
//! whether the stroboscopic dynamics oscillates (unbroken phase) or decays
//! (broken phase); the boundary is `cos²(Ωt₀/2)·cosh²(γt₁/2) = 1`.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod models;
pub mod smallmat;
pub mod sweeps;

pub use error::{Error, Result};
pub use floquet::PhaseLabel;
pub use models::DimensionlessPoint;
