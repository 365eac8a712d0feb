//! Hamiltonians and measurement protocols.
//!
//! Basis ordering is `(|0⟩, |1⟩)` for the two-level models and
//! `(|0⟩, |1⟩, |P⟩)` for the three-level model. Loss always acts on `|1⟩`
//! (or on `|P⟩` before adiabatic elimination). ħ = 1, so couplings are in
//! rad/s and rates in 1/s.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::floquet::PhaseLabel;
use crate::smallmat::{Mat2, Mat3, SquareMatrix, C64};

/// Width of the `γ/Ω = 1` band reported as an exceptional point.
pub const STATIC_EP_TOLERANCE: f64 = 1e-12;

/// Ratio both `Ω′/Ω` and `Γ/Ω` must reach for adiabatic elimination.
pub const REDUCTION_RATIO: f64 = 10.0;

/// Converts a frequency in MHz to an angular rate in rad/s.
pub fn mhz_to_rad_per_s(mhz: f64) -> f64 {
    2.0 * PI * mhz * 1e6
}

pub fn us_to_s(us: f64) -> f64 {
    us * 1e-6
}

/// `−iγ|1⟩⟨1| + (Ω/2)(|0⟩⟨1| + |1⟩⟨0|)`.
pub fn two_level_hamiltonian(omega: f64, gamma: f64) -> Mat2 {
    Mat2([
        [C64::new(0.0, 0.0), C64::new(omega / 2.0, 0.0)],
        [C64::new(omega / 2.0, 0.0), C64::new(0.0, -gamma)],
    ])
}

/// Continuously measured two-level system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousModel {
    pub omega: f64,
    pub gamma: f64,
}

impl ContinuousModel {
    pub fn new(omega: f64, gamma: f64) -> Result<Self> {
        Ok(Self {
            omega: check_non_negative("omega", omega)?,
            gamma: check_non_negative("gamma", gamma)?,
        })
    }

    /// Passive (loss-only) effective Hamiltonian.
    pub fn hamiltonian(&self) -> Mat2 {
        two_level_hamiltonian(self.omega, self.gamma)
    }

    /// Balanced gain/loss form, `H_eff + (iγ/2)·I = (Ω/2)σₓ − (iγ/2)σ_z`.
    pub fn pt_hamiltonian(&self) -> Mat2 {
        self.hamiltonian() + Mat2::identity().scale(C64::new(0.0, self.gamma / 2.0))
    }
}

/// Static PT phase from the ratio `γ/Ω`.
pub fn static_classify(model: &ContinuousModel) -> Result<PhaseLabel> {
    if model.omega == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let ratio = model.gamma / model.omega;
    Ok(if (ratio - 1.0).abs() <= STATIC_EP_TOLERANCE {
        PhaseLabel::Ep
    } else if ratio < 1.0 {
        PhaseLabel::Ptsp
    } else {
        PhaseLabel::Ptbp
    })
}

/// A stretch of time with constant coupling and loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSegment {
    pub omega: f64,
    pub gamma: f64,
    pub duration: f64,
}

impl PulseSegment {
    pub fn new(omega: f64, gamma: f64, duration: f64) -> Result<Self> {
        Ok(Self {
            omega: check_non_negative("omega", omega)?,
            gamma: check_non_negative("gamma", gamma)?,
            duration: check_positive("duration", duration)?,
        })
    }

    pub fn hamiltonian(&self) -> Mat2 {
        two_level_hamiltonian(self.omega, self.gamma)
    }
}

/// One Floquet period built from piecewise-constant segments, applied in
/// order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseProtocol {
    segments: Vec<PulseSegment>,
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

impl PulseProtocol {
    pub fn new(segments: Vec<PulseSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptyProtocol);
        }
        for s in &segments {
            PulseSegment::new(s.omega, s.gamma, s.duration)?;
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    /// Period `T`, the sum of all segment durations.
    pub fn period(&self) -> f64 {
        compensated_sum(self.segments.iter().map(|s| s.duration))
    }

    /// `Σ Ωₖ·tₖ`; equals `Ωt₀` for the canonical protocol.
    pub fn integrated_coupling(&self) -> f64 {
        compensated_sum(self.segments.iter().map(|s| s.omega * s.duration))
    }

    /// `Σ γₖ·tₖ`; equals `γt₁` for the canonical protocol.
    pub fn integrated_loss(&self) -> f64 {
        compensated_sum(self.segments.iter().map(|s| s.gamma * s.duration))
    }

    pub fn dimensionless(&self) -> DimensionlessPoint {
        DimensionlessPoint {
            omega_t0: self.integrated_coupling(),
            gamma_t1: self.integrated_loss(),
        }
    }
}

/// Measurement interval `Ωt₀` and measurement strength `γt₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessPoint {
    pub omega_t0: f64,
    pub gamma_t1: f64,
}

impl DimensionlessPoint {
    pub fn new(omega_t0: f64, gamma_t1: f64) -> Result<Self> {
        Ok(Self {
            omega_t0: check_non_negative("omega_t0", omega_t0)?,
            gamma_t1: check_non_negative("gamma_t1", gamma_t1)?,
        })
    }
}

/// Drive for `t₀ = Ωt₀/Ω`, then measure for `t₁ = γt₁/γ`.
///
/// A zero dimensionless value drops the corresponding segment.
pub fn canonical_protocol(
    point: DimensionlessPoint,
    omega: f64,
    gamma: f64,
) -> Result<PulseProtocol> {
    let point = DimensionlessPoint::new(point.omega_t0, point.gamma_t1)?;
    let mut segments = Vec::with_capacity(2);
    if point.omega_t0 > 0.0 {
        let omega = check_positive("omega", omega)?;
        segments.push(PulseSegment::new(omega, 0.0, point.omega_t0 / omega)?);
    }
    if point.gamma_t1 > 0.0 {
        let gamma = check_positive("gamma", gamma)?;
        segments.push(PulseSegment::new(0.0, gamma, point.gamma_t1 / gamma)?);
    }
    if segments.is_empty() {
        return Err(Error::EmptyProtocol);
    }
    PulseProtocol::new(segments)
}

/// Anti-phase square waves at angular frequency `freq`: drive on for half a
/// period, then loss on for the other half. `T = 2π/freq`.
pub fn square_wave_protocol(omega: f64, gamma: f64, freq: f64) -> Result<PulseProtocol> {
    let freq = check_positive("freq", freq)?;
    let half = PI / freq;
    PulseProtocol::new(vec![
        PulseSegment::new(omega, 0.0, half)?,
        PulseSegment::new(0.0, gamma, half)?,
    ])
}

/// `|0⟩ ↔ |1⟩ ↔ |P⟩` ladder with a fast-decaying `|P⟩`.
///
/// `linewidth` is the population decay rate Γ of `|P⟩`, so the amplitude
/// term in the Hamiltonian is `−i(Γ/2)|P⟩⟨P|`. With this convention the
/// eliminated model has `γ = Ω′²/(2Γ)` in `−iγ|1⟩⟨1|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeLevelModel {
    pub omega: f64,
    pub omega_prime: f64,
    pub linewidth: f64,
}

impl ThreeLevelModel {
    pub fn new(omega: f64, omega_prime: f64, linewidth: f64) -> Result<Self> {
        Ok(Self {
            omega: check_non_negative("omega", omega)?,
            omega_prime: check_non_negative("omega_prime", omega_prime)?,
            linewidth: check_non_negative("linewidth", linewidth)?,
        })
    }

    pub fn hamiltonian(&self) -> Mat3 {
        let z = C64::new(0.0, 0.0);
        let r = |x: f64| C64::new(x, 0.0);
        Mat3([
            [z, r(self.omega / 2.0), z],
            [r(self.omega / 2.0), z, r(self.omega_prime / 2.0)],
            [
                z,
                r(self.omega_prime / 2.0),
                C64::new(0.0, -self.linewidth / 2.0),
            ],
        ])
    }

    /// `Ω′²/(2Γ)`, zero when there is no `|1⟩ ↔ |P⟩` coupling.
    pub fn gamma_eff(&self) -> f64 {
        if self.omega_prime == 0.0 {
            return 0.0;
        }
        self.omega_prime * self.omega_prime / (2.0 * self.linewidth)
    }

    pub fn reduced(&self) -> ContinuousModel {
        ContinuousModel {
            omega: self.omega,
            gamma: self.gamma_eff(),
        }
    }

    /// `(Ω′/Ω, Γ/Ω)`.
    pub fn ratios(&self) -> (f64, f64) {
        (self.omega_prime / self.omega, self.linewidth / self.omega)
    }

    pub fn reduction_valid(&self) -> bool {
        // 1e-12 slack so that a nominal ratio of exactly 10 passes
        let floor = REDUCTION_RATIO * (1.0 - 1e-12);
        let (a, b) = self.ratios();
        a >= floor && b >= floor
    }
}
