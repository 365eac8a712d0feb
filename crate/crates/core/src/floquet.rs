//! One-period propagators, Floquet multipliers and PT-phase classification.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{DimensionlessPoint, PulseProtocol};
use crate::smallmat::{eig2, expm, Mat2, SquareMatrix, C64};

/// Default relative width of the EP band around `D = 1`.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Relative tolerance for equal multiplier moduli.
pub const MODULUS_TOLERANCE: f64 = 1e-10;

/// Above this measurement strength the discriminant is evaluated in log
/// space.
const LOG_SPACE_THRESHOLD: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseLabel {
    /// PT-symmetric (unbroken) phase.
    #[serde(rename = "PTSP")]
    Ptsp,
    /// PT-broken phase.
    #[serde(rename = "PTBP")]
    Ptbp,
    /// Exceptional point.
    #[serde(rename = "EP")]
    Ep,
}

impl PhaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseLabel::Ptsp => "PTSP",
            PhaseLabel::Ptbp => "PTBP",
            PhaseLabel::Ep => "EP",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PhaseLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "PTSP" => Ok(PhaseLabel::Ptsp),
            "PTBP" => Ok(PhaseLabel::Ptbp),
            "EP" => Ok(PhaseLabel::Ep),
            other => Err(format!("unknown phase label `{other}`")),
        }
    }
}

/// Ordered product of the segment propagators, first segment rightmost.
pub fn period_propagator(protocol: &PulseProtocol) -> Mat2 {
    protocol
        .segments()
        .iter()
        .fold(Mat2::identity(), |acc, seg| {
            expm(&seg.hamiltonian(), seg.duration) * acc
        })
}

/// Closed form of the canonical drive-then-measure propagator,
/// `diag(1, e^{−γt₁}) · exp(−i(Ωt₀/2)σₓ)`.
///
/// Written in the `(|1⟩, |0⟩)` ordering this is
/// `[[e^{−γt₁}cos, −i·e^{−γt₁}sin], [−i·sin, cos]]`.
pub fn closed_form_propagator(point: DimensionlessPoint) -> Mat2 {
    let (s, c) = (point.omega_t0 / 2.0).sin_cos();
    let damp = (-point.gamma_t1).exp();
    Mat2([
        [C64::new(c, 0.0), C64::new(0.0, -s)],
        [C64::new(0.0, -damp * s), C64::new(damp * c, 0.0)],
    ])
}

fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x + ((1.0 + (-2.0 * x).exp()) / 2.0).ln()
}

/// `ln D`, finite for arbitrarily large measurement strength.
pub fn ln_discriminant(point: DimensionlessPoint) -> f64 {
    2.0 * (point.omega_t0 / 2.0).cos().abs().ln() + 2.0 * ln_cosh(point.gamma_t1 / 2.0)
}

/// `D = cos²(Ωt₀/2)·cosh²(γt₁/2)`. `D < 1` is the unbroken phase.
pub fn discriminant(point: DimensionlessPoint) -> f64 {
    if point.gamma_t1.abs() > LOG_SPACE_THRESHOLD {
        ln_discriminant(point).exp()
    } else {
        let c = (point.omega_t0 / 2.0).cos();
        let ch = (point.gamma_t1 / 2.0).cosh();
        c * c * ch * ch
    }
}

/// Phase from the discriminant; `|D − 1| ≤ tol` is reported as EP.
pub fn classify(point: DimensionlessPoint, tol: f64) -> PhaseLabel {
    if point.gamma_t1.abs() > LOG_SPACE_THRESHOLD {
        let ln_d = ln_discriminant(point);
        return if ln_d < (-tol).ln_1p() {
            PhaseLabel::Ptsp
        } else if ln_d > tol.ln_1p() {
            PhaseLabel::Ptbp
        } else {
            PhaseLabel::Ep
        };
    }
    label_from_discriminant(discriminant(point), tol)
}

pub fn label_from_discriminant(d: f64, tol: f64) -> PhaseLabel {
    if d < 1.0 - tol {
        PhaseLabel::Ptsp
    } else if d > 1.0 + tol {
        PhaseLabel::Ptbp
    } else {
        PhaseLabel::Ep
    }
}

/// Multipliers, quasi-energies and modes of a one-period propagator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloquetSpectrum {
    /// `(η₊, η₋)`, dominant first.
    pub multipliers: [C64; 2],
    /// `ε = i·ln(η)/T`, real part folded into `(−π/T, π/T]`.
    pub quasi_energies: [C64; 2],
    pub modes: [[C64; 2]; 2],
    pub period: f64,
    pub phase: PhaseLabel,
}

impl FloquetSpectrum {
    /// Per-period decay rate of the dominant mode's population, `−2·ln|η₊|`.
    pub fn kappa(&self) -> f64 {
        let k = -2.0 * self.multipliers[0].norm().ln();
        // |η₊| = 1 to rounding still means no decay
        if k.abs() < 1e-15 {
            0.0
        } else {
            k
        }
    }
}

fn quasi_energy(eta: C64, period: f64) -> C64 {
    let mut eps = C64::new(0.0, 1.0) * eta.ln() / period;
    let zone = PI / period;
    if eps.re <= -zone {
        eps.re += 2.0 * zone;
    }
    eps
}

/// Spectral data of an already assembled propagator.
pub fn spectrum_of(propagator: &Mat2, period: f64) -> FloquetSpectrum {
    let eig = eig2(propagator);
    let [p, q] = eig.pairs;
    let phase = if eig.degenerate {
        PhaseLabel::Ep
    } else {
        let (a, b) = (p.value.norm(), q.value.norm());
        if (a - b).abs() <= MODULUS_TOLERANCE * a.max(b) {
            PhaseLabel::Ptsp
        } else {
            PhaseLabel::Ptbp
        }
    };
    FloquetSpectrum {
        multipliers: [p.value, q.value],
        quasi_energies: [quasi_energy(p.value, period), quasi_energy(q.value, period)],
        modes: [p.vector, q.vector],
        period,
        phase,
    }
}

pub fn floquet_spectrum(protocol: &PulseProtocol) -> FloquetSpectrum {
    spectrum_of(&period_propagator(protocol), protocol.period())
}

/// Spectrum of the canonical protocol in units where `T = 1`.
pub fn point_spectrum(point: DimensionlessPoint) -> FloquetSpectrum {
    spectrum_of(&closed_form_propagator(point), 1.0)
}

/// Measurement strength at which `D = 1` for a given interval,
/// `2·arccosh(sec(Ωt₀/2))`.
///
/// Evaluated as `2·asinh(tan(Ωt₀/2))`, which is the same function without
/// the cancellation near `Ωt₀ = 0`.
pub fn ep_boundary(omega_t0: f64) -> Result<f64> {
    if !omega_t0.is_finite() {
        return Err(Error::NonFinite("omega_t0"));
    }
    if omega_t0 <= 0.0 || omega_t0 >= PI {
        return Err(Error::OutOfDomain(omega_t0));
    }
    Ok(2.0 * (omega_t0 / 2.0).tan().asinh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::canonical_protocol;

    fn pt(a: f64, g: f64) -> DimensionlessPoint {
        DimensionlessPoint::new(a, g).unwrap()
    }

    #[test]
    fn pi_pulse_propagator() {
        let u = period_propagator(&canonical_protocol(pt(PI, 0.0), 1.0, 1.0).unwrap());
        let expect = Mat2([
            [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
            [C64::new(0.0, -1.0), C64::new(0.0, 0.0)],
        ]);
        assert!(u.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn pure_loss_propagator() {
        let g = 0.7;
        let u = period_propagator(&canonical_protocol(pt(0.0, g), 1.0, 1.0).unwrap());
        let expect = Mat2::from_real([[1.0, 0.0], [0.0, (-g).exp()]]);
        assert!(u.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn printed_matrix_is_propagator_in_swapped_order() {
        let point = pt(0.1, 0.2);
        let u = period_propagator(&canonical_protocol(point, 2.0, 3.0).unwrap());
        let (e, c, s) = ((-0.2f64).exp(), 0.05f64.cos(), 0.05f64.sin());
        let printed = Mat2([
            [C64::new(e * c, 0.0), C64::new(0.0, -e * s)],
            [C64::new(0.0, -s), C64::new(c, 0.0)],
        ]);
        let x = Mat2::pauli_x();
        assert!((x * u * x).max_abs_diff(&printed) < 1e-12);
        assert!(u.max_abs_diff(&closed_form_propagator(point)) < 1e-12);
    }

    #[test]
    fn discriminant_examples() {
        // reference values from 30-digit evaluation of cos²(Ωt₀/2)·cosh²(γt₁/2)
        assert!((discriminant(pt(0.5, 0.3)) - 0.960_072_981_822_778_5).abs() < 1e-14);
        assert!((discriminant(pt(0.05, 0.3)) - 1.022_030_221_927_728_3).abs() < 1e-14);
        assert!(discriminant(pt(1.3, 0.0)) <= 1.0);
    }

    #[test]
    fn log_space_discriminant() {
        let big = pt(0.4, 2000.0);
        assert!(discriminant(big).is_infinite() || discriminant(big) > 1.0);
        assert_eq!(classify(big, DEFAULT_TOLERANCE), PhaseLabel::Ptbp);
        let moderate = pt(0.4, 600.0);
        let direct = discriminant(moderate).ln();
        assert!((ln_discriminant(moderate) - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn exceptional_point_closed_form() {
        let g = 2.0 * 2f64.sqrt().acosh();
        assert_eq!(classify(pt(PI / 2.0, g), DEFAULT_TOLERANCE), PhaseLabel::Ep);
        assert!((ep_boundary(PI / 2.0).unwrap() - g).abs() < 1e-14);
    }

    #[test]
    fn boundary_matches_arccosh_form() {
        for &a in &[0.1, 0.5, 1.0, 2.0, 3.0] {
            let reference = 2.0 * (1.0 / (a / 2.0f64).cos()).acosh();
            assert!((ep_boundary(a).unwrap() - reference).abs() < 1e-12 * reference);
        }
        assert!((ep_boundary(0.1).unwrap() - 0.100_041_692_727_259_47).abs() < 1e-15);
    }

    #[test]
    fn boundary_domain() {
        assert_eq!(ep_boundary(PI), Err(Error::OutOfDomain(PI)));
        assert_eq!(ep_boundary(4.0), Err(Error::OutOfDomain(4.0)));
        assert_eq!(ep_boundary(0.0), Err(Error::OutOfDomain(0.0)));
        assert!(ep_boundary(f64::NAN).is_err());
    }

    #[test]
    fn unitary_spectrum() {
        let protocol = canonical_protocol(pt(0.1, 0.0), 2.0, 1.0).unwrap();
        let spec = floquet_spectrum(&protocol);
        assert_eq!(spec.phase, PhaseLabel::Ptsp);
        for eta in spec.multipliers {
            assert!((eta.norm() - 1.0).abs() < 1e-14);
        }
        let expect = 0.1 / (2.0 * spec.period);
        let mut eps: Vec<f64> = spec.quasi_energies.iter().map(|e| e.re).collect();
        eps.sort_by(f64::total_cmp);
        assert!((eps[0] + expect).abs() < 1e-12 * expect);
        assert!((eps[1] - expect).abs() < 1e-12 * expect);
        assert!(spec.quasi_energies.iter().all(|e| e.im.abs() < 1e-12));
        assert_eq!(spec.kappa(), 0.0);
    }

    #[test]
    fn quasi_energy_zone() {
        // η = −1 sits on the zone edge and maps to +π/T
        let eps = quasi_energy(C64::new(-1.0, 0.0), 2.0);
        assert!((eps.re - PI / 2.0).abs() < 1e-15);
        let eps = quasi_energy(C64::new(-1.0, -1e-300), 2.0);
        assert!(eps.re > 0.0);
    }

    #[test]
    fn phase_labels_from_multipliers() {
        assert_eq!(point_spectrum(pt(0.5, 0.3)).phase, PhaseLabel::Ptsp);
        assert_eq!(point_spectrum(pt(0.05, 0.3)).phase, PhaseLabel::Ptbp);
        assert_eq!(point_spectrum(pt(2.0 * PI, 0.0)).phase, PhaseLabel::Ep);
    }

    #[test]
    fn label_round_trip() {
        for l in [PhaseLabel::Ptsp, PhaseLabel::Ptbp, PhaseLabel::Ep] {
            assert_eq!(l.as_str().parse::<PhaseLabel>().unwrap(), l);
        }
        assert!("ptsp".parse::<PhaseLabel>().is_err());
    }
}
