//! Stroboscopic and continuous-time evolution of the measured system.
//!
//! All propagation uses exact matrix exponentials of piecewise-constant
//! Hamiltonians. Populations are reported both raw (the squared amplitudes
//! of the non-unitarily evolved state) and renormalized by the remaining
//! norm.

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::floquet::{floquet_spectrum, period_propagator, FloquetSpectrum};
use crate::models::{ContinuousModel, PulseProtocol, PulseSegment, ThreeLevelModel};
use crate::smallmat::{expm, C64};

/// Trajectories stop once `‖ψ‖²` drops below this.
pub const NORM_FLOOR: f64 = 1e-300;

/// A normalized pure state on `N` levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState<const N: usize> {
    amplitudes: [C64; N],
}

impl<const N: usize> InitialState<N> {
    pub fn new(amplitudes: [C64; N]) -> Result<Self> {
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("initial state"));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Basis state `|k⟩`.
    pub fn basis(k: usize) -> Self {
        assert!(k < N, "basis index {k} out of range for {N} levels");
        let mut amplitudes = [C64::new(0.0, 0.0); N];
        amplitudes[k] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn ground() -> Self {
        Self::basis(0)
    }

    pub fn amplitudes(&self) -> &[C64; N] {
        &self.amplitudes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Period index (or grid index for continuous runs).
    pub n: u64,
    pub t: f64,
    pub p0_raw: f64,
    pub p1_raw: f64,
    pub norm: f64,
    pub p0_norm: f64,
    pub p1_norm: f64,
}

impl Sample {
    fn from_state(n: u64, t: f64, psi: &[C64; 2]) -> Self {
        let p0_raw = psi[0].norm_sqr();
        let p1_raw = psi[1].norm_sqr();
        let norm = p0_raw + p1_raw;
        Self {
            n,
            t,
            p0_raw,
            p1_raw,
            norm,
            p0_norm: p0_raw / norm,
            p1_norm: p1_raw / norm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Set when the run stopped early because the norm underflowed; holds
    /// the first index that was not emitted.
    pub truncated_at: Option<u64>,
}

impl Trajectory {
    fn push(&mut self, n: u64, t: f64, psi: &[C64; 2]) -> bool {
        let sample = Sample::from_state(n, t, psi);
        if sample.norm < NORM_FLOOR {
            self.truncated_at = Some(n);
            return false;
        }
        self.samples.push(sample);
        true
    }

    pub fn p0_raw(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.p0_raw).collect()
    }

    pub fn p0_norm(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.p0_norm).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm).collect()
    }
}

/// `ψₖ = U(T,0)ᵏ ψ₀` for `k = 0..=n_periods`.
pub fn stroboscopic_run(
    protocol: &PulseProtocol,
    psi0: &InitialState<2>,
    n_periods: u64,
) -> Trajectory {
    let u = period_propagator(protocol);
    let period = protocol.period();
    let mut traj = Trajectory {
        samples: Vec::with_capacity(n_periods as usize + 1),
        truncated_at: None,
    };
    let mut psi = *psi0.amplitudes();
    for k in 0..=n_periods {
        if !traj.push(k, k as f64 * period, &psi) {
            break;
        }
        psi = u.mul_vec(&psi);
    }
    traj
}

/// Time-resolved run through `n_periods` periods with `samples_per_segment`
/// points inside every segment. Each sample is propagated exactly from the
/// start of its segment.
pub fn resolved_run(
    protocol: &PulseProtocol,
    psi0: &InitialState<2>,
    n_periods: u64,
    samples_per_segment: usize,
) -> Trajectory {
    let steps = samples_per_segment.max(1);
    let period = protocol.period();
    let mut traj = Trajectory::default();
    let mut psi = *psi0.amplitudes();
    if !traj.push(0, 0.0, &psi) {
        return traj;
    }
    let full: Vec<_> = protocol
        .segments()
        .iter()
        .map(|s| expm(&s.hamiltonian(), s.duration))
        .collect();
    let last = protocol.segments().len() - 1;
    for k in 0..n_periods {
        let mut offset = 0.0;
        for (si, (seg, u_full)) in protocol.segments().iter().zip(&full).enumerate() {
            let h = seg.hamiltonian();
            for j in 1..=steps {
                let tau = seg.duration * j as f64 / steps as f64;
                let state = if j == steps {
                    u_full.mul_vec(&psi)
                } else {
                    expm(&h, tau).mul_vec(&psi)
                };
                // the closing sample of a period is the next stroboscopic point
                let n = if si == last && j == steps { k + 1 } else { k };
                let t = k as f64 * period + offset + tau;
                if !traj.push(n, t, &state) {
                    return traj;
                }
            }
            psi = u_full.mul_vec(&psi);
            offset += seg.duration;
        }
    }
    traj
}

/// Number of grid points `k·dt ≤ t_max`, tolerating rounding at the end.
fn grid_len(t_max: f64, dt: f64) -> u64 {
    (t_max / dt + 1e-9).floor() as u64
}

/// `ψ(t) = exp(−i·H_eff·t)·ψ₀` sampled at `t = k·dt`.
pub fn continuous_run(
    model: &ContinuousModel,
    psi0: &InitialState<2>,
    t_max: f64,
    dt: f64,
) -> Result<Trajectory> {
    let dt = check_positive("dt", dt)?;
    let t_max = check_non_negative("t_max", t_max)?;
    let h = model.hamiltonian();
    let mut traj = Trajectory::default();
    for k in 0..=grid_len(t_max, dt) {
        let t = k as f64 * dt;
        let psi = expm(&h, t).mul_vec(psi0.amplitudes());
        if !traj.push(k, t, &psi) {
            break;
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeLevelSample {
    pub t: f64,
    pub p0: f64,
    pub p1: f64,
    pub pp: f64,
    pub norm: f64,
}

pub fn three_level_run(
    model: &ThreeLevelModel,
    psi0: &InitialState<3>,
    t_max: f64,
    dt: f64,
) -> Result<Vec<ThreeLevelSample>> {
    let dt = check_positive("dt", dt)?;
    let t_max = check_non_negative("t_max", t_max)?;
    let h = model.hamiltonian();
    Ok((0..=grid_len(t_max, dt))
        .map(|k| {
            let t = k as f64 * dt;
            let psi = expm(&h, t).mul_vec(psi0.amplitudes());
            let [p0, p1, pp] = psi.map(|z| z.norm_sqr());
            ThreeLevelSample {
                t,
                p0,
                p1,
                pp,
                norm: p0 + p1 + pp,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub gamma_eff: f64,
    /// Largest `|P₀(3-level) − P₀(2-level)|` on the sample grid.
    pub sup_error: f64,
    pub omega_prime_ratio: f64,
    pub linewidth_ratio: f64,
    /// Whether both ratios reach the adiabatic-elimination threshold.
    pub valid: bool,
}

pub const DEFAULT_REDUCTION_STEPS: u64 = 1000;

/// Compares the three-level model with its adiabatically eliminated
/// two-level counterpart, both starting in `|0⟩`.
pub fn validate_reduction(model: &ThreeLevelModel, t_max: f64) -> Result<ReductionReport> {
    validate_reduction_with(model, t_max, DEFAULT_REDUCTION_STEPS)
}

pub fn validate_reduction_with(
    model: &ThreeLevelModel,
    t_max: f64,
    steps: u64,
) -> Result<ReductionReport> {
    let t_max = check_positive("t_max", t_max)?;
    let dt = t_max / steps.max(1) as f64;
    let full = three_level_run(model, &InitialState::ground(), t_max, dt)?;
    let reduced = continuous_run(&model.reduced(), &InitialState::ground(), t_max, dt)?;
    let sup_error = full
        .iter()
        .zip(&reduced.samples)
        .map(|(a, b)| (a.p0 - b.p0_raw).abs())
        .fold(0.0, f64::max);
    let (omega_prime_ratio, linewidth_ratio) = model.ratios();
    Ok(ReductionReport {
        gamma_eff: model.gamma_eff(),
        sup_error,
        omega_prime_ratio,
        linewidth_ratio,
        valid: model.reduction_valid(),
    })
}

/// Pulsed protocol whose period-averaged coupling and loss equal those of
/// `model`: drive at `Ω/duty` for `duty·T`, then lose at `γ/(1 − duty)` for
/// the rest of the period.
pub fn trotter_protocol(model: &ContinuousModel, period: f64, duty: f64) -> Result<PulseProtocol> {
    let period = check_positive("period", period)?;
    if !(duty > 0.0 && duty < 1.0) {
        return Err(Error::InvalidParameter {
            name: "duty",
            value: duty,
            reason: "must lie in (0, 1)",
        });
    }
    PulseProtocol::new(vec![
        PulseSegment::new(model.omega / duty, 0.0, duty * period)?,
        PulseSegment::new(0.0, model.gamma / (1.0 - duty), (1.0 - duty) * period)?,
    ])
}

/// Knobs for the tail fit in [`effective_decay_rate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Fraction of the run skipped before the fit window starts.
    pub tail_start: f64,
    /// Smallest survival probability admitted at the end of the window.
    pub floor: f64,
    pub max_periods: u64,
    pub min_samples: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            tail_start: 0.5,
            floor: 1e-12,
            max_periods: 200_000,
            min_samples: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayEstimate {
    /// `−2·ln|η₊|` per period.
    pub kappa_multiplier: f64,
    /// Per-period rate from a straight-line fit of `ln P₀` over the tail.
    pub kappa_fit: Option<f64>,
    pub fit_window: Option<(u64, u64)>,
    /// RMS residual of the fit in `ln P₀`.
    pub residual: Option<f64>,
}

pub fn effective_decay_rate(protocol: &PulseProtocol) -> DecayEstimate {
    effective_decay_rate_with(protocol, &FitConfig::default())
}

pub fn effective_decay_rate_with(protocol: &PulseProtocol, config: &FitConfig) -> DecayEstimate {
    let spectrum = floquet_spectrum(protocol);
    let kappa = spectrum.kappa();
    let mut estimate = DecayEstimate {
        kappa_multiplier: kappa,
        kappa_fit: None,
        fit_window: None,
        residual: None,
    };

    let target = if kappa > 0.0 {
        let n = (-config.floor.ln() / kappa).ceil();
        (n.min(config.max_periods as f64) as u64).max(1)
    } else {
        config.max_periods
    };
    let traj = stroboscopic_run(protocol, &InitialState::ground(), target);
    let Some(n_max) = traj.samples.iter().rposition(|s| s.p0_raw >= config.floor) else {
        return estimate;
    };
    let n_start = (n_max as f64 * config.tail_start).ceil() as usize;
    let points: Vec<(f64, f64)> = traj.samples[n_start..=n_max]
        .iter()
        .filter(|s| s.p0_raw > 0.0)
        .map(|s| (s.n as f64, s.p0_raw.ln()))
        .collect();
    if points.len() < config.min_samples {
        return estimate;
    }
    let (slope, residual) = linear_fit(&points);
    estimate.kappa_fit = Some(-slope);
    estimate.fit_window = Some((n_start as u64, n_max as u64));
    estimate.residual = Some(residual);
    estimate
}

/// Least-squares slope and RMS residual.
fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    (slope, (rss / n).sqrt())
}

/// Number of periods over which `P₀` completes one oscillation, `π/φ` with
/// `2φ` the phase difference of the multipliers. `None` off the unbroken
/// phase.
pub fn rabi_period_in_periods(spectrum: &FloquetSpectrum) -> Option<f64> {
    let [a, b] = spectrum.multipliers;
    let phi = ((a / b).arg() / 2.0).abs();
    if phi > 1e-12 && spectrum.phase == crate::floquet::PhaseLabel::Ptsp {
        Some(std::f64::consts::PI / phi)
    } else {
        None
    }
}

/// First index `k < limit` with `v[k−1] > v[k] < v[k+1]`.
pub fn first_interior_minimum(values: &[f64], limit: usize) -> Option<usize> {
    let end = limit.min(values.len().saturating_sub(1));
    (1..end).find(|&k| values[k - 1] > values[k] && values[k] < values[k + 1])
}

/// True when `values` never increases from index `start` on.
pub fn non_increasing_from(values: &[f64], start: usize) -> bool {
    values
        .get(start..)
        .is_none_or(|tail| tail.windows(2).all(|w| w[1] <= w[0]))
}
