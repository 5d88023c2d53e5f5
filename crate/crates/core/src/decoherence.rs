//! Thermal decoherence-time estimate `τ_D = ΔX² / (γ λ_dB²)`.
//!
//! All quantities are SI. ħ is restored in the thermal de Broglie
//! wavelength `λ_dB = ħ / √(2 m k_B T)` and in the Bose occupation
//! `n̄ = 1 / (e^{ħω/k_BT} − 1)`; ω is an angular frequency in s⁻¹.

use rayon::prelude::*;
use thiserror::Error;

/// CODATA 2018 values.
pub mod constants {
    /// Planck constant, J s (exact).
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Boltzmann constant, J/K (exact).
    pub const K_B: f64 = 1.380_649e-23;
    /// Atomic mass constant, kg.
    pub const ATOMIC_MASS: f64 = 1.660_539_066_60e-27;
    /// Vacuum permittivity, F/m.
    pub const EPSILON0: f64 = 8.854_187_812_8e-12;
    /// ³⁹K atomic mass, u.
    pub const MASS_K_U: f64 = 38.9637;
    /// H₂O molecular mass, u.
    pub const MASS_H2O_U: f64 = 18.0153;
    /// Body temperature, K.
    pub const BODY_TEMPERATURE: f64 = 310.0;
}

use constants::{ATOMIC_MASS, HBAR, K_B};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecoherenceError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{0} grid is empty")]
    EmptyGrid(&'static str),
}

fn positive(name: &'static str, value: f64) -> Result<f64, DecoherenceError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(DecoherenceError::NonPositive { name, value })
    }
}

pub fn reduced_mass(m1: f64, m2: f64) -> f64 {
    m1 * m2 / (m1 + m2)
}

/// Reduced mass of K⁺ and a water molecule, kg.
pub fn potassium_water_reduced_mass() -> f64 {
    reduced_mass(constants::MASS_K_U, constants::MASS_H2O_U) * ATOMIC_MASS
}

/// `ħ / √(2 m k_B T)`, meters.
pub fn thermal_de_broglie(mass: f64, temperature: f64) -> f64 {
    HBAR / (2.0 * mass * K_B * temperature).sqrt()
}

/// Bose occupation at angular frequency `omega`; 0 once `ħω/k_BT > 700`.
pub fn mean_occupation(omega: f64, temperature: f64) -> f64 {
    let x = HBAR * omega / (K_B * temperature);
    if x.is_nan() || x > 700.0 {
        return 0.0;
    }
    1.0 / x.exp_m1()
}

/// `γ₀ ω n̄ r² / (1 + r²)` with `r = Λ/ω`.
pub fn dephasing_rate(gamma0: f64, omega: f64, cutoff: f64, temperature: f64) -> f64 {
    let r = cutoff / omega;
    let r2 = r * r;
    gamma0 * omega * mean_occupation(omega, temperature) * r2 / (1.0 + r2)
}

/// `ΔX² / (γ λ_dB²)`, seconds.
pub fn decoherence_time(delta_x: f64, mass: f64, temperature: f64, gamma: f64) -> f64 {
    let lambda = thermal_de_broglie(mass, temperature);
    delta_x * delta_x / (gamma * lambda * lambda)
}

/// Source of the dephasing rate entering τ_D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DephasingRate {
    Direct(f64),
    /// Computed from bare coupling γ₀, system frequency ω and cutoff Λ.
    Ohmic { gamma0: f64, omega: f64, cutoff: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceParams {
    pub mass: f64,
    pub temperature: f64,
    pub delta_x: f64,
    pub rate: DephasingRate,
}

impl DecoherenceParams {
    /// K⁺/H₂O reduced mass at 310 K.
    pub fn body_temperature(delta_x: f64, rate: DephasingRate) -> Self {
        DecoherenceParams {
            mass: potassium_water_reduced_mass(),
            temperature: constants::BODY_TEMPERATURE,
            delta_x,
            rate,
        }
    }

    pub fn gamma(&self) -> f64 {
        match self.rate {
            DephasingRate::Direct(g) => g,
            DephasingRate::Ohmic { gamma0, omega, cutoff } => {
                dephasing_rate(gamma0, omega, cutoff, self.temperature)
            }
        }
    }

    pub fn decoherence_time(&self) -> Result<f64, DecoherenceError> {
        let mass = positive("mass", self.mass)?;
        let temperature = positive("temperature", self.temperature)?;
        let delta_x = positive("delta_x", self.delta_x)?;
        let gamma = positive("gamma", self.gamma())?;
        Ok(decoherence_time(delta_x, mass, temperature, gamma))
    }
}

/// How the position dispersion ΔX depends on the system frequency ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaXMapping {
    Fixed(f64),
    /// `ΔX = reference · (ω / omega_ref)^exponent`.
    PowerLaw { reference: f64, omega_ref: f64, exponent: f64 },
}

impl DeltaXMapping {
    /// Figure preset: ΔX grows from 1e-12 m at ω = 1e9 s⁻¹ to 2.37e-12 m at
    /// ω = 1e12 s⁻¹, so higher frequencies give longer decoherence times.
    pub const PRESET: DeltaXMapping = DeltaXMapping::PowerLaw {
        reference: 1e-12,
        omega_ref: 1e9,
        exponent: 0.125,
    };

    pub fn at(&self, omega: f64) -> f64 {
        match *self {
            DeltaXMapping::Fixed(dx) => dx,
            DeltaXMapping::PowerLaw { reference, omega_ref, exponent } => {
                reference * (omega / omega_ref).powf(exponent)
            }
        }
    }
}

/// τ_D over a (ω, γ) grid: `tau[i][j]` belongs to `omegas[i]`, `gammas[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceSweep {
    pub gammas: Vec<f64>,
    pub omegas: Vec<f64>,
    pub delta_x: Vec<f64>,
    pub tau: Vec<Vec<f64>>,
}

impl DecoherenceSweep {
    pub fn min(&self) -> f64 {
        self.tau.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.tau.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Every fixed-ω curve strictly decreasing along increasing γ.
    pub fn curves_strictly_decreasing(&self) -> bool {
        let mut order: Vec<usize> = (0..self.gammas.len()).collect();
        order.sort_by(|&a, &b| self.gammas[a].total_cmp(&self.gammas[b]));
        self.tau
            .iter()
            .all(|row| order.windows(2).all(|w| row[w[1]] < row[w[0]]))
    }
}

/// Log-spaced grid of `points` values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        n => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| {
                    if k == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * k as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

pub fn sweep_decoherence_time(
    gammas: &[f64],
    omegas: &[f64],
    mass: f64,
    temperature: f64,
    delta_x: &DeltaXMapping,
) -> Result<DecoherenceSweep, DecoherenceError> {
    if gammas.is_empty() {
        return Err(DecoherenceError::EmptyGrid("gamma"));
    }
    if omegas.is_empty() {
        return Err(DecoherenceError::EmptyGrid("omega"));
    }
    positive("mass", mass)?;
    positive("temperature", temperature)?;
    for &g in gammas {
        positive("gamma", g)?;
    }
    let dxs = omegas
        .iter()
        .map(|&w| positive("omega", w).and_then(|w| positive("delta_x", delta_x.at(w))))
        .collect::<Result<Vec<_>, _>>()?;
    let tau = dxs
        .par_iter()
        .map(|&dx| gammas.iter().map(|&g| decoherence_time(dx, mass, temperature, g)).collect())
        .collect();
    Ok(DecoherenceSweep {
        gammas: gammas.to_vec(),
        omegas: omegas.to_vec(),
        delta_x: dxs,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn constants_match_defining_values() {
        assert!(rel(constants::HBAR, constants::PLANCK / (2.0 * PI)) < 1e-9);
        assert_eq!(constants::K_B, 1.380649e-23);
        assert_eq!(constants::ATOMIC_MASS, 1.66053906660e-27);
    }

    #[test]
    fn reduced_mass_cases() {
        assert_eq!(reduced_mass(3.0, 3.0), 1.5);
        let mu_u = reduced_mass(38.9637, 18.0153);
        // 38.9637 · 18.0153 / 56.979
        assert!((mu_u - 12.3196).abs() < 1e-3);
        assert!(rel(reduced_mass(2.0, 2e6), 2.0) < 1e-4 + 1e-12);
    }

    #[test]
    fn de_broglie_scaling() {
        let m = potassium_water_reduced_mass();
        let base = thermal_de_broglie(m, 310.0);
        assert!(rel(thermal_de_broglie(4.0 * m, 310.0), base / 2.0) < 1e-14);
        assert!(rel(thermal_de_broglie(m, 4.0 * 310.0), base / 2.0) < 1e-14);
    }

    #[test]
    fn de_broglie_for_potassium_water() {
        // independent constant folding: ħ / sqrt(2 · 12.3196 u · k_B · 310 K)
        let m: f64 = 12.319_323_691_36 * 1.660_539_066_60e-27;
        let oracle = 1.054_571_817e-34 / (2.0 * m * 1.380_649e-23 * 310.0).sqrt();
        let got = thermal_de_broglie(potassium_water_reduced_mass(), 310.0);
        assert!(rel(got, oracle) < 1e-9, "{got} vs {oracle}");
        assert!(got > 1e-12 && got < 1e-11);
    }

    #[test]
    fn dephasing_rate_limits() {
        let (g0, w, t) = (1e3, 1e12, 310.0);
        let nbar = mean_occupation(w, t);
        assert!(rel(dephasing_rate(g0, w, 1e4 * w, t), g0 * w * nbar) < 1e-6);
        assert!(rel(dephasing_rate(g0, w, w, t), g0 * w * nbar / 2.0) < 1e-15);
        assert_eq!(dephasing_rate(g0, w, w, 1e-9), 0.0);
        assert!(dephasing_rate(g0, w, w, 1e-3).is_finite());
    }

    #[test]
    fn dephasing_rate_increases_with_cutoff() {
        let mut prev = 0.0;
        for k in 0..30 {
            let g = dephasing_rate(1.0, 1e11, 1e9 * 1.5f64.powi(k), 310.0);
            assert!(g > prev);
            prev = g;
        }
    }

    #[test]
    fn decoherence_time_scaling() {
        let m = potassium_water_reduced_mass();
        let base = decoherence_time(1e-11, m, 310.0, 1e7);
        assert!(rel(decoherence_time(2e-11, m, 310.0, 1e7), 4.0 * base) < 1e-12);
        assert!(rel(decoherence_time(1e-11, m, 310.0, 2e7), base / 2.0) < 1e-12);
        for k in [0.5, 3.0, 17.0] {
            assert!(rel(decoherence_time(k * 1e-11, m, 310.0, 1e7), k * k * base) <= 1e-12);
        }
    }

    #[test]
    fn decoherence_time_reference_point() {
        // ΔX² · 2 m k_B T / (γ ħ²)
        let m = potassium_water_reduced_mass();
        let oracle = 1e-22 * 2.0 * m * 1.380_649e-23 * 310.0 / (1e7 * 1.054_571_817e-34f64.powi(2));
        let got = decoherence_time(1e-11, m, 310.0, 1e7);
        assert!(rel(got, oracle) < 1e-12);
        assert!(got > 1e-7 && got < 1e-6);
    }

    #[test]
    fn monotone_in_gamma_and_temperature() {
        let m = potassium_water_reduced_mass();
        let gs = log_grid(1e6, 1e8, 25);
        for w in gs.windows(2) {
            assert!(decoherence_time(1e-12, m, 310.0, w[1]) < decoherence_time(1e-12, m, 310.0, w[0]));
        }
        for t in [250.0, 280.0, 300.0, 310.0, 330.0] {
            assert!(decoherence_time(1e-12, m, t + 1.0, 1e7) > decoherence_time(1e-12, m, t, 1e7));
        }
    }

    #[test]
    fn single_point_sweep_matches_direct() {
        let m = potassium_water_reduced_mass();
        let s = sweep_decoherence_time(&[3e6], &[1e10], m, 310.0, &DeltaXMapping::Fixed(2e-12)).unwrap();
        assert_eq!(s.tau.len(), 1);
        assert_eq!(s.tau[0].len(), 1);
        assert_eq!(s.tau[0][0], decoherence_time(2e-12, m, 310.0, 3e6));
    }

    #[test]
    fn sweep_curves_decrease() {
        let s = sweep_decoherence_time(
            &log_grid(1e6, 1e8, 40),
            &[1e9, 1e10, 1e11, 1e12],
            potassium_water_reduced_mass(),
            310.0,
            &DeltaXMapping::PRESET,
        )
        .unwrap();
        assert!(s.curves_strictly_decreasing());
        assert!(s.tau.iter().flatten().all(|t| t.is_finite() && *t > 0.0));
        // higher frequency, longer decoherence time
        for j in 0..s.gammas.len() {
            for i in 1..s.omegas.len() {
                assert!(s.tau[i][j] > s.tau[i - 1][j]);
            }
        }
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let m = potassium_water_reduced_mass();
        assert_eq!(
            sweep_decoherence_time(&[], &[1e9], m, 310.0, &DeltaXMapping::PRESET),
            Err(DecoherenceError::EmptyGrid("gamma"))
        );
        assert!(sweep_decoherence_time(&[-1.0], &[1e9], m, 310.0, &DeltaXMapping::PRESET).is_err());
    }

    #[test]
    fn ohmic_rate_feeds_decoherence_time() {
        let p = DecoherenceParams::body_temperature(
            1e-11,
            DephasingRate::Ohmic { gamma0: 1e-3, omega: 1e11, cutoff: 1e12 },
        );
        let gamma = dephasing_rate(1e-3, 1e11, 1e12, 310.0);
        assert!(rel(p.decoherence_time().unwrap(), decoherence_time(1e-11, p.mass, 310.0, gamma)) < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn scaling_laws(
            dx in 1e-12f64..1e-10,
            mass in 1e-27f64..1e-25,
            t in 1.0f64..1000.0,
            gamma in 1e3f64..1e10,
            k in 0.1f64..10.0,
        ) {
            let tau = decoherence_time(dx, mass, t, gamma);
            proptest::prop_assert!(rel(decoherence_time(k * dx, mass, t, gamma), k * k * tau) < 1e-12);
            proptest::prop_assert!(rel(decoherence_time(dx, mass, t, k * gamma), tau / k) < 1e-12);
            proptest::prop_assert!(rel(decoherence_time(dx, k * mass, t, gamma), k * tau) < 1e-12);
        }
    }
}
