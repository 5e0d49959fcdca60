//! Localization of the ion in the cavity standing wave.
//!
//! An ion whose position is Gaussian distributed with rms size σ sees the
//! standing-wave coupling g(x) = g_max sin(k(x − x₀) + φ). Averaging
//! sin² over the distribution gives ½(1 − cos(2kx₀ − 2φ) e^(−2(kσ)²)), so a
//! rate proportional to g² has visibility V = e^(−2(kσ)²).
//!
//! The scan evaluates the steady-state detected rate as a function of
//! u = sin² (the rate depends on g only through g²), interpolates it with a
//! Chebyshev series in u and averages over the wave packet by Gauss-Hermite
//! quadrature.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{rate_from_photon_numbers, solve_model, DetectionChain, ModelParams};
use crate::error::{DomainError, Error, NumericalError, Result};
use crate::parallel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizationParams {
    /// rms size of the ion wave packet along the cavity axis, nm.
    pub sigma_nm: f64,
    pub wavelength_nm: f64,
    /// φ in g(x) = g_max sin(k(x − x₀) + φ).
    pub phase_offset_rad: f64,
    /// Ground-state wave-packet size z₀, nm. Informational only.
    pub ground_state_size_nm: f64,
}

impl Default for LocalizationParams {
    fn default() -> Self {
        LocalizationParams {
            sigma_nm: 70.0,
            wavelength_nm: 866.0,
            phase_offset_rad: 0.0,
            ground_state_size_nm: 18.0,
        }
    }
}

impl LocalizationParams {
    pub fn validate(&self) -> Result<(), DomainError> {
        if !(self.sigma_nm.is_finite() && self.sigma_nm >= 0.0) {
            return Err(DomainError::InvalidParameter {
                name: "sigma_nm",
                value: self.sigma_nm,
                reason: "wave-packet size must be finite and non-negative",
            });
        }
        if !(self.wavelength_nm.is_finite() && self.wavelength_nm > 0.0) {
            return Err(DomainError::InvalidParameter {
                name: "wavelength_nm",
                value: self.wavelength_nm,
                reason: "wavelength must be positive",
            });
        }
        if !self.phase_offset_rad.is_finite() {
            return Err(DomainError::InvalidParameter {
                name: "phase_offset_rad",
                value: self.phase_offset_rad,
                reason: "must be finite",
            });
        }
        Ok(())
    }

    /// Wave number k = 2π/λ, nm⁻¹.
    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength_nm
    }

    /// Lamb-Dicke parameter k·z₀.
    pub fn lamb_dicke(&self) -> f64 {
        self.wavenumber() * self.ground_state_size_nm
    }
}

/// V = exp(−2(kσ)²).
pub fn visibility_from_sigma(p: &LocalizationParams) -> f64 {
    let ks = p.wavenumber() * p.sigma_nm;
    (-2.0 * ks * ks).exp()
}

/// σ = (λ/2π)·√(−ln V / 2), the inverse of [`visibility_from_sigma`].
pub fn sigma_from_visibility(visibility: f64, wavelength_nm: f64) -> Result<f64, DomainError> {
    if !(visibility > 0.0 && visibility <= 1.0) {
        return Err(DomainError::InvalidVisibility(visibility));
    }
    if !(wavelength_nm.is_finite() && wavelength_nm > 0.0) {
        return Err(DomainError::InvalidParameter {
            name: "wavelength_nm",
            value: wavelength_nm,
            reason: "wavelength must be positive",
        });
    }
    Ok(wavelength_nm / TAU * (-visibility.ln() / 2.0).sqrt())
}

/// Coupling amplitude averaged over the wave packet at an antinode,
/// g_max·exp(−(kσ)²/2).
pub fn g_effective(g_max_mhz: f64, p: &LocalizationParams) -> f64 {
    let ks = p.wavenumber() * p.sigma_nm;
    g_max_mhz * (-0.5 * ks * ks).exp()
}

/// Nodes and weights of n-point Gauss-Hermite quadrature for the weight
/// e^(−x²), nodes ascending.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let m = n.div_ceil(2);
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[n - 1],
            3 => 1.91 * z - 0.91 * x[n - 2],
            _ => 2.0 * z - x[n - i + 1],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            // Orthonormal Hermite recurrence.
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / j as f64).sqrt() * p2 - ((j as f64 - 1.0) / j as f64).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[n - 1 - i] = z;
        x[i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// ⟨f(sin²(k(x − x₀) + φ))⟩ over x ~ N(0, σ²), with `nodes` Gauss-Hermite points.
pub fn gaussian_average<F: Fn(f64) -> f64>(
    f: F,
    displacement_nm: f64,
    p: &LocalizationParams,
    nodes: usize,
) -> f64 {
    let (t, w) = gauss_hermite(nodes);
    let k = p.wavenumber();
    let spread = std::f64::consts::SQRT_2 * p.sigma_nm;
    t.iter()
        .zip(&w)
        .map(|(&ti, &wi)| {
            let s = (k * (spread * ti - displacement_nm) + p.phase_offset_rad).sin();
            wi * f(s * s)
        })
        .sum::<f64>()
        / PI.sqrt()
}

/// Chebyshev interpolant of a function on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevSeries {
    coefficients: Vec<f64>,
}

impl ChebyshevSeries {
    /// Interpolation nodes in [0, 1], ascending.
    pub fn nodes(n: usize) -> Vec<f64> {
        (0..n)
            .rev()
            .map(|j| 0.5 * (1.0 + (PI * (j as f64 + 0.5) / n as f64).cos()))
            .collect()
    }

    /// Builds the series from values at [`Self::nodes`].
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let coefficients = (0..n)
            .map(|m| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(idx, &v)| {
                        let j = n - 1 - idx;
                        v * (PI * m as f64 * (j as f64 + 0.5) / n as f64).cos()
                    })
                    .sum();
                if m == 0 {
                    s / n as f64
                } else {
                    2.0 * s / n as f64
                }
            })
            .collect();
        ChebyshevSeries { coefficients }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let t = 2.0 * u - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coefficients.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coefficients[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Gauss-Hermite nodes; the result is checked against twice as many.
    pub quadrature_nodes: usize,
    /// Steady-state solves used to interpolate the rate in sin².
    pub interpolation_nodes: usize,
    pub workers: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            quadrature_nodes: 20,
            interpolation_nodes: 24,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub displacement_nm: f64,
    /// Detected count rate including background.
    pub rate_cps: f64,
}

/// Detected total rate with the antinode coupling scaled to g_max·√u.
pub fn rate_at_sin_squared(params: &ModelParams, u: f64, chain: &DetectionChain) -> Result<f64> {
    let p = ModelParams {
        g_obs_mhz: params.g_max_mhz * u.clamp(0.0, 1.0).sqrt(),
        ..params.clone()
    };
    let ss = solve_model(&p)?;
    let n = &ss.observables.photon_number;
    let rate = rate_from_photon_numbers(
        n[0].max(0.0),
        n.get(1).copied().unwrap_or(0.0).max(0.0),
        p.kappa_mhz,
        chain,
    );
    Ok(rate.total_cps)
}

/// The detected rate as a function of u = sin², interpolated from
/// steady-state solves run on up to `workers` threads.
pub fn rate_curve(
    params: &ModelParams,
    chain: &DetectionChain,
    nodes: usize,
    workers: usize,
) -> Result<ChebyshevSeries> {
    params.validate()?;
    chain.validate()?;
    let us = ChebyshevSeries::nodes(nodes.max(2));
    let values =
        parallel::try_map_ordered(&us, workers, |&u| rate_at_sin_squared(params, u, chain))?;
    Ok(ChebyshevSeries::from_values(&values))
}

/// Simulated standing-wave scan: detected rate versus mirror displacement
/// x₀ for an ion of rms size σ.
///
/// The model's `g_max_mhz` sets the antinode coupling; `g_obs_mhz` is
/// ignored. Fails with [`NumericalError::QuadratureNotConverged`] if doubling
/// the Gauss-Hermite nodes changes any rate above background by more than
/// 0.5 %.
pub fn standing_wave_scan(
    params: &ModelParams,
    p: &LocalizationParams,
    displacements_nm: &[f64],
    chain: &DetectionChain,
    options: ScanOptions,
) -> Result<Vec<ScanPoint>> {
    p.validate()?;
    if options.quadrature_nodes < 15 {
        return Err(DomainError::InvalidParameter {
            name: "quadrature_nodes",
            value: options.quadrature_nodes as f64,
            reason: "at least 15 Gauss-Hermite nodes are required",
        }
        .into());
    }
    let curve = rate_curve(params, chain, options.interpolation_nodes, options.workers)?;
    let bg = chain.background_cps;
    let n = options.quadrature_nodes;
    displacements_nm
        .iter()
        .map(|&x0| {
            let rate = gaussian_average(|u| curve.eval(u), x0, p, n);
            let check = gaussian_average(|u| curve.eval(u), x0, p, 2 * n);
            let scale = (check - bg)
                .abs()
                .max(1e-3 * (curve.eval(1.0) - bg).abs())
                .max(f64::MIN_POSITIVE);
            let relative_change = (rate - check).abs() / scale;
            if relative_change > 5e-3 {
                return Err(Error::from(NumericalError::QuadratureNotConverged {
                    nodes: n,
                    doubled: 2 * n,
                    relative_change,
                }));
            }
            Ok(ScanPoint {
                displacement_nm: x0,
                rate_cps: check,
            })
        })
        .collect()
}

/// Least-squares fit of y = a·sin²(kx + φ) + c for fixed k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinSquaredFit {
    /// a ≥ 0.
    pub amplitude: f64,
    pub offset: f64,
    /// φ in [0, π).
    pub phase: f64,
    /// (y_max − y_min)/(y_max + y_min) of the fitted curve, a/(a + 2c).
    pub visibility: f64,
}

impl SinSquaredFit {
    pub fn eval(&self, x: f64, wavenumber: f64) -> f64 {
        self.amplitude * (wavenumber * x + self.phase).sin().powi(2) + self.offset
    }
}

/// Fits y = a·sin²(kx + φ) + c with k = 2π/λ, by linear least squares in
/// the basis {1, cos 2kx, sin 2kx}.
pub fn fit_sin_squared(points: &[(f64, f64)], wavelength_nm: f64) -> Result<SinSquaredFit> {
    let k = TAU / wavelength_nm;
    let m = points.len();
    if m < 3 {
        return Err(NumericalError::RankDeficientFit.into());
    }
    let design = DMatrix::from_fn(m, 3, |i, j| match j {
        0 => 1.0,
        1 => (2.0 * k * points[i].0).cos(),
        _ => (2.0 * k * points[i].0).sin(),
    });
    let y = DVector::from_iterator(m, points.iter().map(|p| p.1));
    let svd = design.svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if smin.is_nan() || smin <= 1e-10 * smax {
        return Err(NumericalError::RankDeficientFit.into());
    }
    let beta = svd
        .solve(&y, 1e-12 * smax)
        .map_err(|_| Error::from(NumericalError::RankDeficientFit))?;
    let (b0, b1, b2) = (beta[0], beta[1], beta[2]);
    let half_a = b1.hypot(b2);
    let amplitude = 2.0 * half_a;
    let offset = b0 - half_a;
    // a sin²(kx + φ) = a/2 − (a/2)(cos 2φ cos 2kx − sin 2φ sin 2kx)
    let phase = if half_a == 0.0 {
        0.0
    } else {
        let p = (0.5 * b2.atan2(-b1)).rem_euclid(PI);
        if PI - p < 1e-9 {
            0.0
        } else {
            p
        }
    };
    let denominator = amplitude + 2.0 * offset;
    let visibility = if amplitude == 0.0 || denominator == 0.0 {
        0.0
    } else {
        amplitude / denominator
    };
    Ok(SinSquaredFit {
        amplitude,
        offset,
        phase,
        visibility,
    })
}

/// Fit to a scan after subtracting the detector background.
pub fn fit_scan(
    points: &[ScanPoint],
    background_cps: f64,
    wavelength_nm: f64,
) -> Result<SinSquaredFit> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.displacement_nm, p.rate_cps - background_cps))
        .collect();
    fit_sin_squared(&xy, wavelength_nm)
}

/// Closed-form wave-packet average of sin²(k(x − x₀) + φ).
pub fn averaged_sin_squared(displacement_nm: f64, p: &LocalizationParams) -> f64 {
    let k = p.wavenumber();
    0.5 * (1.0
        - (2.0 * (p.phase_offset_rad - k * displacement_nm)).cos() * visibility_from_sigma(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn with_sigma(sigma_nm: f64) -> LocalizationParams {
        LocalizationParams {
            sigma_nm,
            ..LocalizationParams::default()
        }
    }

    #[test]
    fn visibility_examples() {
        assert_eq!(visibility_from_sigma(&with_sigma(0.0)), 1.0);
        assert!((visibility_from_sigma(&with_sigma(70.0)) - 0.597).abs() < 5e-4);
        assert!((visibility_from_sigma(&with_sigma(100.0)) - 0.349).abs() < 5e-4);
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_from_visibility(1.0, 866.0).unwrap(), 0.0);
        assert!((sigma_from_visibility(0.60, 866.0).unwrap() - 69.7).abs() < 0.05);
        assert!(sigma_from_visibility(0.0, 866.0).is_err());
        assert!(sigma_from_visibility(1.2, 866.0).is_err());
        assert!(sigma_from_visibility(0.5, -1.0).is_err());
    }

    #[test]
    fn coupling_reduction() {
        assert_eq!(g_effective(1.61, &with_sigma(0.0)), 1.61);
        let g = g_effective(1.61, &with_sigma(70.0));
        assert!((1.39..=1.43).contains(&g), "{g}");
        assert!(g_effective(1.61, &with_sigma(80.0)) < g);
    }

    proptest! {
        #[test]
        fn sigma_visibility_roundtrip(log_v in (1e-6f64).ln()..0.0) {
            let v = log_v.exp();
            let sigma = sigma_from_visibility(v, 866.0).unwrap();
            let back = visibility_from_sigma(&with_sigma(sigma));
            prop_assert!((back - v).abs() <= 1e-12 * v);
            let again = sigma_from_visibility(back, 866.0).unwrap();
            prop_assert!((again - sigma).abs() <= 1e-9 * sigma.max(1e-9));
        }

        #[test]
        fn fit_recovers_noiseless_parameters(a in 0.1f64..10.0, c in 0.0f64..5.0, phi in 0.0f64..3.1) {
            let k = TAU / 866.0;
            let pts: Vec<(f64, f64)> = (0..40)
                .map(|i| {
                    let x = -433.0 + 866.0 * i as f64 / 40.0;
                    (x, a * (k * x + phi).sin().powi(2) + c)
                })
                .collect();
            let fit = fit_sin_squared(&pts, 866.0).unwrap();
            prop_assert!((fit.amplitude - a).abs() < 1e-8 * a.max(1.0));
            prop_assert!((fit.offset - c).abs() < 1e-8 * a.max(1.0));
            let dphi = (fit.phase - phi).rem_euclid(PI);
            prop_assert!(dphi.min(PI - dphi) < 1e-8);
        }
    }

    #[test]
    fn gauss_hermite_moments() {
        let (x, w) = gauss_hermite(2);
        assert!((x[1] - FRAC_1_SQRT_2).abs() < 1e-14 && (w[0] - PI.sqrt() / 2.0).abs() < 1e-14);
        for n in [1, 5, 15, 20, 40] {
            let (x, w) = gauss_hermite(n);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            // ∫ x^{2m} e^{-x²} dx = Γ(m + 1/2)
            let mut gamma = PI.sqrt();
            for m in 0..n.min(10) {
                let q: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(xi, wi)| wi * xi.powi(2 * m as i32))
                    .sum();
                assert!((q - gamma).abs() < 1e-10 * gamma, "n = {n}, m = {m}");
                gamma *= m as f64 + 0.5;
            }
        }
    }

    #[test]
    fn quadrature_reproduces_closed_form_average() {
        for sigma in [0.0, 18.0, 70.0, 100.0] {
            let p = LocalizationParams {
                phase_offset_rad: 0.3,
                ..with_sigma(sigma)
            };
            for x0 in [0.0, 100.0, 250.0] {
                let q = gaussian_average(|u| u, x0, &p, 15);
                assert!((q - averaged_sin_squared(x0, &p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chebyshev_interpolation_of_smooth_functions() {
        let f = |u: f64| u / (1.0 + 2.0 * u) + 0.3;
        let nodes = ChebyshevSeries::nodes(24);
        let series = ChebyshevSeries::from_values(&nodes.iter().map(|&u| f(u)).collect::<Vec<_>>());
        for i in 0..=50 {
            let u = i as f64 / 50.0;
            assert!((series.eval(u) - f(u)).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_edge_cases() {
        let flat: Vec<(f64, f64)> = (0..12).map(|i| (40.0 * i as f64, 7.0)).collect();
        let fit = fit_sin_squared(&flat, 866.0).unwrap();
        assert!(fit.visibility.abs() < 1e-12);
        // All samples at the same phase of 2kx: columns are collinear.
        let degenerate: Vec<(f64, f64)> = (0..8).map(|i| (433.0 * i as f64, i as f64)).collect();
        assert!(matches!(
            fit_sin_squared(&degenerate, 866.0),
            Err(Error::Numerical(NumericalError::RankDeficientFit))
        ));
        assert!(fit_sin_squared(&flat[..2], 866.0).is_err());
    }

    #[test]
    fn synthetic_visibility_035() {
        let p = with_sigma(sigma_from_visibility(0.35, 866.0).unwrap());
        let pts: Vec<(f64, f64)> = (0..30)
            .map(|i| {
                let x = 30.0 * i as f64;
                (x, 1000.0 * averaged_sin_squared(x, &p))
            })
            .collect();
        let fit = fit_sin_squared(&pts, 866.0).unwrap();
        assert!((fit.visibility - 0.35).abs() < 0.01);
    }
}
