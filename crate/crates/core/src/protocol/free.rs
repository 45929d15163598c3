//! Free-fermion closed forms, the kernel and the Gaussian simulation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{momenta, EnvironmentFill, InitialState, Method, ProtocolConfig, SpectralGrid};
use crate::sim::hamiltonian::{env, sys};
use crate::sim::{hamiltonian_mode_matrix, GaussianState};
use crate::{Error, Result};

/// `φ̂(ω) = sin²(ωt/2)/ω²`, the Fourier transform of `φ(v) = (t − |v|)/4` on `|v| ≤ t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub t: f64,
}

impl Kernel {
    pub fn new(t: f64) -> Self {
        Self { t }
    }

    pub fn eval(&self, w: f64) -> f64 {
        let x = w * self.t / 2.0;
        if x.abs() < 1e-4 {
            // sin²x/x² = 1 − x²/3 + 2x⁴/45
            let x2 = x * x;
            return self.t * self.t / 4.0 * (1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 45.0);
        }
        let s = x.sin();
        s * s / (w * w)
    }

    /// Time-domain window `φ(v)`.
    pub fn window(&self, v: f64) -> f64 {
        if v.abs() <= self.t {
            (self.t - v.abs()) / 4.0
        } else {
            0.0
        }
    }
}

/// Spectral input to [`convolve_kernel`].
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    /// `A(k, ω) = 2π Σ_i w_i δ(ω − c_i)` with `(c_i, w_i)` per momentum.
    Lines { k: Vec<f64>, lines: Vec<Vec<(f64, f64)>> },
    /// Samples on an increasing frequency grid, `values[(ik, iw)]`.
    Sampled { k: Vec<f64>, omega: Vec<f64>, values: DMatrix<f64> },
}

/// `(A ⋆ φ̂)(k, ω) = (1/2π) ∫ A(k, ω') φ̂(ω − ω') dω'` at each requested ω.
///
/// Lines are evaluated exactly; sampled input uses the trapezoidal rule on its
/// own grid.
pub fn convolve_kernel(a: &Spectrum, kern: &Kernel, omegas: &[f64]) -> SpectralGrid {
    match a {
        Spectrum::Lines { k, lines } => {
            let mut g = SpectralGrid::zeros(k.clone(), omegas.to_vec(), Method::Kernel);
            for (ik, ls) in lines.iter().enumerate() {
                for (iw, &w) in omegas.iter().enumerate() {
                    g.values[(ik, iw)] = ls.iter().map(|&(c, wt)| wt * kern.eval(w - c)).sum();
                }
            }
            g
        }
        Spectrum::Sampled { k, omega, values } => {
            let mut g = SpectralGrid::zeros(k.clone(), omegas.to_vec(), Method::Kernel);
            for ik in 0..k.len() {
                for (iw, &w) in omegas.iter().enumerate() {
                    let f = |j: usize| values[(ik, j)] * kern.eval(w - omega[j]);
                    let s: f64 = (1..omega.len()).map(|j| 0.5 * (omega[j] - omega[j - 1]) * (f(j) + f(j - 1))).sum();
                    g.values[(ik, iw)] = s / (2.0 * PI);
                }
            }
            g
        }
    }
}

/// Free-ring occupations of the ground state: `ρ_k = 1` iff `2ν cos k < 0`.
pub fn ground_state_occupations(n: usize, nu: f64) -> Vec<f64> {
    momenta(n).iter().map(|&k| if 2.0 * nu * k.cos() < -1e-12 { 1.0 } else { 0.0 }).collect()
}

pub(crate) fn occupations(config: &ProtocolConfig) -> Vec<f64> {
    match &config.initial_state {
        InitialState::GroundState => ground_state_occupations(config.sites, config.nu),
        InitialState::Occupations(rho) => rho.clone(),
    }
}

/// Delta lines of a free ring: `A⁺` at `2ν cos k` with weight `ρ_k`, `A⁻` with `1 − ρ_k`.
pub fn free_lines(config: &ProtocolConfig) -> Result<(Spectrum, Spectrum)> {
    config.require_free()?;
    let k = config.momenta();
    let rho = occupations(config);
    let line = |w: &dyn Fn(f64) -> f64| Spectrum::Lines {
        k: k.clone(),
        lines: k.iter().zip(&rho).map(|(&k, &r)| vec![(2.0 * config.nu * k.cos(), w(r))]).collect(),
    };
    Ok((line(&|r| r), line(&|r| 1.0 - r)))
}

/// Closed form of the free protocol at any ε:
/// `ε² sin²(tΩ)/(ε² + (ω − 2ν cos k)²) · ρ_k`, `Ω = ½√(ε² + (ω − 2ν cos k)²)`.
///
/// For a full environment the value is `⟨1 − n(k)⟩`, which is the same
/// expression with `ρ_k` replaced by `1 − ρ_k`.
pub fn nk_exact_free(config: &ProtocolConfig) -> Result<SpectralGrid> {
    config.validate()?;
    config.require_free()?;
    let (k, omegas) = (config.momenta(), config.omegas());
    let rho = occupations(config);
    let eps2 = config.epsilon * config.epsilon;
    let mut g = SpectralGrid::zeros(k.clone(), omegas.clone(), Method::ExactFree).with_config(config);
    for (ik, &kk) in k.iter().enumerate() {
        let weight = match config.environment {
            EnvironmentFill::Empty => rho[ik],
            EnvironmentFill::Full => 1.0 - rho[ik],
        };
        for (iw, &w) in omegas.iter().enumerate() {
            let x = w - 2.0 * config.nu * kk.cos();
            let d = eps2 + x * x;
            g.values[(ik, iw)] = if eps2 == 0.0 {
                0.0
            } else {
                let s = (config.t * 0.5 * d.sqrt()).sin();
                eps2 * s * s / d * weight
            };
        }
    }
    Ok(g)
}

/// Leading order in ν: `sin²(tΩ₀)·ε²/(ω² + ε²)·ρ_k`, `Ω₀ = ½√(ω² + ε²)`.
pub fn strong_coupling_leading(config: &ProtocolConfig, rho: &[f64]) -> Result<SpectralGrid> {
    config.validate()?;
    if rho.len() != config.sites {
        return Err(Error::DimensionMismatch { expected: config.sites, found: rho.len() });
    }
    let eps2 = config.epsilon * config.epsilon;
    let omegas = config.omegas();
    let columns = omegas
        .iter()
        .map(|&w| {
            let d = w * w + eps2;
            let f = if eps2 == 0.0 { 0.0 } else { (config.t * 0.5 * d.sqrt()).sin().powi(2) * eps2 / d };
            rho.iter().map(|r| f * r).collect()
        })
        .collect();
    Ok(SpectralGrid::from_columns(config.momenta(), omegas, columns, Method::StrongCoupling).with_config(config))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Broadening {
    /// Integer with `(n − 1)π ≤ εt/2 < nπ`.
    pub n: usize,
    pub delta_omega: f64,
    /// Amplitude of the first ghost band relative to the main band.
    pub ratio_r: f64,
}

pub fn broadening_and_ghosts(epsilon: f64, t: f64) -> Result<Broadening> {
    if !(t > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidConfig(format!("broadening needs t > 0 and finite ε (got t = {t}, ε = {epsilon})")));
    }
    let et = epsilon.abs() * t;
    let n = (et / (2.0 * PI)).floor() as usize + 1;
    let nn = 2.0 * PI * n as f64;
    let delta_omega = nn / t * (1.0 - (et / nn).powi(2)).sqrt();
    let ratio_r = (et / (nn + et)).powi(2);
    Ok(Broadening { n, delta_omega, ratio_r })
}

/// Continuous-time free-fermion simulation on the `2N` single-particle modes.
///
/// Empty environment: `⟨n(k)⟩`. Full environment: `⟨1 − n(k)⟩`.
pub fn nk_gaussian(config: &ProtocolConfig) -> Result<SpectralGrid> {
    config.validate()?;
    config.require_free()?;
    let n = config.sites;
    let (k, omegas) = (config.momenta(), config.omegas());
    let c0 = initial_correlation(config).0;
    let (cr, ci) = (c0.map(|z| z.re), c0.map(|z| z.im));
    // F[(a, m)] = e^{-i k_m a}/√N, so d(k_m) = Σ_a F[(a, m)] d_a
    let scale = 1.0 / (n as f64).sqrt();
    let fr = DMatrix::from_fn(n, n, |a, m| scale * (k[m] * a as f64).cos());
    let fi = DMatrix::from_fn(n, n, |a, m| -scale * (k[m] * a as f64).sin());
    let columns: Vec<Vec<f64>> = omegas
        .par_iter()
        .map(|&w| {
            // Only the environment block of Tᵀ C T* is read, and n(k_m) = b_m† C b_m
            // with B = conj(T[:, env]) F = V e^{itλ} V[env, :]ᵀ F.
            let h = hamiltonian_mode_matrix(n, config.nu, config.epsilon, w);
            let v = h.eigenvectors();
            let ve = DMatrix::from_fn(n, 2 * n, |a, r| v[(env(a), r)]).transpose();
            let (wr, wi) = (&ve * &fr, &ve * &fi);
            let mut xr = wr.clone();
            let mut xi = wi.clone();
            for (r, &lam) in h.eigenvalues().iter().enumerate() {
                let (s, c) = (config.t * lam).sin_cos();
                for m in 0..n {
                    xr[(r, m)] = c * wr[(r, m)] - s * wi[(r, m)];
                    xi[(r, m)] = s * wr[(r, m)] + c * wi[(r, m)];
                }
            }
            let (br, bi) = (v * xr, v * xi);
            let yr = &cr * &br - &ci * &bi;
            let yi = &cr * &bi + &ci * &br;
            (0..n)
                .map(|m| {
                    let x = br.column(m).dot(&yr.column(m)) + bi.column(m).dot(&yi.column(m));
                    match config.environment {
                        EnvironmentFill::Empty => x,
                        EnvironmentFill::Full => 1.0 - x,
                    }
                })
                .collect()
        })
        .collect();
    Ok(SpectralGrid::from_columns(k, omegas, columns, Method::Gaussian).with_config(config))
}

/// `⟨c_i† c_j⟩ = (1/N) Σ_k ρ_k e^{ik(j − i)}` on the system, 0 or 1 on the environment.
fn initial_correlation(config: &ProtocolConfig) -> GaussianState {
    let n = config.sites;
    let k = config.momenta();
    let rho = occupations(config);
    let mut c = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let s: Complex64 =
                k.iter().zip(&rho).map(|(&kk, &r)| r * Complex64::from_polar(1.0, kk * (j as f64 - i as f64))).sum();
            c[(sys(i), sys(j))] = s / n as f64;
        }
        if config.environment == EnvironmentFill::Full {
            c[(env(i), env(i))] = Complex64::new(1.0, 0.0);
        }
    }
    GaussianState(c)
}
