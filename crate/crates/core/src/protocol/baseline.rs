//! Exact Lehmann reference, the dynamical-correlation baseline and the
//! Trotter-error comparison between the two methods.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::circuit::{annihilate_momentum, create_momentum, system_hamiltonian, system_state, system_trotter_factors};
use super::free::{convolve_kernel, free_lines, Kernel, Spectrum};
use super::{EnvironmentFill, Method, ProtocolConfig, SpectralGrid, SpectralPair};
use crate::protocol::run_circuit_protocol;
use crate::sim::fock::Sector;
use crate::Result;

/// Time samples used by the baseline when the evolution is exact.
pub const EXACT_TIME_SAMPLES: usize = 512;

/// Delta lines of `A⁺` and `A⁻` for the configured initial state.
///
/// Free rings use the closed form; otherwise the system is diagonalised and
/// `A⁺` gets a line at `E − E_m` with weight `|⟨m|c(k)|E⟩|²`, `A⁻` a line at
/// `E_m − E` with weight `|⟨m|c(k)†|E⟩|²`.
pub fn lehmann_lines(config: &ProtocolConfig) -> Result<(Spectrum, Spectrum)> {
    config.validate()?;
    if config.v == 0.0 {
        return free_lines(config);
    }
    let n = config.sites;
    let s = system_state(config)?;
    let h = system_hamiltonian(config);
    let k = config.momenta();
    let sector_lines = |particles: Option<usize>, plus: bool| -> Vec<Vec<(f64, f64)>> {
        let Some(p) = particles.filter(|&p| p <= n) else {
            return vec![vec![]; n];
        };
        let sector = Sector::new(&h, p);
        k.iter()
            .map(|&kk| {
                let v = if plus {
                    annihilate_momentum(&s.amps, n, kk, |j| j)
                } else {
                    create_momentum(&s.amps, n, kk, |j| j)
                };
                sector
                    .overlaps(&v)
                    .iter()
                    .zip(sector.eig.eigenvalues.iter())
                    .filter(|(ov, _)| ov.norm_sqr() > 1e-14)
                    .map(|(ov, &em)| (if plus { s.energy - em } else { em - s.energy }, ov.norm_sqr()))
                    .collect()
            })
            .collect()
    };
    let plus = Spectrum::Lines { k: k.clone(), lines: sector_lines(s.particles.checked_sub(1), true) };
    let minus = Spectrum::Lines { k: k.clone(), lines: sector_lines(Some(s.particles + 1), false) };
    Ok((plus, minus))
}

/// `(A± ⋆ φ̂)(k, ω)` from the Lehmann lines.
pub fn lehmann_reference(config: &ProtocolConfig) -> Result<SpectralPair> {
    let (plus, minus) = lehmann_lines(config)?;
    let kern = Kernel::new(config.t);
    let omegas = config.omegas();
    let tag = |mut g: SpectralGrid| {
        g.method = Method::Lehmann;
        g.with_config(config)
    };
    Ok(SpectralPair {
        plus: tag(convolve_kernel(&plus, &kern, &omegas)),
        minus: tag(convolve_kernel(&minus, &kern, &omegas)),
    })
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Quadrature weights on `m·dt`, `m = 0..=steps`: Simpson for an even number
/// of intervals, trapezoid otherwise.
fn quadrature_weights(steps: usize, dt: f64) -> Vec<f64> {
    let mut w = vec![0.0; steps + 1];
    if steps % 2 == 0 {
        for (m, x) in w.iter_mut().enumerate() {
            *x = dt / 3.0 * if m == 0 || m == steps { 1.0 } else if m % 2 == 1 { 4.0 } else { 2.0 };
        }
    } else {
        for (m, x) in w.iter_mut().enumerate() {
            *x = dt * if m == 0 || m == steps { 0.5 } else { 1.0 };
        }
    }
    w
}

/// The standard route: `G⁺(k, v) = ⟨E|e^{ivH} c†(k) e^{-ivH} c(k)|E⟩` and
/// `G⁻(k, v) = ⟨E|e^{-ivH} c(k) e^{ivH} c†(k)|E⟩` on `v = m·t/s`, then
/// `∫ φ(v) e^{-iωv} G±(k, v) dv` over `[-t, t]` using `G(−v) = G(v)*`.
///
/// With `trotter_steps = s ≥ 1` both propagators are `s`-step product formulas
/// (even bonds, odd bonds, interaction), so the time grid has `s + 1` points.
/// `s = 0` evolves exactly on [`EXACT_TIME_SAMPLES`] points. Coarse product
/// formulas can give negative samples; check [`SpectralGrid::negative_samples`].
pub fn dynamical_correlation_baseline(config: &ProtocolConfig) -> Result<SpectralPair> {
    config.validate()?;
    let n = config.sites;
    let s = system_state(config)?;
    let k = config.momenta();
    let omegas = config.omegas();
    let kern = Kernel::new(config.t);
    let steps = if config.trotter_steps == 0 { EXACT_TIME_SAMPLES } else { config.trotter_steps };
    let dt = config.t / steps as f64;
    let h = system_hamiltonian(config);
    let propagate = |amps: &mut Vec<Complex64>, sign: f64| {
        if config.trotter_steps == 0 {
            *amps = h.evolve(amps, sign * dt);
        } else {
            system_trotter_factors(amps, config, sign * dt, |j| j);
        }
    };
    let correlations = |sign: f64| -> Vec<Vec<Complex64>> {
        // G[ik][m]; sign = −1 for G⁺ (removal), +1 for G⁻ (addition)
        let mover = |v: &[Complex64], kk: f64| {
            if sign < 0.0 {
                annihilate_momentum(v, n, kk, |j| j)
            } else {
                create_momentum(v, n, kk, |j| j)
            }
        };
        let mut e = s.amps.clone();
        let mut evolved_e = vec![e.clone()];
        for _ in 0..steps {
            propagate(&mut e, sign);
            evolved_e.push(e.clone());
        }
        k.par_iter()
            .map(|&kk| {
                let mut a = mover(&s.amps, kk);
                let mut g = Vec::with_capacity(steps + 1);
                for (m, em) in evolved_e.iter().enumerate() {
                    if m > 0 {
                        propagate(&mut a, sign);
                    }
                    g.push(inner(&mover(em, kk), &a));
                }
                g
            })
            .collect()
    };
    let weights = quadrature_weights(steps, dt);
    let transform = |g: &[Vec<Complex64>], method: Method| {
        let mut grid = SpectralGrid::zeros(k.clone(), omegas.clone(), method).with_config(config);
        for (ik, gk) in g.iter().enumerate() {
            for (iw, &w) in omegas.iter().enumerate() {
                let s: Complex64 = (0..=steps)
                    .map(|m| {
                        let v = m as f64 * dt;
                        weights[m] * kern.window(v) * Complex64::from_polar(1.0, -w * v) * gk[m]
                    })
                    .sum();
                grid.values[(ik, iw)] = 2.0 * s.re;
            }
        }
        grid
    };
    Ok(SpectralPair {
        plus: transform(&correlations(-1.0), Method::DynamicalCorrelation),
        minus: transform(&correlations(1.0), Method::DynamicalCorrelation),
    })
}

/// Error after rescaling `x` by the least-squares factor onto `reference`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub scale: f64,
    pub mean_abs: f64,
    pub max_abs: f64,
}

pub fn least_squares_error(x: &SpectralGrid, reference: &SpectralGrid) -> ErrorSummary {
    let xx: f64 = x.values.iter().map(|a| a * a).sum();
    let xr: f64 = x.values.iter().zip(reference.values.iter()).map(|(a, b)| a * b).sum();
    let scale = if xx > 0.0 { xr / xx } else { 0.0 };
    let errs: Vec<f64> = x.values.iter().zip(reference.values.iter()).map(|(a, b)| (scale * a - b).abs()).collect();
    ErrorSummary {
        scale,
        mean_abs: errs.iter().sum::<f64>() / errs.len().max(1) as f64,
        max_abs: errs.iter().copied().fold(0.0, f64::max),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterRow {
    pub steps: usize,
    pub environment: ErrorSummary,
    pub baseline: ErrorSummary,
    /// Smallest and largest raw environment sample over both fillings.
    pub environment_min: f64,
    pub environment_max: f64,
    pub baseline_min: f64,
    pub baseline_negative: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterComparison {
    pub config: ProtocolConfig,
    pub rows: Vec<TrotterRow>,
}

/// Fig.-3-style comparison: for each step count, the environment method
/// (`n(k)` with an empty plus `1 − n(k)` with a full environment) and the
/// baseline (`A⁺ + A⁻`), each rescaled by least squares onto the exact
/// `(A ⋆ φ̂)`. Step count 0 means continuous time.
pub fn compare_trotter(config: &ProtocolConfig, steps: &[usize]) -> Result<TrotterComparison> {
    config.validate()?;
    let reference = lehmann_reference(config)?.combined();
    let mut rows = Vec::with_capacity(steps.len());
    for &s in steps {
        let mut c = config.clone();
        c.trotter_steps = s;
        c.environment = EnvironmentFill::Empty;
        let empty = run_circuit_protocol(&c)?;
        c.environment = EnvironmentFill::Full;
        let full = run_circuit_protocol(&c)?;
        let env = empty.plus(&full)?;
        let base = dynamical_correlation_baseline(&c)?.combined();
        rows.push(TrotterRow {
            steps: s,
            environment: least_squares_error(&env, &reference),
            baseline: least_squares_error(&base, &reference),
            environment_min: empty.min().min(full.min()),
            environment_max: empty.max().max(full.max()),
            baseline_min: base.min(),
            baseline_negative: base.negative_samples(1e-12),
        });
    }
    Ok(TrotterComparison { config: config.clone(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::InitialState;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_integrate_polynomials() {
        for steps in [1, 2, 3, 8] {
            let w = quadrature_weights(steps, 0.5);
            let s: f64 = w.iter().enumerate().map(|(m, w)| w * (m as f64 * 0.5)).sum();
            assert_abs_diff_eq!(s, 0.5 * (steps as f64 * 0.5).powi(2), epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonalised_lines_match_free_lines() {
        // V tiny but nonzero forces the exact-diagonalisation path
        let mut c = ProtocolConfig::new(6, 0.1, 5.0, -1.0).with_omegas(vec![-2.0, -0.5, 0.0, 1.5]);
        c.v = 1e-12;
        let a = lehmann_reference(&c).unwrap();
        c.v = 0.0;
        let b = lehmann_reference(&c).unwrap();
        assert!(a.plus.max_abs_diff(&b.plus).unwrap() < 1e-8);
        assert!(a.minus.max_abs_diff(&b.minus).unwrap() < 1e-8);
    }

    #[test]
    fn lehmann_sum_rule() {
        let mut c = ProtocolConfig::new(6, 0.1, 5.0, -1.0);
        c.v = 3.0;
        let (p, m) = lehmann_lines(&c).unwrap();
        let (Spectrum::Lines { lines: lp, .. }, Spectrum::Lines { lines: lm, .. }) = (p, m) else { panic!() };
        for (a, b) in lp.iter().zip(&lm) {
            let total: f64 = a.iter().chain(b).map(|l| l.1).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn exact_baseline_matches_kernel() {
        let c = ProtocolConfig::new(6, 0.1, 5.0, 1.0).with_omegas((0..31).map(|i| -3.0 + 0.2 * i as f64).collect());
        let b = dynamical_correlation_baseline(&c).unwrap();
        let r = lehmann_reference(&c).unwrap();
        assert!(b.plus.max_abs_diff(&r.plus).unwrap() < 1e-6);
        assert!(b.minus.max_abs_diff(&r.minus).unwrap() < 1e-6);
        let mut ci = c.clone();
        ci.v = 2.0;
        let b = dynamical_correlation_baseline(&ci).unwrap();
        let r = lehmann_reference(&ci).unwrap();
        assert!(b.combined().max_abs_diff(&r.combined()).unwrap() < 1e-6);
    }

    #[test]
    fn single_mode_peaks_at_dispersion() {
        let n = 5;
        let omegas: Vec<f64> = (0..=800).map(|i| -3.0 + 6.0 * i as f64 / 800.0).collect();
        let mut c = ProtocolConfig::new(n, 0.1, 5.0, 1.0).with_omegas(omegas.clone());
        c.initial_state = InitialState::Occupations(vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        let b = dynamical_correlation_baseline(&c).unwrap();
        let row: Vec<f64> = (0..omegas.len()).map(|j| b.plus.get(2, j)).collect();
        let best = (0..row.len()).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
        let expect = 2.0 * (2.0 * std::f64::consts::PI * 2.0 / 5.0).cos();
        assert!((omegas[best] - expect).abs() <= 6.0 / 800.0);
        // the other momenta carry no removal weight
        assert!((0..omegas.len()).all(|j| b.plus.get(0, j).abs() < 1e-9));
    }

    #[test]
    fn least_squares_scale() {
        let r = SpectralGrid::from_columns(vec![0.0], vec![0.0, 1.0], vec![vec![2.0], vec![4.0]], Method::Lehmann);
        let x = r.scaled(0.5);
        let e = least_squares_error(&x, &r);
        assert_abs_diff_eq!(e.scale, 2.0, epsilon = 1e-15);
        assert!(e.max_abs < 1e-15);
    }
}
