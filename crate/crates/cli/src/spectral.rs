//! `simulate-spectral` and `compare-trotter`.

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use std::fs;
use std::path::Path;

use envspec::protocol::{
    compare_trotter, convolve_kernel, dynamical_correlation_baseline, free_lines, ground_state_occupations,
    lehmann_lines, nk_exact_free, nk_gaussian, run_circuit_protocol, strong_coupling_leading, EnvironmentFill,
    InitialState, Kernel, ProtocolConfig, SpectralGrid,
};

use crate::manifest::{manifest_path, sibling, RunManifest};
use crate::pretty;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// `exact` for free, continuous-time configs, `circuit` otherwise.
    Auto,
    /// Closed-form free-fermion result.
    Exact,
    /// Single-particle (Gaussian) simulation.
    Gaussian,
    /// Dense statevector simulation of the protocol.
    Circuit,
    /// Leading strong-coupling formula (exact at ν = 0).
    StrongCoupling,
    /// ε² times the kernel-convolved spectral function.
    Kernel,
    /// ε² times the windowed dynamical-correlation baseline.
    Baseline,
}

impl MethodArg {
    fn resolve(self, c: &ProtocolConfig) -> MethodArg {
        match self {
            MethodArg::Auto if c.v == 0.0 && c.trotter_steps == 0 => MethodArg::Exact,
            MethodArg::Auto => MethodArg::Circuit,
            m => m,
        }
    }

    fn name(self) -> &'static str {
        match self {
            MethodArg::Auto => "auto",
            MethodArg::Exact => "exact",
            MethodArg::Gaussian => "gaussian",
            MethodArg::Circuit => "circuit",
            MethodArg::StrongCoupling => "strong-coupling",
            MethodArg::Kernel => "kernel",
            MethodArg::Baseline => "baseline",
        }
    }

    /// Whether the values are Z-basis probabilities, so shots make sense.
    fn is_probability(self) -> bool {
        matches!(self, MethodArg::Exact | MethodArg::Gaussian | MethodArg::Circuit)
    }
}

pub fn load_config(path: &Path) -> Result<ProtocolConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config: ProtocolConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    config.validate().with_context(|| format!("in {}", path.display()))?;
    Ok(config)
}

fn occupations(c: &ProtocolConfig) -> Result<Vec<f64>> {
    if c.v != 0.0 {
        bail!("`V`: strong-coupling formula needs a free system (V = 0)");
    }
    Ok(match &c.initial_state {
        InitialState::GroundState => ground_state_occupations(c.sites, c.nu),
        InitialState::Occupations(r) => r.clone(),
    })
}

pub fn evaluate(c: &ProtocolConfig, method: MethodArg) -> Result<SpectralGrid> {
    let eps2 = c.epsilon * c.epsilon;
    let pick = |pair: (SpectralGrid, SpectralGrid)| match c.environment {
        EnvironmentFill::Empty => pair.0,
        EnvironmentFill::Full => pair.1,
    };
    Ok(match method.resolve(c) {
        MethodArg::Auto => unreachable!("resolved above"),
        MethodArg::Exact => nk_exact_free(c)?,
        MethodArg::Gaussian => nk_gaussian(c)?,
        MethodArg::Circuit => run_circuit_protocol(c)?,
        MethodArg::StrongCoupling => strong_coupling_leading(c, &occupations(c)?)?,
        MethodArg::Kernel => {
            let (plus, minus) = if c.v == 0.0 { free_lines(c)? } else { lehmann_lines(c)? };
            let kern = Kernel::new(c.t);
            let omegas = c.omegas();
            pick((convolve_kernel(&plus, &kern, &omegas), convolve_kernel(&minus, &kern, &omegas))).scaled(eps2)
        }
        MethodArg::Baseline => {
            let b = dynamical_correlation_baseline(c)?;
            pick((b.plus, b.minus)).scaled(eps2)
        }
    })
}

/// Mean of `shots` Bernoulli draws per value, in k-major order.
pub fn add_shot_noise(grid: &mut SpectralGrid, shots: u32, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for ik in 0..grid.k.len() {
        for iw in 0..grid.omega.len() {
            let p = grid.values[(ik, iw)].clamp(0.0, 1.0);
            let hits = (0..shots).filter(|_| rng.gen::<f64>() < p).count();
            grid.values[(ik, iw)] = hits as f64 / shots as f64;
        }
    }
}

pub fn to_csv(grid: &SpectralGrid, method: &str) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["k", "omega", "value", "method"])?;
    for (k, omega, value) in grid.rows() {
        w.write_record([k.to_string(), omega.to_string(), value.to_string(), method.to_string()])?;
    }
    Ok(w.into_inner()?)
}

#[derive(Serialize)]
struct SpectralMeta<'a> {
    method: &'a str,
    config: &'a ProtocolConfig,
    sites: usize,
    omega_points: usize,
    min: f64,
    max: f64,
    negative_samples: usize,
    shots: Option<u32>,
    seed: Option<u64>,
    columns: [&'static str; 4],
}

pub fn simulate(
    config_path: &Path,
    method: MethodArg,
    out: &Path,
    shots: Option<u32>,
    seed: u64,
    manifest: Option<&Path>,
) -> Result<()> {
    let config = load_config(config_path)?;
    let resolved = method.resolve(&config);
    let mut grid = evaluate(&config, resolved)?;
    if let Some(s) = shots {
        if s == 0 {
            bail!("`shots` must be positive");
        }
        if !resolved.is_probability() {
            bail!("`shots`: method {} does not produce probabilities", resolved.name());
        }
        add_shot_noise(&mut grid, s, seed);
    }
    let seed = shots.map(|_| seed);
    let meta = SpectralMeta {
        method: resolved.name(),
        config: &config,
        sites: config.sites,
        omega_points: grid.omega.len(),
        min: grid.min(),
        max: grid.max(),
        negative_samples: grid.negative_samples(1e-12),
        shots,
        seed,
        columns: ["k", "omega", "value", "method"],
    };
    let mut m = RunManifest::new("simulate-spectral", json!({ "config": config, "method": resolved.name(), "shots": shots }), seed);
    m.write(out, &to_csv(&grid, resolved.name())?)?;
    m.write(&sibling(out, "json"), pretty(&meta)?.as_bytes())?;
    m.save(&manifest_path(out, manifest))?;
    println!(
        "{} points, method {}, range [{:.6}, {:.6}], {} negative",
        grid.values.len(),
        resolved.name(),
        meta.min,
        meta.max,
        meta.negative_samples
    );
    Ok(())
}

pub fn compare(config_path: &Path, steps: &[usize], out: &Path, manifest: Option<&Path>) -> Result<()> {
    let config = load_config(config_path)?;
    if steps.is_empty() {
        bail!("`steps` must list at least one step count");
    }
    let cmp = compare_trotter(&config, steps)?;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record([
        "steps",
        "environment_mean_abs",
        "environment_max_abs",
        "environment_scale",
        "baseline_mean_abs",
        "baseline_max_abs",
        "baseline_scale",
        "environment_min",
        "environment_max",
        "baseline_min",
        "baseline_negative",
    ])?;
    println!("{:>6} {:>12} {:>12} {:>10}", "steps", "environment", "baseline", "negatives");
    for r in &cmp.rows {
        w.write_record([
            r.steps.to_string(),
            r.environment.mean_abs.to_string(),
            r.environment.max_abs.to_string(),
            r.environment.scale.to_string(),
            r.baseline.mean_abs.to_string(),
            r.baseline.max_abs.to_string(),
            r.baseline.scale.to_string(),
            r.environment_min.to_string(),
            r.environment_max.to_string(),
            r.baseline_min.to_string(),
            r.baseline_negative.to_string(),
        ])?;
        println!("{:>6} {:>12.4e} {:>12.4e} {:>10}", r.steps, r.environment.mean_abs, r.baseline.mean_abs, r.baseline_negative);
    }
    let mut m = RunManifest::new("compare-trotter", json!({ "config": config, "steps": steps }), None);
    m.write(out, &w.into_inner()?)?;
    m.write(&sibling(out, "json"), pretty(&cmp)?.as_bytes())?;
    m.save(&manifest_path(out, manifest))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_method() {
        let mut c = ProtocolConfig::new(4, 0.1, 2.0, 1.0);
        assert_eq!(MethodArg::Auto.resolve(&c), MethodArg::Exact);
        c.trotter_steps = 3;
        assert_eq!(MethodArg::Auto.resolve(&c), MethodArg::Circuit);
        assert_eq!(MethodArg::Kernel.resolve(&c).name(), "kernel");
    }

    #[test]
    fn shot_noise_is_seeded_and_bounded() {
        let c = ProtocolConfig::new(4, 0.8, 2.0, 1.0);
        let g = nk_exact_free(&c).unwrap();
        let (mut a, mut b) = (g.clone(), g.clone());
        add_shot_noise(&mut a, 200, 7);
        add_shot_noise(&mut b, 200, 7);
        assert_eq!(a.values, b.values);
        assert!(a.values.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!(a.max_abs_diff(&g).unwrap() < 0.2);
    }

    #[test]
    fn kernel_method_is_leading_order() {
        let c = ProtocolConfig::new(6, 1e-3, 3.0, 1.0);
        let k = evaluate(&c, MethodArg::Kernel).unwrap();
        let e = evaluate(&c, MethodArg::Exact).unwrap();
        assert!(k.max_abs_diff(&e).unwrap() < 1e-10);
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let c = ProtocolConfig::new(3, 0.5, 1.0, 1.0).with_omegas(vec![0.0, 1.0]);
        let g = nk_exact_free(&c).unwrap();
        let text = String::from_utf8(to_csv(&g, "exact").unwrap()).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(text.starts_with("k,omega,value,method\n"));
    }
}
