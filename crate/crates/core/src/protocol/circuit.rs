//! Dense simulation of the full protocol on `2N` qubits.
//!
//! Qubits follow the interleaved Jordan-Wigner order `c_0, d_0, c_1, d_1, …`.
//! Time evolution uses exact fermionic two-mode exponentials (hopping with its
//! Jordan-Wigner string, density phases); state preparation and readout are
//! compiled circuits from [`crate::fft`].

use num_complex::Complex64;
use rayon::prelude::*;

use super::free::occupations;
use super::{EnvironmentFill, InitialState, Method, Preparation, ProtocolConfig, Readout, SpectralGrid};
use crate::circuit::{Circuit, Gate};
use crate::fft::{
    compile_fft, ground_state_prep_circuit, interleave_circuit, interleave_permutation, FftPlan, InterleaveStrategy,
};
use crate::sim::fock::{annihilate, create, ground_state, hop, mask_phase, FermionHamiltonian};
use crate::sim::hamiltonian::{env, sys};
use crate::sim::{StateVector, MAX_QUBITS};
use crate::{Error, Result};

/// Cap on system sites for exact diagonalisation.
pub const MAX_ED_SITES: usize = 14;

/// Initial system state on `N` modes (bit `j` = site `j`).
#[derive(Debug, Clone)]
pub struct SystemState {
    pub energy: f64,
    pub particles: usize,
    pub amps: Vec<Complex64>,
}

pub(crate) fn system_hamiltonian(config: &ProtocolConfig) -> FermionHamiltonian {
    let n = config.sites;
    let mut h = FermionHamiltonian::new(n);
    for j in 0..n {
        h.add_hopping(j, (j + 1) % n, config.nu);
        if config.v != 0.0 {
            h.add_density(j, (j + 1) % n, config.v);
        }
    }
    h
}

fn full_hamiltonian(config: &ProtocolConfig, omega: f64) -> FermionHamiltonian {
    let n = config.sites;
    let mut h = FermionHamiltonian::new(2 * n);
    for j in 0..n {
        h.add_hopping(sys(j), sys((j + 1) % n), config.nu);
        if config.v != 0.0 {
            h.add_density(sys(j), sys((j + 1) % n), config.v);
        }
        h.add_hopping(sys(j), env(j), config.epsilon / 2.0);
        h.add_hopping(env(j), env(j), omega);
    }
    h
}

/// Ground state by exact diagonalisation, or the Slater determinant of the
/// given momentum occupations (which must then be 0 or 1).
pub fn system_state(config: &ProtocolConfig) -> Result<SystemState> {
    let n = config.sites;
    if n > MAX_ED_SITES {
        return Err(Error::TooManyQubits { requested: n, cap: MAX_ED_SITES });
    }
    match &config.initial_state {
        InitialState::GroundState => {
            let (energy, particles, amps) = ground_state(&system_hamiltonian(config))?;
            Ok(SystemState { energy, particles, amps })
        }
        InitialState::Occupations(rho) => {
            config.require_free()?;
            if rho.iter().any(|&r| r != 0.0 && r != 1.0) {
                return Err(Error::InvalidConfig("`initial_state`: a pure state needs occupations 0 or 1".into()));
            }
            let k = config.momenta();
            let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
            amps[0] = Complex64::new(1.0, 0.0);
            let mut energy = 0.0;
            for m in (0..n).filter(|&m| rho[m] == 1.0) {
                amps = create_momentum(&amps, n, k[m], |j| j);
                energy += 2.0 * config.nu * k[m].cos();
            }
            let particles = rho.iter().filter(|&&r| r == 1.0).count();
            Ok(SystemState { energy, particles, amps })
        }
    }
}

/// `c(k)† |ψ⟩` with `c(k)† = N^{-1/2} Σ_j e^{ijk} c_j†` and `c_j` on mode `site(j)`.
pub(crate) fn create_momentum(amps: &[Complex64], n: usize, k: f64, site: impl Fn(usize) -> usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for j in 0..n {
        let ph = Complex64::from_polar(1.0 / (n as f64).sqrt(), k * j as f64);
        out.iter_mut().zip(create(amps, site(j))).for_each(|(o, x)| *o += ph * x);
    }
    out
}

/// `c(k) |ψ⟩` with `c(k) = N^{-1/2} Σ_j e^{-ijk} c_j`.
pub(crate) fn annihilate_momentum(amps: &[Complex64], n: usize, k: f64, site: impl Fn(usize) -> usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for j in 0..n {
        let ph = Complex64::from_polar(1.0 / (n as f64).sqrt(), -k * j as f64);
        out.iter_mut().zip(annihilate(amps, site(j))).for_each(|(o, x)| *o += ph * x);
    }
    out
}

fn uses_fft_prep(config: &ProtocolConfig) -> Result<bool> {
    let free_slater = config.v == 0.0 && occupations(config).iter().all(|&r| r == 0.0 || r == 1.0);
    let compilable = FftPlan::radix_for(config.sites).is_some();
    match config.preparation {
        Preparation::Auto => Ok(free_slater && compilable),
        Preparation::Exact => Ok(false),
        Preparation::Fft if free_slater && compilable => Ok(true),
        Preparation::Fft => Err(Error::InvalidConfig(
            "`preparation`: fft needs V = 0, 0/1 occupations and a power-of-2 or power-of-3 size".into(),
        )),
    }
}

/// Strategy for radix-2 interleaves, which have no imported listing.
fn radix2_strategy(s: InterleaveStrategy) -> InterleaveStrategy {
    if s == InterleaveStrategy::ImportedSequence {
        InterleaveStrategy::CxLadder
    } else {
        s
    }
}

/// FFFT plan for `n` modes with the requested strategy, or the CX ladder when
/// no imported listing exists for that size.
fn fft_plan(n: usize, strategy: InterleaveStrategy) -> Result<FftPlan> {
    let radix = FftPlan::radix_for(n).ok_or(Error::NotAPower { modes: n, radix: 2 })?;
    FftPlan::new(n, radix, strategy).or_else(|_| FftPlan::new(n, radix, radix2_strategy(strategy)))
}

/// The `2N`-qubit state before time evolution, environment filled if requested.
///
/// A filled environment is `X` on every environment qubit followed by `Z` on
/// system qubit `i` whenever `N − i` is odd; this is `Π_j d_j†` applied from
/// `j = N − 1` down to `0`, up to a global sign.
pub fn prepare_initial_state(config: &ProtocolConfig) -> Result<StateVector> {
    config.validate()?;
    let n = config.sites;
    if 2 * n > MAX_QUBITS {
        return Err(Error::TooManyQubits { requested: 2 * n, cap: MAX_QUBITS });
    }
    let mut psi = if uses_fft_prep(config)? {
        let filled: Vec<usize> = occupations(config).iter().enumerate().filter(|(_, &r)| r == 1.0).map(|(m, _)| m).collect();
        let prep = ground_state_prep_circuit(n, &filled, fft_plan(n, config.interleave)?.strategy)?;
        let map: Vec<usize> = (0..n).map(sys).collect();
        let mut psi = StateVector::zero(2 * n)?;
        // the environment is empty here, so the strings through odd qubits are trivial
        psi.apply_circuit(&prep.embed(2 * n, &map)?)?;
        psi
    } else {
        let s = system_state(config)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (2 * n)];
        for (i, a) in s.amps.iter().enumerate() {
            let spread = (0..n).filter(|j| i >> j & 1 == 1).fold(0usize, |acc, j| acc | 1 << sys(j));
            amps[spread] = *a;
        }
        StateVector::from_amplitudes(amps)?
    };
    if config.environment == EnvironmentFill::Full {
        let mut fill = Circuit::new(2 * n);
        for j in 0..n {
            fill.push(Gate::X(env(j)))?;
        }
        for i in (0..n).filter(|i| (n - i) % 2 == 1) {
            fill.push(Gate::Z(sys(i)))?;
        }
        psi.apply_circuit(&fill)?;
    }
    Ok(psi)
}

/// Hopping on even bonds, then odd bonds, then the density interaction, for
/// the ring whose site `j` lives on mode `site(j)`. Factors are `e^{i·dt·term}`.
pub(crate) fn system_trotter_factors(amps: &mut [Complex64], config: &ProtocolConfig, dt: f64, site: impl Fn(usize) -> usize) {
    let n = config.sites;
    let bonds = (0..n).step_by(2).chain((1..n).step_by(2));
    for j in bonds {
        hop(amps, site(j), site((j + 1) % n), config.nu * dt);
    }
    if config.v != 0.0 {
        for j in 0..n {
            mask_phase(amps, 1 << site(j) | 1 << site((j + 1) % n), config.v * dt);
        }
    }
}

/// One Trotter step of `e^{iH·dt}` on the `2N`-qubit state: system hopping and
/// interaction, then the coupling, then the environment phase.
pub fn trotter_step(amps: &mut [Complex64], config: &ProtocolConfig, omega: f64, dt: f64) {
    system_trotter_factors(amps, config, dt, sys);
    for j in 0..config.sites {
        hop(amps, sys(j), env(j), config.epsilon / 2.0 * dt);
    }
    for j in 0..config.sites {
        mask_phase(amps, 1 << env(j), omega * dt);
    }
}

fn uses_fft_readout(config: &ProtocolConfig) -> Result<bool> {
    let compilable = FftPlan::radix_for(config.sites).is_some();
    match config.readout {
        Readout::Auto => Ok(compilable),
        Readout::Direct => Ok(false),
        Readout::Fft if compilable => Ok(true),
        Readout::Fft => Err(Error::InvalidConfig("`readout`: fft needs a power-of-2 or power-of-3 size".into())),
    }
}

/// 2-way interleave of system and environment, then the FFFT on the
/// environment block `[N, 2N)`.
pub fn readout_circuit(config: &ProtocolConfig) -> Result<Circuit> {
    let n = config.sites;
    let il = interleave_circuit(&interleave_permutation(2 * n, 2)?, radix2_strategy(config.interleave))?;
    let plan = fft_plan(n, config.interleave)?;
    let map: Vec<usize> = (n..2 * n).collect();
    il.then(&compile_fft(&plan)?.embed(2 * n, &map)?)
}

/// `⟨n(k)⟩` on the environment for every momentum.
fn environment_occupations(psi: &StateVector, config: &ProtocolConfig, readout: Option<&Circuit>) -> Result<Vec<f64>> {
    let n = config.sites;
    match readout {
        Some(c) => {
            let mut out = psi.clone();
            out.apply_circuit(c)?;
            Ok((0..n).map(|m| (1.0 - out.expect_z(n + m)) / 2.0).collect())
        }
        None => {
            let lowered: Vec<Vec<Complex64>> = (0..n).map(|a| annihilate(psi.amplitudes(), env(a))).collect();
            let corr = |a: usize, b: usize| -> Complex64 { lowered[a].iter().zip(&lowered[b]).map(|(x, y)| x.conj() * y).sum() };
            let mut c = vec![vec![Complex64::new(0.0, 0.0); n]; n];
            for a in 0..n {
                for b in a..n {
                    c[a][b] = corr(a, b);
                    c[b][a] = c[a][b].conj();
                }
            }
            Ok(config
                .momenta()
                .iter()
                .map(|&k| {
                    let s: Complex64 = (0..n)
                        .flat_map(|a| (0..n).map(move |b| (a, b)))
                        .map(|(a, b)| Complex64::from_polar(1.0, k * (a as f64 - b as f64)) * c[a][b])
                        .sum();
                    s.re / n as f64
                })
                .collect())
        }
    }
}

/// Runs the protocol on `2N ≤ 20` qubits for every ω in the config.
///
/// `trotter_steps = 0` evolves exactly (Lanczos on the many-body state).
/// Values are `⟨n(k)⟩` for an empty environment and `⟨1 − n(k)⟩` for a full one.
pub fn run_circuit_protocol(config: &ProtocolConfig) -> Result<SpectralGrid> {
    let psi0 = prepare_initial_state(config)?;
    let readout = if uses_fft_readout(config)? { Some(readout_circuit(config)?) } else { None };
    let omegas = config.omegas();
    let columns: Vec<Vec<f64>> = omegas
        .par_iter()
        .map(|&w| -> Result<Vec<f64>> {
            let mut psi = psi0.clone();
            if config.trotter_steps == 0 {
                let out = full_hamiltonian(config, w).evolve(psi.amplitudes(), config.t);
                psi = StateVector::from_amplitudes(out)?;
            } else {
                let dt = config.t / config.trotter_steps as f64;
                for _ in 0..config.trotter_steps {
                    trotter_step(psi.amplitudes_mut(), config, w, dt);
                }
            }
            let nk = environment_occupations(&psi, config, readout.as_ref())?;
            Ok(match config.environment {
                EnvironmentFill::Empty => nk,
                EnvironmentFill::Full => nk.into_iter().map(|x| 1.0 - x).collect(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(SpectralGrid::from_columns(config.momenta(), omegas, columns, Method::Circuit).with_config(config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{nk_exact_free, nk_gaussian};
    use approx::assert_abs_diff_eq;

    fn cfg(n: usize) -> ProtocolConfig {
        let mut c = ProtocolConfig::new(n, 0.6, 2.0, 1.0).with_omegas(vec![-1.3, 0.2, 1.1]);
        c.initial_state = InitialState::Occupations((0..n).map(|m| if m == 1 || m == 2 { 1.0 } else { 0.0 }).collect());
        c
    }

    #[test]
    fn filled_environment_matches_fermionic_creation() {
        for n in [3, 4] {
            let mut c = cfg(n);
            c.preparation = Preparation::Exact;
            let empty = prepare_initial_state(&c).unwrap();
            c.environment = EnvironmentFill::Full;
            let full = prepare_initial_state(&c).unwrap();
            let mut amps = empty.amplitudes().to_vec();
            for j in (0..n).rev() {
                amps = create(&amps, env(j));
            }
            let ov: Complex64 = amps.iter().zip(full.amplitudes()).map(|(a, b)| a.conj() * b).sum();
            assert_abs_diff_eq!(ov.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn fft_and_exact_preparation_agree() {
        for n in [4, 3] {
            let mut c = cfg(n);
            c.preparation = Preparation::Fft;
            let a = prepare_initial_state(&c).unwrap();
            c.preparation = Preparation::Exact;
            let b = prepare_initial_state(&c).unwrap();
            assert_abs_diff_eq!(a.inner(&b).norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_evolution_matches_gaussian_both_readouts() {
        for (n, env_fill) in [(4, EnvironmentFill::Empty), (3, EnvironmentFill::Full), (4, EnvironmentFill::Full)] {
            let mut c = cfg(n);
            c.environment = env_fill;
            let g = nk_gaussian(&c).unwrap();
            for r in [Readout::Fft, Readout::Direct] {
                c.readout = r;
                let p = run_circuit_protocol(&c).unwrap();
                assert!(p.max_abs_diff(&g).unwrap() < 1e-10, "{n} {env_fill:?} {r:?}: {}", p.max_abs_diff(&g).unwrap());
            }
        }
    }

    #[test]
    fn trotter_converges() {
        let mut c = cfg(4);
        let exact = nk_exact_free(&c).unwrap();
        let mut last = f64::INFINITY;
        for s in [5, 20, 80] {
            c.trotter_steps = s;
            let e = run_circuit_protocol(&c).unwrap().max_abs_diff(&exact).unwrap();
            assert!(e < last, "{s}: {e}");
            last = e;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn interacting_ground_state_is_loaded() {
        let mut c = ProtocolConfig::new(4, 0.3, 1.0, -1.0).with_omegas(vec![0.5]);
        c.v = 2.0;
        let s = system_state(&c).unwrap();
        let psi = prepare_initial_state(&c).unwrap();
        let occ: f64 = (0..4).map(|j| (1.0 - psi.expect_z(sys(j))) / 2.0).sum();
        assert_abs_diff_eq!(occ, s.particles as f64, epsilon = 1e-12);
        assert!(c.clone().validate().is_ok());
        c.preparation = Preparation::Fft;
        assert!(prepare_initial_state(&c).is_err());
    }

    #[test]
    fn size_cap() {
        let c = ProtocolConfig::new(11, 0.3, 1.0, 1.0);
        assert!(matches!(run_circuit_protocol(&c), Err(Error::TooManyQubits { .. })));
    }
}
