//! The system-environment protocol for spectral functions.
//!
//! A ring of `N` sites is coupled site by site to an `N`-site environment,
//! evolved with `e^{iHt}` and the environment momentum occupations
//! `n(k) = d†(k) d(k)`, `d(k) = N^{-1/2} Σ_j e^{-ijk} d_j`, are read out.
//! Everything here produces a [`SpectralGrid`] over `k = 2πm/N` and a list of
//! frequencies `ω`.
//!
//! Spectral weights follow the protocol's own sign: for free fermions
//! `A⁺(k, ω) = 2π δ(ω − 2ν cos k) ρ_k`, i.e. a line sits at the energy released
//! by removing a particle (`A⁺`) or spent adding one (`A⁻`).

mod baseline;
mod circuit;
mod free;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::fft::InterleaveStrategy;
use crate::{Error, Result};

pub use baseline::{
    compare_trotter, dynamical_correlation_baseline, lehmann_lines, lehmann_reference, least_squares_error,
    ErrorSummary, TrotterComparison, TrotterRow,
};
pub use circuit::{prepare_initial_state, run_circuit_protocol, system_state, trotter_step, SystemState};
pub use free::{
    broadening_and_ghosts, convolve_kernel, free_lines, ground_state_occupations, nk_exact_free, nk_gaussian,
    strong_coupling_leading, Broadening, Kernel, Spectrum,
};

/// Default frequency window when a config does not give one: 26 points over
/// `[-3, 3]·max(|ν|, 1)`.
pub const DEFAULT_OMEGA_POINTS: usize = 26;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvironmentFill {
    #[default]
    Empty,
    Full,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// Ground state of `H_sys` (free: all `2ν cos k < 0` filled).
    #[default]
    GroundState,
    /// Momentum occupations `ρ_k`, indexed by `m` with `k = 2πm/N`.
    Occupations(Vec<f64>),
}

/// How the circuit protocol loads the system state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preparation {
    /// FFFT when the system is free and `N` is a power of 2 or 3.
    #[default]
    Auto,
    Fft,
    /// Amplitudes from exact diagonalisation.
    Exact,
}

/// How the circuit protocol reads `n(k)` off the environment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    #[default]
    Auto,
    /// 2-way interleave, FFFT on the environment, Z expectations.
    Fft,
    /// `Σ e^{ik(a-b)} ⟨d_a† d_b⟩ / N` from the state directly.
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OmegaGrid {
    Single(f64),
    List(Vec<f64>),
    Range { min: f64, max: f64, count: usize },
}

impl OmegaGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OmegaGrid::Single(w) => vec![*w],
            OmegaGrid::List(v) => v.clone(),
            OmegaGrid::Range { min, max, count } => linspace(*min, *max, *count),
        }
    }
}

pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![min],
        _ => (0..count).map(|i| min + (max - min) * i as f64 / (count - 1) as f64).collect(),
    }
}

fn default_nu() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Number of system sites `N` (the environment has as many).
    pub sites: usize,
    pub epsilon: f64,
    /// Frequencies to scan; defaults to [`DEFAULT_OMEGA_POINTS`] over the band.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaGrid>,
    /// Total evolution time.
    pub t: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Nearest-neighbour density interaction `V Σ n_j n_{j+1}`.
    #[serde(default, alias = "V")]
    pub v: f64,
    /// 0 means continuous-time evolution.
    #[serde(default)]
    pub trotter_steps: usize,
    #[serde(default)]
    pub environment: EnvironmentFill,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub interleave: InterleaveStrategy,
    #[serde(default)]
    pub preparation: Preparation,
    #[serde(default)]
    pub readout: Readout,
}

impl ProtocolConfig {
    /// Free ring with the ground state, empty environment and the default ω grid.
    pub fn new(sites: usize, epsilon: f64, t: f64, nu: f64) -> Self {
        Self {
            sites,
            epsilon,
            omega: None,
            t,
            nu,
            v: 0.0,
            trotter_steps: 0,
            environment: EnvironmentFill::Empty,
            initial_state: InitialState::GroundState,
            interleave: InterleaveStrategy::CxLadder,
            preparation: Preparation::Auto,
            readout: Readout::Auto,
        }
    }

    pub fn with_omegas(mut self, omegas: Vec<f64>) -> Self {
        self.omega = Some(OmegaGrid::List(omegas));
        self
    }

    pub fn omegas(&self) -> Vec<f64> {
        match &self.omega {
            Some(g) => g.values(),
            None => {
                let w = 3.0 * self.nu.abs().max(1.0);
                linspace(-w, w, DEFAULT_OMEGA_POINTS)
            }
        }
    }

    pub fn momenta(&self) -> Vec<f64> {
        momenta(self.sites)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, why: &str| Err(Error::InvalidConfig(format!("`{key}`: {why}")));
        if self.sites < 2 {
            return bad("sites", "need at least 2 sites");
        }
        for (key, x) in [("epsilon", self.epsilon), ("t", self.t), ("nu", self.nu), ("v", self.v)] {
            if !x.is_finite() {
                return bad(key, "must be finite");
            }
        }
        if self.t < 0.0 {
            return bad("t", "must be nonnegative");
        }
        let omegas = self.omegas();
        if omegas.is_empty() || omegas.iter().any(|w| !w.is_finite()) {
            return bad("omega", "need at least one finite frequency");
        }
        if let InitialState::Occupations(rho) = &self.initial_state {
            if rho.len() != self.sites {
                return bad("initial_state", &format!("expected {} occupations, got {}", self.sites, rho.len()));
            }
            if rho.iter().any(|r| !(0.0..=1.0).contains(r)) {
                return bad("initial_state", "occupations must lie in [0, 1]");
            }
        }
        Ok(())
    }

    pub(crate) fn require_free(&self) -> Result<()> {
        if self.v != 0.0 {
            return Err(Error::Interacting(self.v));
        }
        Ok(())
    }
}

pub fn momenta(n: usize) -> Vec<f64> {
    (0..n).map(|m| 2.0 * PI * m as f64 / n as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactFree,
    Gaussian,
    StrongCoupling,
    Kernel,
    Circuit,
    DynamicalCorrelation,
    Lehmann,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExactFree => "exact-free",
            Method::Gaussian => "gaussian",
            Method::StrongCoupling => "strong-coupling",
            Method::Kernel => "kernel",
            Method::Circuit => "circuit",
            Method::DynamicalCorrelation => "dynamical-correlation",
            Method::Lehmann => "lehmann",
        }
    }
}

/// Samples over `(k, ω)`; `values[(ik, iw)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub k: Vec<f64>,
    pub omega: Vec<f64>,
    pub values: DMatrix<f64>,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ProtocolConfig>,
}

impl SpectralGrid {
    pub fn zeros(k: Vec<f64>, omega: Vec<f64>, method: Method) -> Self {
        let values = DMatrix::zeros(k.len(), omega.len());
        Self { k, omega, values, method, config: None }
    }

    /// Build from one column per frequency.
    pub fn from_columns(k: Vec<f64>, omega: Vec<f64>, columns: Vec<Vec<f64>>, method: Method) -> Self {
        let values = DMatrix::from_fn(k.len(), omega.len(), |i, j| columns[j][i]);
        Self { k, omega, values, method, config: None }
    }

    pub fn with_config(mut self, config: &ProtocolConfig) -> Self {
        self.config = Some(config.clone());
        self
    }

    pub fn get(&self, ik: usize, iw: usize) -> f64 {
        self.values[(ik, iw)]
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// Samples below `-tol`.
    pub fn negative_samples(&self, tol: f64) -> usize {
        self.values.iter().filter(|&&x| x < -tol).count()
    }

    pub fn max_abs_diff(&self, other: &SpectralGrid) -> Result<f64> {
        if self.values.shape() != other.values.shape() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), found: other.values.len() });
        }
        Ok((&self.values - &other.values).amax())
    }

    /// Pointwise sum, keeping this grid's axes and method.
    pub fn plus(&self, other: &SpectralGrid) -> Result<SpectralGrid> {
        if self.values.shape() != other.values.shape() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), found: other.values.len() });
        }
        let mut out = self.clone();
        out.values += &other.values;
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> SpectralGrid {
        let mut out = self.clone();
        out.values *= s;
        out
    }

    /// Rows `(k, ω, value)` in `k`-major order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.k.len()).flat_map(move |i| (0..self.omega.len()).map(move |j| (self.k[i], self.omega[j], self.get(i, j))))
    }
}

/// `A⁺` and `A⁻` parts of a spectral quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPair {
    pub plus: SpectralGrid,
    pub minus: SpectralGrid,
}

impl SpectralPair {
    pub fn combined(&self) -> SpectralGrid {
        self.plus.plus(&self.minus).expect("parts share a shape")
    }
}
