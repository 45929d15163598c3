//! Radix-2 and radix-3 fast fermionic Fourier transform.
//!
//! `compile_fft` returns a circuit `F` with `F c_j F† = N^{-1/2} Σ_ℓ e^{2πi jℓ/N} c_ℓ`
//! up to a global phase.

mod interleave;

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

use crate::circuit::{Circuit, Gate};
use crate::{Error, Result};

pub use interleave::{
    fswap_network, imported_listing, interleave_circuit, interleave_cz_graph, interleave_permutation,
    InterleavePermutation, InterleaveStrategy,
};

pub const SUPPORTED_RADICES: [usize; 2] = [2, 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FftPlan {
    pub num_modes: usize,
    pub radix: usize,
    pub strategy: InterleaveStrategy,
}

impl FftPlan {
    pub fn new(num_modes: usize, radix: usize, strategy: InterleaveStrategy) -> Result<Self> {
        let plan = Self { num_modes, radix, strategy };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if !SUPPORTED_RADICES.contains(&self.radix) {
            return Err(Error::UnsupportedRadix(self.radix));
        }
        let mut n = self.num_modes;
        if n < self.radix {
            return Err(Error::NotAPower { modes: self.num_modes, radix: self.radix });
        }
        while n > 1 {
            if n % self.radix != 0 {
                return Err(Error::NotAPower { modes: self.num_modes, radix: self.radix });
            }
            n /= self.radix;
        }
        if self.strategy == InterleaveStrategy::ImportedSequence {
            // every interleave level needs a listing
            let mut len = self.num_modes;
            while len > self.radix {
                if self.radix != 3 || imported_listing(len).is_none() {
                    return Err(Error::NoImportedSequence { modes: len, radix: self.radix });
                }
                len /= self.radix;
            }
        }
        Ok(())
    }

    /// Smallest supported radix that makes `num_modes` a power, preferring 2.
    pub fn radix_for(num_modes: usize) -> Option<usize> {
        SUPPORTED_RADICES.into_iter().find(|&r| FftPlan::new(num_modes, r, InterleaveStrategy::CxLadder).is_ok())
    }
}

/// Base transform on `n ∈ {2, 3}` adjacent modes.
///
/// `F₂ = S₀ · Givens₀₁(π/4) · S₀† · Z₁` in circuit order. `F₃` is the six
/// two-qubit-gate sequence with `cos β = 1/√3`, mirrored (S ↔ S†, Givens
/// angles negated) so that its transfer matrix is `DFT₃` rather than its
/// complex conjugate.
pub fn base_fft(n: usize) -> Result<Circuit> {
    let gates = match n {
        2 => vec![Gate::S(0), Gate::Givens(0, 1, FRAC_PI_4), Gate::Sdg(0), Gate::Z(1)],
        3 => {
            let beta = (1.0f64 / 3.0).sqrt().acos();
            vec![
                Gate::Sdg(1),
                Gate::Givens(1, 2, -FRAC_PI_4),
                Gate::S(1),
                Gate::Sdg(0),
                Gate::Givens(0, 1, -beta),
                Gate::S(0),
                Gate::Givens(1, 2, -FRAC_PI_4),
                Gate::Z(1),
                Gate::Sdg(2),
            ]
        }
        other => return Err(Error::UnsupportedRadix(other)),
    };
    Circuit::from_gates(n, gates)
}

/// Recursive FFFT. On a block of `L = n·M` modes:
///
/// 1. interleave, so each residue class mod `n` is contiguous;
/// 2. FFFT on each class block of `M` modes;
/// 3. twiddle `e^{2πi bℓ/L}` on position `ℓM + b`;
/// 4. de-interleave, so the `n` modes of each column `b` are adjacent;
/// 5. `F_n` on each column;
/// 6. interleave again, sending output `aM + b` to its place.
pub fn compile_fft(plan: &FftPlan) -> Result<Circuit> {
    plan.validate()?;
    fft_block(plan.num_modes, plan.radix, plan.strategy)
}

fn fft_block(len: usize, n: usize, strategy: InterleaveStrategy) -> Result<Circuit> {
    if len == n {
        return base_fft(n);
    }
    let m = len / n;
    let sigma = interleave_permutation(len, n)?;
    let il = interleave_circuit(&sigma, strategy)?;
    let de = interleave_circuit(&sigma.inverted(), strategy)?;

    let mut c = il.clone();
    let sub = fft_block(m, n, strategy)?;
    for l in 0..n {
        let map: Vec<usize> = (l * m..(l + 1) * m).collect();
        c = c.then(&sub.embed(len, &map)?)?;
    }
    let mut tw = Circuit::new(len);
    for l in 1..n {
        for b in 1..m {
            // Rz(α) puts e^{-iα} on the occupied mode relative to the vacuum
            tw.push(Gate::Rz(l * m + b, -2.0 * PI * (l * b) as f64 / len as f64))?;
        }
    }
    c = c.then(&tw)?.then(&de)?;
    let base = base_fft(n)?;
    for b in 0..m {
        let map: Vec<usize> = (b * n..(b + 1) * n).collect();
        c = c.then(&base.embed(len, &map)?)?;
    }
    c.then(&il)
}

/// Prepares the Slater determinant with momenta `2πk/N` (`k ∈ filled`) occupied,
/// from the vacuum: X on the filled momentum modes, then the inverse FFFT.
pub fn ground_state_prep_circuit(num_modes: usize, filled: &[usize], strategy: InterleaveStrategy) -> Result<Circuit> {
    let radix = FftPlan::radix_for(num_modes).ok_or(Error::NotAPower { modes: num_modes, radix: 2 })?;
    let fft = compile_fft(&FftPlan::new(num_modes, radix, strategy)?)?;
    let mut c = Circuit::new(num_modes);
    for &k in filled {
        c.push(Gate::X(k))?;
    }
    c.then(&fft.inverse())
}
