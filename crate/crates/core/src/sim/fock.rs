//! Many-body fermionic primitives on dense amplitudes.
//!
//! Bit `m` of a basis index is the occupation of Jordan-Wigner mode `m`;
//! `a_m` picks up `(-1)^{# occupied modes below m}`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const PAR_LEN: usize = 1 << 14;

fn parity_between(idx: usize, a: usize, b: usize) -> bool {
    let (lo, hi) = (a.min(b), a.max(b));
    let mask = ((1usize << hi) - 1) & !((1usize << (lo + 1)) - 1);
    (idx & mask).count_ones() % 2 == 1
}

fn parity_below(idx: usize, m: usize) -> bool {
    (idx & ((1usize << m) - 1)).count_ones() % 2 == 1
}

/// `exp(iθ (a_a† a_b + a_b† a_a))`.
pub fn hop(amps: &mut [Complex64], a: usize, b: usize, theta: f64) {
    let (ba, bb) = (1usize << a, 1usize << b);
    let (c, s) = (theta.cos(), theta.sin());
    // pair up index with only `a` set and index with only `b` set
    let updates: Vec<(usize, usize, Complex64, Complex64)> = (0..amps.len())
        .filter(|&i| i & ba != 0 && i & bb == 0)
        .map(|i| {
            let j = i ^ ba ^ bb;
            let sign = if parity_between(i, a, b) { -1.0 } else { 1.0 };
            let (x, y) = (amps[i], amps[j]);
            (i, j, c * x + I * (sign * s) * y, I * (sign * s) * x + c * y)
        })
        .collect();
    for (i, j, x, y) in updates {
        amps[i] = x;
        amps[j] = y;
    }
}

/// Multiply every amplitude where all modes in `mask` are occupied by `e^{iφ}`.
pub fn mask_phase(amps: &mut [Complex64], mask: usize, phi: f64) {
    let p = Complex64::from_polar(1.0, phi);
    let f = |(i, x): (usize, &mut Complex64)| {
        if i & mask == mask {
            *x *= p;
        }
    };
    if amps.len() >= PAR_LEN {
        amps.par_iter_mut().enumerate().for_each(f);
    } else {
        amps.iter_mut().enumerate().for_each(f);
    }
}

/// `a_m |ψ⟩`.
pub fn annihilate(amps: &[Complex64], m: usize) -> Vec<Complex64> {
    let bit = 1usize << m;
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (i, x) in amps.iter().enumerate() {
        if i & bit != 0 {
            out[i ^ bit] = if parity_below(i, m) { -x } else { *x };
        }
    }
    out
}

/// `a_m† |ψ⟩`.
pub fn create(amps: &[Complex64], m: usize) -> Vec<Complex64> {
    let bit = 1usize << m;
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (i, x) in amps.iter().enumerate() {
        if i & bit == 0 {
            out[i | bit] = if parity_below(i, m) { -x } else { *x };
        }
    }
    out
}

/// Number-conserving Hamiltonian `Σ h_ab a_a† a_b + Σ V_ab n_a n_b` with real coefficients.
#[derive(Debug, Clone, Default)]
pub struct FermionHamiltonian {
    pub num_modes: usize,
    /// `(a, b, h_ab)`; include both orderings for a Hermitian hopping.
    pub quadratic: Vec<(usize, usize, f64)>,
    /// `(a, b, V)` density-density terms, `a ≠ b`.
    pub density: Vec<(usize, usize, f64)>,
}

impl FermionHamiltonian {
    pub fn new(num_modes: usize) -> Self {
        Self { num_modes, ..Default::default() }
    }

    /// Add `t (a_a† a_b + a_b† a_a)`, or `t n_a` if `a == b`.
    pub fn add_hopping(&mut self, a: usize, b: usize, t: f64) {
        self.quadratic.push((a, b, t));
        if a != b {
            self.quadratic.push((b, a, t));
        }
    }

    pub fn add_density(&mut self, a: usize, b: usize, v: f64) {
        self.density.push((a, b, v));
    }

    /// Matrix element action on one basis state: calls `f(target, coefficient)`.
    fn act_on_basis(&self, i: usize, mut f: impl FnMut(usize, f64)) {
        let mut diag = 0.0;
        for &(a, b, h) in &self.quadratic {
            if a == b {
                if i >> a & 1 == 1 {
                    diag += h;
                }
            } else if i >> b & 1 == 1 && i >> a & 1 == 0 {
                let j = i ^ (1 << a) ^ (1 << b);
                let sign = if parity_between(i, a, b) { -1.0 } else { 1.0 };
                f(j, sign * h);
            }
        }
        for &(a, b, v) in &self.density {
            if i >> a & 1 == 1 && i >> b & 1 == 1 {
                diag += v;
            }
        }
        if diag != 0.0 {
            f(i, diag);
        }
    }

    /// `H |ψ⟩` on the full `2^num_modes` space.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        // gather form: (Hψ)_j = Σ_i H_ji ψ_i and H is real symmetric, so H_ji = H_ij
        let gather = |j: usize| {
            let mut acc = Complex64::new(0.0, 0.0);
            self.act_on_basis(j, |i, h| acc += h * amps[i]);
            acc
        };
        if amps.len() >= PAR_LEN {
            out.par_iter_mut().enumerate().for_each(|(j, o)| *o = gather(j));
        } else {
            out.iter_mut().enumerate().for_each(|(j, o)| *o = gather(j));
        }
        out
    }

    /// Dense matrix restricted to the span of `basis` (sorted basis indices).
    pub fn sector_matrix(&self, basis: &[usize]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(basis.len(), basis.len());
        for (col, &i) in basis.iter().enumerate() {
            self.act_on_basis(i, |j, h| {
                if let Ok(row) = basis.binary_search(&j) {
                    m[(row, col)] += h;
                }
            });
        }
        m
    }

    /// `e^{iHt}|ψ⟩` by Lanczos, separately in every particle-number sector
    /// that `ψ` populates.
    pub fn evolve(&self, amps: &[Complex64], t: f64) -> Vec<Complex64> {
        let mut populated = vec![false; self.num_modes + 1];
        for (i, a) in amps.iter().enumerate() {
            if *a != Complex64::new(0.0, 0.0) {
                populated[i.count_ones() as usize] = true;
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (p, _) in populated.iter().enumerate().filter(|(_, &on)| on) {
            let basis = sector_basis(self.num_modes, p);
            let m = SparseSector::new(self, &basis);
            let v: Vec<Complex64> = basis.iter().map(|&i| amps[i]).collect();
            let w = lanczos_expm(|x| m.apply(x), &v, t);
            for (&i, x) in basis.iter().zip(w) {
                out[i] = x;
            }
        }
        out
    }
}

/// `H` restricted to one particle-number sector, in compressed-row form.
struct SparseSector {
    offsets: Vec<usize>,
    entries: Vec<(usize, f64)>,
}

impl SparseSector {
    fn new(h: &FermionHamiltonian, basis: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(basis.len() + 1);
        let mut entries = Vec::new();
        offsets.push(0);
        for &i in basis {
            h.act_on_basis(i, |j, x| {
                let col = basis.binary_search(&j).expect("number-conserving term stays in the sector");
                entries.push((col, x));
            });
            offsets.push(entries.len());
        }
        Self { offsets, entries }
    }

    /// Rows hold `H_ji` for fixed `i`; `H` is real symmetric so they are also its columns.
    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let row = |r: usize| -> Complex64 {
            self.entries[self.offsets[r]..self.offsets[r + 1]].iter().map(|&(c, x)| x * v[c]).sum()
        };
        if v.len() >= PAR_LEN {
            (0..v.len()).into_par_iter().map(row).collect()
        } else {
            (0..v.len()).map(row).collect()
        }
    }
}

/// Basis indices with `particles` bits set among `modes`.
pub fn sector_basis(modes: usize, particles: usize) -> Vec<usize> {
    (0..1usize << modes).filter(|i| i.count_ones() as usize == particles).collect()
}

/// Eigenpairs of `h` in one particle-number sector.
pub struct Sector {
    pub basis: Vec<usize>,
    pub eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl Sector {
    pub fn new(h: &FermionHamiltonian, particles: usize) -> Self {
        let basis = sector_basis(h.num_modes, particles);
        let eig = h.sector_matrix(&basis).symmetric_eigen();
        Self { basis, eig }
    }

    /// Index of the lowest eigenvalue.
    pub fn ground(&self) -> usize {
        self.eig.eigenvalues.imin()
    }

    /// Eigenvector `n` embedded in the full space.
    pub fn state(&self, n: usize, dim: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (r, &i) in self.basis.iter().enumerate() {
            out[i] = self.eig.eigenvectors[(r, n)].into();
        }
        out
    }

    /// Overlaps `⟨n|ψ⟩` with every eigenvector.
    pub fn overlaps(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let proj = DVector::from_iterator(self.basis.len(), self.basis.iter().map(|&i| psi[i]));
        let v = self.eig.eigenvectors.map(Complex64::from);
        (v.transpose() * proj).iter().copied().collect()
    }
}

/// Lowest-energy eigenstate over all particle-number sectors.
pub fn ground_state(h: &FermionHamiltonian) -> Result<(f64, usize, Vec<Complex64>)> {
    if h.num_modes > 16 {
        return Err(Error::TooManyQubits { requested: h.num_modes, cap: 16 });
    }
    let dim = 1 << h.num_modes;
    let mut best: Option<(f64, usize, Vec<Complex64>)> = None;
    for p in 0..=h.num_modes {
        let s = Sector::new(h, p);
        let g = s.ground();
        let e = s.eig.eigenvalues[g];
        // strict improvement keeps the smallest particle number on ties
        if best.as_ref().is_none_or(|b| e < b.0 - 1e-10) {
            best = Some((e, p, s.state(g, dim)));
        }
    }
    Ok(best.expect("at least one sector"))
}

/// `e^{i t H} v` for Hermitian `H` given as a matrix-vector product.
pub fn lanczos_expm(apply: impl Fn(&[Complex64]) -> Vec<Complex64>, v: &[Complex64], t: f64) -> Vec<Complex64> {
    const KRYLOV: usize = 40;
    const TOL: f64 = 1e-14;
    let mut psi = v.to_vec();
    if l2(&psi) == 0.0 || t == 0.0 {
        return psi;
    }
    let mut remaining = t;
    let mut dt = t;
    while remaining != 0.0 {
        if dt.abs() > remaining.abs() {
            dt = remaining;
        }
        let nrm = l2(&psi);
        let mut basis: Vec<Vec<Complex64>> = vec![psi.iter().map(|x| x / nrm).collect()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        loop {
            let k = basis.len() - 1;
            let mut w = apply(&basis[k]);
            alpha.push(dot(&basis[k], &w).re);
            for _ in 0..2 {
                for b in &basis {
                    let ov = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(y, x)| *y -= ov * x);
                }
            }
            let bnorm = l2(&w);
            let coeff = tridiag_expm(&alpha, &beta, dt);
            let err = bnorm * coeff[alpha.len() - 1].norm();
            if err < TOL || bnorm < 1e-14 {
                let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
                for (c, b) in coeff.iter().zip(&basis) {
                    out.iter_mut().zip(b).for_each(|(o, x)| *o += c * nrm * x);
                }
                psi = out;
                remaining -= dt;
                break;
            }
            if alpha.len() >= KRYLOV {
                dt /= 2.0;
                break;
            }
            beta.push(bnorm);
            basis.push(w.iter().map(|x| x / bnorm).collect());
        }
    }
    psi
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `e^{i s T} e_1` for the symmetric tridiagonal `T`.
fn tridiag_expm(alpha: &[f64], beta: &[f64], s: f64) -> Vec<Complex64> {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    (0..m)
        .map(|r| {
            (0..m)
                .map(|k| {
                    let v = &eig.eigenvectors;
                    Complex64::from_polar(v[(r, k)] * v[(0, k)], s * eig.eigenvalues[k])
                })
                .sum()
        })
        .collect()
}
