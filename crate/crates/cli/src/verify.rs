//! Oracle-equivalence suite behind `envspec verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use envspec::czopt::{decimate, verify_equivalence, CzGraph, DEFAULT_DEPTH_PENALTY};
use envspec::fft::{
    base_fft, compile_fft, imported_listing, interleave_circuit, interleave_cz_graph, interleave_permutation, FftPlan,
    InterleaveStrategy,
};
use envspec::protocol::{
    nk_exact_free, nk_gaussian, run_circuit_protocol, strong_coupling_leading, EnvironmentFill, InitialState,
    ProtocolConfig,
};
use envspec::sim::{dense_transfer_matrix, dft_matrix, equal_up_to_phase, extract_mode_transform, phase_distance, StabilizerTableau, StateVector};

type Check = anyhow::Result<(bool, String)>;

/// Runs every check, printing one line each. Returns whether all passed.
pub fn run(quick: bool) -> bool {
    let checks: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("fft transfer matrices", Box::new(move || fft_vs_dft(quick))),
        ("fft dense single-excitation", Box::new(fft_dense)),
        ("base-case gate counts", Box::new(base_counts)),
        ("27-mode interleave tableaux", Box::new(interleave_27)),
        ("graph decimation", Box::new(decimation)),
        ("free-fermion oracles", Box::new(move || free_oracles(quick))),
        ("circuit protocol vs gaussian", Box::new(circuit_vs_gaussian)),
        ("strong coupling at nu = 0", Box::new(strong_coupling)),
    ];
    let mut all = true;
    for (name, f) in checks {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let (ok, detail) = match result {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => (false, format!("error: {e:#}")),
            Err(_) => (false, "panicked".to_string()),
        };
        all &= ok;
        println!("{} {name}: {detail} ({:.2}s)", if ok { "ok  " } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    println!("{}", if all { "all checks passed" } else { "some checks failed" });
    all
}

fn fft_vs_dft(quick: bool) -> Check {
    let mut sizes = vec![(2, 2), (3, 3), (4, 2), (8, 2), (9, 3), (16, 2)];
    if !quick {
        sizes.extend([(27, 3), (32, 2), (81, 3)]);
    }
    let mut worst: f64 = 0.0;
    let mut plans = 0;
    for (n, r) in sizes {
        for s in InterleaveStrategy::ALL {
            let Ok(plan) = FftPlan::new(n, r, s) else { continue };
            let t = extract_mode_transform(&compile_fft(&plan)?)?;
            worst = worst.max(phase_distance(&t.0, &dft_matrix(n)));
            plans += 1;
        }
    }
    Ok((worst < 1e-9, format!("{plans} plans, max deviation {worst:.1e}")))
}

/// Transfer matrices read off the dense statevector, independent of the
/// single-particle extraction.
fn fft_dense() -> Check {
    let mut worst: f64 = 0.0;
    for (n, r) in [(2, 2), (3, 3), (4, 2), (8, 2), (9, 3)] {
        for s in InterleaveStrategy::ALL {
            let Ok(plan) = FftPlan::new(n, r, s) else { continue };
            let t = dense_transfer_matrix(&compile_fft(&plan)?)?.0;
            worst = worst.max(phase_distance(&t, &dft_matrix(n)));
        }
    }
    Ok((worst < 1e-9, format!("max deviation {worst:.1e}")))
}

fn base_counts() -> Check {
    let (f2, f3) = (base_fft(2)?.two_qubit_count(), base_fft(3)?.two_qubit_count());
    Ok((f2 == 2 && f3 == 6, format!("F2 {f2}, F3 {f3}")))
}

fn interleave_27() -> Check {
    let p = interleave_permutation(27, 3)?;
    let imported = StabilizerTableau::of(&interleave_circuit(&p, InterleaveStrategy::ImportedSequence)?)?;
    let ladder = StabilizerTableau::of(&interleave_circuit(&p, InterleaveStrategy::CxLadder)?)?;
    let graph = StabilizerTableau::of(&interleave_cz_graph(&p).to_circuit().with_relabel(p.forward().to_vec())?)?;
    let listing = imported_listing(27).expect("shipped");
    Ok((
        imported == ladder && ladder == graph && listing.two_qubit_count() == 60,
        format!("listing {} gates, tableaux equal {}", listing.two_qubit_count(), imported == ladder && ladder == graph),
    ))
}

fn decimation() -> Check {
    let g9 = interleave_cz_graph(&interleave_permutation(9, 3)?);
    let out = decimate(&g9, DEFAULT_DEPTH_PENALTY);
    let same = StabilizerTableau::of(&out)? == StabilizerTableau::of(&imported_listing(9).expect("shipped"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0;
    for _ in 0..30 {
        let n = rng.gen_range(2..=8);
        let mut g = CzGraph::new(n);
        for _ in 0..rng.gen_range(0..=16) {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j {
                g.toggle(i, j);
            }
        }
        let c = decimate(&g, DEFAULT_DEPTH_PENALTY);
        let dense = equal_up_to_phase(&StateVector::unitary(&c)?, &StateVector::unitary(&g.to_circuit())?, 1e-10);
        if !dense || !verify_equivalence(&c, &g)? || c.two_qubit_count() > g.num_edges() {
            bad += 1;
        }
    }
    Ok((
        same && out.two_qubit_count() <= 9 && bad == 0,
        format!("9-qubit graph -> {} gates (listing equivalent {same}), random failures {bad}/30", out.two_qubit_count()),
    ))
}

fn free_oracles(quick: bool) -> Check {
    let sizes: &[usize] = if quick { &[8, 50] } else { &[8, 50, 200] };
    let mut worst: f64 = 0.0;
    for &n in sizes {
        for env in [EnvironmentFill::Empty, EnvironmentFill::Full] {
            let mut c = ProtocolConfig::new(n, 0.5, 5.0, 1.0);
            c.environment = env;
            worst = worst.max(nk_gaussian(&c)?.max_abs_diff(&nk_exact_free(&c)?)?);
        }
    }
    Ok((worst < 1e-10, format!("closed form vs gaussian, N in {sizes:?}: {worst:.1e}")))
}

fn circuit_vs_gaussian() -> Check {
    let mut worst: f64 = 0.0;
    for (n, env) in [(4, EnvironmentFill::Empty), (4, EnvironmentFill::Full), (3, EnvironmentFill::Empty)] {
        let mut c = ProtocolConfig::new(n, 0.6, 3.0, -1.0).with_omegas(vec![-2.0, -0.5, 0.7, 2.0]);
        c.environment = env;
        worst = worst.max(run_circuit_protocol(&c)?.max_abs_diff(&nk_gaussian(&c)?)?);
    }
    Ok((worst < 1e-9, format!("exact-time circuit vs gaussian: {worst:.1e}")))
}

fn strong_coupling() -> Check {
    let rho = vec![1.0, 0.25, 0.0, 0.6, 1.0];
    let mut c = ProtocolConfig::new(5, 1.3, 4.0, 0.0);
    c.initial_state = InitialState::Occupations(rho.clone());
    let d = nk_gaussian(&c)?.max_abs_diff(&strong_coupling_leading(&c, &rho)?)?;
    Ok((d < 1e-12, format!("max deviation {d:.1e}")))
}
