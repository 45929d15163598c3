//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use envspec::czopt::{decimate, verify_equivalence, CzGraph, DEFAULT_DEPTH_PENALTY};
use envspec::fft::{
    base_fft, compile_fft, imported_listing, interleave_circuit, interleave_cz_graph, interleave_permutation, FftPlan,
    InterleaveStrategy,
};
use envspec::protocol::{
    broadening_and_ghosts, compare_trotter, convolve_kernel, free_lines, lehmann_reference, nk_exact_free, nk_gaussian,
    strong_coupling_leading, EnvironmentFill, InitialState, Kernel, ProtocolConfig,
};
use envspec::sim::{dft_matrix, equal_up_to_phase, extract_mode_transform, phase_distance, StabilizerTableau, StateVector};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn fft_correctness() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (n, r) in [(2, 2), (3, 3), (4, 2), (8, 2), (9, 3), (27, 3)] {
        for s in InterleaveStrategy::ALL {
            let Ok(plan) = FftPlan::new(n, r, s) else { continue };
            let c = compile_fft(&plan).map_err(|e| e.to_string())?;
            let t = extract_mode_transform(&c).map_err(|e| e.to_string())?;
            worst = worst.max(phase_distance(&t.0, &dft_matrix(n)));
            cases += 1;
        }
    }
    let el = start.elapsed();
    check(
        worst < 1e-9 && el < Duration::from_secs(10),
        format!("{cases} plans, max |T - e^(ia) DFT| = {worst:.2e}, {}", secs(el)),
    )
}

fn base_counts() -> Outcome {
    let (f2, f3) = (base_fft(2).unwrap().two_qubit_count(), base_fft(3).unwrap().two_qubit_count());
    check(f2 == 2 && f3 == 6, format!("F2 = {f2}, F3 = {f3} two-qubit gates"))
}

fn interleave_27() -> Outcome {
    let start = Instant::now();
    let p = interleave_permutation(27, 3).unwrap();
    let listing = imported_listing(27).unwrap();
    let cx = listing.gates().iter().filter(|g| g.name() == "CX").count();
    let cz = listing.gates().iter().filter(|g| g.name() == "CZ").count();
    let imported = interleave_circuit(&p, InterleaveStrategy::ImportedSequence).unwrap();
    let ladder = interleave_circuit(&p, InterleaveStrategy::CxLadder).unwrap();
    let graph = interleave_cz_graph(&p).to_circuit().with_relabel(p.forward().to_vec()).unwrap();
    let ti = StabilizerTableau::of(&imported).unwrap();
    let tl = StabilizerTableau::of(&ladder).unwrap();
    let tg = StabilizerTableau::of(&graph).unwrap();
    let el = start.elapsed();
    check(
        cx == 26 && cz == 34 && ti == tl && tl == tg && el < Duration::from_secs(1),
        format!(
            "listing {cx} CX + {cz} CZ, ladder {} gates, graph {} edges, tableaux equal: {}, {}",
            ladder.two_qubit_count(),
            interleave_cz_graph(&p).num_edges(),
            ti == tl && tl == tg,
            secs(el)
        ),
    )
}

fn decimation() -> Outcome {
    let g9 = interleave_cz_graph(&interleave_permutation(9, 3).unwrap());
    let out = decimate(&g9, DEFAULT_DEPTH_PENALTY);
    let listing = imported_listing(9).unwrap();
    let same = StabilizerTableau::of(&out).unwrap() == StabilizerTableau::of(&listing).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut bad = 0;
    for _ in 0..50 {
        let n = rng.gen_range(2..=10);
        let want = rng.gen_range(0..=20usize.min(n * (n - 1) / 2));
        let mut g = CzGraph::new(n);
        while g.num_edges() < want {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j && !g.has_edge(i, j) {
                g.toggle(i, j);
            }
        }
        let c = decimate(&g, DEFAULT_DEPTH_PENALTY);
        let dense = equal_up_to_phase(&StateVector::unitary(&c).unwrap(), &StateVector::unitary(&g.to_circuit()).unwrap(), 1e-10);
        if !dense || c.two_qubit_count() > g.num_edges() || !verify_equivalence(&c, &g).unwrap() {
            bad += 1;
        }
    }
    check(
        same && out.two_qubit_count() <= 9 && bad == 0,
        format!("9-qubit graph -> {} gates, matches listing: {same}; random graphs failing: {bad}/50", out.two_qubit_count()),
    )
}

fn oracle_triangle() -> Outcome {
    let start = Instant::now();
    let omegas: Vec<f64> = (0..50).map(|i| -3.0 + 6.0 * i as f64 / 49.0).collect();
    let mut worst: f64 = 0.0;
    for env in [EnvironmentFill::Empty, EnvironmentFill::Full] {
        let mut c = ProtocolConfig::new(50, 0.5, 5.0, 1.0).with_omegas(omegas.clone());
        c.environment = env;
        worst = worst.max(nk_gaussian(&c).unwrap().max_abs_diff(&nk_exact_free(&c).unwrap()).unwrap());
    }
    let mut fig2: f64 = 0.0;
    let omegas: Vec<f64> = (0..41).map(|i| -3.0 + 6.0 * i as f64 / 40.0).collect();
    for eps in [0.01, PI / 5.0, 1.5 * PI / 5.0] {
        let c = ProtocolConfig::new(200, eps, 5.0, 1.0).with_omegas(omegas.clone());
        fig2 = fig2.max(nk_gaussian(&c).unwrap().max_abs_diff(&nk_exact_free(&c).unwrap()).unwrap());
    }
    let el = start.elapsed();
    check(
        worst < 1e-10 && fig2 < 1e-10 && el < Duration::from_secs(60),
        format!("N=50 empty/full max diff {worst:.2e}; N=200 three panels max diff {fig2:.2e}; {}", secs(el)),
    )
}

fn perturbative_scaling() -> Outcome {
    let mut errs = vec![];
    let epsilons = [1e-2, 1e-3, 1e-4];
    for eps in epsilons {
        let c = ProtocolConfig::new(20, eps, 5.0, 1.0);
        let g = nk_gaussian(&c).unwrap();
        let (plus, _) = free_lines(&c).unwrap();
        let conv = convolve_kernel(&plus, &Kernel::new(c.t), &c.omegas());
        errs.push((g.scaled(1.0 / (eps * eps))).max_abs_diff(&conv).unwrap());
    }
    let xs: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    check((slope - 2.0).abs() <= 0.2, format!("errors {:.2e} {:.2e} {:.2e}, slope {slope:.3}", errs[0], errs[1], errs[2]))
}

fn ghost_band() -> Outcome {
    let t = 5.0;
    let eps = PI / t;
    let b = broadening_and_ghosts(eps, t).unwrap();
    let f = |x: f64| {
        let d = eps * eps + x * x;
        eps * eps * (t * 0.5 * d.sqrt()).sin().powi(2) / d
    };
    // scan past the first zero for the first local maximum, then refine it
    let h = 1e-4;
    let mut x = b.delta_omega;
    while f(x + h) >= f(x) || f(x) < 1e-12 {
        x += h;
    }
    let (mut lo, mut hi) = (x - h, x + h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (a, c) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(a) > f(c) {
            hi = c
        } else {
            lo = a
        }
    }
    let ratio = f(0.5 * (lo + hi)) / f(0.0);
    check(
        (b.ratio_r - 1.0 / 9.0).abs() < 1e-15 && ratio <= 0.12,
        format!("r = {:.6}, secondary/main = {ratio:.5} at |w - 2v cos k| = {:.4}", b.ratio_r, 0.5 * (lo + hi)),
    )
}

fn strong_coupling() -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, eps, t) in [(9, 0.5, 5.0), (16, 1.2, 3.0), (27, 0.1, 7.5)] {
        let mut c = ProtocolConfig::new(n, eps, t, 0.0).with_omegas((0..33).map(|i| -4.0 + 0.25 * i as f64).collect());
        let rho: Vec<f64> = (0..n).map(|m| ((m * 7) % 5) as f64 / 4.0).collect();
        c.initial_state = InitialState::Occupations(rho.clone());
        let d = nk_gaussian(&c).unwrap().max_abs_diff(&strong_coupling_leading(&c, &rho).unwrap()).unwrap();
        worst = worst.max(d);
    }
    check(worst < 1e-12, format!("max |gaussian - sin^2(t W0) e^2/(w^2+e^2) rho| = {worst:.2e}"))
}

fn trotter_comparison() -> Outcome {
    let start = Instant::now();
    let mut c = ProtocolConfig::new(9, 0.1, 5.0, -1.0);
    c.v = 4.0;
    let steps = [1, 2, 4, 8, 10, 12, 16, 20, 0];
    let cmp = compare_trotter(&c, &steps).map_err(|e| e.to_string())?;
    let reference = lehmann_reference(&c).map_err(|e| e.to_string())?.combined();
    let floor = reference.values.iter().map(|x| x.abs()).sum::<f64>() / reference.values.len() as f64;
    let mut lines = vec![format!("    mean |reference| = {floor:.3e}")];
    for r in &cmp.rows {
        lines.push(format!(
            "    steps {:>3}: env mean {:.3e} max {:.3e} | baseline mean {:.3e} max {:.3e} negatives {:>3} | env range [{:.3e}, {:.3e}]",
            r.steps,
            r.environment.mean_abs,
            r.environment.max_abs,
            r.baseline.mean_abs,
            r.baseline.max_abs,
            r.baseline_negative,
            r.environment_min,
            r.environment_max
        ));
    }
    // Coarsest step counts that still resolve the spectrum (V dt <= 2). Below
    // 10 steps both methods sit at the error of an uncorrelated guess.
    let small = [10, 12, 16, 20];
    let env_wins = cmp.rows.iter().filter(|r| small.contains(&r.steps)).all(|r| r.environment.mean_abs < r.baseline.mean_abs);
    let in_range = cmp.rows.iter().all(|r| r.environment_min >= -1e-12 && r.environment_max <= 1.0 + 1e-12);
    let negatives = cmp.rows.iter().any(|r| r.steps != 0 && r.baseline_negative > 0);
    let el = start.elapsed();
    println!("{}", lines.join("\n"));
    check(
        env_wins && in_range && negatives && el < Duration::from_secs(1800),
        format!(
            "env beats baseline on steps {small:?}: {env_wins}; env samples in [0,1]: {in_range}; baseline negative at coarse steps: {negatives}; {}",
            secs(el)
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 FFFT transfer matrices equal DFT_N", fft_correctness),
        ("2 base-case two-qubit counts", base_counts),
        ("3 27-qubit interleave tableau equivalence", interleave_27),
        ("4 graph decimation", decimation),
        ("5 free-fermion oracle triangle", oracle_triangle),
        ("6 perturbative eps^2 scaling", perturbative_scaling),
        ("7 ghost-band bound", ghost_band),
        ("8 strong-coupling exactness", strong_coupling),
        ("9 Trotter comparison", trotter_comparison),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => println!("criterion {name}: PASS ({d})"),
            Err(d) => {
                failed += 1;
                println!("criterion {name}: FAIL ({d})");
            }
        }
    }
    println!("criterion 10 hardware figures: not applicable");
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
