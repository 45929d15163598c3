use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use envspec::circuit::{Circuit, Gate};
use envspec::czopt::{apply_rule, decimate, verify_equivalence, CzGraph, DecimationStep, Rule};
use envspec::fft::{compile_fft, FftPlan, InterleaveStrategy};
use envspec::protocol::{run_circuit_protocol, EnvironmentFill, ProtocolConfig};
use envspec::sim::{
    dense_transfer_matrix, equal_up_to_phase, evolve_gaussian, extract_mode_transform, hamiltonian_mode_matrix,
    max_abs, phase_distance, GaussianState, ModeHamiltonian, StabilizerTableau, StateVector,
};

fn pair(n: usize) -> impl Strategy<Value = (usize, usize)> {
    (0..n, 1..n).prop_map(move |(a, d)| (a, (a + d) % n))
}

fn angle() -> impl Strategy<Value = f64> {
    -3.2..3.2f64
}

fn any_gate(n: usize) -> BoxedStrategy<Gate> {
    prop_oneof![
        pair(n).prop_map(|(a, b)| Gate::Cz(a, b)),
        pair(n).prop_map(|(a, b)| Gate::Cx(a, b)),
        pair(n).prop_map(|(a, b)| Gate::Cy(a, b)),
        pair(n).prop_map(|(a, b)| Gate::Cydg(a, b)),
        pair(n).prop_map(|(a, b)| Gate::Swap(a, b)),
        pair(n).prop_map(|(a, b)| Gate::Fswap(a, b)),
        (0..n).prop_map(Gate::X),
        (0..n).prop_map(Gate::Z),
        (0..n).prop_map(Gate::S),
        (0..n).prop_map(Gate::Sdg),
        (0..n, angle()).prop_map(|(q, a)| Gate::Rz(q, a)),
        (pair(n), angle()).prop_map(|((a, b), t)| Gate::Givens(a, b, t)),
    ]
    .boxed()
}

fn clifford_gate(n: usize) -> BoxedStrategy<Gate> {
    prop_oneof![
        pair(n).prop_map(|(a, b)| Gate::Cz(a, b)),
        pair(n).prop_map(|(a, b)| Gate::Cx(a, b)),
        pair(n).prop_map(|(a, b)| Gate::Cy(a, b)),
        (0..n).prop_map(Gate::Z),
        (0..n).prop_map(Gate::S),
        (0..n).prop_map(Gate::Sdg),
    ]
    .boxed()
}

fn conserving_gate(n: usize) -> BoxedStrategy<Gate> {
    prop_oneof![
        pair(n).prop_map(|(a, b)| Gate::Cz(a, b)),
        pair(n).prop_map(|(a, b)| Gate::Fswap(a, b)),
        pair(n).prop_map(|(a, b)| Gate::Swap(a, b)),
        (0..n).prop_map(Gate::Z),
        (0..n).prop_map(Gate::S),
        (0..n, angle()).prop_map(|(q, a)| Gate::Rz(q, a)),
        (pair(n), angle()).prop_map(|((a, b), t)| Gate::Givens(a, b, t)),
    ]
    .boxed()
}

fn circuit_of(n: usize, gate: fn(usize) -> BoxedStrategy<Gate>, len: usize) -> impl Strategy<Value = Circuit> {
    prop::collection::vec(gate(n), 0..len).prop_map(move |gs| Circuit::from_gates(n, gs).unwrap())
}

fn random_circuit(max_qubits: usize, gate: fn(usize) -> BoxedStrategy<Gate>, len: usize) -> impl Strategy<Value = Circuit> {
    (2..=max_qubits).prop_flat_map(move |n| circuit_of(n, gate, len))
}

fn random_state(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn random_graph(max_qubits: usize) -> impl Strategy<Value = CzGraph> {
    (2..=max_qubits).prop_flat_map(|n| {
        prop::collection::vec(pair(n), 0..24).prop_map(move |es| {
            let mut g = CzGraph::new(n);
            for (a, b) in es {
                g.toggle(a, b);
            }
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_undoes_the_circuit(
        (c, psi) in (2..=12usize).prop_flat_map(|n| (circuit_of(n, any_gate, 30), random_state(n)))
    ) {
        let mut s = StateVector::from_amplitudes(psi.clone()).unwrap();
        s.apply_circuit(&c).unwrap();
        s.apply_circuit(&c.inverse()).unwrap();
        for (a, b) in s.amplitudes().iter().zip(&psi) {
            prop_assert!((a - b).norm() < 1e-10);
        }
        prop_assert!(c.inverse().inverse().approx_eq(&c));
        prop_assert_eq!(c.inverse().two_qubit_count(), c.two_qubit_count());
        prop_assert_eq!(c.inverse().two_qubit_depth(), c.two_qubit_depth());
    }

    #[test]
    fn transfer_extraction_matches_dense(c in random_circuit(8, conserving_gate, 40)) {
        let t = extract_mode_transform(&c).unwrap();
        prop_assert!(max_abs(&(&t.0 - dense_transfer_matrix(&c).unwrap().0)) < 1e-11);
    }

    #[test]
    fn decimation_is_sound_and_never_worse(g in random_graph(9), penalty in 0.0..2.0f64) {
        let c = decimate(&g, penalty);
        prop_assert!(verify_equivalence(&c, &g).unwrap());
        prop_assert!(c.two_qubit_count() <= g.num_edges());
    }

    #[test]
    fn rules_are_involutions(g in random_graph(8), rule in 0..3usize, ij in any::<(usize, usize)>()) {
        let n = g.num_qubits();
        let (i, j) = (ij.0 % n, ij.1 % n);
        prop_assume!(i != j);
        let rule = [Rule::CzRemoval, Rule::CxConjugation, Rule::CxCyWrap][rule];
        let step = DecimationStep::new(rule, i, j);
        let back = apply_rule(&apply_rule(&g, step).unwrap(), step).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn gaussian_projectors_stay_pure(
        (n, p, seed, t) in (2..7usize).prop_flat_map(|n| (Just(n), 0..=2 * n, any::<u64>(), -4.0..4.0f64))
    ) {
        // projector onto p eigenvectors of one random quadratic form, evolved by another
        let mut x = seed;
        let mut next = move || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a = DMatrix::from_fn(2 * n, 2 * n, |_, _| next());
        let eig = ModeHamiltonian::new(&a + a.transpose());
        let v = eig.eigenvectors().columns(0, p).map(Complex64::from);
        let c = GaussianState(&v * v.adjoint());
        let h = hamiltonian_mode_matrix(n, next(), next(), next());
        let out = evolve_gaussian(&c, &h.evolution(t)).unwrap().0;
        prop_assert!(max_abs(&(&out * &out - &out)) < 1e-10);
        prop_assert!((out.trace().re - p as f64).abs() < 1e-10);
    }

    #[test]
    fn fft_then_inverse_is_identity(case in 0..16usize) {
        let sizes = [(2, 2), (3, 3), (4, 2), (8, 2), (9, 3), (16, 2), (27, 3), (32, 2)];
        let (n, r) = sizes[case % sizes.len()];
        let strategy = InterleaveStrategy::ALL[case % 3];
        let c = compile_fft(&FftPlan::new(n, r, strategy).unwrap()).unwrap();
        let round = c.then(&c.inverse()).unwrap();
        let t = extract_mode_transform(&round).unwrap();
        prop_assert!(phase_distance(&t.0, &DMatrix::identity(n, n)) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tableau_equality_matches_dense(
        (a, b, tweak) in (2..=5usize).prop_flat_map(|n| (circuit_of(n, clifford_gate, 14), circuit_of(n, clifford_gate, 14), 0..3usize))
    ) {
        // a third of the pairs are equal by construction
        let b = match tweak {
            0 => b,
            1 => a.then(&b).unwrap().then(&b.inverse()).unwrap(),
            _ => a.then(&b).unwrap(),
        };
        let same_tableau = StabilizerTableau::of(&a).unwrap() == StabilizerTableau::of(&b).unwrap();
        let same_dense = equal_up_to_phase(&StateVector::unitary(&a).unwrap(), &StateVector::unitary(&b).unwrap(), 1e-9);
        prop_assert_eq!(same_tableau, same_dense);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn protocol_samples_are_probabilities(
        n in 2..=4usize,
        eps in 0.05..2.0f64,
        t in 0.5..6.0f64,
        v in 0.0..4.0f64,
        steps in 1..4usize,
    ) {
        let mut c = ProtocolConfig::new(n, eps, t, -1.0).with_omegas(vec![-2.5, -0.3, 0.9, 2.0]);
        c.v = v;
        c.trotter_steps = steps;
        let empty = run_circuit_protocol(&c).unwrap();
        c.environment = EnvironmentFill::Full;
        let full = run_circuit_protocol(&c).unwrap();
        for x in empty.values.iter().chain(full.values.iter()) {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(x));
        }
        prop_assert!(empty.plus(&full).unwrap().min() >= -1e-12);
    }
}
