use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use qfs_core::featuremap::FeatureMapSpec;
use qfs_core::linalg::CMatrix;
use qfs_core::rng::stream_rng;
use qfs_core::sim::{
    sample_shots, Circuit, DensityMatrix, Gate, NoiseModel, Observable, Probabilities, StateVector,
};
use rand::Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = stream_rng(seed, 77);
    let raw: Vec<Complex64> = (0..1 << n)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(raw.iter().map(|a| a / norm).collect()).unwrap()
}

fn random_gate<R: Rng>(rng: &mut R, n: usize) -> Gate {
    let q = rng.random_range(0..n);
    let mut r = rng.random_range(0..n - 1);
    if r >= q {
        r += 1;
    }
    let angle = rng.random_range(-PI..PI);
    match rng.random_range(0..7) {
        0 => Gate::h(q),
        1 => Gate::x(q),
        2 => Gate::ry(q, angle),
        3 => Gate::rz(q, angle),
        4 => Gate::cz(q, r),
        5 => Gate::cnot(q, r),
        _ => Gate::zz_phase(q, r, angle),
    }
}

fn random_circuit(n: usize, len: usize, seed: u64) -> Circuit {
    let mut rng = stream_rng(seed, 5);
    Circuit::from_gates(n, (0..len).map(|_| random_gate(&mut rng, n))).unwrap()
}

// Dense single-gate matrices assembled by Kronecker products, qubit 0 rightmost.
fn kron(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn eye(d: usize) -> Vec<Vec<Complex64>> {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

fn embed_one(n: usize, q: usize, m: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let id = eye(2);
    let mut out = vec![vec![c(1.0, 0.0)]];
    for k in (0..n).rev() {
        out = kron(&out, if k == q { m } else { &id[..] });
    }
    out
}

fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn oracle_matrix(n: usize, g: &Gate) -> Vec<Vec<Complex64>> {
    let d = 1usize << n;
    let diag2 = |a: usize, b: usize, f: &dyn Fn(usize, usize) -> Complex64| {
        let mut m = vec![vec![c(0.0, 0.0); d]; d];
        for (z, row) in m.iter_mut().enumerate() {
            row[z] = f(z >> a & 1, z >> b & 1);
        }
        m
    };
    match *g {
        Gate::H { qubit } => embed_one(
            n,
            qubit,
            &[
                vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
                vec![c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
            ],
        ),
        Gate::X { qubit } => embed_one(
            n,
            qubit,
            &[
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(1.0, 0.0), c(0.0, 0.0)],
            ],
        ),
        Gate::Ry { qubit, angle } => {
            let (s, co) = ((angle / 2.0).sin(), (angle / 2.0).cos());
            embed_one(
                n,
                qubit,
                &[vec![c(co, 0.0), c(-s, 0.0)], vec![c(s, 0.0), c(co, 0.0)]],
            )
        }
        Gate::Rz { qubit, angle } => embed_one(
            n,
            qubit,
            &[
                vec![Complex64::from_polar(1.0, -angle / 2.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), Complex64::from_polar(1.0, angle / 2.0)],
            ],
        ),
        Gate::Cz { a, b } => diag2(a, b, &|x, y| c(if x & y == 1 { -1.0 } else { 1.0 }, 0.0)),
        Gate::ZzPhase { a, b, angle } => diag2(a, b, &|x, y| {
            let zz = if x == y { 1.0 } else { -1.0 };
            Complex64::from_polar(1.0, angle * zz)
        }),
        Gate::Cnot { control, target } => {
            let mut m = vec![vec![c(0.0, 0.0); d]; d];
            for z in 0..d {
                let out = if z >> control & 1 == 1 {
                    z ^ (1 << target)
                } else {
                    z
                };
                m[out][z] = c(1.0, 0.0);
            }
            m
        }
    }
}

#[test]
fn gate_examples() {
    let mut s = StateVector::zero(1).unwrap();
    s.apply_gate(&Gate::h(0)).unwrap();
    assert!((s.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    assert!((s.amplitudes()[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);

    let mut s = StateVector::basis(2, 3).unwrap();
    s.apply_gate(&Gate::cz(0, 1)).unwrap();
    assert_eq!(s.amplitudes()[3], c(-1.0, 0.0));

    // |01⟩ with qubit 0 set: Z⊗Z eigenvalue −1
    let lambda = 0.37;
    let mut s = StateVector::basis(2, 1).unwrap();
    s.apply_gate(&Gate::zz_phase(0, 1, lambda)).unwrap();
    assert!((s.amplitudes()[1] - Complex64::from_polar(1.0, -lambda)).norm() < 1e-15);
}

#[test]
fn out_of_range_targets_rejected() {
    let mut s = StateVector::zero(2).unwrap();
    assert!(s.apply_gate(&Gate::h(2)).is_err());
    assert!(s.apply_gate(&Gate::cnot(1, 1)).is_err());
    assert!(Circuit::from_gates(2, [Gate::cz(0, 5)]).is_err());
}

#[test]
fn circuit_examples() {
    let psi = random_state(3, 1);
    assert_eq!(psi.evolved(&Circuit::new(3).unwrap()).unwrap(), psi);

    let hzh = Circuit::from_gates(1, [Gate::h(0), Gate::rz(0, PI), Gate::h(0)]).unwrap();
    let out = StateVector::zero(1).unwrap().evolved(&hzh).unwrap();
    assert!(out.approx_eq_up_to_phase(&StateVector::basis(1, 1).unwrap(), 1e-12));

    let fm = FeatureMapSpec::zz_default(2).circuit(&[1.3, 4.4]).unwrap();
    let round = fm.clone().then(&fm.adjoint()).unwrap();
    let back = StateVector::zero(2).unwrap().evolved(&round).unwrap();
    assert!((back.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-12);

    let wrong = Circuit::new(3).unwrap();
    assert!(StateVector::zero(2).unwrap().evolved(&wrong).is_err());
}

#[test]
fn adjoint_examples() {
    let h = Circuit::from_gates(1, [Gate::h(0)]).unwrap();
    assert_eq!(h.adjoint().gates(), &[Gate::h(0)]);
    let c2 = Circuit::from_gates(2, [Gate::rz(0, 0.7), Gate::cnot(0, 1)]).unwrap();
    assert_eq!(c2.adjoint().gates(), &[Gate::cnot(0, 1), Gate::rz(0, -0.7)]);
    for seed in 0..10 {
        let circ = random_circuit(3, 25, seed);
        let psi = random_state(3, seed);
        let back = psi
            .evolved(&circ)
            .unwrap()
            .evolved(&circ.adjoint())
            .unwrap();
        assert!(back.approx_eq_up_to_phase(&psi, 1e-12));
        assert!((back.inner(&psi).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn circuit_unitary_matches_kronecker_oracle() {
    for seed in 0..5 {
        let n = 3;
        let circ = random_circuit(n, 12, 100 + seed);
        let mut oracle = eye(1 << n);
        for g in circ.gates() {
            oracle = matmul(&oracle_matrix(n, g), &oracle);
        }
        let u = circ.unitary();
        for i in 0..1 << n {
            for j in 0..1 << n {
                assert!((u.get(i, j) - oracle[i][j]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn zz_phase_decomposition_agrees() {
    for &lambda in &[0.0, 0.4, -1.3, 2.9] {
        let direct = Circuit::from_gates(2, [Gate::zz_phase(0, 1, lambda)])
            .unwrap()
            .unitary();
        let dec = Circuit::from_gates(2, Gate::zz_phase_decomposed(0, 1, lambda))
            .unwrap()
            .unitary();
        assert!(direct.max_abs_diff(&dec) < 1e-12);
        let flipped = Circuit::from_gates(2, Gate::zz_phase_decomposed(1, 0, lambda))
            .unwrap()
            .unitary();
        assert!(direct.max_abs_diff(&flipped) < 1e-12);
    }
}

#[test]
fn probabilities_examples() {
    assert_eq!(
        StateVector::zero(1).unwrap().probabilities().as_slice(),
        &[1.0, 0.0]
    );
    let plus =
        StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
    let p = plus.probabilities();
    assert!((p.get(0) - 0.5).abs() < 1e-15 && (p.get(1) - 0.5).abs() < 1e-15);

    let psi = random_state(2, 9);
    let p = psi.probabilities();
    for (z, a) in psi.amplitudes().iter().enumerate() {
        assert!((p.get(z) - (a.re * a.re + a.im * a.im)).abs() < 1e-15);
    }
    assert!((p.total() - 1.0).abs() < 1e-10);
}

#[test]
fn sampling_examples() {
    let det = Probabilities::new(vec![1.0, 0.0]).unwrap();
    let counts = sample_shots(&det, 100, &mut stream_rng(1, 0)).unwrap();
    assert_eq!(counts.as_slice(), &[100, 0]);

    let uniform = Probabilities::new(vec![0.25; 4]).unwrap();
    let r = 40_000u64;
    let counts = sample_shots(&uniform, r, &mut stream_rng(2, 0)).unwrap();
    assert_eq!(counts.shots(), r);
    let sigma = (r as f64 * 0.25 * 0.75).sqrt();
    for &k in counts.as_slice() {
        assert!((k as f64 - 10_000.0).abs() <= 5.0 * sigma);
    }

    let again = sample_shots(&uniform, r, &mut stream_rng(2, 0)).unwrap();
    assert_eq!(counts, again);

    assert!(Probabilities::new(vec![0.5, 0.4]).is_err());
    assert!(sample_shots(&uniform, 0, &mut stream_rng(2, 0)).is_err());
}

#[test]
fn density_examples() {
    let circ = random_circuit(3, 20, 42);
    let psi = StateVector::zero(3).unwrap().evolved(&circ).unwrap();
    let rho = DensityMatrix::zero(3)
        .unwrap()
        .evolve(&circ, &NoiseModel::noiseless())
        .unwrap();
    for r in 0..8 {
        for col in 0..8 {
            let want = psi.amplitudes()[r] * psi.amplitudes()[col].conj();
            assert!((rho.get(r, col) - want).norm() < 1e-12);
        }
    }

    let h = Circuit::from_gates(1, [Gate::h(0)]).unwrap();
    let mixed = DensityMatrix::zero(1)
        .unwrap()
        .evolve(&h, &NoiseModel::new(1.0, 0.0).unwrap())
        .unwrap();
    let half = CMatrix::identity(2).scale(c(0.5, 0.0));
    assert!(mixed.to_matrix().max_abs_diff(&half) < 1e-12);

    let noisy = DensityMatrix::zero(3)
        .unwrap()
        .evolve(&circ, &NoiseModel::new(0.05, 0.05).unwrap())
        .unwrap();
    assert!((noisy.trace() - c(1.0, 0.0)).norm() < 1e-10);
    assert!(noisy.hermiticity_error() < 1e-10);
    assert!(noisy.eigenvalues().unwrap().iter().all(|&v| v >= -1e-8));

    assert!(DensityMatrix::zero(2)
        .unwrap()
        .evolve(&circ, &NoiseModel::noiseless())
        .is_err());
}

#[test]
fn stretch_increases_noise() {
    let circ = random_circuit(2, 10, 8);
    let noise = NoiseModel::new(0.02, 0.05).unwrap();
    let purity = |c: &Circuit| {
        let m = DensityMatrix::zero(2)
            .unwrap()
            .evolve(c, &noise)
            .unwrap()
            .to_matrix();
        m.matmul(&m).trace().re
    };
    let slow = circ.clone().with_stretch(2.0).unwrap();
    assert!(purity(&slow) < purity(&circ));
    assert!(circ.clone().with_stretch(0.0).is_err());
}

#[test]
fn expectation_examples() {
    let f = Observable::parity(2).unwrap();
    assert_eq!(f.expectation(&StateVector::zero(2).unwrap()).unwrap(), 1.0);
    assert_eq!(
        f.expectation(&StateVector::basis(2, 1).unwrap()).unwrap(),
        -1.0
    );
    let uniform = StateVector::from_amplitudes(vec![c(0.5, 0.0); 4]).unwrap();
    assert!(f.expectation(&uniform).unwrap().abs() < 1e-15);
    let rho = DensityMatrix::from_pure(&uniform);
    assert!(f.expectation(&rho).unwrap().abs() < 1e-15);
    assert!(f.expectation(&StateVector::zero(3).unwrap()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        rng_seed: RngSeed::Fixed(0x5eed),
        ..ProptestConfig::default()
    })]

    #[test]
    fn gates_preserve_norm(seed in 0u64..10_000, n in 2usize..5) {
        let mut rng = stream_rng(seed, 3);
        let mut psi = random_state(n, seed);
        for _ in 0..10 {
            psi.apply_gate(&random_gate(&mut rng, n)).unwrap();
            prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn composition_is_exact(seed in 0u64..10_000) {
        let a = random_circuit(3, 8, seed);
        let b = random_circuit(3, 8, seed + 1);
        let psi = random_state(3, seed);
        let joint = psi.evolved(&a.clone().then(&b).unwrap()).unwrap();
        let stepwise = psi.evolved(&a).unwrap().evolved(&b).unwrap();
        prop_assert_eq!(joint, stepwise);
    }

    #[test]
    fn density_diagonal_matches_born(seed in 0u64..10_000) {
        let circ = random_circuit(3, 15, seed);
        let p = StateVector::zero(3).unwrap().evolved(&circ).unwrap().probabilities();
        let d = DensityMatrix::zero(3).unwrap().evolve(&circ, &NoiseModel::noiseless()).unwrap().probabilities();
        for z in 0..8 {
            prop_assert!((p.get(z) - d.get(z)).abs() < 1e-10);
        }
    }

    #[test]
    fn noisy_evolution_stays_a_state(seed in 0u64..10_000, p1 in 0.0f64..0.3, p2 in 0.0f64..0.3) {
        let circ = random_circuit(2, 10, seed);
        let rho = DensityMatrix::zero(2).unwrap().evolve(&circ, &NoiseModel::new(p1, p2).unwrap()).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(rho.hermiticity_error() < 1e-10);
        prop_assert!(rho.eigenvalues().unwrap()[0] >= -1e-8);
    }

    #[test]
    fn frequencies_converge(seed in 0u64..10_000, shots in 500u64..20_000) {
        let psi = random_state(2, seed);
        let p = psi.probabilities();
        let counts = sample_shots(&p, shots, &mut stream_rng(seed, 11)).unwrap();
        prop_assert_eq!(counts.shots(), shots);
        for z in 0..4 {
            let q = p.get(z);
            let tol = 5.0 * (q * (1.0 - q) / shots as f64).sqrt() + 1e-12;
            prop_assert!((counts.frequency(z) - q).abs() <= tol);
        }
    }
}
