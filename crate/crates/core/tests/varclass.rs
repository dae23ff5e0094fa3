use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use qfs_core::ansatz::AnsatzSpec;
use qfs_core::datagen::generate_dataset;
use qfs_core::featuremap::FeatureMapSpec;
use qfs_core::linalg::CMatrix;
use qfs_core::sim::Observable;
use qfs_core::varclass::{
    binomial_misclass_exact, classify, decide, empirical_risk, initial_theta, misclass_probability,
    multi_label_cost, pauli_expansion_check, refine_bias, sigmoid, spsa_minimize, train, ProbMode,
    SpsaConfig, TrainConfig, VariationalModel,
};
use qfs_core::Error;

fn model(depth: usize, seed: u64) -> VariationalModel {
    let ansatz = AnsatzSpec::with_default_edges(2, depth);
    let theta = initial_theta(ansatz.parameter_count(), seed, 0);
    VariationalModel::with_parity(FeatureMapSpec::zz_default(2), ansatz, theta).unwrap()
}

// Σ_{j ≤ k} C(R, j) p^j (1-p)^{R-j} by straightforward products.
fn naive_binomial_cdf(p: f64, r: u64, k: u64) -> f64 {
    let mut total = 0.0;
    for j in 0..=k.min(r) {
        let mut coeff = 1.0f64;
        for i in 0..j {
            coeff *= (r - i) as f64 / (i + 1) as f64;
        }
        total += coeff * p.powi(j as i32) * (1.0 - p).powi((r - j) as i32);
    }
    total
}

#[test]
fn uniform_state_gives_even_odds() {
    // one layer with all phases zero leaves H⊗H|00⟩
    let single = FeatureMapSpec::single_layer(2);
    let m =
        VariationalModel::with_parity(single, AnsatzSpec::with_default_edges(2, 0), vec![0.0; 4])
            .unwrap();
    let (p, q) = m.label_probabilities(&[0.0, 0.0], ProbMode::Exact).unwrap();
    assert!((p - 0.5).abs() < 1e-12 && (q - 0.5).abs() < 1e-12);
}

#[test]
fn label_probabilities_track_parity_expectation() {
    let m = model(2, 4);
    for x in [[0.3, 1.7], [4.0, 2.2], [6.1, 0.05]] {
        let (p, q) = m.label_probabilities(&x, ProbMode::Exact).unwrap();
        assert!((p + q - 1.0).abs() < 1e-12);
        let out = m
            .feature
            .state(&x)
            .unwrap()
            .evolved(&m.w_circuit().unwrap())
            .unwrap();
        assert!((p - q - m.f.expectation(&out).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn shot_frequencies_concentrate() {
    let m = model(2, 9);
    let r = 2000u64;
    for (k, x) in [[0.3, 1.7], [4.0, 2.2], [6.1, 0.05], [3.3, 3.3]]
        .iter()
        .enumerate()
    {
        let (p, _) = m.label_probabilities(x, ProbMode::Exact).unwrap();
        let mode = ProbMode::Shots {
            shots: r,
            seed: 17,
            stream: k as u64,
        };
        let (ph, qh) = m.label_probabilities(x, mode).unwrap();
        assert_eq!(((ph + qh) * r as f64).round() as u64, r);
        let sigma = (p * (1.0 - p) / r as f64).sqrt();
        assert!((ph - p).abs() <= 5.0 * sigma + 1e-12, "{ph} vs {p}");
    }
}

#[test]
fn decision_rule() {
    assert_eq!(decide(0.7, 0.0), 1);
    assert_eq!(decide(0.45, 0.2), 1);
    assert_eq!(decide(0.5, 0.0), -1);
    assert_eq!(decide(0.3, -0.1), -1);
}

#[test]
fn sigmoid_cost_examples() {
    assert!((misclass_probability(0.5, 200, 0.0, 1) - 0.5).abs() < 1e-15);
    assert!(misclass_probability(1.0, 200, 0.0, 1) < 1e-3);
    let v = misclass_probability(0.8, 200, 0.0, 1);
    assert!((v - sigmoid(-7.5)).abs() < 1e-12);
    assert!((v - 5.5e-4).abs() < 1e-5);
    assert!((v - binomial_misclass_exact(0.8, 200, 0.0)).abs() < 0.05);
}

#[test]
fn exact_cdf_examples() {
    assert_eq!(binomial_misclass_exact(1.0, 200, 0.0), 0.0);
    assert_eq!(binomial_misclass_exact(1.0, 7, 0.0), 0.0);
    for r in [1u64, 11, 201] {
        assert!((binomial_misclass_exact(0.5, r, 0.0) - 0.5).abs() < 1e-12);
    }
    for p in [0.2, 0.5, 0.8, 0.97] {
        let want = naive_binomial_cdf(p, 200, 100);
        assert!((binomial_misclass_exact(p, 200, 0.0) - want).abs() < 1e-12);
    }
    let want = naive_binomial_cdf(0.6, 150, 90);
    assert!((binomial_misclass_exact(0.6, 150, 0.2) - want).abs() < 1e-12);
}

#[test]
fn risk_examples() {
    let m = model(1, 3);
    let pts = vec![vec![1.0, 2.0], vec![3.0, 0.5]];
    let (p0, _) = m.label_probabilities(&pts[0], ProbMode::Exact).unwrap();
    let (p1, _) = m.label_probabilities(&pts[1], ProbMode::Exact).unwrap();
    let labels = [1i8, -1];
    let want = 0.5
        * (misclass_probability(p0, 200, 0.0, 1) + misclass_probability(1.0 - p1, 200, 0.0, -1));
    let got = empirical_risk(&m, &pts, &labels, 200, ProbMode::Exact).unwrap();
    assert!((got - want).abs() < 1e-12);
    assert!(matches!(
        empirical_risk(&m, &[], &[], 200, ProbMode::Exact),
        Err(Error::EmptyTrainingSet)
    ));
    assert!(misclass_probability(0.9, 200, 0.0, 1) < misclass_probability(0.6, 200, 0.0, 1));
}

#[test]
fn multi_label_examples() {
    assert!(multi_label_cost(&[100, 0, 0], 0, 100).unwrap() < 1e-3);
    assert!((multi_label_cost(&[30, 30, 30], 1, 90).unwrap() - 0.5).abs() < 1e-15);
    let v = multi_label_cost(&[50, 30, 20], 0, 100).unwrap();
    assert!((v - sigmoid(-20.0 * 10.0 / 5000f64.sqrt())).abs() < 1e-12);
    assert!((v - 0.0556).abs() < 5e-4);
    assert!(multi_label_cost(&[50, 30, 20], 0, 99).is_err());
}

#[test]
fn spsa_on_a_bowl() {
    let theta0 = [0.6, -0.8];
    let cfg = SpsaConfig {
        iterations: 300,
        seed: 5,
        ..SpsaConfig::default()
    };
    let bowl = |t: &[f64], _: u64| Ok(t.iter().map(|v| v * v).sum::<f64>());
    let res = spsa_minimize(bowl, &theta0, &cfg).unwrap();
    let norm = res.theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(norm < 0.1, "‖θ*‖ = {norm}");
    assert_eq!(res.trace.len(), 301);

    let again = spsa_minimize(bowl, &theta0, &cfg).unwrap();
    assert_eq!(res.trace, again.trace);
    assert_eq!(res.theta, again.theta);

    let none = spsa_minimize(
        bowl,
        &theta0,
        &SpsaConfig {
            iterations: 0,
            ..cfg.clone()
        },
    )
    .unwrap();
    assert_eq!(none.theta, theta0.to_vec());

    let blowup = |_: &[f64], _: u64| Ok(f64::NAN);
    assert!(matches!(
        spsa_minimize(blowup, &theta0, &cfg),
        Err(Error::NonFiniteObjective { .. })
    ));
}

#[test]
fn zero_iterations_leave_the_model() {
    let ds = generate_dataset(1, 4, 0.3, &FeatureMapSpec::zz_default(2)).unwrap();
    let m0 = model(2, 1);
    let cfg = TrainConfig {
        spsa: SpsaConfig {
            iterations: 0,
            ..SpsaConfig::default()
        },
        ..TrainConfig::default()
    };
    let (m, report) = train(&m0, &ds.points, &ds.labels, &cfg).unwrap();
    assert_eq!(m, m0);
    assert_eq!(report.risk_trace.len(), 1);
}

#[test]
fn training_reaches_low_risk_and_depth_helps() {
    let mut finals = [[0.0; 3]; 3];
    for (s, seed) in [1u64, 2, 3].into_iter().enumerate() {
        let ds = generate_dataset(seed, 20, 0.3, &FeatureMapSpec::zz_default(2)).unwrap();
        for (d, depth) in [0usize, 2, 4].into_iter().enumerate() {
            let cfg = TrainConfig {
                spsa: SpsaConfig {
                    seed,
                    ..SpsaConfig::default()
                },
                ..TrainConfig::default()
            };
            let (_, report) = train(&model(depth, seed), &ds.points, &ds.labels, &cfg).unwrap();
            assert!(report.risk_trace.iter().all(|r| (0.0..=1.0).contains(r)));
            finals[d][s] = report.final_risk;
        }
    }
    let good = finals[1].iter().filter(|&&r| r < 0.1).count();
    assert!(good >= 2, "depth-2 risks {:?}", finals[1]);
    let mean = |v: &[f64; 3]| v.iter().sum::<f64>() / 3.0;
    assert!(mean(&finals[2]) <= mean(&finals[0]), "{finals:?}");
}

#[test]
fn bias_refinement_follows_the_decision_rule() {
    let ds = generate_dataset(4, 15, 0.3, &FeatureMapSpec::zz_default(2)).unwrap();
    let m = model(1, 21);
    let errors = |m: &VariationalModel| {
        let p = classify(m, &ds.points, None, ProbMode::Exact)
            .unwrap()
            .p_plus;
        p.iter()
            .zip(&ds.labels)
            .filter(|(&p, &y)| decide(p, m.bias) != y)
            .count()
    };
    let refined = refine_bias(&m, &ds.points, &ds.labels, 200).unwrap();
    assert!((-1.0..=1.0).contains(&refined.bias));
    assert!(errors(&refined) <= errors(&m));
    // b = ±1 sends every point to one side, so the grid can always reach half
    assert!(errors(&refined) <= ds.len() / 2);
    assert!(refine_bias(&m, &[], &[], 10).is_err());
}

#[test]
fn classification_end_to_end() {
    let m = model(2, 21);
    let ds = generate_dataset(8, 15, 0.3, &FeatureMapSpec::zz_default(2)).unwrap();
    // labels produced by the model itself are reproduced exactly
    let own = classify(&m, &ds.points, None, ProbMode::Exact).unwrap();
    assert_eq!(own.success, None);
    let exact = classify(&m, &ds.points, Some(&own.labels), ProbMode::Exact).unwrap();
    assert_eq!(exact.success, Some(1.0));

    let shots = ProbMode::Shots {
        shots: 10_000,
        seed: 3,
        stream: 0,
    };
    let sampled = classify(&m, &ds.points, Some(&ds.labels), shots).unwrap();
    let exact = classify(&m, &ds.points, Some(&ds.labels), ProbMode::Exact).unwrap();
    assert!((sampled.success.unwrap() - exact.success.unwrap()).abs() <= 0.05);

    let empty = classify(&m, &[], Some(&[]), ProbMode::Exact).unwrap();
    assert!(empty.labels.is_empty());
    assert_eq!(empty.success, None);
}

fn pauli_matrix(alpha: usize, n: usize) -> CMatrix {
    let i = Complex64::i();
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let single = [[o, z, z, o], [z, o, o, z], [z, -i, i, z], [o, z, z, -o]];
    let d = 1 << n;
    let mut m = CMatrix::zeros(d);
    for r in 0..d {
        for c in 0..d {
            let mut v = o;
            for q in 0..n {
                let p = single[(alpha >> (2 * q)) & 3];
                v *= p[((r >> q) & 1) * 2 + ((c >> q) & 1)];
            }
            m.set(r, c, v);
        }
    }
    m
}

#[test]
fn pauli_expansion_matches_brute_force() {
    let m = model(2, 12);
    let x = [2.5, 4.4];
    let check = pauli_expansion_check(&m, &x).unwrap();
    assert!((check.lhs - check.rhs).abs() < 1e-10);
    assert!((check.phi_norm_sq - 4.0).abs() < 1e-10);
    assert!((check.w_norm_sq - 16.0).abs() < 1e-8);

    // independent evaluation with explicit Kronecker Paulis
    let u = m.w_circuit().unwrap().unitary();
    let mut f = CMatrix::zeros(4);
    for (k, &v) in m.f.diagonal().iter().enumerate() {
        f.set(k, k, Complex64::new(v, 0.0));
    }
    let big_m = u.adjoint().matmul(&f).matmul(&u);
    let phi = m.feature.state(&x).unwrap();
    let mut rhs = 0.0;
    for alpha in 0..16 {
        let p = pauli_matrix(alpha, 2);
        let w_a = big_m.matmul(&p).trace().re;
        let pv = p.mul_vec(phi.amplitudes());
        let phi_a: f64 = phi
            .amplitudes()
            .iter()
            .zip(&pv)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        rhs += w_a * phi_a;
    }
    assert!((rhs / 4.0 - check.lhs).abs() < 1e-10);

    let five = VariationalModel::with_parity(
        FeatureMapSpec::zz_default(5),
        AnsatzSpec::with_default_edges(5, 0),
        vec![0.0; 10],
    )
    .unwrap();
    assert!(matches!(
        pauli_expansion_check(&five, &[0.1; 5]),
        Err(Error::TooManyQubits(5))
    ));
}

#[test]
fn model_file_round_trip() {
    let m = model(3, 2);
    let file = m.to_file(Some(serde_json::json!({"iterations": 10})));
    let text = serde_json::to_string(&file).unwrap();
    let back = VariationalModel::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, m);
    let bad = VariationalModel::new(
        m.feature.clone(),
        m.ansatz.clone(),
        m.theta.clone(),
        1.5,
        Observable::parity(2).unwrap(),
    );
    assert!(bad.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, rng_seed: RngSeed::Fixed(0x7a11), ..ProptestConfig::default() })]

    #[test]
    fn decide_is_sign_of_score(p in 0.0f64..=1.0, b in -1.0f64..=1.0) {
        let s = 2.0 * p - 1.0 + b;
        prop_assert_eq!(decide(p, b), if s > 0.0 { 1 } else { -1 });
    }

    #[test]
    fn cost_decreases_in_p(p in 0.0f64..0.99, dp in 0.001f64..0.01, b in -0.5f64..0.5, r in 1u64..1000) {
        prop_assert!(misclass_probability(p + dp, r, b, 1) <= misclass_probability(p, r, b, 1));
    }

    #[test]
    fn risk_ignores_point_order(seed in 0u64..500) {
        let ds = generate_dataset(seed % 5 + 1, 3, 0.2, &FeatureMapSpec::zz_default(2)).unwrap();
        let m = model(1, seed);
        let base = empirical_risk(&m, &ds.points, &ds.labels, 200, ProbMode::Exact).unwrap();
        let mut order: Vec<usize> = (0..ds.len()).collect();
        order.rotate_left((seed as usize) % ds.len());
        order.swap(0, ds.len() - 1);
        let pts: Vec<Vec<f64>> = order.iter().map(|&i| ds.points[i].clone()).collect();
        let lbl: Vec<i8> = order.iter().map(|&i| ds.labels[i]).collect();
        let permuted = empirical_risk(&m, &pts, &lbl, 200, ProbMode::Exact).unwrap();
        prop_assert!((base - permuted).abs() < 1e-12);
    }
}
