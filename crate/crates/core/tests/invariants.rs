//! Property tests against small independent oracles.

use proptest::prelude::*;
use rand::Rng;
use witnesskit::decomp::{
    decomposition_from_json, decomposition_to_json, operator_basis_decomposition, pauli_decomposition, schmidt_ons,
    settings_lower_bound_pure,
};
use witnesskit::linalg::{expand, partial_transpose, schmidt, tensor, Operator, RANK_TOL};
use witnesskit::measure::{outcome_probabilities, simulate_setting};
use witnesskit::random::{random_density, random_hermitian, random_pure_state, random_unitary, rng_stream};
use witnesskit::seesaw::SeesawOptions;
use witnesskit::states::{bell_vector, is_ppt, BellKind, max_noise_radius, sample_ball_state, sample_unit_ball_delta, NoiseBallSpec};
use witnesskit::witness::{classify, optimize_epsilon, tau_threshold, w0, Classification};
use witnesskit::{CMatrix, DensityMatrix, Setting, C64};

/// Partial transpose by explicit index permutation on `da x db`.
fn pt_oracle(m: &CMatrix, da: usize, db: usize, party: usize) -> CMatrix {
    CMatrix::from_fn(da * db, da * db, |r, c| {
        let (i, j) = (r / db, r % db);
        let (k, l) = (c / db, c % db);
        if party == 0 {
            m[(k * db + j, i * db + l)]
        } else {
            m[(i * db + l, k * db + j)]
        }
    })
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=4, 2usize..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_transpose_matches_index_oracle((da, db) in dims(), party in 0usize..2, seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 0);
        let m = random_hermitian(da * db, &mut rng);
        let op = Operator::new(vec![da, db], m.clone()).unwrap();
        let pt = partial_transpose(&op, party).unwrap();
        prop_assert!((pt.matrix() - pt_oracle(&m, da, db, party)).norm() < 1e-14);
        let back = partial_transpose(&pt, party).unwrap();
        prop_assert!((back.matrix() - &m).norm() < 1e-14);
        prop_assert!((pt.trace() - op.trace()).norm() < 1e-12);
    }

    #[test]
    fn transpose_of_product_is_local((da, db) in dims(), seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 1);
        let a = Operator::new(vec![da], random_hermitian(da, &mut rng)).unwrap();
        let b = Operator::new(vec![db], random_hermitian(db, &mut rng)).unwrap();
        let bt = Operator::new(vec![db], b.matrix().transpose()).unwrap();
        let lhs = partial_transpose(&tensor(&[&a, &b]).unwrap(), 1).unwrap();
        let rhs = tensor(&[&a, &bt]).unwrap();
        prop_assert!((lhs.matrix() - rhs.matrix()).norm() < 1e-12);
    }

    #[test]
    fn generator_expansion_recomposes((da, db) in dims(), seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 2);
        let op = Operator::new(vec![da, db], random_hermitian(da * db, &mut rng)).unwrap();
        let lam = expand(&op).unwrap();
        prop_assert!((lam.recompose().matrix() - op.matrix()).norm() < 1e-11);
        // orthonormal basis: HS norm equals the coefficient norm
        prop_assert!((lam.lambda.norm() - op.matrix().norm()).abs() < 1e-10);
    }

    #[test]
    fn schmidt_form_recomposes((da, db) in dims(), seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 3);
        let psi = random_pure_state(da * db, &mut rng);
        let sf = schmidt(&psi, &[da, db]).unwrap();
        prop_assert!((sf.recompose() - &psi).norm() < 1e-12);
        let total: f64 = sf.coefficients.iter().map(|s| s * s).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(sf.coefficients.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn ons_sandwich((da, db) in dims(), seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 4);
        let psi = random_pure_state(da * db, &mut rng);
        let dec = schmidt_ons(&psi, &[da, db]).unwrap();
        let target = Operator::projector(vec![da, db], &psi).unwrap();
        prop_assert!(dec.verify(&target).unwrap() < 1e-10);
        let l = da.min(db);
        let count = dec.count_settings();
        let expected = if l % 2 == 0 { 2 * l - 1 } else { 2 * l };
        prop_assert_eq!(count, expected);
        let bound = settings_lower_bound_pure(&psi, &[da, db]).unwrap();
        prop_assert!(bound <= count, "bound {} above achieved {}", bound, count);
    }

    #[test]
    fn local_partial_transpose_commutes((da, db) in dims(), seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 5);
        let psi = random_pure_state(da * db, &mut rng);
        let dec = schmidt_ons(&psi, &[da, db]).unwrap();
        let target = partial_transpose(&Operator::projector(vec![da, db], &psi).unwrap(), 1).unwrap();
        prop_assert!(dec.partial_transpose(1).unwrap().verify(&target).unwrap() < 1e-10);
    }

    #[test]
    fn json_round_trip_is_exact((da, db) in dims(), seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 6);
        let psi = random_pure_state(da * db, &mut rng);
        let dec = schmidt_ons(&psi, &[da, db]).unwrap();
        let text = serde_json::to_string(&decomposition_to_json(&dec)).unwrap();
        let back = decomposition_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, dec);
    }

    #[test]
    fn merging_preserves_the_operator((da, db) in dims(), seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 7);
        let op = Operator::new(vec![da, db], random_hermitian(da * db, &mut rng)).unwrap();
        let dec = operator_basis_decomposition(&op).unwrap().to_local().unwrap();
        prop_assert!(dec.verify(&op).unwrap() < 1e-10);
        let merged = dec.merged();
        prop_assert!(merged.verify(&op).unwrap() < 1e-10);
        prop_assert!(merged.settings.len() <= dec.settings.len());
    }

    #[test]
    fn pauli_decomposition_recomposes(qubits in 1usize..=3, seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 8);
        let n = 1 << qubits;
        let op = Operator::new(vec![2; qubits], random_hermitian(n, &mut rng)).unwrap();
        let dec = pauli_decomposition(&op).unwrap();
        prop_assert!(dec.verify(&op).unwrap() < 1e-10);
        prop_assert!(dec.count_settings() <= 3usize.pow(qubits as u32));
    }

    #[test]
    fn generic_setting_has_reduced_rank_n_minus_one(n in 2usize..=4, seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 9);
        let bases = vec![random_unitary(n, &mut rng), random_unitary(n, &mut rng)];
        let coeffs: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = Setting::new(bases, coeffs).unwrap();
        let r = expand(&s.realize()).unwrap().reduced_rank(RANK_TOL);
        prop_assert_eq!(r, n - 1);
    }

    #[test]
    fn schmidt_rank_fixes_coefficient_rank(l in 1usize..=3, extra in 0usize..=1, seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 10);
        let (da, db) = (l.max(2) + extra, l.max(2));
        let ua = random_unitary(da, &mut rng);
        let ub = random_unitary(db, &mut rng);
        let mut psi = witnesskit::CVector::zeros(da * db);
        for i in 0..l {
            let a: witnesskit::CVector = ua.column(i).into_owned();
            psi += a.kronecker(&ub.column(i).into_owned()) * C64::new(1.0 / (l as f64).sqrt(), 0.0);
        }
        let op = Operator::projector(vec![da, db], &psi).unwrap();
        prop_assert_eq!(expand(&op).unwrap().rank(RANK_TOL), l * l);
    }

    #[test]
    fn shot_counts_sum_to_shots((da, db) in dims(), shots in 1u64..5000, seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 11);
        let rho = DensityMatrix::from_matrix(vec![da, db], random_density(da * db, &mut rng)).unwrap();
        let s = Setting::zeros(vec![random_unitary(da, &mut rng), random_unitary(db, &mut rng)]).unwrap();
        let probs = outcome_probabilities(&rho, &s).unwrap();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(probs.iter().all(|&p| (0.0..=1.0).contains(&p)));
        let rec = simulate_setting(&rho, &s, 0, shots, &mut rng).unwrap();
        prop_assert_eq!(rec.counts.iter().sum::<u64>(), shots);
    }

    #[test]
    fn ball_shifts_are_traceless_hermitian_and_bounded(seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 12);
        let delta = sample_unit_ball_delta(&mut rng);
        prop_assert!(delta.trace().norm() < 1e-12);
        prop_assert!((&delta - delta.adjoint()).norm() < 1e-14);
        prop_assert!(delta.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn tau_grows_with_noise(a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let r = max_noise_radius();
        prop_assert!(tau_threshold(lo * r).unwrap() <= tau_threshold(hi * r).unwrap() + 1e-15);
    }

    #[test]
    fn certified_separable_states_are_ppt(p in 0.0..=1.0f64, d in 0.0..1.0f64, known_p in any::<bool>(), seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 13);
        let d = d * max_noise_radius();
        let psi = bell_vector(BellKind::PsiPlus);
        let rho = sample_ball_state(NoiseBallSpec::new(p, d).unwrap(), &psi, &mut rng).unwrap();
        let w = w0();
        let alpha = rho.expectation(&w);
        let hint = if known_p && p > 0.0 { Some(p) } else { None };
        let verdict = classify(&w, alpha, d, hint).unwrap();
        if verdict.classification == Classification::SeparableCertified {
            prop_assert!(is_ppt(&rho).unwrap());
        }
        if verdict.classification == Classification::Entangled {
            prop_assert!(!is_ppt(&rho).unwrap());
        }
    }

    #[test]
    fn product_minimum_bounds_random_products(seed in any::<u64>()) {
        let mut rng = rng_stream(seed, 14);
        let w = Operator::new(vec![2, 2], random_hermitian(4, &mut rng)).unwrap();
        let opts = SeesawOptions { restarts: 20, seed, ..SeesawOptions::default() };
        let eps = optimize_epsilon(&w, None, &opts).unwrap().epsilon;
        for _ in 0..20 {
            let a = random_pure_state(2, &mut rng);
            let b = random_pure_state(2, &mut rng);
            let v = a.kronecker(&b);
            let value = (v.adjoint() * w.matrix() * &v)[(0, 0)].re;
            prop_assert!(eps <= value + 1e-9, "eps {} above product value {}", eps, value);
        }
    }
}
