use num_complex::Complex64;
use proptest::prelude::*;
use qrefine::oracle::{q_trace_term_eigenbasis, refined_bound_eigenbasis, variance_uncentered, weighted_element_sum};
use qrefine::{
    bound_report, center, kimura_bound, naive_q_bound, q_anticommutator, q_commutator, q_trace_term, random_density,
    random_hermitian, refined_q_bound, robertson_bound, theorem_bound, trace_form, variance, CMatrix, DensityMatrix,
    HermitianMatrix, SeededRng,
};

#[derive(Debug, Clone)]
struct Case {
    rho: DensityMatrix,
    a: HermitianMatrix,
    b: HermitianMatrix,
    q: f64,
}

fn q_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(-1.0),
        1 => Just(0.0),
        1 => Just(1.0),
        6 => -3.0..3.0f64,
    ]
}

prop_compose! {
    fn case()(seed in any::<u64>(), n in 1usize..=8, deficient in any::<bool>(), q in q_strategy()) -> Case {
        let mut rng = SeededRng::new(seed, 0);
        let rank = if deficient && n > 1 { rng.int_inclusive(1, n - 1) } else { n };
        let rho = random_density(n, rank, &mut rng).unwrap();
        let a = random_hermitian(n, &mut rng).unwrap();
        let b = random_hermitian(n, &mut rng).unwrap();
        Case { rho, a, b, q }
    }
}

fn max_dev(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn variance_matches_uncentered_formula(c in case()) {
        let v = variance(&c.rho, &c.a).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!((v - variance_uncentered(&c.rho, &c.a).unwrap()).abs() <= 1e-10 * v.max(1.0));
    }

    #[test]
    fn weighted_elements_give_variance(c in case()) {
        let a0 = center(&c.a, &c.rho).unwrap();
        let v = variance(&c.rho, &c.a).unwrap();
        prop_assert!((weighted_element_sum(&c.rho, &a0).unwrap() - v).abs() <= 1e-9 * v.max(1.0));
    }

    #[test]
    fn eigenbasis_elements_have_symmetric_magnitudes(c in case()) {
        let x = qrefine::eigenbasis_elements(&c.rho, &c.a).unwrap();
        let n = c.rho.dim();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((x[(i, j)].norm() - x[(j, i)].norm()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn spectral_round_trip(c in case()) {
        prop_assert!(max_dev(&c.rho.reconstruct(), c.rho.matrix()) <= 1e-9);
        // and through a fresh eigendecomposition of the assembled matrix
        let again = DensityMatrix::from_hermitian(c.rho.as_hermitian().clone()).unwrap();
        prop_assert!(max_dev(&again.reconstruct(), c.rho.matrix()) <= 1e-9);
        let total: f64 = again.eigenvalues().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        prop_assert!(again.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(again.lambda_min() >= 0.0);
    }

    #[test]
    fn center_is_idempotent_with_zero_mean(c in case()) {
        let a0 = center(&c.a, &c.rho).unwrap();
        let a00 = center(&a0, &c.rho).unwrap();
        prop_assert!(max_dev(a0.matrix(), a00.matrix()) <= 1e-12);
        prop_assert!(trace_form(&c.rho, a0.matrix()).unwrap().norm() <= 1e-12);
    }

    #[test]
    fn trace_term_matches_eigenbasis_sum(c in case()) {
        let a0 = center(&c.a, &c.rho).unwrap();
        let b0 = center(&c.b, &c.rho).unwrap();
        let direct = q_trace_term(&c.rho, &a0, &b0, c.q).unwrap();
        let expanded = q_trace_term_eigenbasis(&c.rho, &a0, &b0, c.q).unwrap();
        prop_assert!((direct - expanded).norm() <= 1e-9);
    }

    #[test]
    fn anticommutator_is_negated_commutator(c in case()) {
        let anti = q_anticommutator(&c.a, &c.b, c.q).unwrap();
        let comm = q_commutator(&c.a, &c.b, -c.q).unwrap();
        prop_assert_eq!(anti, comm);
    }

    #[test]
    fn inverse_q_swap_is_exact(c in case()) {
        prop_assume!(c.q != 0.0);
        let lhs = q_commutator(&c.a, &c.b, 1.0 / c.q).unwrap();
        let rhs = q_commutator(&c.b, &c.a, c.q).unwrap() * Complex64::new(-1.0 / c.q, 0.0);
        let scale = c.a.matrix().norm() * c.b.matrix().norm() * (1.0 + 1.0 / c.q.abs());
        prop_assert!(max_dev(&lhs, &rhs) <= 1e-13 * scale.max(1.0));
    }

    #[test]
    fn swap_identity_on_traces(c in case()) {
        prop_assume!(c.q != 0.0);
        let aq = c.q.abs();
        let a0 = center(&c.a, &c.rho).unwrap();
        let b0 = center(&c.b, &c.rho).unwrap();
        let lhs = trace_form(&c.rho, &q_commutator(&a0, &b0, 1.0 / aq).unwrap()).unwrap();
        let rhs = trace_form(&c.rho, &q_commutator(&b0, &a0, aq).unwrap()).unwrap() * (-1.0 / aq);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + 1.0 / aq));
    }

    #[test]
    fn trace_form_is_linear(c in case(), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let (m1, m2) = (c.a.matrix(), c.b.matrix() * c.a.matrix());
        let combo = m1 * Complex64::new(s, 0.0) + &m2 * Complex64::new(0.0, t);
        let lhs = trace_form(&c.rho, &combo).unwrap();
        let rhs = trace_form(&c.rho, m1).unwrap() * s + trace_form(&c.rho, &m2).unwrap() * Complex64::new(0.0, t);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + m1.norm() + m2.norm()));
    }

    #[test]
    fn commutator_trace_is_imaginary(c in case()) {
        let t = trace_form(&c.rho, &q_commutator(&c.a, &c.b, 1.0).unwrap()).unwrap();
        prop_assert!(t.re.abs() <= 1e-12);
    }

    #[test]
    fn master_inequality(c in case()) {
        let r = bound_report(&c.rho, &c.a, &c.b, c.q).unwrap();
        prop_assert!(r.refined >= 0.0 && r.naive_q >= 0.0 && r.robertson >= 0.0);
        prop_assert!(r.satisfies(1e-9), "{:?}", r);
        prop_assert!(r.robertson <= r.product + 1e-9 * r.product.max(1.0));
        prop_assert!(r.naive_q <= r.product + 1e-9 * r.product.max(1.0));
    }

    #[test]
    fn dispatch_agrees_with_theorem_form(c in case()) {
        let dispatched = refined_q_bound(&c.rho, &c.a, &c.b, c.q).unwrap();
        let theorem = theorem_bound(&c.rho, &c.a, &c.b, c.q).unwrap();
        prop_assert!((dispatched - theorem).abs() <= 1e-12 * dispatched.max(1.0));
        let oracle = refined_bound_eigenbasis(&c.rho, &c.a, &c.b, c.q).unwrap();
        prop_assert!((dispatched - oracle).abs() <= 1e-9 * dispatched.max(1.0));
    }

    #[test]
    fn kimura_is_refined_at_one(c in case()) {
        let k = kimura_bound(&c.rho, &c.a, &c.b).unwrap();
        let r = refined_q_bound(&c.rho, &c.a, &c.b, 1.0).unwrap();
        prop_assert!((k - r).abs() <= 1e-12 * r.max(1.0));
    }

    #[test]
    fn naive_at_one_is_robertson(c in case()) {
        let naive = naive_q_bound(&c.rho, &c.a, &c.b, 1.0).unwrap();
        let rob = robertson_bound(&c.rho, &c.a, &c.b).unwrap();
        prop_assert!((naive - rob).abs() <= 1e-12 * rob.max(1.0));
    }

    #[test]
    fn report_fields_are_consistent(c in case()) {
        let r = bound_report(&c.rho, &c.a, &c.b, c.q).unwrap();
        prop_assert_eq!(r.product, r.var_a * r.var_b);
        prop_assert_eq!(r.slack, r.product - r.refined);
        prop_assert_eq!(r.kimura.is_some(), c.q == 1.0);
        match r.ratio {
            Some(ratio) => prop_assert_eq!(ratio, r.refined / r.product),
            None => prop_assert!(r.product < 1e-14),
        }
    }
}

#[test]
fn generated_states_satisfy_invariants() {
    for k in 0..10_000u64 {
        let mut rng = SeededRng::new(77, k);
        let n = 2 + (k as usize % 7);
        let rank = rng.int_inclusive(1, n);
        let rho = random_density(n, rank, &mut rng).unwrap();
        let total: f64 = rho.eigenvalues().iter().sum();
        assert!((total - 1.0).abs() <= 1e-10);
        assert!(rho.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        assert!(rho.lambda_min() >= 0.0);
        if rank < n {
            assert_eq!(rho.lambda_min(), 0.0);
        }
        let u = rho.eigenvectors();
        let gram = u.adjoint() * u;
        let dev = (&gram - CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev <= 1e-9);
        let recon = (rho.reconstruct() - rho.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(recon <= 1e-9);
        assert!(DensityMatrix::from_rows(&rho.as_hermitian().rows()).is_ok());
    }
}

#[test]
fn same_stream_gives_bitwise_identical_spectra() {
    for k in 0..50u64 {
        let a = random_density(5, 3, &mut SeededRng::new(123, k)).unwrap();
        let b = random_density(5, 3, &mut SeededRng::new(123, k)).unwrap();
        let bits = |r: &DensityMatrix| r.eigenvalues().iter().map(|l| l.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }
}

#[test]
fn refined_dominates_naive_on_faithful_states() {
    for k in 0..2000u64 {
        let mut rng = SeededRng::new(31, k);
        let n = 2 + (k as usize % 5);
        let rho = random_density(n, n, &mut rng).unwrap();
        if rho.lambda_min() <= 1e-6 {
            continue;
        }
        let a = random_hermitian(n, &mut rng).unwrap();
        let b = random_hermitian(n, &mut rng).unwrap();
        let q = rng.uniform(-1.0, 1.0);
        let refined = refined_q_bound(&rho, &a, &b, q).unwrap();
        assert!(refined >= naive_q_bound(&rho, &a, &b, q).unwrap() - 1e-12);
    }
}
