use kleinian::random;
use kleinian::transcendental::theta::{log_theta_derivative, theta_batch};
use kleinian::transcendental::*;
use kleinian::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn lemniscatic() -> CurveModel {
    CurveModel::with_lambda(2, 3, &[(4, c(-1.0, 0.0))]).unwrap()
}

fn max_dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn branch_points_of_x3_minus_x() {
    let e = branch_points(&lemniscatic()).unwrap();
    assert!(max_dist(&e, &[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]) < 1e-14);
}

#[test]
fn branch_points_of_x5_minus_1_are_sorted_roots_of_unity() {
    let cv = CurveModel::with_lambda(2, 5, &[(10, c(-1.0, 0.0))]).unwrap();
    let e = branch_points(&cv).unwrap();
    let mut expected: Vec<C64> = (0..5)
        .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 5.0))
        .collect();
    expected.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    assert!(max_dist(&e, &expected) < 1e-13);
}

#[test]
fn repeated_branch_points_are_rejected() {
    let cv = CurveModel::pham(2, 3).unwrap();
    assert!(matches!(branch_points(&cv), Err(Error::DegenerateCurve(_))));
    assert!(matches!(period_matrices(&cv), Err(Error::DegenerateCurve(_))));
}

#[test]
fn branch_points_move_continuously() {
    let mut rng = random::rng(5, 0);
    for _ in 0..5 {
        let cv = random::curve(&mut rng, 2, 5, 1.0).unwrap();
        let eps = 1e-7;
        let lambda: Vec<(u32, C64)> = cv
            .parameter_weights()
            .into_iter()
            .map(|w| (w, cv.lambda(w as i64) + c(eps, 0.0)))
            .collect();
        let moved = CurveModel::with_lambda(2, 5, &lambda).unwrap();
        let (a, b) = (branch_points(&cv).unwrap(), branch_points(&moved).unwrap());
        let shift = a
            .iter()
            .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        assert!(shift < 1e4 * eps, "roots moved by {shift:e}");
    }
}

#[test]
fn legendre_relation_and_symmetries() {
    let mut rng = random::rng(8, 0);
    for s in [3, 5] {
        for _ in 0..5 {
            let cv = random::curve(&mut rng, 2, s, 1.0).unwrap();
            let pd = period_matrices(&cv).unwrap();
            assert!(pd.legendre_residual < 1e-8, "legendre {:e}", pd.legendre_residual);
            assert!((legendre_residual(&pd) - pd.legendre_residual).abs() < 1e-15);
            assert!(pd.tau_asymmetry() < 1e-8);
            assert!(pd.kappa_asymmetry() < 1e-7);
            assert!(pd.im_tau_min_eigenvalue() > 0.0);
        }
    }
}

#[test]
fn lemniscatic_tau_is_i() {
    let pd = period_matrices(&lemniscatic()).unwrap();
    assert!((pd.tau[(0, 0)] - c(0.0, 1.0)).norm() < 1e-8);
    let (left, right) = kleinian::suites::lemniscatic_oracle();
    assert!((pd.omega[(0, 0)].norm() - left).abs() < 1e-8 * left);
    assert!((pd.omega_p[(0, 0)].norm() - right).abs() < 1e-8 * right);
}

#[test]
fn period_json_is_row_major_pairs() {
    let pd = period_matrices(&lemniscatic()).unwrap();
    let j = serde_json::to_value(pd.to_json()).unwrap();
    for key in ["omega", "omegaP", "eta", "etaP", "tau", "kappa"] {
        assert_eq!(j[key].as_array().unwrap().len(), 1, "{key}");
        assert_eq!(j[key][0][0].as_array().unwrap().len(), 2, "{key}");
    }
    assert!(j["legendre_residual"].as_f64().unwrap() < 1e-8);
}

fn genus_two_tau() -> nalgebra::DMatrix<C64> {
    nalgebra::DMatrix::from_row_slice(2, 2, &[c(0.3, 1.1), c(-0.2, 0.35), c(-0.2, 0.35), c(0.1, 0.9)])
}

#[test]
fn theta_is_periodic_and_quasi_periodic() {
    let tau = genus_two_tau();
    let ch = Characteristic { eps_p: vec![0.0, 0.0], eps: vec![0.0, 0.0] };
    let v = vec![c(0.13, -0.07), c(-0.31, 0.22)];
    let t0 = theta(&v, &tau, &ch, 1e-16).unwrap();
    for k in 0..2 {
        let mut w = v.clone();
        w[k] += 1.0;
        assert!((theta(&w, &tau, &ch, 1e-16).unwrap() - t0).norm() < 1e-12 * t0.norm());
    }
    for m in [[1.0, 0.0], [0.0, 1.0], [1.0, -1.0]] {
        let shift: Vec<C64> = (0..2).map(|i| tau[(i, 0)] * m[0] + tau[(i, 1)] * m[1]).collect();
        let w: Vec<C64> = v.iter().zip(&shift).map(|(a, b)| a + b).collect();
        let mut quad = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                quad += tau[(i, j)] * (m[i] * m[j]);
            }
        }
        let lin: C64 = (0..2).map(|i| v[i] * m[i]).sum();
        let factor = (-C64::i() * std::f64::consts::PI * quad - 2.0 * std::f64::consts::PI * C64::i() * lin).exp();
        let lhs = theta(&w, &tau, &ch, 1e-16).unwrap();
        assert!((lhs - factor * t0).norm() < 1e-10 * lhs.norm().max(t0.norm()));
    }
}

#[test]
fn theta_at_zero_matches_brute_force() {
    let tau = nalgebra::DMatrix::from_element(1, 1, c(0.0, 1.0));
    let t = theta(&[c(0.0, 0.0)], &tau, &Characteristic::zero(1), 1e-16).unwrap();
    let brute: f64 = (-30..=30).map(|n: i32| (-std::f64::consts::PI * (n * n) as f64).exp()).sum();
    assert!(t.im.abs() < 1e-15);
    assert!(t.re > 0.0);
    assert!((t.re - brute).abs() < 1e-14);
}

#[test]
fn theta_derivatives_match_central_differences() {
    let tau = genus_two_tau();
    let ch = Characteristic { eps_p: vec![0.5, 0.0], eps: vec![0.5, 0.5] };
    let v = vec![c(0.21, 0.05), c(-0.12, -0.09)];
    let h = 1e-4;
    for index in [vec![0], vec![1], vec![0, 1], vec![1, 1, 0]] {
        let exact = theta_derivative(&v, &tau, &ch, &index, 1e-16).unwrap();
        let (last, rest) = index.split_last().unwrap();
        let at = |s: f64| {
            let mut w = v.clone();
            w[*last] += s;
            if rest.is_empty() {
                theta(&w, &tau, &ch, 1e-16).unwrap()
            } else {
                theta_derivative(&w, &tau, &ch, rest, 1e-16).unwrap()
            }
        };
        let fd = (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
        assert!((fd - exact).norm() < 1e-7 * (1.0 + exact.norm()), "{index:?}: {fd} vs {exact}");
    }
}

#[test]
fn log_derivative_of_a_product_of_exponentials() {
    let tau = genus_two_tau();
    let ch = Characteristic::zero(2);
    let v = vec![c(0.4, 0.1), c(0.2, -0.3)];
    let dirs = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
    let (d2, rel) = log_theta_derivative(&v, &tau, &ch, &dirs, 1e-16).unwrap();
    let b = theta_batch(&v, &tau, &ch, &dirs, &[vec![], vec![0], vec![1], vec![0, 1]], 1e-16).unwrap();
    let expect = b.values[3] / b.values[0] - b.values[1] * b.values[2] / (b.values[0] * b.values[0]);
    assert!((d2 - expect).norm() < 1e-12 * expect.norm());
    assert!(rel > 0.0 && rel <= 1.0);
}

#[test]
fn riemann_characteristic_genus_one() {
    let pd = period_matrices(&lemniscatic()).unwrap();
    let k = riemann_char(&pd, &lemniscatic()).unwrap();
    assert_eq!(k, Characteristic { eps_p: vec![0.5], eps: vec![0.5] });
}

#[test]
fn riemann_characteristic_genus_two_is_odd_and_unique() {
    let mut rng = random::rng(3, 1);
    for _ in 0..3 {
        let cv = random::curve(&mut rng, 2, 5, 1.0).unwrap();
        assert_eq!(sigma_order(&cv), 3);
        let pd = period_matrices(&cv).unwrap();
        let k = riemann_char(&pd, &cv).unwrap();
        assert_eq!(k.parity(), 1);
        let dir: Vec<C64> = (0..2).map(|a| pd.omega_inv[(a, 0)]).collect();
        let passing = Characteristic::half_integers(2)
            .into_iter()
            .filter(|ch| {
                let prof = vanishing_profile(&pd, ch, &dir, 3).unwrap();
                prof[..3].iter().all(|&r| r < 1e-9) && prof[3] > 1e-6
            })
            .count();
        assert_eq!(passing, 1);
    }
}

#[test]
fn abel_of_empty_divisor_is_zero() {
    let u = abel(&lemniscatic(), &Divisor::empty()).unwrap();
    assert_eq!(u, vec![c(0.0, 0.0)]);
}

#[test]
fn abel_of_conjugate_pair_is_a_period() {
    let mut rng = random::rng(4, 2);
    for s in [3, 5] {
        let cv = random::curve(&mut rng, 2, s, 1.0).unwrap();
        let pd = period_matrices(&cv).unwrap();
        for _ in 0..3 {
            let d = random::divisor(&mut rng, &cv, 1).unwrap();
            let u = abel(&cv, &d.plus(&d.involution())).unwrap();
            assert!(pd.lattice_distance(&u) < 1e-7, "distance {:e}", pd.lattice_distance(&u));
        }
    }
}

#[test]
fn genus_one_wp_recovers_x() {
    let cv = lemniscatic();
    let side = ThetaSide::new(&cv).unwrap();
    let mut rng = random::rng(6, 0);
    for _ in 0..5 {
        let d = random::divisor(&mut rng, &cv, 1).unwrap();
        let (x, _) = d.coords()[0];
        let u = abel(&cv, &d).unwrap();
        let p = side.wp(&u, &[1, 1]).unwrap();
        assert!((p - x).norm() < 1e-8 * (1.0 + x.norm()), "{p} vs {x}");
    }
}

#[test]
fn wp_is_periodic_and_even() {
    let mut rng = random::rng(9, 0);
    let cv = random::curve(&mut rng, 2, 5, 1.0).unwrap();
    let side = ThetaSide::new(&cv).unwrap();
    let pd = &side.periods;
    for _ in 0..3 {
        let u = random::jacobian_point(&mut rng, pd);
        let shift = pd.lattice_vector(&[1.0, -2.0], &[0.0, 1.0]);
        let moved: Vec<C64> = u.iter().zip(&shift).map(|(a, b)| a + b).collect();
        let neg: Vec<C64> = u.iter().map(|a| -a).collect();
        for idx in [[1, 1], [1, 3], [3, 3]] {
            let base = side.wp(&u, &idx).unwrap();
            assert!((side.wp(&moved, &idx).unwrap() - base).norm() < 1e-7 * (1.0 + base.norm()));
            assert!((side.wp(&neg, &idx).unwrap() - base).norm() < 1e-9 * (1.0 + base.norm()));
        }
        let q = side.wp(&u, &[1, 1, 1]).unwrap();
        assert!((side.wp(&neg, &[1, 1, 1]).unwrap() + q).norm() < 1e-9 * (1.0 + q.norm()));
    }
}

#[test]
fn wp_rejects_bad_indices() {
    let cv = lemniscatic();
    let side = ThetaSide::new(&cv).unwrap();
    let u = vec![c(0.3, 0.1)];
    assert!(matches!(side.wp(&u, &[1]), Err(Error::InvalidInput(_))));
    assert!(matches!(side.wp(&u, &[1, 2]), Err(Error::InvalidInput(_))));
}

#[test]
fn bridge_genus_two() {
    let mut rng = random::rng(12, 0);
    for _ in 0..4 {
        let cv = random::curve(&mut rng, 2, 5, 1.0).unwrap();
        let side = ThetaSide::new(&cv).unwrap();
        let d = random::divisor(&mut rng, &cv, 2).unwrap();
        let rec = divisor_to_basis(&cv, &d).unwrap();
        let u = abel(&cv, &d).unwrap();
        for w in [1, 3] {
            let p = side.wp(&u, &[1, w]).unwrap();
            assert!((p - rec.p(w).unwrap()).norm() < 1e-6 * (1.0 + p.norm()));
            let q = side.wp(&u, &[1, 1, w]).unwrap();
            assert!((q.norm() - rec.q(w).unwrap().norm()).abs() < 1e-6 * (1.0 + q.norm()));
        }
    }
}
