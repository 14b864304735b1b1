use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use chsh_decoherence::decoherence::{decoherence_factor, effective_factor, SpinBathSpec};
use chsh_decoherence::geometry::{
    estimate_volume, in_e, in_l, satisfies_cap_conditions, z_part, zp_decompose, ViolationSet,
};
use chsh_decoherence::linalg::{
    add3, cross, dot, normalize, scale3, symmetric3_eigenvalues, tensor_product, trace_product,
    CMatrix, CMatrix2, CMatrix4, Vec3,
};
use chsh_decoherence::optimizer::{
    analytic_optimum_r1, euclidean_gradient_norm, maximize_violation,
};
use chsh_decoherence::state::{
    chsh_expectation, chsh_expectation_via_t, correlation_matrix, horodecki_max_violation,
    make_rho, make_rho_two_env, MeasurementConfig,
};
use chsh_decoherence::{Complex, DecoherenceFactor};

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn unit() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-1.0f64..1.0)
        .prop_filter("away from origin", |v| dot(v, v) > 1e-4)
        .prop_map(|v| normalize(&v))
}

fn config() -> impl Strategy<Value = MeasurementConfig> {
    [unit(), unit(), unit(), unit()]
        .prop_map(|[a, ap, b, bp]| MeasurementConfig::new(a, ap, b, bp).unwrap())
}

fn factor() -> impl Strategy<Value = DecoherenceFactor> {
    (0.0f64..=1.0, -std::f64::consts::PI..std::f64::consts::PI)
        .prop_map(|(m, phi)| DecoherenceFactor::from_polar(m, phi).unwrap())
}

fn complex() -> impl Strategy<Value = Complex> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex::new(re, im))
}

fn cmatrix2() -> impl Strategy<Value = CMatrix2> {
    prop::array::uniform4(complex()).prop_map(|e| CMatrix([[e[0], e[1]], [e[2], e[3]]]))
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det4(m: &CMatrix4) -> Complex {
    let mut a = m.0;
    let mut det = Complex::new(1.0, 0.0);
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                let sub = f * a[col][k];
                a[row][k] -= sub;
            }
        }
    }
    det
}

fn rotate(v: &Vec3, axis: &Vec3, angle: f64) -> Vec3 {
    let k = normalize(axis);
    let (s, c) = angle.sin_cos();
    let kv = cross(&k, v);
    let along = scale3(dot(&k, v) * (1.0 - c), &k);
    add3(&add3(&scale3(c, v), &scale3(s, &kv)), &along)
}

proptest! {
    #[test]
    fn trace_form_matches_correlation_form(cfg in config(), r in factor()) {
        let rho = make_rho(r);
        let t = correlation_matrix(&rho);
        assert_abs_diff_eq!(chsh_expectation(&rho, &cfg), chsh_expectation_via_t(&t, &cfg), epsilon = 1e-10);
    }

    #[test]
    fn horodecki_value_ignores_phase(m in 0.0f64..=1.0, phi in -10.0f64..10.0) {
        let rho = make_rho(DecoherenceFactor::from_polar(m, phi).unwrap());
        assert_abs_diff_eq!(horodecki_max_violation(&rho), 2.0 * (1.0 + m * m).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn two_environments_collapse_to_effective_factor(r1 in factor(), r2 in factor(), cfg in config()) {
        let two = make_rho_two_env(r1, r2);
        let one = make_rho(DecoherenceFactor::effective(r1, r2));
        prop_assert!(two.matrix().max_abs_diff(one.matrix()) == 0.0);
        assert_abs_diff_eq!(chsh_expectation(&two, &cfg), chsh_expectation(&one, &cfg), epsilon = 1e-14);
    }

    #[test]
    fn density_matrix_spectrum(r in factor()) {
        let rho = make_rho(r);
        let m = r.modulus();
        for lambda in [0.0, (1.0 - m) / 2.0, (1.0 + m) / 2.0] {
            let shifted = *rho.matrix() - CMatrix4::identity().scale(Complex::new(lambda, 0.0));
            prop_assert!(det4(&shifted).norm() < 1e-12);
        }
        assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn flipping_alice_negates_expectation(cfg in config(), r in factor()) {
        let [a, ap, b, bp] = cfg.vectors();
        let flipped = MeasurementConfig::new(scale3(-1.0, &a), scale3(-1.0, &ap), b, bp).unwrap();
        let rho = make_rho(r);
        assert_abs_diff_eq!(chsh_expectation(&rho, &flipped), -chsh_expectation(&rho, &cfg), epsilon = 1e-12);
    }

    #[test]
    fn bath_factor_is_bounded(
        couplings in prop::collection::vec(0.01f64..3.0, 1..12),
        split in 0.0f64..=1.0,
        t in 0.0f64..50.0,
    ) {
        let n = couplings.len();
        let bath = SpinBathSpec::new(couplings.clone(), vec![[split, 1.0 - split]; n]).unwrap();
        prop_assert!(decoherence_factor(&bath, t).unwrap().modulus() <= 1.0 + 1e-12);
        let balanced = SpinBathSpec::equal_weights(couplings).unwrap();
        prop_assert!(decoherence_factor(&balanced, t).unwrap().value().im.abs() < 1e-12);
    }

    #[test]
    fn effective_modulus_is_multiplicative(r1 in factor(), r2 in factor()) {
        assert_abs_diff_eq!(effective_factor(r1, r2).modulus(), r1.modulus() * r2.modulus(), epsilon = 1e-14);
    }

    #[test]
    fn tensor_product_is_bilinear(a in cmatrix2(), b in cmatrix2(), c in cmatrix2(), s in complex()) {
        let lhs = tensor_product(&(a.scale(s) + b), &c);
        let rhs = tensor_product(&a, &c).scale(s) + tensor_product(&b, &c);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn hermitian_trace_is_conjugate_symmetric(a in cmatrix2(), b in cmatrix2(), c in cmatrix2(), d in cmatrix2()) {
        let x = tensor_product(&a, &b);
        let y = tensor_product(&c, &d);
        let y = y + y.dagger();
        let x = x + x.dagger();
        let xy = trace_product(&x, &y);
        prop_assert!(xy.im.abs() < 1e-10);
        prop_assert!((xy - trace_product(&y, &x)).norm() < 1e-10);
    }

    #[test]
    fn gram_matrix_is_positive(r in factor()) {
        let g = correlation_matrix(&make_rho(r)).gram();
        let eig = symmetric3_eigenvalues(&g).unwrap();
        prop_assert!(eig.iter().all(|&l| l >= -1e-12));
        let m = r.modulus();
        assert_abs_diff_eq!(eig[0] + eig[1], 1.0 + m * m, epsilon = 1e-12);
    }

    #[test]
    fn zp_split_reconstructs_expectation(cfg in config(), r in factor()) {
        let zp = zp_decompose(&cfg, r);
        assert_abs_diff_eq!(zp.reconstruct(r), chsh_expectation(&make_rho(r), &cfg), epsilon = 1e-10);
        prop_assert!(zp.p_part.abs() <= 2.0 * SQRT2 + 1e-10);
        prop_assert!(zp.z_part.abs() <= 2.0 * SQRT2 + 1e-10);
    }

    #[test]
    fn violation_implies_enlarged_set_and_caps(cfg in config(), r in factor()) {
        if in_l(&cfg, r) {
            let b = chsh_expectation(&make_rho(r), &cfg).abs();
            prop_assert!(z_part(&cfg).abs() + 2.0 * SQRT2 * r.modulus() >= b - 1e-10);
            prop_assert!(in_e(&cfg, r));
            prop_assert!(satisfies_cap_conditions(&cfg, r));
        }
        if in_e(&cfg, r) {
            prop_assert!(satisfies_cap_conditions(&cfg, r));
        }
    }

    #[test]
    fn gradient_norm_is_bounded(cfg in config(), r in factor()) {
        let t = correlation_matrix(&make_rho(r));
        prop_assert!(euclidean_gradient_norm(&t, &cfg) <= 2.0 * SQRT2 + 1e-10);
    }

    #[test]
    fn optimum_has_violating_neighbourhood(
        a in unit(),
        helper in unit(),
        axes in prop::array::uniform4(unit()),
        angles in prop::array::uniform4(-0.05f64..0.05),
    ) {
        let ap = cross(&a, &helper);
        prop_assume!(dot(&ap, &ap) > 1e-4);
        let opt = analytic_optimum_r1(a, normalize(&ap)).unwrap();
        let vs = opt.vectors();
        let moved: [Vec3; 4] = std::array::from_fn(|i| rotate(&vs[i], &axes[i], angles[i]));
        let cfg = MeasurementConfig::normalized(moved).unwrap();
        prop_assert!(in_l(&cfg, DecoherenceFactor::ONE));
    }

    #[test]
    fn volume_estimates_are_reproducible(r in factor(), seed in any::<u64>()) {
        let a = estimate_volume(r, 2_000, seed, ViolationSet::E).unwrap();
        let b = estimate_volume(r, 2_000, seed, ViolationSet::E).unwrap();
        prop_assert_eq!(a.hits, b.hits);
        prop_assert_eq!(a.ci95_halfwidth.to_bits(), b.ci95_halfwidth.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn optimizer_never_beats_horodecki(r in factor(), seed in any::<u64>()) {
        let rho = make_rho(r);
        let best = maximize_violation(&rho, 2, seed).unwrap();
        prop_assert!(best.best_value <= horodecki_max_violation(&rho) + 1e-9);
    }
}
