//! Module-level invariants and worked examples that sit outside the
//! acceptance gate: numeric identities, curve shape, continuity, and the
//! honesty of the non-exact routes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use svfkit_core::dimension::{
    dimension_drop, lyapunov_dimension, lyapunov_exponents, DropOpts, DropVerdict, LyapunovMethod,
};
use svfkit_core::equilibrium::{
    classify3d, diagonal_equilibria, reducible3d_pressure, ClassifyOpts, Route,
};
use svfkit_core::multilinear::{
    chi, exterior_power, log_svf, singular_values, svf, FMat, Mat, QMat,
};
use svfkit_core::pressure::{
    partition_sum, pressure_curve, pressure_estimate, pressure_exact_nonneg, pressure_lower,
    pressure_upper, Potential, PressureOpts,
};
use svfkit_core::structure::{algebra_closure, irreducibility_test, quasimult_search, Verdict};
use svfkit_core::symbolic::{
    cylinder_measure, entropy_rate, enumerate_words, invariance_check, BernoulliSpec, MeasureSpec,
    PerronGibbsSpec, DEFAULT_WORD_BUDGET,
};
use svfkit_core::{parse_rational, MatrixTuple};

const BUDGET: u64 = 1 << 24;

fn rotation3(rng: &mut ChaCha12Rng) -> FMat {
    let mut m = FMat::identity(3);
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let mut g = FMat::identity(3);
        g[(i, i)] = t.cos();
        g[(j, j)] = t.cos();
        g[(i, j)] = -t.sin();
        g[(j, i)] = t.sin();
        m = m.mul(&g);
    }
    m
}

fn random_invertible(rng: &mut ChaCha12Rng, dim: usize, scale: f64) -> FMat {
    loop {
        let m = FMat::from_fn(dim, |_, _| rng.random_range(-scale..scale));
        if m.det().abs() > 1e-2 * scale.powi(dim as i32) {
            return m;
        }
    }
}

fn max_states_tuple() -> MatrixTuple {
    let mats: Vec<FMat> = (0..3)
        .map(|i| {
            let mut e = vec![1.0; 3];
            e[i] = 2.0;
            FMat::diagonal(e)
        })
        .collect();
    MatrixTuple::from_float(mats, None).unwrap()
}

#[test]
fn singular_values_recover_factored_gains() {
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    for _ in 0..50 {
        let u = rotation3(&mut rng);
        let v = rotation3(&mut rng);
        let a = u.mul(&FMat::diagonal(vec![5.0, 2.0, 1.0])).mul(&v);
        let spec = singular_values(&a).unwrap();
        for (got, want) in spec.values.iter().zip([5.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        let b = u.mul(&FMat::diagonal(vec![3.0, 2.0, 1.0])).mul(&v);
        assert!((svf(&b, 2.5).unwrap() - 6.0).abs() < 1e-10);
    }
}

// independent cofactor-expansion determinant for the exterior-power oracle
fn cofactor_det(m: &QMat, rows: &[usize], cols: &[usize]) -> svfkit_core::Rational {
    use num_traits::Zero;
    if rows.is_empty() {
        return parse_rational("1").unwrap();
    }
    let mut acc = svfkit_core::Rational::zero();
    let r0 = rows[0];
    for (pos, &c) in cols.iter().enumerate() {
        let sub_rows: Vec<usize> = rows[1..].to_vec();
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = cofactor_det(m, &sub_rows, &sub_cols);
        let term = m[(r0, c)].clone() * minor;
        if pos % 2 == 0 {
            acc = acc + term;
        } else {
            acc = acc - term;
        }
    }
    acc
}

#[test]
fn exterior_power_matches_cofactor_oracle() {
    let q = |s: &str| parse_rational(s).unwrap();
    let m = QMat::from_rows(vec![
        vec![q("1"), q("-2/3"), q("5")],
        vec![q("0"), q("7/2"), q("1/5")],
        vec![q("-1"), q("4"), q("2/7")],
    ])
    .unwrap();
    let w = exterior_power(&m, 2).unwrap();
    let combos = [[0usize, 1], [0, 2], [1, 2]];
    for (ri, rows) in combos.iter().enumerate() {
        for (ci, cols) in combos.iter().enumerate() {
            assert_eq!(
                w[(ri, ci)],
                cofactor_det(&m, rows, cols),
                "entry ({ri},{ci})"
            );
        }
    }
}

#[test]
fn chi_never_exceeds_svf() {
    let mut rng = ChaCha12Rng::seed_from_u64(22);
    for case in 0..1000 {
        let a = random_invertible(&mut rng, 3, 2.0);
        let s: f64 = rng.random_range(0.0..2.99);
        let minorant = chi(&a, s).unwrap();
        let value = svf(&a, s).unwrap();
        assert!(
            minorant <= value * (1.0 + 1e-8),
            "case {case}: chi {minorant} > svf {value} at s={s}"
        );
        // determinant floor |det|^{s/d} <= svf
        let det_floor = a.det().abs().powf(s / 3.0);
        assert!(det_floor <= value * (1.0 + 1e-10), "case {case}: det floor");
    }
}

#[test]
fn growth_sandwich() {
    let mut rng = ChaCha12Rng::seed_from_u64(33);
    for _ in 0..300 {
        let a = random_invertible(&mut rng, 3, 1.5);
        let b = random_invertible(&mut rng, 3, 1.5);
        let s: f64 = rng.random_range(0.1..2.9);
        let alpha_min_b = singular_values(&b).unwrap().min();
        let lhs = log_svf(&a, s).unwrap() + s * alpha_min_b.ln();
        let rhs = log_svf(&a.mul(&b), s).unwrap();
        assert!(lhs <= rhs + 1e-9, "sandwich fails: {lhs} vs {rhs}");
    }
}

#[test]
fn algebra_closure_ranks() {
    // a single irrational-angle rotation spans {I, J}: rank 2
    let t = 1.0_f64;
    let rot = FMat::from_rows(vec![vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]]).unwrap();
    let tuple = MatrixTuple::from_float(vec![rot.clone(), rot], None).unwrap();
    assert_eq!(algebra_closure(&tuple).rank, 2);

    // a generic pair saturates the full matrix space
    let mut rng = ChaCha12Rng::seed_from_u64(44);
    let a = random_invertible(&mut rng, 2, 1.0);
    let b = random_invertible(&mut rng, 2, 1.0);
    let generic = MatrixTuple::from_float(vec![a, b], None).unwrap();
    assert_eq!(algebra_closure(&generic).rank, 4);

    // upper-triangular pairs never reach the strictly-lower entries
    let q = |s: &str| parse_rational(s).unwrap();
    let u1 = QMat::from_rows(vec![vec![q("2"), q("1")], vec![q("0"), q("3")]]).unwrap();
    let u2 = QMat::from_rows(vec![vec![q("1"), q("-1")], vec![q("0"), q("2")]]).unwrap();
    let upper = MatrixTuple::from_rational(vec![u1, u2], None).unwrap();
    assert!(algebra_closure(&upper).rank <= 3);
}

#[test]
fn rotation_pair_is_irreducible_on_floats() {
    let rot =
        |t: f64| FMat::from_rows(vec![vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]]).unwrap();
    let tuple =
        MatrixTuple::from_float(vec![rot(std::f64::consts::PI / 5.0), rot(1.0)], None).unwrap();
    let report = irreducibility_test(&tuple);
    assert!(matches!(report.verdict, Verdict::Irreducible));
    assert!(
        !report.certified,
        "float irreducible is never a certificate"
    );
}

#[test]
fn partition_sums_of_the_diagonal_family() {
    let tuple = max_states_tuple();
    let pot = Potential::svf(1.5);
    // n = 1: every matrix has phi = 2
    let p1 = partition_sum(&tuple, &pot, 1, BUDGET).unwrap();
    assert!((p1 - 6.0_f64.ln()).abs() < 1e-12);
    // n = 2: 3 squared words with phi = 4, 6 mixed with phi = 2 sqrt 2
    let p2 = partition_sum(&tuple, &pot, 2, BUDGET).unwrap();
    let want = (3.0 * 4.0 + 6.0 * 2.0 * 2.0_f64.sqrt()).ln();
    assert!((p2 - want).abs() < 1e-12, "{p2} vs {want}");
    // averages stay above the exact pressure
    let exact = (2.0_f64.sqrt() + 3.0).ln();
    assert!(p2 / 2.0 >= exact);
    // Fekete upper bound at n_max = 10 is within 0.15 of the exact value
    let opts = PressureOpts {
        n_max: 10,
        ..Default::default()
    };
    let (upper, _) = pressure_upper(&tuple, &pot, &opts).unwrap();
    assert!(upper >= exact - 1e-12);
    assert!(upper - exact < 0.15, "gap {}", upper - exact);
    // the single-letter spectral minorant alone gives log chi = log 2
    // (eigenvalue tolerance: 1 is a double root of the first matrix)
    let spectral = chi(&tuple.float_mats()[0], 1.5).unwrap().ln();
    assert!((spectral - 2.0_f64.ln()).abs() < 1e-7);
    // the determinant minorant log(3 * 2^{s/3}) is stronger here and the
    // reported bound takes the max; either way it stays below the pressure
    let small = PressureOpts {
        n_max: 1,
        ..Default::default()
    };
    let (lower, method) = pressure_lower(&tuple, &pot, &small).unwrap();
    let det_bound = (3.0 * 2.0_f64.powf(1.5 / 3.0)).ln();
    assert!(
        (lower - det_bound).abs() < 1e-9,
        "lower {lower} by {method}"
    );
    assert!(lower >= spectral && lower <= exact);
}

#[test]
fn fekete_upper_bound_tightens_with_depth() {
    let mut rng = ChaCha12Rng::seed_from_u64(55);
    for _ in 0..10 {
        let a = random_invertible(&mut rng, 3, 0.5);
        let b = random_invertible(&mut rng, 3, 0.5);
        let tuple = MatrixTuple::from_float(vec![a, b], None).unwrap();
        let pot = Potential::svf(1.3);
        let o4 = PressureOpts {
            n_max: 4,
            ..Default::default()
        };
        let o8 = PressureOpts {
            n_max: 8,
            ..Default::default()
        };
        let (u4, _) = pressure_upper(&tuple, &pot, &o4).unwrap();
        let (u8, _) = pressure_upper(&tuple, &pot, &o8).unwrap();
        assert!(u8 <= u4 + 1e-12);
    }
}

#[test]
fn monotone_decrease_in_s_for_contractive_tuples() {
    let mut rng = ChaCha12Rng::seed_from_u64(66);
    let a = random_invertible(&mut rng, 3, 0.4);
    let b = random_invertible(&mut rng, 3, 0.4);
    let tuple = MatrixTuple::from_float(vec![a, b], None).unwrap();
    assert!(tuple.is_contractive().unwrap());
    let alpha_bar = tuple
        .float_mats()
        .iter()
        .map(|m| singular_values(m).unwrap().values[0])
        .fold(0.0_f64, f64::max);
    for n in 1..=6usize {
        for s in [0.3, 0.9, 1.4, 2.1] {
            let delta = 0.2;
            let base = partition_sum(&tuple, &Potential::svf(s), n, BUDGET).unwrap();
            let shifted = partition_sum(&tuple, &Potential::svf(s + delta), n, BUDGET).unwrap();
            assert!(
                shifted <= base + n as f64 * delta * alpha_bar.ln() + 1e-9,
                "n={n} s={s}"
            );
            assert!(
                shifted <= base + 1e-9,
                "strict decrease in s fails at n={n} s={s}"
            );
        }
    }
}

#[test]
fn pressure_curve_shape_for_contractive_tuples() {
    let mut rng = ChaCha12Rng::seed_from_u64(77);
    let a = random_invertible(&mut rng, 3, 0.45);
    let b = random_invertible(&mut rng, 3, 0.45);
    let tuple = MatrixTuple::from_float(vec![a, b], None).unwrap();
    let grid: Vec<f64> = (0..=12).map(|i| i as f64 * 0.25).collect();
    let opts = PressureOpts {
        n_max: 5,
        ..Default::default()
    };
    let rows = pressure_curve(&tuple, &grid, &opts).unwrap();
    for pair in rows.windows(2) {
        assert!(
            pair[1].estimate.upper < pair[0].estimate.upper + 1e-12,
            "upper curve not strictly decreasing at s={}",
            pair[1].s
        );
    }
    // convexity of the fixed-n average on each integer segment:
    // nonnegative second differences of a log-sum-exp of affine functions
    for n in 1..=4usize {
        for k in 0..3usize {
            let pts: Vec<f64> = (0..=4)
                .map(|i| k as f64 + i as f64 * 0.25)
                .map(|s| partition_sum(&tuple, &Potential::svf(s), n, BUDGET).unwrap())
                .collect();
            for w in pts.windows(3) {
                assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-9, "segment k={k}, n={n}");
            }
        }
    }
    // the similitude curve is the exact line log N + s log r
    let sim = MatrixTuple::from_float(
        vec![FMat::identity(3).scale(&0.5), FMat::identity(3).scale(&0.5)],
        None,
    )
    .unwrap();
    let rows = pressure_curve(&sim, &grid, &opts).unwrap();
    for row in rows {
        let want = 2.0_f64.ln() + row.s * 0.5_f64.ln();
        assert!(row.estimate.exact);
        assert!((row.estimate.lower - want).abs() < 1e-12);
    }
}

#[test]
fn pressure_is_stable_under_small_perturbations() {
    // non-explosion check: bounds move by at most K * eps with a generous
    // documented constant (K = 100 n_max covers the n_max-fold product
    // sensitivity at these scales)
    let mut rng = ChaCha12Rng::seed_from_u64(88);
    let opts = PressureOpts {
        n_max: 4,
        ..Default::default()
    };
    let k_const = 100.0 * opts.n_max as f64;
    for _ in 0..20 {
        let a = random_invertible(&mut rng, 3, 0.6);
        let b = random_invertible(&mut rng, 3, 0.6);
        let tuple = MatrixTuple::from_float(vec![a.clone(), b.clone()], None).unwrap();
        let base = pressure_estimate(&tuple, &Potential::svf(1.5), &opts).unwrap();
        for eps in [1e-3, 1e-4] {
            let perturb = |m: &FMat, rng: &mut ChaCha12Rng| {
                FMat::from_fn(3, |i, j| m[(i, j)] + rng.random_range(-eps..eps))
            };
            let tp =
                MatrixTuple::from_float(vec![perturb(&a, &mut rng), perturb(&b, &mut rng)], None)
                    .unwrap();
            let moved = pressure_estimate(&tp, &Potential::svf(1.5), &opts).unwrap();
            assert!((moved.upper - base.upper).abs() <= k_const * eps);
            assert!((moved.lower - base.lower).abs() <= k_const * eps);
        }
    }
}

#[test]
fn pressure_intervals_are_conjugation_stable() {
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    let opts = PressureOpts {
        n_max: 6,
        ..Default::default()
    };
    for _ in 0..10 {
        let a = random_invertible(&mut rng, 3, 0.6);
        let b = random_invertible(&mut rng, 3, 0.6);
        let x = loop {
            let m = random_invertible(&mut rng, 3, 1.0);
            // keep the conjugation mild so finite-n intervals stay close
            let spec = singular_values(&m).unwrap();
            if spec.values[0] / spec.min() < 4.0 {
                break m;
            }
        };
        let xi = x.inverse().unwrap();
        let tuple = MatrixTuple::from_float(vec![a.clone(), b.clone()], None).unwrap();
        let conj =
            MatrixTuple::from_float(vec![x.mul(&a).mul(&xi), x.mul(&b).mul(&xi)], None).unwrap();
        let p = pressure_estimate(&tuple, &Potential::svf(1.5), &opts).unwrap();
        let pc = pressure_estimate(&conj, &Potential::svf(1.5), &opts).unwrap();
        assert!(
            p.overlaps(&pc),
            "[{}, {}] vs [{}, {}]",
            p.lower,
            p.upper,
            pc.lower,
            pc.upper
        );
    }
}

#[test]
fn nonneg_pressure_sits_inside_generic_bounds() {
    let mut rng = ChaCha12Rng::seed_from_u64(110);
    let opts = PressureOpts {
        n_max: 8,
        ..Default::default()
    };
    for case in 0..50 {
        let mats: Vec<FMat> = (0..2)
            .map(|_| loop {
                let m = FMat::from_fn(3, |_, _| rng.random_range(0.0..1.0));
                if m.det().abs() > 1e-3 {
                    break m;
                }
            })
            .collect();
        let tuple = MatrixTuple::from_float(mats, None).unwrap();
        let exact = pressure_exact_nonneg(&tuple).unwrap();
        let est = pressure_estimate(&tuple, &Potential::norm_pow(1.0), &opts).unwrap();
        assert!(
            est.lower - 1e-9 <= exact && exact <= est.upper + 1e-9,
            "case {case}: {exact} outside [{}, {}]",
            est.lower,
            est.upper
        );
        // the Fekete averages decrease toward the exact value
        let a6 = partition_sum(&tuple, &Potential::norm_pow(1.0), 6, BUDGET).unwrap() / 6.0;
        let a12 = partition_sum(&tuple, &Potential::norm_pow(1.0), 12, BUDGET).unwrap() / 12.0;
        assert!(a12 >= exact - 1e-9 && a12 <= a6 + 1e-9, "case {case}");
    }
}

#[test]
fn perron_gibbs_entropy_sequence_is_nonincreasing() {
    // a 2x2 irreducible nonnegative pair gives a genuine Perron-Gibbs
    // carrier; its finite-n entropies must decrease toward the rate
    let m1 = FMat::from_rows(vec![vec![1.0, 0.5], vec![0.0, 0.7]]).unwrap();
    let m2 = FMat::from_rows(vec![vec![0.3, 0.0], vec![0.8, 0.2]]).unwrap();
    let mut sum = FMat::zero(2);
    for m in [&m1, &m2] {
        for i in 0..2 {
            for j in 0..2 {
                sum[(i, j)] += m[(i, j)];
            }
        }
    }
    // Perron data via the library route
    let eq = svfkit_core::equilibrium::nonneg_equilibria(&[m1, m2]).unwrap();
    let state = &eq.states[0];
    let mut last = f64::INFINITY;
    for n in 1..=8 {
        let e = entropy_rate(&state.spec, n, DEFAULT_WORD_BUDGET, 0).unwrap();
        assert!(e.value <= last + 1e-12, "n={n}");
        assert!(e.is_upper_bound);
        last = e.value;
    }
    let inv = invariance_check(&state.spec, 5, DEFAULT_WORD_BUDGET, 0).unwrap();
    assert!(inv.max_defect <= 1e-12);
}

#[test]
fn equilibrium_states_attain_the_variational_principle() {
    let tuple = max_states_tuple();
    let s = 1.5;
    let report = classify3d(&tuple, s, &ClassifyOpts::default()).unwrap();
    let pressure = report.pressure.lower;
    for state in &report.states {
        let mut last = f64::INFINITY;
        for n in 1..=6usize {
            let mut h = 0.0;
            let mut lambda = 0.0;
            for w in enumerate_words(3, n, BUDGET).unwrap() {
                let mass = cylinder_measure(&state.spec, &w).unwrap();
                if mass > 0.0 {
                    h -= mass * mass.ln();
                }
                let product = svfkit_core::symbolic::word_product(&tuple, &w).unwrap();
                lambda += mass * log_svf(&product, s).unwrap();
            }
            let value = (h + lambda) / n as f64;
            assert!(value >= pressure - 1e-9, "n={n}: {value} < {pressure}");
            assert!(
                value <= last + 1e-9,
                "finite-n variational sequence must descend"
            );
            last = value;
        }
        // full support down to length 8
        for n in [7usize, 8] {
            for w in enumerate_words(3, n, BUDGET).unwrap() {
                assert!(cylinder_measure(&state.spec, &w).unwrap() > 0.0);
            }
        }
    }
}

#[test]
fn repeated_diagonal_matrices_collapse_to_one_state() {
    let t = MatrixTuple::from_float(
        vec![
            FMat::diagonal(vec![0.9, 0.4, 0.2]),
            FMat::diagonal(vec![0.9, 0.4, 0.2]),
        ],
        None,
    )
    .unwrap();
    let eq = diagonal_equilibria(&t, 1.5).unwrap();
    assert_eq!(eq.states.len(), 1);
    match &eq.states[0].spec {
        MeasureSpec::Bernoulli(b) => {
            assert!((b.probs[0] - 0.5).abs() < 1e-12);
        }
        _ => panic!(),
    }
}

#[test]
fn quasimultiplicativity_degrades_on_axis_separating_pairs() {
    // the diagonal family: phi-mass of i^n j^n pairs cannot be bridged
    let tuple = max_states_tuple();
    let report = quasimult_search(&tuple, 1.5, 2, 5, BUDGET).unwrap();
    let ratios: Vec<f64> = report.worst_by_length.iter().map(|(_, r)| *r).collect();
    assert!(
        ratios.last().unwrap() < &ratios[0],
        "worst ratio should degrade with word length: {ratios:?}"
    );
    // 1^n 2^n style pairs force the degradation; the worst ratio at depth
    // 5 is already well below the depth-1 value
    assert!(ratios.last().unwrap() / ratios[0] < 0.75, "{ratios:?}");
}

#[test]
fn norm_range_classification_is_unique_for_the_cyclic_pair() {
    let lambda = 2.0;
    let a1 = FMat::from_rows(vec![
        vec![0.0, 0.0, lambda],
        vec![1.0, 0.0, 0.0],
        vec![0.0, lambda, 0.0],
    ])
    .unwrap();
    let a2 = a1.transpose();
    let tuple = MatrixTuple::from_float(vec![a1, a2], None).unwrap();
    for s in [0.5, 1.0, 2.0, 2.5] {
        let report = classify3d(&tuple, s, &ClassifyOpts::default()).unwrap();
        // a generalized permutation tuple has explicit states in every range
        assert_eq!(report.route, Route::GeneralizedPermutation, "s={s}");
        assert!(report.multiplicity_bound <= 3, "s={s}");
        assert!(!report.states.is_empty());
    }
}

#[test]
fn generic_irreducible_pair_reports_the_candidate_route() {
    let mut rng = ChaCha12Rng::seed_from_u64(120);
    // rotations with non-uniform gains: irreducible but neither a
    // similitude nor a permutation tuple
    let gains = FMat::diagonal(vec![0.7, 0.5, 0.3]);
    let a = rotation3(&mut rng).mul(&gains).mul(&rotation3(&mut rng));
    let b = rotation3(&mut rng).mul(&gains).mul(&rotation3(&mut rng));
    let tuple = MatrixTuple::from_float(vec![a, b], None).unwrap();
    let report = classify3d(&tuple, 1.5, &ClassifyOpts::default()).unwrap();
    assert_eq!(report.route, Route::StronglyIrreducibleCandidate);
    assert_eq!(report.multiplicity_bound, 6);
    assert!(report.states.is_empty());
    let quasi = report.quasimult.expect("evidence attached");
    assert!(quasi.found && quasi.c >= 1.0);
}

#[test]
fn scalar_isometry_blocks_make_all_three_candidates_agree() {
    let mut rng = ChaCha12Rng::seed_from_u64(130);
    let s = 1.4;
    let r: Vec<f64> = vec![0.5, 0.3];
    // b_i = r_i (the square root of det C_i): the three orderings coincide
    let rot2 = |rng: &mut ChaCha12Rng| {
        let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        FMat::from_rows(vec![vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]]).unwrap()
    };
    let c_mats: Vec<FMat> = r.iter().map(|&ri| rot2(&mut rng).scale(&ri)).collect();
    let opts = PressureOpts {
        n_max: 5,
        ..Default::default()
    };
    let report = reducible3d_pressure(&r, &c_mats, s, &opts).unwrap();
    let want = (r[0].powf(s) + r[1].powf(s)).ln();
    for est in [
        &report.scalar_leading,
        &report.scalar_middle,
        &report.scalar_trailing,
    ] {
        assert!(est.exact, "similitude candidates are exact");
        assert!((est.lower - want).abs() < 1e-10);
    }
}

#[test]
fn lyapunov_exponent_sum_matches_log_det_average() {
    // closed form: exact identity
    let tuple = MatrixTuple::from_float(
        vec![
            FMat::diagonal(vec![0.8, 0.5, 0.25]),
            FMat::diagonal(vec![0.3, 0.6, 0.45]),
        ],
        None,
    )
    .unwrap();
    let probs = vec![0.3, 0.7];
    let measure = MeasureSpec::Bernoulli(BernoulliSpec::new(probs.clone()).unwrap());
    let spec = lyapunov_exponents(&tuple, &measure, &LyapunovMethod::ClosedForm, BUDGET).unwrap();
    let sum: f64 = spec.exponents.iter().sum();
    let want: f64 = tuple
        .float_mats()
        .iter()
        .zip(&probs)
        .map(|(m, &p)| p * m.det().abs().ln())
        .sum();
    assert!((sum - want).abs() < 1e-12);

    // Monte Carlo: within three standard errors of the deterministic value
    let mut rng = ChaCha12Rng::seed_from_u64(140);
    let a = random_invertible(&mut rng, 2, 0.8);
    let b = random_invertible(&mut rng, 2, 0.8);
    let t2 = MatrixTuple::from_float(vec![a, b], None).unwrap();
    let uniform = MeasureSpec::Bernoulli(BernoulliSpec::uniform(2));
    let det_words = lyapunov_exponents(
        &t2,
        &uniform,
        &LyapunovMethod::DeterministicWords { n: 10 },
        BUDGET,
    )
    .unwrap();
    let mc = lyapunov_exponents(
        &t2,
        &uniform,
        &LyapunovMethod::MonteCarlo {
            samples: 10_000,
            length: 200,
            seed: 77,
        },
        BUDGET,
    )
    .unwrap();
    // the finite-n cylinder average over-estimates the top aggregate by
    // O(1/n); allow that systematic bias on top of the sampling error
    let bias_allowance = 0.06;
    for k in 0..2 {
        let se = mc.half_widths[k].max(1e-6);
        assert!(
            (mc.exponents[k] - det_words.exponents[k]).abs() <= 3.0 * se + bias_allowance,
            "exponent {k}: mc {} vs words {} (se {se})",
            mc.exponents[k],
            det_words.exponents[k]
        );
    }
    // the top aggregate is an infimum sequence: words at n=10 dominate mc
    assert!(det_words.exponents[0] >= mc.exponents[0] - 3.0 * mc.half_widths[0] - 1e-3);
    let mc_sum: f64 = mc.exponents.iter().sum();
    let want2: f64 = t2
        .float_mats()
        .iter()
        .map(|m| 0.5 * m.det().abs().ln())
        .sum();
    let se_sum: f64 = mc.half_widths.iter().sum();
    assert!((mc_sum - want2).abs() <= 3.0 * se_sum + 1e-3);
}

#[test]
fn variational_inequality_on_a_grid() {
    // h + lambda(phi^s) <= pressure upper bound at every grid point
    let tuple = max_states_tuple();
    let probs = vec![0.2, 0.3, 0.5];
    let measure = MeasureSpec::Bernoulli(BernoulliSpec::new(probs.clone()).unwrap());
    let spec = lyapunov_exponents(&tuple, &measure, &LyapunovMethod::ClosedForm, BUDGET).unwrap();
    let h: f64 = -probs.iter().map(|p| p * p.ln()).sum::<f64>();
    let opts = PressureOpts {
        n_max: 6,
        ..Default::default()
    };
    for i in 0..=11 {
        let s = 0.25 * i as f64;
        let value = h + spec.svf_exponent(s);
        let est = pressure_estimate(&tuple, &Potential::svf(s), &opts).unwrap();
        assert!(value <= est.upper + 1e-9, "s={s}: {value} > {}", est.upper);
    }
    // the Lyapunov dimension of the affinity-root equilibrium state
    // contains the affinity dimension (scaled family): the state must be
    // taken at the root itself, where h + lambda(phi^s) = P(s) = 0
    let scaled = MatrixTuple::from_float(
        tuple
            .float_mats()
            .iter()
            .map(|m| m.scale(&(1.0 / 3.0)))
            .collect(),
        None,
    )
    .unwrap();
    let root_guess = svfkit_core::equilibrium::affinity_dimension_auto(
        &scaled,
        &PressureOpts::default(),
        &svfkit_core::structure::PermDetectOpts::default(),
    )
    .unwrap()
    .midpoint();
    let report = classify3d(&scaled, root_guess, &ClassifyOpts::default()).unwrap();
    let eq_probs = match &report.states[0].spec {
        MeasureSpec::Bernoulli(b) => b.probs.clone(),
        _ => panic!(),
    };
    let eq_measure = MeasureSpec::Bernoulli(BernoulliSpec::new(eq_probs.clone()).unwrap());
    let eq_spec =
        lyapunov_exponents(&scaled, &eq_measure, &LyapunovMethod::ClosedForm, BUDGET).unwrap();
    let eq_h: f64 = -eq_probs.iter().map(|p| p * p.ln()).sum::<f64>();
    let ld = lyapunov_dimension(eq_h, &eq_spec, 3);
    let aff = svfkit_core::equilibrium::affinity_dimension_auto(
        &scaled,
        &PressureOpts::default(),
        &svfkit_core::structure::PermDetectOpts::default(),
    )
    .unwrap();
    // the equilibrium state at the affinity root maximizes the Lyapunov
    // dimension, so the interval must contain the root
    assert!(
        ld.lo <= aff.midpoint() + 1e-6 && aff.midpoint() <= ld.hi + 1e-6,
        "[{}, {}] vs {}",
        ld.lo,
        ld.hi,
        aff.midpoint()
    );
}

#[test]
fn five_map_degenerate_system_still_drops_at_pressure_level() {
    // 2D diagonal system built so that, for one special choice of
    // translations, the attractor is a line segment that survives the
    // removal of any single map; the affinity dimension (a pressure-level
    // quantity) still drops strictly.
    let q = |s: &str| parse_rational(s).unwrap();
    let a = QMat::diagonal(vec![q("1/3"), q("1/5")]);
    let b = QMat::diagonal(vec![q("1/2"), q("1/4")]);
    let tuple =
        MatrixTuple::from_rational(vec![a.clone(), a.clone(), a, b.clone(), b], None).unwrap();
    let report = dimension_drop(&tuple, 4, &DropOpts::default()).unwrap();
    assert!(report.full.exact && report.reduced.exact);
    assert_eq!(report.verdict, DropVerdict::StrictDrop);
    assert!(report.gap > 1e-6, "gap {}", report.gap);
    // cross-check the full dimension against the slot-pressure oracle
    // max(sum (1/3)^s-type slot equations); root of the dominant slot
    let f = |s: f64| {
        let axis1 = 3.0 * (1.0_f64 / 3.0).powf(s) + 2.0 * 0.5_f64.powf(s);
        let axis2 = 3.0 * 0.2_f64.powf(s) + 2.0 * 0.25_f64.powf(s);
        let slot_a = 3.0 * (1.0 / 3.0) * 0.2_f64.powf(s - 1.0) + 2.0 * 0.5 * 0.25_f64.powf(s - 1.0);
        let slot_b = 3.0 * 0.2 * (1.0_f64 / 3.0).powf(s - 1.0) + 2.0 * 0.25 * 0.5_f64.powf(s - 1.0);
        if s <= 1.0 {
            axis1.max(axis2).ln()
        } else {
            slot_a.max(slot_b).ln()
        }
    };
    let (mut lo, mut hi) = (0.0_f64, 2.0_f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let oracle_root = 0.5 * (lo + hi);
    assert!(
        (report.full.midpoint() - oracle_root).abs() < 1e-7,
        "{} vs oracle {oracle_root}",
        report.full.midpoint()
    );
}

#[test]
fn perron_gibbs_full_support_for_positive_data() {
    let m1 = FMat::from_rows(vec![vec![0.6, 0.2], vec![0.1, 0.5]]).unwrap();
    let m2 = FMat::from_rows(vec![vec![0.4, 0.3], vec![0.2, 0.1]]).unwrap();
    let eq = svfkit_core::equilibrium::nonneg_equilibria(&[m1, m2]).unwrap();
    assert_eq!(eq.states.len(), 1);
    let state = &eq.states[0];
    assert!(state.fully_supported);
    match &state.spec {
        MeasureSpec::PerronGibbs(p) => {
            let _: &PerronGibbsSpec = p;
            assert_eq!(p.period, 1);
        }
        _ => panic!("expected a Perron-Gibbs carrier"),
    }
}

#[test]
fn hidden_one_plus_two_block_tuple_takes_the_candidate_route() {
    // b (+) C with irreducible integer C blocks, hidden by a rational
    // basis change: the pipeline must find the split, refuse explicit
    // states, and return the three-candidate interval
    let q = |s: &str| parse_rational(s).unwrap();
    let assemble = |b: &str, c: [[&str; 2]; 2]| {
        QMat::from_rows(vec![
            vec![q(b), q("0"), q("0")],
            vec![q("0"), q(c[0][0]), q(c[0][1])],
            vec![q("0"), q(c[1][0]), q(c[1][1])],
        ])
        .unwrap()
    };
    let a1 = assemble("1/2", [["0", "1/2"], ["1/2", "1/2"]]);
    let a2 = assemble("1/3", [["1/2", "1/4"], ["0", "1/2"]]);
    let x = QMat::from_rows(vec![
        vec![q("1"), q("1"), q("0")],
        vec![q("0"), q("1"), q("2")],
        vec![q("1"), q("0"), q("1")],
    ])
    .unwrap();
    let xi = x.inverse().unwrap();
    let tuple =
        MatrixTuple::from_rational(vec![x.mul(&a1).mul(&xi), x.mul(&a2).mul(&xi)], None).unwrap();
    let s = 1.5;
    let report = classify3d(&tuple, s, &ClassifyOpts::default()).unwrap();
    assert_eq!(report.route, Route::ReducibleOnePlusTwo);
    assert_eq!(report.multiplicity_bound, 3);
    assert!(report.states.is_empty());
    let r3 = report.reducible3d.as_ref().expect("candidates attached");
    // the combined candidate interval overlaps the direct estimate on the
    // original (conjugated) tuple
    let opts = PressureOpts {
        n_max: 8,
        ..Default::default()
    };
    let direct = pressure_estimate(&tuple, &Potential::svf(s), &opts).unwrap();
    assert!(
        r3.combined.overlaps(&direct),
        "[{}, {}] vs [{}, {}]",
        r3.combined.lower,
        r3.combined.upper,
        direct.lower,
        direct.upper
    );
}

#[test]
fn float_conjugated_permutation_tuple_is_detected() {
    let lambda = 2.0;
    let a1 = FMat::from_rows(vec![
        vec![0.0, 0.0, lambda],
        vec![1.0, 0.0, 0.0],
        vec![0.0, lambda, 0.0],
    ])
    .unwrap();
    let a2 = a1.transpose();
    let x = FMat::from_rows(vec![
        vec![1.0, 0.5, 0.0],
        vec![0.0, 1.0, -0.25],
        vec![0.5, 0.0, 1.0],
    ])
    .unwrap();
    let xi = x.inverse().unwrap();
    let tuple =
        MatrixTuple::from_float(vec![x.mul(&a1).mul(&xi), x.mul(&a2).mul(&xi)], None).unwrap();
    let form = svfkit_core::structure::detect_generalized_permutation(
        &tuple,
        &svfkit_core::structure::PermDetectOpts::default(),
    )
    .unwrap()
    .expect("detection through float eigenlines");
    assert!(form.residual(&tuple).unwrap() < 1e-9);
    // classification goes through the lift with two states, as for the
    // untransformed tuple
    let report = classify3d(&tuple, 1.5, &ClassifyOpts::default()).unwrap();
    assert_eq!(report.route, Route::GeneralizedPermutation);
    assert_eq!(report.states.len(), 2);
}

#[test]
fn commuting_tuple_with_irrational_eigenvalues_reports_a_float_witness() {
    // companion matrix of an irreducible cubic: no rational eigenvalues,
    // but a real eigenline exists and the pair (A, A^2) shares it
    let q = |s: &str| parse_rational(s).unwrap();
    let a = QMat::from_rows(vec![
        vec![q("0"), q("0"), q("1")],
        vec![q("1"), q("0"), q("1")],
        vec![q("0"), q("1"), q("0")],
    ])
    .unwrap();
    let a2 = a.mul(&a);
    let tuple = MatrixTuple::from_rational(vec![a, a2], None).unwrap();
    let report = irreducibility_test(&tuple);
    match &report.verdict {
        Verdict::Reducible(w) => {
            assert!(!report.certified, "irrational witness cannot be certified");
            assert!(w.basis_q.is_none());
            // the float witness should still be numerically invariant
            let basis = &w.basis_f;
            for m in tuple.float_mats() {
                for v in basis {
                    let image = m.apply(v);
                    // image must lie in the span of the witness
                    let norm = |x: &[f64]| x.iter().map(|y| y * y).sum::<f64>().sqrt();
                    let dot: f64 = image.iter().zip(&basis[0]).map(|(x, y)| x * y).sum();
                    let scale = norm(&image) * norm(&basis[0]);
                    assert!(
                        (dot.abs() - scale).abs() <= 1e-6 * scale,
                        "image leaves the witness line"
                    );
                }
            }
        }
        other => panic!("expected an uncertified Reducible, got {other:?}"),
    }
}

#[test]
fn conjugated_diagonal_tuple_keeps_the_exact_dimension_route() {
    let q = |s: &str| parse_rational(s).unwrap();
    let d1 = QMat::diagonal(vec![q("2/3"), q("1/3"), q("1/3")]);
    let d2 = QMat::diagonal(vec![q("1/3"), q("2/3"), q("1/3")]);
    let d3 = QMat::diagonal(vec![q("1/3"), q("1/3"), q("2/3")]);
    let direct =
        MatrixTuple::from_rational(vec![d1.clone(), d2.clone(), d3.clone()], None).unwrap();
    let x = QMat::from_rows(vec![
        vec![q("1"), q("2"), q("0")],
        vec![q("0"), q("1"), q("1")],
        vec![q("1"), q("0"), q("3")],
    ])
    .unwrap();
    let xi = x.inverse().unwrap();
    let hidden = MatrixTuple::from_rational(
        vec![
            x.mul(&d1).mul(&xi),
            x.mul(&d2).mul(&xi),
            x.mul(&d3).mul(&xi),
        ],
        None,
    )
    .unwrap();
    let popts = PressureOpts::default();
    let dopts = svfkit_core::structure::PermDetectOpts::default();
    let a_direct =
        svfkit_core::equilibrium::affinity_dimension_auto(&direct, &popts, &dopts).unwrap();
    let a_hidden =
        svfkit_core::equilibrium::affinity_dimension_auto(&hidden, &popts, &dopts).unwrap();
    assert!(
        a_direct.exact && a_hidden.exact,
        "both routes must be exact"
    );
    assert!(
        (a_direct.midpoint() - a_hidden.midpoint()).abs() < 1e-8,
        "{} vs {}",
        a_direct.midpoint(),
        a_hidden.midpoint()
    );
}

#[test]
fn commuting_pair_with_shared_irrational_eigenline_is_reducible() {
    // [[1,1],[1,0]] has discriminant 5 (not a square); any matrix
    // commuting with it shares its golden-ratio eigenlines, and the
    // quadratic-field check must find that without float guesswork
    let q = |s: &str| parse_rational(s).unwrap();
    let a = QMat::from_rows(vec![vec![q("1"), q("1")], vec![q("1"), q("0")]]).unwrap();
    let b = a.mul(&a); // commutes with a
    let tuple = MatrixTuple::from_rational(vec![a, b], None).unwrap();
    let report = irreducibility_test(&tuple);
    match &report.verdict {
        Verdict::Reducible(w) => {
            assert_eq!(w.dim(), 1);
            // the witness is the golden-ratio line (1, 1/phi) ~ (phi, 1)
            let v = &w.basis_f[0];
            let ratio = v[0] / v[1];
            let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
            assert!(
                (ratio - phi).abs() < 1e-9 || (ratio - (1.0 - phi)).abs() < 1e-9,
                "line slope {ratio}"
            );
        }
        other => panic!("expected Reducible, got {other:?}"),
    }
}

#[test]
fn hidden_block_structures_are_recovered_in_bulk() {
    use svfkit_core::structure::block_triangularize;
    let mut rng = ChaCha12Rng::seed_from_u64(160);
    let rand_q = |rng: &mut ChaCha12Rng| {
        let num: i64 = rng.random_range(-5..=5);
        let den: i64 = rng.random_range(1..=5);
        svfkit_core::Rational::new(num.into(), den.into())
    };
    let mut fully_triangular = 0;
    let mut one_two = 0;
    for case in 0..40 {
        // hidden invariant flag or 1 (+) 2 split, conjugated by a random
        // unimodular-ish rational basis change
        let upper_mode = case % 2 == 0;
        let mats: Vec<QMat> = (0..2)
            .map(|_| loop {
                let m = QMat::from_fn(3, |i, j| {
                    let below = if upper_mode { i > j } else { i > 0 && j == 0 };
                    if below {
                        svfkit_core::Rational::new(0.into(), 1.into())
                    } else {
                        rand_q(&mut rng)
                    }
                });
                use num_traits::Zero;
                if !m.det().is_zero() {
                    break m;
                }
            })
            .collect();
        let x = loop {
            let m = QMat::from_fn(3, |_, _| rand_q(&mut rng));
            use num_traits::Zero;
            if !m.det().is_zero() {
                break m;
            }
        };
        let xi = x.inverse().unwrap();
        let hidden: Vec<QMat> = mats.iter().map(|m| x.mul(m).mul(&xi)).collect();
        let tuple = MatrixTuple::from_rational(hidden, None).unwrap();
        let report = irreducibility_test(&tuple);
        assert!(
            matches!(report.verdict, Verdict::Reducible(_)),
            "case {case}: hidden block tuple not seen as reducible"
        );
        let tri = block_triangularize(&tuple)
            .unwrap()
            .expect("reducible tuples split");
        assert_eq!(tri.residual(&tuple).unwrap(), 0.0, "case {case}");
        match tri.dims.as_slice() {
            [1, 1, 1] => fully_triangular += 1,
            [1, 2] | [2, 1] => one_two += 1,
            other => panic!("case {case}: unexpected block dims {other:?}"),
        }
    }
    // upper-triangular cases must split completely; the column-constrained
    // cases may be either depending on the random 2x2 part
    assert!(fully_triangular >= 20, "{fully_triangular}");
    assert!(fully_triangular + one_two == 40);
}
