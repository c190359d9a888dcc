//! Fractional-calculus numerics against independent high-precision values.

// The reference values carry more digits than an f64 holds, on purpose.
#![allow(clippy::excessive_precision)]

use relfix::frac::{
    apply_t, boundary_residuals, frac_integral, gamma, solve_fde, FdeProblem, FracError,
};
use relfix::grid::GridFunction;

/// Γ(x) to 30 significant digits, computed with an arbitrary-precision
/// library.
const GAMMA_TABLE: [(f64, f64); 18] = [
    (0.05, 19.4700853112555128640473209677),
    (0.1, 9.51350769866873183629248717727),
    (0.25, 3.62560990822190831193068515587),
    (0.5, 1.77245385090551602729816748334),
    (0.75, 1.22541670246517764512909830336),
    (0.9, 1.06862870211931935489730533569),
    (1.0, 1.0),
    (1.5, 0.886226925452758013649083741671),
    (1.9, 0.961765831907387419407574802125),
    (2.5, 1.32934038817913702047362561251),
    (2.9, 1.82735508062403609687439212404),
    (3.9, 5.29932973380970468093573715971),
    (4.5, 11.6317283965674489291442241094),
    (7.25, 1155.38101391998968720270376797),
    (10.0, 362880.0),
    (13.7, 2861595499.06601985377589532941),
    (17.5, 85634974475162.0638706959492772),
    (20.0, 121645100408832000.0),
];

#[test]
fn gamma_matches_reference_table() {
    for (x, exact) in GAMMA_TABLE {
        let got = gamma(x).unwrap();
        let rel = (got - exact).abs() / exact;
        assert!(
            rel <= 1e-10,
            "Γ({x}) = {got}, expected {exact}, rel error {rel:e}"
        );
    }
}

#[test]
fn gamma_recurrence_and_poles() {
    for k in 1..200 {
        let x = 0.05 + 0.1 * k as f64;
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs(), "x = {x}");
    }
    assert!(matches!(gamma(0.0), Err(FracError::Domain(_))));
    assert!(matches!(gamma(-2.0), Err(FracError::Domain(_))));
}

/// `1 / Γ(2k + 2 + ζ)` and `1 / Γ(2k + 3 + ζ)` for `ζ = 0.9`, `k = 0..9`;
/// later terms are below double precision.
const SERIES: [(f64, f64); 9] = [
    (0.5472390180777033761284178, 0.1887031096819666814235924),
    (0.04838541273896581574963907, 0.00987457402836037056115083),
    (
        0.001673656614976333993415395,
        0.0002425589297067150715094775,
    ),
    (3.070366198819178120373133e-5, 3.449849661594582157722622e-6),
    (3.484696627873315310830931e-7, 3.196969383370014046633882e-8),
    (
        2.686528893588247098011665e-9,
        2.082580537665307827916019e-10,
    ),
    (
        1.498259379615329372601453e-11,
        1.005543207795523068860035e-12,
    ),
    (
        6.324171118210836911069406e-14,
        3.742113087698720065721542e-15,
    ),
    (
        2.090565970781407857944995e-16,
        1.106119561260004157642855e-17,
    ),
];

/// `T(0)` for `h = u / 16 + sin t`, `ζ = 0.9`, from the term-by-term series
/// `I^ζ sin t = Σ (-1)^k t^{2k+1+ζ} / Γ(2k+2+ζ)`.
fn t_of_zero_series(t: f64) -> f64 {
    let zeta = 0.9;
    let mut inner = 0.0;
    let mut c = 0.0;
    for (k, (a, b)) in SERIES.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        inner += sign * t.powf(2.0 * k as f64 + 1.0 + zeta) * a;
        c += sign * b;
    }
    inner + 2.0 * t * c
}

#[test]
fn series_oracle_spot_values() {
    let frozen = [
        (0.125, 0.055279418974469938221),
        (0.25, 0.12860548173990944026),
        (0.5, 0.322483502865652619),
        (0.75, 0.56995471314327709649),
        (1.0, 0.85863225708195720375),
    ];
    assert_eq!(t_of_zero_series(0.0), 0.0);
    for (t, v) in frozen {
        assert!((t_of_zero_series(t) - v).abs() < 1e-15, "t = {t}");
    }
}

#[test]
fn t_of_zero_matches_series_oracle() {
    let prob = FdeProblem::demo(0.9, 512).unwrap();
    let got = apply_t(&GridFunction::zeros(512), &prob).unwrap();
    let err = got
        .nodes()
        .map(|(t, v)| (v - t_of_zero_series(t)).abs())
        .fold(0.0, f64::max);
    assert!(err <= 5e-6, "sup error {err:e}");
    // The scheme is second order, so the error is in fact much smaller.
    assert!(err <= 1e-6, "sup error {err:e}");
}

#[test]
fn power_rule_small_grids() {
    for zeta in [0.3, 0.9, 1.7] {
        for p in 0..=1 {
            let f = GridFunction::from_fn(16, |t| t.powi(p)).unwrap();
            let got = frac_integral(&f, zeta).unwrap();
            let c = gamma(p as f64 + 1.0).unwrap() / gamma(p as f64 + 1.0 + zeta).unwrap();
            for (t, v) in got.nodes() {
                let exact = c * t.powf(p as f64 + zeta);
                assert!(
                    (v - exact).abs() <= 1e-13,
                    "p = {p}, zeta = {zeta}, t = {t}"
                );
            }
        }
    }
}

#[test]
fn frac_integral_semigroup_on_grid() {
    // I^a I^b t = I^{a+b} t, exactly for linear data up to the second-order
    // error of integrating the non-linear intermediate.
    let n = 1024;
    let f = GridFunction::from_fn(n, |t| t).unwrap();
    let two_step = frac_integral(&frac_integral(&f, 0.4).unwrap(), 0.5).unwrap();
    let one_step = frac_integral(&f, 0.9).unwrap();
    assert!(two_step.sup_diff(&one_step).unwrap() < 1e-5);
}

#[test]
fn demo_solution_is_grid_convergent() {
    let solve = |n: usize| {
        solve_fde(&FdeProblem::demo(0.9, n).unwrap())
            .unwrap()
            .solution
    };
    let (coarse, mid, fine) = (solve(128), solve(256), solve(512));
    let gap = |a: &GridFunction, b: &GridFunction| {
        let stride = b.n_intervals() / a.n_intervals();
        a.values()
            .iter()
            .enumerate()
            .map(|(j, v)| (v - b.values()[j * stride]).abs())
            .fold(0.0, f64::max)
    };
    let e1 = gap(&coarse, &mid);
    let e2 = gap(&mid, &fine);
    assert!(e2 < 2e-6, "N = 256 vs 512 differ by {e2:e}");
    let order = (e1 / e2).log2();
    assert!(order > 1.8, "observed order {order}");
}

#[test]
fn demo_solution_properties() {
    let sol = solve_fde(&FdeProblem::demo(0.9, 512).unwrap()).unwrap();
    assert!(sol.trace.converged && sol.trace.preserved);
    assert_eq!(sol.solution.values()[0], 0.0);
    assert!(sol.lipschitz.passes);
    assert!(sol.notes.iter().any(|n| n.contains("outside (1, 2]")));
    // The fixed point of T from the trace agrees with one more application.
    let prob = FdeProblem::demo(0.9, 512).unwrap();
    let again = apply_t(&sol.solution, &prob).unwrap();
    assert!(again.sup_diff(&sol.solution).unwrap() < 1e-12);
    // Positive rhs on [0, 1] keeps the solution increasing.
    assert!(sol.solution.values().windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn boundary_residuals_are_stable_under_refinement() {
    // The integral condition holds exactly for the continuous operator; the
    // residual is the error of the one-sided slope at a t^{1+ζ}-type
    // singularity, so it should shrink roughly like h^ζ.
    let residual = |n: usize| {
        let sol = solve_fde(&FdeProblem::demo(0.9, n).unwrap()).unwrap();
        let (r0, r1) = boundary_residuals(&sol.solution);
        assert_eq!(r0, 0.0);
        r1
    };
    let rs: Vec<f64> = [128, 256, 512, 1024].into_iter().map(residual).collect();
    for w in rs.windows(2) {
        let ratio = w[0] / w[1];
        assert!(
            (1.6..2.1).contains(&ratio),
            "refinement ratio {ratio}, residuals {rs:?}"
        );
    }
}

#[test]
fn zero_rhs_boundary_residuals_vanish() {
    let sol = solve_fde(&FdeProblem::new(1.5, 64, |_, _| 0.0).unwrap()).unwrap();
    assert_eq!(boundary_residuals(&sol.solution), (0.0, 0.0));
}

#[test]
fn both_gamma_variants_solve_identically() {
    use relfix::frac::GammaVariant;
    let a = solve_fde(
        &FdeProblem::demo(0.9, 128)
            .unwrap()
            .with_gamma_variant(GammaVariant::AlphaPlusOne),
    )
    .unwrap();
    let b = solve_fde(&FdeProblem::demo(0.9, 128).unwrap()).unwrap();
    assert_eq!(a.solution, b.solution);
    assert!(a.lipschitz.bound < b.lipschitz.bound);
}
