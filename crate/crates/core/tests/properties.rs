use nalgebra::Matrix3;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stokes_mg::lfa::{self, Frequency};
use stokes_mg::multigrid::{prolong, restrict};
use stokes_mg::stencil::{apply_divergence, apply_gradient, apply_stokes};
use stokes_mg::{GridSpec, RelaxParams, RelaxScheme, Smoother, StaggeredField, TransferStencil};

fn field(grid: GridSpec, seed: u64) -> StaggeredField {
    StaggeredField::random(grid, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn scheme() -> impl Strategy<Value = RelaxScheme> {
    prop::sample::select(RelaxScheme::ALL.to_vec())
}

fn size() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![4usize, 8, 16])
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sweep_is_linear_on_homogeneous_problem(s in scheme(), n in size(), seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let grid = GridSpec::new(n).unwrap();
        let zero = StaggeredField::zeros(grid);
        let sm = Smoother::preset(s);
        let (x, y) = (field(grid, seed), field(grid, seed ^ 1));
        let mut comb = x.clone();
        comb.scale(a);
        comb.axpy(b, &y);
        let lhs = sm.apply(grid, &zero, &comb).unwrap();
        let mut rhs = sm.apply(grid, &zero, &x).unwrap();
        rhs.scale(a);
        rhs.axpy(b, &sm.apply(grid, &zero, &y).unwrap());
        let mut d = lhs;
        d.sub_assign(&rhs);
        prop_assert!(d.max_abs() <= 1e-9 * (1.0 + rhs.max_abs()), "{}", d.max_abs());
    }

    #[test]
    fn stokes_operator_is_symmetric(n in size(), seed in any::<u64>()) {
        let grid = GridSpec::new(n).unwrap();
        let (x, y) = (field(grid, seed), field(grid, seed ^ 2));
        let lhs = apply_stokes(grid, &x).unwrap().dot(&y);
        let rhs = x.dot(&apply_stokes(grid, &y).unwrap());
        prop_assert!((lhs - rhs).abs() < 1e-12 * (n * n) as f64 * x.norm() * y.norm());
    }

    #[test]
    fn gradient_is_minus_adjoint_of_divergence(n in size(), seed in any::<u64>()) {
        let grid = GridSpec::new(n).unwrap();
        let (x, y) = (field(grid, seed), field(grid, seed ^ 3));
        let div = apply_divergence(grid, &x.u, &x.v).unwrap();
        let (gu, gv) = apply_gradient(grid, &y.p).unwrap();
        let lhs: f64 = div.iter().zip(&y.p).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.u.iter().zip(&gu).chain(x.v.iter().zip(&gv)).map(|(a, b)| a * b).sum();
        prop_assert!((lhs + rhs).abs() < 1e-13 * n as f64 * x.norm() * y.norm());
    }

    #[test]
    fn transfers_are_adjoint(n in prop::sample::select(vec![8usize, 16, 32]), seed in any::<u64>(), shifted in any::<bool>()) {
        let st = if shifted { TransferStencil::Shifted } else { TransferStencil::Centered };
        let fine = GridSpec::new(n).unwrap();
        let coarse = fine.coarser().unwrap();
        let (x, y) = (field(fine, seed), field(coarse, seed ^ 4));
        let lhs = restrict(fine, &x, st).unwrap().dot(&y);
        let rhs = 0.25 * x.dot(&prolong(coarse, &y, st).unwrap());
        prop_assert!((lhs - rhs).abs() < 1e-13 * x.norm() * y.norm());
    }

    #[test]
    fn mean_removal_is_a_projection(n in size(), seed in any::<u64>()) {
        let grid = GridSpec::new(n).unwrap();
        let mut x = field(grid, seed);
        x.remove_mean();
        prop_assert!(x.means().iter().all(|m| m.abs() < 1e-15));
        let before = x.clone();
        x.remove_mean();
        x.sub_assign(&before);
        prop_assert!(x.max_abs() < 1e-16);
    }

    #[test]
    fn eig3_satisfies_vieta(entries in prop::array::uniform9(complex()), scale in 1e-3..1e3f64) {
        let m = Matrix3::from_row_slice(&entries) * Complex64::new(scale, 0.0);
        let ev = lfa::eig3(&m);
        let s = m.norm();
        let minors = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, i)] * m[(j, j)] - m[(i, j)] * m[(j, i)])
            .sum::<Complex64>();
        prop_assert!((ev[0] + ev[1] + ev[2] - m.trace()).norm() < 1e-12 * s);
        prop_assert!((ev[0] * ev[1] + ev[0] * ev[2] + ev[1] * ev[2] - minors).norm() < 1e-11 * s * s);
        prop_assert!((ev[0] * ev[1] * ev[2] - m.determinant()).norm() < 1e-11 * s * s * s);
    }

    #[test]
    fn eig3_matches_schur_oracle(entries in prop::array::uniform9(complex())) {
        let m = Matrix3::from_row_slice(&entries);
        let d = stokes_mg::verify::root_distance(&lfa::eig3(&m), &stokes_mg::verify::schur_eigenvalues(&m));
        prop_assert!(d < 1e-9, "{d:e}");
    }

    #[test]
    fn qdr_smoothing_factor_closed_form(omega in 0.1..1.4f64) {
        let p = RelaxParams { omega, ..RelaxParams::qdr() };
        let mu = lfa::smoothing_factor(RelaxScheme::QDR, &p, 32).unwrap().mu;
        let expected = (1.0 - omega * 8.0 / 9.0).abs().max((1.0 - omega * 16.0 / 9.0).abs());
        prop_assert!((mu - expected).abs() < 1e-12, "{mu} vs {expected}");
    }

    #[test]
    fn qbsr_smoothing_factor_closed_form(omega in 0.1..1.4f64) {
        let p = RelaxParams { omega, ..RelaxParams::qbsr() };
        let mu = lfa::smoothing_factor(RelaxScheme::QBSRExact, &p, 32).unwrap().mu;
        let expected = [1.0, 8.0 / 9.0, 16.0 / 9.0].iter().map(|l| (1.0 - omega * l).abs()).fold(0.0, f64::max);
        prop_assert!((mu - expected).abs() < 1e-10, "{mu} vs {expected}");
    }

    #[test]
    fn uzawa_symbol_eigenvalues_match_branch_analysis(
        omega in 0.5..1.5f64, alpha in 0.7..2.0f64, sigma in 0.1..1.5f64,
        t1 in -1.5707..4.712f64, t2 in -1.5707..4.712f64,
    ) {
        let th = Frequency::new(t1, t2);
        prop_assume!(th.is_high());
        let p = RelaxParams::new(omega, alpha, sigma, 1.0).unwrap();
        let d = lfa::uzawa_branches(&p, th.m_r()).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let expected = [one - omega * d.lambda_star, one - omega * d.d_roots[0], one - omega * d.d_roots[1]];
        let got = lfa::relaxation_symbol(RelaxScheme::QSigmaUzawa, &p, th, 1.0).unwrap().eigenvalues();
        let dist = stokes_mg::verify::root_distance(&got, &expected);
        prop_assert!(dist < 1e-7, "{dist:e} {got:?} {expected:?}");
    }

    #[test]
    fn symbols_do_not_depend_on_h(s in scheme(), t1 in 0.1..6.1f64, t2 in 0.1..6.1f64, k in 1u32..8) {
        let th = Frequency::new(t1, t2);
        let p = s.default_params();
        let a = lfa::relaxation_symbol(s, &p, th, 1.0).unwrap().entries;
        let b = lfa::relaxation_symbol(s, &p, th, 0.5f64.powi(k as i32)).unwrap().entries;
        // the pressure rows and columns scale with h, the eigenvalues do not
        let (ea, eb) = (lfa::eig3(&a), lfa::eig3(&b));
        prop_assert!(stokes_mg::verify::root_distance(&ea, &eb) < 1e-9);
    }
}
