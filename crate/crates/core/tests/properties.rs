// SPDX-License-Identifier: MIT OR Apache-2.0
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use thetastrat::fans::build_sigma_x;
use thetastrat::ggw::{quantized_class, quantized_context, recursive_ggw, FClass, GgwConfig};
use thetastrat::hnopt::{max_quadratic_on_cone, MinBlock, PiecewiseLinearConcave};
use thetastrat::lattice::{coset_representatives, zmat_from_i64};
use thetastrat::linalg::{dot, q, qf, qvec, vadd, vscale, Mat, QVec};
use thetastrat::quadforms::{QuadForm, WeightedRep};
use thetastrat::rootdata::RootDatum;
use thetastrat::scalar::Cx;
use thetastrat::series::{solve_fixed_point, Mono, SeriesMatrix, Trunc, TruncatedSeries};
use thetastrat::strata::{enumerate_chi_active, is_chi_active, shifted_character, StrataContext};
use thetastrat::twindex::{enumerate_f_rho, LevelData, Orientation};

const TOL: f64 = 1e-25;

fn tq(k: u32) -> Trunc {
    Trunc::new(k, 1, 0)
}

/// A series in `t, s` with one Laurent `z`, from small integer coefficients.
fn series(tr: Trunc, cs: &[(u32, u32, i64, i64)]) -> TruncatedSeries {
    TruncatedSeries::from_terms(
        tr,
        1,
        cs.iter().map(|&(a, b, z, c)| (Mono::var(0, a, 1).mul(&Mono::var(1, b, 1)).with_z(vec![z]), Cx::from_i64(c))),
    )
}

fn coeffs() -> impl Strategy<Value = Vec<(u32, u32, i64, i64)>> {
    prop::collection::vec((0u32..5, 0u32..2, -2i64..=2, -4i64..=4), 0..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in coeffs(), b in coeffs(), c in coeffs()) {
        let tr = tq(4);
        let (a, b, c) = (series(tr, &a), series(tr, &b), series(tr, &c));
        prop_assert!((&(&(&a * &b) * &c) - &(&a * &(&b * &c))).max_abs() < TOL);
        prop_assert!((&(&a * &(&b + &c)) - &(&(&a * &b) + &(&a * &c))).max_abs() < TOL);
        prop_assert!((&(&a * &b) - &(&b * &a)).max_abs() < TOL);
    }

    #[test]
    fn det_is_multiplicative_and_inverse_round_trips(
        m1 in prop::collection::vec(coeffs(), 4),
        m2 in prop::collection::vec(coeffs(), 4),
        diag in prop::collection::vec(1i64..=3, 2),
    ) {
        let tr = tq(3);
        let build = |m: &[Vec<(u32, u32, i64, i64)>]| {
            let mut rows = vec![vec![TruncatedSeries::zero(tr, 1); 2]; 2];
            for (i, row) in rows.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    // Keep the constant part z-free and invertible: positive terms only in (t, s).
                    let tail: Vec<_> = m[2 * i + j].iter().copied().filter(|&(a, b, _, _)| a + b > 0).collect();
                    let constant = if i == j { diag[i] } else { 0 };
                    *cell = &series(tr, &tail) + &TruncatedSeries::constant(Cx::from_i64(constant), tr, 1);
                }
            }
            SeriesMatrix::from_rows(rows).unwrap()
        };
        let (a, b) = (build(&m1), build(&m2));
        let lhs = a.mul(&b).unwrap().det().unwrap();
        let rhs = &a.det().unwrap() * &b.det().unwrap();
        prop_assert!((&lhs - &rhs).max_abs() < 1e-24);
        let id = a.mul(&a.inverse().unwrap()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { TruncatedSeries::one(tr, 1) } else { TruncatedSeries::zero(tr, 1) };
                prop_assert!((id.get(i, j) - &want).max_abs() < 1e-24);
            }
        }
    }

    #[test]
    fn raising_truncation_extends(c in 1i64..=4, extra in 1u32..=4) {
        // (c + 1)δ + t·e^{δ} + s·δ² = 0.
        let system = |tr: Trunc| move |d: &[TruncatedSeries]| {
            let t = TruncatedSeries::monomial(Mono::var(0, 1, 0), Cx::one(), tr, 0);
            let s = TruncatedSeries::monomial(Mono::var(1, 1, 0), Cx::one(), tr, 0);
            let e = &t * &d[0].exp()?;
            let k = Cx::from_i64(c + 1);
            let f = &(&d[0].scale(&k) + &e) + &(&s * &(&d[0] * &d[0]));
            let j = &(&TruncatedSeries::constant(k, tr, 0) + &e) + &(&s * &d[0].scale(&Cx::from_i64(2)));
            Ok((vec![f], SeriesMatrix::from_rows(vec![vec![j]])?))
        };
        let lo = Trunc::new(4, 1, 0);
        let hi = Trunc::new(4 + extra, 1, 0);
        let a = solve_fixed_point(1, lo, 0, system(lo)).unwrap();
        let b = solve_fixed_point(1, hi, 0, system(hi)).unwrap();
        prop_assert!(a.residual < TOL && b.residual < TOL);
        prop_assert!((&b.delta[0].restrict(lo).unwrap() - &a.delta[0]).max_abs() < TOL);
    }

    #[test]
    fn torus_points_scale_with_level(h in prop::collection::vec(1i64..=4, 1..=2), off in -1i64..=1, m in 1i64..=3) {
        let n = h.len();
        let mut rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| if i == j { h[i] + 2 } else { off }).collect()).collect();
        if n == 1 {
            rows[0][0] = h[0];
        }
        let base = Mat::from_i64(&rows);
        let t = RootDatum::torus(n);
        let count = |mat: Mat| enumerate_f_rho(&LevelData::new(&t, mat, Orientation::CALIBRATED).unwrap()).unwrap().len();
        let c1 = count(base.clone());
        prop_assert_eq!(c1 as i64, base.det().abs().to_integer().try_into().unwrap_or(-1i64));
        prop_assert_eq!(count(base.scale(&q(m))), c1 * (m.pow(n as u32) as usize));
    }

    #[test]
    fn coset_count_is_determinant(a in -3i64..=3, b in 1i64..=4, c in 1i64..=4) {
        let z = zmat_from_i64(&[vec![b, a], vec![0, c]]);
        prop_assert_eq!(coset_representatives(&z).unwrap().len() as i64, b * c);
    }

    #[test]
    fn enumerated_vortex_strata_are_active(chi in -6i64..=6, d in -8i64..=8) {
        let x = WeightedRep::from_i64(&[(vec![1], 1)]);
        let ctx = StrataContext::new(RootDatum::torus(1), x.clone(), x, QuadForm::identity(1), qvec(&[chi])).unwrap();
        for nu in enumerate_chi_active(&ctx, &qvec(&[0]), &q(200), Some(&qvec(&[d]))).unwrap() {
            prop_assert_eq!(is_chi_active(&ctx, &nu.d, &nu.lambda), (true, None));
            if !nu.lambda[0].is_zero() {
                let chi_p = shifted_character(&ctx, &nu.lambda, &nu.d).unwrap();
                prop_assert!((ctx.v_form.pair(&nu.lambda, &nu.d) + dot(&nu.lambda, &chi_p)).is_zero());
            }
        }
    }

    #[test]
    fn cone_optimum_dominates_sampled_points(
        lin in prop::collection::vec(-4i64..=4, 2),
        pieces in prop::collection::vec(prop::collection::vec(-2i64..=2, 2), 1..=3),
        samples in prop::collection::vec((0i64..=8, 0i64..=8), 20),
    ) {
        let x = WeightedRep::from_i64(&[(vec![1, 0], 1), (vec![1, -1], 1)]);
        let fan = build_sigma_x(&RootDatum::torus(2), &x);
        let b = QuadForm::new(Mat::from_i64(&[vec![2, 1], vec![1, 2]])).unwrap();
        let ell = PiecewiseLinearConcave::new(
            qvec(&lin),
            vec![MinBlock { weight: q(1), pieces: pieces.iter().map(|p| qvec(p)).collect() }],
        ).unwrap();
        for cone in fan.cones.iter().filter(|c| c.dim == 2) {
            let opt = max_quadratic_on_cone(&ell, &b, cone).unwrap();
            let rays = &cone.rays;
            for &(a, c) in &samples {
                let w: QVec = vadd(&vscale(&rays[0], &qf(a, 4)), &vscale(&rays[rays.len() - 1], &qf(c, 4)));
                prop_assert!(cone.contains(&w));
                prop_assert!(ell.value(&w) - b.norm2(&w) / q(2) <= opt.value);
            }
        }
    }
}

#[test]
fn ggw_corrections_are_stable_under_truncation() {
    let x = WeightedRep::from_i64(&[(vec![1], 1)]);
    let base = StrataContext::new(RootDatum::torus(1), x.clone(), x, QuadForm::identity(1), qvec(&[-3])).unwrap();
    let f0 = FClass::character(WeightedRep::from_i64(&[(vec![-9], 1)]));
    let ctx = quantized_context(&base, 2).unwrap();
    let f = quantized_class(&base, &f0, 2);
    let run = |t: u32| {
        let cfg = GgwConfig { trunc: Trunc::new(t, 0, 0), ..GgwConfig::default() };
        recursive_ggw(&ctx, &qvec(&[1]), &qvec(&[0]), &f, &cfg).unwrap()
    };
    let (lo, hi) = (run(6), run(10));
    assert!(!lo.corrections.is_empty());
    assert_eq!(lo.corrections_graded, hi.corrections_graded);
    assert_eq!(lo.i_chi_graded, hi.i_chi_graded);
}
