use metric_distortion::bounds::{borda_order, generic_det_lower, pl_constants, rd_lower_bound, rd_lower_bound_pl};
use metric_distortion::constructions::{
    gen_borda_lb, gen_generic_lb_pair, gen_plurality_lb, gen_plurality_pl_lb, gen_rd_lb, gen_rd_pl_lb, Branch,
};
use metric_distortion::{ConstructedElection, Error, GFunction};
use proptest::prelude::*;

fn check(e: &ConstructedElection, g: Option<&GFunction>) -> Result<(), TestCaseError> {
    let report = e.instance.validate();
    prop_assert!(report.is_ok(), "{:?}", report.violations.first());
    e.model.validate(e.instance.n(), e.instance.m()).unwrap();
    if let Some(g) = g {
        let dev = e.marginal_deviation(g);
        prop_assert!(dev <= 1e-12, "marginal deviation {}", dev);
    }
    prop_assert!(e.predicted_distortion.is_finite() && e.predicted_distortion >= 1.0);
    Ok(())
}

fn accept_infeasible<T>(r: Result<T, Error>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(Error::Infeasible(_)) => None,
        Err(e) => panic!("unexpected error {e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plurality_constructions(theta in 1.2f64..16.0, m in 2usize..12, eps in 0.001f64..0.2, zeta in 0.001f64..0.2, mid in any::<bool>()) {
        let g = GFunction::pl(theta).unwrap();
        let c = pl_constants(theta).unwrap();
        let branch = if mid { Branch::Mid } else { Branch::Out };
        if let Some(e) = accept_infeasible(gen_plurality_lb(m, 5000, eps, zeta, &g, branch)) {
            check(&e, Some(&g))?;
            let want = match branch {
                Branch::Mid => m as f64 * c.gamma_mid - 1.0,
                Branch::Out => m as f64 * c.gamma_out + 1.0,
            };
            prop_assert_eq!(e.predicted_distortion, want);
            // a good candidate is optimal up to the circle's radius
            prop_assert!(e.instance.optimal_candidate().opt_index != e.w);
        }
        if let Some(e) = accept_infeasible(gen_plurality_pl_lb(m, 5000, eps, zeta, theta)) {
            check(&e, None)?;
        }
    }

    #[test]
    fn random_dictator_constructions(theta in 1.2f64..32.0, m in 3usize..40, n in 2usize..500) {
        let g = GFunction::pl(theta).unwrap();
        let e = gen_rd_lb(m, n, &g).unwrap();
        check(&e, Some(&g))?;
        prop_assert!((e.predicted_distortion - rd_lower_bound(m, n as f64, &g).unwrap()).abs() <= 1e-12 * e.predicted_distortion);
        let e = gen_rd_pl_lb(m, n, theta).unwrap();
        check(&e, None)?;
        prop_assert_eq!(e.predicted_distortion, rd_lower_bound_pl(m, theta).unwrap());
        prop_assert!(e.get("exact_limit").unwrap() >= e.predicted_distortion - 1e-12);
    }

    #[test]
    fn borda_construction(theta in 2.5f64..8.0, extra in 0usize..2000, n in 100usize..2000) {
        let m = 24f64.powf(theta / (theta - 1.0)).max(2f64.powf(theta)).ceil() as usize + extra;
        if let Some(e) = accept_infeasible(gen_borda_lb(m, n, theta)) {
            check(&e, None)?;
            let order = borda_order(m, theta).unwrap();
            prop_assert!((e.get("sc_ratio_bound").unwrap() - order / 24.0).abs() <= 1e-12 * order);
            prop_assert!(e.get("sc_ratio").unwrap() >= e.get("sc_ratio_bound").unwrap());
        }
    }

    #[test]
    fn generic_pair(theta in 1.2f64..32.0, n in 100usize..20_000) {
        let g = GFunction::pl(theta).unwrap();
        let c = pl_constants(theta).unwrap();
        let [a, b] = gen_generic_lb_pair(&g, Branch::Mid, n).unwrap();
        for e in [&a, &b] {
            check(e, Some(&g))?;
            prop_assert_eq!(e.predicted_distortion, 2.0 * c.gamma_mid - 1.0);
            prop_assert!(e.predicted_distortion <= generic_det_lower(&c));
        }
        for e in [&a, &b] {
            prop_assert!((e.get("expected_w_share").unwrap() - 0.5).abs() <= 1.0 / n as f64);
        }
    }
}
