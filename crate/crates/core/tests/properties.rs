use std::sync::OnceLock;

use dnorm_lab::nested::nested_norm;
use dnorm_lab::rotundity::{mlur_certificate, mlur_modulus};
use dnorm_lab::{Base, Context, ExponentSchedule, Function, Measure64, Rank1Projection, SupNorm};
use proptest::prelude::*;

fn ctx() -> &'static Context {
    static C: OnceLock<Context> = OnceLock::new();
    C.get_or_init(|| Context::new(Base::from_spec("leveled:i=1,levels=8").unwrap(), 1e-9).unwrap())
}

fn pl() -> impl Strategy<Value = Function> {
    (prop::collection::vec((0.0..1.0f64, -3.0..3.0f64), 0..6), -3.0..3.0f64, -3.0..3.0f64).prop_map(|(inner, a, b)| {
        let mut nodes = vec![(0.0, a), (1.0, b)];
        nodes.extend(inner);
        nodes.sort_by(|p, q| p.0.total_cmp(&q.0));
        nodes.dedup_by(|p, q| p.0 == q.0);
        Function::from_nodes(&nodes).unwrap()
    })
}

fn nested_sched() -> ExponentSchedule {
    ExponentSchedule::geometric(2.0, 4.0, 9).unwrap()
}

fn vec10() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 10)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn d_norm_between_equivalence_bounds(f in pl()) {
        let e = ctx().d_norm(&f);
        let s = f.sup_norm();
        let b = ctx().sup_norm_bounds().b_lo;
        prop_assert!(e.lo <= e.hi);
        prop_assert!(e.hi <= s + 1e-12);
        prop_assert!(e.lo >= b * s - e.width());
    }

    #[test]
    fn d_norm_triangle_and_homogeneity(f in pl(), g in pl(), c in -4.0..4.0f64) {
        let n = |h: &Function| ctx().d_norm(h);
        prop_assert!(n(&f.add(&g)).lo <= n(&f).hi + n(&g).hi);
        let (scaled, base) = (n(&f.scale(c)), n(&f).scale(c.abs()));
        prop_assert!(scaled.lo <= base.hi + 1e-12 && base.lo <= scaled.hi + 1e-12);
    }

    #[test]
    fn nested_norm_is_a_norm(v in vec10(), w in vec10(), c in -4.0..4.0f64) {
        let s = nested_sched();
        let n = |x: &[f64]| nested_norm(&s, x).unwrap();
        let sum: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        prop_assert!(n(&sum) <= (n(&v) + n(&w)) * (1.0 + 1e-12));
        let cv: Vec<f64> = v.iter().map(|a| c * a).collect();
        prop_assert!((n(&cv) - c.abs() * n(&v)).abs() <= 1e-12 * (1.0 + n(&cv)));
    }

    #[test]
    fn nested_norm_between_max_and_product_bound(v in vec10()) {
        let s = nested_sched();
        let sup = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let k: f64 = s.exponents().iter().map(|p| 1.0 / p).sum();
        let n = nested_norm(&s, &v).unwrap();
        prop_assert!(sup <= n * (1.0 + 1e-12));
        prop_assert!(n <= 2f64.powf(k) * sup * (1.0 + 1e-12));
    }

    #[test]
    fn rank_one_projection_is_idempotent(u in pl(), t in 0.0..1.0f64, x in pl()) {
        let ut = u.eval(t).unwrap();
        prop_assume!(ut.abs() > 1e-3);
        let p = Rank1Projection::new(u, Measure64::atomic(&[(t, 1.0 / ut)]).unwrap()).unwrap();
        let once = p.apply(&x);
        let twice = p.apply(&once);
        prop_assert!(once.sub(&twice).sup_norm() <= 1e-9 * (1.0 + once.sup_norm()));
    }

    #[test]
    fn mlur_certificate_never_refuted(f in pl(), y in pl(), eps in 0.05..0.3f64) {
        let Some(x) = ctx().normalize_feasible(&f) else { return Ok(()) };
        let cert = mlur_certificate(ctx(), &x, eps);
        prop_assume!(cert.is_ok());
        let cert = cert.unwrap();
        let c = cert.premise_scale(&y);
        prop_assume!(c.is_finite());
        for s in [0.25, 0.5, 1.0 - 1e-9] {
            prop_assert!(cert.apply(&y.scale(c * s)).holds());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn d_modulus_exceeds_sup_modulus_on_tents(peak in 0.2..0.8f64, half in 0.05..0.2f64) {
        let x = Function::tent(peak - half, peak, peak + half, 1.0).unwrap();
        let x = ctx().normalize_feasible(&x).unwrap();
        let d = mlur_modulus(ctx(), &x, 0.2, 300, 7).unwrap();
        let s = mlur_modulus(&SupNorm, &x, 0.2, 300, 7).unwrap();
        prop_assert!(d.value > 0.0, "d={} s={}", d.value, s.value);
        prop_assert!(d.value > s.value);
    }
}
