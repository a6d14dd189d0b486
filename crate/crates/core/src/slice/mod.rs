//! Slices `S(x*, ε)` of the unit ball of `X_D` and the constructions around them.

pub(crate) mod diameter;
pub(crate) mod witness;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use diameter::{diameter_lower_bound, measure_slice, DiameterResult, PairRow, SetSpec};
pub use witness::{tent_flip_witness, FlipInterval, WitnessCertificate};

use crate::base::BaseKind;
use crate::enclosure::Enclosure;
use crate::error::{LabError, Result};
use crate::model::{Measure, PlFunction};
use crate::norm::{DNormContext, DualOptions};

/// `S(m/‖m‖*, ε)`; membership divides by `functional_norm.hi`, so only
/// certified members are accepted.
#[derive(Clone, Debug, Serialize)]
pub struct SliceSpec {
    pub functional: Measure<f64>,
    pub functional_norm: Enclosure<f64>,
    pub epsilon: f64,
}

impl SliceSpec {
    pub fn new(functional: Measure<f64>, functional_norm: Enclosure<f64>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(LabError::Domain(format!("slice epsilon must lie in (0,1), got {epsilon}")));
        }
        if !(functional_norm.lo > 0.0 && functional_norm.hi.is_finite()) {
            return Err(LabError::Domain("slice functional needs a positive finite norm bracket".into()));
        }
        Ok(SliceSpec { functional, functional_norm, epsilon })
    }

    /// Slice of the normalized point evaluation at `t`.
    pub fn dirac(ctx: &DNormContext<f64>, t: f64, epsilon: f64) -> Result<Self> {
        Self::new(Measure::dirac(t)?, ctx.dirac_dual_norm(t)?, epsilon)
    }

    /// Slice of `m`, normalized by its dual-norm bracket.
    pub fn from_measure(ctx: &DNormContext<f64>, m: Measure<f64>, epsilon: f64, opts: DualOptions) -> Result<Self> {
        let b = ctx.dual_norm_with(&m, opts)?;
        let lo = if b.lower > 0.0 { b.lower } else { b.upper };
        Self::new(m, Enclosure::new(lo, b.upper), epsilon)
    }

    /// Certified lower bound for `x*(x)` when `∫x dm >= 0`.
    pub fn value(&self, x: &PlFunction<f64>) -> f64 {
        self.functional.integrate(x) / self.functional_norm.hi
    }

    /// Membership test without the ball check.
    pub fn admits(&self, x: &PlFunction<f64>) -> bool {
        self.value(x) > 1.0 - self.epsilon
    }
}

pub fn slice_contains(ctx: &DNormContext<f64>, slice: &SliceSpec, x: &PlFunction<f64>) -> Result<bool> {
    let n = ctx.d_norm(x);
    if n.hi > 1.0 {
        return Err(LabError::Domain(format!("x is not certified in the unit ball (||x||.hi = {})", n.hi)));
    }
    Ok(slice.admits(x))
}

/// `i` points with pairwise disjoint memberships, each isolated in the base.
///
/// For `i = 2` these are 0 and 1; for larger `i` the midpoints of the level-`i`
/// intervals `1, ..., i−2` are added. Such a midpoint lies in a single
/// level-`i` interval and in two children at the next level, all away from
/// the overlaps, so distinct points never share an interval.
pub fn disjoint_points(ctx: &DNormContext<f64>) -> Result<Vec<f64>> {
    let i = match ctx.base().kind() {
        BaseKind::Leveled { i, .. } => *i,
        _ => return Err(LabError::Configuration("disjoint points need a leveled base".into())),
    };
    let pts: Vec<f64> = match i {
        1 => vec![0.0],
        2 => vec![0.0, 1.0],
        _ => {
            let h = f64::powi(2.0, -(i as i32));
            let mut v = vec![0.0];
            v.extend((1..=i - 2).map(|k| (k as f64 + 0.5) * h));
            v.push(1.0);
            v
        }
    };
    let base = ctx.base();
    let members: Vec<Vec<usize>> = pts.iter().map(|&t| base.membership(t)).collect();
    for (j, mj) in members.iter().enumerate() {
        if !base.isolated_at(pts[j]).isolated {
            return Err(LabError::Resolution {
                msg: format!("point {} is not isolated at this truncation", pts[j]),
                required_level: i + 1,
            });
        }
        for mk in &members[j + 1..] {
            if mj.iter().any(|n| mk.binary_search(n).is_ok()) {
                return Err(LabError::Resolution {
                    msg: "memberships of the chosen points intersect".into(),
                    required_level: i + 1,
                });
            }
        }
    }
    Ok(pts)
}

/// Tail estimates behind the combination bound.
#[derive(Clone, Debug, Serialize)]
pub struct ComboCertificate {
    /// Members `x_k` of the `k`-th slice satisfy `Σ_{n∉J(t_k)} 2^{-n}‖x_k‖_n² < tail`.
    pub tail: f64,
    /// `2 i^{3/2} √tail`: cross terms between the disjoint cores and the tails.
    pub cross_term: f64,
    /// `i² · tail`: the tails among themselves.
    pub tail_term: f64,
    pub epsilon_slack: f64,
    /// `|J(t_k)|` restricted to stored indices.
    pub core_sizes: Vec<usize>,
    pub max_feasible_eta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComboReport {
    pub i: usize,
    pub eta: f64,
    pub points: Vec<f64>,
    pub slices: Vec<SliceSpec>,
    /// `√(i + ε_slack)/i`, a bound on `‖h‖` for every `h` in the combination.
    pub bound: f64,
    /// Twice `bound`: what the triangle inequality gives for the diameter.
    pub diameter_bound: f64,
    pub certificate: ComboCertificate,
    pub sampled_diameter: f64,
    pub sampled_norm: f64,
    pub sample_evaluations: usize,
    /// Whether the sampled diameter stays below `bound`.
    pub sampled_within_bound: bool,
}

/// `η*` at which `ε_slack` reaches `i² − i`, i.e. the bound reaches 1.
pub fn combo_max_eta(i: usize) -> f64 {
    let tau = (1.0 - 1.0 / (i as f64).sqrt()).powi(2);
    1.0 - (1.0 - tau).sqrt()
}

/// `ε_slack(η) = 2 i^{3/2} √τ + i² τ` with `τ = 2η − η²`.
pub fn combo_slack(i: usize, eta: f64) -> (f64, f64, f64) {
    let fi = i as f64;
    let tau = 2.0 * eta - eta * eta;
    let cross = 2.0 * fi.powf(1.5) * tau.sqrt();
    let tails = fi * fi * tau;
    (tau, cross, tails)
}

/// Equal-weight convex combination of the point-evaluation slices at
/// [`disjoint_points`], with the analytic bound on its elements and a sampled
/// diameter for comparison.
///
/// A member `x` of `S(δ_t/‖δ_t‖*, η)` has `w(t)x(t)² > (1−η)²`, so its
/// weighted mass outside `J(t)` is below `τ = 2η − η²`. With the cores `J(t_k)`
/// disjoint, `‖Σ x_k‖_D <= √i + i√τ`, which gives `‖h‖ <= √(i+ε_slack)/i`.
pub fn small_diameter_combo(ctx: &DNormContext<f64>, i: usize, eta: f64, budget: usize, seed: u64) -> Result<ComboReport> {
    if i < 2 {
        return Err(LabError::Parameter { msg: "the combination needs i >= 2".into(), max_feasible: None });
    }
    match ctx.base().kind() {
        BaseKind::Leveled { i: bi, .. } if *bi == i => {}
        _ => return Err(LabError::Configuration(format!("combination for i={i} needs the leveled base with parameter {i}"))),
    }
    let max_eta = combo_max_eta(i);
    if !(eta > 0.0 && eta < max_eta) {
        return Err(LabError::Parameter {
            msg: format!("eta={eta} must lie in (0, {max_eta}) for the bound to stay below 1"),
            max_feasible: Some(max_eta),
        });
    }
    let (tau, cross, tails) = combo_slack(i, eta);
    let slack = cross + tails;
    let points = disjoint_points(ctx)?;
    let slices = points.iter().map(|&t| SliceSpec::dirac(ctx, t, eta)).collect::<Result<Vec<_>>>()?;
    let bound = (i as f64 + slack).sqrt() / i as f64;
    let set = SetSpec::Combination(slices.clone());
    let sampled = diameter_lower_bound(ctx, &set, budget, seed)?;
    let sampled_norm = sampled.max_member_norm;
    Ok(ComboReport {
        i,
        eta,
        points: points.clone(),
        slices,
        bound,
        diameter_bound: 2.0 * bound,
        certificate: ComboCertificate {
            tail: tau,
            cross_term: cross,
            tail_term: tails,
            epsilon_slack: slack,
            core_sizes: points.iter().map(|&t| ctx.base().membership(t).len()).collect(),
            max_feasible_eta: max_eta,
        },
        sampled_within_bound: sampled.value <= bound,
        sampled_diameter: sampled.value,
        sampled_norm,
        sample_evaluations: sampled.evaluations,
    })
}

/// `√(2δ − δ²)`: radius of the ball containing the second component of any
/// member of `S((x*, 0), δ)` in `X ⊕₂ Y`.
pub fn l2_sum_slice_inclusion(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LabError::Domain(format!("delta must lie in (0,1), got {delta}")));
    }
    Ok((2.0 * delta - delta * delta).sqrt())
}

/// Bound for convex combinations of slices in the `ℓ²`-sum: combination bound
/// in the `i`-th summand plus the shell radius of the remaining summands.
pub fn l2_sum_combo_bound(i: usize, eta: f64, delta: f64) -> Result<f64> {
    Ok((i as f64 + eta).sqrt() / i as f64 + 2.0 * l2_sum_slice_inclusion(delta)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionCheck {
    pub samples: usize,
    pub accepted: usize,
    pub max_tail_sq: f64,
    pub bound_sq: f64,
    pub holds: bool,
}

/// Monte-Carlo check of the inclusion on the model `X_D ⊕₂ ℝ^dim`:
/// pairs `(f, v)` with `‖(f,v)‖² = ‖f‖_D² + ‖v‖₂²`.
pub fn l2_sum_model_check(
    ctx: &DNormContext<f64>,
    slice: &SliceSpec,
    center: &PlFunction<f64>,
    dim: usize,
    samples: usize,
    seed: u64,
) -> Result<InclusionCheck> {
    let delta = slice.epsilon;
    let bound_sq = 2.0 * delta - delta * delta;
    let center = ctx.normalize_feasible(center).ok_or_else(|| LabError::Domain("zero center".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = 0;
    let mut max_tail_sq = 0.0f64;
    for _ in 0..samples {
        let scale = 1.0 - rng.gen::<f64>() * 1.5 * delta;
        let t = rng.gen::<f64>();
        let w = 0.01 + 0.2 * rng.gen::<f64>();
        let pert = PlFunction::tent((t - w).max(0.0), t, (t + w).min(1.0), rng.gen_range(-0.2..0.2))?;
        let f = center.add(&pert.scale(delta)).scale(scale);
        let fh = ctx.d_norm(&f).hi;
        if fh > 1.0 {
            continue;
        }
        let room = (1.0 - fh * fh).max(0.0);
        let r = room.sqrt() * rng.gen::<f64>().sqrt();
        let mut v: Vec<f64> = (0..dim.max(1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let vn = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-300);
        v.iter_mut().for_each(|a| *a *= r / vn);
        let v_sq: f64 = v.iter().map(|a| a * a).sum();
        if fh * fh + v_sq > 1.0 || !slice.admits(&f) {
            continue;
        }
        accepted += 1;
        max_tail_sq = max_tail_sq.max(v_sq);
    }
    Ok(InclusionCheck { samples, accepted, max_tail_sq, bound_sq, holds: max_tail_sq <= bound_sq })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsliceReport {
    pub slice: SliceSpec,
    pub theta: f64,
    pub theta_range: (f64, f64),
    pub x_value: f64,
    pub samples_checked: usize,
    pub violations: usize,
}

/// A slice `S(y*, δ)` with `x ∈ S(y*, δ) ⊂ S`, where `y* = (1−θ)x* + θ·x_x*`
/// mixes the slice functional with a norming functional of `x`.
///
/// Any `z` with `y*(z) > 1−δ` has `x*(z) > (1−δ−θ)/(1−θ)`, which is at least
/// `1−ε` for `θ <= (ε−δ)/ε`; `x` itself needs `θ` above
/// `(1−δ−x*(x))/(v−x*(x))` where `v` is the norming value. The bisection looks
/// for `θ` in between and then samples `10³` members to confirm the inclusion.
pub fn subslice(ctx: &DNormContext<f64>, slice: &SliceSpec, x: &PlFunction<f64>, delta: f64, seed: u64) -> Result<SubsliceReport> {
    let eps = slice.epsilon;
    if !(delta > 0.0 && delta < eps) {
        return Err(LabError::Domain(format!("need 0 < delta < eps, got delta={delta}, eps={eps}")));
    }
    if !slice_contains(ctx, slice, x)? {
        return Err(LabError::Construction(
            "x is not a certified member of the slice (membership is strict and uses functional_norm.hi)".into(),
        ));
    }
    let nf = ctx.norming_functional(x)?;
    let a = slice.value(x);
    let v = nf.value / nf.norm_upper;
    // inclusion holds for θ <= hi; x stays inside while (1−θ)a + θv > 1−δ
    let mut hi = (eps - delta) / eps;
    let mut lo = 0.0f64;
    if v > a {
        lo = ((1.0 - delta - a) / (v - a)).max(0.0);
    } else if a > 1.0 - delta {
        if v < a {
            hi = hi.min((a - 1.0 + delta) / (a - v));
        }
    } else {
        lo = f64::INFINITY;
    }
    if !(lo < hi) {
        return Err(LabError::Construction(format!("no admissible mixing weight: need theta in ({lo}, {hi}]")));
    }
    let build = |theta: f64| -> Result<SliceSpec> {
        let m = Measure::lin_comb(
            (1.0 - theta) / slice.functional_norm.hi,
            &slice.functional,
            theta / nf.norm_upper,
            &nf.measure,
        );
        let xv = m.integrate(x);
        let lo_norm = (xv / ctx.d_norm(x).hi).clamp(f64::MIN_POSITIVE, 1.0);
        SliceSpec::new(m, Enclosure::new(lo_norm, 1.0), delta)
    };
    // bisect from the middle of the admissible range towards the end that favours x
    let good = if v > a { hi } else { lo };
    let mut theta = 0.5 * (lo + hi);
    let mut spec = build(theta)?;
    for _ in 0..60 {
        if spec.admits(x) {
            break;
        }
        theta = 0.5 * (theta + good);
        spec = build(theta)?;
    }
    if !spec.admits(x) {
        return Err(LabError::Construction("bisection did not place x inside the new slice".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut checked, mut violations) = (0usize, 0usize);
    let mut attempts = 0;
    while checked < 1000 && attempts < 20_000 {
        attempts += 1;
        let t = rng.gen::<f64>();
        let w = 0.005 + 0.3 * rng.gen::<f64>();
        let pert = PlFunction::tent((t - w).max(0.0), t, (t + w).min(1.0), rng.gen_range(-1.0..1.0))?;
        let z = x.add(&pert.scale(delta * rng.gen::<f64>())).scale(1.0 - delta * rng.gen::<f64>());
        if ctx.d_norm(&z).hi > 1.0 || !spec.admits(&z) {
            continue;
        }
        checked += 1;
        if !slice.admits(&z) {
            violations += 1;
        }
    }
    let x_value = spec.value(x);
    Ok(SubsliceReport { slice: spec, theta, theta_range: (lo, hi), x_value, samples_checked: checked, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{EpsilonSchedule, NeighborhoodBase};

    fn ctx(i: usize, levels: usize) -> DNormContext<f64> {
        let b = NeighborhoodBase::build_leveled(i, EpsilonSchedule::default(), levels).unwrap();
        DNormContext::new(b, 1e-6).unwrap()
    }

    #[test]
    fn slice_membership_examples() {
        let c = ctx(1, 8);
        let s = SliceSpec::new(Measure::lebesgue(), Enclosure::new(1.0, 1.25), 0.5).unwrap();
        assert!(!slice_contains(&c, &s, &PlFunction::zero()).unwrap());
        // x ≡ 1: value 1/1.25 = 0.8 > 0.5
        assert!(slice_contains(&c, &s, &PlFunction::constant(1.0)).unwrap());
        let s = SliceSpec::new(Measure::lebesgue(), Enclosure::new(1.0, 2.5), 0.5).unwrap();
        assert!(!slice_contains(&c, &s, &PlFunction::constant(1.0)).unwrap());
        assert!(slice_contains(&c, &s, &PlFunction::constant(2.0)).is_err());
        assert!(SliceSpec::new(Measure::lebesgue(), Enclosure::new(1.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn dual_witness_is_in_its_slice() {
        let c = ctx(1, 8);
        let s = SliceSpec::dirac(&c, 0.3, 0.05).unwrap();
        let b = c.dual_norm(&Measure::dirac(0.3).unwrap(), 2000, 1).unwrap();
        assert!(slice_contains(&c, &s, &b.witness).unwrap());
    }

    #[test]
    fn disjoint_point_sets() {
        assert_eq!(disjoint_points(&ctx(2, 8)).unwrap(), vec![0.0, 1.0]);
        let c = ctx(3, 7);
        let p = disjoint_points(&c).unwrap();
        assert_eq!(p.len(), 3);
        for j in 0..3 {
            for k in j + 1..3 {
                let (a, b) = (c.base().membership(p[j]), c.base().membership(p[k]));
                assert!(a.iter().all(|n| !b.contains(n)));
            }
        }
        assert_eq!(disjoint_points(&ctx(1, 4)).unwrap().len(), 1);
        assert_eq!(disjoint_points(&ctx(6, 5)).unwrap().len(), 6);
    }

    #[test]
    fn combo_bound_examples() {
        let c2 = ctx(2, 8);
        let r = small_diameter_combo(&c2, 2, 1e-5, 200, 7).unwrap();
        assert!((r.bound - (2.0 + r.certificate.epsilon_slack).sqrt() / 2.0).abs() < 1e-15);
        assert!(r.bound < 0.75 && r.bound > 0.7071);
        let c5 = ctx(5, 6);
        let r5 = small_diameter_combo(&c5, 5, 1e-6, 50, 7).unwrap();
        assert!((r5.bound - 0.4472).abs() < 0.02);
        assert!(matches!(small_diameter_combo(&c2, 1, 1e-3, 10, 0), Err(LabError::Parameter { .. })));
        match small_diameter_combo(&c2, 2, 0.5, 10, 0) {
            Err(LabError::Parameter { max_feasible: Some(m), .. }) => {
                let (_, a, b) = combo_slack(2, m);
                assert!((a + b - 2.0).abs() < 1e-9);
            }
            other => panic!("expected parameter error, got {other:?}"),
        }
    }

    #[test]
    fn combo_elements_respect_the_norm_bound() {
        let c = ctx(2, 8);
        let r = small_diameter_combo(&c, 2, 1e-5, 400, 3).unwrap();
        assert!(r.sampled_norm <= r.bound);
        assert!(r.sampled_diameter <= r.diameter_bound);
    }

    #[test]
    fn shell_radius() {
        assert!((l2_sum_slice_inclusion(0.02).unwrap() - 0.0396f64.sqrt()).abs() < 1e-15);
        assert!(l2_sum_slice_inclusion(1e-12).unwrap() < 1e-5);
        assert!(l2_sum_slice_inclusion(1.0).is_err());
        assert!((l2_sum_combo_bound(2, 0.0, 0.02).unwrap() - (0.5f64.sqrt() + 2.0 * 0.0396f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn model_inclusion_holds() {
        let c = ctx(1, 8);
        let x = PlFunction::constant(1.0);
        let nf = c.norming_functional(&x).unwrap();
        let s = SliceSpec::new(nf.measure, Enclosure::new(0.5, nf.norm_upper), 0.1).unwrap();
        let r = l2_sum_model_check(&c, &s, &x, 3, 2000, 5).unwrap();
        assert!(r.accepted > 100);
        assert!(r.holds);
    }

    #[test]
    fn subslice_of_lebesgue() {
        let c = ctx(1, 8);
        let s = SliceSpec::new(Measure::lebesgue(), Enclosure::new(1.0, 1.0), 0.3).unwrap();
        let x = PlFunction::constant(1.0);
        let r = subslice(&c, &s, &x, 0.15, 9).unwrap();
        assert!(r.slice.admits(&x));
        assert!(r.samples_checked > 0);
        assert_eq!(r.violations, 0);
        assert!(matches!(subslice(&c, &s, &x, 0.3, 9), Err(LabError::Domain(_))));
    }
}
