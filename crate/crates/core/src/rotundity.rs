//! Quantitative rotundity: certified MLUR implications, a numerical MLUR
//! modulus, seminorm rigidity and octahedrality probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::enclosure::Enclosure;
use crate::error::{LabError, Result};
use crate::model::PlFunction;
use crate::norm::{DNormContext, NormContext};
use crate::sampling::{random_bump, random_pl, spike};
use crate::slice::witness::{flip, flip_plan};

/// Everything needed to check `‖x ± y‖_m <= ‖x‖_m + ε (m ∈ M) ⇒ ‖y‖_∞ <= 2ε`
/// without the base: the cover, its closures and the seminorms of `x` there.
#[derive(Clone, Debug, Serialize)]
pub struct MlurCertificate {
    pub x: PlFunction<f64>,
    pub epsilon: f64,
    pub delta: f64,
    pub lipschitz: f64,
    pub cover: Vec<usize>,
    pub closures: Vec<(f64, f64)>,
    pub x_seminorms: Vec<f64>,
    pub x_norm: Enclosure<f64>,
    pub conclusion_bound: f64,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct CertificateCheck {
    pub premise: bool,
    pub conclusion: bool,
    pub sup_y: f64,
}

impl CertificateCheck {
    pub fn holds(&self) -> bool {
        !self.premise || self.conclusion
    }
}

/// Picks `δ = ε / max(L, 1)` and the shallowest stored cover with lengths `< δ`.
///
/// The chain behind the certificate: a point `t0` lies in some `D_m`, `m ∈ M`;
/// the sign `σ` aligning `y(t0)` with `x(t0)` gives
/// `|x(t0)| + |y(t0)| <= ‖x + σy‖_m <= ‖x‖_m + ε < |x(t0)| + 2ε`
/// because `x` oscillates by less than `ε` on `D_m`.
pub fn mlur_certificate(ctx: &DNormContext<f64>, x: &PlFunction<f64>, epsilon: f64) -> Result<MlurCertificate> {
    if !(epsilon > 0.0) {
        return Err(LabError::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let lipschitz = x.lipschitz_bound();
    let delta = epsilon / lipschitz.max(1.0);
    let cover = ctx.base().cover_for(delta)?;
    let closures: Vec<(f64, f64)> = cover
        .iter()
        .map(|&n| {
            let iv = ctx.base().interval(n).expect("cover index");
            (iv.left.value(), iv.right.value())
        })
        .collect();
    let x_seminorms = closures.iter().map(|&(a, b)| x.sup_abs_closed(a, b)).collect();
    Ok(MlurCertificate {
        x: x.clone(),
        epsilon,
        delta,
        lipschitz,
        cover,
        closures,
        x_seminorms,
        x_norm: ctx.d_norm(x),
        conclusion_bound: 2.0 * epsilon,
    })
}

impl MlurCertificate {
    pub fn apply(&self, y: &PlFunction<f64>) -> CertificateCheck {
        let plus = self.x.add(y);
        let minus = self.x.sub(y);
        let premise = self.closures.iter().zip(&self.x_seminorms).all(|(&(a, b), &s)| {
            let bound = s + self.epsilon;
            plus.sup_abs_closed(a, b) <= bound && minus.sup_abs_closed(a, b) <= bound
        });
        let sup_y = y.sup_norm();
        CertificateCheck { premise, conclusion: sup_y <= self.conclusion_bound, sup_y }
    }

    /// Largest `c` with `‖x ± c·y0‖_m <= ‖x‖_m + ε` on the whole cover. Both
    /// functions are PL, so the seminorms are maxima over merged breakpoints.
    pub fn premise_scale(&self, y0: &PlFunction<f64>) -> f64 {
        let mut c = f64::INFINITY;
        let (xb, yb) = (self.x.breakpoints(), y0.breakpoints());
        for (&(a, b), &s) in self.closures.iter().zip(&self.x_seminorms) {
            let bound = s + self.epsilon;
            let mut visit = |p: f64| {
                let w = y0.eval_clamped(p).abs();
                if w > 0.0 {
                    c = c.min((bound - self.x.eval_clamped(p).abs()) / w);
                }
            };
            visit(a);
            visit(b);
            for bp in [xb, yb] {
                let start = bp.partition_point(|&t| t <= a);
                for &t in bp[start..].iter().take_while(|&&t| t < b) {
                    visit(t);
                }
            }
        }
        c
    }
}

pub fn apply_certificate(cert: &MlurCertificate, y: &PlFunction<f64>) -> CertificateCheck {
    cert.apply(y)
}

#[derive(Clone, Debug, Serialize)]
pub struct AdversarialReport {
    pub samples: usize,
    pub premise_true: usize,
    pub counterexamples: usize,
    /// Largest `‖y‖_∞ / 2ε` among premise-true samples.
    pub max_ratio: f64,
}

/// Draws `samples` directions, scales each to the edge of the premise and
/// checks the conclusion. Any counterexample refutes the certificate.
pub fn adversarial_search(cert: &MlurCertificate, samples: usize, seed: u64) -> AdversarialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = AdversarialReport { samples, premise_true: 0, counterexamples: 0, max_ratio: 0.0 };
    for k in 0..samples {
        let y0 = match k % 6 {
            0 => random_bump(&mut rng),
            1 => {
                let knots = rng.gen_range(1..8);
                random_pl(&mut rng, knots)
            }
            2 => {
                let t = rng.gen::<f64>();
                let h = if cert.x.eval_clamped(t) >= 0.0 { 1.0 } else { -1.0 };
                spike(t, f64::powf(2.0, -rng.gen_range(1.0..12.0)), h)
            }
            3 => random_bump(&mut rng).add(&random_bump(&mut rng)),
            4 => cert.x.scale(if rng.gen::<bool>() { 1.0 } else { -1.0 }),
            _ => PlFunction::constant(if rng.gen::<bool>() { 1.0 } else { -1.0 }),
        };
        let c = cert.premise_scale(&y0);
        if !c.is_finite() {
            continue;
        }
        let y = y0.scale(c * (1.0 - 1e-9));
        let check = cert.apply(&y);
        if check.premise {
            rep.premise_true += 1;
            rep.max_ratio = rep.max_ratio.max(check.sup_y / cert.conclusion_bound);
        }
        if !check.holds() {
            rep.counterexamples += 1;
        }
    }
    rep
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusReport {
    pub context: &'static str,
    pub epsilon: f64,
    /// Upper bound on `inf_{‖y‖>=ε} max(‖x+y‖, ‖x−y‖) − ‖x‖`.
    pub value: f64,
    pub witness: PlFunction<f64>,
    pub evaluations: usize,
}

/// Seeded multistart search for the MLUR modulus of `x` at `ε`. Candidates
/// are rescaled radially to `‖y‖.lo = ε`; the best one is refined by random
/// local perturbations for the second half of the budget.
pub fn mlur_modulus<N: NormContext>(
    nc: &N,
    x: &PlFunction<f64>,
    epsilon: f64,
    budget: usize,
    seed: u64,
) -> Result<ModulusReport> {
    if !(epsilon >= 0.0) {
        return Err(LabError::Domain(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let mut rep = ModulusReport { context: nc.label(), epsilon, value: 0.0, witness: PlFunction::zero(), evaluations: 0 };
    if epsilon == 0.0 {
        return Ok(rep);
    }
    let x_lo = nc.norm(x).lo;
    let objective = |y0: &PlFunction<f64>| -> Option<(f64, PlFunction<f64>)> {
        let n = nc.norm(y0).lo;
        if !(n > 0.0) {
            return None;
        }
        let y = y0.scale(epsilon / n);
        let v = nc.norm(&x.add(&y)).hi.max(nc.norm(&x.sub(&y)).hi) - x_lo;
        Some((v, y))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = budget.max(1);
    let mut best: Option<(f64, PlFunction<f64>)> = None;
    let consider = |cand: Option<(f64, PlFunction<f64>)>, best: &mut Option<(f64, PlFunction<f64>)>| {
        if let Some(c) = cand {
            if best.as_ref().map_or(true, |b| c.0 < b.0) {
                *best = Some(c);
            }
        }
    };
    let explore = budget.div_ceil(2);
    for k in 0..explore {
        let y0 = match k % 4 {
            0 => random_bump(&mut rng),
            1 => {
                // flat bump: plateau of random width
                let (a, w) = (rng.gen::<f64>(), f64::powf(2.0, -rng.gen_range(1.0..10.0)));
                let r = f64::powf(2.0, -rng.gen_range(4.0..14.0));
                let b = (a + w).min(1.0);
                let h = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                PlFunction::from_nodes(&[((a - r).max(0.0), 0.0), (a, h), (b, h), ((b + r).min(1.0), 0.0)])
                    .unwrap_or_else(|_| spike(a, r, h))
            }
            2 => {
                let knots = rng.gen_range(1..6);
                random_pl(&mut rng, knots)
            }
            _ => random_bump(&mut rng).add(&random_bump(&mut rng)),
        };
        consider(objective(&y0), &mut best);
    }
    for _ in explore..budget {
        let Some((_, y)) = best.as_ref() else { break };
        let step = random_bump(&mut rng).scale(epsilon * rng.gen_range(0.0..0.5));
        consider(objective(&y.add(&step)), &mut best);
    }
    rep.evaluations = budget;
    if let Some((v, y)) = best {
        rep.value = v;
        rep.witness = y;
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub epsilon: f64,
    pub tol: f64,
    pub checked_indices: usize,
    /// `max_t ||u(t)| − |v(t)||`, exact on the merged breakpoint grid.
    pub max_abs_diff: f64,
    pub bound: f64,
    pub holds: bool,
}

/// When `|‖u‖_n − ‖v‖_n| <= tol` for every stored `n` up to the cover for
/// resolution `ε`, both `|u|` and `|v|` are within `ε + tol` of each other
/// pointwise; the reported bound is the looser `4ε + tol`.
pub fn seminorm_rigidity_check(
    ctx: &DNormContext<f64>,
    u: &PlFunction<f64>,
    v: &PlFunction<f64>,
    tol: f64,
    epsilon: f64,
) -> Result<RigidityReport> {
    if !(epsilon > 0.0 && tol >= 0.0) {
        return Err(LabError::Domain("need epsilon > 0 and tol >= 0".into()));
    }
    let lip = u.lipschitz_bound().max(v.lipschitz_bound()).max(1.0);
    let cover = ctx.base().cover_for(epsilon / lip)?;
    let last = *cover.iter().max().expect("nonempty cover");
    let offending: Vec<usize> = (1..=last)
        .filter(|&n| {
            let (su, sv) = (ctx.seminorm(u, n).unwrap(), ctx.seminorm(v, n).unwrap());
            (su - sv).abs() > tol
        })
        .collect();
    if !offending.is_empty() {
        return Err(LabError::Premise { offending });
    }
    let d = u.abs_values().sub(&v.abs_values());
    let max_abs_diff = d.sup_norm();
    let bound = 4.0 * epsilon + tol;
    Ok(RigidityReport { epsilon, tol, checked_indices: last, max_abs_diff, bound, holds: max_abs_diff <= bound })
}

#[derive(Clone, Debug, Serialize)]
pub struct OctahedralReport {
    pub context: &'static str,
    pub epsilon: f64,
    pub y: PlFunction<f64>,
    pub y_norm: Enclosure<f64>,
    pub plus_lo: f64,
    pub minus_lo: f64,
    pub attempts: usize,
}

impl OctahedralReport {
    fn score(&self) -> f64 {
        self.plus_lo.min(self.minus_lo)
    }
}

fn octa_report<N: NormContext>(nc: &N, x: &PlFunction<f64>, y: PlFunction<f64>, epsilon: f64, attempts: usize) -> OctahedralReport {
    OctahedralReport {
        context: nc.label(),
        epsilon,
        y_norm: nc.norm(&y),
        plus_lo: nc.norm(&x.add(&y)).lo,
        minus_lo: nc.norm(&x.sub(&y)).lo,
        y,
        attempts,
    }
}

/// `y` with `‖y‖ <= 1` and `‖x ± y‖.lo > 2 − ε`: the tent flip of `x`
/// (equal to `x` off tiny intervals near the seminorm maximizers, `−x` at
/// their centres), followed by random refinement if the flip falls short.
pub fn local_octahedral_witness(
    ctx: &DNormContext<f64>,
    x: &PlFunction<f64>,
    epsilon: f64,
    budget: usize,
    seed: u64,
) -> Result<OctahedralReport> {
    if !(epsilon > 0.0) {
        return Err(LabError::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let threshold = 2.0 - epsilon;
    let ok = |r: &OctahedralReport| r.plus_lo > threshold && r.minus_lo > threshold && r.y_norm.hi <= 1.0;
    if epsilon >= 2.0 {
        let y = ctx.normalize_feasible(x).unwrap_or_else(PlFunction::zero);
        return Ok(octa_report(ctx, x, y, epsilon, 0));
    }
    let budget = budget.max(1);
    let plan = flip_plan(ctx, x, (epsilon / 4.0).min(0.5))?;
    let mut best: Option<OctahedralReport> = None;
    let mut used = 0;
    for attempt in 0..budget.min(60) {
        used = attempt + 1;
        let Ok(triples) = plan.place(ctx, x, &[], f64::INFINITY, f64::powi(0.5, attempt as i32)) else { break };
        let y = flip(x, &triples);
        let rep = octa_report(ctx, x, y, epsilon, used);
        if ok(&rep) {
            return Ok(rep);
        }
        if best.as_ref().map_or(true, |b| rep.score() > b.score()) {
            best = Some(rep);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while used < budget {
        used += 1;
        let Some(b) = best.as_ref() else { break };
        let step = random_bump(&mut rng).scale(0.1 * rng.gen::<f64>());
        let Some(y) = ctx.normalize_feasible(&b.y.add(&step)) else { continue };
        let rep = octa_report(ctx, x, y, epsilon, used);
        if ok(&rep) {
            return Ok(rep);
        }
        if rep.score() > b.score() {
            best = Some(rep);
        }
    }
    let achieved = best.map_or(f64::NAN, |b| b.score());
    Err(LabError::WitnessNotFound(format!(
        "best min(||x+y||, ||x-y||) = {achieved} after {used} evaluations, need > {threshold}"
    )))
}

/// Max-norm control: one narrow flip next to a maximizer of `|x|`.
pub fn sup_octahedral_witness(x: &PlFunction<f64>, epsilon: f64) -> Result<OctahedralReport> {
    let (m, t0) = x.argmax_abs_closed(0.0, 1.0);
    if !(m > 0.0) {
        return Err(LabError::Domain("x must be nonzero".into()));
    }
    let w = (epsilon / (8.0 * x.lipschitz_bound().max(1.0))).min(1e-3);
    let s = if t0 + 2.0 * w <= 1.0 { t0 + w } else { t0 - w };
    let y = flip(x, &[crate::slice::witness::FlipInterval { n: 0, r: s - w / 2.0, s, t: s + w / 2.0 }]).scale(1.0 / m);
    let xs = x.scale(1.0 / m);
    Ok(octa_report(&crate::norm::SupNorm, &xs, y, epsilon, 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    /// Best `min(‖u+y‖.lo, ‖v+y‖.lo)` over sampled `‖y‖.hi <= 1`.
    pub estimate: f64,
    pub gap: f64,
    /// `max_n |‖u‖_n − ‖v‖_n|` over the evaluated seminorms.
    pub seminorm_gap: f64,
    pub witness: PlFunction<f64>,
    pub evaluations: usize,
}

/// Empirical lower estimate of `sup_{‖y‖<=1} min(‖u+y‖, ‖v+y‖)`; never a
/// certificate that the supremum is small.
pub fn non_octahedral_gap(
    ctx: &DNormContext<f64>,
    u: &PlFunction<f64>,
    v: &PlFunction<f64>,
    budget: usize,
    seed: u64,
) -> Result<GapReport> {
    if u.sub(v).is_zero() {
        return Err(LabError::Domain("u and v must be distinct".into()));
    }
    if u.values().iter().chain(v.values()).any(|&a| a < 0.0) {
        return Err(LabError::Domain("u and v must be nonnegative".into()));
    }
    let (su, sv) = (ctx.seminorms(u), ctx.seminorms(v));
    let seminorm_gap = su.iter().zip(&sv).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let score = |y: &PlFunction<f64>| ctx.d_norm(&u.add(y)).lo.min(ctx.d_norm(&v.add(y)).lo);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = budget.max(1);
    let mut best = (f64::NEG_INFINITY, PlFunction::zero());
    let mut evals = 0;
    let consider = |y: Option<PlFunction<f64>>, best: &mut (f64, PlFunction<f64>), evals: &mut usize| {
        *evals += 1;
        if let Some(y) = y {
            let s = score(&y);
            if s > best.0 {
                *best = (s, y);
            }
        }
    };
    let fixed = [u.clone(), v.clone(), u.add(v), PlFunction::constant(1.0)];
    for f in fixed.iter().take(budget) {
        consider(ctx.normalize_feasible(f), &mut best, &mut evals);
    }
    let explore = budget.div_ceil(2);
    while evals < explore {
        let (a, b) = (rng.gen_range(-1.0..1.5), rng.gen_range(-1.0..1.5));
        let f = PlFunction::lin_comb(a, u, b, v).add(&random_bump(&mut rng).scale(rng.gen::<f64>()));
        consider(ctx.normalize_feasible(&f), &mut best, &mut evals);
    }
    while evals < budget {
        let step = random_bump(&mut rng).scale(0.2 * rng.gen::<f64>());
        let f = best.1.add(&step);
        consider(ctx.normalize_feasible(&f), &mut best, &mut evals);
    }
    Ok(GapReport { estimate: best.0, gap: 2.0 - best.0, seminorm_gap, witness: best.1, evaluations: evals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{EpsilonSchedule, NeighborhoodBase};
    use crate::norm::SupNorm;

    fn ctx(levels: usize) -> DNormContext<f64> {
        let b = NeighborhoodBase::build_leveled(1, EpsilonSchedule::default(), levels).unwrap();
        DNormContext::new(b, 1e-6).unwrap()
    }

    fn tent() -> PlFunction<f64> {
        PlFunction::tent(0.0, 0.5, 1.0, 1.0).unwrap()
    }

    #[test]
    fn certificate_for_constant_uses_level_one() {
        let c = ctx(8);
        let cert = mlur_certificate(&c, &PlFunction::constant(1.0), 0.6).unwrap();
        assert_eq!(cert.delta, 0.6);
        assert_eq!(cert.cover, c.base().level_indices(1));
        assert_eq!(cert.conclusion_bound, 1.2);
    }

    #[test]
    fn certificate_for_tent() {
        let c = ctx(8);
        let cert = mlur_certificate(&c, &tent(), 0.1).unwrap();
        assert_eq!(cert.delta, 0.05);
        assert!(cert.lipschitz * cert.delta <= cert.epsilon);
        // level 5 has lengths 1/32 + 2 eps; level 4 has 1/16 > 0.05
        assert_eq!(c.base().level_of(cert.cover[0]), Some(5));
        assert!(cert.cover.iter().all(|&n| c.base().interval(n).unwrap().length_lt(0.05)));
    }

    #[test]
    fn certificate_needs_resolution() {
        let c = ctx(4);
        assert!(matches!(mlur_certificate(&c, &tent(), 1e-3), Err(LabError::Resolution { .. })));
    }

    #[test]
    fn apply_semantics() {
        let c = ctx(8);
        let cert = mlur_certificate(&c, &tent(), 0.1).unwrap();
        let z = cert.apply(&PlFunction::zero());
        assert!(z.premise && z.conclusion);
        let big = cert.apply(&PlFunction::constant(0.5));
        assert!(!big.premise && big.holds());
    }

    #[test]
    fn premise_scale_lands_on_the_edge() {
        let c = ctx(8);
        let cert = mlur_certificate(&c, &tent(), 0.1).unwrap();
        let y0 = spike(0.3, 0.01, 1.0);
        let s = cert.premise_scale(&y0);
        assert!(cert.apply(&y0.scale(s * (1.0 - 1e-9))).premise);
        assert!(!cert.apply(&y0.scale(s * (1.0 + 1e-6))).premise);
    }

    #[test]
    fn no_counterexamples_small_run() {
        let c = ctx(10);
        let x = c.normalize_feasible(&PlFunction::tent(0.1, 0.4, 0.9, 1.0).unwrap()).unwrap();
        let cert = mlur_certificate(&c, &x, 0.1).unwrap();
        let rep = adversarial_search(&cert, 3000, 7);
        assert_eq!(rep.counterexamples, 0);
        assert!(rep.premise_true > 2500);
        assert!(rep.max_ratio > 0.4 && rep.max_ratio <= 1.0);
    }

    #[test]
    fn modulus_positive_for_d_norm_and_zero_for_sup() {
        let c = ctx(10);
        let one = PlFunction::constant(1.0);
        let d = mlur_modulus(&c, &one, 0.5, 400, 1).unwrap();
        assert!(d.value > 0.0);
        assert_eq!(mlur_modulus(&c, &one, 0.0, 400, 1).unwrap().value, 0.0);
        let s = mlur_modulus(&SupNorm, &tent(), 0.2, 400, 1).unwrap();
        assert!(s.value.abs() < 1e-12, "{}", s.value);
        let x = c.normalize_feasible(&tent()).unwrap();
        let dt = mlur_modulus(&c, &x, 0.2, 400, 1).unwrap();
        assert!(dt.value > s.value);
    }

    #[test]
    fn rigidity_examples() {
        let c = ctx(10);
        let u = PlFunction::tent(0.1, 0.4, 0.9, 0.8).unwrap();
        let r = seminorm_rigidity_check(&c, &u, &u.scale(-1.0), 0.0, 0.1).unwrap();
        assert_eq!(r.max_abs_diff, 0.0);
        let h = 1e-4;
        let v = PlFunction::tent(0.1 + h, 0.4 + h, 0.9 + h, 0.8).unwrap();
        let tol = h * u.lipschitz_bound();
        let r = seminorm_rigidity_check(&c, &u, &v, tol, 0.05).unwrap();
        assert!(r.holds && r.max_abs_diff <= 0.2 + tol);
        let e = seminorm_rigidity_check(&c, &PlFunction::constant(1.0), &tent(), 1e-9, 0.1).unwrap_err();
        assert!(matches!(e, LabError::Premise { ref offending } if !offending.is_empty()));
    }

    #[test]
    fn octahedral_witness_for_constant() {
        let c = ctx(10);
        let x = PlFunction::constant(1.0);
        let r = local_octahedral_witness(&c, &x, 0.2, 100, 3).unwrap();
        assert!(r.plus_lo > 1.8 && r.minus_lo > 1.8 && r.y_norm.hi <= 1.0);
        assert!(r.y.values().iter().any(|&v| v < -0.9));
        let r2 = local_octahedral_witness(&c, &x, 2.0, 100, 3).unwrap();
        assert_eq!(r2.attempts, 0);
        let s = sup_octahedral_witness(&tent(), 0.1).unwrap();
        assert!(s.plus_lo > 1.9 && s.minus_lo > 1.9 && s.y_norm.hi <= 1.0);
    }

    #[test]
    fn octahedral_witness_for_tent() {
        let c = ctx(10);
        let x = c.normalize_feasible(&tent()).unwrap();
        let r = local_octahedral_witness(&c, &x, 0.2, 100, 3).unwrap();
        assert!(r.plus_lo > 1.8 && r.minus_lo > 1.8);
    }

    #[test]
    fn gap_examples() {
        let c = ctx(8);
        let u = PlFunction::constant(1.0);
        assert!(matches!(non_octahedral_gap(&c, &u, &u, 10, 0), Err(LabError::Domain(_))));
        let v = c.normalize_feasible(&tent()).unwrap();
        let r = non_octahedral_gap(&c, &u, &v, 2000, 5).unwrap();
        assert!(r.gap > 0.0 && r.estimate > 1.0);
        assert!(r.seminorm_gap > 0.1);
        assert!(seminorm_rigidity_check(&c, &u, &v, 1e-9, 0.1).is_err());
    }
}
