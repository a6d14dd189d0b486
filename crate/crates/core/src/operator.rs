//! Rank-1 projections on `X_D`, lower bounds for operator norms, and the
//! finite max-norm sequence model used as a control.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::enclosure::Enclosure;
use crate::error::{LabError, Result};
use crate::model::{Measure, PlFunction};
use crate::norm::DNormContext;
use crate::sampling::{random_bump, random_pl};
use crate::slice::diameter::slice_members;
use crate::slice::witness::{flip, flip_plan};
use crate::slice::SliceSpec;

/// `P x = (∫x dm)·u` with `∫u dm = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct Rank1Projection {
    pub direction: PlFunction<f64>,
    pub functional: Measure<f64>,
    pub normalization: f64,
}

impl Rank1Projection {
    pub fn new(direction: PlFunction<f64>, functional: Measure<f64>) -> Result<Self> {
        let normalization = functional.integrate(&direction);
        if !((normalization - 1.0).abs() <= 1e-10) {
            return Err(LabError::Construction(format!("∫u dm = {normalization}, a projection needs 1")));
        }
        Ok(Rank1Projection { direction, functional, normalization })
    }

    /// Norm-one projection onto the dual-ascent witness `u` of `δ_t`, with
    /// `m = δ_t / u(t)`.
    pub fn norm_one_at(ctx: &DNormContext<f64>, t: f64, budget: usize, seed: u64) -> Result<Self> {
        let b = ctx.dual_norm(&Measure::dirac(t)?, budget, seed)?;
        let u = b.witness;
        let ut = u.eval(t)?;
        if !(ut > 0.0) {
            return Err(LabError::Construction(format!("dual witness vanishes at {t}")));
        }
        Self::new(u, Measure::atomic(&[(t, 1.0 / ut)])?)
    }

    pub fn apply(&self, x: &PlFunction<f64>) -> PlFunction<f64> {
        self.direction.scale(self.functional.integrate(x))
    }

    /// `‖P‖ = ‖u‖_D · ‖m‖*`.
    pub fn norm(&self, ctx: &DNormContext<f64>, budget: usize, seed: u64) -> Result<Enclosure<f64>> {
        let u = ctx.d_norm(&self.direction);
        let m = ctx.dual_norm(&self.functional, budget, seed)?;
        Ok(Enclosure::new(u.lo * m.lower, u.hi * m.upper))
    }
}

#[derive(Clone, Debug)]
pub enum OperatorExpr {
    Identity,
    Projection(Rank1Projection),
    Scaled(f64, Box<OperatorExpr>),
    Sum(Box<OperatorExpr>, Box<OperatorExpr>),
}

impl OperatorExpr {
    pub fn identity_minus(p: Rank1Projection) -> Self {
        OperatorExpr::Sum(
            Box::new(OperatorExpr::Identity),
            Box::new(OperatorExpr::Scaled(-1.0, Box::new(OperatorExpr::Projection(p)))),
        )
    }

    pub fn apply(&self, x: &PlFunction<f64>) -> PlFunction<f64> {
        match self {
            OperatorExpr::Identity => x.clone(),
            OperatorExpr::Projection(p) => p.apply(x),
            OperatorExpr::Scaled(c, t) => t.apply(x).scale(*c),
            OperatorExpr::Sum(a, b) => a.apply(x).add(&b.apply(x)),
        }
    }

    fn projections(&self) -> Vec<&Rank1Projection> {
        match self {
            OperatorExpr::Identity => Vec::new(),
            OperatorExpr::Projection(p) => vec![p],
            OperatorExpr::Scaled(_, t) => t.projections(),
            OperatorExpr::Sum(a, b) => {
                let mut v = a.projections();
                v.extend(b.projections());
                v
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrajectoryPoint {
    pub evaluations: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorNormReport {
    /// `max ‖Tx‖.lo / ‖x‖.hi` over the evaluated `x`.
    pub value: f64,
    pub witness: PlFunction<f64>,
    pub evaluations: usize,
    pub trajectory: Vec<TrajectoryPoint>,
}

/// Flips of each projection direction away from the atoms of its functional:
/// for `T = I − P` these send `u` to `y` with `‖y − u‖` close to `2‖u‖`.
fn flip_candidates(ctx: &DNormContext<f64>, p: &Rank1Projection) -> Vec<PlFunction<f64>> {
    let Some(u) = ctx.normalize_feasible(&p.direction) else { return Vec::new() };
    let atoms: Vec<f64> = p.functional.atoms().iter().map(|a| a.t).collect();
    let mut out = vec![u.clone()];
    for delta in [0.05, 0.02, 0.01, 0.005, 0.002] {
        let Ok(plan) = flip_plan(ctx, &u, delta) else { continue };
        for shrink in [1.0, 0.25, 1.0 / 64.0] {
            if let Ok(triples) = plan.place(ctx, &u, &atoms, f64::INFINITY, shrink) {
                out.push(flip(&u, &triples));
            }
        }
    }
    out
}

/// Seeded multistart ascent for `‖T‖`: structured starts (constants,
/// projection directions and their flips), random PL functions, then random
/// local perturbations of the incumbent. Monotone in `budget`.
pub fn operator_norm_lower(ctx: &DNormContext<f64>, t: &OperatorExpr, budget: usize, seed: u64) -> OperatorNormReport {
    let budget = budget.max(1);
    let mut rep = OperatorNormReport { value: 0.0, witness: PlFunction::zero(), evaluations: 0, trajectory: Vec::new() };
    let consider = |x: &PlFunction<f64>, rep: &mut OperatorNormReport| {
        rep.evaluations += 1;
        let d = ctx.d_norm(x).hi;
        if !(d > 0.0) {
            return;
        }
        let v = ctx.d_norm(&t.apply(x)).lo / d;
        if v > rep.value {
            rep.value = v;
            rep.witness = x.clone();
            rep.trajectory.push(TrajectoryPoint { evaluations: rep.evaluations, value: v });
        }
    };
    let mut fixed = vec![PlFunction::constant(1.0)];
    for p in t.projections() {
        fixed.extend(flip_candidates(ctx, p));
    }
    for x in fixed.iter().take(budget) {
        consider(x, &mut rep);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let explore = (budget / 4).max(rep.evaluations);
    while rep.evaluations < explore {
        let x = if rep.evaluations % 2 == 0 {
            let knots = rng.gen_range(1..8);
            random_pl(&mut rng, knots)
        } else {
            random_bump(&mut rng)
        };
        consider(&x, &mut rep);
    }
    while rep.evaluations < budget {
        let step = random_bump(&mut rng).scale(0.1 * rng.gen::<f64>());
        let x = rep.witness.add(&step);
        consider(&x, &mut rep);
    }
    rep
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionCheck {
    pub p_norm: Enclosure<f64>,
    /// `1 + ‖P‖.hi`, the triangle bound for `‖I − P‖`.
    pub upper: f64,
    pub lower: f64,
    /// `(1 + ‖P‖.lo) − lower`; shrinks towards 0 when `‖I − P‖ = 1 + ‖P‖`.
    pub gap: f64,
    pub witness: PlFunction<f64>,
    pub evaluations: usize,
    pub trajectory: Vec<TrajectoryPoint>,
}

pub fn ld2p_plus_projection_check(
    ctx: &DNormContext<f64>,
    p: &Rank1Projection,
    budget: usize,
    seed: u64,
) -> Result<ProjectionCheck> {
    let p_norm = p.norm(ctx, budget.clamp(1, 10_000), seed)?;
    let r = operator_norm_lower(ctx, &OperatorExpr::identity_minus(p.clone()), budget, seed);
    Ok(ProjectionCheck {
        p_norm,
        upper: 1.0 + p_norm.hi,
        lower: r.value,
        gap: 1.0 + p_norm.lo - r.value,
        witness: r.witness,
        evaluations: r.evaluations,
        trajectory: r.trajectory,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DaugavetReport {
    /// Best `‖x + y‖.lo` over certified members `y` of the slice.
    pub value: f64,
    pub witness: PlFunction<f64>,
    pub members: usize,
    pub evaluations: usize,
}

/// Best `‖x + y‖_D.lo` over sampled `y` in the slice; an empirical value,
/// not a certificate either way.
pub fn daugavet_slice_test(
    ctx: &DNormContext<f64>,
    x: &PlFunction<f64>,
    slice: &SliceSpec,
    budget: usize,
    seed: u64,
) -> Result<DaugavetReport> {
    let member = |f: &PlFunction<f64>| ctx.d_norm(f).hi <= 1.0 && slice.admits(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = Vec::new();
    if member(x) {
        pool.push(x.clone());
    }
    pool.extend(slice_members(ctx, slice, &mut rng)?);
    let budget = budget.max(1);
    let mut best: Option<(f64, PlFunction<f64>)> = None;
    let mut evals = 0;
    let mut members = 0;
    let consider = |y: &PlFunction<f64>, best: &mut Option<(f64, PlFunction<f64>)>| {
        let v = ctx.d_norm(&x.add(y)).lo;
        if best.as_ref().map_or(true, |b| v > b.0) {
            *best = Some((v, y.clone()));
        }
    };
    for y in pool.iter().take(budget) {
        evals += 1;
        members += 1;
        consider(y, &mut best);
    }
    while evals < budget {
        evals += 1;
        let Some((_, y)) = best.as_ref() else { break };
        let step = random_bump(&mut rng).scale(slice.epsilon * rng.gen::<f64>());
        let Some(z) = ctx.normalize_feasible(&y.add(&step)) else { continue };
        if member(&z) {
            members += 1;
            consider(&z, &mut best);
        }
    }
    let Some((value, witness)) = best else {
        return Err(LabError::Sampling("no certified slice member was sampled".into()));
    };
    Ok(DaugavetReport { value, witness, members, evaluations: evals })
}

#[derive(Clone, Debug, Serialize)]
pub struct C0Report {
    pub dim: usize,
    pub epsilon: f64,
    /// `sup ‖e₁ − y‖_∞` over `y` in the unit ball with `y₁ > 1 − ε`
    /// (a supremum over the closed box; the face `y₁ = 1 − ε` is excluded).
    pub sup_distance: f64,
    pub p_norm: f64,
    pub i_minus_p_norm: f64,
    pub equation_holds: bool,
    pub gap: f64,
}

/// Exact evaluation in `(ℝ^d, ‖·‖_∞)` with `P = e₁ ⊗ e₁*`: every quantity is
/// a convex function on a box, so its maximum sits at a vertex.
pub fn c0_model_control(dim: usize, epsilon: f64) -> Result<C0Report> {
    if !(1..=20).contains(&dim) {
        return Err(LabError::Domain(format!("dimension must lie in 1..=20, got {dim}")));
    }
    if !(epsilon > 0.0 && epsilon <= 2.0) {
        return Err(LabError::Domain(format!("epsilon must lie in (0, 2], got {epsilon}")));
    }
    let vertices = |first: [f64; 2]| {
        (0..1usize << dim).map(move |mask| {
            (0..dim)
                .map(|j| {
                    let bit = mask >> j & 1;
                    if j == 0 { first[bit] } else if bit == 1 { 1.0 } else { -1.0 }
                })
                .collect::<Vec<f64>>()
        })
    };
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let sup_distance = vertices([1.0 - epsilon, 1.0])
        .map(|y| {
            let mut d = y.iter().map(|a| -a).collect::<Vec<_>>();
            d[0] += 1.0;
            sup(&d)
        })
        .fold(0.0, f64::max);
    let p_norm = vertices([-1.0, 1.0]).map(|y| y[0].abs()).fold(0.0, f64::max);
    let i_minus_p_norm = vertices([-1.0, 1.0]).map(|y| sup(&y[1..])).fold(0.0, f64::max);
    let gap = 1.0 + p_norm - i_minus_p_norm;
    Ok(C0Report { dim, epsilon, sup_distance, p_norm, i_minus_p_norm, equation_holds: gap.abs() < 1e-12, gap })
}
