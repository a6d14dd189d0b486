//! Sampled lower bounds for diameters of slices, shells and convex
//! combinations of slices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{tent_flip_witness, SliceSpec};
use crate::error::{LabError, Result};
use crate::model::{Measure, PlFunction};
use crate::norm::{DNormContext, DualOptions};
use crate::sampling::random_bump;

const RANDOM_MEMBERS: usize = 12;
const COMBINATION_MEMBERS: usize = 24;

#[derive(Clone, Debug)]
pub enum SetSpec {
    Ball,
    Slice(SliceSpec),
    /// Slice intersected with `{‖x‖ >= 1 − tau}`.
    Shell { slice: SliceSpec, tau: f64 },
    /// `Σ (1/k) S_j` over the listed slices.
    Combination(Vec<SliceSpec>),
}

#[derive(Clone, Debug, Serialize)]
pub struct PairRow {
    pub first: usize,
    pub second: usize,
    pub distance_lo: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiameterResult {
    pub value: f64,
    pub pair: (PlFunction<f64>, PlFunction<f64>),
    pub evaluations: usize,
    pub members: usize,
    pub max_member_norm: f64,
    pub rows: Vec<PairRow>,
}

/// Certified members of one slice: the dual-ascent witness of its
/// functional, tent-flip companions of it, and random perturbations.
pub(crate) fn slice_members(ctx: &DNormContext<f64>, s: &SliceSpec, rng: &mut ChaCha8Rng) -> Result<Vec<PlFunction<f64>>> {
    let mut out = Vec::new();
    let seed = rng.gen::<u64>();
    let b = ctx.dual_norm_with(&s.functional, DualOptions { budget: 1500, seed, ..DualOptions::default() })?;
    let x0 = b.witness;
    let member = |f: &PlFunction<f64>| ctx.d_norm(f).hi <= 1.0 && s.admits(f);
    if !member(&x0) {
        return Ok(out);
    }
    for div in [4.0, 16.0] {
        if let Ok(cert) = tent_flip_witness(ctx, s, &x0, s.epsilon / div, None) {
            out.push(cert.y);
        }
    }
    out.insert(0, x0.clone());
    let mut tries = 0;
    let mut added = 0;
    while added < RANDOM_MEMBERS && tries < 20 * RANDOM_MEMBERS {
        tries += 1;
        let z = x0.add(&random_bump(rng).scale(s.epsilon * rng.gen::<f64>()));
        let Some(z) = ctx.normalize_feasible(&z) else { continue };
        if member(&z) {
            out.push(z);
            added += 1;
        }
    }
    Ok(out)
}

fn ball_members(ctx: &DNormContext<f64>, rng: &mut ChaCha8Rng) -> Vec<PlFunction<f64>> {
    let mut out = Vec::new();
    for f in [PlFunction::constant(1.0), PlFunction::constant(-1.0)] {
        out.extend(ctx.normalize_feasible(&f));
    }
    for _ in 0..RANDOM_MEMBERS {
        let f = random_bump(rng).add(&random_bump(rng));
        if let Some(g) = ctx.normalize_feasible(&f) {
            out.push(g.scale(-1.0));
            out.push(g);
        }
    }
    out
}

fn members(ctx: &DNormContext<f64>, set: &SetSpec, rng: &mut ChaCha8Rng) -> Result<Vec<PlFunction<f64>>> {
    Ok(match set {
        SetSpec::Ball => ball_members(ctx, rng),
        SetSpec::Slice(s) => slice_members(ctx, s, rng)?,
        SetSpec::Shell { slice, tau } => slice_members(ctx, slice, rng)?
            .into_iter()
            .filter(|f| ctx.d_norm(f).lo >= 1.0 - tau)
            .collect(),
        SetSpec::Combination(slices) => {
            if slices.is_empty() {
                return Err(LabError::Domain("empty combination".into()));
            }
            let pools = slices.iter().map(|s| slice_members(ctx, s, rng)).collect::<Result<Vec<_>>>()?;
            if pools.iter().any(|p| p.is_empty()) {
                return Ok(Vec::new());
            }
            let k = slices.len() as f64;
            let combine = |pick: &[usize]| {
                pools
                    .iter()
                    .zip(pick)
                    .fold(PlFunction::zero(), |acc, (p, &j)| acc.add(&p[j].scale(1.0 / k)))
            };
            let mut out = Vec::new();
            let depth = pools.iter().map(|p| p.len()).min().unwrap();
            for j in 0..depth.min(3) {
                out.push(combine(&vec![j; pools.len()]));
            }
            while out.len() < COMBINATION_MEMBERS {
                let pick: Vec<usize> = pools.iter().map(|p| rng.gen_range(0..p.len())).collect();
                out.push(combine(&pick));
            }
            out
        }
    })
}

/// Best `‖x − y‖_D.lo` over pairs of certified members, evaluated in a fixed
/// order; `budget` caps the number of pairs, so the value is monotone in it.
pub fn diameter_lower_bound(ctx: &DNormContext<f64>, set: &SetSpec, budget: usize, seed: u64) -> Result<DiameterResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = members(ctx, set, &mut rng)?;
    if pool.is_empty() {
        return Err(LabError::Sampling("no certified member of the set was found".into()));
    }
    let max_member_norm = pool.iter().map(|f| ctx.d_norm(f).hi).fold(0.0, f64::max);
    let mut best = (0.0, 0usize, 0usize);
    let mut rows = Vec::new();
    'outer: for a in 0..pool.len() {
        for b in a + 1..pool.len() {
            if rows.len() >= budget {
                break 'outer;
            }
            let d = ctx.d_norm(&pool[a].sub(&pool[b])).lo;
            rows.push(PairRow { first: a, second: b, distance_lo: d });
            if d > best.0 {
                best = (d, a, b);
            }
        }
    }
    Ok(DiameterResult {
        value: best.0,
        pair: (pool[best.1].clone(), pool[best.2].clone()),
        evaluations: rows.len(),
        members: pool.len(),
        max_member_norm,
        rows,
    })
}

/// Slice of a measure normalized by its dual-norm bracket; convenience for callers.
pub fn measure_slice(ctx: &DNormContext<f64>, m: Measure<f64>, epsilon: f64, seed: u64) -> Result<SliceSpec> {
    SliceSpec::from_measure(ctx, m, epsilon, DualOptions { seed, ..DualOptions::default() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{EpsilonSchedule, NeighborhoodBase};

    fn ctx() -> DNormContext<f64> {
        let b = NeighborhoodBase::build_leveled(1, EpsilonSchedule::default(), 8).unwrap();
        DNormContext::new(b, 1e-6).unwrap()
    }

    #[test]
    fn lebesgue_slice_has_large_diameter() {
        let c = ctx();
        let s = measure_slice(&c, Measure::lebesgue(), 0.3, 1).unwrap();
        let r = diameter_lower_bound(&c, &SetSpec::Slice(s), 10_000, 4).unwrap();
        assert!(r.value > 1.8, "{}", r.value);
    }

    #[test]
    fn ball_diameter_is_at_most_two() {
        let c = ctx();
        let r = diameter_lower_bound(&c, &SetSpec::Ball, 500, 2).unwrap();
        assert!(r.value <= 2.0);
        assert!(r.value >= 2.0 - f64::powf(2.0, -(c.base().n_max() as f64) / 2.0) - 1e-12);
    }

    #[test]
    fn monotone_in_budget() {
        let c = ctx();
        let s = SliceSpec::dirac(&c, 0.3, 0.2).unwrap();
        let set = SetSpec::Slice(s);
        let mut prev = 0.0;
        for budget in [1, 5, 20, 100] {
            let r = diameter_lower_bound(&c, &set, budget, 8).unwrap();
            assert!(r.value >= prev);
            assert_eq!(r.rows.len(), r.evaluations);
            prev = r.value;
        }
    }

    #[test]
    fn shell_members_are_near_the_sphere() {
        let c = ctx();
        let s = SliceSpec::dirac(&c, 0.6, 0.2).unwrap();
        let r = diameter_lower_bound(&c, &SetSpec::Shell { slice: s, tau: 0.01 }, 100, 1).unwrap();
        assert!(c.d_norm(&r.pair.0).lo >= 0.99 && c.d_norm(&r.pair.1).lo >= 0.99);
    }
}
