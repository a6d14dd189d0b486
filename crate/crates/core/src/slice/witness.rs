//! Tent-flip companions inside a slice.
//!
//! Given `x` in a slice with `‖x‖ > 1−δ`, pick disjoint intervals
//! `E_n = (r_n, t_n) ⊂ D_n` near maximizers of `|x|` on `D_n` and replace `x`
//! on `E_n` by the PL path through `x(r_n)`, `−x(s_n)`, `x(t_n)`. The new
//! function `y` stays in the slice while `‖x − y‖_n >= 2|x(s_n)|` for `n <= N`.

use serde::Serialize;

use super::SliceSpec;
use crate::error::{LabError, Result};
use crate::model::PlFunction;
use crate::norm::DNormContext;

/// Relative contraction applied to the flipped function so that rounding can
/// never make `‖y‖` exceed `‖x‖`.
const CONTRACTION: f64 = 1e-12;
const MAX_ATTEMPTS: usize = 60;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FlipInterval {
    pub n: usize,
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessCertificate {
    pub y: PlFunction<f64>,
    pub flip_intervals: Vec<FlipInterval>,
    #[serde(rename = "N")]
    pub n_terms: usize,
    pub delta: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub achieved_functional: f64,
    pub achieved_distance_lo: f64,
    /// `2(Σ_{n<=N} 2^{-n}|x(s_n)|²)^{1/2}`.
    pub chain_bound: f64,
    pub x_norm_hi: f64,
    pub y_norm_hi: f64,
    pub attempts: usize,
}

impl WitnessCertificate {
    /// Re-evaluates all three inequalities from scratch.
    pub fn verify(&self, ctx: &DNormContext<f64>, slice: &SliceSpec, x: &PlFunction<f64>) -> Result<()> {
        let fail = |inequality: String| {
            Err(LabError::Certificate { certificate: "tent-flip witness (LD2P+)".into(), inequality })
        };
        let f = slice.value(&self.y);
        if !(f > 1.0 - slice.epsilon) {
            return fail(format!("x*(y) = {f} > 1 - eps = {}", 1.0 - slice.epsilon));
        }
        let d = ctx.d_norm(&x.sub(&self.y)).lo;
        if !(d > 2.0 - 2.0 * self.delta) {
            return fail(format!("||x - y||.lo = {d} > 2 - 2 delta = {}", 2.0 - 2.0 * self.delta));
        }
        let (ny, nx) = (ctx.d_norm(&self.y).hi, ctx.d_norm(x).hi);
        if !(ny <= nx) {
            return fail(format!("||y||.hi = {ny} <= ||x||.hi = {nx}"));
        }
        Ok(())
    }
}

/// Open pieces of `(a, b)` on which `|x| > level` and `x` is linear with constant sign.
fn superlevel_segments(x: &PlFunction<f64>, a: f64, b: f64, level: f64) -> Vec<(f64, f64)> {
    let xs = x.breakpoints();
    let mut out = Vec::new();
    for k in 0..xs.len() - 1 {
        let lo = xs[k].max(a);
        let hi = xs[k + 1].min(b);
        if !(lo < hi) {
            continue;
        }
        let (y0, y1) = (x.eval_clamped(lo), x.eval_clamped(hi));
        for sign in [1.0, -1.0] {
            let (u0, u1) = (sign * y0, sign * y1);
            let (p, q) = match (u0 > level, u1 > level) {
                (true, true) => (lo, hi),
                (true, false) => (lo, lo + (hi - lo) * (u0 - level) / (u0 - u1)),
                (false, true) => (lo + (hi - lo) * (level - u0) / (u1 - u0), hi),
                (false, false) => continue,
            };
            if p < q {
                out.push((p, q));
            }
        }
    }
    out
}

fn remove_closed(segs: Vec<(f64, f64)>, r: f64, t: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(segs.len() + 1);
    for (a, b) in segs {
        if b <= r || a >= t {
            out.push((a, b));
            continue;
        }
        if a < r {
            out.push((a, r));
        }
        if t < b {
            out.push((t, b));
        }
    }
    out
}

/// Builds `(1−κ)·y` from `x` and the disjoint flip triples (sorted by `r`).
pub(crate) fn flip(x: &PlFunction<f64>, triples: &[FlipInterval]) -> PlFunction<f64> {
    let mut pts: Vec<(f64, f64)> = x.breakpoints().iter().zip(x.values()).map(|(&t, &v)| (t, v)).collect();
    for f in triples {
        pts.push((f.r, x.eval_clamped(f.r)));
        pts.push((f.s, -x.eval_clamped(f.s)));
        pts.push((f.t, x.eval_clamped(f.t)));
    }
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    pts.dedup_by(|p, q| p.0 == q.0);
    let (ts, vs): (Vec<f64>, Vec<f64>) = pts.into_iter().map(|(t, v)| (t, v * (1.0 - CONTRACTION))).unzip();
    PlFunction::new(ts, vs).expect("flip keeps breakpoints ordered")
}

/// Number of leading seminorms `N` and per-term level drops `τ_n` for a
/// flip of `x` whose chain bound exceeds `2(1−δ)`.
pub(crate) struct FlipPlan {
    pub n_terms: usize,
    sem: Vec<(f64, f64)>,
    tau: Vec<f64>,
}

pub(crate) fn flip_plan(ctx: &DNormContext<f64>, x: &PlFunction<f64>, delta: f64) -> Result<FlipPlan> {
    let sem = ctx.seminorms_with_argmax(x);
    let target = (1.0 - delta) * (1.0 - delta);
    let mut acc = 0.0;
    let mut n_terms = 0;
    for (k, &(v, _)) in sem.iter().enumerate() {
        acc += f64::powi(2.0, -(k as i32 + 1)) * v * v;
        if acc > target * (1.0 + 1e-12) {
            n_terms = k + 1;
            break;
        }
    }
    if n_terms == 0 {
        return Err(LabError::Domain("truncated norm never exceeds 1 - delta".into()));
    }
    // Σ 2^{-n} ‖x‖_n τ_n = R/4 keeps Σ 2^{-n}|x(s_n)|² above (1−δ)² with margin R/2.
    let room = acc - target;
    let weighted: f64 = (1..=n_terms).map(|n| f64::powf(2.0, -(n as f64) / 2.0) * sem[n - 1].0).sum();
    let c = room / (4.0 * weighted);
    let tau = (1..=n_terms).map(|n| (c * f64::powf(2.0, n as f64 / 2.0)).min(0.5 * sem[n - 1].0)).collect();
    Ok(FlipPlan { n_terms, sem, tau })
}

impl FlipPlan {
    /// Disjoint flip triples (sorted by `r`), finest interval first, avoiding
    /// `atoms` and with half-widths at most `mass_cap · shrink / 2`.
    pub(crate) fn place(
        &self,
        ctx: &DNormContext<f64>,
        x: &PlFunction<f64>,
        atoms: &[f64],
        mass_cap: f64,
        shrink: f64,
    ) -> Result<Vec<FlipInterval>> {
        let mut triples: Vec<FlipInterval> = Vec::with_capacity(self.n_terms);
        for n in (1..=self.n_terms).rev() {
            if self.sem[n - 1].0 == 0.0 {
                continue;
            }
            let (a, b) = ctx.base().interval(n)?.inner_bounds();
            let mut segs = superlevel_segments(x, a, b, self.sem[n - 1].0 - self.tau[n - 1]);
            for f in &triples {
                segs = remove_closed(segs, f.r, f.t);
            }
            for &q in atoms {
                segs = remove_closed(segs, q, q);
            }
            let pick = segs
                .iter()
                .filter(|(p, q)| q - p > 1e-12 * (1.0 + p.abs()))
                .map(|&(p, q)| {
                    let len = q - p;
                    let mid = if x.eval_clamped(p).abs() >= x.eval_clamped(q).abs() { p + len / 4.0 } else { q - len / 4.0 };
                    (mid, len)
                })
                .max_by(|u, v| x.eval_clamped(u.0).abs().total_cmp(&x.eval_clamped(v.0).abs()));
            let Some((s, len)) = pick else {
                return Err(LabError::WitnessNotFound(format!(
                    "no room for a flip interval inside D_{n} (atoms or earlier intervals block every near-maximizer)"
                )));
            };
            let half = (len / 4.0).min(mass_cap) * shrink / 2.0;
            let (r, t) = (s - half, s + half);
            if !(r < s && s < t) {
                return Err(LabError::WitnessNotFound(format!("flip interval in D_{n} collapsed below resolution")));
            }
            triples.push(FlipInterval { n, r, s, t });
        }
        triples.sort_by(|p, q| p.r.total_cmp(&q.r));
        Ok(triples)
    }
}

/// `2(Σ 2^{-n}|x(s_n)|²)^{1/2}` over the flip triples.
pub(crate) fn chain_bound(x: &PlFunction<f64>, triples: &[FlipInterval]) -> f64 {
    2.0 * triples.iter().map(|f| f64::powi(2.0, -(f.n as i32)) * x.eval_clamped(f.s).powi(2)).sum::<f64>().sqrt()
}

/// Constructs and verifies a tent-flip companion `y` of `x` in `slice`.
///
/// `eta` bounds the loss of functional value on the flip set; by default it
/// is `(ε − δ)/2`, and it is always capped at half the slack of `x` in the slice.
pub fn tent_flip_witness(
    ctx: &DNormContext<f64>,
    slice: &SliceSpec,
    x: &PlFunction<f64>,
    delta_target: f64,
    eta: Option<f64>,
) -> Result<WitnessCertificate> {
    let eps = slice.epsilon;
    let delta = delta_target;
    if !(delta > 0.0 && delta < eps) {
        return Err(LabError::Domain(format!("need 0 < delta < eps, got delta={delta}, eps={eps}")));
    }
    let xn = ctx.d_norm(x);
    if xn.hi > 1.0 {
        return Err(LabError::Domain(format!("x is not certified in the unit ball (||x||.hi = {})", xn.hi)));
    }
    let fx = slice.value(x);
    if !(fx > 1.0 - eps) {
        return Err(LabError::Domain(format!("x is not a certified slice member: x*(x) = {fx}")));
    }
    if !(xn.lo > 1.0 - delta) {
        return Err(LabError::Domain(format!("need ||x||.lo = {} > 1 - delta = {}", xn.lo, 1.0 - delta)));
    }

    let plan = flip_plan(ctx, x, delta)?;
    let n_terms = plan.n_terms;

    let slack = fx - (1.0 - eps);
    let eta = eta.unwrap_or((eps - delta) / 2.0).min(slack / 2.0);
    if !(eta > 0.0) {
        return Err(LabError::Domain("eta must be positive".into()));
    }
    let gsup = slice.functional.density().sup_norm();
    let mass_cap = if gsup > 0.0 {
        eta * slice.functional_norm.hi / (2.0 * x.sup_norm() * gsup * n_terms as f64)
    } else {
        f64::INFINITY
    };
    let atoms: Vec<f64> = slice.functional.atoms().iter().filter(|a| a.w != 0.0).map(|a| a.t).collect();

    for attempt in 0..MAX_ATTEMPTS {
        let triples = plan.place(ctx, x, &atoms, mass_cap, f64::powi(0.5, attempt as i32))?;
        let y = flip(x, &triples);
        let chain = chain_bound(x, &triples);
        let mut cert = WitnessCertificate {
            y,
            flip_intervals: triples,
            n_terms,
            delta,
            eta,
            epsilon: eps,
            achieved_functional: 0.0,
            achieved_distance_lo: 0.0,
            chain_bound: chain,
            x_norm_hi: xn.hi,
            y_norm_hi: 0.0,
            attempts: attempt + 1,
        };
        cert.flip_intervals.sort_by_key(|f| f.n);
        cert.achieved_functional = slice.value(&cert.y);
        cert.achieved_distance_lo = ctx.d_norm(&x.sub(&cert.y)).lo;
        cert.y_norm_hi = ctx.d_norm(&cert.y).hi;
        if cert.verify(ctx, slice, x).is_ok() {
            return Ok(cert);
        }
    }
    Err(LabError::WitnessNotFound(format!("certificate did not verify after {MAX_ATTEMPTS} shrink steps")))
}
