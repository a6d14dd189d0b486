//! The nested sum `ℝ ⊕_{p₁} (ℝ ⊕_{p₂} (ℝ ⊕ …))` truncated to finitely many
//! coordinates.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{LabError, Result};

const DEFAULT_GEOMETRIC_LEN: usize = 64;

/// Stored exponents `p₁ < p₂ < …` plus an upper bound for `Σ 1/p_i` over the
/// exponents that were not stored.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentSchedule {
    exponents: Vec<f64>,
    tail_bound: f64,
}

impl ExponentSchedule {
    pub fn new(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(LabError::Domain("schedule needs at least one exponent".into()));
        }
        if exponents.iter().any(|&p| !(p > 1.0 && p.is_finite())) {
            return Err(LabError::Domain("exponents must be finite and > 1".into()));
        }
        if exponents.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(LabError::Domain("exponents must be strictly increasing".into()));
        }
        Ok(ExponentSchedule { exponents, tail_bound: 0.0 })
    }

    /// `p_i = start · base^{i−1}` for `i = 1..=len`; the unstored tail of the
    /// reciprocal series is summed exactly.
    pub fn geometric(base: f64, start: f64, len: usize) -> Result<Self> {
        if !(base > 1.0 && start > 1.0) {
            return Err(LabError::Domain(format!("geometric schedule needs base > 1 and start > 1, got {base}, {start}")));
        }
        let exps: Vec<f64> = (0..len).map(|i| start * base.powi(i as i32)).collect();
        let tail = base.powi(-(len as i32)) / (start * (1.0 - 1.0 / base));
        Ok(ExponentSchedule { tail_bound: tail, ..Self::new(exps)? })
    }

    pub fn with_tail_bound(mut self, tail_bound: f64) -> Result<Self> {
        if !(tail_bound >= 0.0) {
            return Err(LabError::Domain("tail bound must be nonnegative".into()));
        }
        self.tail_bound = tail_bound;
        Ok(self)
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Number of coordinates a vector may carry.
    pub fn depth(&self) -> usize {
        self.exponents.len() + 1
    }

    /// `Σ_{i>=from} 1/p_i` including the unstored tail (1-based `from`).
    pub fn reciprocal_sum_from(&self, from: usize) -> f64 {
        let start = from.max(1) - 1;
        self.exponents.iter().skip(start).rev().map(|p| 1.0 / p).sum::<f64>() + self.tail_bound
    }
}

impl FromStr for ExponentSchedule {
    type Err = LabError;

    /// `geometric:base=B,start=S[,len=K]` or `explicit:p1,p2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| LabError::Parse(format!("schedule '{s}': {m}"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad(&format!("not a number: '{v}'")));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected kind:params"))?;
        match kind {
            "geometric" => {
                let (mut base, mut start, mut len) = (None, None, DEFAULT_GEOMETRIC_LEN);
                for kv in rest.split(',') {
                    let (k, v) = kv.split_once('=').ok_or_else(|| bad("expected key=value"))?;
                    match k.trim() {
                        "base" => base = Some(num(v)?),
                        "start" => start = Some(num(v)?),
                        "len" => len = v.trim().parse().map_err(|_| bad("len must be an integer"))?,
                        other => return Err(bad(&format!("unknown key '{other}'"))),
                    }
                }
                Self::geometric(base.ok_or_else(|| bad("missing base"))?, start.ok_or_else(|| bad("missing start"))?, len)
            }
            "explicit" => Self::new(rest.split(',').map(num).collect::<Result<_>>()?),
            other => Err(bad(&format!("unknown kind '{other}'"))),
        }
    }
}

/// `p`-norm of `(a, b)`, scaled to avoid overflow for large `p`.
fn pair_norm(a: f64, b: f64, p: f64) -> f64 {
    let (a, b) = (a.abs(), b.abs());
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    m * ((a / m).powf(p) + (b / m).powf(p)).powf(1.0 / p)
}

/// `N_L = |v_L|`, `N_j = (|v_j|^{p_j} + N_{j+1}^{p_j})^{1/p_j}`; returns `N_1`.
pub fn nested_norm(sched: &ExponentSchedule, v: &[f64]) -> Result<f64> {
    Ok(nested_tails(sched, v)?[0])
}

/// `‖Q_{k}v‖` for `k = 0..len`: the norms of all tails, `out[k]` starting at coordinate `k+1`.
fn nested_tails(sched: &ExponentSchedule, v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(LabError::Domain("empty vector".into()));
    }
    if v.len() > sched.depth() {
        return Err(LabError::Domain(format!("vector has {} coordinates, schedule supports {}", v.len(), sched.depth())));
    }
    let mut out = vec![0.0; v.len()];
    let mut acc = v[v.len() - 1].abs();
    out[v.len() - 1] = acc;
    for j in (0..v.len() - 1).rev() {
        acc = pair_norm(v[j], acc, sched.exponents[j]);
        out[j] = acc;
    }
    Ok(out)
}

/// `‖I : ℓ_∞(2) → ℓ_p(2)‖ = 2^{1/p}`.
pub fn identity_operator_norm(p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(LabError::Domain(format!("need p >= 1, got {p}")));
    }
    Ok(if p.is_infinite() { 1.0 } else { 2f64.powf(1.0 / p) })
}

/// `(2^{Σ 1/p_i}, Σ 1/p_i < 1)` with the tail bound included in the sum.
pub fn product_condition(sched: &ExponentSchedule) -> (f64, bool) {
    let s = sched.reciprocal_sum_from(1);
    (2f64.powf(s), s < 1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct WurLevel {
    pub k: usize,
    /// `max |x_{n,k} − y_{n,k}|` over the first and last tail element.
    pub residual_first: f64,
    pub residual_last: f64,
    /// `max ||‖Q_k x_n‖ − ‖Q_k y_n‖||` at the last element.
    pub tail_norm_difference: f64,
    pub threshold: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WurReport {
    pub tail_start: usize,
    /// `max_n (2 − ‖x_n + y_n‖)` over the tail.
    pub premise_defect: f64,
    pub premise_holds: bool,
    pub vacuous: bool,
    pub passes: bool,
    pub levels: Vec<WurLevel>,
}

/// Level-by-level extraction along the last quarter of the sequences. At
/// level `k` the pair of heads `(|x_k|, ‖Q_k x‖)` and `(|y_k|, ‖Q_k y‖)` sits
/// in `ℓ_{p_k}(2)`, whose modulus of convexity turns a sum-norm defect `d`
/// into `|x_k − y_k| <= 2(p·d/2)^{1/p}` with `p = max(p_k, 2)`.
pub fn wur_difference_extraction(sched: &ExponentSchedule, xs: &[Vec<f64>], ys: &[Vec<f64>], tol: f64) -> Result<WurReport> {
    if xs.len() != ys.len() {
        return Err(LabError::Data(format!("sequence lengths differ: {} vs {}", xs.len(), ys.len())));
    }
    if xs.len() < 4 {
        return Err(LabError::Data(format!("need at least 4 terms to read a trend, got {}", xs.len())));
    }
    let depth = xs.iter().chain(ys).map(Vec::len).max().unwrap_or(0);
    let pad = |v: &Vec<f64>| {
        let mut w = v.clone();
        w.resize(depth, 0.0);
        w
    };
    let (xs, ys): (Vec<Vec<f64>>, Vec<Vec<f64>>) = (xs.iter().map(pad).collect(), ys.iter().map(pad).collect());
    for (n, v) in xs.iter().chain(&ys).enumerate() {
        let nv = nested_norm(sched, v)?;
        if nv > 1.0 + tol {
            return Err(LabError::Domain(format!("term {n} has norm {nv} outside the unit ball")));
        }
    }
    let len = xs.len();
    let tail_start = len - len.div_ceil(4);
    let sums: Vec<Vec<f64>> = xs.iter().zip(&ys).map(|(x, y)| x.iter().zip(y).map(|(a, b)| a + b).collect()).collect();
    let mut premise_defect = 0.0f64;
    for s in &sums[tail_start..] {
        premise_defect = premise_defect.max(2.0 - nested_norm(sched, s)?);
    }
    let premise_holds = premise_defect <= tol;
    let mut rep = WurReport { tail_start, premise_defect, premise_holds, vacuous: !premise_holds, passes: true, levels: Vec::new() };
    if !premise_holds {
        return Ok(rep);
    }
    let last = len - 1;
    let (tx, ty) = (nested_tails(sched, &xs[last])?, nested_tails(sched, &ys[last])?);
    for k in 1..=depth {
        let r = |n: usize| (xs[n][k - 1] - ys[n][k - 1]).abs();
        let tail_norm_difference = if k < depth { (tx[k] - ty[k]).abs() } else { 0.0 };
        let p = sched.exponents[(k - 1).min(sched.exponents.len() - 1)].max(2.0);
        let threshold = 2.0 * (p * tol.max(premise_defect) / 2.0).powf(1.0 / p);
        let (residual_first, residual_last) = (r(tail_start), r(last));
        let passes = residual_last <= threshold && residual_last <= residual_first + tol;
        rep.passes &= passes;
        rep.levels.push(WurLevel { k, residual_first, residual_last, tail_norm_difference, threshold, passes });
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct LargeSliceReport {
    pub m: usize,
    pub epsilon: f64,
    /// `2^{Σ_{i>=m} 1/p_i}`, the distortion of the tail against the max-norm.
    pub tail_product: f64,
    pub value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `2/(1+ε/3)`.
    pub reference: f64,
    pub evaluations: usize,
}

/// Best `‖x − y‖` over pairs in the slice `{v ∈ B : v_m > 1 − ε}` (the
/// coordinate functional `e_m*` has dual norm 1). The structured pair is
/// `s(e_m ± Σ_{j>m} e_j)` scaled to the unit sphere; random sign and
/// magnitude patterns on the tail follow.
pub fn large_slice_check(sched: &ExponentSchedule, depth: usize, m: usize, epsilon: f64, budget: usize, seed: u64) -> Result<LargeSliceReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(LabError::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if depth > sched.depth() || depth < 2 {
        return Err(LabError::Domain(format!("depth must lie in 2..={}", sched.depth())));
    }
    if !(1..depth).contains(&m) {
        return Err(LabError::Domain(format!("coordinate m must lie in 1..{depth}")));
    }
    let tail_product = 2f64.powf(sched.reciprocal_sum_from(m));
    if tail_product > 1.0 + epsilon / 4.0 {
        let required = (m..=sched.depth()).find(|&j| 2f64.powf(sched.reciprocal_sum_from(j)) <= 1.0 + epsilon / 4.0);
        return Err(LabError::Resolution {
            msg: format!("tail from coordinate {m} has distortion {tail_product} > 1 + eps/4"),
            required_level: required.unwrap_or(0),
        });
    }
    let normalize = |v: Vec<f64>| -> Result<Vec<f64>> {
        let n = nested_norm(sched, &v)?;
        let mut w: Vec<f64> = v.iter().map(|a| a / n).collect();
        while nested_norm(sched, &w)? > 1.0 {
            w.iter_mut().for_each(|a| *a *= 1.0 - 4.0 * f64::EPSILON);
        }
        Ok(w)
    };
    let admits = |v: &[f64]| v[m - 1] > 1.0 - epsilon;
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    let mut evals = 0;
    let consider = |x: Vec<f64>, y: Vec<f64>, best: &mut Option<(f64, Vec<f64>, Vec<f64>)>| -> Result<()> {
        if admits(&x) && admits(&y) {
            let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            let v = nested_norm(sched, &d)?;
            if best.as_ref().map_or(true, |b| v > b.0) {
                *best = Some((v, x, y));
            }
        }
        Ok(())
    };
    let signed = |sign: f64| (1..=depth).map(|j| if j < m { 0.0 } else if j == m { 1.0 } else { sign }).collect::<Vec<f64>>();
    consider(normalize(signed(1.0))?, normalize(signed(-1.0))?, &mut best)?;
    evals += 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while evals < budget.max(1) {
        evals += 1;
        let mut draw = || -> Vec<f64> {
            (1..=depth)
                .map(|j| if j < m { 0.0 } else if j == m { 1.0 } else { rng.gen_range(-1.0..=1.0) })
                .collect()
        };
        let (x, y) = (draw(), draw());
        consider(normalize(x)?, normalize(y)?, &mut best)?;
    }
    let (value, x, y) = best.ok_or_else(|| LabError::Sampling("no slice pair found".into()))?;
    Ok(LargeSliceReport { m, epsilon, tail_product, value, x, y, reference: 2.0 / (1.0 + epsilon / 3.0), evaluations: evals })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(p: &[f64]) -> ExponentSchedule {
        ExponentSchedule::new(p.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(nested_norm(&sched(&[2.0]), &[3.0, 4.0]).unwrap(), 5.0);
        let s = sched(&[2.0, 4.0]);
        let v = nested_norm(&s, &[1.0, 1.0, 1.0]).unwrap();
        // independent evaluation order: innermost pair first, by hand
        let inner = (1.0f64 + 1.0).powf(0.25);
        assert!((v - (1.0 + inner * inner).sqrt()).abs() < 1e-15);
        assert!((v - 1.5537739740300374).abs() < 1e-12);
        for j in 0..3 {
            let mut e = vec![0.0; 3];
            e[j] = 1.0;
            assert_eq!(nested_norm(&s, &e).unwrap(), 1.0);
        }
        assert!(nested_norm(&s, &[]).is_err());
        assert!(nested_norm(&s, &[1.0; 4]).is_err());
    }

    #[test]
    fn identity_norms() {
        assert_eq!(identity_operator_norm(1.0).unwrap(), 2.0);
        assert!((identity_operator_norm(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(identity_operator_norm(f64::INFINITY).unwrap(), 1.0);
        assert!(identity_operator_norm(0.5).is_err());
    }

    #[test]
    fn product_examples() {
        let g = ExponentSchedule::from_str("geometric:base=2,start=4").unwrap();
        let (p, ok) = product_condition(&g);
        assert!((p - 2f64.sqrt()).abs() < 1e-12 && ok);
        let boundary = ExponentSchedule::from_str("geometric:base=2,start=2").unwrap();
        let (p, ok) = product_condition(&boundary);
        assert!((p - 2.0).abs() < 1e-12 && !ok);
        assert_eq!(product_condition(&sched(&[2.0])), (2f64.sqrt(), true));
    }

    #[test]
    fn parsing() {
        let g = ExponentSchedule::from_str("geometric:base=2,start=4,len=3").unwrap();
        assert_eq!(g.exponents(), &[4.0, 8.0, 16.0]);
        assert!((g.tail_bound() - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(ExponentSchedule::from_str("explicit:2,3").unwrap().exponents(), &[2.0, 3.0]);
        for bad in ["explicit:3,2", "explicit:1", "geometric:base=2", "nested:1", "explicit:x"] {
            assert!(ExponentSchedule::from_str(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn wur_examples() {
        let s = sched(&[4.0, 8.0]);
        let e1 = vec![1.0, 0.0, 0.0];
        let e2 = vec![0.0, 1.0, 0.0];
        let same = wur_difference_extraction(&s, &vec![e1.clone(); 8], &vec![e1.clone(); 8], 1e-9).unwrap();
        assert!(same.passes && !same.vacuous);
        assert!(same.levels.iter().all(|l| l.residual_last == 0.0));
        let n = 200;
        let xs = vec![e1.clone(); n];
        let ys: Vec<Vec<f64>> = (1..=n).map(|k| vec![1.0 - 1.0 / k as f64, 0.0, 0.0]).collect();
        let conv = wur_difference_extraction(&s, &xs, &ys, 0.01).unwrap();
        assert!(conv.premise_holds && conv.passes, "{conv:?}");
        let apart = wur_difference_extraction(&s, &vec![e1.clone(); 8], &vec![e2; 8], 0.01).unwrap();
        assert!(apart.vacuous && apart.passes);
        assert!((apart.premise_defect - (2.0 - 2f64.powf(0.25))).abs() < 1e-12);
        assert!(matches!(wur_difference_extraction(&s, &xs[..3], &ys[..3], 0.01), Err(LabError::Data(_))));
    }

    #[test]
    fn large_slice() {
        let s = ExponentSchedule::from_str("geometric:base=2,start=4,len=11").unwrap();
        let r = large_slice_check(&s, 12, 8, 0.3, 200, 1).unwrap();
        assert!(r.value > 1.8 && r.value > r.reference);
        assert!(r.x[7] > 0.7 && r.y[7] > 0.7);
        assert!(matches!(large_slice_check(&s, 12, 1, 0.3, 10, 1), Err(LabError::Resolution { .. })));
        assert!(matches!(large_slice_check(&s, 12, 8, 1e-4, 10, 1), Err(LabError::Resolution { .. })));
    }
}
