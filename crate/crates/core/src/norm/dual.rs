//! Two-sided brackets for `‖m‖* = sup{∫x dm : ‖x‖_D <= 1}`.
//!
//! Lower bounds come from explicit feasible functions found by ascent.
//! Upper bounds come from splitting `m = Σ m_n` with `m_n` carried by the
//! closure of `D_n`: then `∫x dm <= Σ‖m_n‖·‖x‖_n <= (Σ 2^n‖m_n‖²)^{1/2}‖x‖_D`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::DNormContext;
use crate::error::{LabError, Result};
use crate::model::function::merge_breakpoints;
use crate::model::{uniform_grid, Atom, Measure, PlFunction};

/// Deepest index used by the split bound; `2^{-1000}` is far below any tolerance.
const SPLIT_INDEX_CAP: usize = 1000;
const SPLIT_SWEEPS: usize = 200;

#[derive(Clone, Copy, Debug)]
pub struct DualOptions {
    /// Number of objective evaluations spent by the ascent.
    pub budget: usize,
    pub seed: u64,
    /// Cells of the uniform grid the candidate functions live on.
    pub grid: usize,
    pub iterations_per_start: usize,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions { budget: 10_000, seed: 0, grid: 1024, iterations_per_start: 100 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DualNormBracket {
    pub lower: f64,
    pub upper: f64,
    /// `total_variation / b_lo`.
    pub tv_upper: f64,
    pub split_upper: f64,
    /// Feasible function (`‖x‖_D.hi <= 1`) attaining `lower`.
    pub witness: PlFunction<f64>,
    pub evaluations: usize,
}

/// `m = Σ c_n δ_{t_n}` with `t_n` a maximizer of `|x|` on the closure of `D_n`:
/// `∫x dm = ‖x‖` (truncated) and `‖m‖* <= norm_upper ≈ 1`.
#[derive(Clone, Debug, Serialize)]
pub struct NormingFunctional {
    pub measure: Measure<f64>,
    pub value: f64,
    pub norm_upper: f64,
}

/// Candidate functions as nodal values on a fixed grid, with the seminorm
/// windows of the evaluated base indices precomputed.
struct GridModel {
    xs: Vec<f64>,
    windows: Vec<Window>,
    coef: Vec<f64>,
    tail: f64,
}

struct Window {
    lo: usize,
    hi: usize,
    left: Option<(usize, f64)>,
    right: Option<(usize, f64)>,
}

/// Where a seminorm is attained, for the subgradient.
enum Probe {
    Node(usize),
    Between(usize, f64),
}

impl GridModel {
    fn new(ctx: &DNormContext<f64>, m: &Measure<f64>, grid: usize) -> Self {
        let atoms: Vec<f64> = m.atoms().iter().map(|a| a.t).collect();
        let xs = merge_breakpoints(&uniform_grid::<f64>(grid), &atoms);
        let locate = |p: f64| -> Option<(usize, f64)> {
            let k = xs.partition_point(|&x| x < p);
            if k < xs.len() && xs[k] == p {
                None
            } else {
                Some((k - 1, (p - xs[k - 1]) / (xs[k] - xs[k - 1])))
            }
        };
        let windows = (1..=ctx.terms())
            .map(|n| {
                let (a, b) = ctx.closure(n);
                Window {
                    lo: xs.partition_point(|&x| x < a),
                    hi: xs.partition_point(|&x| x <= b),
                    left: locate(a),
                    right: locate(b),
                }
            })
            .collect();
        let mut coef = vec![0.0; xs.len()];
        for a in m.atoms() {
            let k = xs.partition_point(|&x| x < a.t);
            coef[k] += a.w;
        }
        let g = m.density();
        if !g.is_zero() {
            for k in 0..xs.len() {
                let mut nodes = Vec::with_capacity(3);
                let mut vals = Vec::with_capacity(3);
                if k > 0 {
                    nodes.push(0.0);
                    vals.push(0.0);
                    if k > 1 {
                        nodes.push(xs[k - 1]);
                        vals.push(0.0);
                    }
                }
                nodes.push(xs[k]);
                vals.push(1.0);
                if k + 1 < xs.len() {
                    if k + 2 < xs.len() {
                        nodes.push(xs[k + 1]);
                        vals.push(0.0);
                    }
                    nodes.push(1.0);
                    vals.push(0.0);
                }
                let hat = PlFunction::new(nodes, vals).expect("hat function");
                coef[k] += hat.integral_product(g);
            }
        }
        GridModel { xs, windows, coef, tail: ctx.tail_weight() }
    }

    fn interp(x: &[f64], (k, th): (usize, f64)) -> f64 {
        x[k] + (x[k + 1] - x[k]) * th
    }

    fn seminorm(&self, x: &[f64], w: &Window) -> (f64, f64, Probe) {
        let mut best = (0.0f64, 0.0f64, Probe::Node(w.lo.min(x.len() - 1)));
        if let Some(p) = w.left {
            let v = Self::interp(x, p);
            best = (v.abs(), v, Probe::Between(p.0, p.1));
        }
        if let Some(p) = w.right {
            let v = Self::interp(x, p);
            if v.abs() > best.0 {
                best = (v.abs(), v, Probe::Between(p.0, p.1));
            }
        }
        for (i, &v) in x.iter().enumerate().take(w.hi).skip(w.lo) {
            if v.abs() > best.0 {
                best = (v.abs(), v, Probe::Node(i));
            }
        }
        best
    }

    /// `(L(x), N_hi(x) without rounding pad, ∇N)`.
    fn evaluate(&self, x: &[f64], want_grad: bool) -> (f64, f64, Vec<f64>) {
        let lin: f64 = self.coef.iter().zip(x).map(|(c, v)| c * v).sum();
        let mut sq = 0.0;
        let mut probes = Vec::new();
        for (k, w) in self.windows.iter().enumerate().rev() {
            let (a, v, p) = self.seminorm(x, w);
            let wt = f64::powi(2.0, -(k as i32 + 1));
            sq += wt * a * a;
            if want_grad {
                probes.push((wt * v, p));
            }
        }
        let (imax, sup) = x.iter().enumerate().fold((0, 0.0f64), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        sq += self.tail * sup * sup;
        let n = sq.sqrt();
        let mut grad = Vec::new();
        if want_grad && n > 0.0 {
            grad = vec![0.0; x.len()];
            for (wv, p) in probes {
                match p {
                    Probe::Node(i) => grad[i] += wv / n,
                    Probe::Between(k, th) => {
                        grad[k] += wv * (1.0 - th) / n;
                        grad[k + 1] += wv * th / n;
                    }
                }
            }
            grad[imax] += self.tail * x[imax] / n;
        }
        (lin, n, grad)
    }

    fn function(&self, x: &[f64]) -> PlFunction<f64> {
        PlFunction::new(self.xs.clone(), x.to_vec()).expect("grid function")
    }
}

impl DNormContext<f64> {
    /// Rescales `x` radially so that `‖x‖_D.hi <= 1` holds as computed.
    pub fn normalize_feasible(&self, x: &PlFunction<f64>) -> Option<PlFunction<f64>> {
        let n = self.d_norm(x).hi;
        if !(n > 0.0) {
            return None;
        }
        let mut y = x.scale(1.0 / n);
        while self.d_norm(&y).hi > 1.0 {
            y = y.scale(1.0 - 4.0 * f64::EPSILON);
        }
        Some(y)
    }

    /// Certified upper bound from the best split `m = Σ m_n` found by block
    /// coordinate descent over the allocation of each atom and each density
    /// piece to the base intervals whose closure contains it.
    pub fn split_dual_upper(&self, m: &Measure<f64>) -> f64 {
        let cap = self.base().n_max().min(SPLIT_INDEX_CAP);
        let mut cells: Vec<(f64, Vec<usize>)> = Vec::new();
        for a in m.atoms() {
            if a.w != 0.0 {
                let j: Vec<usize> = self.base().closure_membership(a.t).into_iter().filter(|&n| n <= cap).collect();
                cells.push((a.w.abs(), j));
            }
        }
        if !m.density().is_zero() {
            let (pieces, _) = self.base().sweep();
            for p in pieces {
                let mass = m.density().abs_integral_over(p.left.value(), p.right.value());
                if mass > 0.0 {
                    cells.push((mass, p.members.into_iter().filter(|&n| n <= cap).collect()));
                }
            }
        }
        if cells.iter().any(|c| c.1.is_empty()) {
            return f64::INFINITY;
        }
        if cells.is_empty() {
            return 0.0;
        }
        let pw: Vec<f64> = (0..=cap).map(|n| f64::powi(2.0, n as i32)).collect();
        let mut alloc: Vec<Vec<f64>> = cells
            .iter()
            .map(|(_, j)| {
                let tot: f64 = j.iter().rev().map(|&n| 1.0 / pw[n]).sum();
                j.iter().map(|&n| 1.0 / pw[n] / tot).collect()
            })
            .collect();
        let loads = |alloc: &[Vec<f64>]| {
            let mut mn = vec![0.0; cap + 1];
            for ((mass, j), a) in cells.iter().zip(alloc) {
                for (&n, &f) in j.iter().zip(a) {
                    mn[n] += mass * f;
                }
            }
            mn
        };
        let mut mn = loads(&alloc);
        let mut value: f64 = (1..=cap).map(|n| pw[n] * mn[n] * mn[n]).sum();
        for _ in 0..SPLIT_SWEEPS {
            for ((mass, j), a) in cells.iter().zip(alloc.iter_mut()) {
                let rest: Vec<f64> = j.iter().zip(a.iter()).map(|(&n, &f)| (mn[n] - mass * f).max(0.0)).collect();
                let fresh = water_fill(*mass, j, &rest, &pw);
                for ((&n, f), g) in j.iter().zip(a.iter_mut()).zip(fresh) {
                    mn[n] += mass * (g - *f);
                    *f = g;
                }
            }
            let next: f64 = (1..=cap).map(|n| pw[n] * mn[n] * mn[n]).sum();
            let done = next >= value * (1.0 - 1e-13);
            value = next;
            if done {
                break;
            }
        }
        // renormalize so every cell is fully allocated before the final bound
        for a in alloc.iter_mut() {
            let s: f64 = a.iter().sum();
            a.iter_mut().for_each(|f| *f /= s);
        }
        let mn = loads(&alloc);
        let f: f64 = (1..=cap).map(|n| pw[n] * mn[n] * mn[n]).sum();
        f.sqrt() * (1.0 + 1e-12)
    }

    pub fn dual_norm(&self, m: &Measure<f64>, budget: usize, seed: u64) -> Result<DualNormBracket> {
        self.dual_norm_with(m, DualOptions { budget, seed, ..DualOptions::default() })
    }

    /// Bracket `lower <= ‖m‖* <= upper`. The ascent walks a fixed
    /// deterministic sequence of starts and steps and keeps the best value, so
    /// `lower` is monotone in the budget.
    pub fn dual_norm_with(&self, m: &Measure<f64>, opts: DualOptions) -> Result<DualNormBracket> {
        if m.is_zero() {
            return Err(LabError::Domain("dual norm of the zero measure".into()));
        }
        if opts.grid == 0 {
            return Err(LabError::Configuration("grid needs at least one cell".into()));
        }
        let model = GridModel::new(self, m, opts.grid);
        let len = model.xs.len();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

        let mut fixed: Vec<Vec<f64>> = Vec::new();
        let mut atoms: Vec<&Atom<f64>> = m.atoms().iter().filter(|a| a.w != 0.0).collect();
        atoms.sort_by(|a, b| b.w.abs().total_cmp(&a.w.abs()));
        for a in atoms.iter().take(32) {
            let mut x = vec![0.0; len];
            x[model.xs.partition_point(|&t| t < a.t)] = a.w.signum();
            fixed.push(x);
        }
        fixed.push(model.coef.iter().map(|c| c.signum()).collect());
        fixed.push(vec![1.0; len]);
        fixed.push(vec![-1.0; len]);

        let mut evals = 0usize;
        let mut best: (f64, Vec<f64>) = (f64::NEG_INFINITY, fixed[0].clone());
        let budget = opts.budget.max(1);
        let mut start = 0usize;
        while evals < budget {
            let mut x = if start < fixed.len() {
                fixed[start].clone()
            } else {
                random_start(&model.xs, &mut rng)
            };
            start += 1;
            for k in 0..opts.iterations_per_start.max(1) {
                if evals >= budget {
                    break;
                }
                evals += 1;
                let (lin, n, grad) = model.evaluate(&x, true);
                if !(n > 0.0) {
                    break;
                }
                let r = lin / n;
                if r > best.0 {
                    best = (r, x.clone());
                }
                x.iter_mut().for_each(|v| *v /= n);
                let g: Vec<f64> = model.coef.iter().zip(&grad).map(|(c, d)| c - lin / n * d).collect();
                let gmax = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                if gmax == 0.0 {
                    break;
                }
                let xmax = x.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
                let step = 0.3 / ((k + 1) as f64).sqrt() * xmax / gmax;
                x.iter_mut().zip(&g).for_each(|(v, d)| *v += step * d);
            }
        }

        let witness = self
            .normalize_feasible(&model.function(&best.1))
            .unwrap_or_else(PlFunction::zero);
        let lower = m.integrate(&witness).max(0.0);
        let b = self.sup_norm_bounds().b_lo;
        let tv_upper = m.total_variation() / b * (1.0 + 1e-12);
        let split_upper = self.split_dual_upper(m);
        let upper = tv_upper.min(split_upper).max(lower);
        Ok(DualNormBracket { lower, upper, tv_upper, split_upper, witness, evaluations: evals })
    }

    /// Norming measure for `x`, built from the seminorm maximizers.
    pub fn norming_functional(&self, x: &PlFunction<f64>) -> Result<NormingFunctional> {
        let s = self.seminorms_with_argmax(x);
        let vals: Vec<f64> = s.iter().map(|p| p.0).collect();
        let l = self.partial_square(&vals).sqrt();
        if !(l > 0.0) {
            return Err(LabError::Domain("norming functional of the zero function".into()));
        }
        let mut atoms: Vec<Atom<f64>> = Vec::new();
        let mut split_sq = 0.0;
        for (k, &(v, t)) in s.iter().enumerate().rev() {
            if v == 0.0 {
                continue;
            }
            let c = f64::powi(2.0, -(k as i32 + 1)) * v * x.eval_clamped(t).signum() / l;
            split_sq += f64::powi(2.0, k as i32 + 1) * c * c;
            match atoms.iter_mut().find(|a| a.t == t) {
                Some(a) => a.w += c,
                None => atoms.push(Atom { t, w: c }),
            }
        }
        let measure = Measure::new(atoms, PlFunction::zero())?;
        let value = measure.integrate(x);
        Ok(NormingFunctional { measure, value, norm_upper: split_sq.sqrt() * (1.0 + 1e-12) })
    }
}

/// Optimal simplex allocation of `mass` over `j` given the other loads `rest`:
/// minimizes `Σ 2^n (rest_n + mass·a_n)²`, i.e. raises the loads to the water
/// level `τ·2^{-n}`.
fn water_fill(mass: f64, j: &[usize], rest: &[f64], pw: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..j.len()).collect();
    order.sort_by(|&p, &q| (rest[p] * pw[j[p]]).total_cmp(&(rest[q] * pw[j[q]])));
    let (mut inv, mut load) = (0.0, 0.0);
    let mut tau = 0.0;
    let mut active = 0;
    for (k, &p) in order.iter().enumerate() {
        inv += 1.0 / pw[j[p]];
        load += rest[p];
        tau = (mass + load) / inv;
        active = k + 1;
        if k + 1 == order.len() || tau <= rest[order[k + 1]] * pw[j[order[k + 1]]] {
            break;
        }
    }
    let mut a = vec![0.0; j.len()];
    for &p in &order[..active] {
        a[p] = ((tau / pw[j[p]] - rest[p]) / mass).max(0.0);
    }
    let s: f64 = a.iter().sum();
    if s > 0.0 {
        a.iter_mut().for_each(|f| *f /= s);
    } else {
        a[order[0]] = 1.0;
    }
    a
}

fn random_start(xs: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let knots = rng.gen_range(2..=16);
    let mut ts: Vec<f64> = (0..knots - 2).map(|_| rng.gen::<f64>()).collect();
    ts.push(0.0);
    ts.push(1.0);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let vs: Vec<f64> = ts.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let f = PlFunction::new(ts, vs).expect("random start");
    xs.iter().map(|&t| f.eval_clamped(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{EpsilonSchedule, NeighborhoodBase};

    fn ctx(levels: usize) -> DNormContext<f64> {
        let b = NeighborhoodBase::build_leveled(1, EpsilonSchedule::default(), levels).unwrap();
        DNormContext::new(b, 1e-6).unwrap()
    }

    #[test]
    fn dirac_bracket_matches_formula() {
        let c = ctx(8);
        for t in [0.0, 0.3, 1.0] {
            let exact = c.dirac_dual_norm(t).unwrap();
            let b = c.dual_norm(&Measure::dirac(t).unwrap(), 10_000, 1).unwrap();
            assert!(b.lower <= exact.hi + 1e-12, "t={t}");
            assert!(b.upper >= exact.lo - 1e-12, "t={t}");
            assert!((b.lower - exact.mid()).abs() < 1e-2, "t={t}: {} vs {}", b.lower, exact.mid());
            assert!((b.split_upper - exact.hi).abs() < 1e-9, "t={t}");
            assert!(c.d_norm(&b.witness).hi <= 1.0);
        }
    }

    #[test]
    fn homogeneity() {
        let c = ctx(6);
        let m = Measure::dirac(0.3).unwrap();
        let b1 = c.dual_norm(&m, 2000, 7).unwrap();
        let b2 = c.dual_norm(&m.scale(2.0), 2000, 7).unwrap();
        assert!((b2.lower - 2.0 * b1.lower).abs() < 1e-12);
        assert!((b2.upper - 2.0 * b1.upper).abs() < 1e-9);
    }

    #[test]
    fn lebesgue_bracket() {
        let c = ctx(6);
        let b = c.dual_norm(&Measure::lebesgue(), 2000, 3).unwrap();
        assert!(b.lower >= 1.0 - 1e-12);
        assert!(b.upper >= b.lower);
        assert!(b.split_upper < b.tv_upper);
    }

    #[test]
    fn monotone_in_budget() {
        let c = ctx(5);
        let m = Measure::new(vec![Atom { t: 0.2, w: 1.0 }, Atom { t: 0.7, w: -0.5 }], PlFunction::tent(0.0, 0.5, 1.0, 1.0).unwrap()).unwrap();
        let mut prev = 0.0;
        for budget in [50, 200, 800, 3000] {
            let b = c.dual_norm(&m, budget, 11).unwrap();
            assert!(b.lower >= prev);
            assert!(b.lower <= b.upper);
            prev = b.lower;
        }
    }

    #[test]
    fn zero_measure_is_rejected() {
        let c = ctx(3);
        assert!(matches!(c.dual_norm(&Measure::atomic(&[]).unwrap(), 10, 0), Err(LabError::Domain(_))));
    }

    #[test]
    fn norming_functional_norms() {
        let c = ctx(8);
        for x in [PlFunction::constant(1.0), PlFunction::tent(0.2, 0.4, 0.9, -1.5).unwrap()] {
            let nf = c.norming_functional(&x).unwrap();
            let n = c.d_norm(&x);
            assert!(nf.value >= n.lo - 1e-12 && nf.value <= n.hi + 1e-12);
            assert!(nf.norm_upper <= 1.0 + 1e-9);
            let su = c.split_dual_upper(&nf.measure);
            assert!(su <= nf.norm_upper * (1.0 + 1e-6), "{su} vs {}", nf.norm_upper);
        }
    }
}
