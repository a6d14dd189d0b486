use serde::{Deserialize, Serialize};

use crate::error::{domain, LabError, Result};
use crate::model::interval::Interval;
use crate::scalar::Scalar;

/// Continuous piecewise-linear function on `[0, 1]`.
///
/// Breakpoints start at 0, end at 1 and are strictly increasing; between two
/// breakpoints the function is the linear interpolant of the stored values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFunction<T>", into = "RawFunction<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct PlFunction<T> {
    breakpoints: Vec<T>,
    values: Vec<T>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawFunction<T> {
    breakpoints: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> TryFrom<RawFunction<T>> for PlFunction<T> {
    type Error = LabError;

    fn try_from(raw: RawFunction<T>) -> Result<Self> {
        PlFunction::new(raw.breakpoints, raw.values)
    }
}

impl<T: Scalar> From<PlFunction<T>> for RawFunction<T> {
    fn from(f: PlFunction<T>) -> Self {
        RawFunction { breakpoints: f.breakpoints, values: f.values }
    }
}

impl<T: Scalar> PlFunction<T> {
    pub fn new(breakpoints: Vec<T>, values: Vec<T>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() {
            return domain("a PL function needs at least two breakpoints and one value per breakpoint");
        }
        if breakpoints[0] != T::zero() || *breakpoints.last().unwrap() != T::one() {
            return domain("breakpoints must start at 0 and end at 1");
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("breakpoints must be strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("function values must be finite");
        }
        Ok(PlFunction { breakpoints, values })
    }

    pub fn constant(c: T) -> Self {
        PlFunction { breakpoints: vec![T::zero(), T::one()], values: vec![c, c] }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// Builds a function from `(t, value)` nodes; nodes at 0 and 1 are added
    /// by constant extension when missing.
    pub fn from_nodes(nodes: &[(T, T)]) -> Result<Self> {
        if nodes.is_empty() {
            return domain("no nodes");
        }
        let mut xs = Vec::with_capacity(nodes.len() + 2);
        let mut ys = Vec::with_capacity(nodes.len() + 2);
        if nodes[0].0 > T::zero() {
            xs.push(T::zero());
            ys.push(nodes[0].1);
        }
        for &(t, v) in nodes {
            xs.push(t);
            ys.push(v);
        }
        let last = *nodes.last().unwrap();
        if last.0 < T::one() {
            xs.push(T::one());
            ys.push(last.1);
        }
        Self::new(xs, ys)
    }

    /// Tent rising from 0 at `left` to `height` at `peak` and back to 0 at
    /// `right`; the support may stick out of `[0, 1]`, in which case it is clipped.
    pub fn tent(left: T, peak: T, right: T, height: T) -> Result<Self> {
        if !(left <= peak && peak <= right && left < right) {
            return domain("tent needs left <= peak <= right with left < right");
        }
        let shape = |t: T| {
            if t <= left || t >= right {
                T::zero()
            } else if t <= peak {
                if peak == left { height } else { height * (t - left) / (peak - left) }
            } else {
                height * (right - t) / (right - peak)
            }
        };
        let mut xs: Vec<T> = [T::zero(), left, peak, right, T::one()]
            .into_iter()
            .filter(|t| *t >= T::zero() && *t <= T::one())
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        let ys = xs.iter().map(|&t| if t == peak { height } else { shape(t) }).collect();
        Self::new(xs, ys)
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }

    pub fn eval(&self, t: T) -> Result<T> {
        if !(t >= T::zero() && t <= T::one()) {
            return domain(format!("evaluation point {t} outside [0,1]"));
        }
        Ok(self.eval_clamped(t))
    }

    /// Evaluation with `t` clamped into `[0, 1]`.
    pub fn eval_clamped(&self, t: T) -> T {
        let t = t.max(T::zero()).min(T::one());
        let k = self.breakpoints.partition_point(|&b| b < t);
        if k < self.len() && self.breakpoints[k] == t {
            return self.values[k];
        }
        // breakpoints[k-1] < t < breakpoints[k]
        let (x0, x1) = (self.breakpoints[k - 1], self.breakpoints[k]);
        let (y0, y1) = (self.values[k - 1], self.values[k]);
        let theta = (t - x0) / (x1 - x0);
        let v = y0 + (y1 - y0) * theta;
        // interpolation never leaves the segment's value range
        v.max(y0.min(y1)).min(y0.max(y1))
    }

    /// Index `k` of the linear piece `[b_k, b_{k+1}]` containing `t`.
    pub fn piece_of(&self, t: T) -> usize {
        let k = self.breakpoints.partition_point(|&b| b <= t);
        k.clamp(1, self.len() - 1) - 1
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Supremum of `|f|` over the closed interval `[a, b] ∩ [0, 1]` together
    /// with a point where it is attained.
    pub fn argmax_abs_closed(&self, a: T, b: T) -> (T, T) {
        let a = a.max(T::zero());
        let b = b.min(T::one());
        let mut best = (self.eval_clamped(a).abs(), a);
        let vb = self.eval_clamped(b).abs();
        if vb > best.0 {
            best = (vb, b);
        }
        let start = self.breakpoints.partition_point(|&x| x <= a);
        for k in start..self.len() {
            let x = self.breakpoints[k];
            if x >= b {
                break;
            }
            let v = self.values[k].abs();
            if v > best.0 {
                best = (v, x);
            }
        }
        best
    }

    pub fn sup_abs_closed(&self, a: T, b: T) -> T {
        self.argmax_abs_closed(a, b).0
    }

    /// Supremum of `|f|` over `I ∩ [0,1]`; open ends use the limit value, so
    /// this is the supremum over the closure.
    pub fn sup_abs_on(&self, interval: &Interval<T>) -> T {
        self.sup_abs_closed(interval.left.value(), interval.right.value())
    }

    /// Largest absolute slope over all pieces.
    pub fn lipschitz_bound(&self) -> T {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
            .fold(T::zero(), T::max)
    }

    /// `a·f + b·g` on the merged breakpoint set.
    pub fn lin_comb(a: T, f: &Self, b: T, g: &Self) -> Self {
        let xs = merge_breakpoints(&f.breakpoints, &g.breakpoints);
        let values = xs
            .iter()
            .map(|&t| a * f.eval_clamped(t) + b * g.eval_clamped(t))
            .collect();
        PlFunction { breakpoints: xs, values }
    }

    pub fn scale(&self, c: T) -> Self {
        PlFunction {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|&v| v * c).collect(),
        }
    }

    pub fn add(&self, g: &Self) -> Self {
        Self::lin_comb(T::one(), self, T::one(), g)
    }

    pub fn sub(&self, g: &Self) -> Self {
        Self::lin_comb(T::one(), self, -T::one(), g)
    }

    pub fn abs_values(&self) -> Self {
        // |f| is PL once zero crossings are inserted.
        let mut xs = vec![self.breakpoints[0]];
        let mut ys = vec![self.values[0].abs()];
        for k in 1..self.len() {
            let (x0, x1) = (self.breakpoints[k - 1], self.breakpoints[k]);
            let (y0, y1) = (self.values[k - 1], self.values[k]);
            if (y0 < T::zero() && y1 > T::zero()) || (y0 > T::zero() && y1 < T::zero()) {
                let z = x0 + (x1 - x0) * (y0 / (y0 - y1));
                if z > x0 && z < x1 {
                    xs.push(z);
                    ys.push(T::zero());
                }
            }
            xs.push(x1);
            ys.push(y1.abs());
        }
        PlFunction { breakpoints: xs, values: ys }
    }

    /// Exact `∫₀¹ f·g dλ` (piecewise quadratic integrand).
    pub fn integral_product(&self, g: &Self) -> T {
        let xs = merge_breakpoints(&self.breakpoints, &g.breakpoints);
        let six = T::lit(6.0);
        let two = T::lit(2.0);
        let mut acc = T::zero();
        let mut prev = (xs[0], self.eval_clamped(xs[0]), g.eval_clamped(xs[0]));
        for &x in &xs[1..] {
            let cur = (x, self.eval_clamped(x), g.eval_clamped(x));
            let h = cur.0 - prev.0;
            acc = acc + h / six * (two * prev.1 * prev.2 + prev.1 * cur.2 + cur.1 * prev.2 + two * cur.1 * cur.2);
            prev = cur;
        }
        acc
    }

    /// Exact `∫₀¹ f dλ`.
    pub fn integral(&self) -> T {
        let two = T::lit(2.0);
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / two)
            .sum()
    }

    /// Exact `∫_a^b |f| dλ` for `0 <= a <= b <= 1`.
    pub fn abs_integral_over(&self, a: T, b: T) -> T {
        let a = a.max(T::zero());
        let b = b.min(T::one());
        if !(a < b) {
            return T::zero();
        }
        let mut nodes = vec![a];
        let start = self.breakpoints.partition_point(|&x| x <= a);
        for &x in &self.breakpoints[start..] {
            if x >= b {
                break;
            }
            nodes.push(x);
        }
        nodes.push(b);
        let two = T::lit(2.0);
        let mut acc = T::zero();
        for w in nodes.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            let (y0, y1) = (self.eval_clamped(x0), self.eval_clamped(x1));
            let h = x1 - x0;
            if (y0 >= T::zero()) == (y1 >= T::zero()) || y0 == T::zero() || y1 == T::zero() {
                acc = acc + h * (y0.abs() + y1.abs()) / two;
            } else {
                let s = y0.abs() + y1.abs();
                acc = acc + h / two * (y0 * y0 + y1 * y1) / s;
            }
        }
        acc
    }

    /// Exact `∫₀¹ |f| dλ`.
    pub fn abs_integral(&self) -> T {
        self.abs_integral_over(T::zero(), T::one())
    }

    /// Uniform grid function `t_k = k/cells` with the given nodal values.
    pub fn on_uniform_grid(values: Vec<T>) -> Result<Self> {
        let cells = values.len().saturating_sub(1);
        if cells == 0 {
            return domain("grid needs at least two nodes");
        }
        let xs = uniform_grid(cells);
        Self::new(xs, values)
    }

    /// Samples `self` at the nodes of a uniform grid with `cells` cells.
    pub fn sample_uniform(&self, cells: usize) -> Vec<T> {
        uniform_grid::<T>(cells).into_iter().map(|t| self.eval_clamped(t)).collect()
    }
}

pub fn uniform_grid<T: Scalar>(cells: usize) -> Vec<T> {
    let n = T::from_usize(cells).unwrap();
    (0..=cells)
        .map(|k| if k == cells { T::one() } else { T::from_usize(k).unwrap() / n })
        .collect()
}

pub(crate) fn merge_breakpoints<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    out
}
