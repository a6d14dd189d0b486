//! Neighborhood bases `(D_n)` of `[0,1]`, truncated to finitely many intervals.
//!
//! The leveled construction places, at level `l`, the `2^l` intervals
//! `(k·2^{-l} − ε_n, (k+1)·2^{-l} + ε_n)` (closed at 0 and at 1), indexed in
//! construction order so level `l` of the level-1 base occupies indices
//! `2^l − 1 ..= 2^{l+1} − 2`. The base with parameter `i` keeps the levels
//! from `i` on and renumbers them from 1.

use std::cmp::Ordering;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::enclosure::Enclosure;
use crate::error::{LabError, Result};
use crate::model::{Endpoint, Interval, IntervalSpec};
use crate::scalar::Scalar;

/// Largest number of stored intervals a base may hold.
pub const MAX_INTERVALS: usize = 1 << 22;

/// `ε_n = eps1 · ratio^{n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub eps1: f64,
    pub ratio: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule { eps1: 2f64.powi(-6), ratio: 0.25 }
    }
}

impl EpsilonSchedule {
    pub fn new(eps1: f64, ratio: f64) -> Result<Self> {
        if !(eps1 > 0.0 && eps1.is_finite()) || !(ratio > 0.0 && ratio < 1.0) {
            return Err(LabError::Configuration(format!(
                "schedule needs eps1 > 0 and ratio in (0,1), got eps1={eps1}, ratio={ratio}"
            )));
        }
        Ok(EpsilonSchedule { eps1, ratio })
    }

    /// `log2 ε_n` for the 1-based index `n` of the level-1 base.
    pub fn log2_eps(&self, n: u64) -> f64 {
        self.eps1.log2() + (n as f64 - 1.0) * self.ratio.log2()
    }

    pub fn eps(&self, n: u64) -> f64 {
        2f64.powf(self.log2_eps(n))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BaseKind {
    Leveled { i: usize, schedule: EpsilonSchedule, levels: usize },
    /// Dyadic intervals widened by `2^{-(l+3)}` on each side at level `l`.
    Dyadic { levels: usize },
    Custom,
}

/// Result of the isolation test for a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isolation<T> {
    pub isolated: bool,
    /// Distance from the point to the nearest closure of a stored interval
    /// that does not contain it.
    pub margin: T,
}

/// Open gap between consecutive endpoints, with its (constant) membership.
#[derive(Clone, Debug)]
pub struct Piece<T> {
    pub left: Endpoint<T>,
    pub right: Endpoint<T>,
    pub members: Vec<usize>,
}

/// Endpoint position together with the exact membership of that point.
#[derive(Clone, Debug)]
pub struct EventPoint<T> {
    pub at: Endpoint<T>,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct NeighborhoodBase<T> {
    intervals: Vec<Interval<T>>,
    kind: BaseKind,
    /// Level (of the level-1 base) of each stored index; 0 for custom bases.
    level_of: Vec<usize>,
}

impl<T: Scalar> NeighborhoodBase<T> {
    /// Leveled base with parameter `i`, storing `levels` levels starting at level `i`.
    pub fn build_leveled(i: usize, schedule: EpsilonSchedule, levels: usize) -> Result<Self> {
        if i == 0 || levels == 0 {
            return Err(LabError::Configuration("leveled base needs i >= 1 and levels >= 1".into()));
        }
        let last = i + levels - 1;
        for l in i..=last {
            let n0 = (1u64 << l) - 1;
            if schedule.log2_eps(n0) >= -((l + 2) as f64) {
                return Err(LabError::Configuration(format!(
                    "schedule violates the overlap constraint at level {l}: eps_{n0} = {} >= 2^-{}",
                    schedule.eps(n0),
                    l + 2
                )));
            }
        }
        let kind = BaseKind::Leveled { i, schedule, levels };
        Self::build_levels(kind, i, levels, |n, _| schedule.log2_eps(n))
    }

    pub fn build_dyadic(levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(LabError::Configuration("dyadic base needs levels >= 1".into()));
        }
        Self::build_levels(BaseKind::Dyadic { levels }, 1, levels, |_, l| -((l + 3) as f64))
    }

    fn build_levels(kind: BaseKind, first: usize, levels: usize, log2_eps: impl Fn(u64, usize) -> f64) -> Result<Self> {
        let last = first + levels - 1;
        if last >= 40 {
            return Err(LabError::Configuration(format!("level {last} is too deep to store")));
        }
        let total: usize = (first..=last).map(|l| 1usize << l).sum();
        if total > MAX_INTERVALS {
            return Err(LabError::Configuration(format!("{total} intervals exceed the storage cap {MAX_INTERVALS}")));
        }
        let mut intervals = Vec::with_capacity(total);
        let mut level_of = Vec::with_capacity(total);
        for l in first..=last {
            for k in 0..(1u64 << l) {
                let n = (1u64 << l) - 1 + k;
                intervals.push(level_interval(l, k, log2_eps(n, l)));
                level_of.push(l);
            }
        }
        Ok(NeighborhoodBase { intervals, kind, level_of })
    }

    pub fn custom(intervals: Vec<Interval<T>>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(LabError::Configuration("custom base needs at least one interval".into()));
        }
        let level_of = vec![0; intervals.len()];
        Ok(NeighborhoodBase { intervals, kind: BaseKind::Custom, level_of })
    }

    /// Parses `leveled:i=2,eps1=0.015625,ratio=0.25,levels=8`,
    /// `dyadic:levels=6` or `custom:@file.json`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (tag, rest) = spec.split_once(':').unwrap_or((spec, ""));
        match tag {
            "leveled" | "dyadic" => {
                let mut i = 1usize;
                let mut levels = 8usize;
                let mut sched = EpsilonSchedule::default();
                for kv in rest.split(',').filter(|s| !s.is_empty()) {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| LabError::Parse(format!("expected key=value, got `{kv}`")))?;
                    let bad = |_| LabError::Parse(format!("bad value for `{k}`: `{v}`"));
                    match k.trim() {
                        "i" => i = v.trim().parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                        "levels" => levels = v.trim().parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                        "eps1" => sched.eps1 = v.trim().parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                        "ratio" => sched.ratio = v.trim().parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                        other => return Err(LabError::Parse(format!("unknown base key `{other}`"))),
                    }
                }
                if tag == "dyadic" {
                    Self::build_dyadic(levels)
                } else {
                    Self::build_leveled(i, EpsilonSchedule::new(sched.eps1, sched.ratio)?, levels)
                }
            }
            "custom" => {
                let path = rest.strip_prefix('@').unwrap_or(rest);
                Self::custom_from_file(Path::new(path))
            }
            other => Err(LabError::Parse(format!("unknown base kind `{other}`"))),
        }
    }

    pub fn custom_from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let specs: Vec<IntervalSpec> = serde_json::from_str(&text)?;
        let intervals = specs.iter().map(|s| s.to_interval()).collect::<Result<Vec<_>>>()?;
        Self::custom(intervals)
    }

    pub fn kind(&self) -> &BaseKind {
        &self.kind
    }

    pub fn n_max(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    /// Interval `D_n` (1-based).
    pub fn interval(&self, n: usize) -> Result<&Interval<T>> {
        if n == 0 || n > self.n_max() {
            return Err(LabError::Index { index: n, max: self.n_max() });
        }
        Ok(&self.intervals[n - 1])
    }

    pub fn level_of(&self, n: usize) -> Option<usize> {
        self.level_of.get(n.wrapping_sub(1)).copied().filter(|&l| l > 0)
    }

    /// Stored levels, shallowest first (empty for custom bases).
    pub fn levels(&self) -> Vec<usize> {
        let mut ls: Vec<usize> = self.level_of.iter().copied().filter(|&l| l > 0).collect();
        ls.dedup();
        ls
    }

    /// 1-based indices of the stored intervals at `level`.
    pub fn level_indices(&self, level: usize) -> Vec<usize> {
        (1..=self.n_max()).filter(|&n| self.level_of[n - 1] == level).collect()
    }

    /// `J(t)` restricted to stored indices, ascending.
    pub fn membership(&self, t: T) -> Vec<usize> {
        (1..=self.n_max()).filter(|&n| self.intervals[n - 1].contains(t)).collect()
    }

    /// Indices whose closure contains `t` (a superset of `J(t)`).
    pub fn closure_membership(&self, t: T) -> Vec<usize> {
        (1..=self.n_max()).filter(|&n| self.intervals[n - 1].closure_contains(t)).collect()
    }

    /// `Σ_{n∈J} 2^{-n}`, summed from the smallest weights up.
    pub fn weight_of(members: &[usize]) -> T {
        members.iter().rev().map(|&n| T::pow2_neg(n)).fold(T::zero(), |a, b| a + b)
    }

    /// Enclosure of `w(t)`; the unknown tail contributes at most `2^{-N_max}`.
    pub fn weight(&self, t: T) -> Enclosure<T> {
        let lo = Self::weight_of(&self.membership(t));
        Enclosure::new(lo, lo + T::pow2_neg(self.n_max()))
    }

    /// Finite family of stored indices covering `[0,1]` with all lengths `< delta`.
    pub fn cover_for(&self, delta: T) -> Result<Vec<usize>> {
        if !(delta > T::zero()) {
            return Err(LabError::Domain("cover resolution must be positive".into()));
        }
        match &self.kind {
            BaseKind::Custom => {
                let small: Vec<usize> =
                    (1..=self.n_max()).filter(|&n| self.intervals[n - 1].length_lt(delta)).collect();
                let sub = NeighborhoodBase {
                    intervals: small.iter().map(|&n| self.intervals[n - 1]).collect(),
                    kind: BaseKind::Custom,
                    level_of: vec![0; small.len()],
                };
                if !small.is_empty() && sub.covers_unit_interval() {
                    Ok(small)
                } else {
                    Err(LabError::Resolution {
                        msg: format!("stored intervals shorter than {delta} do not cover [0,1]"),
                        required_level: 0,
                    })
                }
            }
            _ => {
                for l in self.levels() {
                    let idx = self.level_indices(l);
                    if idx.iter().all(|&n| self.intervals[n - 1].length_lt(delta)) {
                        return Ok(idx);
                    }
                }
                let required_level = self.required_level(delta.to_f64_lossy());
                Err(LabError::Resolution {
                    msg: format!("no stored level has all interval lengths below {delta}"),
                    required_level,
                })
            }
        }
    }

    /// Shallowest level (of the level-1 base) whose intervals are all shorter than `delta`.
    pub fn required_level(&self, delta: f64) -> usize {
        let offset = |l: usize| -> f64 {
            match &self.kind {
                BaseKind::Leveled { schedule, .. } => schedule.eps(((1u64 << l.min(62)) - 1).max(1)),
                BaseKind::Dyadic { .. } => 2f64.powi(-((l + 3) as i32)),
                BaseKind::Custom => 0.0,
            }
        };
        (1..200).find(|&l| 2f64.powi(-(l as i32)) + 2.0 * offset(l) < delta).unwrap_or(200)
    }

    fn covers_unit_interval(&self) -> bool {
        let (pieces, points) = self.sweep();
        pieces.iter().all(|p| !p.members.is_empty()) && points.iter().all(|p| !p.members.is_empty())
    }

    /// Decides the closure hypothesis `t ∉ cl(D_n)` for every `n ∉ J(t)`.
    ///
    /// Stored intervals are checked directly. For leveled bases the unstored
    /// deeper levels are checked as well: a point can only touch the closure
    /// of a deeper interval by coinciding with one of its endpoints
    /// `k·2^{-l} ± ε_n`, which is impossible once the offsets underflow.
    pub fn isolated_at(&self, t: T) -> Isolation<T> {
        let mut margin = T::infinity();
        let mut isolated = true;
        for iv in &self.intervals {
            if !iv.contains(t) {
                if iv.closure_contains(t) {
                    isolated = false;
                }
                margin = margin.min(iv.distance_to_closure(t));
            }
        }
        if !isolated {
            return Isolation { isolated, margin: T::zero() };
        }
        let deeper_ok = match &self.kind {
            BaseKind::Leveled { i, schedule, levels } => {
                deeper_levels_clear(t, i + levels, |n, _| schedule.log2_eps(n))
            }
            BaseKind::Dyadic { levels } => deeper_levels_clear(t, 1 + levels, |_, l| -((l + 3) as f64)),
            BaseKind::Custom => true,
        };
        Isolation { isolated: deeper_ok, margin: if deeper_ok { margin } else { T::zero() } }
    }

    /// Sweep over all endpoints: the open gaps between consecutive endpoint
    /// positions and the endpoint positions themselves, each with its exact
    /// membership set, clipped to `[0,1]`.
    pub fn sweep(&self) -> (Vec<Piece<T>>, Vec<EventPoint<T>>) {
        #[derive(Clone, Copy)]
        struct Ev<T> {
            at: Endpoint<T>,
            idx: usize,
            is_left: bool,
        }
        let mut evs: Vec<Ev<T>> = Vec::with_capacity(2 * self.n_max() + 2);
        for (k, iv) in self.intervals.iter().enumerate() {
            evs.push(Ev { at: iv.left, idx: k + 1, is_left: true });
            evs.push(Ev { at: iv.right, idx: k + 1, is_left: false });
        }
        evs.sort_by(|a, b| a.at.cmp_exact(&b.at));
        let zero = Endpoint::exact(T::zero());
        let one = Endpoint::exact(T::one());

        let mut pieces = Vec::new();
        let mut points = Vec::new();
        let mut active: std::collections::BTreeSet<usize> = Default::default();
        let mut prev = zero;
        let mut prev_is_zero_sentinel = true;
        let mut g = 0;
        while g < evs.len() {
            let at = evs[g].at;
            let mut h = g;
            while h < evs.len() && evs[h].at.cmp_exact(&at) == Ordering::Equal {
                h += 1;
            }
            let group = &evs[g..h];
            // gap (prev, at)
            if prev.cmp_exact(&at) == Ordering::Less {
                if prev_is_zero_sentinel {
                    // the point 0 itself when no endpoint sits there
                    points.push(EventPoint { at: zero, members: active.iter().copied().collect() });
                }
                pieces.push(Piece { left: prev, right: at, members: active.iter().copied().collect() });
            }
            prev_is_zero_sentinel = false;
            let mut at_point: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&n| {
                    let iv = &self.intervals[n - 1];
                    !(iv.right.cmp_exact(&at) == Ordering::Equal && iv.right_open)
                })
                .collect();
            for e in group {
                let iv = &self.intervals[e.idx - 1];
                if e.is_left {
                    if !iv.left_open {
                        at_point.push(e.idx);
                    }
                    active.insert(e.idx);
                } else {
                    active.remove(&e.idx);
                }
            }
            at_point.sort_unstable();
            at_point.dedup();
            points.push(EventPoint { at, members: at_point });
            prev = at;
            g = h;
        }
        if prev.cmp_exact(&one) == Ordering::Less {
            pieces.push(Piece { left: prev, right: one, members: active.iter().copied().collect() });
            points.push(EventPoint { at: one, members: Vec::new() });
        }
        // keep only positions inside [0,1]
        points.retain(|p| p.at.cmp_exact(&zero) != Ordering::Less && p.at.cmp_exact(&one) != Ordering::Greater);
        pieces.retain(|p| p.right.cmp_exact(&zero) == Ordering::Greater && p.left.cmp_exact(&one) == Ordering::Less);
        (pieces, points)
    }

    /// Exact `min_t w_lo(t)` over `[0,1]`; the stored weight is piecewise
    /// constant between endpoints, so gaps and endpoints exhaust all cases.
    pub fn min_weight(&self) -> T {
        let (pieces, points) = self.sweep();
        pieces
            .iter()
            .map(|p| Self::weight_of(&p.members))
            .chain(points.iter().map(|p| Self::weight_of(&p.members)))
            .fold(T::infinity(), T::min)
    }
}

fn level_interval<T: Scalar>(l: usize, k: u64, log2_eps: f64) -> Interval<T> {
    let h = T::pow2_neg(l);
    let count = 1u64 << l;
    let a = T::from_u64(k).unwrap() * h;
    let b = if k + 1 == count { T::one() } else { T::from_u64(k + 1).unwrap() * h };
    let (left, left_open) = if k == 0 { (Endpoint::exact(T::zero()), false) } else { (Endpoint::offset(a, -1, log2_eps), true) };
    let (right, right_open) = if k + 1 == count { (Endpoint::exact(T::one()), false) } else { (Endpoint::offset(b, 1, log2_eps), true) };
    Interval { left, right, left_open, right_open }
}

/// Whether `t` avoids the boundary of every interval at levels `>= first`.
fn deeper_levels_clear<T: Scalar>(t: T, first: usize, log2_eps: impl Fn(u64, usize) -> f64) -> bool {
    if t == T::zero() || t == T::one() {
        // 0 and 1 lie in the outermost interval of every level; all other
        // closures start/end at distance >= 2^{-l} - ε_n > 0.
        return true;
    }
    let min_log2 = T::min_positive_value().to_f64_lossy().log2();
    for l in first..2100 {
        let n0 = if l < 63 { (1u64 << l) - 1 } else { u64::MAX };
        let big = log2_eps(n0, l);
        if big < min_log2 - 1.0 || l >= 1074 {
            // every offset at this level and below is infinitesimal
            return true;
        }
        if l >= 62 {
            // offsets representable this deep: cannot enumerate, stay conservative
            return false;
        }
        let scale = T::lit(2f64.powi(l as i32));
        let center = (t * scale).floor().to_u64().unwrap_or(0);
        let count = 1u64 << l;
        for k in center.saturating_sub(1)..=(center + 1).min(count - 1) {
            let iv: Interval<T> = level_interval(l, k, log2_eps(n0 + k, l));
            if !iv.contains(t) && iv.closure_contains(t) {
                return false;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(i: usize, levels: usize) -> NeighborhoodBase<f64> {
        NeighborhoodBase::build_leveled(i, EpsilonSchedule::default(), levels).unwrap()
    }

    #[test]
    fn first_level_matches_construction() {
        let b = base(1, 1);
        assert_eq!(b.n_max(), 2);
        let eps = EpsilonSchedule::default();
        let d1 = b.interval(1).unwrap();
        assert!(!d1.left_open && d1.right_open);
        assert_eq!(d1.left.value(), 0.0);
        assert_eq!(d1.right.value(), 0.5 + eps.eps(1));
        let d2 = b.interval(2).unwrap();
        assert_eq!(d2.left.value(), 0.5 - eps.eps(2));
        assert!(!d2.right_open);
        assert_eq!(d2.right.value(), 1.0);
    }

    #[test]
    fn second_level_indices() {
        let b = base(1, 2);
        assert_eq!(b.n_max(), 6);
        let d3 = b.interval(3).unwrap();
        assert_eq!(d3.left.value(), 0.0);
        assert_eq!(d3.right.value(), 0.25 + EpsilonSchedule::default().eps(3));
        assert_eq!(b.level_indices(2), vec![3, 4, 5, 6]);
        assert!(matches!(b.interval(7), Err(LabError::Index { index: 7, max: 6 })));
    }

    #[test]
    fn base_two_is_reindexed() {
        let b = base(2, 2);
        assert_eq!(b.n_max(), 4 + 8);
        assert_eq!(b.level_of(1), Some(2));
        assert_eq!(b.level_of(5), Some(3));
        // first stored interval is D_{1,3}
        assert_eq!(b.interval(1).unwrap().right.value(), 0.25 + EpsilonSchedule::default().eps(3));
    }

    #[test]
    fn membership_examples() {
        let b = base(1, 2);
        assert_eq!(b.membership(0.0), vec![1, 3]);
        assert_eq!(b.membership(1.0), vec![2, 6]);
        assert_eq!(b.membership(0.5), vec![1, 2, 4, 5]);
    }

    #[test]
    fn weight_examples() {
        let b = base(1, 2);
        let w0 = b.weight(0.0);
        assert_eq!(w0.lo, 0.625);
        assert_eq!(w0.hi, 0.625 + 2f64.powi(-6));
        assert_eq!(b.weight(1.0).lo, 0.25 + 2f64.powi(-6));
        let b3 = base(1, 3);
        assert_eq!(b3.weight(0.3).width(), 2f64.powi(-14));
        assert_eq!(base(1, 2).weight(0.3).width(), 2f64.powi(-6));
    }

    #[test]
    fn cover_examples() {
        let b = base(1, 4);
        assert_eq!(b.cover_for(0.7).unwrap(), vec![1, 2]);
        assert_eq!(b.cover_for(0.3).unwrap(), vec![3, 4, 5, 6]);
        match b.cover_for(0.01) {
            Err(LabError::Resolution { required_level, .. }) => assert_eq!(required_level, 7),
            other => panic!("expected resolution error, got {other:?}"),
        }
    }

    #[test]
    fn isolation_examples() {
        let b = base(1, 3);
        assert!(b.isolated_at(0.0).isolated);
        assert!(b.isolated_at(1.0).isolated);
        let e2 = EpsilonSchedule::default().eps(2);
        assert!(!b.isolated_at(0.5 - e2).isolated);
        assert!(b.isolated_at(0.5).isolated);
        assert!(b.isolated_at(0.375).isolated);
    }

    #[test]
    fn schedule_violation_is_rejected() {
        let s = EpsilonSchedule::new(0.2, 0.9).unwrap();
        assert!(matches!(NeighborhoodBase::<f64>::build_leveled(1, s, 2), Err(LabError::Configuration(_))));
        assert!(EpsilonSchedule::new(0.1, 1.0).is_err());
    }

    #[test]
    fn deep_levels_keep_overlaps() {
        // offsets underflow long before level 12, yet adjacent intervals still overlap
        let b = base(1, 12);
        assert_eq!(b.n_max(), (1 << 13) - 2);
        for t in [0.5, 0.25, 0.125, 1.0 / 1024.0, 3.0 / 4096.0] {
            let j = b.membership(t);
            let deepest: Vec<_> = j.iter().filter(|&&n| b.level_of(n) == Some(12)).collect();
            assert_eq!(deepest.len(), 2, "t={t}");
        }
        assert!(b.cover_for(1.0 / 2048.0).is_ok());
    }

    #[test]
    fn sweep_min_weight_matches_grid() {
        let b = base(1, 3);
        let min = b.min_weight();
        assert!(min > 0.0);
        for k in 0..=4096 {
            assert!(b.weight(k as f64 / 4096.0).lo >= min);
        }
        let (pieces, points) = b.sweep();
        assert!(pieces.iter().any(|p| NeighborhoodBase::<f64>::weight_of(&p.members) == min)
            || points.iter().any(|p| NeighborhoodBase::<f64>::weight_of(&p.members) == min));
    }

    #[test]
    fn spec_strings() {
        let b = NeighborhoodBase::<f64>::from_spec("leveled:i=2,eps1=0.015625,ratio=0.25,levels=3").unwrap();
        assert_eq!(b.n_max(), 4 + 8 + 16);
        assert!(NeighborhoodBase::<f64>::from_spec("leveled:levels=x").is_err());
        assert!(NeighborhoodBase::<f64>::from_spec("hexagonal:levels=2").is_err());
        let d = NeighborhoodBase::<f64>::from_spec("dyadic:levels=3").unwrap();
        assert_eq!(d.n_max(), 14);
        assert_eq!(d.membership(0.0), vec![1, 3, 7]);
    }

    #[test]
    fn custom_base_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.json");
        std::fs::write(&p, r#"[{"left":0,"right":0.6,"left_open":false},{"left":0.4,"right":1,"right_open":false}]"#).unwrap();
        let b = NeighborhoodBase::<f64>::from_spec(&format!("custom:@{}", p.display())).unwrap();
        assert_eq!(b.membership(0.5), vec![1, 2]);
        assert_eq!(b.cover_for(0.7).unwrap(), vec![1, 2]);
        assert!(b.cover_for(0.5).is_err());
        assert!(b.isolated_at(0.2).isolated);
        assert!(!b.isolated_at(0.4).isolated);
    }

    #[test]
    fn single_precision_base() {
        let b = NeighborhoodBase::<f32>::build_leveled(1, EpsilonSchedule::default(), 6).unwrap();
        assert_eq!(b.membership(0.0f32), vec![1, 3, 7, 15, 31, 63]);
        assert!(b.isolated_at(1.0f32).isolated);
    }
}
