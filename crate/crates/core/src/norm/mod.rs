//! Seminorms `‖x‖_n`, the D-norm `(Σ 2^{-n}‖x‖_n²)^{1/2}` with a certified
//! truncation enclosure, the equivalence constant and dual norms.

mod dual;

use std::sync::OnceLock;

use serde::Serialize;

pub use dual::{DualNormBracket, DualOptions, NormingFunctional};

use crate::base::NeighborhoodBase;
use crate::enclosure::Enclosure;
use crate::error::{LabError, Result};
use crate::model::PlFunction;
use crate::scalar::Scalar;

/// `X_D`: a base together with the accuracy the caller expects from enclosures.
#[derive(Debug)]
pub struct DNormContext<T> {
    base: NeighborhoodBase<T>,
    tolerance: T,
    terms: usize,
    closures: Vec<(T, T)>,
    b_lo: OnceLock<T>,
}

impl<T: Scalar> Clone for DNormContext<T> {
    fn clone(&self) -> Self {
        DNormContext {
            base: self.base.clone(),
            tolerance: self.tolerance,
            terms: self.terms,
            closures: self.closures.clone(),
            b_lo: self.b_lo.clone(),
        }
    }
}

/// Number of series terms beyond which `2^{-n}` is invisible next to the
/// squared unit roundoff; the rest of the series is carried by the tail term.
pub fn significant_terms<T: Scalar>() -> usize {
    let e = T::epsilon().to_f64_lossy();
    (-(e * e / 16.0).log2()).ceil() as usize + 1
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SupNormBounds<T> {
    /// Certified `b` with `b‖x‖_∞ <= ‖x‖_D`.
    pub b_lo: T,
    /// `‖x‖_D <= ‖x‖_∞` holds with constant 1.
    pub upper: T,
}

impl<T: Scalar> DNormContext<T> {
    pub fn new(base: NeighborhoodBase<T>, tolerance: T) -> Result<Self> {
        let terms = base.n_max().min(significant_terms::<T>());
        Self::with_terms(base, tolerance, terms)
    }

    /// Evaluates only the first `terms` seminorms; the remainder goes into the tail bound.
    pub fn with_terms(base: NeighborhoodBase<T>, tolerance: T, terms: usize) -> Result<Self> {
        if !(tolerance > T::zero()) {
            return Err(LabError::Configuration("tolerance must be positive".into()));
        }
        let terms = terms.clamp(1, base.n_max());
        let closures = base.intervals()[..terms].iter().map(|iv| (iv.left.value(), iv.right.value())).collect();
        Ok(DNormContext { base, tolerance, terms, closures, b_lo: OnceLock::new() })
    }

    pub fn base(&self) -> &NeighborhoodBase<T> {
        &self.base
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    /// Number of seminorms evaluated explicitly.
    pub fn terms(&self) -> usize {
        self.terms
    }

    /// Closed hull `[a_n, b_n]` of `D_n` for the evaluated indices.
    pub(crate) fn closure(&self, n: usize) -> (T, T) {
        self.closures[n - 1]
    }

    /// Weight `2^{-terms}` carried by all unevaluated seminorms.
    pub fn tail_weight(&self) -> T {
        T::pow2_neg(self.terms)
    }

    pub fn seminorm(&self, f: &PlFunction<T>, n: usize) -> Result<T> {
        Ok(f.sup_abs_on(self.base.interval(n)?))
    }

    /// `‖f‖_n` for `n = 1..=terms`.
    pub fn seminorms(&self, f: &PlFunction<T>) -> Vec<T> {
        self.closures.iter().map(|&(a, b)| f.sup_abs_closed(a, b)).collect()
    }

    /// `(‖f‖_n, t_n)` with `|f(t_n)| = ‖f‖_n` and `t_n` in the closure of `D_n`.
    pub fn seminorms_with_argmax(&self, f: &PlFunction<T>) -> Vec<(T, T)> {
        self.closures.iter().map(|&(a, b)| f.argmax_abs_closed(a, b)).collect()
    }

    fn rounding_pad(&self) -> T {
        T::from_usize(self.terms + 4).unwrap() * T::epsilon()
    }

    /// Truncated sum of squares `Σ_{n<=terms} 2^{-n} s_n²`.
    pub fn partial_square(&self, seminorms: &[T]) -> T {
        seminorms
            .iter()
            .enumerate()
            .rev()
            .map(|(k, &s)| T::pow2_neg(k + 1) * s * s)
            .fold(T::zero(), |a, b| a + b)
    }

    /// Encloses `‖f‖_D`: `lo² = Σ_{n<=N} 2^{-n}‖f‖_n²`, `hi² = lo² + 2^{-N}‖f‖_∞²`,
    /// both widened by the accumulated rounding error. `hi` never exceeds `‖f‖_∞`.
    pub fn d_norm(&self, f: &PlFunction<T>) -> Enclosure<T> {
        let s = self.seminorms(f);
        self.enclose(self.partial_square(&s), f.sup_norm())
    }

    pub(crate) fn enclose(&self, lo_sq: T, sup: T) -> Enclosure<T> {
        let pad = self.rounding_pad();
        let lo = (lo_sq.sqrt() * (T::one() - pad)).max(T::zero());
        let hi = ((lo_sq + self.tail_weight() * sup * sup).sqrt() * (T::one() + pad)).min(sup);
        Enclosure::new(lo.min(hi), hi)
    }

    /// Whether an enclosure is as tight as the context asks for.
    pub fn meets_tolerance(&self, e: &Enclosure<T>) -> bool {
        e.width() <= self.tolerance
    }

    /// `b_lo = √(min_t w_lo(t))`, exact over the endpoint sweep: at a maximizer
    /// `t*` of `|x|`, `‖x‖_D² >= w(t*)·‖x‖_∞²`.
    pub fn sup_norm_bounds(&self) -> SupNormBounds<T> {
        let b = *self.b_lo.get_or_init(|| self.base.min_weight().sqrt() * (T::one() - self.rounding_pad()));
        SupNormBounds { b_lo: b, upper: T::one() }
    }

    /// `‖δ_t‖* = 1/√w(t)`, valid when no closure of a non-containing interval meets `t`.
    pub fn dirac_dual_norm(&self, t: T) -> Result<Enclosure<T>> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(LabError::Domain(format!("point {t} outside [0,1]")));
        }
        let iso = self.base.isolated_at(t);
        if !iso.isolated {
            return Err(LabError::Hypothesis(format!(
                "{t} lies in the closure of a base interval that does not contain it"
            )));
        }
        let w = self.base.weight(t);
        let pad = self.rounding_pad();
        Ok(Enclosure::new(
            T::one() / w.hi.sqrt() * (T::one() - pad),
            T::one() / w.lo.sqrt() * (T::one() + pad),
        ))
    }
}

/// Anything that can enclose the norm of a PL function; lets the rotundity
/// experiments compare `‖·‖_D` with the max-norm.
pub trait NormContext {
    fn norm(&self, x: &PlFunction<f64>) -> Enclosure<f64>;
    fn label(&self) -> &'static str;
}

impl NormContext for DNormContext<f64> {
    fn norm(&self, x: &PlFunction<f64>) -> Enclosure<f64> {
        self.d_norm(x)
    }

    fn label(&self) -> &'static str {
        "d"
    }
}

/// The max-norm of `C[0,1]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SupNorm;

impl NormContext for SupNorm {
    fn norm(&self, x: &PlFunction<f64>) -> Enclosure<f64> {
        Enclosure::point(x.sup_norm())
    }

    fn label(&self) -> &'static str {
        "sup"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::EpsilonSchedule;
    use crate::model::Interval;

    fn ctx(levels: usize) -> DNormContext<f64> {
        let b = NeighborhoodBase::build_leveled(1, EpsilonSchedule::default(), levels).unwrap();
        DNormContext::new(b, 1e-6).unwrap()
    }

    fn tent() -> PlFunction<f64> {
        PlFunction::tent(0.0, 0.5, 1.0, 1.0).unwrap()
    }

    #[test]
    fn seminorm_examples() {
        let c = ctx(3);
        assert_eq!(c.seminorm(&PlFunction::constant(1.0), 5).unwrap(), 1.0);
        assert_eq!(c.seminorm(&PlFunction::zero(), 2).unwrap(), 0.0);
        let e3 = EpsilonSchedule::default().eps(3);
        let s = c.seminorm(&tent(), 3).unwrap();
        assert!((s - (0.5 + 2.0 * e3)).abs() < 1e-15);
        assert!(matches!(c.seminorm(&tent(), 15), Err(LabError::Index { .. })));
    }

    #[test]
    fn norm_of_constants() {
        let c = ctx(2);
        let e = c.d_norm(&PlFunction::constant(1.0));
        assert_eq!(e.hi, 1.0);
        assert!((e.lo - (1.0 - 2f64.powi(-6)).sqrt()).abs() < 1e-13);
        assert_eq!(c.d_norm(&PlFunction::zero()), Enclosure::new(0.0, 0.0));
    }

    #[test]
    fn tent_norm_stabilizes() {
        let shallow = ctx(8).d_norm(&tent());
        assert!(shallow.width() < 2f64.powi(-4));
        let deep = ctx(12).d_norm(&tent());
        assert!(deep.width() < 1e-12);
        assert!(shallow.lo <= deep.hi && deep.lo <= shallow.hi);
    }

    #[test]
    fn few_terms_widen_the_enclosure() {
        let b = NeighborhoodBase::build_leveled(1, EpsilonSchedule::default(), 4).unwrap();
        let c = DNormContext::with_terms(b, 1e-6, 3).unwrap();
        let e = c.d_norm(&PlFunction::constant(1.0));
        assert!((e.lo - (0.875f64).sqrt()).abs() < 1e-12);
        assert!(!c.meets_tolerance(&e));
    }

    #[test]
    fn b_lo_is_positive_and_certifies_lower_equivalence() {
        let c = ctx(6);
        let b = c.sup_norm_bounds().b_lo;
        assert!(b > 0.0 && b < 1.0);
        for f in [tent(), PlFunction::tent(0.3, 0.31, 0.32, -2.0).unwrap(), PlFunction::constant(0.7)] {
            let e = c.d_norm(&f);
            assert!(e.lo >= b * f.sup_norm() - e.width());
            assert!(e.hi <= f.sup_norm());
        }
    }

    #[test]
    fn dirac_dual_norm_examples() {
        let custom = NeighborhoodBase::custom(vec![
            Interval::open(0.2, 0.6).unwrap(),
            Interval::open(0.7, 1.0).unwrap(),
            Interval::closed(0.0, 0.25).unwrap(),
        ])
        .unwrap();
        let c = DNormContext::new(custom, 1e-6).unwrap();
        let e = c.dirac_dual_norm(0.5).unwrap();
        assert!(e.contains(2f64.sqrt()));
        assert!(matches!(c.dirac_dual_norm(0.2), Err(LabError::Hypothesis(_))));

        let c = ctx(12);
        let expected = 1.0 / (1..=12).map(|l| 2f64.powi(-((1 << l) - 1))).sum::<f64>().sqrt();
        let e = c.dirac_dual_norm(0.0).unwrap();
        assert!(e.contains(expected) || (e.hi - expected).abs() < 1e-12);
        assert!(e.width() < 1e-10);
        let e2 = EpsilonSchedule::default().eps(2);
        assert!(matches!(c.dirac_dual_norm(0.5 - e2), Err(LabError::Hypothesis(_))));
    }

    #[test]
    fn single_precision_norm() {
        let b = NeighborhoodBase::<f32>::build_leveled(1, EpsilonSchedule::default(), 6).unwrap();
        let c = DNormContext::new(b, 1e-3f32).unwrap();
        assert_eq!(c.terms(), 51.min(126));
        let e = c.d_norm(&PlFunction::constant(1.0f32));
        assert!(e.lo > 0.999 && e.hi == 1.0);
    }

    #[test]
    fn sup_context_is_exact() {
        let e = SupNorm.norm(&tent().scale(-3.0));
        assert_eq!(e, Enclosure::point(3.0));
    }
}
