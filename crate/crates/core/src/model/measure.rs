use serde::{Deserialize, Serialize};

use crate::error::{domain, LabError, Result};
use crate::model::function::PlFunction;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom<T> {
    pub t: T,
    pub w: T,
}

/// Finitely many atoms plus a signed piecewise-linear density with respect
/// to Lebesgue measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure<T>", into = "RawMeasure<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Measure<T> {
    atoms: Vec<Atom<T>>,
    density: PlFunction<T>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
struct RawMeasure<T> {
    #[serde(default)]
    atoms: Vec<Atom<T>>,
    density: Option<PlFunction<T>>,
}

impl<T: Scalar> TryFrom<RawMeasure<T>> for Measure<T> {
    type Error = LabError;

    fn try_from(raw: RawMeasure<T>) -> Result<Self> {
        Measure::new(raw.atoms, raw.density.unwrap_or_else(PlFunction::zero))
    }
}

impl<T: Scalar> From<Measure<T>> for RawMeasure<T> {
    fn from(m: Measure<T>) -> Self {
        RawMeasure { atoms: m.atoms, density: Some(m.density) }
    }
}

impl<T: Scalar> Measure<T> {
    /// Atoms are sorted by location; locations must be distinct and in `[0,1]`.
    pub fn new(mut atoms: Vec<Atom<T>>, density: PlFunction<T>) -> Result<Self> {
        if atoms.iter().any(|a| !(a.t >= T::zero() && a.t <= T::one()) || !a.w.is_finite()) {
            return domain("atoms must lie in [0,1] with finite weights");
        }
        atoms.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
        if atoms.windows(2).any(|w| w[0].t == w[1].t) {
            return domain("atom locations must be pairwise distinct");
        }
        Ok(Measure { atoms, density })
    }

    /// Lebesgue measure on `[0,1]`.
    pub fn lebesgue() -> Self {
        Measure { atoms: Vec::new(), density: PlFunction::constant(T::one()) }
    }

    pub fn dirac(t: T) -> Result<Self> {
        Self::atomic(&[(t, T::one())])
    }

    pub fn atomic(points: &[(T, T)]) -> Result<Self> {
        let atoms = points.iter().map(|&(t, w)| Atom { t, w }).collect();
        Self::new(atoms, PlFunction::zero())
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn density(&self) -> &PlFunction<T> {
        &self.density
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.w == T::zero()) && self.density.is_zero()
    }

    pub fn has_atom_at(&self, t: T) -> bool {
        self.atoms.iter().any(|a| a.t == t && a.w != T::zero())
    }

    /// `Σ w·f(t) + ∫ f·density dλ`, exact.
    pub fn integrate(&self, f: &PlFunction<T>) -> T {
        let atomic: T = self.atoms.iter().map(|a| a.w * f.eval_clamped(a.t)).sum();
        let cont = if self.density.is_zero() { T::zero() } else { f.integral_product(&self.density) };
        atomic + cont
    }

    /// `Σ|w| + ∫|density| dλ`, exact.
    pub fn total_variation(&self) -> T {
        self.atoms.iter().map(|a| a.w.abs()).sum::<T>() + self.density.abs_integral()
    }

    /// Variation of the measure on the open interval `(a, b)`.
    pub fn variation_on_open(&self, a: T, b: T) -> T {
        let atomic: T = self.atoms.iter().filter(|x| x.t > a && x.t < b).map(|x| x.w.abs()).sum();
        atomic + self.density.abs_integral_over(a, b)
    }

    pub fn scale(&self, c: T) -> Self {
        Measure {
            atoms: self.atoms.iter().map(|a| Atom { t: a.t, w: a.w * c }).collect(),
            density: self.density.scale(c),
        }
    }

    /// `a·self + b·other`; coinciding atoms are merged.
    pub fn lin_comb(a: T, m: &Self, b: T, other: &Self) -> Self {
        let mut atoms: Vec<Atom<T>> = m.atoms.iter().map(|x| Atom { t: x.t, w: a * x.w }).collect();
        for x in &other.atoms {
            match atoms.iter_mut().find(|y| y.t == x.t) {
                Some(y) => y.w = y.w + b * x.w,
                None => atoms.push(Atom { t: x.t, w: b * x.w }),
            }
        }
        atoms.sort_by(|p, q| p.t.partial_cmp(&q.t).unwrap());
        Measure { atoms, density: PlFunction::lin_comb(a, &m.density, b, &other.density) }
    }
}
