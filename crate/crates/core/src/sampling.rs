//! Seeded random PL shapes shared by the search routines.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::model::PlFunction;

pub(crate) fn spike(t: f64, half: f64, height: f64) -> PlFunction<f64> {
    PlFunction::tent((t - half).max(0.0), t, (t + half).min(1.0), height).expect("spike")
}

/// Tent at a uniform point with log-uniform half-width in `[2^-14, 2^-2]`.
pub(crate) fn random_bump(rng: &mut ChaCha8Rng) -> PlFunction<f64> {
    let t = rng.gen::<f64>();
    let half = f64::powf(2.0, -rng.gen_range(2.0..14.0));
    spike(t, half, rng.gen_range(-1.0..1.0))
}

/// PL function with `knots` uniform interior breakpoints and values in `[-1, 1]`.
pub(crate) fn random_pl(rng: &mut ChaCha8Rng, knots: usize) -> PlFunction<f64> {
    let mut ts: Vec<f64> = (0..knots).map(|_| rng.gen::<f64>()).collect();
    ts.push(0.0);
    ts.push(1.0);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let vs = ts.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    PlFunction::new(ts, vs).expect("sorted knots")
}
