//! Shared time-stepping machinery for the two SDE systems.

use crate::phase::PhasePoint;

/// Fixed-point iterations of the semi-implicit midpoint scheme.
pub const DEFAULT_MIDPOINT_ITERATIONS: usize = 3;

/// Semi-implicit midpoint step for a Stratonovich SDE.
///
/// Solves mid = p + [drift(mid) dt + noise(mid)]/2 by fixed-point iteration
/// and returns 2·mid − p. `noise` evaluates B(x)·dW for this step's
/// already-scaled Wiener increments; the same increments are reused in every
/// iteration. A non-finite intermediate is returned as-is so the caller can
/// flag the trajectory as diverged.
pub(crate) fn midpoint_step(
    p: &PhasePoint,
    dt: f64,
    iterations: usize,
    drift: impl Fn(&PhasePoint) -> PhasePoint,
    noise: impl Fn(&PhasePoint) -> PhasePoint,
) -> PhasePoint {
    let mut mid = *p;
    for _ in 0..iterations {
        let step = drift(&mid).scaled(dt).added(&noise(&mid));
        mid = p.added(&step.scaled(0.5));
        if !mid.is_finite() {
            return mid;
        }
    }
    mid.scaled(2.0).added(&p.scaled(-1.0))
}

/// Explicit Euler step: p + drift·dt + noise.
pub(crate) fn euler_step(
    p: &PhasePoint,
    dt: f64,
    drift: impl Fn(&PhasePoint) -> PhasePoint,
    noise: impl Fn(&PhasePoint) -> PhasePoint,
) -> PhasePoint {
    p.added(&drift(p).scaled(dt)).added(&noise(p))
}
