//! The doubled phase-space state of a single trajectory.
//!
//! Both representations evolve four independent c-number amplitudes: a pair
//! (alpha, alpha_plus) for the ground mode and (beta, beta_plus) for the
//! excited mode. The "plus" variables are independent integration variables,
//! not enforced conjugates; they only coincide with complex conjugates for
//! special initial states before noise acts.

use num_complex::Complex64 as C64;

/// One trajectory's state: four complex mode amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    /// Ground-mode amplitude.
    pub alpha: C64,
    /// Independent conjugate partner of the ground-mode amplitude.
    pub alpha_plus: C64,
    /// Excited-mode amplitude.
    pub beta: C64,
    /// Independent conjugate partner of the excited-mode amplitude.
    pub beta_plus: C64,
}

impl PhasePoint {
    pub const ZERO: PhasePoint = PhasePoint {
        alpha: C64::ZERO,
        alpha_plus: C64::ZERO,
        beta: C64::ZERO,
        beta_plus: C64::ZERO,
    };

    pub fn new(alpha: C64, alpha_plus: C64, beta: C64, beta_plus: C64) -> Self {
        Self {
            alpha,
            alpha_plus,
            beta,
            beta_plus,
        }
    }

    /// All four components finite (a live trajectory).
    pub fn is_finite(&self) -> bool {
        self.alpha.is_finite()
            && self.alpha_plus.is_finite()
            && self.beta.is_finite()
            && self.beta_plus.is_finite()
    }

    /// Largest squared component magnitude, used by the divergence check.
    pub fn max_norm_sqr(&self) -> f64 {
        self.alpha
            .norm_sqr()
            .max(self.alpha_plus.norm_sqr())
            .max(self.beta.norm_sqr())
            .max(self.beta_plus.norm_sqr())
    }

    pub fn scaled(&self, s: f64) -> PhasePoint {
        PhasePoint {
            alpha: self.alpha * s,
            alpha_plus: self.alpha_plus * s,
            beta: self.beta * s,
            beta_plus: self.beta_plus * s,
        }
    }

    pub fn added(&self, other: &PhasePoint) -> PhasePoint {
        PhasePoint {
            alpha: self.alpha + other.alpha,
            alpha_plus: self.alpha_plus + other.alpha_plus,
            beta: self.beta + other.beta,
            beta_plus: self.beta_plus + other.beta_plus,
        }
    }
}

/// Which phase-space distribution an ensemble samples.
///
/// Positive-P averages reproduce normally ordered expectations; truncated
/// Wigner averages reproduce symmetrically ordered ones. Every ensemble is
/// tagged with exactly one of these so moment extraction can apply the right
/// ordering correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    PositiveP,
    TruncatedWigner,
}

impl Representation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Representation::PositiveP => "positive_p",
            Representation::TruncatedWigner => "wigner",
        }
    }
}

/// Principal-branch complex square root.
///
/// Algebraic form (no trig calls); this sits in the innermost stepping loop.
/// Agrees with the polar definition everywhere except possibly on the branch
/// cut itself, where either sign yields a valid noise factorization.
#[inline]
pub fn csqrt(z: C64) -> C64 {
    let (re, im) = (z.re, z.im);
    if im == 0.0 && re >= 0.0 {
        return C64::new(re.sqrt(), 0.0);
    }
    let mag = (re * re + im * im).sqrt();
    let t = ((mag + re.abs()) * 0.5).sqrt();
    if re >= 0.0 {
        C64::new(t, im / (2.0 * t))
    } else {
        let u = im.abs() / (2.0 * t);
        if im >= 0.0 {
            C64::new(u, t)
        } else {
            C64::new(u, -t)
        }
    }
}
