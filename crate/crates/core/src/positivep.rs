//! Positive-P drift, noise factorization, and stepping.
//!
//! The transfer process moves excited-mode quanta into the ground mode at
//! rate κ. In the doubled phase space this becomes an Itô system
//!
//!   dα  = (κ/2) β⁺β α dt + noise,
//!   dβ  = −(κ/2)(α⁺α + 1) β dt + noise,
//!
//! with conjugate-partner equations for α⁺, β⁺, driven by six real white
//! noises through a 4×6 matrix B satisfying B Bᵀ = D (plain transpose). The
//! only nonzero diffusion entries are D(α,α⁺) = κβ⁺β and the cross-mode pair
//! D(α,β) = −καβ/2, D(α⁺,β⁺) = −κα⁺β⁺/2; the diagonal vanishes, which is why
//! the factorization needs the doubled space at all.
//!
//! The Stratonovich drift used by the midpoint integrator is the Itô drift
//! plus (κ/8)x on every component. The correction −(1/2) Σ_{jk} B_{kj}
//! ∂B_{ij}/∂x_k collapses that far because each √(καβ)-type column j has
//! exactly two nonzero rows whose product Σ_k B_{kj} ∂B_{ij}/∂x_k telescopes
//! to ±κx_i/8, the two column pairs cancel in their partner terms, and the
//! √(κβ⁺β/2) columns differentiate to zero along their own rows. The tests
//! check this against a finite-difference evaluation of the raw formula.

use num_complex::Complex64 as C64;

use crate::phase::{csqrt, PhasePoint};
use crate::stepping::{euler_step, midpoint_step, DEFAULT_MIDPOINT_ITERATIONS};

/// Itô drift of the positive-P system.
#[inline]
pub fn pp_drift(p: &PhasePoint, kappa: f64) -> PhasePoint {
    let na = p.alpha_plus * p.alpha;
    let nb = p.beta_plus * p.beta;
    let half_kappa = 0.5 * kappa;
    PhasePoint {
        alpha: half_kappa * nb * p.alpha,
        alpha_plus: half_kappa * nb * p.alpha_plus,
        beta: -half_kappa * (na + 1.0) * p.beta,
        beta_plus: -half_kappa * (na + 1.0) * p.beta_plus,
    }
}

/// Stratonovich drift: Itô drift plus (κ/8)·x componentwise.
#[inline]
pub fn pp_drift_stratonovich(p: &PhasePoint, kappa: f64) -> PhasePoint {
    pp_drift(p, kappa).added(&p.scaled(kappa * 0.125))
}

/// Noise matrix of the positive-P system.
///
/// Rows in phase order (α, α⁺, β, β⁺); columns multiply the independent real
/// noises η₁..η₆.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseMatrixPP {
    pub rows: [[C64; 6]; 4],
}

impl NoiseMatrixPP {
    /// B·w for a vector of 6 real increments.
    pub fn apply(&self, w: &[f64; 6]) -> PhasePoint {
        let row = |r: &[C64; 6]| -> C64 {
            r.iter()
                .zip(w.iter())
                .map(|(b, wi)| b * *wi)
                .sum()
        };
        PhasePoint {
            alpha: row(&self.rows[0]),
            alpha_plus: row(&self.rows[1]),
            beta: row(&self.rows[2]),
            beta_plus: row(&self.rows[3]),
        }
    }

    /// B Bᵀ with the plain (unconjugated) transpose.
    pub fn product_transpose(&self) -> [[C64; 4]; 4] {
        let mut d = [[C64::ZERO; 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                d[i][k] = self.rows[i]
                    .iter()
                    .zip(self.rows[k].iter())
                    .map(|(a, b)| a * b)
                    .sum();
            }
        }
        d
    }
}

/// Noise matrix at a point, principal-branch roots throughout.
pub fn pp_noise(p: &PhasePoint, kappa: f64) -> NoiseMatrixPP {
    let s1 = csqrt(kappa * p.alpha * p.beta);
    let s2 = csqrt(kappa * p.alpha_plus * p.beta_plus);
    let s3 = csqrt(0.5 * kappa * p.beta_plus * p.beta);
    let i = C64::I;
    let z = C64::ZERO;
    NoiseMatrixPP {
        rows: [
            [0.5 * i * s1, z, -0.5 * s1, z, s3, i * s3],
            [z, 0.5 * i * s2, z, -0.5 * s2, s3, -i * s3],
            [0.5 * i * s1, z, 0.5 * s1, z, z, z],
            [z, 0.5 * i * s2, z, 0.5 * s2, z, z],
        ],
    }
}

/// B(p)·w evaluated without materializing the matrix (hot path).
#[inline]
pub fn pp_noise_increment(p: &PhasePoint, kappa: f64, w: &[f64; 6]) -> PhasePoint {
    let s1 = csqrt(kappa * p.alpha * p.beta);
    let s2 = csqrt(kappa * p.alpha_plus * p.beta_plus);
    let s3 = csqrt(0.5 * kappa * p.beta_plus * p.beta);
    PhasePoint {
        alpha: 0.5 * s1 * C64::new(-w[2], w[0]) + s3 * C64::new(w[4], w[5]),
        alpha_plus: 0.5 * s2 * C64::new(-w[3], w[1]) + s3 * C64::new(w[4], -w[5]),
        beta: 0.5 * s1 * C64::new(w[2], w[0]),
        beta_plus: 0.5 * s2 * C64::new(w[3], w[1]),
    }
}

/// Euler–Maruyama step of the Itô system.
pub fn pp_step_ito(p: &PhasePoint, kappa: f64, dt: f64, normals: &[f64; 6]) -> PhasePoint {
    let sqrt_dt = dt.sqrt();
    let w = normals.map(|n| n * sqrt_dt);
    euler_step(
        p,
        dt,
        |x| pp_drift(x, kappa),
        |x| pp_noise_increment(x, kappa, &w),
    )
}

/// Semi-implicit midpoint step of the Stratonovich system.
pub fn pp_step_stratonovich(p: &PhasePoint, kappa: f64, dt: f64, normals: &[f64; 6]) -> PhasePoint {
    let sqrt_dt = dt.sqrt();
    let w = normals.map(|n| n * sqrt_dt);
    midpoint_step(
        p,
        dt,
        DEFAULT_MIDPOINT_ITERATIONS,
        |x| pp_drift_stratonovich(x, kappa),
        |x| pp_noise_increment(x, kappa, &w),
    )
}
