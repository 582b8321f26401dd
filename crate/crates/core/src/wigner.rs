//! Truncated-Wigner drift, noise factorization, and stepping.
//!
//! Truncating the third-order derivative terms of the Wigner evolution
//! equation leaves a genuine Fokker-Planck equation whose SDEs live in the
//! same doubled phase space as the positive-P system but carry half-quantum
//! offsets in both drift and diffusion, plus two extra noises:
//!
//!   dα = (κ/2)(β⁺β − 1/2) α dt + noise,
//!   dβ = −(κ/2)(α⁺α + 1/2) β dt + noise      (FpeConsistent),
//!
//! driven by eight real white noises through B_W = [Ã | C̃]. Ã carries the
//! single-mode diffusion D(α,α⁺) = (κ/2)(β⁺β − 1/2) and
//! D(β,β⁺) = (κ/2)(α⁺α + 1/2); C̃ carries the same cross-mode entries as the
//! positive-P matrix. D(α,α⁺) can go negative, so its root is taken as a
//! complex square root and the Ã entries leave the "classical" manifold
//! where needed.
//!
//! The two printed forms of the excited-mode drift disagree in the sign of
//! the half-quantum: the equation-of-motion form has −(κ/2)(α⁺α − 1/2)β where
//! the Fokker-Planck coefficient reads −(κ/2)(α⁺α + 1/2)β. Only the latter
//! reproduces the closed moment flow d⟨b†b⟩/dt = −κ(⟨b†b⟩ + ⟨a†a b†b⟩) and
//! conserves ensemble-mean atom number, so it is the default; the other form
//! stays available as `PaperVerbatim` for literal comparison runs.
//!
//! The Itô-to-Stratonovich correction is +(κ/8)x, exactly as in the
//! positive-P system: the Ã columns differentiate to zero along their own
//! rows and the C̃ columns reproduce the positive-P algebra.

use num_complex::Complex64 as C64;

use crate::phase::{csqrt, PhasePoint};
use crate::stepping::{euler_step, midpoint_step, DEFAULT_MIDPOINT_ITERATIONS};

/// Which excited-mode drift sign a Wigner run uses.
///
/// `FpeConsistent` follows the Fokker-Planck coefficient (the default);
/// `PaperVerbatim` follows the printed equation of motion, which differs in
/// the sign of the half-quantum shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WignerDriftVariant {
    FpeConsistent,
    PaperVerbatim,
}

impl WignerDriftVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            WignerDriftVariant::FpeConsistent => "fpe_consistent",
            WignerDriftVariant::PaperVerbatim => "paper_verbatim",
        }
    }

    /// Sign of the half-quantum in the excited-mode drift factor
    /// (α⁺α ± 1/2).
    fn beta_shift(&self) -> f64 {
        match self {
            WignerDriftVariant::FpeConsistent => 0.5,
            WignerDriftVariant::PaperVerbatim => -0.5,
        }
    }
}

/// Itô drift of the truncated-Wigner system.
#[inline]
pub fn w_drift(p: &PhasePoint, kappa: f64, variant: WignerDriftVariant) -> PhasePoint {
    let na = p.alpha_plus * p.alpha;
    let nb = p.beta_plus * p.beta;
    let half_kappa = 0.5 * kappa;
    let shift = variant.beta_shift();
    PhasePoint {
        alpha: half_kappa * (nb - 0.5) * p.alpha,
        alpha_plus: half_kappa * (nb - 0.5) * p.alpha_plus,
        beta: -half_kappa * (na + shift) * p.beta,
        beta_plus: -half_kappa * (na + shift) * p.beta_plus,
    }
}

/// Stratonovich drift: Itô drift plus (κ/8)·x componentwise.
#[inline]
pub fn w_drift_stratonovich(p: &PhasePoint, kappa: f64, variant: WignerDriftVariant) -> PhasePoint {
    w_drift(p, kappa, variant).added(&p.scaled(kappa * 0.125))
}

/// Noise matrix of the truncated-Wigner system.
///
/// Rows in phase order (α, α⁺, β, β⁺); columns multiply η₁..η₈ with the
/// single-mode block in columns 1..4 and the cross-mode block in 5..8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseMatrixW {
    pub rows: [[C64; 8]; 4],
}

impl NoiseMatrixW {
    /// B_W·w for a vector of 8 real increments.
    pub fn apply(&self, w: &[f64; 8]) -> PhasePoint {
        let row = |r: &[C64; 8]| -> C64 {
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

    /// B_W B_Wᵀ with the plain (unconjugated) transpose.
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
pub fn w_noise(p: &PhasePoint, kappa: f64) -> NoiseMatrixW {
    let u = csqrt(kappa * (p.beta_plus * p.beta - 0.5));
    let v = csqrt(kappa * (p.alpha_plus * p.alpha + 0.5));
    let s1 = csqrt(kappa * p.alpha * p.beta);
    let s2 = csqrt(kappa * p.alpha_plus * p.beta_plus);
    let i = C64::I;
    let z = C64::ZERO;
    NoiseMatrixW {
        rows: [
            [0.5 * u, 0.5 * i * u, z, z, 0.5 * i * s1, z, -0.5 * s1, z],
            [0.5 * u, -0.5 * i * u, z, z, z, 0.5 * i * s2, z, -0.5 * s2],
            [z, z, 0.5 * v, 0.5 * i * v, 0.5 * i * s1, z, 0.5 * s1, z],
            [z, z, 0.5 * v, -0.5 * i * v, z, 0.5 * i * s2, z, 0.5 * s2],
        ],
    }
}

/// B_W(p)·w evaluated without materializing the matrix (hot path).
#[inline]
pub fn w_noise_increment(p: &PhasePoint, kappa: f64, w: &[f64; 8]) -> PhasePoint {
    let u = csqrt(kappa * (p.beta_plus * p.beta - 0.5));
    let v = csqrt(kappa * (p.alpha_plus * p.alpha + 0.5));
    let s1 = csqrt(kappa * p.alpha * p.beta);
    let s2 = csqrt(kappa * p.alpha_plus * p.beta_plus);
    PhasePoint {
        alpha: 0.5 * (u * C64::new(w[0], w[1]) + s1 * C64::new(-w[6], w[4])),
        alpha_plus: 0.5 * (u * C64::new(w[0], -w[1]) + s2 * C64::new(-w[7], w[5])),
        beta: 0.5 * (v * C64::new(w[2], w[3]) + s1 * C64::new(w[6], w[4])),
        beta_plus: 0.5 * (v * C64::new(w[2], -w[3]) + s2 * C64::new(w[7], w[5])),
    }
}

/// Euler–Maruyama step of the Itô system.
pub fn w_step_ito(
    p: &PhasePoint,
    kappa: f64,
    dt: f64,
    normals: &[f64; 8],
    variant: WignerDriftVariant,
) -> PhasePoint {
    let sqrt_dt = dt.sqrt();
    let w = normals.map(|n| n * sqrt_dt);
    euler_step(
        p,
        dt,
        |x| w_drift(x, kappa, variant),
        |x| w_noise_increment(x, kappa, &w),
    )
}

/// Semi-implicit midpoint step of the Stratonovich system.
pub fn w_step_stratonovich(
    p: &PhasePoint,
    kappa: f64,
    dt: f64,
    normals: &[f64; 8],
    variant: WignerDriftVariant,
) -> PhasePoint {
    let sqrt_dt = dt.sqrt();
    let w = normals.map(|n| n * sqrt_dt);
    midpoint_step(
        p,
        dt,
        DEFAULT_MIDPOINT_ITERATIONS,
        |x| w_drift_stratonovich(x, kappa, variant),
        |x| w_noise_increment(x, kappa, &w),
    )
}
