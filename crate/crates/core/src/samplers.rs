//! Initial-state sampling for both phase-space representations.
//!
//! Coherent states are delta functions in the positive-P representation and
//! half-quantum-wide Gaussians in Wigner. Chaotic (thermal) states with an
//! optional coherent displacement have classical Gaussian P-functions, so the
//! positive-P samples satisfy β⁺ = β* exactly. Fock states need the genuinely
//! nonclassical positive-P construction: a Gamma-distributed radius plus an
//! independent complex Gaussian, giving α = μ+γ, α⁺ = γ* − μ*.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::phase::{PhasePoint, Representation};

/// One mode of the two-mode initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeState {
    Coherent { amplitude: C64 },
    Fock { n: u32 },
    DisplacedThermal { displacement: C64, nbar: f64 },
}

/// Initial quantum state: ground mode (a) and excited mode (b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialStateSpec {
    pub ground: ModeState,
    pub excited: ModeState,
}

impl InitialStateSpec {
    /// Vacuum ground mode plus the given excited mode; the common setup.
    pub fn excited_only(excited: ModeState) -> Self {
        InitialStateSpec {
            ground: ModeState::Coherent {
                amplitude: C64::new(0.0, 0.0),
            },
            excited,
        }
    }
}

/// Complex Gaussian with E|ζ|² = variance (independent quadratures of
/// variance/2 each).
#[inline]
fn complex_gaussian<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> C64 {
    let s = (variance * 0.5).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

/// One Gamma(shape, 1) variate by the Marsaglia–Tsang squeeze method.
///
/// shape ≥ 1 uses the cubed-Gaussian acceptance step directly; shape < 1 is
/// boosted to shape+1 and scaled back by U^(1/shape).
pub fn gamma_sample<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0) {
        return Err(Error::InvalidGammaShape(shape));
    }
    if shape < 1.0 {
        let boosted = gamma_sample(shape + 1.0, rng)?;
        let u: f64 = rng.random();
        return Ok(boosted * u.powf(1.0 / shape));
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (3.0 * d.sqrt());
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u: f64 = rng.random();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return Ok(d * v);
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return Ok(d * v);
        }
    }
}

/// Positive-P sample of a Fock state with n quanta.
///
/// Draws μ with density e^(−|μ|²)/π, |γ|² ~ Gamma(n+1), a uniform phase for
/// γ, and returns (α, α⁺) = (μ+γ, γ* − μ*). Ensemble moments then satisfy
/// mean(α⁺α) = n and mean(α⁺²α²) = n(n−1).
pub fn sample_fock_pp<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<(C64, C64)> {
    let mu = complex_gaussian(1.0, rng);
    let radius_sqr = gamma_sample(f64::from(n) + 1.0, rng)?;
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    let gamma = radius_sqr.sqrt() * C64::new(theta.cos(), theta.sin());
    Ok((mu + gamma, gamma.conj() - mu.conj()))
}

/// Sample of a coherent state in the given representation.
pub fn sample_coherent<R: Rng + ?Sized>(
    representation: Representation,
    amplitude: C64,
    rng: &mut R,
) -> (C64, C64) {
    match representation {
        Representation::PositiveP => (amplitude, amplitude.conj()),
        Representation::TruncatedWigner => {
            let mode = amplitude + complex_gaussian(0.5, rng);
            (mode, mode.conj())
        }
    }
}

/// Sample of a displaced thermal (chaotic) state in the given representation.
pub fn sample_displaced_thermal<R: Rng + ?Sized>(
    representation: Representation,
    displacement: C64,
    nbar: f64,
    rng: &mut R,
) -> Result<(C64, C64)> {
    if !(nbar >= 0.0) {
        return Err(Error::NegativeNbar(nbar));
    }
    let variance = match representation {
        Representation::PositiveP => nbar,
        Representation::TruncatedWigner => nbar + 0.5,
    };
    let mode = displacement + complex_gaussian(variance, rng);
    Ok((mode, mode.conj()))
}

/// Sample of one mode, dispatching on the state family.
pub fn sample_mode<R: Rng + ?Sized>(
    representation: Representation,
    state: &ModeState,
    rng: &mut R,
) -> Result<(C64, C64)> {
    match *state {
        ModeState::Coherent { amplitude } => Ok(sample_coherent(representation, amplitude, rng)),
        ModeState::Fock { n } => match representation {
            Representation::PositiveP => sample_fock_pp(n, rng),
            Representation::TruncatedWigner => Err(Error::FockUnsupportedInWigner),
        },
        ModeState::DisplacedThermal { displacement, nbar } => {
            sample_displaced_thermal(representation, displacement, nbar, rng)
        }
    }
}

/// Full two-mode initial sample.
pub fn sample_initial<R: Rng + ?Sized>(
    representation: Representation,
    state: &InitialStateSpec,
    rng: &mut R,
) -> Result<PhasePoint> {
    let (alpha, alpha_plus) = sample_mode(representation, &state.ground, rng)?;
    let (beta, beta_plus) = sample_mode(representation, &state.excited, rng)?;
    Ok(PhasePoint::new(alpha, alpha_plus, beta, beta_plus))
}
