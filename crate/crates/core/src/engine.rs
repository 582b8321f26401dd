//! Trajectory-ensemble orchestration.
//!
//! Each trajectory gets its own counter-mode rng stream derived from
//! (seed, trajectory index), so the ensemble is reproducible independent of
//! scheduling. Trajectories are processed in fixed blocks; blocks accumulate
//! raw-moment statistics independently and are merged in index order, which
//! makes the result bit-identical for any worker count.
//!
//! Divergent trajectories are frozen at their divergence time: they keep
//! their contributions to earlier sample times, drop out of later ones, and
//! are counted per sample time so the emitted live counts expose any bias.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::observables::{MomentRecord, RawMoments};
use crate::phase::{PhasePoint, Representation};
use crate::positivep::{pp_step_ito, pp_step_stratonovich};
use crate::samplers::{sample_initial, InitialStateSpec, ModeState};
use crate::wigner::{w_step_ito, w_step_stratonovich, WignerDriftVariant};
use crate::config::ConfigError;

/// Stochastic-calculus convention an ensemble integrates in.
///
/// Both converge to the same physics; Itô uses explicit Euler steps and
/// exists mainly as a cross-check on the default semi-implicit Stratonovich
/// integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Ito,
    Stratonovich,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Ito => "ito",
            Scheme::Stratonovich => "stratonovich",
        }
    }
}

/// Trajectories per work unit; fixed so the merge order never depends on the
/// thread count.
const TRAJECTORY_BLOCK: u64 = 4096;

/// Complete description of one ensemble run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub representation: Representation,
    pub scheme: Scheme,
    pub wigner_drift_variant: WignerDriftVariant,
    pub kappa: f64,
    pub t_final: f64,
    pub dt: f64,
    pub sample_stride: u64,
    pub trajectories: u64,
    pub seed: u64,
    pub divergence_threshold: f64,
    pub max_divergent_fraction: f64,
    pub initial_state: InitialStateSpec,
}

impl SimulationConfig {
    /// Config with the documented defaults: Stratonovich stepping, dt =
    /// 10⁻³/κ, sampling every 100 steps, divergence threshold 10⁶ on squared
    /// component magnitudes, divergence budget 10⁻³.
    pub fn with_defaults(
        representation: Representation,
        kappa: f64,
        t_final: f64,
        trajectories: u64,
        seed: u64,
        initial_state: InitialStateSpec,
    ) -> Self {
        SimulationConfig {
            representation,
            scheme: Scheme::Stratonovich,
            wigner_drift_variant: WignerDriftVariant::FpeConsistent,
            kappa,
            t_final,
            dt: 1e-3 / kappa,
            sample_stride: 100,
            trajectories,
            seed,
            divergence_threshold: 1e6,
            max_divergent_fraction: 1e-3,
            initial_state,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        let range = |key: &str, ok: bool, reason: &str| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange {
                    key: key.into(),
                    reason: reason.into(),
                })
            }
        };
        range("kappa", self.kappa > 0.0, "must be > 0")?;
        range("t_final", self.t_final > 0.0, "must be > 0")?;
        range("dt", self.dt > 0.0 && self.dt.is_finite(), "must be > 0")?;
        range("sample_stride", self.sample_stride >= 1, "must be ≥ 1")?;
        range("trajectories", self.trajectories >= 1, "must be ≥ 1")?;
        range(
            "divergence_threshold",
            self.divergence_threshold > 0.0,
            "must be > 0",
        )?;
        range(
            "max_divergent_fraction",
            self.max_divergent_fraction > 0.0 && self.max_divergent_fraction <= 1.0,
            "must be in (0, 1]",
        )?;
        for (name, mode) in [
            ("ground", &self.initial_state.ground),
            ("excited", &self.initial_state.excited),
        ] {
            match mode {
                ModeState::DisplacedThermal { nbar, .. } if *nbar < 0.0 => {
                    return Err(ConfigError::OutOfRange {
                        key: format!("initial.{name}.nbar"),
                        reason: "must be ≥ 0".into(),
                    });
                }
                ModeState::Fock { .. }
                    if self.representation == Representation::TruncatedWigner =>
                {
                    return Err(ConfigError::InvalidCombination {
                        reason: format!(
                            "initial.{name}: Fock states cannot be sampled in the wigner \
                             representation"
                        ),
                    });
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Sample times: every multiple of sample_stride·dt from 0 through t_final.
pub fn sample_times(config: &SimulationConfig) -> Vec<f64> {
    let period = config.dt * config.sample_stride as f64;
    let count = (config.t_final / period + 1e-9).floor() as u64;
    (0..=count).map(|i| i as f64 * period).collect()
}

/// True when the point has left the trusted region: any non-finite component
/// or any squared component magnitude above the threshold.
pub fn divergence_check(p: &PhasePoint, threshold: f64) -> bool {
    !p.is_finite() || p.max_norm_sqr() > threshold
}

/// Mergeable per-sample-time statistics for a set of trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct StatAccumulator {
    tgrid: Vec<f64>,
    moments: Vec<RawMoments>,
    /// Trajectories that had diverged by each sample time (cumulative).
    diverged_by: Vec<u64>,
    attempted: u64,
}

impl StatAccumulator {
    pub fn empty(tgrid: Vec<f64>) -> Self {
        let n = tgrid.len();
        StatAccumulator {
            tgrid,
            moments: vec![RawMoments::new(); n],
            diverged_by: vec![0; n],
            attempted: 0,
        }
    }

    pub fn attempted(&self) -> u64 {
        self.attempted
    }

    pub fn diverged_by(&self) -> &[u64] {
        &self.diverged_by
    }

    pub fn records(&self, representation: Representation) -> Vec<MomentRecord> {
        self.tgrid
            .iter()
            .zip(self.moments.iter())
            .map(|(&t, m)| m.to_record(representation, t))
            .collect()
    }
}

/// Pairwise merge of two accumulators over the same sample grid.
pub fn merge_accumulators(a: &StatAccumulator, b: &StatAccumulator) -> Result<StatAccumulator> {
    if a.tgrid != b.tgrid {
        return Err(Error::MismatchedGrids);
    }
    Ok(StatAccumulator {
        tgrid: a.tgrid.clone(),
        moments: a
            .moments
            .iter()
            .zip(b.moments.iter())
            .map(|(x, y)| RawMoments::merge(x, y))
            .collect(),
        diverged_by: a
            .diverged_by
            .iter()
            .zip(b.diverged_by.iter())
            .map(|(x, y)| x + y)
            .collect(),
        attempted: a.attempted + b.attempted,
    })
}

/// Ordering-corrected ensemble observables on the sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub representation: Representation,
    pub kappa: f64,
    pub records: Vec<MomentRecord>,
    /// Trajectories attempted (live counts per time sit in the records).
    pub trajectories: u64,
    /// Trajectories lost to divergence by the final sample time.
    pub divergent_final: u64,
}

#[inline]
fn draw<const N: usize>(rng: &mut ChaCha8Rng) -> [f64; N] {
    std::array::from_fn(|_| rng.sample(StandardNormal))
}

fn step_point(p: &PhasePoint, config: &SimulationConfig, rng: &mut ChaCha8Rng) -> PhasePoint {
    match (config.representation, config.scheme) {
        (Representation::PositiveP, Scheme::Ito) => {
            pp_step_ito(p, config.kappa, config.dt, &draw::<6>(rng))
        }
        (Representation::PositiveP, Scheme::Stratonovich) => {
            pp_step_stratonovich(p, config.kappa, config.dt, &draw::<6>(rng))
        }
        (Representation::TruncatedWigner, Scheme::Ito) => w_step_ito(
            p,
            config.kappa,
            config.dt,
            &draw::<8>(rng),
            config.wigner_drift_variant,
        ),
        (Representation::TruncatedWigner, Scheme::Stratonovich) => w_step_stratonovich(
            p,
            config.kappa,
            config.dt,
            &draw::<8>(rng),
            config.wigner_drift_variant,
        ),
    }
}

fn run_block(config: &SimulationConfig, tgrid: &[f64], lo: u64, hi: u64) -> Result<StatAccumulator> {
    let mut acc = StatAccumulator::empty(tgrid.to_vec());
    let samples = tgrid.len();
    for traj in lo..hi {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(traj);
        let mut p = sample_initial(config.representation, &config.initial_state, &mut rng)?;
        acc.attempted += 1;
        let mut diverged = false;
        for si in 0..samples {
            if si > 0 {
                for _ in 0..config.sample_stride {
                    p = step_point(&p, config, &mut rng);
                    if divergence_check(&p, config.divergence_threshold) {
                        diverged = true;
                        break;
                    }
                }
            } else {
                diverged = divergence_check(&p, config.divergence_threshold);
            }
            if diverged {
                for d in acc.diverged_by[si..].iter_mut() {
                    *d += 1;
                }
                break;
            }
            acc.moments[si].push(&p);
        }
    }
    Ok(acc)
}

/// Runs the full ensemble described by the config.
///
/// Bit-identical output for a fixed config regardless of how many rayon
/// workers execute the blocks. Fails when the divergent fraction exceeds the
/// configured budget (reporting the first sample time that crossed it) or
/// when no trajectory survives to some sample time.
pub fn run_ensemble(config: &SimulationConfig) -> Result<ObservableSeries> {
    config.validate()?;
    let tgrid = sample_times(config);
    let blocks: Vec<(u64, u64)> = (0..config.trajectories)
        .step_by(TRAJECTORY_BLOCK as usize)
        .map(|lo| (lo, (lo + TRAJECTORY_BLOCK).min(config.trajectories)))
        .collect();
    let accs: Vec<StatAccumulator> = blocks
        .into_par_iter()
        .map(|(lo, hi)| run_block(config, &tgrid, lo, hi))
        .collect::<Result<_>>()?;
    let mut merged = StatAccumulator::empty(tgrid);
    for acc in &accs {
        merged = merge_accumulators(&merged, acc)?;
    }

    let attempted = merged.attempted as f64;
    for (i, &d) in merged.diverged_by.iter().enumerate() {
        let fraction = d as f64 / attempted;
        if fraction > config.max_divergent_fraction {
            return Err(Error::DivergenceBudgetExceeded {
                fraction,
                budget: config.max_divergent_fraction,
                onset: merged.tgrid[i],
            });
        }
    }
    if merged.moments.iter().any(|m| m.count() == 0) {
        return Err(Error::NoSurvivors);
    }

    Ok(ObservableSeries {
        representation: config.representation,
        kappa: config.kappa,
        records: merged.records(config.representation),
        trajectories: merged.attempted,
        divergent_final: *merged.diverged_by.last().unwrap_or(&0),
    })
}
