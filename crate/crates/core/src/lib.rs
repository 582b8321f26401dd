//! Stochastic phase-space simulation of collective bosonic emission.
//!
//! Two bosonic modes, ground (a) and excited (b), exchange atoms through a
//! Markovian bath coupling to a†b: each transfer deposits an excitation in
//! the bath, and the resulting nonlinearity makes even the free decay of a
//! many-atom field depart from the single-atom exponential. The crate turns
//! the master equation for this process into trajectory ensembles in two
//! phase-space representations:
//!
//! * positive-P ([`positivep`]): exact stochastic unraveling in a doubled
//!   phase space; trajectory averages give normally ordered expectations.
//! * truncated Wigner ([`wigner`]): third-order terms dropped; averages give
//!   symmetrically ordered expectations, and the approximation's failure
//!   modes are part of what the crate demonstrates.
//!
//! Exact and analytic references live in [`oracle`]: the birth-death chain of
//! the number-basis master equation (numerically exact for the observables
//! emitted here), the mean-field solution, and the collective-energy closed
//! form. [`engine`] runs deterministic, parallel, mergeable ensembles;
//! [`config`] and [`output`] handle run description and serialization.

pub mod config;
pub mod engine;
pub mod error;
pub mod observables;
pub mod oracle;
pub mod output;
pub mod phase;
pub mod positivep;
pub mod samplers;
mod stepping;
pub mod wigner;

pub use config::{emit_config, parse_config, ConfigError};
pub use engine::{
    divergence_check, merge_accumulators, run_ensemble, sample_times, ObservableSeries, Scheme,
    SimulationConfig, StatAccumulator,
};
pub use error::{Error, Result};
pub use observables::{extract_moments, state_probabilities, MomentRecord, RawMoments};
pub use oracle::{
    choose_cutoff, evolve_chain, exponential_reference, initial_distribution, meanfield_nb,
    rehler_eberly_energy, ChainSample, FockDistribution,
};
pub use output::{
    emit_csv, emit_plot_script, parse_csv, CsvRow, LineStyle, PlotSeries, ReferenceCurve,
    RunManifest,
};
pub use phase::{PhasePoint, Representation};
pub use samplers::{InitialStateSpec, ModeState};
pub use wigner::WignerDriftVariant;
