//! Conversion of raw c-number trajectory averages into physical expectations.
//!
//! Raw ensemble means of products like `alpha_plus * alpha` estimate normally
//! ordered moments in the positive-P representation and symmetrically ordered
//! moments in the truncated Wigner representation. This module owns the
//! ordering corrections, the per-quantity standard errors, and the derived
//! state probabilities.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::phase::{PhasePoint, Representation};

/// Welford accumulator for one real-valued per-trajectory quantity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Track {
    pub mean: f64,
    pub m2: f64,
}

impl Track {
    /// `count` is the sample count *including* this value.
    #[inline]
    pub fn push(&mut self, x: f64, count: u64) {
        let delta = x - self.mean;
        self.mean += delta / count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Parallel merge (Chan et al. pairwise update).
    pub fn merge(a: &Track, na: u64, b: &Track, nb: u64) -> Track {
        let n = na + nb;
        if n == 0 {
            return Track::default();
        }
        let delta = b.mean - a.mean;
        let mean = a.mean + delta * (nb as f64 / n as f64);
        let m2 = a.m2 + b.m2 + delta * delta * (na as f64 * nb as f64 / n as f64);
        Track { mean, m2 }
    }

    pub fn stderr(&self, count: u64) -> f64 {
        if count < 2 {
            return 0.0;
        }
        let var = self.m2 / (count - 1) as f64;
        (var.max(0.0) / count as f64).sqrt()
    }
}

/// Running mean of one real quantity (no spread tracked).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct MeanTrack {
    pub mean: f64,
}

impl MeanTrack {
    #[inline]
    pub fn push(&mut self, x: f64, count: u64) {
        self.mean += (x - self.mean) / count as f64;
    }

    pub fn merge(a: &MeanTrack, na: u64, b: &MeanTrack, nb: u64) -> MeanTrack {
        let n = na + nb;
        if n == 0 {
            return MeanTrack::default();
        }
        MeanTrack {
            mean: a.mean + (b.mean - a.mean) * (nb as f64 / n as f64),
        }
    }
}

/// Streaming raw-moment statistics for one ensemble snapshot.
///
/// Tracks the c-number moments the emission observables need: the two number
/// products, their cross product, the total, and the two cross-mode
/// coherences. Real parts carry spread (for standard errors); imaginary parts
/// and coherences carry means only. Imaginary parts of number moments are pure
/// sampling noise and are kept as a diagnostic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawMoments {
    pub(crate) count: u64,
    pub(crate) na: Track,
    pub(crate) nb: Track,
    pub(crate) nanb: Track,
    pub(crate) ntot: Track,
    pub(crate) im_na: MeanTrack,
    pub(crate) im_nb: MeanTrack,
    pub(crate) im_nanb: MeanTrack,
    pub(crate) coh_ab_re: MeanTrack,
    pub(crate) coh_ab_im: MeanTrack,
    pub(crate) coh_ba_re: MeanTrack,
    pub(crate) coh_ba_im: MeanTrack,
}

impl RawMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Fold one live trajectory's state into the running moments.
    #[inline]
    pub fn push(&mut self, p: &PhasePoint) {
        self.count += 1;
        let n = self.count;
        let na = p.alpha_plus * p.alpha;
        let nb = p.beta_plus * p.beta;
        let nanb = na * nb;
        let ntot = na + nb;
        let coh_ab = p.beta_plus * p.alpha; // estimates <b† a>
        let coh_ba = p.alpha_plus * p.beta; // estimates <a† b>
        self.na.push(na.re, n);
        self.nb.push(nb.re, n);
        self.nanb.push(nanb.re, n);
        self.ntot.push(ntot.re, n);
        self.im_na.push(na.im, n);
        self.im_nb.push(nb.im, n);
        self.im_nanb.push(nanb.im, n);
        self.coh_ab_re.push(coh_ab.re, n);
        self.coh_ab_im.push(coh_ab.im, n);
        self.coh_ba_re.push(coh_ba.re, n);
        self.coh_ba_im.push(coh_ba.im, n);
    }

    /// Merge two accumulations of disjoint trajectory sets.
    pub fn merge(a: &RawMoments, b: &RawMoments) -> RawMoments {
        let (na, nb) = (a.count, b.count);
        RawMoments {
            count: na + nb,
            na: Track::merge(&a.na, na, &b.na, nb),
            nb: Track::merge(&a.nb, na, &b.nb, nb),
            nanb: Track::merge(&a.nanb, na, &b.nanb, nb),
            ntot: Track::merge(&a.ntot, na, &b.ntot, nb),
            im_na: MeanTrack::merge(&a.im_na, na, &b.im_na, nb),
            im_nb: MeanTrack::merge(&a.im_nb, na, &b.im_nb, nb),
            im_nanb: MeanTrack::merge(&a.im_nanb, na, &b.im_nanb, nb),
            coh_ab_re: MeanTrack::merge(&a.coh_ab_re, na, &b.coh_ab_re, nb),
            coh_ab_im: MeanTrack::merge(&a.coh_ab_im, na, &b.coh_ab_im, nb),
            coh_ba_re: MeanTrack::merge(&a.coh_ba_re, na, &b.coh_ba_re, nb),
            coh_ba_im: MeanTrack::merge(&a.coh_ba_im, na, &b.coh_ba_im, nb),
        }
    }

    /// Apply the representation's ordering correction and package the result.
    pub fn to_record(&self, representation: Representation, t: f64) -> MomentRecord {
        let count = self.count;
        let raw_na = self.na.mean;
        let raw_nb = self.nb.mean;
        let raw_nanb = self.nanb.mean;
        let raw_ntot = self.ntot.mean;

        let (n_a, n_b, n_a_n_b, n_total) = match representation {
            Representation::PositiveP => (raw_na, raw_nb, raw_nanb, raw_ntot),
            Representation::TruncatedWigner => {
                // Symmetric -> normal ordering: half-quantum offset per mode;
                // the cross moment picks up the per-mode offsets of both.
                let n_a = raw_na - 0.5;
                let n_b = raw_nb - 0.5;
                let n_a_n_b = raw_nanb - 0.5 * (n_a + n_b) - 0.25;
                (n_a, n_b, n_a_n_b, raw_ntot - 1.0)
            }
        };

        let total = n_a + n_b;
        let (p_aa, p_bb) = if total > 0.0 {
            (n_a / total, n_b / total)
        } else {
            (f64::NAN, f64::NAN)
        };

        MomentRecord {
            t,
            n_a,
            n_a_stderr: self.na.stderr(count),
            n_b,
            n_b_stderr: self.nb.stderr(count),
            n_a_n_b,
            n_a_n_b_stderr: self.nanb.stderr(count),
            n_total,
            n_total_stderr: self.ntot.stderr(count),
            coh_ab: C64::new(self.coh_ab_re.mean, self.coh_ab_im.mean),
            coh_ba: C64::new(self.coh_ba_re.mean, self.coh_ba_im.mean),
            p_aa,
            p_bb,
            imag_n_a: self.im_na.mean.abs(),
            imag_n_b: self.im_nb.mean.abs(),
            imag_n_a_n_b: self.im_nanb.mean.abs(),
            live_count: count,
        }
    }
}

/// Ordering-corrected physical expectations at one sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRecord {
    pub t: f64,
    /// Ground population <a† a>.
    pub n_a: f64,
    pub n_a_stderr: f64,
    /// Excited population <b† b>.
    pub n_b: f64,
    pub n_b_stderr: f64,
    /// Cross correlation <a† a b† b>.
    pub n_a_n_b: f64,
    pub n_a_n_b_stderr: f64,
    /// Total atom number <a† a + b† b>, tracked with its own spread so
    /// conservation can be checked without ignoring the a/b covariance.
    pub n_total: f64,
    pub n_total_stderr: f64,
    /// Coherence <b† a>.
    pub coh_ab: C64,
    /// Coherence <a† b>.
    pub coh_ba: C64,
    /// Probability of occupying the ground state; NaN when the field is empty.
    pub p_aa: f64,
    /// Probability of occupying the excited state; NaN when the field is empty.
    pub p_bb: f64,
    /// Magnitudes of the mean imaginary parts of the number moments. Large
    /// values signal sampling problems; the real parts alone are physical.
    pub imag_n_a: f64,
    pub imag_n_b: f64,
    pub imag_n_a_n_b: f64,
    /// Trajectories contributing at this time (divergent ones drop out).
    pub live_count: u64,
}

/// Ensemble snapshot -> ordering-corrected moments.
pub fn extract_moments(
    snapshot: &[PhasePoint],
    representation: Representation,
    t: f64,
) -> Result<MomentRecord> {
    if snapshot.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut raw = RawMoments::new();
    for p in snapshot {
        if !p.is_finite() {
            return Err(Error::DivergedPoint);
        }
        raw.push(p);
    }
    Ok(raw.to_record(representation, t))
}

/// Normalized occupation probabilities from the two populations.
pub fn state_probabilities(n_a: f64, n_b: f64) -> Result<(f64, f64)> {
    let total = n_a + n_b;
    if total <= 0.0 {
        return Err(Error::UndefinedProbabilities);
    }
    Ok((n_a / total, n_b / total))
}
