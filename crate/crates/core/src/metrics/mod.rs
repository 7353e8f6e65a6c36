//! Objective evaluation of BRIRs and error summaries against a reference.
//!
//! Sign conventions: positive ILD means the left ear is louder, positive ITD
//! means the left ear leads.

mod binaural;
mod decay;

use alloc::vec::Vec;

use num_traits::Float;

pub use binaural::{
    iacc, iacc_e3_l3, iacc_e3_l3_with, ild_avg, ild_avg_with, itd, itd_with, ItdSegment,
    DEFAULT_EARLY_LATE_BOUNDARY_S, IACC_OCTAVES_HZ, ILD_SPLIT_HZ, MAX_INTERAURAL_LAG_S,
};
pub use decay::{
    decay_range_db, schroeder_db, t30_band, t30_broadband, t30_mid, t30_mid_binaural,
    MIN_DECAY_RANGE_DB, T30_FIT_RANGE_DB, T30_OCTAVES_HZ,
};

use crate::error::{Error, Result};
use crate::signal::BinauralIr;

pub const JND_ILD_DB: f64 = 1.0;
pub const JND_ITD_US: f64 = 40.0;
/// Relative to the reference reverberation time.
pub const JND_T30_FRACTION: f64 = 0.05;
pub const JND_IACC: f64 = 0.075;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct MetricConfig {
    pub early_late_boundary_s: f64,
    pub itd_segment: ItdSegment,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig { early_late_boundary_s: DEFAULT_EARLY_LATE_BOUNDARY_S, itd_segment: ItdSegment::Direct }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Metric {
    IldLowDb,
    IldHighDb,
    ItdUs,
    T30MidS,
    OneMinusIaccE3,
    OneMinusIaccL3,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::IldLowDb,
        Metric::IldHighDb,
        Metric::ItdUs,
        Metric::T30MidS,
        Metric::OneMinusIaccE3,
        Metric::OneMinusIaccL3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::IldLowDb => "ild_low_db",
            Metric::IldHighDb => "ild_high_db",
            Metric::ItdUs => "itd_us",
            Metric::T30MidS => "t30_mid_s",
            Metric::OneMinusIaccE3 => "one_minus_iacc_e3",
            Metric::OneMinusIaccL3 => "one_minus_iacc_l3",
        }
    }

    /// Just noticeable difference for this metric given the reference value.
    pub fn jnd(self, reference: f64) -> f64 {
        match self {
            Metric::IldLowDb | Metric::IldHighDb => JND_ILD_DB,
            Metric::ItdUs => JND_ITD_US,
            Metric::T30MidS => JND_T30_FRACTION * reference.abs(),
            Metric::OneMinusIaccE3 | Metric::OneMinusIaccL3 => JND_IACC,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricReport {
    pub ild_low_db: f64,
    pub ild_high_db: f64,
    pub itd_us: f64,
    pub t30_mid_s: f64,
    pub one_minus_iacc_e3: f64,
    pub one_minus_iacc_l3: f64,
}

impl MetricReport {
    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::IldLowDb => self.ild_low_db,
            Metric::IldHighDb => self.ild_high_db,
            Metric::ItdUs => self.itd_us,
            Metric::T30MidS => self.t30_mid_s,
            Metric::OneMinusIaccE3 => self.one_minus_iacc_e3,
            Metric::OneMinusIaccL3 => self.one_minus_iacc_l3,
        }
    }
}

pub fn report(brir: &BinauralIr) -> Result<MetricReport> {
    report_with(brir, &MetricConfig::default())
}

/// All metrics of one BRIR, which should already be direct-energy
/// normalized.
pub fn report_with(brir: &BinauralIr, config: &MetricConfig) -> Result<MetricReport> {
    let (ild_low_db, ild_high_db) = ild_avg(brir)?;
    let itd_us = itd_with(brir, config.itd_segment)?;
    let t30_mid_s = t30_mid_binaural(brir)?;
    let (one_minus_iacc_e3, one_minus_iacc_l3) = iacc_e3_l3_with(brir, config.early_late_boundary_s)?;
    Ok(MetricReport { ild_low_db, ild_high_db, itd_us, t30_mid_s, one_minus_iacc_e3, one_minus_iacc_l3 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorStat {
    pub mae: f64,
    pub msd: f64,
    /// Mean JND over the pairs.
    pub jnd: f64,
    pub within_jnd: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorSummary {
    pub count: usize,
    pub ild_low_db: ErrorStat,
    pub ild_high_db: ErrorStat,
    pub itd_us: ErrorStat,
    pub t30_mid_s: ErrorStat,
    pub one_minus_iacc_e3: ErrorStat,
    pub one_minus_iacc_l3: ErrorStat,
}

impl ErrorSummary {
    pub fn get(&self, m: Metric) -> &ErrorStat {
        match m {
            Metric::IldLowDb => &self.ild_low_db,
            Metric::IldHighDb => &self.ild_high_db,
            Metric::ItdUs => &self.itd_us,
            Metric::T30MidS => &self.t30_mid_s,
            Metric::OneMinusIaccE3 => &self.one_minus_iacc_e3,
            Metric::OneMinusIaccL3 => &self.one_minus_iacc_l3,
        }
    }
}

/// MAE and MSD of every system against one reference.
pub fn error_summary(systems: &[MetricReport], reference: &MetricReport) -> Result<ErrorSummary> {
    let pairs: Vec<_> = systems.iter().map(|s| (*s, *reference)).collect();
    error_summary_pairs(&pairs)
}

/// MAE and MSD over `(system, reference)` pairs, for pooling scenes that
/// each have their own reference.
pub fn error_summary_pairs(pairs: &[(MetricReport, MetricReport)]) -> Result<ErrorSummary> {
    if pairs.is_empty() {
        return Err(Error::invalid("error summary needs at least one system"));
    }
    let n = pairs.len() as f64;
    let stat = |m: Metric| {
        let (mut abs, mut signed, mut jnd) = (0.0, 0.0, 0.0);
        for (s, r) in pairs {
            let d = s.get(m) - r.get(m);
            abs += d.abs();
            signed += d;
            jnd += m.jnd(r.get(m));
        }
        let (mae, msd, jnd) = (abs / n, signed / n, jnd / n);
        ErrorStat { mae, msd, jnd, within_jnd: mae <= jnd }
    };
    Ok(ErrorSummary {
        count: pairs.len(),
        ild_low_db: stat(Metric::IldLowDb),
        ild_high_db: stat(Metric::IldHighDb),
        itd_us: stat(Metric::ItdUs),
        t30_mid_s: stat(Metric::T30MidS),
        one_minus_iacc_e3: stat(Metric::OneMinusIaccE3),
        one_minus_iacc_l3: stat(Metric::OneMinusIaccL3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rep(v: [f64; 6]) -> MetricReport {
        MetricReport {
            ild_low_db: v[0],
            ild_high_db: v[1],
            itd_us: v[2],
            t30_mid_s: v[3],
            one_minus_iacc_e3: v[4],
            one_minus_iacc_l3: v[5],
        }
    }

    #[test]
    fn identical_systems_have_zero_error() {
        let r = rep([0.5, -1.0, 20.0, 0.3, 0.1, 0.6]);
        let s = error_summary(&[r, r], &r).unwrap();
        for m in Metric::ALL {
            assert_eq!((s.get(m).mae, s.get(m).msd), (0.0, 0.0));
            assert!(s.get(m).within_jnd);
        }
    }

    #[test]
    fn constant_offset() {
        let r = rep([0.5, -1.0, 20.0, 0.3, 0.1, 0.6]);
        let mut a = r;
        a.t30_mid_s += 0.04;
        let mut b = a;
        b.itd_us -= 0.0;
        let s = error_summary(&[a, b], &r).unwrap();
        assert!((s.t30_mid_s.mae - 0.04).abs() < 1e-12 && (s.t30_mid_s.msd - 0.04).abs() < 1e-12);
        assert!(!s.t30_mid_s.within_jnd);
        assert!((s.t30_mid_s.jnd - 0.015).abs() < 1e-12);
    }

    #[test]
    fn empty_is_rejected() {
        let r = rep([0.0; 6]);
        assert!(matches!(error_summary(&[], &r), Err(Error::InvalidArgument(_))));
    }

    proptest! {
        #[test]
        fn mae_bounds_msd(vals in prop::collection::vec(prop::array::uniform6(-100.0f64..100.0), 1..20),
                          r in prop::array::uniform6(-100.0f64..100.0)) {
            let systems: Vec<_> = vals.into_iter().map(rep).collect();
            let s = error_summary(&systems, &rep(r)).unwrap();
            for m in Metric::ALL {
                let e = s.get(m);
                prop_assert!(e.mae + 1e-12 >= e.msd.abs());
            }
        }
    }
}
