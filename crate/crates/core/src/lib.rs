//! Cusp excursions of geodesics on the modular surface and on Hecke
//! orbifolds, and the rational approximations they encode.
//!
//! The exact layers are generic over the coefficient ring: `BigRational`
//! for the modular group, [`HeckeElem`] for Hecke groups, and plain floats
//! where only geometry is needed.

pub mod cf;
pub mod error;
pub mod excursion;
pub mod hyperbolic;
pub mod interval;
pub mod numfield;
pub mod realspec;
pub mod scalar;
pub mod zonal;

pub use cf::{
    cf_expand, convergents, depth_parameter, n_convergents, theta, ApproxContext, ApproxKind,
    ApproximationRecord, CfExpansion, Rational, SandwichCheck, ThetaValue,
};
pub use error::{Error, Result};
pub use excursion::{
    build_series, build_series_with, counting_rates, depth_statistics, gap_and_length_stats,
    levy_limits, loglaw_diagnostics, rate_profile, theta_statistics, DistributionReport,
    ExcursionEvent, ExcursionSeries, GapLengthStats, LevyReport, LoglawReport, RateReport, RateRow,
    SeriesOptions, ThetaStats,
};
pub use hyperbolic::{
    classify_region, excursion_depth, horoball_chord_length, vertical_arc_length, BoundaryPoint,
    GeodesicLine, Horoball, MoebiusMap, Region,
};
pub use interval::{Dyadic, Enclosure};
pub use numfield::{HeckeElem, HeckeField};
pub use realspec::RealSpec;
pub use scalar::{Field, RealSign, Ring};
pub use zonal::{
    enumerate_crossings, gamma_convergents, hecke_area, hecke_levy_experiment, hecke_levy_sample,
    levy_from_convergents, modular_cross_check, pool_levy, CrossingList, GammaConvergent,
    GammaRational, HeckeLevyReport, HeckeLevySample, HeightFloor, ModularCheck, OrbitGeodesic,
    ZonalGroup,
};

pub type RationalMap = MoebiusMap<num_rational::BigRational>;
pub type HeckeMap = MoebiusMap<HeckeElem>;
pub type FloatMap = MoebiusMap<f64>;
