//! Certification of plans: exact rank checks over a prime field, CSIT
//! compliance, and Monte Carlo rate slopes.

mod compliance;
mod decode;
mod observe;
mod rate;

pub use compliance::{csit_compliance, csit_compliance_with_seeds, ComplianceReport, Violation, ViolationKind};
pub use decode::{
    achieved_dof, decodability_check, DecodabilityReport, DofCertificate, ReceiverReport, TrialFailure, MAX_RESAMPLES,
};
pub use observe::{realize_plan, realize_plan_estimated, ObservationSystem, RealizedStream};
pub use rate::{linear_fit, rate_slope_estimate, sum_rate, RateSimConfig, SlopeEstimate};
