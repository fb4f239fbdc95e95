//! Rank certificates of decodability and the multi-trial DoF certificate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{derive_seed, field_channel, Rx};
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::Scalar;
use crate::rational::{frac, serde_str, Rational};
use crate::schemes::{SymbolRegistry, TransmissionPlan};

use super::observe::{realize_plan, ObservationSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceiverReport {
    pub rx: Rx,
    pub desired: usize,
    pub rank: usize,
    pub interference_rank: usize,
    pub decodable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodabilityReport {
    pub receivers: [ReceiverReport; 2],
    pub slots: usize,
    #[serde(with = "serde_str::option")]
    pub achieved_dof: Option<Rational>,
}

impl DecodabilityReport {
    pub fn decodable(&self) -> bool {
        self.receivers.iter().all(|r| r.decodable)
    }
}

/// Receiver `i` recovers its symbols iff removing them drops the rank of
/// `A_i` by exactly their number.
pub fn decodability_check<T: Scalar>(sys: &ObservationSystem<T>, registry: &SymbolRegistry) -> DecodabilityReport {
    let report = |rx: Rx| {
        let a = sys.a(rx);
        let others = registry.owned_by(rx.other());
        let desired = registry.count(rx);
        let rank = a.rank();
        let interference_rank = a.select_cols(&others).rank();
        ReceiverReport { rx, desired, rank, interference_rank, decodable: rank - interference_rank == desired }
    };
    let receivers = [report(Rx::Rx1), report(Rx::Rx2)];
    let ok = receivers.iter().all(|r| r.decodable);
    let achieved_dof = (ok && sys.slots() > 0).then(|| frac(registry.len() as i64, sys.slots() as i64));
    DecodabilityReport { receivers, slots: sys.slots(), achieved_dof }
}

/// Attempts per trial before a degenerate draw is reported as exhaustion.
pub const MAX_RESAMPLES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub receivers: [ReceiverReport; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DofCertificate {
    /// `(S1 + S2) / T` when every trial decodes.
    #[serde(with = "serde_str::option")]
    pub dof: Option<Rational>,
    pub trials: usize,
    pub root_seed: u64,
    pub resamples: usize,
    pub failures: Vec<TrialFailure>,
}

impl DofCertificate {
    pub fn first_failing_seed(&self) -> Option<u64> {
        self.failures.first().map(|f| f.seed)
    }
}

enum Outcome {
    Pass { resamples: usize },
    Fail { failure: TrialFailure, resamples: usize },
}

fn run_trial(plan: &TransmissionPlan, root: u64, trial: usize) -> Result<Outcome> {
    for attempt in 0..MAX_RESAMPLES {
        let seed = derive_seed(root, trial as u64 + ((attempt as u64) << 32));
        let ch = field_channel(&plan.cfg, seed);
        let sys = match realize_plan::<Fp>(plan, &ch) {
            Ok(sys) => sys,
            Err(Error::ResampleRequired(_)) => continue,
            Err(e) => return Err(e),
        };
        let rep = decodability_check(&sys, &plan.symbols);
        return Ok(if rep.decodable() {
            Outcome::Pass { resamples: attempt }
        } else {
            Outcome::Fail { failure: TrialFailure { trial, seed, receivers: rep.receivers }, resamples: attempt }
        });
    }
    Err(Error::ResampleExhausted { seed: derive_seed(root, trial as u64), attempts: MAX_RESAMPLES })
}

/// Certifies the plan on `trials` independent prime-field channels. The
/// result does not depend on how rayon schedules the trials.
pub fn achieved_dof(plan: &TransmissionPlan, trials: usize, seed: u64) -> Result<DofCertificate> {
    if trials == 0 {
        return Err(Error::Precondition("need at least one trial".into()));
    }
    let outcomes: Vec<Result<Outcome>> = (0..trials).into_par_iter().map(|i| run_trial(plan, seed, i)).collect();
    let mut resamples = 0;
    let mut failures = Vec::new();
    for o in outcomes {
        match o? {
            Outcome::Pass { resamples: r } => resamples += r,
            Outcome::Fail { failure, resamples: r } => {
                resamples += r;
                failures.push(failure);
            }
        }
    }
    let dof = (failures.is_empty() && plan.t() > 0).then(|| frac(plan.symbols.len() as i64, plan.t() as i64));
    Ok(DofCertificate { dof, trials, root_seed: seed, resamples, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dof::SystemConfig;
    use crate::rational::frac;
    use crate::schemes::build_scheme_mid_k;

    #[test]
    fn mid_k_certifies() {
        let plan = build_scheme_mid_k(&SystemConfig::new(4, 1, 3, 2).unwrap()).unwrap();
        let cert = achieved_dof(&plan, 10, 1).unwrap();
        assert_eq!(cert.dof, Some(frac(7, 2)));
        assert!(cert.failures.is_empty());
        assert_eq!(cert, achieved_dof(&plan, 10, 1).unwrap());
    }

    #[test]
    fn zero_trials_is_a_precondition_error() {
        let plan = build_scheme_mid_k(&SystemConfig::new(4, 1, 3, 2).unwrap()).unwrap();
        assert!(matches!(achieved_dof(&plan, 0, 1), Err(Error::Precondition(_))));
    }
}
