//! Finite-SNR sum rates and the high-SNR slope fit.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channel::{derive_seed, finite_precision_estimate, sample_channel, ChannelDistribution, Rx};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::schemes::TransmissionPlan;

use super::observe::{realize_plan_estimated, ObservationSystem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSimConfig {
    pub snr_db: Vec<f64>,
    pub trials: usize,
    /// Variance of the channel estimate error used by uninformed antennas.
    pub sigma0_sq: f64,
    pub distribution: ChannelDistribution,
}

impl RateSimConfig {
    pub fn new(snr_db: Vec<f64>, trials: usize) -> Result<Self> {
        let rsc = RateSimConfig { snr_db, trials, sigma0_sq: 0.01, distribution: ChannelDistribution::default() };
        rsc.validate()?;
        Ok(rsc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.len() < 2 || self.snr_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("need at least two strictly increasing SNR points".into()));
        }
        if self.snr_db.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidConfig("SNR points must be finite".into()));
        }
        if self.trials == 0 || self.sigma0_sq.is_nan() || self.sigma0_sq < 0.0 {
            return Err(Error::InvalidConfig("need trials >= 1 and sigma0^2 >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    /// Least-squares slope of mean sum rate against `log2(sqrt(P))`.
    pub slope: f64,
    pub intercept: f64,
    pub snr_db: Vec<f64>,
    pub mean_sum_rate: Vec<f64>,
    pub trials_used: usize,
    pub discarded: usize,
}

fn log2_det_shifted(a: &DMatrix<f64>, p: f64) -> Option<f64> {
    let n = a.nrows();
    if n == 0 || a.ncols() == 0 {
        return Some(0.0);
    }
    let g = DMatrix::identity(n, n) + (a * a.transpose()) * p;
    let chol = g.cholesky()?;
    let l = chol.l();
    let d = (0..n).map(|i| l[(i, i)].log2()).sum::<f64>() * 2.0;
    d.is_finite().then_some(d)
}

/// Real-signal sum rate per channel use with unit-variance Gaussian symbols,
/// after scaling every slot to unit transmit power.
pub fn sum_rate(sys: &ObservationSystem<f64>, plan: &TransmissionPlan, snr: f64) -> Option<f64> {
    let t = sys.slots();
    if t == 0 {
        return Some(0.0);
    }
    let peak = (0..t)
        .map(|s| sys.transmit(s).as_slice().iter().map(|v| v * v).sum::<f64>())
        .fold(0.0, f64::max);
    if peak == 0.0 {
        return Some(0.0);
    }
    let p = snr / peak;
    let mut total = 0.0;
    for rx in [Rx::Rx1, Rx::Rx2] {
        let a = sys.a(rx).to_nalgebra();
        let others = plan.symbols.owned_by(rx.other());
        let ai = Matrix::from_nalgebra(&a).select_cols(&others).to_nalgebra();
        total += log2_det_shifted(&a, p)? - log2_det_shifted(&ai, p)?;
    }
    Some(total / (2.0 * t as f64))
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

pub fn rate_slope_estimate(plan: &TransmissionPlan, rsc: &RateSimConfig, seed: u64) -> Result<SlopeEstimate> {
    rsc.validate()?;
    let span = rsc.snr_db.last().unwrap() - rsc.snr_db[0];
    if span < 20.0 {
        return Err(Error::InvalidConfig(format!("SNR span {span} dB is below 20 dB")));
    }
    let snrs: Vec<f64> = rsc.snr_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
    let mut sums = vec![0.0; snrs.len()];
    let mut used = 0;
    let mut discarded = 0;
    let sigma0 = rsc.sigma0_sq.sqrt();
    for trial in 0..rsc.trials {
        let ch = sample_channel(&plan.cfg, &rsc.distribution, derive_seed(seed, trial as u64));
        let est = finite_precision_estimate(&ch, sigma0, derive_seed(!seed, trial as u64))?;
        let sys = match realize_plan_estimated(plan, &ch, &est) {
            Ok(s) => s,
            Err(Error::ResampleRequired(_)) => {
                discarded += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let rates: Option<Vec<f64>> = snrs.iter().map(|&p| sum_rate(&sys, plan, p)).collect();
        match rates {
            Some(r) => {
                for (s, v) in sums.iter_mut().zip(r) {
                    *s += v;
                }
                used += 1;
            }
            None => discarded += 1,
        }
    }
    if used == 0 {
        return Err(Error::ResampleExhausted { seed, attempts: rsc.trials });
    }
    let mean: Vec<f64> = sums.iter().map(|s| s / used as f64).collect();
    let x: Vec<f64> = snrs.iter().map(|p| 0.5 * p.log2()).collect();
    let (slope, intercept) = linear_fit(&x, &mean);
    Ok(SlopeEstimate { slope, intercept, snr_db: rsc.snr_db.clone(), mean_sum_rate: mean, trials_used: used, discarded })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(RateSimConfig::new(vec![40.0], 10).is_err());
        assert!(RateSimConfig::new(vec![40.0, 40.0], 10).is_err());
        assert!(RateSimConfig::new(vec![60.0, 40.0], 10).is_err());
        assert!(RateSimConfig::new(vec![40.0, 60.0], 0).is_err());
        assert!(RateSimConfig::new(vec![40.0, 60.0], 1).is_ok());
    }

    #[test]
    fn fit_recovers_a_line() {
        let (s, c) = linear_fit(&[1.0, 2.0, 3.0], &[5.0, 7.0, 9.0]);
        assert!((s - 2.0).abs() < 1e-12 && (c - 3.0).abs() < 1e-12);
    }

    #[test]
    fn log_det_of_identity_shift() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let d = log2_det_shifted(&a, 3.0).unwrap();
        assert!((d - (4.0f64 * 13.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn narrow_span_is_rejected() {
        let cfg = crate::dof::SystemConfig::new(4, 1, 3, 3).unwrap();
        let plan = crate::schemes::select_scheme(&cfg, false).unwrap();
        let rsc = RateSimConfig::new(vec![40.0, 50.0], 2).unwrap();
        assert!(rate_slope_estimate(&plan, &rsc, 1).is_err());
    }
}
