//! Retransmission scheme for `1 <= k < N1`, with `m = min(N2, M - k)`.
//!
//! Phase 1 (`k` slots): `k` RX2 symbols nulled at RX1 antennas `0..k` and `m`
//! RX1 symbols nulled at RX2 antennas `0..k`. Phase 2 (`m - k` slots): `m`
//! fresh RX2 symbols plus `k` resent RX1 leak terms from RX2 antennas `k..m`.

use crate::channel::Rx;
use crate::dof::{low_k_width, SystemConfig};
use crate::error::{Error, Result};

use super::plan::{seed_order, term, PlanBuilder, SchemeKind, TransmissionPlan};

pub fn build_scheme_low_k(cfg: &SystemConfig) -> Result<TransmissionPlan> {
    if cfg.k() == 0 || cfg.k() >= cfg.n1() {
        return Err(Error::Regime(format!("low-k scheme needs 1 <= k < N1, got {cfg}")));
    }
    low_k_plan(cfg, cfg.k())
}

/// The scheme run with only the first `kp <= k` informed antennas cancelling.
pub(crate) fn low_k_plan(cfg: &SystemConfig, kp: usize) -> Result<TransmissionPlan> {
    let m = low_k_width(cfg, kp).ok_or_else(|| {
        Error::Regime(format!("low-k scheme with k={kp} needs min(N2, M-k) >= k, got {cfg}"))
    })?;
    let me = cfg.m_eff();
    let order = seed_order(me, kp);
    let mut b = PlanBuilder::new(SchemeKind::LowK, *cfg, me);

    for _ in 0..kp {
        let t = b.slot();
        for &j in &order[..kp] {
            let pre = b.apzf(j, Rx::Rx1, 0..kp);
            b.fresh(t, Rx::Rx2, pre);
        }
        for j in 0..m {
            let pre = b.apzf(kp + j, Rx::Rx2, 0..kp);
            b.fresh(t, Rx::Rx1, pre);
        }
    }
    let p2 = m - kp;
    for tau in 0..p2 {
        let t = b.slot();
        for &j in &order[..m] {
            let pre = b.apzf(j, Rx::Rx1, 0..kp);
            b.fresh(t, Rx::Rx2, pre);
        }
        for j in 0..kp {
            let q = tau * kp + j;
            let pre = b.constant(j);
            b.retransmit(t, vec![term(q / p2, Rx::Rx2, kp + q % p2, Rx::Rx1)], pre);
        }
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn plan(m: usize, n1: usize, n2: usize, k: usize) -> Result<TransmissionPlan> {
        build_scheme_low_k(&SystemConfig::new(m, n1, n2, k).unwrap())
    }

    #[test]
    fn reference_counts() {
        let p = plan(6, 3, 3, 1).unwrap().summary();
        assert_eq!((p.t, p.s1 + p.s2, p.claimed_dof), (3, 10, frac(10, 3)));
        let p = plan(9, 3, 6, 2).unwrap().summary();
        assert_eq!((p.t, p.claimed_dof), (6, frac(20, 3)));
        let p = plan(5, 2, 3, 1).unwrap().summary();
        assert_eq!(p.claimed_dof, frac(10, 3));
    }

    #[test]
    fn regime_errors() {
        assert!(matches!(plan(6, 3, 3, 0), Err(Error::Regime(_))));
        assert!(matches!(plan(6, 3, 3, 3), Err(Error::Regime(_))));
        // m = min(3, 3 - 2) = 1 < k
        assert!(matches!(plan(3, 3, 3, 2), Err(Error::Regime(_))));
    }

    #[test]
    fn causal() {
        assert!(plan(9, 3, 6, 2).unwrap().references_only_earlier_slots());
    }
}
