//! Two-phase scheme for `N1 <= k < N2`.
//!
//! Phase 1 (`N1` slots) sends `M - k` RX1 symbols nulled at RX2 antennas
//! `0..k` and `M - N1` RX2 symbols nulled at all of RX1. The RX1 symbols leak
//! into RX2 antennas `k..N2`; the informed antennas know those leaked terms
//! and resend `N1` of them per slot during phase 2 (`M - k - N1` slots), next
//! to `N2 - N1` fresh RX2 symbols. Each resent term is a new equation for RX1
//! and a known interference term for RX2.

use crate::channel::Rx;
use crate::dof::{Regime, SystemConfig};
use crate::error::{Error, Result};

use super::baseline::build_apzf_split;
use super::plan::{seed_order, term, PlanBuilder, SchemeKind, TransmissionPlan};

pub fn build_scheme_mid_k(cfg: &SystemConfig) -> Result<TransmissionPlan> {
    if cfg.regime() != Regime::Mid {
        return Err(Error::Regime(format!("mid-k scheme needs N1 <= k < N2 < M, got {cfg}")));
    }
    let (n1, n2, k) = (cfg.n1(), cfg.n2(), cfg.k());
    let me = cfg.m_eff();
    // With fewer than N1 uninformed antennas the single-slot split already reaches M.
    if me - k < n1 {
        return build_apzf_split(cfg);
    }
    let p2 = me - k - n1;
    let order = seed_order(me, k);
    let mut b = PlanBuilder::new(SchemeKind::MidK, *cfg, me);

    for _ in 0..n1 {
        let t = b.slot();
        for j in 0..me - k {
            let pre = b.apzf(k + j, Rx::Rx2, 0..k);
            b.fresh(t, Rx::Rx1, pre);
        }
        for &j in &order[..me - n1] {
            let pre = b.apzf(j, Rx::Rx1, 0..n1);
            b.fresh(t, Rx::Rx2, pre);
        }
    }
    for tau in 0..p2 {
        let t = b.slot();
        for j in 0..n1 {
            let q = tau * n1 + j;
            let src = q / p2;
            let antenna = k + q % p2;
            let pre = b.constant(j);
            b.retransmit(t, vec![term(src, Rx::Rx2, antenna, Rx::Rx1)], pre);
        }
        for &j in &order[..n2 - n1] {
            let pre = b.apzf(j, Rx::Rx1, 0..n1);
            b.fresh(t, Rx::Rx2, pre);
        }
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn plan(m: usize, n1: usize, n2: usize, k: usize) -> TransmissionPlan {
        build_scheme_mid_k(&SystemConfig::new(m, n1, n2, k).unwrap()).unwrap()
    }

    #[test]
    fn counts_match_closed_form() {
        let p = plan(4, 1, 3, 2).summary();
        assert_eq!((p.t, p.s1, p.s2, p.claimed_dof), (2, 2, 5, frac(7, 2)));
        let p = plan(4, 1, 3, 1).summary();
        assert_eq!((p.t, p.s1, p.s2, p.claimed_dof), (3, 3, 7, frac(10, 3)));
        let p = plan(9, 3, 6, 4).summary();
        assert_eq!((p.t, p.s1, p.s2, p.claimed_dof), (5, 15, 24, frac(39, 5)));
    }

    #[test]
    fn saturated_case_uses_single_slot() {
        let p = plan(5, 3, 4, 3);
        assert_eq!(p.scheme, SchemeKind::ApzfSplit);
        assert_eq!(p.claimed_dof, int(5));
    }

    #[test]
    fn retransmissions_look_backwards() {
        assert!(plan(9, 3, 6, 3).references_only_earlier_slots());
    }

    #[test]
    fn rejects_other_regimes() {
        for c in [(4, 1, 3, 3), (6, 3, 3, 1), (3, 1, 3, 1), (5, 2, 3, 1)] {
            let cfg = SystemConfig::new(c.0, c.1, c.2, c.3).unwrap();
            assert!(matches!(build_scheme_mid_k(&cfg), Err(Error::Regime(_))), "{cfg}");
        }
    }
}
