//! Single-slot plans: the AP-ZF user split, RX2-only service, and a fully
//! informed ZF reference.

use crate::channel::Rx;
use crate::dof::{Regime, SystemConfig};
use crate::error::{Error, Result};
use crate::precoding::CancellationTarget;

use super::plan::{seed_order, unit, PlanBuilder, PrecoderRecipe, SchemeKind, TransmissionPlan};

pub fn build_scheme_baseline(cfg: &SystemConfig) -> Result<TransmissionPlan> {
    match cfg.regime() {
        Regime::FewAntennas | Regime::Uninformed => build_rx2_only(cfg),
        Regime::Informed => build_apzf_split(cfg),
        _ => Err(Error::Regime(format!("baseline needs k >= N2, k = 0 or M <= N2, got {cfg}"))),
    }
}

/// `min(N2, M)` RX2 symbols on fixed unit patterns.
pub fn build_rx2_only(cfg: &SystemConfig) -> Result<TransmissionPlan> {
    let streams = cfg.n2().min(cfg.m_eff());
    let mut b = PlanBuilder::new(SchemeKind::Rx2Only, *cfg, cfg.m_eff());
    let t = b.slot();
    for j in 0..streams {
        let pre = b.constant(j);
        b.fresh(t, Rx::Rx2, pre);
    }
    b.finish()
}

/// `N1` RX1 symbols nulled at RX2 antennas `0..M-N1` and `M-N1` RX2 symbols
/// nulled at all of RX1, where `M` is capped at `N1 + N2`. Needs
/// `max(N1, M - N1) <= k`.
pub fn build_apzf_split(cfg: &SystemConfig) -> Result<TransmissionPlan> {
    let (n1, n2) = (cfg.n1(), cfg.n2());
    let me = cfg.m_eff();
    let k = cfg.k_eff();
    if me <= n2 || n1 > k || me - n1 > k {
        return Err(Error::Regime(format!("AP-ZF split needs M > N2 and max(N1, M-N1) <= k, got {cfg}")));
    }
    let order = seed_order(me, k);
    let mut b = PlanBuilder::new(SchemeKind::ApzfSplit, *cfg, me);
    let t = b.slot();
    for &j in &order[..n1] {
        let pre = b.apzf(j, Rx::Rx2, 0..me - n1);
        b.fresh(t, Rx::Rx1, pre);
    }
    for &j in &order[..me - n1] {
        let pre = b.apzf(j, Rx::Rx1, 0..n1);
        b.fresh(t, Rx::Rx2, pre);
    }
    b.finish()
}

/// Same split with every antenna solving ZF. It is the perfect-CSIT
/// reference and is not compliant when `k < M`.
pub fn build_centralized_zf(cfg: &SystemConfig) -> Result<TransmissionPlan> {
    let (n1, n2) = (cfg.n1(), cfg.n2());
    let me = cfg.m_eff();
    if me <= n2 {
        return Err(Error::Regime(format!("ZF split needs M > N2, got {cfg}")));
    }
    let zf = |j: usize, rx: Rx, rows: std::ops::Range<usize>| PrecoderRecipe::Zf {
        pattern: unit(me, j),
        targets: vec![CancellationTarget::new(rx, rows)],
    };
    let mut b = PlanBuilder::new(SchemeKind::CentralizedZf, *cfg, me);
    let t = b.slot();
    for j in 0..n1 {
        b.fresh(t, Rx::Rx1, zf(j, Rx::Rx2, 0..me - n1));
    }
    for j in 0..me - n1 {
        b.fresh(t, Rx::Rx2, zf(j, Rx::Rx1, 0..n1));
    }
    Ok(b.finish_unvalidated())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn cfg(m: usize, n1: usize, n2: usize, k: usize) -> SystemConfig {
        SystemConfig::new(m, n1, n2, k).unwrap()
    }

    #[test]
    fn baseline_examples() {
        assert_eq!(build_scheme_baseline(&cfg(4, 1, 3, 3)).unwrap().claimed_dof, int(4));
        assert_eq!(build_scheme_baseline(&cfg(5, 2, 3, 0)).unwrap().claimed_dof, int(3));
        assert_eq!(build_scheme_baseline(&cfg(2, 1, 3, 1)).unwrap().claimed_dof, int(2));
        assert!(matches!(build_scheme_baseline(&cfg(4, 1, 3, 2)), Err(Error::Regime(_))));
    }

    #[test]
    fn extra_antennas_are_left_idle() {
        let p = build_scheme_baseline(&cfg(12, 2, 3, 5)).unwrap();
        assert_eq!(p.antennas, 5);
        assert_eq!(p.claimed_dof, int(5));
    }

    #[test]
    fn centralized_reference_reads_channel_everywhere() {
        let p = build_centralized_zf(&cfg(4, 1, 3, 2)).unwrap();
        assert!(p.validate().is_err());
        assert_eq!(p.summary().s1 + p.summary().s2, 4);
    }
}
