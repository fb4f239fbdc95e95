//! Four-slot scheme for `(M, N1, N2, k) = (6, 3, 3, 1)` reaching sum DoF 4.
//!
//! Every fresh stream is nulled at the third antenna of the other receiver.
//! That antenna then hears only `c` (slots 0, 1) or `d` (slots 2, 3), where
//! `c` and `d` each add one RX1 leak at RX2 and one RX2 leak at RX1:
//!
//! `c = L1(rx2 ant0, slot0) + L2(rx1 ant0, slot1)`,
//! `d = L1(rx2 ant1, slot0) + L2(rx1 ant1, slot1)`.
//!
//! `c` and `d` ride on the informed antenna. With one channel per block these
//! leaks are fixed before slot 0, so sending `c` in slot 0 is causal.

use crate::channel::Rx;
use crate::dof::SystemConfig;
use crate::error::Result;

use super::plan::{term, PlanBuilder, SchemeKind, TransmissionPlan, WeightedTerm};

pub fn build_scheme_6331() -> Result<TransmissionPlan> {
    let cfg = SystemConfig::new(6, 3, 3, 1)?;
    let mut b = PlanBuilder::new(SchemeKind::Table1, cfg, 6);
    let crafted = |j: usize| -> Vec<WeightedTerm> {
        vec![term(0, Rx::Rx2, j, Rx::Rx1), term(1, Rx::Rx1, j, Rx::Rx2)]
    };
    let layout = [(Rx::Rx1, 5, 0), (Rx::Rx2, 5, 0), (Rx::Rx1, 3, 1), (Rx::Rx2, 3, 1)];
    for (owner, count, which) in layout {
        let t = b.slot();
        let pre = b.constant(0);
        b.retransmit(t, crafted(which), pre);
        for j in 0..count {
            let pre = b.apzf(1 + j, owner.other(), [2]);
            b.fresh(t, owner, pre);
        }
    }
    b.finish()
}
