//! Transmission plans for each operating regime.

mod baseline;
mod low_k;
mod mid_k;
pub mod plan;
mod table1;

pub use baseline::{build_apzf_split, build_centralized_zf, build_rx2_only, build_scheme_baseline};
pub use low_k::build_scheme_low_k;
pub use mid_k::build_scheme_mid_k;
pub use plan::{
    AntennaRef, Payload, PlanSummary, PrecoderRecipe, ReceivedTerm, SchemeKind, Slot, Stream, SymbolInfo,
    SymbolRegistry, TransmissionPlan, WeightedTerm,
};
pub use table1::build_scheme_6331;

use crate::dof::{best_low_k, is_table1_config, Regime, SystemConfig};
use crate::error::Result;

/// The plan whose claimed DoF equals `sum_dof_lower(cfg, allow_special_cases)`.
pub fn select_scheme(cfg: &SystemConfig, allow_special_cases: bool) -> Result<TransmissionPlan> {
    if allow_special_cases && is_table1_config(cfg) {
        return build_scheme_6331();
    }
    match cfg.regime() {
        Regime::FewAntennas => build_rx2_only(cfg),
        Regime::Informed => build_apzf_split(cfg),
        Regime::Mid => build_scheme_mid_k(cfg),
        Regime::Low | Regime::Uninformed => match best_low_k(cfg) {
            Some((kp, _)) => low_k::low_k_plan(cfg, kp),
            None => build_rx2_only(cfg),
        },
    }
}
