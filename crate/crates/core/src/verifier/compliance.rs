//! Dual-channel check that uninformed antennas never use channel knowledge.

use serde::{Deserialize, Serialize};

use crate::channel::{derive_seed, field_channel};
use crate::error::Result;
use crate::field::Fp;
use crate::precoding::CsitLabel;
use crate::schemes::TransmissionPlan;

use super::observe::realize_plan;

const COMPLIANCE_SEED: u64 = 0x00c5_17c0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Labelled constant, but differs between the two channels.
    VariesWithChannel,
    /// The label itself claims channel knowledge at an uninformed antenna.
    LabelledChannelDependent,
    /// The label vector does not cover the plan's antennas.
    MissingLabel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub slot: usize,
    pub stream: usize,
    pub antenna: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub compliant: bool,
    /// Uninformed (stream, antenna) coefficients compared.
    pub checked: usize,
    pub seeds: [u64; 2],
    pub violations: Vec<Violation>,
}

pub fn csit_compliance(plan: &TransmissionPlan) -> Result<ComplianceReport> {
    csit_compliance_with_seeds(plan, derive_seed(COMPLIANCE_SEED, 0), derive_seed(COMPLIANCE_SEED, 1))
}

/// Realizes the plan on two independent channels and compares, for every
/// stream, what each uninformed antenna transmits (its coefficient times
/// the payload form).
pub fn csit_compliance_with_seeds(plan: &TransmissionPlan, seed_a: u64, seed_b: u64) -> Result<ComplianceReport> {
    let a = realize_plan::<Fp>(plan, &field_channel(&plan.cfg, seed_a))?;
    let b = realize_plan::<Fp>(plan, &field_channel(&plan.cfg, seed_b))?;
    let k = plan.cfg.k().min(plan.antennas);
    let mut violations = Vec::new();
    let mut checked = 0;
    for (t, slot) in plan.slots.iter().enumerate() {
        for (i, st) in slot.streams.iter().enumerate() {
            let (sa, sb) = (&a.streams(t)[i], &b.streams(t)[i]);
            for j in k..plan.antennas {
                checked += 1;
                let push = |v: &mut Vec<Violation>, kind| v.push(Violation { slot: t, stream: i, antenna: j, kind });
                let label = st.csit.get(j).copied();
                match label {
                    None => push(&mut violations, ViolationKind::MissingLabel),
                    Some(CsitLabel::ChannelDependent) => push(&mut violations, ViolationKind::LabelledChannelDependent),
                    Some(CsitLabel::Constant) => {
                        let ea = sa.payload.iter().map(|&p| sa.precoder[j] * p);
                        let eb = sb.payload.iter().map(|&p| sb.precoder[j] * p);
                        if !ea.eq(eb) {
                            push(&mut violations, ViolationKind::VariesWithChannel);
                        }
                    }
                }
            }
        }
    }
    Ok(ComplianceReport { compliant: violations.is_empty(), checked, seeds: [seed_a, seed_b], violations })
}
