//! Linear transmission plans: per-slot streams, each a payload shaped by a
//! precoder recipe.

use serde::{Deserialize, Serialize};

use crate::channel::Rx;
use crate::dof::SystemConfig;
use crate::error::{Error, Result};
use crate::precoding::{CancellationTarget, CsitLabel};
use crate::rational::{frac, int, serde_str, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AntennaRef {
    pub rx: Rx,
    pub antenna: usize,
}

impl AntennaRef {
    pub fn new(rx: Rx, antenna: usize) -> Self {
        AntennaRef { rx, antenna }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolInfo {
    pub id: usize,
    pub owner: Rx,
    pub name: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolRegistry {
    symbols: Vec<SymbolInfo>,
}

impl SymbolRegistry {
    /// Registers a symbol named `a<n>` (RX1) or `b<n>` (RX2).
    pub fn push(&mut self, owner: Rx) -> usize {
        let id = self.symbols.len();
        let prefix = match owner {
            Rx::Rx1 => 'a',
            Rx::Rx2 => 'b',
        };
        let name = format!("{prefix}{}", self.count(owner) + 1);
        self.symbols.push(SymbolInfo { id, owner, name });
        id
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[SymbolInfo] {
        &self.symbols
    }

    pub fn owner(&self, id: usize) -> Rx {
        self.symbols[id].owner
    }

    pub fn count(&self, rx: Rx) -> usize {
        self.symbols.iter().filter(|s| s.owner == rx).count()
    }

    pub fn s1(&self) -> usize {
        self.count(Rx::Rx1)
    }

    pub fn s2(&self) -> usize {
        self.count(Rx::Rx2)
    }

    pub fn owned_by(&self, rx: Rx) -> Vec<usize> {
        self.symbols.iter().filter(|s| s.owner == rx).map(|s| s.id).collect()
    }

    pub fn by_name(&self, name: &str) -> Option<usize> {
        self.symbols.iter().find(|s| s.name == name).map(|s| s.id)
    }
}

/// How a stream's transmit vector is formed from the channel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrecoderRecipe {
    /// Fixed coefficients, no channel knowledge.
    Constant { pattern: Vec<i64> },
    /// Constant pattern plus an informed-antenna correction nulling `target`.
    Apzf { pattern: Vec<i64>, target: CancellationTarget },
    /// Fully informed ZF; every coefficient reads the channel.
    Zf { pattern: Vec<i64>, targets: Vec<CancellationTarget> },
}

impl PrecoderRecipe {
    pub fn pattern(&self) -> &[i64] {
        match self {
            PrecoderRecipe::Constant { pattern }
            | PrecoderRecipe::Apzf { pattern, .. }
            | PrecoderRecipe::Zf { pattern, .. } => pattern,
        }
    }

    /// Coefficient labels implied by the recipe alone.
    pub fn labels(&self, informed: usize) -> Vec<CsitLabel> {
        let n = self.pattern().len();
        match self {
            PrecoderRecipe::Constant { .. } => vec![CsitLabel::Constant; n],
            PrecoderRecipe::Apzf { target, .. } => (0..n)
                .map(|j| {
                    if j < informed && !target.is_empty() {
                        CsitLabel::ChannelDependent
                    } else {
                        CsitLabel::Constant
                    }
                })
                .collect(),
            PrecoderRecipe::Zf { targets, .. } => {
                if targets.iter().all(CancellationTarget::is_empty) {
                    vec![CsitLabel::Constant; n]
                } else {
                    vec![CsitLabel::ChannelDependent; n]
                }
            }
        }
    }

    /// Antennas whose coefficient may be nonzero.
    fn support(&self, informed: usize) -> Vec<bool> {
        let p = self.pattern();
        match self {
            PrecoderRecipe::Constant { .. } => p.iter().map(|&v| v != 0).collect(),
            PrecoderRecipe::Apzf { target, .. } => {
                p.iter().enumerate().map(|(j, &v)| v != 0 || (j < informed && !target.is_empty())).collect()
            }
            PrecoderRecipe::Zf { .. } => vec![true; p.len()],
        }
    }
}

/// Noiseless contribution of `owner`'s fresh symbols to receive antenna `at`
/// in `slot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReceivedTerm {
    pub slot: usize,
    pub at: AntennaRef,
    pub owner: Rx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedTerm {
    pub weight: i64,
    pub term: ReceivedTerm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Fresh { symbol: usize },
    /// Sum of received-signal pieces, rebuilt at the informed antennas.
    Retransmission { terms: Vec<WeightedTerm> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stream {
    pub payload: Payload,
    pub precoder: PrecoderRecipe,
    /// One label per transmit antenna.
    pub csit: Vec<CsitLabel>,
}

impl Stream {
    /// Labels follow from the recipe; a retransmitted payload makes every
    /// antenna that carries it channel dependent.
    pub fn new(payload: Payload, precoder: PrecoderRecipe, informed: usize) -> Self {
        let mut csit = precoder.labels(informed);
        if matches!(payload, Payload::Retransmission { .. }) {
            for (l, on) in csit.iter_mut().zip(precoder.support(informed)) {
                if on {
                    *l = CsitLabel::ChannelDependent;
                }
            }
        }
        Stream { payload, precoder, csit }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub streams: Vec<Stream>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Two-phase AP-ZF scheme with interference retransmission, `N1 <= k < N2`.
    MidK,
    /// Retransmission scheme for `1 <= k < N1`.
    LowK,
    /// Hand-built four-slot scheme for `(6,3,3,1)`.
    Table1,
    /// One-shot AP-ZF split between the users.
    ApzfSplit,
    /// Only RX2 is served.
    Rx2Only,
    /// Fully informed ZF; not compliant unless `k = M`.
    CentralizedZf,
    /// Hand-assembled plan.
    Custom,
}

impl SchemeKind {
    pub fn id(self) -> &'static str {
        match self {
            SchemeKind::MidK => "mid_k",
            SchemeKind::LowK => "low_k",
            SchemeKind::Table1 => "table1",
            SchemeKind::ApzfSplit => "apzf_split",
            SchemeKind::Rx2Only => "rx2_only",
            SchemeKind::CentralizedZf => "centralized_zf",
            SchemeKind::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransmissionPlan {
    pub scheme: SchemeKind,
    pub cfg: SystemConfig,
    /// Transmit antennas driven by the plan (the first ones of the array).
    pub antennas: usize,
    /// Leading antennas with perfect channel knowledge, `<= antennas`.
    pub informed: usize,
    pub symbols: SymbolRegistry,
    pub slots: Vec<Slot>,
    #[serde(with = "serde_str")]
    pub claimed_dof: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub s1: usize,
    pub s2: usize,
    pub t: usize,
    #[serde(with = "serde_str")]
    pub claimed_dof: Rational,
    #[serde(with = "serde_str")]
    pub d1: Rational,
    #[serde(with = "serde_str")]
    pub d2: Rational,
}

fn ratio(a: usize, t: usize) -> Rational {
    if t == 0 {
        int(0)
    } else {
        frac(a as i64, t as i64)
    }
}

impl TransmissionPlan {
    pub fn t(&self) -> usize {
        self.slots.len()
    }

    pub fn summary(&self) -> PlanSummary {
        let (s1, s2, t) = (self.symbols.s1(), self.symbols.s2(), self.t());
        PlanSummary { s1, s2, t, claimed_dof: self.claimed_dof, d1: ratio(s1, t), d2: ratio(s2, t) }
    }

    pub fn streams(&self) -> impl Iterator<Item = (usize, &Stream)> {
        self.slots.iter().enumerate().flat_map(|(t, s)| s.streams.iter().map(move |st| (t, st)))
    }

    /// Every retransmitted term comes from a strictly earlier slot.
    pub fn references_only_earlier_slots(&self) -> bool {
        self.slots.iter().enumerate().all(|(t, slot)| {
            slot.streams.iter().all(|s| match &s.payload {
                Payload::Fresh { .. } => true,
                Payload::Retransmission { terms } => terms.iter().all(|w| w.term.slot < t),
            })
        })
    }

    /// Structural checks that need no channel.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPlan(m));
        if self.informed > self.antennas || self.antennas > self.cfg.m() {
            return bad(format!("{} informed of {} antennas, M={}", self.informed, self.antennas, self.cfg.m()));
        }
        if self.informed != self.cfg.k().min(self.antennas) {
            return bad(format!("informed count {} does not match k={}", self.informed, self.cfg.k()));
        }
        let mut seen = vec![0usize; self.symbols.len()];
        for (t, s) in self.streams() {
            if s.precoder.pattern().len() != self.antennas || s.csit.len() != self.antennas {
                return bad(format!("slot {t}: recipe width differs from {} antennas", self.antennas));
            }
            if let Some(j) = (self.informed..self.antennas).find(|&j| s.csit[j] != CsitLabel::Constant) {
                return bad(format!("slot {t}: uninformed antenna {j} labelled channel dependent"));
            }
            match &s.precoder {
                PrecoderRecipe::Apzf { target, .. } if target.len() > self.informed => {
                    return bad(format!("slot {t}: AP-ZF target larger than k"));
                }
                _ => {}
            }
            match &s.payload {
                Payload::Fresh { symbol } => match seen.get_mut(*symbol) {
                    Some(c) => *c += 1,
                    None => return bad(format!("slot {t}: unknown symbol {symbol}")),
                },
                Payload::Retransmission { terms } => {
                    for w in terms {
                        let r = &w.term;
                        let n = match r.at.rx {
                            Rx::Rx1 => self.cfg.n1(),
                            Rx::Rx2 => self.cfg.n2(),
                        };
                        if r.slot >= self.t() || r.at.antenna >= n {
                            return bad(format!("slot {t}: retransmission references {r:?}"));
                        }
                    }
                }
            }
        }
        if let Some(id) = seen.iter().position(|&c| c != 1) {
            return bad(format!("symbol {id} sent {} times", seen[id]));
        }
        let claimed = ratio(self.symbols.len(), self.t());
        if claimed != self.claimed_dof {
            return bad(format!("claimed {} but carries {} symbols in {} slots", self.claimed_dof, self.symbols.len(), self.t()));
        }
        Ok(())
    }
}

pub fn unit(len: usize, j: usize) -> Vec<i64> {
    let mut v = vec![0; len];
    v[j] = 1;
    v
}

/// Antenna order for seeding independent precoders: uninformed first.
pub fn seed_order(antennas: usize, informed: usize) -> Vec<usize> {
    (informed..antennas).chain(0..informed).collect()
}

pub(crate) struct PlanBuilder {
    plan: TransmissionPlan,
}

impl PlanBuilder {
    pub fn new(scheme: SchemeKind, cfg: SystemConfig, antennas: usize) -> Self {
        let informed = cfg.k().min(antennas);
        PlanBuilder {
            plan: TransmissionPlan {
                scheme,
                cfg,
                antennas,
                informed,
                symbols: SymbolRegistry::default(),
                slots: Vec::new(),
                claimed_dof: int(0),
            },
        }
    }

    pub fn slot(&mut self) -> usize {
        self.plan.slots.push(Slot::default());
        self.plan.slots.len() - 1
    }

    pub fn fresh(&mut self, slot: usize, owner: Rx, precoder: PrecoderRecipe) -> usize {
        let symbol = self.plan.symbols.push(owner);
        let s = Stream::new(Payload::Fresh { symbol }, precoder, self.plan.informed);
        self.plan.slots[slot].streams.push(s);
        symbol
    }

    pub fn retransmit(&mut self, slot: usize, terms: Vec<WeightedTerm>, precoder: PrecoderRecipe) {
        let s = Stream::new(Payload::Retransmission { terms }, precoder, self.plan.informed);
        self.plan.slots[slot].streams.push(s);
    }

    /// AP-ZF on unit pattern `e_j` nulled at `antennas` of `rx`.
    pub fn apzf(&self, j: usize, rx: Rx, antennas: impl IntoIterator<Item = usize>) -> PrecoderRecipe {
        PrecoderRecipe::Apzf { pattern: unit(self.plan.antennas, j), target: CancellationTarget::new(rx, antennas) }
    }

    pub fn constant(&self, j: usize) -> PrecoderRecipe {
        PrecoderRecipe::Constant { pattern: unit(self.plan.antennas, j) }
    }

    pub fn finish(self) -> Result<TransmissionPlan> {
        let plan = self.finish_unvalidated();
        plan.validate()?;
        Ok(plan)
    }

    pub fn finish_unvalidated(mut self) -> TransmissionPlan {
        self.plan.claimed_dof = ratio(self.plan.symbols.len(), self.plan.t());
        self.plan
    }
}

pub(crate) fn term(slot: usize, rx: Rx, antenna: usize, owner: Rx) -> WeightedTerm {
    WeightedTerm { weight: 1, term: ReceivedTerm { slot, at: AntennaRef::new(rx, antenna), owner } }
}
