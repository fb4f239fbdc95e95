//! Realizing a plan on a channel: precoders, payload forms, received rows.

use crate::channel::{rotation_matrix, ChannelRealization, Rx};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix, Scalar};
use crate::precoding::{apzf_with_bias, zf_with_pattern};
use crate::schemes::{Payload, PrecoderRecipe, TransmissionPlan};

/// One realized stream: transmit vector and payload as a linear form over
/// the plan's symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizedStream<T> {
    pub precoder: Vec<T>,
    pub payload: Vec<T>,
}

/// Noiseless receive maps `A_i` (`N_i T x S`) of both receivers.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationSystem<T> {
    rx1: Matrix<T>,
    rx2: Matrix<T>,
    slots: Vec<Vec<RealizedStream<T>>>,
    channel: Matrix<T>,
    n1: usize,
    n2: usize,
}

impl<T: Scalar> ObservationSystem<T> {
    pub fn a(&self, rx: Rx) -> &Matrix<T> {
        match rx {
            Rx::Rx1 => &self.rx1,
            Rx::Rx2 => &self.rx2,
        }
    }

    pub fn is_exact(&self) -> bool {
        T::EXACT
    }

    pub fn slots(&self) -> usize {
        self.slots.len()
    }

    pub fn symbols(&self) -> usize {
        self.rx1.cols()
    }

    pub fn antennas(&self, rx: Rx) -> usize {
        match rx {
            Rx::Rx1 => self.n1,
            Rx::Rx2 => self.n2,
        }
    }

    pub fn streams(&self, slot: usize) -> &[RealizedStream<T>] {
        &self.slots[slot]
    }

    /// Channel the precoders were computed on (after any rotation).
    pub fn effective_channel(&self) -> &Matrix<T> {
        &self.channel
    }

    fn global_row(&self, rx: Rx, antenna: usize) -> usize {
        match rx {
            Rx::Rx1 => antenna,
            Rx::Rx2 => self.n1 + antenna,
        }
    }

    /// Scalar gain of a stream at one receive antenna.
    pub fn stream_gain(&self, slot: usize, stream: usize, rx: Rx, antenna: usize) -> T {
        dot(self.channel.row(self.global_row(rx, antenna)), &self.slots[slot][stream].precoder)
    }

    /// Received sample at `(slot, rx, antenna)` as a form over the symbols.
    pub fn sample(&self, slot: usize, rx: Rx, antenna: usize) -> &[T] {
        self.a(rx).row(slot * self.antennas(rx) + antenna)
    }

    /// Rows of `A_i` belonging to `slots`.
    pub fn rows_for_slots(&self, rx: Rx, slots: std::ops::Range<usize>) -> Matrix<T> {
        let n = self.antennas(rx);
        let idx: Vec<usize> = slots.flat_map(|t| t * n..(t + 1) * n).collect();
        self.a(rx).select_rows(&idx)
    }

    /// `antennas x S` transmit map of one slot.
    pub fn transmit(&self, slot: usize) -> Matrix<T> {
        let m = self.channel.cols();
        let s = self.symbols();
        let mut x = Matrix::zeros(m, s);
        for st in &self.slots[slot] {
            for j in 0..m {
                let c = st.precoder[j];
                if c == T::zero() {
                    continue;
                }
                for (v, &p) in x.row_mut(j).iter_mut().zip(&st.payload) {
                    *v += c * p;
                }
            }
        }
        x
    }
}

fn lift<T: Scalar>(pattern: &[i64]) -> Vec<T> {
    pattern.iter().map(|&v| T::from_i64(v)).collect()
}

/// Which channel each antenna group uses to evaluate recipes.
struct RecipeChannels<'a, T> {
    informed: &'a ChannelRealization<T>,
    uninformed: &'a ChannelRealization<T>,
}

fn precoder<T: Scalar>(recipe: &PrecoderRecipe, k: usize, chans: &RecipeChannels<'_, T>) -> Result<Vec<T>> {
    match recipe {
        PrecoderRecipe::Constant { pattern } => Ok(lift(pattern)),
        PrecoderRecipe::Apzf { pattern, target } => {
            Ok(apzf_with_bias(chans.informed, k, target, &lift(pattern))?.into_coeffs())
        }
        PrecoderRecipe::Zf { pattern, targets } => {
            let p = lift(pattern);
            let mut t = zf_with_pattern(chans.informed, targets, &p)?.into_coeffs();
            let est = zf_with_pattern(chans.uninformed, targets, &p)?.into_coeffs();
            t[k..].copy_from_slice(&est[k..]);
            Ok(t)
        }
    }
}

/// Drops unused antennas; when the plan drives exactly `N1 + N2` of more
/// antennas the equivalent channel `(H R)[:, ..N]` is used.
fn effective_channel<T: Scalar>(plan: &TransmissionPlan, ch: &ChannelRealization<T>) -> Result<ChannelRealization<T>> {
    if ch.n1() != plan.cfg.n1() || ch.n2() != plan.cfg.n2() || ch.m() != plan.cfg.m() {
        return Err(Error::DimensionMismatch(format!(
            "channel {}x{} ({}+{}) does not fit {}",
            ch.h().rows(),
            ch.m(),
            ch.n1(),
            ch.n2(),
            plan.cfg
        )));
    }
    let n = ch.n1() + ch.n2();
    if ch.m() == plan.antennas {
        Ok(ch.clone())
    } else if plan.antennas == n {
        let r = rotation_matrix(ch)?;
        ch.with_matrix(ch.h().mul(r.matrix()))?.restrict_antennas(n)
    } else {
        ch.restrict_antennas(plan.antennas)
    }
}

pub fn realize_plan<T: Scalar>(plan: &TransmissionPlan, ch: &ChannelRealization<T>) -> Result<ObservationSystem<T>> {
    let eff = effective_channel(plan, ch)?;
    realize_on(plan, &RecipeChannels { informed: &eff, uninformed: &eff })
}

/// Like [`realize_plan`], but channel-dependent coefficients at uninformed
/// antennas are computed from `estimate` instead of the true channel.
pub fn realize_plan_estimated<T: Scalar>(
    plan: &TransmissionPlan,
    ch: &ChannelRealization<T>,
    estimate: &ChannelRealization<T>,
) -> Result<ObservationSystem<T>> {
    let eff = effective_channel(plan, ch)?;
    let est = effective_channel(plan, estimate)?;
    realize_on(plan, &RecipeChannels { informed: &eff, uninformed: &est })
}

fn realize_on<T: Scalar>(plan: &TransmissionPlan, chans: &RecipeChannels<'_, T>) -> Result<ObservationSystem<T>> {
    let h = chans.informed;
    let s = plan.symbols.len();
    let k = plan.informed;
    let precoders: Vec<Vec<Vec<T>>> = plan
        .slots
        .iter()
        .map(|slot| slot.streams.iter().map(|st| precoder(&st.precoder, k, chans)).collect())
        .collect::<Result<_>>()?;

    // Fresh-only contribution of `owner`'s symbols at one antenna and slot.
    let leak = |slot: usize, rx: Rx, antenna: usize, owner: Rx| -> Vec<T> {
        let mut form = vec![T::zero(); s];
        let row = h.row(rx, antenna);
        for (st, t) in plan.slots[slot].streams.iter().zip(&precoders[slot]) {
            if let Payload::Fresh { symbol } = st.payload {
                if plan.symbols.owner(symbol) == owner {
                    form[symbol] += dot(row, t);
                }
            }
        }
        form
    };

    let mut slots = Vec::with_capacity(plan.t());
    for (t, slot) in plan.slots.iter().enumerate() {
        let mut realized = Vec::with_capacity(slot.streams.len());
        for (st, pre) in slot.streams.iter().zip(&precoders[t]) {
            let payload = match &st.payload {
                Payload::Fresh { symbol } => {
                    let mut e = vec![T::zero(); s];
                    e[*symbol] = T::one();
                    e
                }
                Payload::Retransmission { terms } => {
                    let mut acc = vec![T::zero(); s];
                    for w in terms {
                        let wt = T::from_i64(w.weight);
                        let r = &w.term;
                        for (a, v) in acc.iter_mut().zip(leak(r.slot, r.at.rx, r.at.antenna, r.owner)) {
                            *a += wt * v;
                        }
                    }
                    acc
                }
            };
            realized.push(RealizedStream { precoder: pre.clone(), payload });
        }
        slots.push(realized);
    }

    let mut sys = ObservationSystem {
        rx1: Matrix::zeros(0, s),
        rx2: Matrix::zeros(0, s),
        slots,
        channel: h.h().clone(),
        n1: h.n1(),
        n2: h.n2(),
    };
    let mut rows1 = Vec::with_capacity(plan.t() * h.n1());
    let mut rows2 = Vec::with_capacity(plan.t() * h.n2());
    for t in 0..plan.t() {
        let y = h.h().mul(&sys.transmit(t));
        for i in 0..h.n1() {
            rows1.push(y.row(i).to_vec());
        }
        for i in 0..h.n2() {
            rows2.push(y.row(h.n1() + i).to_vec());
        }
    }
    if !rows1.is_empty() {
        sys.rx1 = Matrix::from_rows(&rows1);
    }
    if !rows2.is_empty() {
        sys.rx2 = Matrix::from_rows(&rows2);
    }
    Ok(sys)
}
