//! Active-passive zero forcing and the fully informed ZF reference.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, Rx};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar};

/// Whether a transmit coefficient depends on the instantaneous channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsitLabel {
    Constant,
    ChannelDependent,
}

/// Receive antennas of one receiver at which a precoded stream must vanish.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CancellationTarget {
    pub rx: Rx,
    pub antenna_rows: Vec<usize>,
}

impl CancellationTarget {
    pub fn new(rx: Rx, antenna_rows: impl IntoIterator<Item = usize>) -> Self {
        CancellationTarget { rx, antenna_rows: antenna_rows.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.antenna_rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.antenna_rows.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrecoderVector<T> {
    coeffs: Vec<T>,
    labels: Vec<CsitLabel>,
    informed: usize,
}

impl<T: Scalar> PrecoderVector<T> {
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }
    pub fn labels(&self) -> &[CsitLabel] {
        &self.labels
    }
    pub fn active(&self) -> &[T] {
        &self.coeffs[..self.informed]
    }
    pub fn passive(&self) -> &[T] {
        &self.coeffs[self.informed..]
    }
    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }
}

fn check_target<T: Scalar>(ch: &ChannelRealization<T>, target: &CancellationTarget) -> Result<()> {
    let avail = ch.antennas(target.rx);
    if let Some(&bad) = target.antenna_rows.iter().find(|&&a| a >= avail) {
        return Err(Error::DimensionMismatch(format!("antenna {bad} out of range for {:?} ({avail})", target.rx)));
    }
    Ok(())
}

/// AP-ZF with a zero active bias: `t_empty = passive`, `t_star` least norm.
pub fn apzf_precoder<T: Scalar>(
    ch: &ChannelRealization<T>,
    k: usize,
    target: &CancellationTarget,
    passive: &[T],
) -> Result<PrecoderVector<T>> {
    let mut pattern = vec![T::zero(); k];
    pattern.extend_from_slice(passive);
    apzf_with_bias(ch, k, target, &pattern)
}

/// AP-ZF around a full-length constant `pattern`. The first `k` entries are a
/// bias on the informed antennas; the least-norm correction added to them
/// cancels the stream at `target`.
pub fn apzf_with_bias<T: Scalar>(
    ch: &ChannelRealization<T>,
    k: usize,
    target: &CancellationTarget,
    pattern: &[T],
) -> Result<PrecoderVector<T>> {
    let m = ch.m();
    if k > m || pattern.len() != m {
        return Err(Error::DimensionMismatch(format!("pattern of length {} for M={m}, k={k}", pattern.len())));
    }
    if target.len() > k {
        return Err(Error::CapabilityExceeded(format!(
            "{} antennas cannot be cancelled with {k} informed transmitters",
            target.len()
        )));
    }
    check_target(ch, target)?;
    let mut coeffs = pattern.to_vec();
    let mut labels = vec![CsitLabel::Constant; m];
    if !target.is_empty() {
        let rows = ch.rx_rows(target.rx, &target.antenna_rows);
        let active_cols: Vec<usize> = (0..k).collect();
        let a = rows.select_cols(&active_cols);
        let rhs: Vec<T> = rows.mul_vec(pattern).into_iter().map(|v| -v).collect();
        let delta = T::solve_min_norm(&a, &rhs)
            .ok_or_else(|| Error::ResampleRequired("active cancellation block is rank deficient".into()))?;
        for (c, d) in coeffs.iter_mut().zip(delta) {
            *c += d;
        }
        labels[..k].fill(CsitLabel::ChannelDependent);
    }
    Ok(PrecoderVector { coeffs, labels, informed: k })
}

/// Fully informed ZF: the least-norm correction of `pattern` over all `M`
/// antennas so that every row in `targets` vanishes.
pub fn zf_with_pattern<T: Scalar>(
    ch: &ChannelRealization<T>,
    targets: &[CancellationTarget],
    pattern: &[T],
) -> Result<PrecoderVector<T>> {
    let m = ch.m();
    if pattern.len() != m {
        return Err(Error::DimensionMismatch(format!("pattern of length {} for M={m}", pattern.len())));
    }
    let mut rows = Matrix::zeros(0, m);
    for t in targets {
        check_target(ch, t)?;
        rows = rows.vstack(&ch.rx_rows(t.rx, &t.antenna_rows));
    }
    if rows.rows() >= m {
        return Err(Error::CapabilityExceeded(format!("cannot null {} rows with {m} antennas", rows.rows())));
    }
    let rhs: Vec<T> = rows.mul_vec(pattern).into_iter().map(|v| -v).collect();
    let delta = T::solve_min_norm(&rows, &rhs)
        .ok_or_else(|| Error::ResampleRequired("ZF target rows are rank deficient".into()))?;
    let coeffs = pattern.iter().zip(delta).map(|(&p, d)| p + d).collect();
    let label = if rows.rows() == 0 { CsitLabel::Constant } else { CsitLabel::ChannelDependent };
    Ok(PrecoderVector { coeffs, labels: vec![label; m], informed: m })
}

/// Some nonzero vector in the null space of `targets`, found by projecting
/// unit vectors in order.
pub fn zf_precoder<T: Scalar>(ch: &ChannelRealization<T>, targets: &[CancellationTarget]) -> Result<PrecoderVector<T>> {
    let m = ch.m();
    let scale = ch.h().max_magnitude();
    for j in 0..m {
        let mut e = vec![T::zero(); m];
        e[j] = T::one();
        let mut t = zf_with_pattern(ch, targets, &e)?;
        if t.coeffs.iter().any(|c| !c.negligible(scale)) {
            t.labels = vec![CsitLabel::ChannelDependent; m];
            return Ok(t);
        }
    }
    Err(Error::ResampleRequired("target rows span the whole transmit space".into()))
}
