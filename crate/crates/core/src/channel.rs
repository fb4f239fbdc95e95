//! Channel draws, per-antenna CSIT views and the antenna-reduction rotation.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dof::SystemConfig;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::{solve_square, Matrix, Scalar};

/// Trial `index` of root seed `root`: first word of ChaCha8 seeded with `root`
/// on stream `index`.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(index);
    rng.next_u64()
}

/// Entry magnitudes uniform on `[delta_min, delta_max]` with a fair random sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelDistribution {
    delta_min: f64,
    delta_max: f64,
}

impl Default for ChannelDistribution {
    fn default() -> Self {
        ChannelDistribution { delta_min: 0.1, delta_max: 1.0 }
    }
}

impl ChannelDistribution {
    pub fn new(delta_min: f64, delta_max: f64) -> Result<Self> {
        if !(delta_min > 0.0 && delta_min <= delta_max && delta_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < delta_min <= delta_max < inf, got [{delta_min}, {delta_max}]"
            )));
        }
        Ok(ChannelDistribution { delta_min, delta_max })
    }

    pub fn delta_min(&self) -> f64 {
        self.delta_min
    }

    pub fn delta_max(&self) -> f64 {
        self.delta_max
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mag = if self.delta_min == self.delta_max {
            self.delta_min
        } else {
            rng.random_range(self.delta_min..=self.delta_max)
        };
        if rng.random::<bool>() {
            mag
        } else {
            -mag
        }
    }
}

/// Which receiver a row block or symbol belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rx {
    Rx1,
    Rx2,
}

impl Rx {
    pub fn other(self) -> Rx {
        match self {
            Rx::Rx1 => Rx::Rx2,
            Rx::Rx2 => Rx::Rx1,
        }
    }
}

/// `(N1 + N2) x M` channel; rows `0..N1` reach RX1, the rest RX2.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization<T> {
    h: Matrix<T>,
    n1: usize,
    n2: usize,
    seed: u64,
}

impl<T: Scalar> ChannelRealization<T> {
    pub fn from_matrix(h: Matrix<T>, n1: usize, n2: usize, seed: u64) -> Result<Self> {
        if h.rows() != n1 + n2 || h.cols() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "channel is {}x{}, expected {} rows",
                h.rows(),
                h.cols(),
                n1 + n2
            )));
        }
        Ok(ChannelRealization { h, n1, n2, seed })
    }

    pub fn h(&self) -> &Matrix<T> {
        &self.h
    }
    pub fn m(&self) -> usize {
        self.h.cols()
    }
    pub fn n1(&self) -> usize {
        self.n1
    }
    pub fn n2(&self) -> usize {
        self.n2
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn antennas(&self, rx: Rx) -> usize {
        match rx {
            Rx::Rx1 => self.n1,
            Rx::Rx2 => self.n2,
        }
    }

    /// Global row of receive antenna `antenna` of `rx`.
    pub fn row_index(&self, rx: Rx, antenna: usize) -> usize {
        debug_assert!(antenna < self.antennas(rx));
        match rx {
            Rx::Rx1 => antenna,
            Rx::Rx2 => self.n1 + antenna,
        }
    }

    pub fn row(&self, rx: Rx, antenna: usize) -> &[T] {
        self.h.row(self.row_index(rx, antenna))
    }

    pub fn h1(&self) -> Matrix<T> {
        self.h.block(0, 0, self.n1, self.m())
    }

    pub fn h2(&self) -> Matrix<T> {
        self.h.block(self.n1, 0, self.n2, self.m())
    }

    pub fn rx_rows(&self, rx: Rx, antennas: &[usize]) -> Matrix<T> {
        let idx: Vec<usize> = antennas.iter().map(|&a| self.row_index(rx, a)).collect();
        self.h.select_rows(&idx)
    }

    /// Keeps the first `m` transmit antennas.
    pub fn restrict_antennas(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.m() {
            return Err(Error::DimensionMismatch(format!("cannot keep {m} of {} antennas", self.m())));
        }
        let h = self.h.block(0, 0, self.h.rows(), m);
        Ok(ChannelRealization { h, n1: self.n1, n2: self.n2, seed: self.seed })
    }

    pub fn with_matrix(&self, h: Matrix<T>) -> Result<Self> {
        ChannelRealization::from_matrix(h, self.n1, self.n2, self.seed)
    }
}

pub fn sample_channel(cfg: &SystemConfig, dist: &ChannelDistribution, seed: u64) -> ChannelRealization<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = Matrix::from_fn(cfg.n(), cfg.m(), |_, _| dist.sample(&mut rng));
    ChannelRealization { h, n1: cfg.n1(), n2: cfg.n2(), seed }
}

/// Uniform nonzero residues: a generic channel for exact rank certificates.
pub fn field_channel(cfg: &SystemConfig, seed: u64) -> ChannelRealization<Fp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = Matrix::from_fn(cfg.n(), cfg.m(), |_, _| Fp::random_nonzero(&mut rng));
    ChannelRealization { h, n1: cfg.n1(), n2: cfg.n2(), seed }
}

/// `H + E` with i.i.d. `N(0, sigma0^2)` errors that do not shrink with SNR.
pub fn finite_precision_estimate(
    ch: &ChannelRealization<f64>,
    sigma0: f64,
    seed: u64,
) -> Result<ChannelRealization<f64>> {
    let noise = Normal::new(0.0, sigma0).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = Matrix::from_fn(ch.h.rows(), ch.m(), |i, j| ch.h[(i, j)] + noise.sample(&mut rng));
    ch.with_matrix(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsitKind {
    Perfect,
    FinitePrecision,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsitView {
    /// Zero-based transmit antenna.
    pub tx_index: usize,
    pub kind: CsitKind,
}

pub fn csit_views(cfg: &SystemConfig) -> Vec<CsitView> {
    (0..cfg.m())
        .map(|tx_index| CsitView {
            tx_index,
            kind: if tx_index < cfg.k() { CsitKind::Perfect } else { CsitKind::FinitePrecision },
        })
        .collect()
}

/// Where an entry of the rotation matrix comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryOrigin {
    Identity,
    Zero,
    /// Solved from `H`; handed to uninformed antennas by a genie.
    GenieChannel,
}

/// `[[I_N, r], [0, I_{M-N}]]` with `H[:N,:N] r = -H[:N, N:]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationMatrix<T> {
    r: Matrix<T>,
    n: usize,
}

impl<T: Scalar> RotationMatrix<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        &self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.r.rows()
    }

    pub fn origin(&self, i: usize, j: usize) -> EntryOrigin {
        if j >= self.n && i < self.n {
            EntryOrigin::GenieChannel
        } else if i == j {
            EntryOrigin::Identity
        } else {
            EntryOrigin::Zero
        }
    }

    /// Identity top-left and bottom-right, zero bottom-left.
    pub fn has_block_structure(&self) -> bool {
        let (m, n) = (self.m(), self.n);
        (0..m).all(|i| {
            (0..m).all(|j| match self.origin(i, j) {
                EntryOrigin::Identity => self.r[(i, j)] == T::one(),
                EntryOrigin::Zero => self.r[(i, j)] == T::zero(),
                EntryOrigin::GenieChannel => i < n && j >= n,
            })
        })
    }

    /// `R[k.., k..]`, the map applied by the uninformed antennas.
    pub fn uninformed_block(&self, k: usize) -> Matrix<T> {
        let m = self.m();
        self.r.block(k, k, m - k, m - k)
    }

    /// True when `R[k.., ..k]` vanishes, so uninformed outputs ignore the informed inputs.
    pub fn is_local(&self, k: usize) -> bool {
        (k..self.m()).all(|i| (0..k).all(|j| self.r[(i, j)] == T::zero()))
    }
}

pub fn rotation_matrix<T: Scalar>(ch: &ChannelRealization<T>) -> Result<RotationMatrix<T>> {
    let n = ch.n1 + ch.n2;
    let m = ch.m();
    if m < n {
        return Err(Error::Precondition(format!("rotation needs M >= N1+N2, got M={m}, N={n}")));
    }
    let mut r = Matrix::identity(m);
    if m == n {
        return Ok(RotationMatrix { r, n });
    }
    let lead = ch.h.block(0, 0, n, n);
    for j in n..m {
        let rhs: Vec<T> = (0..n).map(|i| -ch.h[(i, j)]).collect();
        let col = solve_square(&lead, &rhs)
            .ok_or_else(|| Error::ResampleRequired("leading N x N channel block is singular".into()))?;
        for (i, v) in col.into_iter().enumerate() {
            r[(i, j)] = v;
        }
    }
    Ok(RotationMatrix { r, n })
}

/// `R [x_star; x_empty]`. Requires `k <= N` so the uninformed outputs depend
/// only on `x_empty`.
pub fn apply_tx_rotation<T: Scalar>(rot: &RotationMatrix<T>, x_star: &[T], x_empty: &[T]) -> Result<Vec<T>> {
    let k = x_star.len();
    if k + x_empty.len() != rot.m() {
        return Err(Error::DimensionMismatch(format!(
            "transmit vector has {} entries, rotation is {}x{}",
            k + x_empty.len(),
            rot.m(),
            rot.m()
        )));
    }
    if k > rot.n {
        return Err(Error::Precondition(format!("k={k} exceeds N={}", rot.n)));
    }
    let x: Vec<T> = x_star.iter().chain(x_empty).copied().collect();
    Ok(rot.r.mul_vec(&x))
}
