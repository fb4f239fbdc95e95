//! Exact DoF regions and sum-DoF bounds.

use std::cmp::{max, min};
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{frac, int, serde_str, Rational};

/// `(M, N1, N2, k)` with `N1 <= N2`. Build through [`normalize_config`] or
/// [`SystemConfig::new`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct SystemConfig {
    m: usize,
    n1: usize,
    n2: usize,
    k: usize,
}

#[derive(Deserialize)]
struct RawConfig {
    m: usize,
    n1: usize,
    n2: usize,
    k: usize,
}

impl TryFrom<RawConfig> for SystemConfig {
    type Error = Error;
    fn try_from(r: RawConfig) -> Result<Self> {
        SystemConfig::new(r.m, r.n1, r.n2, r.k)
    }
}

/// Broad operating regime; decides which bound formula and scheme apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `M <= N2`: serving RX2 alone is optimal.
    FewAntennas,
    /// `k >= N2` with `M > N2`.
    Informed,
    /// `N1 <= k < N2` with `M > N2`.
    Mid,
    /// `1 <= k < N1` with `M > N2`.
    Low,
    /// `k = 0` with `M > N2`.
    Uninformed,
}

impl SystemConfig {
    pub fn new(m: usize, n1: usize, n2: usize, k: usize) -> Result<Self> {
        check_counts(m, n1, n2, k)?;
        if n1 > n2 {
            return Err(Error::InvalidConfig(format!("expected N1 <= N2, got N1={n1}, N2={n2}")));
        }
        Ok(SystemConfig { m, n1, n2, k })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n1(&self) -> usize {
        self.n1
    }
    pub fn n2(&self) -> usize {
        self.n2
    }
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tuple(&self) -> (usize, usize, usize, usize) {
        (self.m, self.n1, self.n2, self.k)
    }

    /// Receive dimension `N1 + N2`.
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// Antennas beyond `N1 + N2` add nothing; schemes drive only the first `m_eff`.
    pub fn m_eff(&self) -> usize {
        min(self.m, self.n())
    }

    pub fn k_eff(&self) -> usize {
        min(self.k, self.m_eff())
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        SystemConfig::new(self.m, self.n1, self.n2, k)
    }

    pub fn regime(&self) -> Regime {
        if self.m <= self.n2 {
            Regime::FewAntennas
        } else if self.k >= self.n2 {
            Regime::Informed
        } else if self.k >= self.n1 {
            Regime::Mid
        } else if self.k >= 1 {
            Regime::Low
        } else {
            Regime::Uninformed
        }
    }
}

impl std::fmt::Display for SystemConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{})", self.m, self.n1, self.n2, self.k)
    }
}

fn check_counts(m: usize, n1: usize, n2: usize, k: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidConfig("M must be at least 1".into()));
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidConfig("each receiver needs at least one antenna".into()));
    }
    if k > m {
        return Err(Error::InvalidConfig(format!("k={k} exceeds M={m}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedConfig {
    pub config: SystemConfig,
    /// The receivers were relabelled to put the smaller one first.
    pub swapped: bool,
}

pub fn normalize_config(m: usize, n1: usize, n2: usize, k: usize) -> Result<NormalizedConfig> {
    check_counts(m, n1, n2, k)?;
    let swapped = n1 > n2;
    let (a, b) = if swapped { (n2, n1) } else { (n1, n2) };
    Ok(NormalizedConfig { config: SystemConfig { m, n1: a, n2: b, k }, swapped })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DofPoint {
    #[serde(with = "serde_str")]
    pub d1: Rational,
    #[serde(with = "serde_str")]
    pub d2: Rational,
}

impl DofPoint {
    pub fn new(d1: Rational, d2: Rational) -> Self {
        DofPoint { d1, d2 }
    }

    pub fn ints(d1: i64, d2: i64) -> Self {
        DofPoint { d1: int(d1), d2: int(d2) }
    }

    pub fn sum(&self) -> Rational {
        self.d1 + self.d2
    }

    pub fn swapped(&self) -> Self {
        DofPoint { d1: self.d2, d2: self.d1 }
    }
}

/// `a1 d1 + a2 d2 <= b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LinearConstraint {
    #[serde(with = "serde_str")]
    pub a1: Rational,
    #[serde(with = "serde_str")]
    pub a2: Rational,
    #[serde(with = "serde_str")]
    pub b: Rational,
}

impl<'de> Deserialize<'de> for LinearConstraint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(with = "serde_str")]
            a1: Rational,
            #[serde(with = "serde_str")]
            a2: Rational,
            #[serde(with = "serde_str")]
            b: Rational,
        }
        let r = Raw::deserialize(d)?;
        LinearConstraint::new(r.a1, r.a2, r.b).map_err(serde::de::Error::custom)
    }
}

impl LinearConstraint {
    pub fn new(a1: Rational, a2: Rational, b: Rational) -> Result<Self> {
        if a1 == int(0) && a2 == int(0) {
            return Err(Error::InvalidConfig("constraint with zero normal".into()));
        }
        Ok(LinearConstraint { a1, a2, b })
    }

    pub fn ints(a1: i64, a2: i64, b: i64) -> Self {
        LinearConstraint { a1: int(a1), a2: int(a2), b: int(b) }
    }

    pub fn lhs(&self, p: &DofPoint) -> Rational {
        self.a1 * p.d1 + self.a2 * p.d2
    }

    pub fn satisfied_by(&self, p: &DofPoint) -> bool {
        self.lhs(p) <= self.b
    }

    pub fn tight_at(&self, p: &DofPoint) -> bool {
        self.lhs(p) == self.b
    }

    pub fn swapped(&self) -> Self {
        LinearConstraint { a1: self.a2, a2: self.a1, b: self.b }
    }
}

/// Polygon `{d >= 0} ∩ constraints`. Vertices are computed on first use.
#[derive(Debug, Default)]
pub struct DofRegion {
    constraints: Vec<LinearConstraint>,
    vertices: OnceLock<Result<Vec<DofPoint>>>,
}

impl Clone for DofRegion {
    fn clone(&self) -> Self {
        DofRegion::new(self.constraints.clone())
    }
}

impl PartialEq for DofRegion {
    fn eq(&self, other: &Self) -> bool {
        self.constraints == other.constraints
    }
}

impl DofRegion {
    pub fn new(constraints: Vec<LinearConstraint>) -> Self {
        DofRegion { constraints, vertices: OnceLock::new() }
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn vertices(&self) -> Result<&[DofPoint]> {
        self.vertices
            .get_or_init(|| clip_vertices(&self.constraints))
            .as_deref()
            .map_err(Clone::clone)
    }

    pub fn contains(&self, p: &DofPoint) -> bool {
        p.d1 >= int(0) && p.d2 >= int(0) && self.constraints.iter().all(|c| c.satisfied_by(p))
    }

    /// Exchanges the roles of `d1` and `d2`.
    pub fn swapped(&self) -> Self {
        DofRegion::new(self.constraints.iter().map(LinearConstraint::swapped).collect())
    }

    pub fn max_sum(&self) -> Result<Rational> {
        Ok(self.vertices()?.iter().map(DofPoint::sum).max().unwrap_or(int(0)))
    }
}

#[derive(Serialize, Deserialize)]
struct RegionDoc {
    constraints: Vec<LinearConstraint>,
    #[serde(default)]
    vertices: Vec<DofPoint>,
}

impl Serialize for DofRegion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let vertices = self.vertices().map(<[_]>::to_vec).unwrap_or_default();
        RegionDoc { constraints: self.constraints.clone(), vertices }.serialize(s)
    }
}

// Vertices in the document are advisory; they are recomputed from the constraints.
impl<'de> Deserialize<'de> for DofRegion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = RegionDoc::deserialize(d)?;
        Ok(DofRegion::new(doc.constraints))
    }
}

/// Outer bound on the DoF region.
pub fn region_constraints(cfg: &SystemConfig) -> DofRegion {
    let (m, n1, n2, k) = cfg.tuple();
    let mut cs = vec![
        LinearConstraint::ints(1, 0, min(m, n1) as i64),
        LinearConstraint::ints(0, 1, min(m, n2) as i64),
        LinearConstraint::ints(1, 1, cfg.m_eff() as i64),
    ];
    if k < n2 && m > n2 {
        let a = (min(n2, m) - k) as i64;
        let c = (cfg.m_eff() - k) as i64;
        cs.push(LinearConstraint::ints(a, c, c * a + k as i64 * c));
    }
    DofRegion::new(cs)
}

pub fn region_vertices(region: &DofRegion) -> Result<Vec<DofPoint>> {
    region.vertices().map(<[_]>::to_vec)
}

pub fn sum_dof_upper(cfg: &SystemConfig) -> Rational {
    let (m, n1, n2, k) = cfg.tuple();
    let cap = int(cfg.m_eff() as i64);
    if k < n2 && m > n2 {
        let third = int(n2 as i64) + frac((n1 * min(n1, m - n2)) as i64, (cfg.m_eff() - k) as i64);
        min(cap, third)
    } else {
        cap
    }
}

/// Value of the retransmission scheme with `k` informed antennas, when it exists.
pub fn low_k_value(cfg: &SystemConfig, k: usize) -> Option<Rational> {
    let m = low_k_width(cfg, k)?;
    Some(int(m as i64) + frac((k * k) as i64, m as i64))
}

/// `min(N2, M - k)`, defined only when the phase-2 length `m - k` is nonnegative.
pub fn low_k_width(cfg: &SystemConfig, k: usize) -> Option<usize> {
    if k == 0 || k > cfg.m_eff() {
        return None;
    }
    let m = min(cfg.n2(), cfg.m_eff() - k);
    (m >= k).then_some(m)
}

/// Best informed-antenna count `k' <= k` for the retransmission scheme, if it
/// beats serving RX2 alone.
pub fn best_low_k(cfg: &SystemConfig) -> Option<(usize, Rational)> {
    let base = int(min(cfg.n2(), cfg.m()) as i64);
    (1..=min(cfg.k(), cfg.n1().saturating_sub(1)))
        .filter_map(|kp| low_k_value(cfg, kp).map(|v| (kp, v)))
        .filter(|&(_, v)| v > base)
        .fold(None, |best: Option<(usize, Rational)>, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        })
}

pub fn is_table1_config(cfg: &SystemConfig) -> bool {
    cfg.tuple() == (6, 3, 3, 1)
}

pub fn sum_dof_lower(cfg: &SystemConfig, allow_special_cases: bool) -> Rational {
    if allow_special_cases && is_table1_config(cfg) {
        return int(4);
    }
    let (m, n1, n2, k) = cfg.tuple();
    let cap = int(cfg.m_eff() as i64);
    match cfg.regime() {
        Regime::FewAntennas | Regime::Informed => cap,
        Regime::Mid => {
            let v = int(n2 as i64) + frac((n1 * min(n1, m - n2)) as i64, (cfg.m_eff() - k) as i64);
            min(cap, v)
        }
        Regime::Low | Regime::Uninformed => {
            let base = int(min(n2, m) as i64);
            best_low_k(cfg).map_or(base, |(_, v)| max(base, v))
        }
    }
}

/// Per-user DoF delivered by the sum-optimal built-in scheme, when it serves both users.
pub fn scheme_split_point(cfg: &SystemConfig, allow_special_cases: bool) -> Option<DofPoint> {
    if allow_special_cases && is_table1_config(cfg) {
        return Some(DofPoint::ints(2, 2));
    }
    let (_, n1, n2, k) = cfg.tuple();
    let me = cfg.m_eff();
    match cfg.regime() {
        Regime::FewAntennas | Regime::Uninformed => None,
        Regime::Informed => Some(DofPoint::ints(n1 as i64, (me - n1) as i64)),
        Regime::Mid if me - k >= n1 => {
            let t = (me - k) as i64;
            let s2 = (n2 * (me - k - n1) + k * n1) as i64;
            Some(DofPoint::new(int(n1 as i64), frac(s2, t)))
        }
        Regime::Mid => Some(DofPoint::ints(n1 as i64, (me - n1) as i64)),
        Regime::Low => {
            let (kp, _) = best_low_k(cfg)?;
            let m = low_k_width(cfg, kp)? as i64;
            let kp = kp as i64;
            Some(DofPoint::new(int(kp), frac(kp * kp + m * (m - kp), m)))
        }
    }
}

/// Time-sharing hull of the single-user corners and the scheme split point.
pub fn achievable_region(cfg: &SystemConfig) -> Vec<DofPoint> {
    achievable_region_with(cfg, false)
}

pub fn achievable_region_with(cfg: &SystemConfig, allow_special_cases: bool) -> Vec<DofPoint> {
    let (m, n1, n2, _) = cfg.tuple();
    let mut pts = vec![
        DofPoint::ints(0, 0),
        DofPoint::ints(min(m, n1) as i64, 0),
        DofPoint::ints(0, min(m, n2) as i64),
    ];
    pts.extend(scheme_split_point(cfg, allow_special_cases));
    convex_hull(&pts)
}

/// Sum DoF of the centralized benchmark with `M = N1 + N2`.
pub fn pd_sum_dof(n1: usize, n2: usize) -> Result<Rational> {
    if n1 == 0 || n1 > n2 {
        return Err(Error::Precondition(format!("need 1 <= N1 <= N2, got ({n1},{n2})")));
    }
    let (a, b) = (n1 as i64, n2 as i64);
    Ok(int(a + b) - frac(a * b, a + b))
}

/// `(benchmark loss, loss with k informed antennas)` relative to `N1 + N2`.
pub fn analogy_gap(cfg: &SystemConfig) -> Result<(Rational, Rational)> {
    let (m, n1, n2, k) = cfg.tuple();
    if m != n1 + n2 || k < n1 || k >= n2 {
        return Err(Error::Precondition(format!("need M = N1+N2 and N1 <= k < N2, got {cfg}")));
    }
    let (a, b, k) = (n1 as i64, n2 as i64, k as i64);
    Ok((frac(b * a, a + b), frac((b - k) * a, a + b - k)))
}

fn cross(o: &DofPoint, a: &DofPoint, b: &DofPoint) -> Rational {
    (a.d1 - o.d1) * (b.d2 - o.d2) - (a.d2 - o.d2) * (b.d1 - o.d1)
}

/// Strict convex hull, counterclockwise from the lowest-then-leftmost point.
pub fn convex_hull(points: &[DofPoint]) -> Vec<DofPoint> {
    let mut pts: Vec<DofPoint> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<DofPoint> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &DofPoint>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for p in iter {
            while hull.len() >= start + 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= int(0) {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    rotate_to_start(hull)
}

fn rotate_to_start(mut poly: Vec<DofPoint>) -> Vec<DofPoint> {
    if let Some(i) = (0..poly.len()).min_by(|&a, &b| (poly[a].d2, poly[a].d1).cmp(&(poly[b].d2, poly[b].d1))) {
        poly.rotate_left(i);
    }
    poly
}

// Far enough out that any real DoF bound sits well inside.
const BOX: i64 = 1 << 20;

fn clip_vertices(constraints: &[LinearConstraint]) -> Result<Vec<DofPoint>> {
    let mut poly =
        vec![DofPoint::ints(0, 0), DofPoint::ints(BOX, 0), DofPoint::ints(BOX, BOX), DofPoint::ints(0, BOX)];
    for c in constraints {
        poly = clip(&poly, c);
        if poly.is_empty() {
            return Err(Error::EmptyRegion);
        }
    }
    let poly = simplify(poly);
    if poly.iter().any(|p| p.d1 >= int(BOX) || p.d2 >= int(BOX)) {
        return Err(Error::UnboundedRegion);
    }
    Ok(rotate_to_start(poly))
}

fn clip(poly: &[DofPoint], c: &LinearConstraint) -> Vec<DofPoint> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (fp, fq) = (c.lhs(&p) - c.b, c.lhs(&q) - c.b);
        let zero = int(0);
        if fp <= zero {
            out.push(p);
        }
        if (fp < zero && fq > zero) || (fp > zero && fq < zero) {
            let t = fp / (fp - fq);
            out.push(DofPoint::new(p.d1 + t * (q.d1 - p.d1), p.d2 + t * (q.d2 - p.d2)));
        }
    }
    out
}

fn simplify(mut poly: Vec<DofPoint>) -> Vec<DofPoint> {
    poly.dedup();
    while poly.len() > 1 && poly.first() == poly.last() {
        poly.pop();
    }
    loop {
        let n = poly.len();
        if n < 3 {
            return poly;
        }
        let drop = (0..n).find(|&i| cross(&poly[(i + n - 1) % n], &poly[i], &poly[(i + 1) % n]) == int(0));
        match drop {
            Some(i) => {
                poly.remove(i);
            }
            None => return poly,
        }
    }
}
