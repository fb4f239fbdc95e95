//! Library behind the `dmbc` binary: region and bound tables, scheme
//! simulation and figure datasets, rendered as JSON or CSV.

pub mod args;
mod render;

use std::cmp::min;
use std::path::{Path, PathBuf};

use serde::Serialize;

use dmbc_core::channel::ChannelDistribution;
use dmbc_core::dof::{
    achievable_region_with, normalize_config, pd_sum_dof, region_constraints, scheme_split_point, sum_dof_lower,
    sum_dof_upper, DofPoint, DofRegion, NormalizedConfig, Regime, SystemConfig,
};
use dmbc_core::rational::{int, serde_str};
use dmbc_core::schemes::select_scheme;
use dmbc_core::verifier::{achieved_dof, csit_compliance, rate_slope_estimate, ComplianceReport, DofCertificate, RateSimConfig, SlopeEstimate};
use dmbc_core::Rational;

pub use render::{render, Rendered};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Certification(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<dmbc_core::Error> for CliError {
    fn from(e: dmbc_core::Error) -> Self {
        match e {
            dmbc_core::Error::ResampleExhausted { .. } => CliError::Certification(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureKind {
    Fig2,
    Fig3,
    Fig4,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Region,
    SweepK,
    SweepN2,
    Simulate,
    Figure(FigureKind),
}

impl Command {
    fn arity(self) -> Option<usize> {
        match self {
            Command::Region | Command::Simulate => Some(4),
            Command::SweepK => Some(3),
            Command::SweepN2 => Some(2),
            Command::Figure(_) => None,
        }
    }
}

/// Everything a command needs. Defaults: json, seed 1, 50 trials, entries on ±[0.1, 1].
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    /// `M N1 N2 k`, `M N1 N2` or `M k` depending on the command.
    pub values: Vec<usize>,
    pub format: Format,
    pub seed: u64,
    pub trials: usize,
    pub snr_db: Option<Vec<f64>>,
    pub special_cases: bool,
    pub certify: bool,
    pub distribution: ChannelDistribution,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command, values: Vec<usize>) -> Self {
        RunConfig {
            command,
            values,
            format: Format::Json,
            seed: 1,
            trials: 50,
            snr_db: None,
            special_cases: false,
            certify: false,
            distribution: ChannelDistribution::default(),
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(n) = self.command.arity() {
            if self.values.len() != n {
                return Err(CliError::Invalid(format!(
                    "{:?} takes {n} numbers, got {}",
                    self.command,
                    self.values.len()
                )));
            }
        }
        if self.trials == 0 {
            return Err(CliError::Invalid("--trials must be at least 1".into()));
        }
        match self.command {
            Command::Region | Command::Simulate => {
                self.normalized()?;
            }
            Command::SweepK => {
                let v = &self.values;
                normalize_config(v[0], v[1], v[2], 0)?;
            }
            Command::SweepN2 => {
                if self.values[0] == 0 || self.values[1] > self.values[0] {
                    return Err(CliError::Invalid(format!("need M >= 1 and k <= M, got M={} k={}", self.values[0], self.values[1])));
                }
            }
            Command::Figure(_) => {}
        }
        if let Some(snr) = &self.snr_db {
            self.rate_config(snr.clone())?;
        }
        Ok(())
    }

    pub fn normalized(&self) -> Result<NormalizedConfig, CliError> {
        match self.values[..] {
            [m, n1, n2, k] => Ok(normalize_config(m, n1, n2, k)?),
            _ => Err(CliError::Invalid("expected M N1 N2 k".into())),
        }
    }

    fn rate_config(&self, snr_db: Vec<f64>) -> Result<RateSimConfig, CliError> {
        let rsc = RateSimConfig { snr_db, trials: self.trials, sigma0_sq: 0.01, distribution: self.distribution };
        rsc.validate()?;
        Ok(rsc)
    }
}

/// `(M, N1, N2, k)` in the caller's receiver labelling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UserConfig {
    pub m: usize,
    pub n1: usize,
    pub n2: usize,
    pub k: usize,
}

impl UserConfig {
    fn from_normalized(nc: &NormalizedConfig) -> Self {
        let (m, a, b, k) = nc.config.tuple();
        let (n1, n2) = if nc.swapped { (b, a) } else { (a, b) };
        UserConfig { m, n1, n2, k }
    }
}

fn unswap_point(p: DofPoint, swapped: bool) -> DofPoint {
    if swapped {
        p.swapped()
    } else {
        p
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionDoc {
    pub config: UserConfig,
    /// The receivers were relabelled internally; every point below is in the caller's labels.
    pub swapped: bool,
    pub regime: Regime,
    pub region: DofRegion,
    pub achievable: Vec<DofPoint>,
    pub split_point: Option<DofPoint>,
    #[serde(with = "serde_str")]
    pub sum_dof_upper: Rational,
    #[serde(with = "serde_str")]
    pub sum_dof_lower: Rational,
}

pub fn cmd_region(rc: &RunConfig) -> Result<RegionDoc, CliError> {
    let nc = rc.normalized()?;
    let cfg = nc.config;
    let mut region = region_constraints(&cfg);
    if nc.swapped {
        region = region.swapped();
    }
    region.vertices()?;
    let mut achievable: Vec<DofPoint> = achievable_region_with(&cfg, rc.special_cases)
        .into_iter()
        .map(|p| unswap_point(p, nc.swapped))
        .collect();
    if nc.swapped {
        achievable = dmbc_core::dof::convex_hull(&achievable);
    }
    Ok(RegionDoc {
        config: UserConfig::from_normalized(&nc),
        swapped: nc.swapped,
        regime: cfg.regime(),
        region,
        achievable,
        split_point: scheme_split_point(&cfg, rc.special_cases).map(|p| unswap_point(p, nc.swapped)),
        sum_dof_upper: sum_dof_upper(&cfg),
        sum_dof_lower: sum_dof_lower(&cfg, rc.special_cases),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    K,
    N2,
}

impl SweepVariable {
    pub fn header(self) -> &'static str {
        match self {
            SweepVariable::K => "k",
            SweepVariable::N2 => "N2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: usize,
    /// Normalized configuration; absent for a receiver with no antennas.
    pub config: Option<SystemConfig>,
    pub swapped: bool,
    #[serde(with = "serde_str")]
    pub upper: Rational,
    #[serde(with = "serde_str")]
    pub lower: Rational,
    #[serde(with = "serde_str::option")]
    pub pd_reference: Option<Rational>,
    #[serde(with = "serde_str::option", skip_serializing_if = "Option::is_none")]
    pub certified: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub fixed: Vec<usize>,
    pub certified: bool,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Rows whose certified DoF differs from the lower bound.
    pub fn certification_failures(&self) -> Vec<usize> {
        if !self.certified {
            return Vec::new();
        }
        self.rows.iter().filter(|r| r.config.is_some() && r.certified != Some(r.lower)).map(|r| r.value).collect()
    }
}

fn sweep_row(value: usize, m: usize, n1: usize, n2: usize, k: usize, rc: &RunConfig) -> Result<SweepRow, CliError> {
    if n1 == 0 || n2 == 0 {
        // One receiver has no antennas: a point-to-point link of min(M, N) streams.
        let v = int(min(m, n1 + n2) as i64);
        return Ok(SweepRow { value, config: None, swapped: false, upper: v, lower: v, pd_reference: None, certified: None });
    }
    let nc = normalize_config(m, n1, n2, k)?;
    let cfg = nc.config;
    let lower = sum_dof_lower(&cfg, rc.special_cases);
    let certified = if rc.certify {
        let plan = select_scheme(&cfg, rc.special_cases)?;
        achieved_dof(&plan, rc.trials, rc.seed)?.dof
    } else {
        None
    };
    Ok(SweepRow {
        value,
        config: Some(cfg),
        swapped: nc.swapped,
        upper: sum_dof_upper(&cfg),
        lower,
        pd_reference: if m == n1 + n2 { pd_sum_dof(cfg.n1(), cfg.n2()).ok() } else { None },
        certified,
    })
}

/// `SweepK` takes `M N1 N2` and covers `k = 0..=M`; `SweepN2` takes `M k` and
/// covers `N2 = ceil(M/2)..=M` with `N1 = M - N2`.
pub fn cmd_sumdof_sweep(rc: &RunConfig, variable: SweepVariable) -> Result<SweepTable, CliError> {
    let v = &rc.values;
    let rows = match (variable, &v[..]) {
        (SweepVariable::K, &[m, n1, n2]) => (0..=m).map(|k| sweep_row(k, m, n1, n2, k, rc)).collect::<Result<_, _>>()?,
        (SweepVariable::N2, &[m, k]) => {
            if k > m {
                return Err(CliError::Invalid(format!("k={k} exceeds M={m}")));
            }
            (m.div_ceil(2)..=m).map(|n2| sweep_row(n2, m, m - n2, n2, k, rc)).collect::<Result<_, _>>()?
        }
        _ => return Err(CliError::Invalid(format!("wrong number of sweep parameters: {v:?}"))),
    };
    Ok(SweepTable { variable, fixed: v.clone(), certified: rc.certify, rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationDoc {
    pub config: UserConfig,
    pub swapped: bool,
    pub scheme: &'static str,
    /// Symbol counts in the caller's receiver labels.
    pub s1: usize,
    pub s2: usize,
    pub t: usize,
    #[serde(with = "serde_str")]
    pub claimed_dof: Rational,
    #[serde(with = "serde_str::option")]
    pub certified_dof: Option<Rational>,
    pub certificate: DofCertificate,
    pub compliance: ComplianceReport,
    pub slope: Option<SlopeEstimate>,
}

impl SimulationDoc {
    pub fn failure(&self) -> Option<String> {
        if self.certified_dof != Some(self.claimed_dof) {
            let seed = self.certificate.first_failing_seed().map_or("none".into(), |s| s.to_string());
            return Some(format!(
                "{} trials failed to decode (first failing seed {seed})",
                self.certificate.failures.len()
            ));
        }
        if !self.compliance.compliant {
            return Some(format!("{} CSIT violations", self.compliance.violations.len()));
        }
        None
    }
}

pub fn cmd_simulate(rc: &RunConfig) -> Result<SimulationDoc, CliError> {
    let nc = rc.normalized()?;
    let plan = select_scheme(&nc.config, rc.special_cases)?;
    let certificate = achieved_dof(&plan, rc.trials, rc.seed)?;
    let compliance = csit_compliance(&plan)?;
    let slope = match &rc.snr_db {
        Some(snr) => Some(rate_slope_estimate(&plan, &rc.rate_config(snr.clone())?, rc.seed)?),
        None => None,
    };
    let s = plan.summary();
    let (s1, s2) = if nc.swapped { (s.s2, s.s1) } else { (s.s1, s.s2) };
    Ok(SimulationDoc {
        config: UserConfig::from_normalized(&nc),
        swapped: nc.swapped,
        scheme: plan.scheme.id(),
        s1,
        s2,
        t: s.t,
        claimed_dof: plan.claimed_dof,
        certified_dof: certificate.dof,
        certificate,
        compliance,
        slope,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FigureFile {
    pub name: &'static str,
    pub contents: String,
}

/// fig2: sum DoF against k for (9,6,3). fig3: outer-region vertices of
/// (4,1,3,k), k = 0..=3. fig4: N2 = 10..=20 at (M, k) = (20, 12).
pub fn cmd_figure(which: FigureKind, rc: &RunConfig) -> Result<Vec<FigureFile>, CliError> {
    let kinds = match which {
        FigureKind::All => vec![FigureKind::Fig2, FigureKind::Fig3, FigureKind::Fig4],
        k => vec![k],
    };
    let mut files = Vec::new();
    for kind in kinds {
        let file = match kind {
            FigureKind::Fig2 => {
                let sub = RunConfig { values: vec![9, 6, 3], ..rc.clone() };
                FigureFile { name: "fig2.csv", contents: render::sweep_csv(&cmd_sumdof_sweep(&sub, SweepVariable::K)?)? }
            }
            FigureKind::Fig3 => {
                let mut rows = Vec::new();
                for k in 0..=3 {
                    let sub = RunConfig { values: vec![4, 1, 3, k], ..rc.clone() };
                    rows.push((k, cmd_region(&sub)?.region.vertices()?.to_vec()));
                }
                FigureFile { name: "fig3.csv", contents: render::vertices_csv(&rows)? }
            }
            FigureKind::Fig4 => {
                let sub = RunConfig { values: vec![20, 12], ..rc.clone() };
                let mut table = cmd_sumdof_sweep(&sub, SweepVariable::N2)?;
                table.rows.retain(|r| r.value >= 10);
                FigureFile { name: "fig4.csv", contents: render::sweep_csv(&table)? }
            }
            FigureKind::All => unreachable!(),
        };
        files.push(file);
    }
    Ok(files)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Runs one command. Output goes to `--out` (a directory for `figure`) or is
/// returned for stdout. A certification failure still produces the document.
pub fn run(rc: &RunConfig) -> Result<Rendered, CliError> {
    let mut out = render(rc)?;
    match (rc.command, &rc.out) {
        (Command::Figure(_), dir) => {
            let dir = dir.clone().unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
            let mut listing = String::new();
            for f in &out.files {
                let p = dir.join(f.name);
                write_file(&p, &f.contents)?;
                listing.push_str(&format!("{}\n", p.display()));
            }
            out.text = listing;
        }
        (_, Some(path)) => {
            write_file(path, &out.text)?;
            out.text.clear();
        }
        (_, None) => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dmbc_core::rational::frac;

    fn rc(command: Command, values: &[usize]) -> RunConfig {
        RunConfig::new(command, values.to_vec())
    }

    #[test]
    fn swapped_region_is_reported_in_caller_labels() {
        let doc = cmd_region(&rc(Command::Region, &[4, 3, 1, 2])).unwrap();
        assert!(doc.swapped);
        assert_eq!((doc.config.n1, doc.config.n2), (3, 1));
        let vs = doc.region.vertices().unwrap();
        assert!(vs.contains(&DofPoint::new(frac(5, 2), int(1))));
        assert!(vs.contains(&DofPoint::ints(3, 0)));
        assert_eq!(doc.split_point, Some(DofPoint::new(frac(5, 2), int(1))));
        assert!(doc.achievable.iter().all(|p| doc.region.contains(p)));
    }

    #[test]
    fn arity_is_checked() {
        assert!(rc(Command::Region, &[4, 1, 3]).validate().is_err());
        assert!(rc(Command::SweepN2, &[20, 12]).validate().is_ok());
        assert!(rc(Command::SweepN2, &[20, 21]).validate().is_err());
        assert!(rc(Command::SweepK, &[9, 0, 3]).validate().is_err());
        let mut bad = rc(Command::Simulate, &[4, 1, 3, 2]);
        bad.snr_db = Some(vec![10.0]);
        assert_eq!(bad.validate().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn sweep_ranges() {
        let t = cmd_sumdof_sweep(&rc(Command::SweepK, &[9, 6, 3]), SweepVariable::K).unwrap();
        assert_eq!(t.rows.len(), 10);
        assert!(t.rows.iter().all(|r| r.swapped && r.pd_reference == Some(int(7))));
        let t = cmd_sumdof_sweep(&rc(Command::SweepN2, &[7, 2]), SweepVariable::N2).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.value).collect::<Vec<_>>(), vec![4, 5, 6, 7]);
        assert_eq!(t.rows[3].config, None);
        assert_eq!(t.rows[3].upper, int(7));
    }

    #[test]
    fn certified_sweep_has_no_failures() {
        let mut r = rc(Command::SweepK, &[6, 3, 3]);
        r.certify = true;
        r.special_cases = true;
        r.trials = 3;
        let t = cmd_sumdof_sweep(&r, SweepVariable::K).unwrap();
        assert!(t.certification_failures().is_empty());
        assert_eq!(t.rows[1].certified, Some(int(4)));
    }

    #[test]
    fn simulation_failure_message() {
        let mut doc = cmd_simulate(&rc(Command::Simulate, &[4, 1, 3, 2])).unwrap();
        assert_eq!(doc.failure(), None);
        doc.certified_dof = None;
        assert!(doc.failure().unwrap().contains("failed to decode"));
    }

    #[test]
    fn core_errors_map_to_exit_codes() {
        let e: CliError = dmbc_core::Error::ResampleExhausted { seed: 1, attempts: 8 }.into();
        assert_eq!(e.exit_code(), 3);
        let e: CliError = dmbc_core::Error::InvalidConfig("x".into()).into();
        assert_eq!(e.exit_code(), 2);
    }
}
