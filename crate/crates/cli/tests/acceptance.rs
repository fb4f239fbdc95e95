//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::cmp::min;
use std::time::{Duration, Instant};

use dmbc_cli::{cmd_figure, Command, FigureKind, RunConfig};
use dmbc_core::channel::{field_channel, rotation_matrix, sample_channel, ChannelDistribution, Rx};
use dmbc_core::dof::*;
use dmbc_core::precoding::CancellationTarget;
use dmbc_core::rational::{frac, int, parse, to_string};
use dmbc_core::schemes::*;
use dmbc_core::verifier::*;
use dmbc_core::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRIALS: usize = 50;
const TABLE1_TRIALS: usize = 100;
const SLOPE_TOL: f64 = 0.15;
const ROTATION_TOL: f64 = 1e-10;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn cfg(m: usize, n1: usize, n2: usize, k: usize) -> SystemConfig {
    SystemConfig::new(m, n1, n2, k).unwrap()
}

fn pts(v: &[(i64, i64, i64, i64)]) -> Vec<DofPoint> {
    v.iter().map(|&(a, b, c, d)| DofPoint::new(frac(a, b), frac(c, d))).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Vertices by intersecting every pair of boundary lines (axes included) and
/// keeping the feasible ones.
fn brute_vertices(region: &DofRegion) -> Vec<DofPoint> {
    let mut lines: Vec<(Rational, Rational, Rational)> = region.constraints().iter().map(|c| (c.a1, c.a2, c.b)).collect();
    lines.push((int(-1), int(0), int(0)));
    lines.push((int(0), int(-1), int(0)));
    let mut out = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a, b, e) = lines[i];
            let (c, d, f) = lines[j];
            let det = a * d - b * c;
            if det == int(0) {
                continue;
            }
            let p = DofPoint::new((e * d - b * f) / det, (a * f - e * c) / det);
            let feasible = lines.iter().all(|&(x, y, z)| x * p.d1 + y * p.d2 <= z);
            if feasible && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

fn c1_region() -> Outcome {
    // The k = 1 corner follows from 2 d1 + 3 d2 <= 9 at d1 = 1.
    let expected = [
        pts(&[(0, 1, 0, 1), (1, 1, 0, 1), (1, 1, 9, 4), (0, 1, 3, 1)]),
        pts(&[(0, 1, 0, 1), (1, 1, 0, 1), (1, 1, 7, 3), (0, 1, 3, 1)]),
        pts(&[(0, 1, 0, 1), (1, 1, 0, 1), (1, 1, 5, 2), (0, 1, 3, 1)]),
        pts(&[(0, 1, 0, 1), (1, 1, 0, 1), (1, 1, 3, 1), (0, 1, 3, 1)]),
    ];
    for (k, want) in expected.iter().enumerate() {
        let region = region_constraints(&cfg(4, 1, 3, k));
        let got = region_vertices(&region).map_err(|e| e.to_string())?;
        ensure(&got == want, || format!("k={k}: got {got:?}"))?;
        let mut sorted = want.clone();
        sorted.sort();
        ensure(brute_vertices(&region) == sorted, || format!("k={k}: pairwise oracle disagrees"))?;
    }
    Ok("4 vertex lists exact, pairwise-intersection oracle agrees".into())
}

fn c2_bounds() -> Outcome {
    let upper = ["7", "57/8", "51/7", "15/2", "39/5", "33/4", "9", "9", "9", "9"];
    let lower = ["6", "37/6", "20/3", "15/2", "39/5", "33/4", "9", "9", "9", "9"];
    for k in 0..=9 {
        let c = cfg(9, 3, 6, k);
        let (u, l) = (sum_dof_upper(&c), sum_dof_lower(&c, false));
        ensure(u == parse(upper[k]).unwrap() && l == parse(lower[k]).unwrap(), || {
            format!("k={k}: upper {} lower {}", to_string(&u), to_string(&l))
        })?;
    }
    Ok("10 upper and 10 lower values exact".into())
}

fn c3_tightness() -> Outcome {
    let mut n = 0;
    for m in 1..=10 {
        for n2 in 1..m {
            for n1 in 1..=n2 {
                if m > n1 + n2 {
                    continue;
                }
                for k in n1..n2 {
                    let c = cfg(m, n1, n2, k);
                    let plan = select_scheme(&c, false).map_err(|e| format!("{c}: {e}"))?;
                    let cert = achieved_dof(&plan, TRIALS, 1).map_err(|e| format!("{c}: {e}"))?;
                    ensure(cert.failures.is_empty() && cert.dof == Some(sum_dof_upper(&c)), || {
                        format!("{c}: certified {:?}, {} failures", cert.dof.map(|d| to_string(&d)), cert.failures.len())
                    })?;
                    n += 1;
                }
            }
        }
    }
    Ok(format!("{n} configs certify the upper bound over {TRIALS} trials"))
}

fn c4_low_k() -> Outcome {
    let (mut n, mut bad, mut beyond_m) = (0, Vec::new(), 0);
    for m in 1..=10 {
        for n2 in 1..=10 {
            for n1 in 1..=n2 {
                for k in 1..min(n1, m + 1) {
                    let c = cfg(m, n1, n2, k);
                    n += 1;
                    let w = min(n2, m - k);
                    let base = int(min(n2, m) as i64);
                    let formula = if w == 0 { None } else { Some(int(w as i64) + frac((k * k) as i64, w as i64)) };
                    let (target, plan) = match formula {
                        Some(v) if v > base => (v, build_scheme_low_k(&c)),
                        _ => (base, build_rx2_only(&c)),
                    };
                    let certified = plan.and_then(|p| achieved_dof(&p, TRIALS, 1)).ok().and_then(|cert| cert.dof);
                    if certified != Some(target) {
                        bad.push(format!("{c}->{}", to_string(&target)));
                        if target > int(m as i64) {
                            beyond_m += 1;
                        }
                    }
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{n} configs certified"))
    } else {
        let shown: Vec<_> = bad.iter().take(4).cloned().collect();
        Err(format!(
            "{} of {n} configs not certified; {beyond_m} of them have a target above M (e.g. {})",
            bad.len(),
            shown.join(", ")
        ))
    }
}

fn c5_table1() -> Outcome {
    let plan = build_scheme_6331().map_err(|e| e.to_string())?;
    let cert = achieved_dof(&plan, TABLE1_TRIALS, 1).map_err(|e| e.to_string())?;
    ensure(cert.dof == Some(int(4)) && cert.failures.is_empty(), || format!("certified {:?}", cert.dof))?;
    let sys = realize_plan::<dmbc_core::field::Fp>(&plan, &field_channel(&plan.cfg, 7)).map_err(|e| e.to_string())?;
    for (slot, rx, name) in [(1, Rx::Rx1, "c"), (2, Rx::Rx2, "d")] {
        let heard: Vec<usize> = (0..plan.slots[slot].streams.len())
            .filter(|&i| !sys.stream_gain(slot, i, rx, 2).is_zero())
            .collect();
        ensure(heard.len() == 1, || format!("{} streams heard at {rx:?} antenna 3, slot {}", heard.len(), slot + 1))?;
        let st = &plan.slots[slot].streams[heard[0]];
        ensure(matches!(st.payload, Payload::Retransmission { .. }), || format!("{name} is not the stream heard"))?;
    }
    Ok(format!("DoF 4 over {TABLE1_TRIALS} channels, c and d isolated"))
}

fn random_wide_config(rng: &mut ChaCha8Rng) -> SystemConfig {
    loop {
        let a = rng.random_range(1..=6);
        let b = rng.random_range(1..=10);
        let (n1, n2) = (min(a, b), a.max(b));
        if n1 + n2 >= 12 {
            continue;
        }
        let m = rng.random_range(n1 + n2 + 1..=12);
        let k = rng.random_range(0..=m);
        return cfg(m, n1, n2, k);
    }
}

fn c6_rotation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let dist = ChannelDistribution::default();
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let c = random_wide_config(&mut rng);
        let n = c.n();
        let ch = sample_channel(&c, &dist, i);
        let rot = rotation_matrix(&ch).map_err(|e| format!("{c}: {e}"))?;
        ensure(rot.has_block_structure() && rot.is_local(n), || format!("{c}: block structure"))?;
        let hr = ch.h().mul(rot.matrix());
        let ratio = hr.block(0, n, n, c.m() - n).inf_norm() / ch.h().inf_norm();
        worst = worst.max(ratio);
        ensure(ratio <= ROTATION_TOL, || format!("{c}: residual ratio {ratio:e}"))?;
        ensure(hr.block(0, 0, n, n) == ch.h().block(0, 0, n, n), || format!("{c}: leading block changed"))?;

        let square = cfg(n, c.n1(), c.n2(), min(c.k(), n));
        ensure(sum_dof_upper(&c) == sum_dof_upper(&square), || format!("{c}: upper bound differs from {square}"))?;
        let plan = select_scheme(&c, false).map_err(|e| format!("{c}: {e}"))?;
        let cert = achieved_dof(&plan, 10, i).map_err(|e| format!("{c}: {e}"))?;
        let want = sum_dof_lower(&square, false);
        ensure(cert.dof == Some(want) && want == sum_dof_lower(&c, false), || {
            format!("{c}: certified {:?}, square bound {}", cert.dof.map(|d| to_string(&d)), to_string(&want))
        })?;
        if c.k() >= c.n1() {
            ensure(cert.dof == Some(sum_dof_upper(&c)), || format!("{c}: not tight"))?;
        }
    }
    Ok(format!("100 configs, worst residual ratio {worst:.1e}"))
}

fn c7_compliance() -> Outcome {
    let mut n = 0;
    for m in 1..=10 {
        for n2 in 1..=10 {
            for n1 in 1..=n2 {
                for k in 0..=m {
                    for special in [false, true] {
                        let c = cfg(m, n1, n2, k);
                        if special && !is_table1_config(&c) {
                            continue;
                        }
                        let plan = select_scheme(&c, special).map_err(|e| format!("{c}: {e}"))?;
                        let rep = csit_compliance(&plan).map_err(|e| format!("{c}: {e}"))?;
                        ensure(rep.compliant, || format!("{c}: {} violations", rep.violations.len()))?;
                        n += 1;
                    }
                }
            }
        }
    }
    let mut plan = build_scheme_mid_k(&cfg(4, 1, 3, 2)).map_err(|e| e.to_string())?;
    let st = &mut plan.slots[0].streams[0];
    st.precoder = PrecoderRecipe::Zf {
        pattern: st.precoder.pattern().to_vec(),
        targets: vec![CancellationTarget::new(Rx::Rx2, [0, 1])],
    };
    let rep = csit_compliance(&plan).map_err(|e| e.to_string())?;
    ensure(!rep.compliant && rep.violations.iter().any(|v| v.kind == ViolationKind::VariesWithChannel), || {
        "adversarial plan not flagged".into()
    })?;
    Ok(format!("{n} built-in plans compliant, adversarial plan flagged"))
}

fn c8_slopes() -> Outcome {
    let rsc = RateSimConfig::new(vec![40.0, 60.0, 80.0], 100).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for ((m, n1, n2, k), target) in [((4, 1, 3, 2), 3.5), ((4, 1, 3, 3), 4.0), ((5, 2, 3, 0), 3.0)] {
        let c = cfg(m, n1, n2, k);
        let start = Instant::now();
        let plan = select_scheme(&c, false).map_err(|e| e.to_string())?;
        let est = rate_slope_estimate(&plan, &rsc, 1).map_err(|e| e.to_string())?;
        ensure(start.elapsed() < Duration::from_secs(60), || format!("{c}: too slow"))?;
        ensure((est.slope - target).abs() <= SLOPE_TOL, || format!("{c}: slope {:.3} vs {target}", est.slope))?;
        parts.push(format!("{c} {:.3}", est.slope));
    }
    Ok(parts.join(", "))
}

fn c9_analogy() -> Outcome {
    let pd = pd_sum_dof(1, 3).map_err(|e| e.to_string())?;
    let gap = analogy_gap(&cfg(4, 1, 3, 2)).map_err(|e| e.to_string())?;
    ensure(pd == frac(13, 4) && gap == (frac(3, 4), frac(1, 2)), || {
        format!("pd {} gap ({}, {})", to_string(&pd), to_string(&gap.0), to_string(&gap.1))
    })?;
    Ok("pd(1,3) = 13/4, gap = (3/4, 1/2)".into())
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn c10_figures() -> Outcome {
    let rc = RunConfig::new(Command::Figure(FigureKind::All), Vec::new());
    let files = cmd_figure(FigureKind::All, &rc).map_err(|e| e.to_string())?;
    let get = |name: &str| files.iter().find(|f| f.name == name).map(|f| csv_rows(&f.contents)).ok_or(format!("{name} missing"));

    let fig2 = get("fig2.csv")?;
    ensure(fig2.len() == 10, || "fig2 row count".into())?;
    for (k, row) in fig2.iter().enumerate() {
        let c = cfg(9, 3, 6, k);
        ensure(parse(&row[1]) == Some(sum_dof_upper(&c)) && parse(&row[2]) == Some(sum_dof_lower(&c, false)), || {
            format!("fig2 k={k}: {row:?}")
        })?;
    }

    let fig3 = get("fig3.csv")?;
    for k in 0..=3usize {
        let want = region_constraints(&cfg(4, 1, 3, k)).vertices().unwrap().to_vec();
        let got: Vec<DofPoint> = fig3
            .iter()
            .filter(|r| r[0] == k.to_string())
            .map(|r| DofPoint::new(parse(&r[2]).unwrap(), parse(&r[3]).unwrap()))
            .collect();
        ensure(got == want, || format!("fig3 k={k}: {got:?}"))?;
    }

    let fig4 = get("fig4.csv")?;
    ensure(fig4.len() == 11, || "fig4 row count".into())?;
    for row in &fig4 {
        let n2: i64 = row[0].parse().map_err(|_| "fig4 N2".to_string())?;
        let want = if n2 <= 12 { int(20) } else { int(n2) + frac((20 - n2) * (20 - n2), 8) };
        ensure(parse(&row[1]) == Some(want) && parse(&row[2]) == Some(want), || format!("fig4 N2={n2}: {row:?}"))?;
        let dec: f64 = row[3].parse().map_err(|_| "fig4 decimal".to_string())?;
        ensure((dec - dmbc_core::rational::to_f64(&want)).abs() < 1e-11, || format!("fig4 N2={n2}: decimal {dec}"))?;
    }
    let at12 = int(12) + frac(64, 8);
    ensure(at12 == int(20), || "fig4 discontinuous at N2 = 12".into())?;
    Ok("fig2, fig3 and fig4 match the formulas".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("region vertices for (4,1,3,k)", Duration::from_secs(1), c1_region),
        ("bound table for (9,3,6,k)", Duration::from_secs(1), c2_bounds),
        ("end-to-end tightness, N1 <= k < N2", Duration::from_secs(120), c3_tightness),
        ("retransmission scheme, 1 <= k < N1", Duration::from_secs(120), c4_low_k),
        ("(6,3,3,1) construction", Duration::from_secs(10), c5_table1),
        ("rotation for M > N1 + N2", Duration::from_secs(30), c6_rotation),
        ("CSIT compliance", Duration::from_secs(10), c7_compliance),
        ("Monte Carlo slopes", Duration::from_secs(180), c8_slopes),
        ("perfect/delayed benchmark comparison", Duration::from_secs(1), c9_analogy),
        ("figure datasets", Duration::from_secs(10), c10_figures),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > *budget => Err(format!("{msg}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({elapsed:.2?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
