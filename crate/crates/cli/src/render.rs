use dmbc_core::dof::DofPoint;
use dmbc_core::rational::{to_decimal, to_string};
use dmbc_core::Rational;

use crate::*;

/// Rendered command output plus any certification failure it reports.
#[derive(Clone, Debug, Default)]
pub struct Rendered {
    pub text: String,
    pub files: Vec<FigureFile>,
    pub failure: Option<String>,
}

fn csv_err(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(format!("csv: {e}"))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(csv_err)?;
    String::from_utf8(bytes).map_err(csv_err)
}

fn opt(r: &Option<Rational>) -> (String, String) {
    r.as_ref().map_or((String::new(), String::new()), |v| (to_string(v), to_decimal(v)))
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub(crate) fn sweep_csv(t: &SweepTable) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![t.variable.header(), "upper", "lower", "upper_decimal", "lower_decimal", "pd_reference", "pd_reference_decimal"];
    if t.certified {
        header.push("certified");
    }
    w.write_record(&header).map_err(csv_err)?;
    for r in &t.rows {
        let (pd, pd_dec) = opt(&r.pd_reference);
        let mut rec = vec![
            r.value.to_string(),
            to_string(&r.upper),
            to_string(&r.lower),
            to_decimal(&r.upper),
            to_decimal(&r.lower),
            pd,
            pd_dec,
        ];
        if t.certified {
            rec.push(opt(&r.certified).0);
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w)
}

pub(crate) fn vertices_csv(rows: &[(usize, Vec<DofPoint>)]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "vertex_index", "d1", "d2", "d1_decimal", "d2_decimal"]).map_err(csv_err)?;
    for (k, vs) in rows {
        for (i, v) in vs.iter().enumerate() {
            w.write_record([k.to_string(), i.to_string(), to_string(&v.d1), to_string(&v.d2), to_decimal(&v.d1), to_decimal(&v.d2)])
                .map_err(csv_err)?;
        }
    }
    finish(w)
}

fn region_csv(doc: &RegionDoc) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["set", "index", "d1", "d2", "d1_decimal", "d2_decimal"]).map_err(csv_err)?;
    let sets = [("outer", doc.region.vertices()?), ("achievable", &doc.achievable[..])];
    for (name, vs) in sets {
        for (i, v) in vs.iter().enumerate() {
            w.write_record([name.to_string(), i.to_string(), to_string(&v.d1), to_string(&v.d2), to_decimal(&v.d1), to_decimal(&v.d2)])
                .map_err(csv_err)?;
        }
    }
    finish(w)
}

fn simulation_csv(doc: &SimulationDoc) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scheme", "s1", "s2", "t", "claimed_dof", "certified_dof", "compliant", "slope"]).map_err(csv_err)?;
    w.write_record([
        doc.scheme.to_string(),
        doc.s1.to_string(),
        doc.s2.to_string(),
        doc.t.to_string(),
        to_string(&doc.claimed_dof),
        opt(&doc.certified_dof).0,
        doc.compliance.compliant.to_string(),
        doc.slope.as_ref().map_or(String::new(), |s| format!("{:.6}", s.slope)),
    ])
    .map_err(csv_err)?;
    finish(w)
}

/// Computes and formats a command without touching the filesystem.
pub fn render(rc: &RunConfig) -> Result<Rendered, CliError> {
    let csv = rc.format == Format::Csv;
    let mut out = Rendered::default();
    match rc.command {
        Command::Region => {
            let doc = cmd_region(rc)?;
            out.text = if csv { region_csv(&doc)? } else { json(&doc)? };
        }
        Command::SweepK | Command::SweepN2 => {
            let var = if rc.command == Command::SweepK { SweepVariable::K } else { SweepVariable::N2 };
            let table = cmd_sumdof_sweep(rc, var)?;
            let bad = table.certification_failures();
            if !bad.is_empty() {
                out.failure = Some(format!("rows {bad:?} did not certify their lower bound"));
            }
            out.text = if csv { sweep_csv(&table)? } else { json(&table)? };
        }
        Command::Simulate => {
            let doc = cmd_simulate(rc)?;
            out.failure = doc.failure();
            out.text = if csv { simulation_csv(&doc)? } else { json(&doc)? };
        }
        Command::Figure(kind) => {
            out.files = cmd_figure(kind, rc)?;
            if rc.certify {
                let mut bad = Vec::new();
                for (var, values) in [(SweepVariable::K, vec![9, 6, 3]), (SweepVariable::N2, vec![20, 12])] {
                    let sub = RunConfig { values, ..rc.clone() };
                    bad.extend(cmd_sumdof_sweep(&sub, var)?.certification_failures().into_iter().map(|v| (var.header(), v)));
                }
                if !bad.is_empty() {
                    out.failure = Some(format!("figure rows {bad:?} did not certify their lower bound"));
                }
            }
        }
    }
    Ok(out)
}
