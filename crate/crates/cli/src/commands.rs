use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use commbound::analytic::{bound_refined_bits, bound_table, f_profile, fig2_rows};
use commbound::cbox::tuple_count;
use commbound::dual::{duality_gap, DualStatus, GapOptions};
use commbound::info::nats_to_bits;
use commbound::quantum::{cone_measure, haar_sample, mc_cone_measure, mc_overlap_moment, overlap_moment, McEstimate};
use commbound::{
    build_quantum_cbox, check_certificate, minimize_mutual_info, CBox, Certificate, Prior, TwoOutcomeMeasurement,
};
use serde_json::{json, Value};

use crate::failure::{CliResult, Failure};
use crate::io;
use crate::{AnalyticArgs, BoundArgs, Format, McArgs, Method, QuantumArgs};

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

pub fn validate(path: &Path) -> CliResult<String> {
    let cbox = io::read_box(path)?;
    let (mut worst, mut at) = (0.0f64, (0, 0));
    let mut smallest = f64::INFINITY;
    for a in 0..cbox.a_count() {
        for b in 0..cbox.m_count() {
            let row = cbox.row(a, b);
            let dev = (row.iter().sum::<f64>() - 1.0).abs();
            if dev > worst {
                (worst, at) = (dev, (a, b));
            }
            smallest = row.iter().copied().fold(smallest, f64::min);
        }
    }
    let mut out = String::new();
    writeln!(out, "valid box: a_count={} m_count={} s_count={}", cbox.a_count(), cbox.m_count(), cbox.s_count())
        .unwrap();
    match tuple_count(cbox.s_count(), cbox.m_count(), usize::MAX) {
        Ok(n) => writeln!(out, "outcome tuples: {n}").unwrap(),
        Err(_) => writeln!(out, "outcome tuples: beyond usize").unwrap(),
    }
    writeln!(out, "largest row-sum deviation: {worst:e} at (a={}, b={})", at.0, at.1).unwrap();
    writeln!(out, "smallest entry: {smallest}").unwrap();
    writeln!(out, "digest: {}", cbox.digest()).unwrap();
    Ok(out)
}

pub fn quantum(args: &QuantumArgs) -> CliResult<String> {
    let states = match (&args.states, &args.haar) {
        (Some(path), _) => io::read_states(path)?,
        (None, Some(v)) => haar_sample(v[0], v[1], args.seed)?,
        (None, None) => unreachable!("clap requires a state source"),
    };
    let dim = states.first().ok_or_else(|| Failure::invalid("no states"))?.dim();
    let axes = match (&args.axes, args.haar_axes) {
        (Some(path), _) => io::read_states(path)?,
        (None, Some(count)) => haar_sample(dim, count, args.seed.wrapping_add(1))?,
        (None, None) => unreachable!("clap requires an axis source"),
    };
    let axes: Vec<_> = axes.into_iter().map(TwoOutcomeMeasurement::new).collect();
    let mut doc = build_quantum_cbox(&states, &axes)?.to_json();
    doc.push('\n');
    match &args.output {
        Some(path) => {
            io::write_text(path, &doc)?;
            Ok(String::new())
        }
        None => Ok(doc),
    }
}

fn load_prior(spec: &str, cbox: &CBox) -> CliResult<Prior> {
    let prior = if spec == "uniform" { Prior::uniform(cbox.a_count())? } else { io::read_prior(Path::new(spec))? };
    if prior.len() != cbox.a_count() {
        return Err(Failure::invalid(format!("prior has {} weights, box has {} inputs", prior.len(), cbox.a_count())));
    }
    Ok(prior)
}

fn created() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()))
}

pub fn bound(args: &BoundArgs) -> CliResult<String> {
    let cbox = io::read_box(&args.cbox)?;
    let prior = load_prior(&args.prior, &cbox)?;
    tuple_count(cbox.s_count(), cbox.m_count(), args.cap.cap)?;
    if args.certificate.is_some() && args.method == Method::Primal {
        return Err(Failure::invalid("--certificate needs --method dual or both"));
    }
    let mut opts = GapOptions::default();
    opts.primal.gap_tol = args.tol;
    opts.primal.cap = args.cap.cap;
    opts.dual.gap_tol = args.tol;
    opts.dual.cap = args.cap.cap;

    let mut report = json!({
        "box_digest": cbox.digest(),
        "shape": [cbox.a_count(), cbox.m_count(), cbox.s_count()],
        "prior": prior.weights(),
        "method": format!("{:?}", args.method).to_lowercase(),
    });
    let mut csv = vec![("method", report["method"].as_str().unwrap().to_string())];
    if args.method == Method::Primal {
        let r = minimize_mutual_info(&cbox, &prior, &opts.primal)?;
        report["primal"] = json!({
            "value_bits": r.value_bits(),
            "value_nats": r.value_nats,
            "certified_bound_bits": nats_to_bits(r.dual_bound_nats),
            "iterations": r.iterations,
            "constraint_violation": r.constraint_violation,
        });
        csv.push(("primal_bits", r.value_bits().to_string()));
        csv.push(("certified_bound_bits", nats_to_bits(r.dual_bound_nats).to_string()));
    } else {
        let g = duality_gap(&cbox, &prior, &opts)?;
        if args.method == Method::Both {
            report["primal"] = json!({
                "value_bits": nats_to_bits(g.primal_nats),
                "value_nats": g.primal_nats,
                "iterations": g.primal.iterations,
                "constraint_violation": g.primal.constraint_violation,
            });
            report["gap_nats"] = json!(g.gap);
            csv.push(("primal_bits", nats_to_bits(g.primal_nats).to_string()));
        }
        report["dual"] = json!({
            "bound_bits": nats_to_bits(g.dual_nats),
            "bound_nats": g.dual_nats,
            "iterations": g.dual.iterations,
            "converged": g.dual.status == DualStatus::Converged,
        });
        csv.push(("dual_bits", nats_to_bits(g.dual_nats).to_string()));
        if args.method == Method::Both {
            csv.push(("gap_nats", g.gap.to_string()));
        }
        if let Some(path) = &args.certificate {
            let cert = Certificate::new(&cbox, &prior, &g.dual.point, g.dual_nats, created());
            let mut text = cert.to_json();
            text.push('\n');
            io::write_text(path, &text)?;
            report["certificate"] = json!(path.display().to_string());
        }
    }
    Ok(match args.format {
        Format::Json => pretty(&report),
        Format::Csv => {
            let (keys, values): (Vec<_>, Vec<_>) = csv.into_iter().unzip();
            format!("{}\n{}\n", keys.join(","), values.join(","))
        }
    })
}

pub fn verify(cert_path: &Path, box_path: &Path, cap: usize) -> CliResult<String> {
    let cert = io::read_certificate(cert_path)?;
    let cbox = io::read_box(box_path)?;
    let v = check_certificate(&cert, &cbox, cap)?;
    Ok(format!(
        "verified: {} bits ({} nats), claimed {} bits, largest constraint value {:e}\n",
        v.bound_bits, v.bound_nats, cert.claimed_bound_bits, v.max_violation
    ))
}

fn table_out(header: &[&str], rows: Vec<Vec<Value>>, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = header.join(",");
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = row
                    .iter()
                    .map(|v| match v {
                        Value::Null => String::new(),
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let records: Vec<Value> = rows
                .into_iter()
                .map(|row| Value::Object(header.iter().map(|h| h.to_string()).zip(row).collect()))
                .collect();
            pretty(&Value::Array(records))
        }
    }
}

pub fn analytic(args: &AnalyticArgs) -> CliResult<String> {
    if args.table {
        let header = [
            "N",
            "alpha",
            "beta",
            "theta_m",
            "bound_bits_approx",
            "bound_bits_refined",
            "bound_bits_feasible",
            "trivial_bits",
            "rank1_trivial_bits",
            "prior_reference_bits",
        ];
        let rows = bound_table()?
            .into_iter()
            .map(|c| {
                let r = c.row;
                vec![
                    json!(r.n),
                    json!(r.alpha),
                    json!(r.beta),
                    json!(r.theta_m),
                    json!(r.bound_bits_approx),
                    json!(r.bound_bits_refined),
                    json!(r.bound_bits_feasible),
                    json!(c.trivial_bits),
                    json!(c.rank1_trivial_bits),
                    json!(c.prior_reference_bits),
                ]
            })
            .collect();
        return Ok(table_out(&header, rows, args.format));
    }
    if let Some(v) = &args.fig1 {
        let (n, grid) = (v[0], v[1]);
        let row = bound_refined_bits(n)?;
        let rows = f_profile(n, row.alpha, row.beta, grid)?
            .into_iter()
            .map(|(theta, f)| vec![json!(theta), json!(f), json!(n)])
            .collect();
        return Ok(table_out(&["theta", "F", "N"], rows, args.format));
    }
    let header = ["N", "bound_refined_bits", "bound_approx_bits", "reference_doublecap", "reference_trivial"];
    let rows = fig2_rows()?
        .into_iter()
        .map(|r| {
            vec![
                json!(r.n),
                json!(r.bound_refined_bits),
                json!(r.bound_approx_bits),
                json!(r.reference_doublecap),
                json!(r.reference_trivial),
            ]
        })
        .collect();
    Ok(table_out(&header, rows, args.format))
}

/// Accepts `1000000` as well as `1e6`.
fn parse_count(s: &str, what: &str) -> CliResult<usize> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= usize::MAX as f64 => Ok(x as usize),
        _ => Err(Failure::invalid(format!("{what}: expected a nonnegative integer, got {s:?}"))),
    }
}

fn parse_real(s: &str, what: &str) -> CliResult<f64> {
    s.parse::<f64>().map_err(|_| Failure::invalid(format!("{what}: expected a number, got {s:?}")))
}

fn mc_row(quantity: &str, n: usize, theta: Option<f64>, est: McEstimate, expected: f64) -> Vec<Value> {
    vec![
        json!(quantity),
        json!(n),
        json!(theta),
        json!(est.estimate),
        json!(est.stderr),
        json!(expected),
        json!(est.z_score(expected)),
    ]
}

pub fn mc(args: &McArgs) -> CliResult<String> {
    let header = ["quantity", "N", "theta", "estimate", "stderr", "expected", "z"];
    let mut rows = Vec::new();
    if let Some(v) = &args.moments {
        let n = parse_count(&v[0], "N")?;
        let samples = parse_count(&v[1], "SAMPLES")?;
        let seed = parse_count(&v[2], "SEED")? as u64;
        for k in [2u32, 4] {
            let est = mc_overlap_moment(n, k, samples, seed.wrapping_add(k as u64))?;
            rows.push(mc_row(&format!("moment{k}"), n, None, est, overlap_moment(n, k)?));
        }
    }
    if let Some(v) = &args.cone {
        let n = parse_count(&v[0], "N")?;
        let theta = parse_real(&v[1], "THETA")?;
        let samples = parse_count(&v[2], "SAMPLES")?;
        let seed = parse_count(&v[3], "SEED")? as u64;
        let est = mc_cone_measure(theta, n, samples, seed)?;
        rows.push(mc_row("cone_measure", n, Some(theta), est, cone_measure(theta, n)?));
    }
    Ok(table_out(&header, rows, args.format))
}
