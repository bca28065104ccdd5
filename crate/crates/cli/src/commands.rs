use std::path::Path;
use std::time::Instant;

use num_rational::Ratio;
use serde_json::{json, Value};

use lagnp::arith;
use lagnp::criteria::{self, ExclusionVerdict, PipelineConfig, VerdictKind};
use lagnp::newton;
use lagnp::polys::{self, LaguerreInstance};
use lagnp::search::{
    self, Interval, ScanOptions, ScanReport, TableName, TableReport, VerdictDetail, VERSION,
};
use lagnp::verify::{self, CriterionResult};

use crate::{Command, Format, Regime, Verdicts};

pub const MAX_COEFF_N: u64 = 5_000;
pub const MAX_POLYGON_N: u64 = 10_000_000;
pub const MAX_S: u64 = 10_000_000;

/// Rendered output and whether it agrees with expectations.
pub type Output = (String, bool);

pub fn run(cmd: &Command, format: Format) -> Result<Output, String> {
    match *cmd {
        Command::Coeffs { n, s } => coeffs(n, s, format),
        Command::Polygon { n, s, prime } => polygon(n, s, prime, format),
        Command::Check {
            n,
            s,
            k,
            shift_bound,
            dumas_budget,
        } => check(n, s, k, shift_bound, dumas_budget, format),
        Command::Scan {
            k_min,
            k_max,
            s_min,
            s_max,
            regime,
            verdicts,
            budget,
            timing,
        } => {
            let k = interval("k", k_min, k_max)?;
            let s = interval("s", s_min, s_max)?;
            scan(k, s, regime, verdicts, budget, timing, format)
        }
        Command::Tables { ref name } => tables(name, format),
        Command::Dk {
            k,
            max_n,
            bound,
            ref najman_file,
            eliminate,
        } => dk(k, max_n, bound, najman_file.as_deref(), eliminate, format),
        Command::Gaps { lo, hi, ratio } => gaps(lo, hi, ratio, format),
        Command::Verify { criterion } => verify_suite(criterion, format),
    }
}

fn interval(name: &str, lo: u64, hi: u64) -> Result<Interval, String> {
    if lo > hi {
        return Err(format!("--{name}-min {lo} exceeds --{name}-max {hi}"));
    }
    Ok(Interval::new(lo, hi))
}

/// `lo..hi` (inclusive) or a single value.
pub fn parse_interval(text: &str) -> Result<Interval, String> {
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(text)?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!("need 1 <= lo <= hi, got {text:?}"));
    }
    Ok(Interval::new(lo, hi))
}

/// `a/b` or a terminating decimal; must exceed 1.
pub fn parse_ratio(text: &str) -> Result<Ratio<u64>, String> {
    let text = text.trim();
    let r = if let Some((a, b)) = text.split_once('/') {
        let a: u64 = a.trim().parse().map_err(|e| format!("{text:?}: {e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("{text:?}: {e}"))?;
        if b == 0 {
            return Err(format!("{text:?}: zero denominator"));
        }
        Ratio::new(a, b)
    } else {
        let (int, frac) = text.split_once('.').unwrap_or((text, ""));
        if frac.len() > 12 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(format!(
                "{text:?}: expected a/b or a decimal with at most 12 places"
            ));
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = int.parse().map_err(|e| format!("{text:?}: {e}"))?;
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|e| format!("{text:?}: {e}"))?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(|| format!("{text:?}: too large"))?;
        Ratio::new(num, den)
    };
    if r <= Ratio::from_integer(1) {
        return Err(format!("ratio must exceed 1, got {text}"));
    }
    Ok(r)
}

fn meta() -> Value {
    json!({ "version": VERSION })
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn render_csv<I, R>(header: &[&str], rows: I) -> Result<String, String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| e.to_string())?;
    for r in rows {
        w.write_record(r).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn coeffs(n: u64, s: u64, format: Format) -> Result<Output, String> {
    let inst = LaguerreInstance::new(n, s).map_err(|e| e.to_string())?;
    let g1 = polys::g1_coefficients(inst);
    let c = polys::coeff_strings(&g1);
    let a = (0..=n)
        .map(|j| polys::coeff_a(inst, j).map(|v| v.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let text = match format {
        Format::Json => render_json(&json!({
            "command": "coeffs",
            "n": n,
            "s": s,
            "coefficients": c,
            "a": a,
            "meta": meta(),
        })),
        Format::Csv => render_csv(
            &["j", "c_j", "a_j"],
            c.into_iter()
                .zip(a)
                .enumerate()
                .map(|(j, (c, a))| [j.to_string(), c, a]),
        )?,
    };
    Ok((text, true))
}

fn polygon(n: u64, s: u64, p: u64, format: Format) -> Result<Output, String> {
    if !arith::is_prime_u64(p) {
        return Err(format!("--prime {p} is not prime"));
    }
    let inst = LaguerreInstance::new(n, s).map_err(|e| e.to_string())?;
    let np = newton::instance_polygon(inst, p);
    let text = match format {
        Format::Json => {
            let edges: Vec<Value> = np
                .edges()
                .iter()
                .map(|e| {
                    json!({
                        "start": [e.start.0, e.start.1],
                        "end": [e.end.0, e.end.1],
                        "slope": e.to_string(),
                        "segments": e.segments(),
                    })
                })
                .collect();
            let vertices: Vec<Value> = np.vertices.iter().map(|v| json!([v.0, v.1])).collect();
            render_json(&json!({
                "command": "polygon",
                "n": n,
                "s": s,
                "prime": p,
                "vertices": vertices,
                "edges": edges,
                "degrees": newton::dumas_degree_set(&np).degrees(),
                "meta": meta(),
            }))
        }
        Format::Csv => render_csv(
            &["x", "y"],
            np.vertices
                .iter()
                .map(|v| [v.0.to_string(), v.1.to_string()]),
        )?,
    };
    Ok((text, true))
}

fn verdict_detail(v: &ExclusionVerdict) -> Value {
    let stage = match v.kind {
        VerdictKind::ExcludedByPrimeWitness { .. } => "witness",
        VerdictKind::ExcludedByShiftBound { .. } => "shift bound",
        VerdictKind::ExcludedByFilaseta { .. } => "Filaseta",
        VerdictKind::ExcludedByRobustDumas { .. } => "robust Dumas",
        VerdictKind::NotExcluded => "none",
        VerdictKind::Inconclusive => "skipped",
    };
    let flat = v.to_json();
    json!({
        "stage": stage,
        "l": flat["l"],
        "r": flat["r"],
        "delta": flat["delta"],
        "reverified": v.reverify(),
    })
}

fn verdict_row(v: &ExclusionVerdict) -> [String; 5] {
    [
        v.triple.n.to_string(),
        v.triple.k.to_string(),
        v.triple.s.to_string(),
        v.kind.name().to_string(),
        v.kind.prime().map(|p| p.to_string()).unwrap_or_default(),
    ]
}

fn check(
    n: u64,
    s: u64,
    k: u64,
    shift_bound: bool,
    dumas_budget: u64,
    format: Format,
) -> Result<Output, String> {
    if 2 * k > n {
        return Err(format!("need 2 <= k <= n/2, got n = {n}, k = {k}"));
    }
    let cfg = PipelineConfig {
        dumas_budget,
        shift_bound,
        ..PipelineConfig::default()
    };
    let v = criteria::excludes_factor_degree_with(LaguerreInstance { n, s }, k, &cfg)
        .map_err(|e| e.to_string())?;
    let text = match format {
        Format::Json => render_json(&json!({
            "command": "check",
            "triple": { "n": n, "k": k, "s": s },
            "kind": v.kind.name(),
            "prime": v.kind.prime(),
            "detail": verdict_detail(&v),
            "meta": meta(),
        })),
        Format::Csv => render_csv(&["n", "k", "s", "kind", "prime"], [verdict_row(&v)])?,
    };
    Ok((text, true))
}

fn with_command(mut v: Value, command: &str) -> Value {
    v.as_object_mut()
        .expect("reports are objects")
        .insert("command".into(), json!(command));
    v
}

fn scan(
    k: Interval,
    s: Interval,
    regime: Regime,
    verdicts: Verdicts,
    budget: u64,
    timing: bool,
    format: Format,
) -> Result<Output, String> {
    let space = match regime {
        Regime::Inner => search::inner_space(k, s),
        Regime::Outer => search::outer_space(k, s),
    };
    let opts = ScanOptions {
        budget,
        detail: match verdicts {
            Verdicts::All => VerdictDetail::All,
            Verdicts::NonWitness => VerdictDetail::NonWitness,
            Verdicts::Survivors => VerdictDetail::SurvivorsOnly,
        },
        timing,
        ..ScanOptions::default()
    };
    let rep = search::scan_space(&space, &opts).map_err(|e| e.to_string())?;
    let text = match format {
        Format::Json => render_json(&with_command(rep.to_json(), "scan")),
        Format::Csv => rep.to_csv().map_err(|e| e.to_string())?,
    };
    Ok((text, true))
}

fn tables(name: &str, format: Format) -> Result<Output, String> {
    let names = if name.eq_ignore_ascii_case("all") {
        TableName::ALL.to_vec()
    } else {
        vec![name.parse::<TableName>().map_err(|e| e.to_string())?]
    };
    let reports = names
        .into_iter()
        .map(search::reproduce_table)
        .collect::<Result<Vec<TableReport>, _>>()
        .map_err(|e| e.to_string())?;
    let agree = reports.iter().all(TableReport::agree);
    let text = match format {
        Format::Json => render_json(&json!({
            "command": "tables",
            "agree": agree,
            "tables": reports.iter().map(TableReport::to_json).collect::<Vec<_>>(),
            "meta": meta(),
        })),
        Format::Csv => render_csv(
            &["table", "row", "expected", "computed", "agree"],
            reports.iter().flat_map(|t| {
                t.rows.iter().map(|r| {
                    [
                        t.name.name().to_string(),
                        r.row.clone(),
                        r.expected.clone(),
                        r.computed.clone(),
                        r.agree.to_string(),
                    ]
                })
            }),
        )?,
    };
    Ok((text, agree))
}

fn elimination_json(rep: &ScanReport, s: Interval) -> Value {
    json!({
        "s": [s.lo, s.hi],
        "triples": rep.total,
        "survivors": rep.survivors.iter().map(|t| json!({"n": t.n, "k": t.k, "s": t.s})).collect::<Vec<_>>(),
        "counts": rep.counts,
    })
}

fn dk(
    k: u64,
    max_n: u64,
    bound: u64,
    najman: Option<&Path>,
    eliminate: Option<Interval>,
    format: Format,
) -> Result<Output, String> {
    // The environment default only makes sense for D_2.
    let najman = najman.filter(|_| k == 2);
    if najman.is_some() && bound != 100 {
        return Err("--najman-file needs --bound 100".into());
    }
    let mut set = search::smooth_window_scan(k, max_n, bound).map_err(|e| e.to_string())?;
    let external = match najman {
        Some(path) => {
            let values =
                search::ingest_najman(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let (extra, rejected) = search::d2_from_najman(&values);
            set.members.extend(&extra.members);
            set.members.sort_unstable();
            set.members.dedup();
            Some(json!({
                "path": path.display().to_string(),
                "accepted": extra.members,
                "rejected": rejected,
            }))
        }
        None => None,
    };
    let elimination = match eliminate {
        Some(s) => {
            let opts = ScanOptions {
                detail: VerdictDetail::NonWitness,
                ..ScanOptions::default()
            };
            Some((
                search::eliminate_dk_triples(&set, s, &opts).map_err(|e| e.to_string())?,
                s,
            ))
        }
        None => None,
    };
    let agree = elimination
        .as_ref()
        .is_none_or(|(r, _)| r.survivors.is_empty());
    let text = match format {
        Format::Json => render_json(&json!({
            "command": "dk",
            "k": set.k,
            "bound": set.bound,
            "max_n": set.n_max,
            "members": set.members,
            "external": external,
            "elimination": elimination.as_ref().map(|(r, s)| elimination_json(r, *s)),
            "meta": meta(),
        })),
        Format::Csv => render_csv(&["n"], set.members.iter().map(|n| [n.to_string()]))?,
    };
    Ok((text, agree))
}

fn gaps(lo: u64, hi: u64, ratio: Ratio<u64>, format: Format) -> Result<Output, String> {
    if lo > hi {
        return Err(format!("--lo {lo} exceeds --hi {hi}"));
    }
    let failure = search::first_gap_failure(lo, hi, ratio).map_err(|e| e.to_string())?;
    let ratio_text = format!("{}/{}", ratio.numer(), ratio.denom());
    let text = match format {
        Format::Json => render_json(&json!({
            "command": "gaps",
            "lo": lo,
            "hi": hi,
            "ratio": ratio_text,
            "holds": failure.is_none(),
            "first_failure": failure,
            "meta": meta(),
        })),
        Format::Csv => render_csv(
            &["lo", "hi", "ratio", "holds", "first_failure"],
            [[
                lo.to_string(),
                hi.to_string(),
                ratio_text,
                failure.is_none().to_string(),
                failure.map(|m| m.to_string()).unwrap_or_default(),
            ]],
        )?,
    };
    Ok((text, failure.is_none()))
}

fn verify_suite(criterion: Option<u32>, format: Format) -> Result<Output, String> {
    let ids: Vec<u32> = match criterion {
        Some(id) => vec![id],
        None => verify::CRITERIA.iter().map(|c| c.0).collect(),
    };
    let mut results = Vec::with_capacity(ids.len());
    for id in ids {
        let start = Instant::now();
        let r = verify::run_criterion(id).map_err(|e| format!("criterion {id}: {e}"))?;
        eprintln!("{} ({:.1}s)", r.line(), start.elapsed().as_secs_f64());
        results.push(r);
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    let text = match format {
        Format::Json => render_json(&json!({
            "command": "verify",
            "passed": results.len() - failed,
            "failed": failed,
            "criteria": results.iter().map(CriterionResult::to_json).collect::<Vec<_>>(),
            "meta": meta(),
        })),
        Format::Csv => render_csv(
            &["id", "title", "pass", "summary"],
            results.iter().map(|r| {
                [
                    r.id.to_string(),
                    r.title.to_string(),
                    r.pass.to_string(),
                    r.detail.first().cloned().unwrap_or_default(),
                ]
            }),
        )?,
    };
    Ok((text, failed == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios() {
        assert_eq!(parse_ratio("40/39").unwrap(), Ratio::new(40, 39));
        assert_eq!(
            parse_ratio("1.064286").unwrap(),
            Ratio::new(1_064_286, 1_000_000)
        );
        assert_eq!(parse_ratio("2").unwrap(), Ratio::from_integer(2));
        assert!(parse_ratio("1").is_err());
        assert!(parse_ratio("0.9").is_err());
        assert!(parse_ratio("3/0").is_err());
        assert!(parse_ratio("1.2.3").is_err());
    }

    #[test]
    fn intervals() {
        assert_eq!(parse_interval("10..92").unwrap(), Interval::new(10, 92));
        assert_eq!(parse_interval("10..=92").unwrap(), Interval::new(10, 92));
        assert_eq!(parse_interval("7").unwrap(), Interval::new(7, 7));
        assert!(parse_interval("0..4").is_err());
        assert!(parse_interval("9..4").is_err());
    }
}
