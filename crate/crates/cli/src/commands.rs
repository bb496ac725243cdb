use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};

use perfseq::aop::{check_aop, classify_projection, sequence_witness, AopVerdict};
use perfseq::construct::{chu_sequence, frank_array};
use perfseq::correlation::{autocorrelate, autocorrelate_float, Concordance};
use perfseq::format::{Loaded, Provenance, SequenceFile};
use perfseq::quaternion::{first_off_peak_with, quat_autocorrelate_with};
use perfseq::scatter::{
    collapse_check, fractional_dependence_survey, trace_crosscorrelation_shifted,
};
use perfseq::search::{run, Restriction, RunOptions, SearchSpec, Shard};
use perfseq::{
    BiQuadraticSpec, Convention, Cyclotomic, Error, Family, PhaseArray, PhaseSequence, Profile,
    ProjectionAxis, Quaternion, Result, Witness,
};

use crate::{
    AxisArg, ConstructArgs, ConstructFamily, ConventionArg, Mode, ProjectArgs, ScatterArgs,
    SearchArgs, SurveyArgs, VerifyArgs,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILS: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::Overflow(_) => EXIT_INVARIANT,
        _ => EXIT_INPUT,
    }
}

/// Fully resolved invocation, echoed into every report.
#[derive(Debug, Serialize)]
struct RunConfig {
    command: &'static str,
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    mode: Mode,
    jobs: usize,
    budget: Option<u64>,
    seed: Option<u64>,
    tool_version: &'static str,
}

impl RunConfig {
    fn new(command: &'static str, input: Option<&Path>, output: Option<&Path>, mode: Mode) -> Self {
        Self {
            command,
            input: input.map(Path::to_path_buf),
            output: output.map(Path::to_path_buf),
            mode,
            jobs: 1,
            budget: None,
            seed: None,
            tool_version: env!("CARGO_PKG_VERSION"),
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Rational-integer value of a cyclotomic integer, decided exactly.
fn integer_value(x: &Cyclotomic) -> Option<i64> {
    x.as_integer().or_else(|| {
        let k = x.to_complex::<f64>().re.round() as i64;
        x.value_is(k).then_some(k)
    })
}

fn load(path: &Path) -> Result<(SequenceFile, Loaded)> {
    let f = SequenceFile::read(path).map_err(|e| match e {
        Error::Io(io) => Error::Format(format!("{}: {io}", path.display())),
        other => other,
    })?;
    let l = f.load()?;
    Ok((f, l))
}

pub fn construct(a: ConstructArgs) -> Result<u8> {
    let mut params = BTreeMap::new();
    let family = match a.family {
        ConstructFamily::Frank => "frank",
        ConstructFamily::Chu => "chu",
    };
    params.insert("family".to_string(), json!(family));
    params.insert("n".to_string(), json!(a.n));
    let prov = Some(Provenance::new("construct", params));
    let file = match a.family {
        ConstructFamily::Frank => SequenceFile::from_array(&frank_array(a.n)?, prov),
        ConstructFamily::Chu => SequenceFile::from_sequence(&chu_sequence(a.n)?, prov),
    };
    emit(&file.to_json()?, a.out.as_deref())?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Predicate {
    name: String,
    holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Value>,
}

fn perfection(s: &PhaseSequence) -> Result<Predicate> {
    let w = sequence_witness(s);
    Ok(Predicate {
        name: "perfect".into(),
        holds: w.is_none(),
        witness: w.map(serde_json::to_value).transpose()?,
    })
}

fn aop_predicate(a: &PhaseArray) -> Result<Predicate> {
    let v: AopVerdict = check_aop(a);
    Ok(Predicate {
        name: format!("aop-divisor-{}", a.cols()),
        holds: v.holds,
        witness: match v.witness {
            Some(w) => Some(json!({
                "condition": v.failing_condition,
                "witness": serde_json::to_value::<&Witness>(&w)?,
            })),
            None => None,
        },
    })
}

fn float_advisory(s: &PhaseSequence) -> Result<Value> {
    let exact: Profile = autocorrelate(s)?;
    let float = autocorrelate_float::<f64>(s);
    let mut conc = Concordance::default();
    conc.record_profile(&exact, &float, s.len());
    let max_off_peak = float
        .iter()
        .skip(1)
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    Ok(json!({
        "max_off_peak_magnitude": max_off_peak,
        "concordance": conc,
    }))
}

pub fn verify(a: VerifyArgs) -> Result<u8> {
    let (_, loaded) = load(&a.path)?;
    let mut preds = Vec::new();
    let mut advisory = None;
    let kind;
    match loaded {
        Loaded::Sequence(s) => {
            kind = "sequence";
            preds.push(perfection(&s)?);
            if let Some(c) = a.divisor {
                if c == 0 || s.len() % c != 0 {
                    return Err(Error::InvalidArgument(format!(
                        "divisor {c} does not divide length {}",
                        s.len()
                    )));
                }
                preds.push(aop_predicate(&PhaseArray::unflatten(&s, s.len() / c, c)?)?);
            }
            if a.mode == Mode::Float {
                advisory = Some(float_advisory(&s)?);
            }
        }
        Loaded::Array(arr) => {
            kind = "array";
            let s = arr.flatten();
            preds.push(perfection(&s)?);
            let folded = match a.divisor {
                Some(c) if c == 0 || s.len() % c != 0 => {
                    return Err(Error::InvalidArgument(format!(
                        "divisor {c} does not divide length {}",
                        s.len()
                    )))
                }
                Some(c) => PhaseArray::unflatten(&s, s.len() / c, c)?,
                None => arr,
            };
            preds.push(aop_predicate(&folded)?);
            if a.mode == Mode::Float {
                advisory = Some(float_advisory(&s)?);
            }
        }
        Loaded::Quaternion(q) => {
            kind = "quaternion";
            let convs: &[Convention] = match a.convention {
                ConventionArg::Right => &[Convention::Right],
                ConventionArg::Left => &[Convention::Left],
                ConventionArg::Both => &Convention::BOTH,
            };
            for &c in convs {
                let off = first_off_peak_with(q.units(), c);
                let witness = off.map(|tau| {
                    let v: Quaternion = quat_autocorrelate_with(&q, c)[tau];
                    json!({ "shift": tau, "value": v.0 })
                });
                preds.push(Predicate {
                    name: format!(
                        "perfect-{}",
                        serde_json::to_value(c)?.as_str().unwrap_or("")
                    ),
                    holds: off.is_none(),
                    witness,
                });
            }
        }
        Loaded::Projection(_, r) => {
            kind = "projection";
            let v = classify_projection(&r)?;
            preds.push(Predicate {
                name: "perfect-projection".into(),
                holds: v.perfect && !v.degenerate,
                witness: (!v.perfect || v.degenerate).then(|| {
                    json!({
                        "first_failure": v.first_failure,
                        "degenerate": v.degenerate,
                    })
                }),
            });
        }
    }
    let holds = preds.iter().all(|p| p.holds);
    let report = json!({
        "config": RunConfig::new("verify", Some(&a.path), a.out.as_deref(), a.mode),
        "kind": kind,
        "holds": holds,
        "predicates": preds,
        "float_advisory": advisory,
    });
    emit(&to_json(&report)?, a.out.as_deref())?;
    Ok(if holds { EXIT_OK } else { EXIT_FAILS })
}

fn parse_shard(s: &str) -> Result<Shard> {
    let bad = || Error::InvalidArgument(format!("shard `{s}` is not of the form i/m"));
    let (i, m) = s.split_once('/').ok_or_else(bad)?;
    Ok(Shard {
        index: i.trim().parse().map_err(|_| bad())?,
        count: m.trim().parse().map_err(|_| bad())?,
    })
}

pub fn search(a: SearchArgs) -> Result<u8> {
    let need_n = || {
        a.n.ok_or_else(|| Error::InvalidArgument("--n is required for this family".into()))
    };
    let need_len = || {
        a.length
            .ok_or_else(|| Error::InvalidArgument("--length is required for raw families".into()))
    };
    let rows = (a.min_r, a.max_r);
    let cols = (a.min_c, a.max_c);
    let mut spec = match a.family {
        Family::Poly => SearchSpec::poly(need_n()?, a.deg_x, a.deg_y, rows, cols),
        Family::Floored => {
            let k = a.k.ok_or_else(|| {
                Error::InvalidArgument("--k is required for floored search".into())
            })?;
            SearchSpec::floored(need_n()?, k, a.deg_x, a.deg_y, rows, cols)
        }
        Family::RawPhase => SearchSpec::raw_phase(need_n()?, need_len()?),
        Family::RawQuaternion => SearchSpec::raw_quaternion(need_len()?),
    };
    spec.budget = a.budget;
    spec.seed = a.seed;
    spec.symmetry = a.symmetry;
    spec.concordance = a.mode == Mode::Float;
    spec.hit_limit = a.hit_limit;
    spec.shard = a.shard.as_deref().map(parse_shard).transpose()?;
    if a.collapse_constrained {
        spec.restriction = Some(Restriction::CollapseConstrained);
    }
    let opts = RunOptions {
        jobs: a.jobs.max(1),
        progress: (a.progress > 0.0).then(|| Duration::from_secs_f64(a.progress)),
    };
    let outcome = run(&spec, &opts)?;
    let r = &outcome.report;
    emit(&r.to_json()?, a.out.as_deref())?;

    let mut config = RunConfig::new("search", None, a.out.as_deref(), a.mode);
    config.jobs = opts.jobs;
    config.budget = Some(a.budget);
    config.seed = Some(a.seed);
    let sidecar = to_json(&json!({ "config": config, "stats": outcome.stats }))?;
    match &a.out {
        Some(p) => {
            let mut name = p.as_os_str().to_owned();
            name.push(".stats.json");
            fs::write(PathBuf::from(name), sidecar)?;
        }
        None => eprint!("{sidecar}"),
    }
    eprintln!(
        "search {}: {} candidates, {} hits, max_hit_length {}{}",
        spec.family,
        r.tally.candidates,
        r.tally.hits,
        r.max_hit_length,
        r.length_bound
            .map(|b| format!(" (bound {b})"))
            .unwrap_or_default()
    );
    if r.invariant_violated() {
        eprintln!(
            "perfseq: invariant violation: bound {} lemma {} prune {} implication {}",
            r.tally.bound_violations,
            r.tally.lemma_violations,
            r.tally.spot_check_mismatches,
            r.tally.implication_violations
        );
        return Ok(EXIT_INVARIANT);
    }
    Ok(EXIT_OK)
}

pub fn scatter(a: ScatterArgs) -> Result<u8> {
    let rows = a.rows.unwrap_or((a.n * a.k) as usize);
    let spec = BiQuadraticSpec::new(a.n, a.k, a.a, a.b, a.c, rows)?;
    if spec.cols() < 2 {
        return Err(Error::InvalidArgument(
            "scatter needs at least two columns".into(),
        ));
    }
    fs::create_dir_all(&a.out)?;
    let collapse = collapse_check(&spec);
    println!("collapse: {}", collapse.collapsed);
    match collapse.period_k_verified {
        Some(v) => println!(
            "period-k: {} (max deviation {:.3e})",
            if v { "verified" } else { "failed" },
            collapse.max_deviation
        ),
        None => println!("period-k: n/a"),
    }
    let mut consistent = true;
    for j1 in 0..spec.cols() {
        for j2 in j1 + 1..spec.cols() {
            let t = trace_crosscorrelation_shifted::<f64>(&spec, j1, j2, a.shift)?;
            let name = if a.shift == 0 {
                format!("pair_{j1}_{j2}.csv")
            } else {
                format!("pair_{j1}_{j2}_shift_{}.csv", a.shift)
            };
            t.write_csv(fs::File::create(a.out.join(name))?)?;
            consistent &= t.consistent;
            println!(
                "pair {j1} {j2}: final {:+.12} {:+.12}i exact_zero {}{}",
                t.final_sum.re,
                t.final_sum.im,
                t.exact_sum.is_zero(),
                if t.consistent { "" } else { " INCONSISTENT" }
            );
        }
    }
    Ok(if consistent { EXIT_OK } else { EXIT_INVARIANT })
}

pub fn survey(a: SurveyArgs) -> Result<u8> {
    let s = fractional_dependence_survey(a.n, a.k, a.budget as u128)?;
    let mut config = RunConfig::new("survey", None, a.out.as_deref(), Mode::Exact);
    config.budget = Some(a.budget);
    emit(
        &to_json(&json!({ "config": config, "survey": s }))?,
        a.out.as_deref(),
    )?;
    Ok(EXIT_OK)
}

pub fn project(a: ProjectArgs) -> Result<u8> {
    let (_, loaded) = load(&a.path)?;
    let arr = match loaded {
        Loaded::Array(arr) => arr,
        Loaded::Sequence(s) => PhaseArray::unflatten(&s, 1, s.len())?,
        _ => {
            return Err(Error::InvalidArgument(
                "project needs a phase array file".into(),
            ))
        }
    };
    let axis = match a.axis {
        AxisArg::Cols => ProjectionAxis::ColumnSum,
        AxisArg::Rows => ProjectionAxis::RowSum,
    };
    let r = arr.project::<i64>(axis)?;
    let v = classify_projection(&r)?;
    if let Some(out) = &a.out {
        let mut params = BTreeMap::new();
        params.insert("input".to_string(), json!(a.path));
        params.insert("axis".to_string(), serde_json::to_value(axis)?);
        SequenceFile::from_projection(axis, &r, Some(Provenance::new("project", params)))
            .write(out)?;
    }
    let holds = v.perfect && !v.degenerate;
    let report = json!({
        "config": RunConfig::new("project", Some(&a.path), a.out.as_deref(), Mode::Exact),
        "axis": axis,
        "length": r.len(),
        "perfect": v.perfect,
        "degenerate": v.degenerate,
        "peak": integer_value(&v.peak),
        "rows_times_cols": arr.rows() * arr.cols(),
        "first_failure": v.first_failure,
    });
    print!("{}", to_json(&report)?);
    Ok(if holds { EXIT_OK } else { EXIT_FAILS })
}
